//! Bundled reference scenarios: small networks with traffic tables used by
//! the examples, the bundled configs and the acceptance runs.
//!
//! The two-slot urgency fragment is exact: one link holds a two-slot packet
//! on a sure channel while the other holds a one-slot packet on a weak
//! channel, so expected-gain-greedy picks the safe link and strands the
//! urgent one. The longer tables extending it (and the three-link trap) are
//! documented reconstructions tuned to reproduce orderings, not slot-exact
//! replications of any external trace.

use crate::interference::InterferenceGraph;
use crate::traffic::{
    build_alternating_pattern, AlternatingPattern, Arrival, PatternSlot, TrafficFadingChain,
};

fn arrival(count: u32, deadline: u32) -> Arrival {
    Arrival { count, deadline }
}

/// The exact two-link fragment: slot 0 brings link 0 a deadline-2 packet
/// (q=1) and link 1 a deadline-1 packet (q=0.5); slot 1 brings nothing and
/// only link 0's channel stays usable.
pub fn urgency_fragment_slots() -> Vec<PatternSlot> {
    vec![
        PatternSlot {
            arrivals: vec![vec![arrival(1, 2)], vec![arrival(1, 1)]],
            success_probs: vec![1.0, 0.5],
        },
        PatternSlot::quiet(vec![1.0, 0.0]),
    ]
}

/// The fragment with the link roles swapped: link 1 patient, link 0 urgent.
pub fn urgency_fragment_mirror_slots() -> Vec<PatternSlot> {
    vec![
        PatternSlot {
            arrivals: vec![vec![arrival(1, 1)], vec![arrival(1, 2)]],
            success_probs: vec![0.5, 1.0],
        },
        PatternSlot::quiet(vec![0.0, 1.0]),
    ]
}

/// Two collocated links whose traffic alternates randomly between the
/// urgency fragment and its mirror: each two-slot cycle one link holds the
/// patient packet and the other the now-or-never one, and the roles flip
/// with probability 1/2 at cycle boundaries. The flips punish schedulers
/// that rank links by deficit alone, because the link they have learned to
/// favor keeps switching between the patient and the urgent role.
pub fn two_link_collocated() -> (InterferenceGraph, TrafficFadingChain) {
    let graph = InterferenceGraph::collocated(2);
    let chain = build_alternating_pattern(&AlternatingPattern {
        patterns: vec![urgency_fragment_slots(), urgency_fragment_mirror_slots()],
        switch_prob: 0.5,
        d_max: 2,
        a_max: 1,
    })
    .expect("reference pattern is valid");
    (graph, chain)
}

/// Star over three links: the center (link 0) interferes with both leaves,
/// the leaves are compatible with each other.
pub fn three_link_star() -> InterferenceGraph {
    InterferenceGraph::new(3, &[(0, 1), (0, 2)]).expect("valid edge list")
}

/// Greedy trap on the three-link star (reconstruction): each two-slot cycle
/// loads the center with two deadline-2 packets and both leaves with a
/// deadline-1 packet. Ranking by current deficit-weight serves the center
/// first and strands both leaves, while a planner serves the leaves in slot
/// 0 and the center in slot 1.
pub fn three_link_greedy_trap_slots() -> Vec<PatternSlot> {
    vec![
        PatternSlot {
            arrivals: vec![vec![arrival(2, 2)], vec![arrival(1, 1)], vec![arrival(1, 1)]],
            success_probs: vec![1.0, 1.0, 1.0],
        },
        PatternSlot::quiet(vec![1.0, 1.0, 1.0]),
    ]
}

pub fn three_link_greedy_trap() -> (InterferenceGraph, TrafficFadingChain) {
    let chain = build_alternating_pattern(&AlternatingPattern {
        patterns: vec![three_link_greedy_trap_slots()],
        switch_prob: 1.0,
        d_max: 2,
        a_max: 2,
    })
    .expect("reference pattern is valid");
    (three_link_star(), chain)
}

/// Five links with conflicts 0-1, 1-2, 1-3, 3-4. Links 1 and 4 carry the
/// patient role of the fragment (deadline 2, sure channel), links 0, 2 and 3
/// the urgent role (deadline 1, weak channel).
pub fn five_link_sparse() -> (InterferenceGraph, TrafficFadingChain) {
    let graph = InterferenceGraph::new(5, &[(0, 1), (1, 2), (1, 3), (3, 4)]).expect("valid edges");
    let urgent = |slot: usize| -> (Vec<Arrival>, f64) {
        if slot == 0 {
            (vec![arrival(1, 1)], 0.5)
        } else {
            (vec![], 0.0)
        }
    };
    let patient = |slot: usize| -> (Vec<Arrival>, f64) {
        if slot == 0 {
            (vec![arrival(1, 2)], 1.0)
        } else {
            (vec![], 1.0)
        }
    };
    let mut slots = Vec::new();
    for s in 0..2 {
        let mut arrivals = Vec::new();
        let mut q = Vec::new();
        for link in 0..5 {
            let (a, ql) = if link == 1 || link == 4 { patient(s) } else { urgent(s) };
            arrivals.push(a);
            q.push(ql);
        }
        slots.push(PatternSlot { arrivals, success_probs: q });
    }
    let chain = build_alternating_pattern(&AlternatingPattern {
        patterns: vec![slots],
        switch_prob: 1.0,
        d_max: 2,
        a_max: 1,
    })
    .expect("reference pattern is valid");
    (graph, chain)
}

/// Chain lookup for the config file's `scenario` kind.
pub fn chain_by_name(name: &str) -> Option<TrafficFadingChain> {
    match name {
        "two-link-collocated" => Some(two_link_collocated().1),
        "three-link-greedy-trap" => Some(three_link_greedy_trap().1),
        "five-link-sparse" => Some(five_link_sparse().1),
        _ => None,
    }
}

/// Graph lookup matching `chain_by_name`.
pub fn graph_by_name(name: &str) -> Option<InterferenceGraph> {
    match name {
        "two-link-collocated" => Some(two_link_collocated().0),
        "three-link-greedy-trap" => Some(three_link_greedy_trap().0),
        "five-link-sparse" => Some(five_link_sparse().0),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_chains_validate() {
        for name in ["two-link-collocated", "three-link-greedy-trap", "five-link-sparse"] {
            let chain = chain_by_name(name).unwrap();
            assert_eq!(chain.validate(), Ok(()), "{name}");
            let graph = graph_by_name(name).unwrap();
            assert_eq!(graph.link_count(), chain.link_count(), "{name}");
        }
    }

    #[test]
    fn fragment_contents_exact() {
        let slots = urgency_fragment_slots();
        assert_eq!(slots.len(), 2);
        assert_eq!(slots[0].arrivals[0], vec![arrival(1, 2)]);
        assert_eq!(slots[0].arrivals[1], vec![arrival(1, 1)]);
        assert_eq!(slots[0].success_probs, vec![1.0, 0.5]);
        assert_eq!(slots[1].success_probs, vec![1.0, 0.0]);
        assert!(slots[1].arrivals.iter().all(Vec::is_empty));
    }
}
