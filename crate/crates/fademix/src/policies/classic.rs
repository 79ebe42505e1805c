//! Deterministic weight-driven schedulers: exact max-weight selection over
//! the active schedules and the greedy maximal heuristic.

use crate::interference::InterferenceGraph;
use crate::policies::{PolicyError, WeightedSchedule};

/// Picks the schedule maximizing `sum of w_l * q_l`. Ties break toward the
/// lexicographically smallest schedule; `schedules` must already be sorted
/// canonically (as `active_schedules` produces them).
pub fn mws_select(
    schedules: &[Vec<usize>],
    deficits: &[f64],
    success_probs: &[f64],
) -> Result<Vec<usize>, PolicyError> {
    if schedules.is_empty() {
        return Err(PolicyError::NoSchedule);
    }
    let mut best: Option<WeightedSchedule> = None;
    for s in schedules {
        let cand = WeightedSchedule::new(s.clone(), deficits, success_probs);
        match &best {
            Some(b) if cand.weight <= b.weight => {}
            _ => best = Some(cand),
        }
    }
    Ok(best.expect("nonempty input").schedule)
}

/// Greedy maximal scheduling: repeatedly take the nonempty link with the
/// largest `w_l * q_l` (lowest index on ties), remove its closed
/// neighborhood, and repeat. The result is maximal among nonempty links.
pub fn gms_select(
    graph: &InterferenceGraph,
    nonempty: &[bool],
    deficits: &[f64],
    success_probs: &[f64],
) -> Vec<usize> {
    let mut remaining: Vec<usize> = (0..graph.link_count()).filter(|&l| nonempty[l]).collect();
    let mut schedule = Vec::new();
    while !remaining.is_empty() {
        let &best = remaining
            .iter()
            .max_by(|&&a, &&b| {
                let wa = deficits[a] * success_probs[a];
                let wb = deficits[b] * success_probs[b];
                wa.partial_cmp(&wb)
                    .expect("weights are finite")
                    // Lowest index wins ties: compare indices reversed.
                    .then(b.cmp(&a))
            })
            .expect("nonempty checked");
        schedule.push(best);
        remaining.retain(|&l| l != best && !graph.are_adjacent(l, best));
    }
    schedule.sort_unstable();
    schedule
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> InterferenceGraph {
        InterferenceGraph::new(3, &[(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn mws_picks_heavier_pair_on_path() {
        let schedules = vec![vec![0, 2], vec![1]];
        let w = [3.0, 5.0, 4.0];
        let q = [1.0, 1.0, 1.0];
        assert_eq!(mws_select(&schedules, &w, &q).unwrap(), vec![0, 2]);
    }

    #[test]
    fn mws_single_schedule() {
        let schedules = vec![vec![1]];
        assert_eq!(mws_select(&schedules, &[0.0, 2.0, 0.0], &[1.0; 3]).unwrap(), vec![1]);
    }

    #[test]
    fn mws_tie_breaks_lexicographically() {
        let schedules = vec![vec![0], vec![1]];
        assert_eq!(mws_select(&schedules, &[1.0, 1.0], &[1.0, 1.0]).unwrap(), vec![0]);
    }

    #[test]
    fn mws_empty_errors() {
        assert_eq!(mws_select(&[], &[], &[]), Err(PolicyError::NoSchedule));
    }

    #[test]
    fn gms_traces_greedy_rule_on_path() {
        let g = path3();
        let w = [3.0, 5.0, 4.0];
        let q = [1.0, 1.0, 1.0];
        // Link 1 has the largest product and blocks 0 and 2.
        assert_eq!(gms_select(&g, &[true, true, true], &w, &q), vec![1]);
    }

    #[test]
    fn gms_collocated_single_best() {
        let g = InterferenceGraph::collocated(3);
        assert_eq!(gms_select(&g, &[true; 3], &[1.0, 9.0, 5.0], &[1.0; 3]), vec![1]);
    }

    #[test]
    fn gms_result_is_maximal_and_achieves_beta_bound_on_path() {
        let g = path3();
        let w = [3.0, 5.0, 4.0];
        let q = [1.0, 1.0, 1.0];
        let gms = gms_select(&g, &[true, true, true], &w, &q);
        let gms_weight: f64 = gms.iter().map(|&l| w[l] * q[l]).sum();
        // W* = 7 from {0,2}; beta = 2 on the path.
        assert!(gms_weight >= 7.0 / 2.0);
    }

    #[test]
    fn gms_empty_network_idles() {
        let g = path3();
        assert!(gms_select(&g, &[false; 3], &[1.0; 3], &[1.0; 3]).is_empty());
    }
}
