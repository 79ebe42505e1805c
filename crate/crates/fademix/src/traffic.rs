//! Joint traffic-and-fading process: a finite irreducible Markov chain whose
//! states carry per-link packet arrivals (count and deadline) and per-link
//! channel success probabilities.
//!
//! The scheduler observes the success probabilities of the current state
//! before deciding; realized channel outcomes are sampled afterwards and live
//! in the dynamics module, never here.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

const ROW_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum ChainError {
    #[error("pattern spec violation: {0}")]
    SpecViolation(String),
    #[error("product state space of {0} states exceeds the cap of {1}")]
    StateSpaceTooLarge(usize, usize),
    #[error("chain definition invalid: {0}")]
    Malformed(String),
}

/// First failed validity condition of a chain, with the witness.
#[derive(Debug, Clone, PartialEq)]
pub enum ChainViolation {
    RowNotStochastic { state: usize, sum: f64 },
    NotIrreducible { unreachable_state: usize },
    /// The link never sees a usable channel within the deadline of any of
    /// its arrivals, so no packet of it can ever be delivered.
    TrivialLink { link: usize },
}

impl std::fmt::Display for ChainViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ChainViolation::RowNotStochastic { state, sum } => {
                write!(f, "transition row {state} sums to {sum}, not 1")
            }
            ChainViolation::NotIrreducible { unreachable_state } => {
                write!(f, "chain is not irreducible (state {unreachable_state} breaks strong connectivity)")
            }
            ChainViolation::TrivialLink { link } => {
                write!(f, "link {link} can never deliver a packet within its deadlines")
            }
        }
    }
}

/// A batch of identical packets arriving on one link in one slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Arrival {
    pub count: u32,
    /// Slots available for delivery, counting the arrival slot itself.
    pub deadline: u32,
}

/// One state of the joint process: per-link arrivals plus per-link channel
/// success probabilities in force while the chain sits in this state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrafficFadingState {
    pub arrivals: Vec<Vec<Arrival>>,
    pub success_probs: Vec<f64>,
}

impl TrafficFadingState {
    pub fn link_count(&self) -> usize {
        self.success_probs.len()
    }

    pub fn total_arrivals(&self, link: usize) -> u32 {
        self.arrivals[link].iter().map(|a| a.count).sum()
    }

    fn check(&self, links: usize) -> Result<(), ChainError> {
        if self.arrivals.len() != links || self.success_probs.len() != links {
            return Err(ChainError::Malformed(format!(
                "state has {} arrival rows / {} success probs, expected {}",
                self.arrivals.len(),
                self.success_probs.len(),
                links
            )));
        }
        for &q in &self.success_probs {
            if !(0.0..=1.0).contains(&q) || q.is_nan() {
                return Err(ChainError::Malformed(format!("success probability {q} outside [0,1]")));
            }
        }
        for batch in self.arrivals.iter().flatten() {
            if batch.deadline == 0 {
                return Err(ChainError::Malformed("arrival deadline must be >= 1".into()));
            }
        }
        Ok(())
    }
}

/// Finite irreducible Markov chain over traffic-fading states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrafficFadingChain {
    states: Vec<TrafficFadingState>,
    transition_matrix: Vec<Vec<f64>>,
    initial_state: usize,
}

impl TrafficFadingChain {
    pub fn new(
        states: Vec<TrafficFadingState>,
        transition_matrix: Vec<Vec<f64>>,
        initial_state: usize,
    ) -> Result<Self, ChainError> {
        if states.is_empty() {
            return Err(ChainError::Malformed("chain needs at least one state".into()));
        }
        let links = states[0].link_count();
        for s in &states {
            s.check(links)?;
        }
        if transition_matrix.len() != states.len()
            || transition_matrix.iter().any(|row| row.len() != states.len())
        {
            return Err(ChainError::Malformed("transition matrix shape mismatch".into()));
        }
        for row in &transition_matrix {
            if row.iter().any(|&p| p < 0.0 || p.is_nan()) {
                return Err(ChainError::Malformed("negative transition probability".into()));
            }
        }
        if initial_state >= states.len() {
            return Err(ChainError::Malformed("initial state out of range".into()));
        }
        Ok(Self { states, transition_matrix, initial_state })
    }

    pub fn link_count(&self) -> usize {
        self.states[0].link_count()
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn initial_state(&self) -> usize {
        self.initial_state
    }

    pub fn state(&self, index: usize) -> &TrafficFadingState {
        &self.states[index]
    }

    pub fn states(&self) -> &[TrafficFadingState] {
        &self.states
    }

    pub fn transition_row(&self, state: usize) -> &[f64] {
        &self.transition_matrix[state]
    }

    /// Largest deadline carried by any arrival of any state.
    pub fn d_max(&self) -> u32 {
        self.states
            .iter()
            .flat_map(|s| s.arrivals.iter().flatten())
            .map(|a| a.deadline)
            .max()
            .unwrap_or(1)
    }

    /// Largest per-link arrival count in any single state.
    pub fn a_max(&self) -> u32 {
        self.states
            .iter()
            .flat_map(|s| (0..self.link_count()).map(move |l| s.total_arrivals(l)))
            .max()
            .unwrap_or(0)
    }

    /// Samples the successor of `current` from its transition row.
    pub fn step<R: Rng + ?Sized>(&self, current: usize, rng: &mut R) -> usize {
        let row = &self.transition_matrix[current];
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut last_positive = current;
        for (j, &p) in row.iter().enumerate() {
            if p > 0.0 {
                acc += p;
                last_positive = j;
                if u < acc {
                    return j;
                }
            }
        }
        // Rounding can leave u just above the accumulated sum.
        last_positive
    }

    /// Replaces every state's success probabilities with a constant vector,
    /// keeping the traffic part. Used to pair a traffic pattern with i.i.d.
    /// channel statistics.
    pub fn with_constant_q(mut self, q: &[f64]) -> Result<Self, ChainError> {
        if q.len() != self.link_count() {
            return Err(ChainError::Malformed("q override has wrong length".into()));
        }
        if q.iter().any(|&v| !(0.0..=1.0).contains(&v)) {
            return Err(ChainError::Malformed("q override outside [0,1]".into()));
        }
        for s in &mut self.states {
            s.success_probs = q.to_vec();
        }
        Ok(self)
    }

    /// Checks row-stochasticity, irreducibility and per-link non-triviality,
    /// reporting the first violated condition.
    pub fn validate(&self) -> Result<(), ChainViolation> {
        let n = self.state_count();
        for (i, row) in self.transition_matrix.iter().enumerate() {
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(ChainViolation::RowNotStochastic { state: i, sum });
            }
        }
        // Strong connectivity of the positive-transition digraph: everything
        // reachable from state 0, and state 0 reachable from everything.
        let forward = self.reachable(0, false);
        if let Some(s) = (0..n).find(|&s| !forward[s]) {
            return Err(ChainViolation::NotIrreducible { unreachable_state: s });
        }
        let backward = self.reachable(0, true);
        if let Some(s) = (0..n).find(|&s| !backward[s]) {
            return Err(ChainViolation::NotIrreducible { unreachable_state: s });
        }
        // Non-triviality: every link must have an arrival state from which a
        // usable channel is reachable within the arrival's deadline.
        for l in 0..self.link_count() {
            if !self.link_is_servable(l) {
                return Err(ChainViolation::TrivialLink { link: l });
            }
        }
        Ok(())
    }

    fn reachable(&self, from: usize, reversed: bool) -> Vec<bool> {
        let n = self.state_count();
        let mut seen = vec![false; n];
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(s) = stack.pop() {
            for t in 0..n {
                let p = if reversed { self.transition_matrix[t][s] } else { self.transition_matrix[s][t] };
                if p > 0.0 && !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        seen
    }

    fn link_is_servable(&self, link: usize) -> bool {
        let n = self.state_count();
        for z in 0..n {
            for batch in &self.states[z].arrivals[link] {
                if batch.count == 0 {
                    continue;
                }
                // BFS over positive transitions, depth capped by the deadline.
                let mut frontier = vec![z];
                let mut seen = vec![false; n];
                seen[z] = true;
                for _depth in 0..=batch.deadline {
                    if frontier.iter().any(|&s| self.states[s].success_probs[link] > 0.0) {
                        return true;
                    }
                    let mut next = Vec::new();
                    for &s in &frontier {
                        for t in 0..n {
                            if self.transition_matrix[s][t] > 0.0 && !seen[t] {
                                seen[t] = true;
                                next.push(t);
                            }
                        }
                    }
                    frontier = next;
                    if frontier.is_empty() {
                        break;
                    }
                }
            }
        }
        false
    }
}

/// One slot of a deterministic pattern: per-link arrivals plus per-link
/// channel probabilities for that slot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternSlot {
    pub arrivals: Vec<Vec<Arrival>>,
    pub success_probs: Vec<f64>,
}

impl PatternSlot {
    /// Slot with no arrivals on any link.
    pub fn quiet(success_probs: Vec<f64>) -> Self {
        let k = success_probs.len();
        Self { arrivals: vec![Vec::new(); k], success_probs }
    }
}

/// Builder input for a chain that replays one or more slot patterns, moving
/// to the next pattern at a boundary with `switch_prob` (1.0 = strict
/// alternation) and otherwise restarting the same pattern.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlternatingPattern {
    pub patterns: Vec<Vec<PatternSlot>>,
    pub switch_prob: f64,
    pub d_max: u32,
    pub a_max: u32,
}

/// Chain whose state sequence deterministically replays pattern slots, with
/// pattern switching only possible at pattern boundaries.
pub fn build_alternating_pattern(spec: &AlternatingPattern) -> Result<TrafficFadingChain, ChainError> {
    if spec.patterns.is_empty() || spec.patterns.iter().any(|p| p.is_empty()) {
        return Err(ChainError::SpecViolation("patterns must be nonempty".into()));
    }
    if !(0.0..=1.0).contains(&spec.switch_prob) {
        return Err(ChainError::SpecViolation("switch probability outside [0,1]".into()));
    }
    let links = spec.patterns[0][0].success_probs.len();
    let mut states = Vec::new();
    let mut offsets = Vec::new();
    for pattern in &spec.patterns {
        offsets.push(states.len());
        for slot in pattern {
            if slot.success_probs.len() != links || slot.arrivals.len() != links {
                return Err(ChainError::SpecViolation("inconsistent link count across slots".into()));
            }
            for &q in &slot.success_probs {
                if !(0.0..=1.0).contains(&q) {
                    return Err(ChainError::SpecViolation(format!("q={q} outside [0,1]")));
                }
            }
            for batch in slot.arrivals.iter().flatten() {
                if batch.deadline == 0 || batch.deadline > spec.d_max {
                    return Err(ChainError::SpecViolation(format!(
                        "deadline {} outside 1..={}",
                        batch.deadline, spec.d_max
                    )));
                }
            }
            for l in 0..links {
                let total: u32 = slot.arrivals[l].iter().map(|a| a.count).sum();
                if total > spec.a_max {
                    return Err(ChainError::SpecViolation(format!(
                        "link {l} receives {total} packets in one slot, a_max={}",
                        spec.a_max
                    )));
                }
            }
            states.push(TrafficFadingState {
                arrivals: slot.arrivals.clone(),
                success_probs: slot.success_probs.clone(),
            });
        }
    }
    let n = states.len();
    let mut matrix = vec![vec![0.0; n]; n];
    let pattern_count = spec.patterns.len();
    for (p, pattern) in spec.patterns.iter().enumerate() {
        let base = offsets[p];
        for s in 0..pattern.len() {
            let idx = base + s;
            if s + 1 < pattern.len() {
                matrix[idx][idx + 1] = 1.0;
            } else {
                let next_pattern = offsets[(p + 1) % pattern_count];
                matrix[idx][next_pattern] += spec.switch_prob;
                matrix[idx][base] += 1.0 - spec.switch_prob;
            }
        }
    }
    TrafficFadingChain::new(states, matrix, 0)
}

/// Cap on the number of product states `build_iid` will enumerate.
pub const IID_STATE_CAP: usize = 4096;

/// Product-form chain for independent per-slot Bernoulli arrivals with a
/// fixed deadline and constant channel probabilities: every transition row
/// equals the same product distribution.
pub fn build_iid(
    arrival_probs: &[f64],
    deadline: u32,
    q: &[f64],
) -> Result<TrafficFadingChain, ChainError> {
    let links = arrival_probs.len();
    if q.len() != links {
        return Err(ChainError::Malformed("arrival_probs and q lengths differ".into()));
    }
    if deadline == 0 {
        return Err(ChainError::Malformed("deadline must be >= 1".into()));
    }
    for &p in arrival_probs {
        if !(0.0..=1.0).contains(&p) {
            return Err(ChainError::Malformed(format!("arrival probability {p} outside [0,1]")));
        }
    }
    for &v in q {
        if !(0.0..=1.0).contains(&v) {
            return Err(ChainError::Malformed(format!("q={v} outside [0,1]")));
        }
    }
    // Only links with a genuinely random arrival enlarge the state space;
    // certain (p=1) and impossible (p=0) arrivals are folded into every state.
    let free: Vec<usize> = (0..links)
        .filter(|&l| arrival_probs[l] > 0.0 && arrival_probs[l] < 1.0)
        .collect();
    if free.len() >= usize::BITS as usize || (1usize << free.len()) > IID_STATE_CAP {
        return Err(ChainError::StateSpaceTooLarge(usize::MAX, IID_STATE_CAP));
    }
    let n = 1usize << free.len();
    let mut states = Vec::with_capacity(n);
    let mut dist = Vec::with_capacity(n);
    for mask in 0..n {
        let mut arrivals = vec![Vec::new(); links];
        let mut prob = 1.0;
        for l in 0..links {
            let arrives = if arrival_probs[l] >= 1.0 {
                true
            } else if let Some(bit) = free.iter().position(|&f| f == l) {
                let set = mask >> bit & 1 == 1;
                prob *= if set { arrival_probs[l] } else { 1.0 - arrival_probs[l] };
                set
            } else {
                false
            };
            if arrives {
                arrivals[l].push(Arrival { count: 1, deadline });
            }
        }
        states.push(TrafficFadingState { arrivals, success_probs: q.to_vec() });
        dist.push(prob);
    }
    let matrix = vec![dist; n];
    TrafficFadingChain::new(states, matrix, 0)
}
