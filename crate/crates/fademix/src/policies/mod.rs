//! Scheduling policies as pure decision functions from observable state
//! (deficits, success probabilities, buffers) to a schedule or a
//! distribution over maximal schedules.
//!
//! Every policy here is Markov: nothing is carried between slots besides the
//! caller's RNG stream. Realized channel outcomes are never part of the
//! observation.

mod classic;
mod famix;
mod myopic;

pub use classic::{gms_select, mws_select};
pub use famix::{
    famix_ms_distribution, famix_nd_distribution, famix_restricted_distribution,
    non_dominated_set, NdLink, NonDominatedSet,
};
pub use myopic::{myopic_sample, myopic_schedule_distribution};

use crate::dynamics::BufferState;
use crate::interference::InterferenceGraph;
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PolicyError {
    #[error("no schedule available (all buffers empty)")]
    NoSchedule,
    #[error("all candidate schedules have zero weight")]
    AllWeightsZero,
    #[error("channel success probability is zero everywhere")]
    ZeroQ,
    #[error("success probabilities differ across nonempty links (min {q_min}, max {q_max})")]
    NotCollocatedUniform { q_min: f64, q_max: f64 },
    #[error("exact distribution unsupported: {0}")]
    UnsupportedExactDistribution(&'static str),
}

/// What a policy is allowed to see when deciding.
#[derive(Debug, Clone, Copy)]
pub struct Observation<'a> {
    pub deficits: &'a [f64],
    pub success_probs: &'a [f64],
    pub buffers: &'a BufferState,
}

/// A schedule together with its expected gain `sum of w_l * q_l`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSchedule {
    pub schedule: Vec<usize>,
    pub weight: f64,
}

impl WeightedSchedule {
    pub fn new(schedule: Vec<usize>, deficits: &[f64], success_probs: &[f64]) -> Self {
        let weight = schedule.iter().map(|&l| deficits[l] * success_probs[l]).sum();
        Self { schedule, weight }
    }
}

/// Probabilities over candidate schedules, sorted by weight descending.
/// Entries beyond the support carry probability zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleDistribution {
    pub entries: Vec<(WeightedSchedule, f64)>,
    pub support_size: usize,
}

impl ScheduleDistribution {
    pub fn total_probability(&self) -> f64 {
        self.entries.iter().map(|(_, p)| p).sum()
    }

    /// Probability that `link` ends up in the selected schedule.
    pub fn link_probability(&self, link: usize) -> f64 {
        self.entries
            .iter()
            .filter(|(ws, _)| ws.schedule.contains(&link))
            .map(|(_, p)| p)
            .sum()
    }

    /// Expected gain of the randomized selection.
    pub fn expected_gain(&self) -> f64 {
        self.entries.iter().map(|(ws, p)| ws.weight * p).sum()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> &[usize] {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut last = 0;
        for (i, (_, p)) in self.entries.iter().enumerate() {
            if *p > 0.0 {
                acc += p;
                last = i;
                if u < acc {
                    return &self.entries[i].0.schedule;
                }
            }
        }
        &self.entries[last].0.schedule
    }
}

/// Intersects every set of the family with the nonempty links, dropping
/// empty intersections and duplicates. Output is canonically sorted.
pub fn active_schedules(family: &[Vec<usize>], nonempty: &[bool]) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = family
        .iter()
        .map(|set| set.iter().copied().filter(|&l| nonempty[l]).collect::<Vec<usize>>())
        .filter(|s| !s.is_empty())
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// How to handle unequal success probabilities in the collocated
/// non-dominated policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnequalQHandling {
    Error,
    /// Run the recursion with the smallest success probability among the
    /// nonempty links.
    UseMin,
}

/// A runnable scheduling policy. `decide` may return an empty schedule,
/// which the simulator treats as an idle slot.
#[derive(Debug, Clone)]
pub enum Policy {
    MaxWeight { family: Vec<Vec<usize>> },
    GreedyMaximal,
    FamixMs { family: Vec<Vec<usize>> },
    FamixNd { unequal_q: UnequalQHandling },
    FamixRestricted { extended_sets: Vec<Vec<usize>> },
    Myopic { nu: f64, delta: f64 },
}

impl Policy {
    pub fn name(&self) -> &'static str {
        match self {
            Policy::MaxWeight { .. } => "mws",
            Policy::GreedyMaximal => "gms",
            Policy::FamixMs { .. } => "famix-ms",
            Policy::FamixNd { .. } => "famix-nd",
            Policy::FamixRestricted { .. } => "famix-coloring",
            Policy::Myopic { .. } => "myopic",
        }
    }

    pub fn decide<R: Rng + ?Sized>(
        &self,
        graph: &InterferenceGraph,
        obs: &Observation,
        rng: &mut R,
    ) -> Result<Vec<usize>, PolicyError> {
        let nonempty = obs.buffers.nonempty_mask();
        match self {
            Policy::MaxWeight { family } => {
                let active = active_schedules(family, &nonempty);
                if active.is_empty() {
                    return Ok(Vec::new());
                }
                mws_select(&active, obs.deficits, obs.success_probs)
            }
            Policy::GreedyMaximal => {
                Ok(gms_select(graph, &nonempty, obs.deficits, obs.success_probs))
            }
            Policy::FamixMs { family } => {
                sample_famix(family, &nonempty, obs, rng)
            }
            Policy::FamixRestricted { extended_sets } => {
                sample_famix(extended_sets, &nonempty, obs, rng)
            }
            Policy::FamixNd { unequal_q } => {
                let dist = nd_link_distribution(obs, &nonempty, *unequal_q)?;
                match dist {
                    None => Ok(Vec::new()),
                    Some(per_link) => {
                        let u: f64 = rng.random();
                        let mut acc = 0.0;
                        let mut chosen = None;
                        for (l, &p) in per_link.iter().enumerate() {
                            if p > 0.0 {
                                acc += p;
                                chosen = Some(l);
                                if u < acc {
                                    break;
                                }
                            }
                        }
                        Ok(chosen.map(|l| vec![l]).unwrap_or_default())
                    }
                }
            }
            Policy::Myopic { nu, delta } => {
                let rates = vec![*nu; graph.link_count()];
                Ok(myopic_sample(graph, &nonempty, &rates, *delta, rng))
            }
        }
    }

    /// Exact law of `decide` as a list of (schedule, probability) pairs; an
    /// empty schedule denotes idling. Used by the frame oracle's policy
    /// evaluation and by the distribution tests.
    pub fn schedule_distribution(
        &self,
        graph: &InterferenceGraph,
        obs: &Observation,
    ) -> Result<Vec<(Vec<usize>, f64)>, PolicyError> {
        let nonempty = obs.buffers.nonempty_mask();
        match self {
            Policy::MaxWeight { family } => {
                let active = active_schedules(family, &nonempty);
                if active.is_empty() {
                    return Ok(vec![(Vec::new(), 1.0)]);
                }
                let m = mws_select(&active, obs.deficits, obs.success_probs)?;
                Ok(vec![(m, 1.0)])
            }
            Policy::GreedyMaximal => {
                Ok(vec![(gms_select(graph, &nonempty, obs.deficits, obs.success_probs), 1.0)])
            }
            Policy::FamixMs { family } => famix_law(family, &nonempty, obs),
            Policy::FamixRestricted { extended_sets } => famix_law(extended_sets, &nonempty, obs),
            Policy::FamixNd { unequal_q } => {
                let dist = nd_link_distribution(obs, &nonempty, *unequal_q)?;
                match dist {
                    None => Ok(vec![(Vec::new(), 1.0)]),
                    Some(per_link) => Ok(per_link
                        .iter()
                        .enumerate()
                        .filter(|(_, &p)| p > 0.0)
                        .map(|(l, &p)| (vec![l], p))
                        .collect()),
                }
            }
            Policy::Myopic { nu: _, delta } => {
                myopic_schedule_distribution(graph, &nonempty, *delta)
            }
        }
    }
}

fn sample_famix<R: Rng + ?Sized>(
    family: &[Vec<usize>],
    nonempty: &[bool],
    obs: &Observation,
    rng: &mut R,
) -> Result<Vec<usize>, PolicyError> {
    let active = active_schedules(family, nonempty);
    if active.is_empty() {
        return Ok(Vec::new());
    }
    match famix_ms_distribution(&active, obs.deficits, obs.success_probs) {
        Ok(dist) => Ok(dist.sample(rng).to_vec()),
        // All weights zero: fall back to a uniform pick over the candidate
        // schedules, which keeps the selection maximal without affecting gains.
        Err(PolicyError::AllWeightsZero) => {
            let i = rng.random_range(0..active.len());
            Ok(active[i].clone())
        }
        Err(e) => Err(e),
    }
}

fn famix_law(
    family: &[Vec<usize>],
    nonempty: &[bool],
    obs: &Observation,
) -> Result<Vec<(Vec<usize>, f64)>, PolicyError> {
    let active = active_schedules(family, nonempty);
    if active.is_empty() {
        return Ok(vec![(Vec::new(), 1.0)]);
    }
    match famix_ms_distribution(&active, obs.deficits, obs.success_probs) {
        Ok(dist) => Ok(dist
            .entries
            .into_iter()
            .filter(|(_, p)| *p > 0.0)
            .map(|(ws, p)| (ws.schedule, p))
            .collect()),
        Err(PolicyError::AllWeightsZero) => {
            let p = 1.0 / active.len() as f64;
            Ok(active.into_iter().map(|s| (s, p)).collect())
        }
        Err(e) => Err(e),
    }
}

/// Shared by sampling and exact-law paths of the non-dominated policy.
/// Returns `None` when the policy idles (no nonempty link, or q = 0).
fn nd_link_distribution(
    obs: &Observation,
    nonempty: &[bool],
    unequal_q: UnequalQHandling,
) -> Result<Option<Vec<f64>>, PolicyError> {
    if !nonempty.iter().any(|&b| b) {
        return Ok(None);
    }
    let qs: Vec<f64> = (0..nonempty.len())
        .filter(|&l| nonempty[l])
        .map(|l| obs.success_probs[l])
        .collect();
    let q_min = qs.iter().cloned().fold(f64::INFINITY, f64::min);
    let q_max = qs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let q = if (q_max - q_min).abs() <= 1e-9 {
        q_max
    } else {
        match unequal_q {
            UnequalQHandling::Error => {
                return Err(PolicyError::NotCollocatedUniform { q_min, q_max })
            }
            UnequalQHandling::UseMin => q_min,
        }
    };
    let earliest: Vec<Option<u32>> =
        (0..nonempty.len()).map(|l| obs.buffers.earliest_deadline(l)).collect();
    match famix_nd_distribution(obs.deficits, &earliest, q) {
        Ok((_, per_link)) => Ok(Some(per_link)),
        Err(PolicyError::ZeroQ) => Ok(None),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn active_schedules_all_nonempty_is_family() {
        let family = vec![vec![0, 2], vec![1]];
        assert_eq!(active_schedules(&family, &[true, true, true]), family);
    }

    #[test]
    fn active_schedules_all_empty() {
        let family = vec![vec![0, 2], vec![1]];
        assert!(active_schedules(&family, &[false, false, false]).is_empty());
    }

    #[test]
    fn active_schedules_dedupes_collapsed_sets() {
        // Path 0-1-2 family; only link 1 nonempty: both sets collapse.
        let family = vec![vec![0, 2], vec![1]];
        assert_eq!(active_schedules(&family, &[false, true, false]), vec![vec![1]]);
        // Family {0,2},{1,2}; only link 2 nonempty: duplicates removed.
        let family2 = vec![vec![0, 2], vec![1, 2]];
        assert_eq!(active_schedules(&family2, &[false, false, true]), vec![vec![2]]);
    }
}
