//! Randomized schedule selection: the subharmonic-mean distribution over
//! maximal schedules for general graphs, and the non-dominated-link
//! distribution for collocated networks with a common success probability.

use crate::policies::{PolicyError, ScheduleDistribution, WeightedSchedule};

/// Subharmonic average of the first `n` weights: `(n-1)` divided by the sum
/// of their reciprocals.
fn subharmonic(weights: &[f64]) -> f64 {
    let n = weights.len();
    if n <= 1 {
        return 0.0;
    }
    let recip_sum: f64 = weights.iter().map(|w| 1.0 / w).sum();
    (n as f64 - 1.0) / recip_sum
}

/// Largest prefix size n such that `1 - H_n / W_(n) >= 0`. The prefix sums
/// of the resulting probabilities are identically 1, so feasibility reduces
/// to the nonnegativity of the smallest (last) term, and feasibility is
/// monotone in n.
fn support_size_linear(weights: &[f64]) -> usize {
    let mut n_star = 1;
    for n in 2..=weights.len() {
        if weights[n - 1] >= subharmonic(&weights[..n]) {
            n_star = n;
        } else {
            break;
        }
    }
    n_star
}

/// Same support size located by binary search on the monotone feasibility
/// predicate; cross-checked against the linear scan.
fn support_size_binary(weights: &[f64]) -> usize {
    let (mut lo, mut hi) = (1usize, weights.len());
    while lo < hi {
        let mid = (lo + hi + 1) / 2;
        if weights[mid - 1] >= subharmonic(&weights[..mid]) {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    lo
}

/// Randomized selection over candidate schedules: sort by expected gain
/// descending, keep the largest feasible prefix `n*` and select the i-th
/// schedule with probability `1 - H_{n*} / W_(i)`.
///
/// Zero-weight schedules are kept in the output with probability zero; if
/// every schedule has zero weight the caller must fall back (e.g. to a
/// uniform pick) and gets `AllWeightsZero`.
pub fn famix_ms_distribution(
    schedules: &[Vec<usize>],
    deficits: &[f64],
    success_probs: &[f64],
) -> Result<ScheduleDistribution, PolicyError> {
    if schedules.is_empty() {
        return Err(PolicyError::NoSchedule);
    }
    let mut weighted: Vec<WeightedSchedule> = schedules
        .iter()
        .map(|s| WeightedSchedule::new(s.clone(), deficits, success_probs))
        .collect();
    // Weight descending; canonical schedule order on ties keeps the
    // distribution replay-deterministic.
    weighted.sort_by(|a, b| {
        b.weight
            .partial_cmp(&a.weight)
            .expect("weights are finite")
            .then_with(|| a.schedule.cmp(&b.schedule))
    });
    let positive: Vec<f64> =
        weighted.iter().take_while(|ws| ws.weight > 0.0).map(|ws| ws.weight).collect();
    if positive.is_empty() {
        return Err(PolicyError::AllWeightsZero);
    }
    let n_star = support_size_linear(&positive);
    debug_assert_eq!(n_star, support_size_binary(&positive));
    let h = subharmonic(&positive[..n_star]);
    let entries = weighted
        .into_iter()
        .enumerate()
        .map(|(i, ws)| {
            let p = if i < n_star { 1.0 - h / ws.weight } else { 0.0 };
            (ws, p)
        })
        .collect();
    Ok(ScheduleDistribution { entries, support_size: n_star })
}

/// Restriction of the randomized selection to a fixed schedule family
/// (typically the extended color classes), applied to the active schedules
/// derived from it.
pub fn famix_restricted_distribution(
    restricted_family: &[Vec<usize>],
    nonempty: &[bool],
    deficits: &[f64],
    success_probs: &[f64],
) -> Result<ScheduleDistribution, PolicyError> {
    let active = crate::policies::active_schedules(restricted_family, nonempty);
    famix_ms_distribution(&active, deficits, success_probs)
}

/// A non-dominated link: no other nonempty link is simultaneously at least
/// as urgent and at least as high in deficit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NdLink {
    pub link: usize,
    pub deficit: f64,
    pub earliest_deadline: u32,
}

/// Non-dominated links ordered by deficit descending; along that order the
/// earliest deadlines strictly decrease (each member is more urgent than
/// every higher-deficit member).
#[derive(Debug, Clone, PartialEq)]
pub struct NonDominatedSet {
    pub links: Vec<NdLink>,
}

impl NonDominatedSet {
    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }
}

/// Recursive construction: add the largest-deficit nonempty link, drop every
/// link it dominates, repeat on the remainder. Ties on deficit prefer the
/// more urgent link, then the lower index.
pub fn non_dominated_set(deficits: &[f64], earliest: &[Option<u32>]) -> NonDominatedSet {
    let mut candidates: Vec<NdLink> = earliest
        .iter()
        .enumerate()
        .filter_map(|(l, e)| {
            e.map(|deadline| NdLink { link: l, deficit: deficits[l], earliest_deadline: deadline })
        })
        .collect();
    let mut links = Vec::new();
    while !candidates.is_empty() {
        let best = candidates
            .iter()
            .copied()
            .max_by(|a, b| {
                a.deficit
                    .partial_cmp(&b.deficit)
                    .expect("deficits are finite")
                    .then(b.earliest_deadline.cmp(&a.earliest_deadline))
                    .then(b.link.cmp(&a.link))
            })
            .expect("nonempty");
        links.push(best);
        // `best` has the max deficit, so it dominates exactly the candidates
        // that are no more urgent than it.
        candidates.retain(|c| c.earliest_deadline < best.earliest_deadline);
    }
    NonDominatedSet { links }
}

/// Per-link selection probabilities for a collocated network with common
/// success probability `q`: with the non-dominated links ordered by deficit
/// `w_1 >= ... >= w_n` (and `w_{n+1} = 0`),
/// `pi_i = min{ (1/q)(1 - w_{i+1}/w_i), 1 - sum of earlier pi }`.
///
/// Returns the non-dominated set and a full per-link probability vector.
/// If every non-dominated deficit is zero the selection is uniform over the
/// non-dominated links; any numerical leftover mass goes to the last one.
pub fn famix_nd_distribution(
    deficits: &[f64],
    earliest: &[Option<u32>],
    q: f64,
) -> Result<(NonDominatedSet, Vec<f64>), PolicyError> {
    if q <= 0.0 {
        return Err(PolicyError::ZeroQ);
    }
    let nd = non_dominated_set(deficits, earliest);
    if nd.is_empty() {
        return Err(PolicyError::NoSchedule);
    }
    let mut per_link = vec![0.0; deficits.len()];
    let n = nd.len();
    if nd.links[0].deficit <= 0.0 {
        let p = 1.0 / n as f64;
        for m in &nd.links {
            per_link[m.link] = p;
        }
        return Ok((nd, per_link));
    }
    let mut assigned = 0.0;
    for i in 0..n {
        let w_i = nd.links[i].deficit;
        let w_next = if i + 1 < n { nd.links[i + 1].deficit } else { 0.0 };
        let unconstrained = if w_i > 0.0 { (1.0 - w_next / w_i) / q } else { 0.0 };
        let p = unconstrained.min(1.0 - assigned).max(0.0);
        per_link[nd.links[i].link] = p;
        assigned += p;
    }
    // The w_{n+1} = 0 convention makes the last unconstrained term 1/q >= 1,
    // so leftover mass is numerical dust only.
    if assigned < 1.0 {
        per_link[nd.links[n - 1].link] += 1.0 - assigned;
    }
    Ok((nd, per_link))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist_probs(weights: &[f64]) -> (usize, Vec<f64>) {
        // Singleton schedules over a collocated layout give exactly the
        // requested weights.
        let schedules: Vec<Vec<usize>> = (0..weights.len()).map(|l| vec![l]).collect();
        let q = vec![1.0; weights.len()];
        let d = famix_ms_distribution(&schedules, weights, &q).unwrap();
        let probs = d.entries.iter().map(|(_, p)| *p).collect();
        (d.support_size, probs)
    }

    /// Independent check: scan every prefix size and keep the largest one
    /// giving a valid probability vector.
    fn oracle_support(weights_desc: &[f64]) -> usize {
        let mut best = 1;
        for n in 1..=weights_desc.len() {
            let h = subharmonic(&weights_desc[..n]);
            let pis: Vec<f64> = (0..weights_desc.len())
                .map(|i| if i < n { 1.0 - h / weights_desc[i] } else { 0.0 })
                .collect();
            let sum: f64 = pis.iter().sum();
            if pis.iter().all(|&p| p >= 0.0) && (sum - 1.0).abs() < 1e-9 {
                best = n;
            }
        }
        best
    }

    #[test]
    fn weights_4_2_1() {
        let (n_star, probs) = dist_probs(&[4.0, 2.0, 1.0]);
        assert_eq!(n_star, 2);
        assert!((probs[0] - 2.0 / 3.0).abs() < 1e-12);
        assert!((probs[1] - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(probs[2], 0.0);
    }

    #[test]
    fn equal_weights_uniform() {
        for r in 1..=6 {
            let weights = vec![3.5; r];
            let (n_star, probs) = dist_probs(&weights);
            assert_eq!(n_star, r);
            assert_eq!(oracle_support(&weights), r);
            for p in probs {
                assert!((p - 1.0 / r as f64).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn single_schedule_point_mass() {
        let (n_star, probs) = dist_probs(&[0.7]);
        assert_eq!(n_star, 1);
        assert_eq!(probs, vec![1.0]);
    }

    #[test]
    fn support_matches_oracle_and_binary_search() {
        let mut state = 0x2545f4914f6cdd1du64;
        let mut next_f = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..500 {
            let r = 1 + (next_f() * 9.0) as usize;
            let mut weights: Vec<f64> = (0..r).map(|_| 0.01 + next_f() * 10.0).collect();
            weights.sort_by(|a, b| b.partial_cmp(a).unwrap());
            let lin = support_size_linear(&weights);
            assert_eq!(lin, support_size_binary(&weights));
            assert_eq!(lin, oracle_support(&weights));
        }
    }

    #[test]
    fn all_zero_weights_error() {
        let schedules = vec![vec![0], vec![1]];
        assert_eq!(
            famix_ms_distribution(&schedules, &[0.0, 0.0], &[1.0, 1.0]),
            Err(PolicyError::AllWeightsZero)
        );
    }

    #[test]
    fn zero_weight_tail_gets_no_mass() {
        let schedules = vec![vec![0], vec![1], vec![2]];
        let d = famix_ms_distribution(&schedules, &[4.0, 2.0, 0.0], &[1.0; 3]).unwrap();
        assert!(d.entries[2].1 == 0.0);
        assert!((d.total_probability() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn expected_gain_identity() {
        let (_, _) = dist_probs(&[4.0, 2.0, 1.0]);
        let schedules: Vec<Vec<usize>> = (0..3).map(|l| vec![l]).collect();
        let w = [4.0, 2.0, 1.0];
        let d = famix_ms_distribution(&schedules, &w, &[1.0; 3]).unwrap();
        let n = d.support_size;
        let top: f64 = d.entries.iter().take(n).map(|(ws, _)| ws.weight).sum();
        let h = subharmonic(
            &d.entries.iter().take(n).map(|(ws, _)| ws.weight).collect::<Vec<_>>(),
        );
        assert!((d.expected_gain() - (top - n as f64 * h)).abs() < 1e-9);
    }

    #[test]
    fn nd_set_domination_examples() {
        // (w=5,e=2) and (w=3,e=1): neither dominates the other.
        let nd = non_dominated_set(&[5.0, 3.0], &[Some(2), Some(1)]);
        assert_eq!(nd.links.len(), 2);
        assert_eq!(nd.links[0].link, 0);
        assert_eq!(nd.links[1].link, 1);
        // (w=5,e=1) vs (w=3,e=2): the second is dominated.
        let nd = non_dominated_set(&[5.0, 3.0], &[Some(1), Some(2)]);
        assert_eq!(nd.links.len(), 1);
        assert_eq!(nd.links[0].link, 0);
    }

    #[test]
    fn nd_set_matches_quadratic_filter() {
        let mut state = 0x853c49e6748fea9bu64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for _ in 0..300 {
            let k = 1 + (next() % 8) as usize;
            let deficits: Vec<f64> = (0..k).map(|_| (next() % 12) as f64).collect();
            let earliest: Vec<Option<u32>> = (0..k)
                .map(|_| if next() % 5 == 0 { None } else { Some(1 + (next() % 4) as u32) })
                .collect();
            let nd = non_dominated_set(&deficits, &earliest);
            // Quadratic reference: link i is non-dominated if no distinct
            // nonempty j dominates it, with the recursion's index tie-break.
            let dominated = |i: usize| -> bool {
                let e_i = match earliest[i] {
                    Some(e) => e,
                    None => return true,
                };
                (0..k).any(|j| {
                    if j == i {
                        return false;
                    }
                    let e_j = match earliest[j] {
                        Some(e) => e,
                        None => return false,
                    };
                    let strictly = e_j <= e_i && deficits[j] > deficits[i]
                        || e_j < e_i && deficits[j] >= deficits[i];
                    // Exact (w, e) ties collapse onto the lowest index.
                    strictly || (e_j == e_i && deficits[j] == deficits[i] && j < i)
                })
            };
            let expected: Vec<usize> = {
                let mut v: Vec<usize> = (0..k).filter(|&i| !dominated(i)).collect();
                v.sort_by(|&a, &b| {
                    deficits[b]
                        .partial_cmp(&deficits[a])
                        .unwrap()
                        .then(earliest[a].unwrap().cmp(&earliest[b].unwrap()))
                });
                v
            };
            let got: Vec<usize> = nd.links.iter().map(|m| m.link).collect();
            assert_eq!(got, expected, "deficits={deficits:?} earliest={earliest:?}");
            // Members are mutually non-dominating: deficits descending,
            // deadlines strictly decreasing.
            for pair in nd.links.windows(2) {
                assert!(pair[0].deficit >= pair[1].deficit);
                assert!(pair[0].earliest_deadline > pair[1].earliest_deadline);
            }
        }
    }

    #[test]
    fn nd_probabilities_match_recursion_at_q1() {
        let (_, per_link) =
            famix_nd_distribution(&[4.0, 2.0, 1.0], &[Some(3), Some(2), Some(1)], 1.0).unwrap();
        assert!((per_link[0] - 0.5).abs() < 1e-12);
        assert!((per_link[1] - 0.5).abs() < 1e-12);
        assert_eq!(per_link[2], 0.0);
    }

    #[test]
    fn nd_probabilities_boost_top_link_under_fading() {
        let (_, per_link) =
            famix_nd_distribution(&[4.0, 2.0], &[Some(2), Some(1)], 0.5).unwrap();
        assert!((per_link[0] - 1.0).abs() < 1e-12);
        assert_eq!(per_link[1], 0.0);
    }

    #[test]
    fn nd_zero_q_is_error() {
        assert_eq!(
            famix_nd_distribution(&[1.0], &[Some(1)], 0.0),
            Err(PolicyError::ZeroQ)
        );
    }

    #[test]
    fn nd_all_zero_deficits_serves_most_urgent() {
        // With equal (zero) deficits the most urgent link dominates the
        // rest, so the non-dominated set collapses to it and the uniform
        // fallback is a point mass.
        let (nd, per_link) =
            famix_nd_distribution(&[0.0, 0.0], &[Some(2), Some(1)], 0.7).unwrap();
        assert_eq!(nd.len(), 1);
        assert_eq!(nd.links[0].link, 1);
        assert_eq!(per_link[0], 0.0);
        assert!((per_link[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nd_mass_sums_to_one() {
        let mut state = 0xc0ffee123456789u64;
        let mut next_f = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..200 {
            let k = 1 + (next_f() * 6.0) as usize;
            let deficits: Vec<f64> = (0..k).map(|_| next_f() * 9.0).collect();
            let earliest: Vec<Option<u32>> = (0..k).map(|_| Some(1 + (next_f() * 4.0) as u32)).collect();
            let q = 0.05 + next_f() * 0.95;
            let (_, per_link) = famix_nd_distribution(&deficits, &earliest, q).unwrap();
            let total: f64 = per_link.iter().sum();
            assert!((total - 1.0).abs() < 1e-12);
            assert!(per_link.iter().all(|&p| p >= 0.0));
        }
    }
}
