//! Myopic distributed randomization: every nonempty link draws an
//! exponential timer and claims the slot when its timer fires first in its
//! neighborhood before the control phase ends.

use crate::interference::InterferenceGraph;
use crate::policies::PolicyError;
use rand::Rng;
use rand_distr::{Distribution, Exp};

/// Control-phase length: timers beyond it never fire, so each link misses
/// the phase with probability `delta` under its own rate.
pub fn control_phase_length(rates: &[f64], delta: f64) -> f64 {
    rates
        .iter()
        .map(|&nu| -delta.ln() / nu)
        .fold(0.0, f64::max)
}

/// Samples one control phase: draw `T_l ~ Exp(nu_l)` for every nonempty
/// link, process links in increasing timer order, and let a link join when
/// its timer beats the control phase and no neighbor joined earlier. The
/// result is independent but possibly non-maximal due to the cutoff.
pub fn myopic_sample<R: Rng + ?Sized>(
    graph: &InterferenceGraph,
    nonempty: &[bool],
    rates: &[f64],
    delta: f64,
    rng: &mut R,
) -> Vec<usize> {
    assert!(delta > 0.0 && delta < 1.0, "delta must lie in (0,1)");
    let t_c = control_phase_length(rates, delta);
    let mut timers: Vec<(f64, usize)> = (0..graph.link_count())
        .filter(|&l| nonempty[l])
        .map(|l| {
            let exp = Exp::new(rates[l]).expect("timer rate must be positive");
            (exp.sample(rng), l)
        })
        .collect();
    timers.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("timers are finite").then(a.1.cmp(&b.1)));
    let mut joined = Vec::new();
    for (t, l) in timers {
        if t >= t_c {
            break;
        }
        if joined.iter().all(|&m| !graph.are_adjacent(l, m)) {
            joined.push(l);
        }
    }
    joined.sort_unstable();
    joined
}

/// Exact law of `myopic_sample` for uniform timer rates: each link hears the
/// cutoff independently with probability `1 - delta`, and the timer order
/// among survivors is uniformly random, so the schedule distribution is an
/// average of greedy independent sets over subsets and permutations.
/// Feasible only for small networks; intended for oracle evaluation and
/// distribution tests.
pub fn myopic_schedule_distribution(
    graph: &InterferenceGraph,
    nonempty: &[bool],
    delta: f64,
) -> Result<Vec<(Vec<usize>, f64)>, PolicyError> {
    let links: Vec<usize> = (0..graph.link_count()).filter(|&l| nonempty[l]).collect();
    if links.len() > 8 {
        return Err(PolicyError::UnsupportedExactDistribution(
            "exact myopic law limited to 8 nonempty links",
        ));
    }
    let mut acc: Vec<(Vec<usize>, f64)> = Vec::new();
    let mut add = |schedule: Vec<usize>, p: f64| {
        if let Some(entry) = acc.iter_mut().find(|(s, _)| *s == schedule) {
            entry.1 += p;
        } else {
            acc.push((schedule, p));
        }
    };
    let n = links.len();
    for mask in 0u32..(1 << n) {
        let subset: Vec<usize> =
            (0..n).filter(|&i| mask >> i & 1 == 1).map(|i| links[i]).collect();
        let p_subset = (1.0 - delta).powi(subset.len() as i32)
            * delta.powi((n - subset.len()) as i32);
        if subset.is_empty() {
            add(Vec::new(), p_subset);
            continue;
        }
        let mut perm = subset.clone();
        let mut total = 0usize;
        let p_each = p_subset / factorial(subset.len());
        permutations(&mut perm, 0, &mut |order| {
            let mut joined: Vec<usize> = Vec::new();
            for &l in order.iter() {
                if joined.iter().all(|&m| !graph.are_adjacent(l, m)) {
                    joined.push(l);
                }
            }
            joined.sort_unstable();
            add(joined, p_each);
            total += 1;
        });
        debug_assert_eq!(total as f64, factorial(subset.len()));
    }
    acc.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(acc)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product::<f64>().max(1.0)
}

fn permutations(items: &mut Vec<usize>, start: usize, visit: &mut impl FnMut(&[usize])) {
    if start == items.len() {
        visit(items);
        return;
    }
    for i in start..items.len() {
        items.swap(start, i);
        permutations(items, start + 1, visit);
        items.swap(start, i);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn single_link_scheduled_with_probability_one_minus_delta() {
        let g = InterferenceGraph::new(1, &[]).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let delta = 0.01;
        let n = 100_000;
        let mut scheduled = 0u32;
        for _ in 0..n {
            if !myopic_sample(&g, &[true], &[1.0], delta, &mut rng).is_empty() {
                scheduled += 1;
            }
        }
        let freq = f64::from(scheduled) / f64::from(n);
        assert!((freq - 0.99).abs() < 0.005, "freq={freq}");
    }

    #[test]
    fn two_adjacent_links_split_evenly() {
        let g = InterferenceGraph::new(2, &[(0, 1)]).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(6);
        let delta = 1e-9;
        let n = 100_000;
        let mut counts = [0u32; 2];
        for _ in 0..n {
            let s = myopic_sample(&g, &[true, true], &[1.0, 1.0], delta, &mut rng);
            assert_eq!(s.len(), 1);
            counts[s[0]] += 1;
        }
        for c in counts {
            let freq = f64::from(c) / f64::from(n);
            assert!((freq - 0.5).abs() < 0.01, "freq={freq}");
        }
    }

    #[test]
    fn empty_network_empty_schedule() {
        let g = InterferenceGraph::new(3, &[(0, 1)]).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        assert!(myopic_sample(&g, &[false; 3], &[1.0; 3], 0.1, &mut rng).is_empty());
    }

    #[test]
    fn exact_law_sums_to_one_and_matches_sampling() {
        let g = InterferenceGraph::new(3, &[(0, 1), (1, 2)]).unwrap();
        let delta = 0.05;
        let law = myopic_schedule_distribution(&g, &[true; 3], delta).unwrap();
        let total: f64 = law.iter().map(|(_, p)| p).sum();
        assert!((total - 1.0).abs() < 1e-12);

        let mut rng = ChaCha12Rng::seed_from_u64(8);
        let n = 200_000;
        let mut counts: Vec<(Vec<usize>, u32)> = Vec::new();
        for _ in 0..n {
            let s = myopic_sample(&g, &[true; 3], &[1.0; 3], delta, &mut rng);
            if let Some(e) = counts.iter_mut().find(|(k, _)| *k == s) {
                e.1 += 1;
            } else {
                counts.push((s, 1));
            }
        }
        for (schedule, p) in &law {
            let observed = counts
                .iter()
                .find(|(k, _)| k == schedule)
                .map(|(_, c)| f64::from(*c) / f64::from(n))
                .unwrap_or(0.0);
            assert!((observed - p).abs() < 0.01, "schedule {schedule:?}: law={p} obs={observed}");
        }
    }
}
