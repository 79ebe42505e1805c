//! Stability-frontier estimation by bisection along a target-ratio
//! direction, and multi-policy comparison under shared seeds.

use crate::harness::config::{scaled_targets, Experiment, PolicySelection};
use crate::harness::output::RunRecord;
use crate::harness::{classify_stability, run_episode, HarnessError, StabilityVerdict};

#[derive(Debug, Clone)]
pub struct SweepOptions {
    pub direction: Vec<f64>,
    pub lo: f64,
    pub hi: f64,
    pub steps: u32,
    pub seeds: u32,
}

impl SweepOptions {
    pub fn from_config(cfg: &crate::harness::SweepConfig, links: usize) -> Self {
        Self {
            direction: cfg.direction.clone().unwrap_or_else(|| vec![1.0; links]),
            lo: cfg.lo,
            hi: cfg.hi,
            steps: cfg.steps,
            seeds: cfg.seeds,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ProbeOutcome {
    pub scale: f64,
    pub stable: bool,
    pub verdicts: Vec<StabilityVerdict>,
}

#[derive(Debug, Clone)]
pub struct FrontierResult {
    /// Largest scale classified stable, at resolution (hi-lo)/2^steps.
    pub p_hat: f64,
    pub probes: Vec<ProbeOutcome>,
    pub runs: Vec<RunRecord>,
}

/// Probes one scale: stable only if every seed replicate is stable.
fn probe(
    base: &Experiment,
    opts: &SweepOptions,
    scale: f64,
    runs: &mut Vec<RunRecord>,
) -> Result<ProbeOutcome, HarnessError> {
    let mut exp = base.clone();
    exp.targets = scaled_targets(scale, &opts.direction);
    let mut verdicts = Vec::with_capacity(opts.seeds as usize);
    let mut stable = true;
    for rep in 0..opts.seeds {
        let metrics = run_episode(&exp, rep)?;
        let verdict = classify_stability(&metrics, &base.stability);
        stable &= verdict.stable;
        runs.push(RunRecord {
            policy: exp.policy.name().to_string(),
            scale,
            seed_rep: rep,
            stable: verdict.stable,
            metrics,
        });
        verdicts.push(verdict);
    }
    Ok(ProbeOutcome { scale, stable, verdicts })
}

/// Bisects for the largest stable scale along the direction vector.
pub fn sweep_frontier(
    base: &Experiment,
    opts: &SweepOptions,
) -> Result<FrontierResult, HarnessError> {
    let mut runs = Vec::new();
    let mut probes = Vec::new();

    let top = probe(base, opts, opts.hi, &mut runs)?;
    let top_stable = top.stable;
    probes.push(top);
    if top_stable {
        return Ok(FrontierResult { p_hat: opts.hi, probes, runs });
    }
    let bottom = probe(base, opts, opts.lo, &mut runs)?;
    let bottom_stable = bottom.stable;
    probes.push(bottom);
    if !bottom_stable {
        return Ok(FrontierResult { p_hat: opts.lo, probes, runs });
    }
    let (mut lo, mut hi) = (opts.lo, opts.hi);
    for _ in 0..opts.steps {
        let mid = 0.5 * (lo + hi);
        let outcome = probe(base, opts, mid, &mut runs)?;
        if outcome.stable {
            lo = mid;
        } else {
            hi = mid;
        }
        probes.push(outcome);
    }
    Ok(FrontierResult { p_hat: lo, probes, runs })
}

#[derive(Debug, Clone)]
pub struct CompareRow {
    pub policy: String,
    pub p_hat: f64,
    pub ratio_vs_frame_optimal: Option<f64>,
}

/// Sweeps every policy under identical seed replicates (all randomness
/// streams are keyed by replicate and concern, never by policy) and reports
/// each frontier, plus its ratio to the frame-optimal frontier when that
/// oracle is part of the comparison.
pub fn compare_policies(
    base: &Experiment,
    policies: &[(String, PolicySelection)],
    opts: &SweepOptions,
) -> Result<(Vec<CompareRow>, Vec<RunRecord>), HarnessError> {
    let mut frontiers = Vec::new();
    let mut all_runs = Vec::new();
    for (name, selection) in policies {
        let mut exp = base.clone();
        exp.policy = selection.clone();
        let result = sweep_frontier(&exp, opts)?;
        all_runs.extend(result.runs);
        frontiers.push((name.clone(), result.p_hat));
    }
    let oracle_p_hat = frontiers
        .iter()
        .find(|(name, _)| name == "frame-optimal")
        .map(|&(_, p)| p)
        .filter(|&p| p > 0.0);
    let rows = frontiers
        .into_iter()
        .map(|(policy, p_hat)| CompareRow {
            policy,
            p_hat,
            ratio_vs_frame_optimal: oracle_p_hat.map(|o| p_hat / o),
        })
        .collect();
    Ok((rows, all_runs))
}
