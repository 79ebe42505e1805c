//! Seeded single-episode execution of the fixed slot pipeline, for causal
//! policies and for the non-causal frame-optimal wrapper.

use crate::dynamics::{
    admit_packets, age_buffers, apply_schedule, draw_deficit_increments, sample_channels,
    update_deficits, AdmissionMode, BufferState, CorrelationMode, MetricsRecorder, RunMetrics,
};
use crate::harness::config::{Experiment, PolicySelection};
use crate::harness::{concern_rng, Concern, HarnessError};
use crate::oracle::{solve_frame, FrameProblem, OracleBuffers};
use crate::policies::{Observation, Policy};
use crate::traffic::ChainViolation;

/// Longest tolerated gap between anchor returns before an oracle run aborts.
const RETURN_TIME_CAP: u64 = 10_000;

/// Runs one episode. `run_id` selects the replicate substreams; everything
/// is deterministic given (experiment seed, run_id).
pub fn run_episode(exp: &Experiment, run_id: u32) -> Result<RunMetrics, HarnessError> {
    if let Err(violation) = exp.chain.validate() {
        // Structural defects are fatal; degenerate traffic (e.g. a link that
        // can never be served) is simulable and only voids the theory-side
        // guarantees, so it just warns.
        match violation {
            ChainViolation::RowNotStochastic { .. } => {
                return Err(HarnessError::ChainInvalid(violation))
            }
            ChainViolation::NotIrreducible { .. } | ChainViolation::TrivialLink { .. } => {
                eprintln!("warning: {violation}");
            }
        }
    }
    match &exp.policy {
        PolicySelection::Causal(policy) => run_causal(exp, policy, run_id),
        PolicySelection::FrameOptimal { cycles_per_frame, anchor } => {
            run_frame_optimal(exp, *cycles_per_frame, *anchor, run_id)
        }
    }
}

fn run_causal(exp: &Experiment, policy: &Policy, run_id: u32) -> Result<RunMetrics, HarnessError> {
    let k = exp.graph.link_count();
    let mut chain_rng = concern_rng(exp.seed, run_id, Concern::Chain);
    let mut channel_rng = concern_rng(exp.seed, run_id, Concern::Channels);
    let mut admission_rng = concern_rng(exp.seed, run_id, Concern::Admission);
    let mut policy_rng = concern_rng(exp.seed, run_id, Concern::Policy);

    let mut buffers = BufferState::new(k);
    let mut deficits = vec![0.0; k];
    let mut recorder = MetricsRecorder::new(k, exp.horizon, exp.subsample);
    let mut conservation = ConservationCheck::new(k);
    let mut z = exp.chain.initial_state();

    for slot in 0..exp.horizon {
        let state = exp.chain.state(z);
        admit_packets(&mut buffers, state, slot);
        let increments =
            draw_deficit_increments(state, exp.admission, &exp.targets, &mut admission_rng);
        let schedule = {
            let obs = Observation {
                deficits: &deficits,
                success_probs: &state.success_probs,
                buffers: &buffers,
            };
            policy
                .decide(&exp.graph, &obs, &mut policy_rng)
                .map_err(|source| HarnessError::PolicyAtSlot { slot, source })?
        };
        debug_assert!(exp.graph.is_valid_schedule(&schedule, &buffers.nonempty_mask()));
        let channels = sample_channels(state, exp.correlation, &mut channel_rng);
        let outcome = apply_schedule(&mut buffers, &schedule, &channels)
            .map_err(|e| HarnessError::PolicyAtSlot { slot, source: schedule_error(e) })?;
        update_deficits(&mut deficits, &increments, &outcome.served);
        let expired = age_buffers(&mut buffers);
        conservation.check(state, &outcome.served, &expired, &buffers);
        recorder.record_slot(state, &schedule, &outcome, &expired, &deficits);
        z = exp.chain.step(z, &mut chain_rng);
    }
    Ok(recorder.finish())
}

fn schedule_error(e: crate::dynamics::DynamicsError) -> crate::policies::PolicyError {
    match e {
        crate::dynamics::DynamicsError::ScheduleInvalid(_) => {
            crate::policies::PolicyError::NoSchedule
        }
    }
}

/// Non-causal wrapper: pre-samples the chain, partitions the horizon into
/// frames delimited by every k-th return to the anchor state, solves each
/// frame exactly with admissions fixed, replays the optimal action per slot
/// as channels realize, and drops leftover packets at frame boundaries.
///
/// The first segment absorbs slot 0 (the anchor state itself); a final
/// partial segment covers whatever the horizon cuts off.
fn run_frame_optimal(
    exp: &Experiment,
    cycles_per_frame: usize,
    anchor: Option<usize>,
    run_id: u32,
) -> Result<RunMetrics, HarnessError> {
    if exp.admission != AdmissionMode::CoinToss {
        return Err(HarnessError::Config(
            "frame-optimal requires coin-toss admission (integer deficits)".into(),
        ));
    }
    if exp.correlation != CorrelationMode::Independent {
        return Err(HarnessError::Config(
            "frame-optimal supports independent channels only".into(),
        ));
    }
    let k = exp.graph.link_count();
    let mut chain_rng = concern_rng(exp.seed, run_id, Concern::Chain);
    let mut channel_rng = concern_rng(exp.seed, run_id, Concern::Channels);
    let mut admission_rng = concern_rng(exp.seed, run_id, Concern::Admission);

    // Chain lookahead: same draw order as a causal run, so paired seeds see
    // identical traffic.
    let horizon = exp.horizon as usize;
    let mut z_seq = Vec::with_capacity(horizon);
    let mut z = exp.chain.initial_state();
    for _ in 0..horizon {
        z_seq.push(z);
        z = exp.chain.step(z, &mut chain_rng);
    }
    let anchor = anchor.unwrap_or_else(|| exp.chain.initial_state());

    // Frame boundaries: inclusive end slots at every k-th anchor return.
    let mut boundaries = Vec::new();
    let mut returns = 0usize;
    let mut last_return = 0u64;
    for (t, &s) in z_seq.iter().enumerate().skip(1) {
        if s == anchor {
            if t as u64 - last_return > RETURN_TIME_CAP {
                return Err(HarnessError::FrameReturnTimeout { anchor, cap: RETURN_TIME_CAP });
            }
            last_return = t as u64;
            returns += 1;
            if returns % cycles_per_frame == 0 {
                boundaries.push(t);
            }
        } else if t as u64 - last_return > RETURN_TIME_CAP {
            return Err(HarnessError::FrameReturnTimeout { anchor, cap: RETURN_TIME_CAP });
        }
    }

    let mut buffers = BufferState::new(k);
    let mut deficits = vec![0.0; k];
    let mut recorder = MetricsRecorder::new(k, exp.horizon, exp.subsample);
    let mut conservation = ConservationCheck::new(k);

    let mut start = 0usize;
    let mut boundary_iter = boundaries.into_iter();
    while start < horizon {
        let end = loop {
            match boundary_iter.next() {
                Some(b) if b < start => continue,
                Some(b) => break b.min(horizon - 1),
                None => break horizon - 1,
            }
        };
        run_segment(
            exp,
            &z_seq[start..=end],
            start as u64,
            &mut buffers,
            &mut deficits,
            &mut recorder,
            &mut conservation,
            &mut channel_rng,
            &mut admission_rng,
        )?;
        start = end + 1;
    }
    Ok(recorder.finish())
}

#[allow(clippy::too_many_arguments)]
fn run_segment(
    exp: &Experiment,
    states: &[usize],
    base_slot: u64,
    buffers: &mut BufferState,
    deficits: &mut [f64],
    recorder: &mut MetricsRecorder,
    conservation: &mut ConservationCheck,
    channel_rng: &mut rand_chacha::ChaCha12Rng,
    admission_rng: &mut rand_chacha::ChaCha12Rng,
) -> Result<(), HarnessError> {
    let pattern: Vec<&crate::traffic::TrafficFadingState> =
        states.iter().map(|&z| exp.chain.state(z)).collect();
    // Fix the admission realizations for the whole segment up front,
    // consuming the stream in the same per-slot order as a causal run.
    let admissions_f64: Vec<Vec<f64>> = pattern
        .iter()
        .map(|state| draw_deficit_increments(state, exp.admission, &exp.targets, admission_rng))
        .collect();
    let admissions: Vec<Vec<u32>> = admissions_f64
        .iter()
        .map(|row| row.iter().map(|&x| x as u32).collect())
        .collect();

    let start_buffers =
        OracleBuffers::from_buffer_state(buffers).map_err(HarnessError::Oracle)?;
    let start_deficits: Vec<i64> = deficits
        .iter()
        .map(|&w| {
            debug_assert!(w.fract() == 0.0, "coin-toss deficits stay integral");
            w as i64
        })
        .collect();
    let problem =
        FrameProblem { graph: &exp.graph, pattern: pattern.clone(), admissions };
    let dp = solve_frame(problem, &start_buffers, &start_deficits)
        .map_err(HarnessError::Oracle)?;

    let last = states.len() - 1;
    for (offset, state) in pattern.iter().enumerate() {
        let slot = base_slot + offset as u64;
        admit_packets(buffers, state, slot);
        let increments = &admissions_f64[offset];
        let schedule = {
            let ob = OracleBuffers::from_buffer_state(buffers).map_err(HarnessError::Oracle)?;
            let wi: Vec<i64> = deficits.iter().map(|&w| w as i64).collect();
            dp.best_schedule(offset, &ob, &wi)
                .map_err(|source| HarnessError::OracleAtSlot { slot, source })?
        };
        let channels = sample_channels(state, exp.correlation, channel_rng);
        let outcome = apply_schedule(buffers, &schedule, &channels)
            .map_err(|e| HarnessError::PolicyAtSlot { slot, source: schedule_error(e) })?;
        update_deficits(deficits, increments, &outcome.served);
        let mut expired = age_buffers(buffers);
        if offset == last {
            // Non-causal framing drops whatever survived the frame.
            let dropped = buffers.clear_all();
            let bound = exp.chain.d_max() * exp.chain.a_max() * exp.graph.link_count() as u32;
            debug_assert!(dropped.iter().sum::<u32>() <= bound);
            for (e, d) in expired.iter_mut().zip(dropped) {
                *e += d;
            }
        }
        conservation.check(state, &outcome.served, &expired, buffers);
        recorder.record_slot(state, &schedule, &outcome, &expired, deficits);
    }
    Ok(())
}

/// Per-slot accounting identity: arrivals = delivered + expired + buffered.
/// Active in debug builds only.
struct ConservationCheck {
    arrivals: Vec<u64>,
    delivered: Vec<u64>,
    expired: Vec<u64>,
}

impl ConservationCheck {
    fn new(k: usize) -> Self {
        Self { arrivals: vec![0; k], delivered: vec![0; k], expired: vec![0; k] }
    }

    #[inline]
    fn check(
        &mut self,
        state: &crate::traffic::TrafficFadingState,
        served: &[bool],
        expired: &[u32],
        buffers: &BufferState,
    ) {
        if cfg!(debug_assertions) {
            for l in 0..self.arrivals.len() {
                self.arrivals[l] += u64::from(state.total_arrivals(l));
                self.delivered[l] += u64::from(served[l]);
                self.expired[l] += u64::from(expired[l]);
                debug_assert_eq!(
                    self.arrivals[l],
                    self.delivered[l] + self.expired[l] + buffers.len(l) as u64,
                    "conservation violated on link {l}"
                );
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::{
        resolve, ChainConfig, ExperimentConfig, GraphConfig, PolicyConfig, RunConfig, SweepConfig,
    };
    use crate::harness::{classify_stability, StabilityOptions};

    fn base_config(policy: &str, targets: Vec<f64>, q: Vec<f64>, horizon: u64) -> ExperimentConfig {
        ExperimentConfig {
            graph: GraphConfig { links: 1, edges: vec![] },
            chain: ChainConfig::Iid { arrival_probs: vec![1.0], deadline: 1, q },
            policy: PolicyConfig::named(policy),
            run: RunConfig {
                horizon,
                seed: 11,
                admission: AdmissionMode::CoinToss,
                correlation: CorrelationMode::Independent,
                targets: Some(targets),
                scale: None,
                direction: None,
                subsample: None,
                out_dir: None,
            },
            sweep: SweepConfig::default(),
        }
    }

    #[test]
    fn zero_targets_keep_deficits_at_zero() {
        let mut cfg = base_config("mws", vec![0.0], vec![1.0], 20_000);
        cfg.run.admission = AdmissionMode::Deterministic;
        let exp = resolve(&cfg).unwrap();
        let metrics = run_episode(&exp, 0).unwrap();
        assert_eq!(metrics.final_deficits, vec![0.0]);
        assert!(classify_stability(&metrics, &StabilityOptions::default()).stable);
    }

    #[test]
    fn dead_channel_grows_deficits_linearly() {
        let cfg = base_config("mws", vec![0.5], vec![0.0], 20_000);
        let exp = resolve(&cfg).unwrap();
        let metrics = run_episode(&exp, 0).unwrap();
        assert_eq!(metrics.delivered_total, vec![0]);
        let verdict = classify_stability(&metrics, &StabilityOptions::default());
        assert!(!verdict.stable);
    }

    #[test]
    fn saturated_reliable_link_meets_target() {
        let cfg = base_config("mws", vec![0.9], vec![1.0], 20_000);
        let exp = resolve(&cfg).unwrap();
        let metrics = run_episode(&exp, 0).unwrap();
        assert_eq!(metrics.delivered_total[0], metrics.arrivals_total[0]);
        assert!((metrics.delivery_ratio(0) - 1.0).abs() < 1e-12);
        assert!(classify_stability(&metrics, &StabilityOptions::default()).stable);
    }

    #[test]
    fn episodes_replay_identically() {
        let cfg = base_config("famix-ms", vec![0.4], vec![0.7], 20_000);
        let exp = resolve(&cfg).unwrap();
        let a = run_episode(&exp, 0).unwrap();
        let b = run_episode(&exp, 0).unwrap();
        assert_eq!(a.delivered_total, b.delivered_total);
        assert_eq!(a.final_deficits, b.final_deficits);
        assert_eq!(a.deficit_series, b.deficit_series);
    }
}
