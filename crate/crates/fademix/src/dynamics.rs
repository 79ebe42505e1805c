//! Per-slot system evolution: packet admission, channel realization,
//! transmission outcomes, deficit updates, buffer aging and metric
//! accumulation.
//!
//! The slot pipeline is fixed: observe chain state, admit arrivals, let the
//! policy decide (it sees deficits, success probabilities and buffers, never
//! realized channels), sample channels, apply the schedule, update deficits,
//! age buffers, advance the chain. A packet arriving with deadline 1 is
//! servable in its arrival slot and expires at the end of it.

use crate::traffic::TrafficFadingState;
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DynamicsError {
    #[error("schedule invalid: link {0} has an empty buffer")]
    ScheduleInvalid(usize),
}

/// A buffered packet; `remaining_deadline` counts the current slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Packet {
    pub remaining_deadline: u32,
    pub arrival_slot: u64,
    seq: u64,
}

/// Per-link packet buffers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BufferState {
    queues: Vec<Vec<Packet>>,
    next_seq: u64,
}

impl BufferState {
    pub fn new(link_count: usize) -> Self {
        Self { queues: vec![Vec::new(); link_count], next_seq: 0 }
    }

    pub fn link_count(&self) -> usize {
        self.queues.len()
    }

    pub fn is_nonempty(&self, link: usize) -> bool {
        !self.queues[link].is_empty()
    }

    pub fn nonempty_mask(&self) -> Vec<bool> {
        self.queues.iter().map(|q| !q.is_empty()).collect()
    }

    pub fn len(&self, link: usize) -> usize {
        self.queues[link].len()
    }

    pub fn total_len(&self) -> usize {
        self.queues.iter().map(Vec::len).sum()
    }

    pub fn packets(&self, link: usize) -> &[Packet] {
        &self.queues[link]
    }

    pub fn push(&mut self, link: usize, remaining_deadline: u32, arrival_slot: u64) {
        let seq = self.next_seq;
        self.next_seq += 1;
        self.queues[link].push(Packet { remaining_deadline, arrival_slot, seq });
    }

    /// Deadline of the most urgent packet of `link`, if any.
    pub fn earliest_deadline(&self, link: usize) -> Option<u32> {
        self.queues[link].iter().map(|p| p.remaining_deadline).min()
    }

    /// Deadlines of all buffered packets of `link`, ascending.
    pub fn sorted_deadlines(&self, link: usize) -> Vec<u32> {
        let mut d: Vec<u32> = self.queues[link].iter().map(|p| p.remaining_deadline).collect();
        d.sort_unstable();
        d
    }

    /// Drops every buffered packet, returning per-link counts. Used by the
    /// frame oracle, which discards leftovers at frame boundaries.
    pub fn clear_all(&mut self) -> Vec<u32> {
        self.queues
            .iter_mut()
            .map(|q| {
                let n = q.len() as u32;
                q.clear();
                n
            })
            .collect()
    }

    /// Removes and returns the earliest-deadline packet of `link`; ties break
    /// by earliest arrival slot, then insertion order.
    fn pop_earliest(&mut self, link: usize) -> Option<Packet> {
        let idx = self.queues[link]
            .iter()
            .enumerate()
            .min_by_key(|(_, p)| (p.remaining_deadline, p.arrival_slot, p.seq))
            .map(|(i, _)| i)?;
        Some(self.queues[link].remove(idx))
    }
}

/// How packet arrivals feed the deficit queues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum AdmissionMode {
    /// Each arrival adds exactly `p_l` to the deficit.
    Deterministic,
    /// Each arrival adds 1 with probability `p_l`; keeps deficits integral.
    #[default]
    CoinToss,
}

/// Joint law of the per-link ON-OFF channel draws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum CorrelationMode {
    #[default]
    Independent,
    /// With probability `rho` all links share one uniform draw (comonotone
    /// coupling), otherwise they are drawn independently; marginals stay
    /// `q_l` and any pair is nonnegatively correlated.
    CommonShock { rho: f64 },
}

/// Admits the state's arrivals into the buffers and returns the per-link
/// deficit increments. Deficits themselves are only changed later by
/// `update_deficits`, so the policy still observes the pre-arrival values.
pub fn admit_arrivals<R: Rng + ?Sized>(
    buffers: &mut BufferState,
    state: &TrafficFadingState,
    mode: AdmissionMode,
    target_ratios: &[f64],
    slot: u64,
    rng: &mut R,
) -> Vec<f64> {
    admit_packets(buffers, state, slot);
    draw_deficit_increments(state, mode, target_ratios, rng)
}

/// Buffer half of admission: every arriving packet enters its link's queue
/// with its full deadline, regardless of deficit bookkeeping.
pub fn admit_packets(buffers: &mut BufferState, state: &TrafficFadingState, slot: u64) {
    for link in 0..buffers.link_count() {
        for batch in &state.arrivals[link] {
            for _ in 0..batch.count {
                buffers.push(link, batch.deadline, slot);
            }
        }
    }
}

/// Deficit half of admission: per arriving packet, `p_l` exactly under
/// deterministic admission, or a coin toss worth 0 or 1 with mean `p_l`.
/// The draw order (links ascending, batches in state order) is part of the
/// replay contract; the frame oracle pre-draws the same sequence.
pub fn draw_deficit_increments<R: Rng + ?Sized>(
    state: &TrafficFadingState,
    mode: AdmissionMode,
    target_ratios: &[f64],
    rng: &mut R,
) -> Vec<f64> {
    let k = state.link_count();
    let mut increments = vec![0.0; k];
    for link in 0..k {
        for batch in &state.arrivals[link] {
            if batch.count == 0 {
                continue;
            }
            match mode {
                AdmissionMode::Deterministic => {
                    increments[link] += f64::from(batch.count) * target_ratios[link];
                }
                AdmissionMode::CoinToss => {
                    let p = target_ratios[link];
                    if p > 0.0 {
                        let bin = Binomial::new(u64::from(batch.count), p)
                            .expect("target ratio is a probability");
                        increments[link] += bin.sample(rng) as f64;
                    }
                }
            }
        }
    }
    increments
}

/// Samples the ON-OFF channel vector for the current state.
pub fn sample_channels<R: Rng + ?Sized>(
    state: &TrafficFadingState,
    mode: CorrelationMode,
    rng: &mut R,
) -> Vec<bool> {
    match mode {
        CorrelationMode::Independent => {
            state.success_probs.iter().map(|&q| rng.random::<f64>() < q).collect()
        }
        CorrelationMode::CommonShock { rho } => {
            let shared: f64 = rng.random();
            let use_shared = rng.random::<f64>() < rho;
            state
                .success_probs
                .iter()
                .map(|&q| {
                    if use_shared {
                        shared < q
                    } else {
                        rng.random::<f64>() < q
                    }
                })
                .collect()
        }
    }
}

/// Result of applying a schedule under realized channels.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleOutcome {
    /// 1 exactly for scheduled links whose channel was ON.
    pub served: Vec<bool>,
    pub delivered: Vec<(usize, Packet)>,
}

/// Transmits the earliest-deadline packet of every scheduled link whose
/// channel is ON. Scheduling an empty link is a caller bug.
pub fn apply_schedule(
    buffers: &mut BufferState,
    schedule: &[usize],
    channels: &[bool],
) -> Result<ScheduleOutcome, DynamicsError> {
    let mut served = vec![false; buffers.link_count()];
    let mut delivered = Vec::new();
    for &link in schedule {
        if !buffers.is_nonempty(link) {
            return Err(DynamicsError::ScheduleInvalid(link));
        }
        if channels[link] {
            let pkt = buffers.pop_earliest(link).expect("nonempty checked above");
            served[link] = true;
            delivered.push((link, pkt));
        }
    }
    Ok(ScheduleOutcome { served, delivered })
}

/// Deficit update: `w <- max(w + increment - served, 0)`.
pub fn update_deficits(deficits: &mut [f64], increments: &[f64], served: &[bool]) {
    for l in 0..deficits.len() {
        let next = deficits[l] + increments[l] - if served[l] { 1.0 } else { 0.0 };
        deficits[l] = next.max(0.0);
    }
}

/// Ages every buffered packet by one slot and removes the ones that reach
/// deadline zero, returning per-link expiry counts.
pub fn age_buffers(buffers: &mut BufferState) -> Vec<u32> {
    let mut expired = vec![0u32; buffers.link_count()];
    for (link, queue) in buffers.queues.iter_mut().enumerate() {
        queue.retain_mut(|p| {
            p.remaining_deadline -= 1;
            if p.remaining_deadline == 0 {
                expired[link] += 1;
                false
            } else {
                true
            }
        });
    }
    expired
}

/// Accumulated per-run statistics.
#[derive(Debug, Clone, Serialize)]
pub struct RunMetrics {
    pub horizon: u64,
    pub arrivals_total: Vec<u64>,
    pub delivered_total: Vec<u64>,
    pub expired_total: Vec<u64>,
    /// Slots in which the link appeared in the selected schedule.
    pub scheduled_slots: Vec<u64>,
    /// Whole-run mean deficit per link.
    pub mean_deficit: Vec<f64>,
    /// Mean deficit over slots [T/2, 3T/4) per link.
    pub mid_window_mean: Vec<f64>,
    /// Mean deficit over slots [3T/4, T) per link.
    pub late_window_mean: Vec<f64>,
    pub final_deficits: Vec<f64>,
    /// Subsampled deficit trajectory: (slot, per-link deficits).
    pub deficit_series: Vec<(u64, Vec<f64>)>,
}

impl RunMetrics {
    pub fn link_count(&self) -> usize {
        self.arrivals_total.len()
    }

    pub fn delivery_ratio(&self, link: usize) -> f64 {
        if self.arrivals_total[link] == 0 {
            return 1.0;
        }
        self.delivered_total[link] as f64 / self.arrivals_total[link] as f64
    }

    pub fn scheduling_frequency(&self, link: usize) -> f64 {
        if self.horizon == 0 {
            return 0.0;
        }
        self.scheduled_slots[link] as f64 / self.horizon as f64
    }
}

/// Builds `RunMetrics` incrementally inside the episode loop.
#[derive(Debug, Clone)]
pub struct MetricsRecorder {
    horizon: u64,
    subsample: u64,
    slot: u64,
    arrivals_total: Vec<u64>,
    delivered_total: Vec<u64>,
    expired_total: Vec<u64>,
    scheduled_slots: Vec<u64>,
    deficit_sum: Vec<f64>,
    mid_sum: Vec<f64>,
    late_sum: Vec<f64>,
    mid_slots: u64,
    late_slots: u64,
    final_deficits: Vec<f64>,
    deficit_series: Vec<(u64, Vec<f64>)>,
}

impl MetricsRecorder {
    pub fn new(link_count: usize, horizon: u64, subsample: u64) -> Self {
        Self {
            horizon,
            subsample: subsample.max(1),
            slot: 0,
            arrivals_total: vec![0; link_count],
            delivered_total: vec![0; link_count],
            expired_total: vec![0; link_count],
            scheduled_slots: vec![0; link_count],
            deficit_sum: vec![0.0; link_count],
            mid_sum: vec![0.0; link_count],
            late_sum: vec![0.0; link_count],
            mid_slots: 0,
            late_slots: 0,
            final_deficits: vec![0.0; link_count],
            deficit_series: Vec::new(),
        }
    }

    /// Records one completed slot. `deficits` are the post-update values.
    pub fn record_slot(
        &mut self,
        state: &TrafficFadingState,
        schedule: &[usize],
        outcome: &ScheduleOutcome,
        expired: &[u32],
        deficits: &[f64],
    ) {
        let k = self.arrivals_total.len();
        for l in 0..k {
            self.arrivals_total[l] += u64::from(state.total_arrivals(l));
            self.expired_total[l] += u64::from(expired[l]);
            if outcome.served[l] {
                self.delivered_total[l] += 1;
            }
            self.deficit_sum[l] += deficits[l];
        }
        for &l in schedule {
            self.scheduled_slots[l] += 1;
        }
        let mid_start = self.horizon / 2;
        let late_start = 3 * self.horizon / 4;
        if self.slot >= late_start {
            self.late_slots += 1;
            for l in 0..k {
                self.late_sum[l] += deficits[l];
            }
        } else if self.slot >= mid_start {
            self.mid_slots += 1;
            for l in 0..k {
                self.mid_sum[l] += deficits[l];
            }
        }
        if self.slot % self.subsample == 0 {
            self.deficit_series.push((self.slot, deficits.to_vec()));
        }
        self.final_deficits.copy_from_slice(deficits);
        self.slot += 1;
    }

    pub fn finish(self) -> RunMetrics {
        let mean = |sum: &[f64], n: u64| -> Vec<f64> {
            sum.iter().map(|s| if n == 0 { 0.0 } else { s / n as f64 }).collect()
        };
        RunMetrics {
            horizon: self.slot,
            arrivals_total: self.arrivals_total,
            delivered_total: self.delivered_total,
            expired_total: self.expired_total,
            scheduled_slots: self.scheduled_slots,
            mean_deficit: mean(&self.deficit_sum, self.slot),
            mid_window_mean: mean(&self.mid_sum, self.mid_slots),
            late_window_mean: mean(&self.late_sum, self.late_slots),
            final_deficits: self.final_deficits,
            deficit_series: self.deficit_series,
        }
    }
}
