//! Slot-synchronous simulator and policy library for scheduling
//! deadline-constrained packets on conflict-graph wireless networks with
//! unreliable ON-OFF links.
//!
//! Links interfere through a conflict graph; traffic (arrivals with
//! deadlines) and fading (per-link success probabilities) evolve jointly as
//! a finite Markov chain the policies never see. Each link owes a target
//! fraction of its packets, tracked by a deficit queue; a policy supports a
//! target vector when every deficit stays bounded.
//!
//! The library provides:
//!
//! - [`interference`]: conflict graphs, maximal-independent-set enumeration,
//!   greedy coloring with maximal extension, interference degree.
//! - [`traffic`]: Markov traffic-fading chains, pattern/i.i.d. builders and
//!   validity checks.
//! - [`dynamics`]: the per-slot pipeline (admission, channels, transmission,
//!   deficit update, expiry) and run metrics.
//! - [`policies`]: max-weight and greedy maximal scheduling, randomized
//!   subharmonic-mean selection over maximal schedules, the non-dominated
//!   randomized policy for collocated networks, a coloring-restricted
//!   variant and a myopic timer-based distributed policy.
//! - [`oracle`]: brute-force max-weight verification and a non-causal
//!   frame-optimal expectimax used as an upper-bound comparator.
//! - [`harness`]: seeded episodes, stability classification, frontier
//!   sweeps, policy comparison and CSV/JSON emission.
//! - [`scenarios`]: bundled reference networks and traffic tables.
//!
//! See the `examples/` directory for one runnable walkthrough per
//! capability; the thin `fademix` binary drives experiments from TOML
//! configs.

pub mod dynamics;
pub mod harness;
pub mod interference;
pub mod oracle;
pub mod policies;
pub mod scenarios;
pub mod traffic;

pub use dynamics::{AdmissionMode, BufferState, CorrelationMode, RunMetrics};
pub use harness::{classify_stability, run_episode, Experiment, ExperimentConfig};
pub use interference::InterferenceGraph;
pub use policies::{Policy, ScheduleDistribution};
pub use traffic::TrafficFadingChain;
