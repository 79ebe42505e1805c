//! Experiment configuration: TOML sections for the graph, the
//! traffic-fading chain, the policy and the run/sweep parameters, resolved
//! into runnable objects.

use crate::dynamics::{AdmissionMode, CorrelationMode};
use crate::harness::{HarnessError, StabilityOptions};
use crate::interference::InterferenceGraph;
use crate::policies::{Policy, UnequalQHandling};
use crate::scenarios;
use crate::traffic::{
    build_alternating_pattern, build_iid, AlternatingPattern, Arrival, PatternSlot,
    TrafficFadingChain, TrafficFadingState,
};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub graph: GraphConfig,
    pub chain: ChainConfig,
    pub policy: PolicyConfig,
    pub run: RunConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphConfig {
    pub links: usize,
    #[serde(default)]
    pub edges: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ChainConfig {
    /// Independent Bernoulli arrivals per slot with a fixed deadline and
    /// constant channel probabilities.
    Iid { arrival_probs: Vec<f64>, deadline: u32, q: Vec<f64> },
    /// Explicit slot patterns replayed cyclically.
    Alternating {
        #[serde(default = "default_switch_prob")]
        switch_prob: f64,
        d_max: u32,
        a_max: u32,
        patterns: Vec<PatternConfig>,
        #[serde(default)]
        q_override: Option<Vec<f64>>,
    },
    /// Fully explicit states and transition matrix.
    Explicit { states: Vec<SlotConfig>, matrix: Vec<Vec<f64>>, initial: usize },
    /// One of the bundled reference scenarios (chain part only).
    Scenario {
        name: String,
        #[serde(default)]
        q_override: Option<Vec<f64>>,
    },
}

fn default_switch_prob() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PatternConfig {
    pub slots: Vec<SlotConfig>,
}

/// One slot (or one explicit chain state): `arrivals[l]` lists
/// `[count, deadline]` pairs, `q[l]` the channel probability.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SlotConfig {
    pub arrivals: Vec<Vec<(u32, u32)>>,
    pub q: Vec<f64>,
}

impl SlotConfig {
    fn to_pattern_slot(&self) -> PatternSlot {
        PatternSlot {
            arrivals: self
                .arrivals
                .iter()
                .map(|per_link| {
                    per_link.iter().map(|&(count, deadline)| Arrival { count, deadline }).collect()
                })
                .collect(),
            success_probs: self.q.clone(),
        }
    }

    fn to_state(&self) -> TrafficFadingState {
        let slot = self.to_pattern_slot();
        TrafficFadingState { arrivals: slot.arrivals, success_probs: slot.success_probs }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolicyConfig {
    pub name: String,
    /// Myopic miss probability.
    #[serde(default)]
    pub delta: Option<f64>,
    /// Myopic timer rate (uniform across links).
    #[serde(default)]
    pub nu: Option<f64>,
    /// "error" or "use-min" when nonempty links disagree on q (famix-nd).
    #[serde(default)]
    pub unequal_q: Option<String>,
    /// Coloring order for famix-coloring; descending degree when absent.
    #[serde(default)]
    pub coloring_order: Option<Vec<usize>>,
    /// Cycles per frame for the frame-optimal wrapper.
    #[serde(default)]
    pub cycles_per_frame: Option<usize>,
    /// Anchor chain state for frame boundaries; initial state when absent.
    #[serde(default)]
    pub anchor_state: Option<usize>,
}

impl PolicyConfig {
    pub fn named(name: &str) -> Self {
        Self {
            name: name.to_string(),
            delta: None,
            nu: None,
            unequal_q: None,
            coloring_order: None,
            cycles_per_frame: None,
            anchor_state: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub horizon: u64,
    pub seed: u64,
    #[serde(default)]
    pub admission: AdmissionMode,
    #[serde(default)]
    pub correlation: CorrelationMode,
    /// Per-link target delivery ratios. Alternative: scale * direction.
    #[serde(default)]
    pub targets: Option<Vec<f64>>,
    #[serde(default)]
    pub scale: Option<f64>,
    #[serde(default)]
    pub direction: Option<Vec<f64>>,
    /// Deficit-series subsampling stride; horizon/1000 when absent.
    #[serde(default)]
    pub subsample: Option<u64>,
    #[serde(default)]
    pub out_dir: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepConfig {
    pub direction: Option<Vec<f64>>,
    pub lo: f64,
    pub hi: f64,
    pub steps: u32,
    pub seeds: u32,
    /// Relative late-vs-mid window growth tolerated before a run is
    /// declared unstable.
    pub growth_tol: f64,
    /// Additive smoothing on window means so near-zero deficits never
    /// trip the ratio test.
    pub epsilon: f64,
    /// Policies compared by the `compare` command.
    pub policies: Vec<String>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            direction: None,
            lo: 0.0,
            hi: 1.0,
            steps: 6,
            seeds: 5,
            growth_tol: 0.1,
            epsilon: 1.0,
            policies: Vec::new(),
        }
    }
}

/// A fully resolved, runnable experiment.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub graph: InterferenceGraph,
    pub chain: TrafficFadingChain,
    pub policy: PolicySelection,
    pub horizon: u64,
    pub seed: u64,
    pub admission: AdmissionMode,
    pub correlation: CorrelationMode,
    pub targets: Vec<f64>,
    pub subsample: u64,
    pub stability: StabilityOptions,
}

#[derive(Debug, Clone)]
pub enum PolicySelection {
    Causal(Policy),
    FrameOptimal { cycles_per_frame: usize, anchor: Option<usize> },
}

impl PolicySelection {
    pub fn name(&self) -> &'static str {
        match self {
            PolicySelection::Causal(p) => p.name(),
            PolicySelection::FrameOptimal { .. } => "frame-optimal",
        }
    }
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, HarnessError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| HarnessError::Config(format!("{e}")))
}

pub fn build_graph(cfg: &GraphConfig) -> Result<InterferenceGraph, HarnessError> {
    InterferenceGraph::new(cfg.links, &cfg.edges).map_err(HarnessError::Graph)
}

pub fn build_chain(cfg: &ChainConfig) -> Result<TrafficFadingChain, HarnessError> {
    let chain = match cfg {
        ChainConfig::Iid { arrival_probs, deadline, q } => {
            build_iid(arrival_probs, *deadline, q).map_err(HarnessError::Chain)?
        }
        ChainConfig::Alternating { switch_prob, d_max, a_max, patterns, q_override } => {
            let spec = AlternatingPattern {
                patterns: patterns
                    .iter()
                    .map(|p| p.slots.iter().map(SlotConfig::to_pattern_slot).collect())
                    .collect(),
                switch_prob: *switch_prob,
                d_max: *d_max,
                a_max: *a_max,
            };
            let chain = build_alternating_pattern(&spec).map_err(HarnessError::Chain)?;
            match q_override {
                Some(q) => chain.with_constant_q(q).map_err(HarnessError::Chain)?,
                None => chain,
            }
        }
        ChainConfig::Explicit { states, matrix, initial } => TrafficFadingChain::new(
            states.iter().map(SlotConfig::to_state).collect(),
            matrix.clone(),
            *initial,
        )
        .map_err(HarnessError::Chain)?,
        ChainConfig::Scenario { name, q_override } => {
            let chain = scenarios::chain_by_name(name)
                .ok_or_else(|| HarnessError::Config(format!("unknown scenario '{name}'")))?;
            match q_override {
                Some(q) => chain.with_constant_q(q).map_err(HarnessError::Chain)?,
                None => chain,
            }
        }
    };
    Ok(chain)
}

/// Instantiates a policy by registry name against a concrete graph.
pub fn build_policy(
    cfg: &PolicyConfig,
    graph: &InterferenceGraph,
) -> Result<PolicySelection, HarnessError> {
    let selection = match cfg.name.as_str() {
        "mws" => PolicySelection::Causal(Policy::MaxWeight {
            family: graph.enumerate_mis().map_err(HarnessError::Graph)?.into_sets(),
        }),
        "gms" => PolicySelection::Causal(Policy::GreedyMaximal),
        "famix-ms" => PolicySelection::Causal(Policy::FamixMs {
            family: graph.enumerate_mis().map_err(HarnessError::Graph)?.into_sets(),
        }),
        "famix-nd" => {
            let k = graph.link_count();
            let collocated =
                (0..k).all(|a| (0..k).all(|b| a == b || graph.are_adjacent(a, b)));
            if !collocated {
                return Err(HarnessError::Config(
                    "famix-nd requires a collocated (complete) interference graph".into(),
                ));
            }
            let unequal_q = match cfg.unequal_q.as_deref() {
                None | Some("use-min") => UnequalQHandling::UseMin,
                Some("error") => UnequalQHandling::Error,
                Some(other) => {
                    return Err(HarnessError::Config(format!(
                        "unequal_q must be 'error' or 'use-min', got '{other}'"
                    )))
                }
            };
            PolicySelection::Causal(Policy::FamixNd { unequal_q })
        }
        "famix-coloring" => {
            let coloring = match &cfg.coloring_order {
                Some(order) => graph.greedy_coloring(order).map_err(HarnessError::Graph)?,
                None => graph.greedy_coloring_default(),
            };
            PolicySelection::Causal(Policy::FamixRestricted {
                extended_sets: coloring.extended_sets().to_vec(),
            })
        }
        "myopic" => PolicySelection::Causal(Policy::Myopic {
            nu: cfg.nu.unwrap_or(1.0),
            delta: cfg.delta.unwrap_or(0.01),
        }),
        "frame-optimal" => PolicySelection::FrameOptimal {
            cycles_per_frame: cfg.cycles_per_frame.unwrap_or(2),
            anchor: cfg.anchor_state,
        },
        other => {
            return Err(HarnessError::Config(format!("unknown policy '{other}'")));
        }
    };
    Ok(selection)
}

/// Resolves a config into a runnable experiment, checking cross-section
/// consistency (link counts, target lengths, parameter ranges).
pub fn resolve(config: &ExperimentConfig) -> Result<Experiment, HarnessError> {
    let graph = build_graph(&config.graph)?;
    let chain = build_chain(&config.chain)?;
    if chain.link_count() != graph.link_count() {
        return Err(HarnessError::Config(format!(
            "graph has {} links but the chain carries {}",
            graph.link_count(),
            chain.link_count()
        )));
    }
    let policy = build_policy(&config.policy, &graph)?;
    let k = graph.link_count();
    let targets = resolve_targets(&config.run, k)?;
    let horizon = config.run.horizon;
    if horizon < 1000 {
        return Err(HarnessError::Config("horizon must be at least 1000 slots".into()));
    }
    let subsample = config.run.subsample.unwrap_or_else(|| (horizon / 1000).max(1));
    Ok(Experiment {
        graph,
        chain,
        policy,
        horizon,
        seed: config.run.seed,
        admission: config.run.admission,
        correlation: config.run.correlation,
        targets,
        subsample,
        stability: StabilityOptions {
            growth_tol: config.sweep.growth_tol,
            epsilon: config.sweep.epsilon,
        },
    })
}

fn resolve_targets(run: &RunConfig, links: usize) -> Result<Vec<f64>, HarnessError> {
    let targets = match (&run.targets, run.scale) {
        (Some(t), None) => t.clone(),
        (None, Some(s)) => {
            let dir = run.direction.clone().unwrap_or_else(|| vec![1.0; links]);
            scaled_targets(s, &dir)
        }
        (None, None) => vec![0.5; links],
        (Some(_), Some(_)) => {
            return Err(HarnessError::Config("give either targets or scale, not both".into()))
        }
    };
    if targets.len() != links {
        return Err(HarnessError::Config(format!(
            "{} targets for {} links",
            targets.len(),
            links
        )));
    }
    if targets.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
        return Err(HarnessError::Config("target ratios must lie in [0,1]".into()));
    }
    Ok(targets)
}

/// Clamped scalar scaling along a direction vector.
pub fn scaled_targets(scale: f64, direction: &[f64]) -> Vec<f64> {
    direction.iter().map(|d| (scale * d).clamp(0.0, 1.0)).collect()
}
