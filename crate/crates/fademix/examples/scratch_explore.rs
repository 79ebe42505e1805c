//! Scratch frontier explorer used while tuning the reference scenarios.

use fademix::dynamics::{AdmissionMode, CorrelationMode};
use fademix::harness::{
    build_policy, sweep_frontier, Experiment, PolicyConfig, PolicySelection, StabilityOptions,
    SweepOptions,
};
use fademix::interference::InterferenceGraph;
use fademix::scenarios;
use fademix::traffic::{build_alternating_pattern, AlternatingPattern, Arrival, PatternSlot, TrafficFadingChain};

fn experiment(
    graph: InterferenceGraph,
    chain: TrafficFadingChain,
    policy: PolicySelection,
    horizon: u64,
    admission: AdmissionMode,
) -> Experiment {
    Experiment {
        graph,
        chain,
        policy,
        horizon,
        seed: 20_250_810,
        admission,
        correlation: CorrelationMode::Independent,
        targets: vec![],
        subsample: 1000,
        stability: StabilityOptions::default(),
    }
}

fn frontier(
    graph: &InterferenceGraph,
    chain: &TrafficFadingChain,
    policy_name: &str,
    direction: Vec<f64>,
    horizon: u64,
    seeds: u32,
    admission: AdmissionMode,
) -> f64 {
    let mut cfg = PolicyConfig::named(policy_name);
    cfg.anchor_state = Some(1);
    let policy = build_policy(&cfg, graph).unwrap();
    let exp = experiment(graph.clone(), chain.clone(), policy, horizon, admission);
    let opts = SweepOptions { direction, lo: 0.0, hi: 2.0, steps: 7, seeds };
    let result = sweep_frontier(&exp, &opts).unwrap();
    result.p_hat
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let what = args.get(1).map(String::as_str).unwrap_or("two");
    let horizon: u64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(100_000);
    let seeds: u32 = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(3);

    match what {
        "two" => {
            let (graph, chain) = scenarios::two_link_collocated();
            let chain = chain.with_constant_q(&[0.6, 0.6]).unwrap();
            for policy in ["famix-nd", "famix-ms", "mws", "gms", "frame-optimal"] {
                let p = frontier(
                    &graph,
                    &chain,
                    policy,
                    vec![1.0, 1.0],
                    horizon,
                    seeds,
                    AdmissionMode::CoinToss,
                );
                println!("two-link q=0.6  {policy:>14}: p_hat = {p:.4}");
            }
        }
        "three" => {
            let (graph, chain) = scenarios::three_link_greedy_trap();
            let direction = vec![1.0 / 3.0, 0.5, 0.5];
            for policy in ["gms", "mws", "famix-ms", "frame-optimal"] {
                for admission in [AdmissionMode::CoinToss, AdmissionMode::Deterministic] {
                    if policy == "frame-optimal" && admission == AdmissionMode::Deterministic {
                        continue;
                    }
                    let p = frontier(
                        &graph,
                        &chain,
                        policy,
                        direction.clone(),
                        horizon,
                        seeds,
                        admission,
                    );
                    println!("three-link {policy:>14} {admission:?}: scale_hat = {p:.4}");
                }
            }
        }
        "three-custom" => {
            // Candidate patterns for the greedy trap, keyed by variant id.
            let variant = args.get(4).and_then(|s| s.parse().ok()).unwrap_or(0usize);
            let (graph, chain) = match variant {
                5 => flip_three(3, 0.5),
                6 => flip_three(2, 0.5),
                7 => flip_three(3, 0.3),
                8 => flip_three(2, 0.3),
                9 => whipsaw_three(1.0),
                10 => whipsaw_three(0.8),
                11 => whipsaw_three(0.7),
                v => custom_three(v),
            };
            let direction = vec![1.0 / 3.0, 0.5, 0.5];
            for policy in ["gms", "mws", "famix-ms", "frame-optimal"] {
                let p = frontier(
                    &graph,
                    &chain,
                    policy,
                    direction.clone(),
                    horizon,
                    seeds,
                    AdmissionMode::CoinToss,
                );
                println!("variant {variant} {policy:>14}: scale_hat = {p:.4}");
            }
        }
        "diag" => {
            // Fixed probes around the expected two-link frontier.
            let (graph, chain) = scenarios::two_link_collocated();
            let chain = chain.with_constant_q(&[0.6, 0.6]).unwrap();
            let admission = if args.get(4).map(String::as_str) == Some("det") {
                AdmissionMode::Deterministic
            } else {
                AdmissionMode::CoinToss
            };
            for policy_name in ["famix-nd", "mws", "gms", "frame-optimal"] {
                if policy_name == "frame-optimal" && admission == AdmissionMode::Deterministic {
                    continue;
                }
                for scale in [0.50, 0.55, 0.575, 0.60, 0.625] {
                    let mut cfg = PolicyConfig::named(policy_name);
                    cfg.anchor_state = Some(1);
                    let policy = build_policy(&cfg, &graph).unwrap();
                    let mut exp = experiment(
                        graph.clone(),
                        chain.clone(),
                        policy,
                        horizon,
                        admission,
                    );
                    exp.targets = vec![scale, scale];
                    let metrics = fademix::run_episode(&exp, 0).unwrap();
                    let verdict = fademix::classify_stability(&metrics, &exp.stability);
                    println!(
                        "{policy_name:>14} p={scale:.3}: {} mid={:?} late={:?} ratio={:.3} delivered=({:.3},{:.3})",
                        if verdict.stable { "stable  " } else { "UNSTABLE" },
                        metrics.mid_window_mean.iter().map(|x| (x * 100.0).round() / 100.0).collect::<Vec<_>>(),
                        metrics.late_window_mean.iter().map(|x| (x * 100.0).round() / 100.0).collect::<Vec<_>>(),
                        verdict.max_growth_ratio,
                        metrics.delivery_ratio(0),
                        metrics.delivery_ratio(1),
                    );
                }
            }
        }
        "two-variants" => {
            let variant = args.get(4).and_then(|s| s.parse().ok()).unwrap_or(1usize);
            let graph = InterferenceGraph::collocated(2);
            let chain = custom_two(variant);
            for policy_name in ["famix-nd", "mws", "gms", "frame-optimal"] {
                let mut cfg = PolicyConfig::named(policy_name);
                cfg.anchor_state = Some(1);
                let policy = build_policy(&cfg, &graph).unwrap();
                let exp = experiment(
                    graph.clone(),
                    chain.clone(),
                    policy,
                    horizon,
                    AdmissionMode::CoinToss,
                );
                let opts = SweepOptions {
                    direction: vec![1.0, 1.0],
                    lo: 0.0,
                    hi: 1.0,
                    steps: 7,
                    seeds,
                };
                let result = sweep_frontier(&exp, &opts).unwrap();
                println!("variant {variant} {policy_name:>14}: p_hat = {:.4}", result.p_hat);
            }
        }
        "five" => {
            let (graph, chain) = scenarios::five_link_sparse();
            for policy in ["famix-ms", "famix-coloring", "mws", "gms", "myopic"] {
                let p = frontier(
                    &graph,
                    &chain,
                    policy,
                    vec![1.0; 5],
                    horizon,
                    seeds,
                    AdmissionMode::CoinToss,
                );
                println!("five-link {policy:>14}: p_hat = {p:.4}");
            }
        }
        other => eprintln!("unknown exploration '{other}'"),
    }
}

fn arrival(count: u32, deadline: u32) -> Arrival {
    Arrival { count, deadline }
}

fn custom_two(variant: usize) -> TrafficFadingChain {
    let q = vec![0.6, 0.6];
    let (patterns, switch_prob, d_max): (Vec<Vec<PatternSlot>>, f64, u32) = match variant {
        // Staggered deadline-2 packets: every slot contests a fresh packet
        // against the other link's last-chance packet.
        1 => (
            vec![vec![
                PatternSlot {
                    arrivals: vec![vec![arrival(1, 2)], vec![]],
                    success_probs: q.clone(),
                },
                PatternSlot {
                    arrivals: vec![vec![], vec![arrival(1, 2)]],
                    success_probs: q.clone(),
                },
            ]],
            1.0,
            2,
        ),
        // Same staggering with 3-slot lifetimes over a 2-slot cycle.
        3 => (
            vec![vec![
                PatternSlot {
                    arrivals: vec![vec![arrival(1, 3)], vec![]],
                    success_probs: q.clone(),
                },
                PatternSlot {
                    arrivals: vec![vec![], vec![arrival(1, 3)]],
                    success_probs: q.clone(),
                },
            ]],
            1.0,
            3,
        ),
        // Random alternation between the urgency fragment and its
        // role-swapped mirror.
        6 => (
            vec![
                vec![
                    PatternSlot {
                        arrivals: vec![vec![arrival(1, 2)], vec![arrival(1, 1)]],
                        success_probs: q.clone(),
                    },
                    PatternSlot::quiet(q.clone()),
                ],
                vec![
                    PatternSlot {
                        arrivals: vec![vec![arrival(1, 1)], vec![arrival(1, 2)]],
                        success_probs: q.clone(),
                    },
                    PatternSlot::quiet(q.clone()),
                ],
            ],
            0.5,
            2,
        ),
        _ => panic!("unknown two-link variant"),
    };
    build_alternating_pattern(&AlternatingPattern { patterns, switch_prob, d_max, a_max: 1 })
        .unwrap()
}

fn custom_three(variant: usize) -> (InterferenceGraph, TrafficFadingChain) {
    let graph = scenarios::three_link_star();
    let slots = match variant {
        // Center loaded every slot with a now-or-never packet; leaves get
        // deadline-2 packets that only slot 0 can serve (channel dies).
        1 => vec![
            PatternSlot {
                arrivals: vec![vec![arrival(1, 1)], vec![arrival(1, 2)], vec![arrival(1, 2)]],
                success_probs: vec![1.0, 1.0, 1.0],
            },
            PatternSlot {
                arrivals: vec![vec![arrival(1, 1)], vec![], vec![]],
                success_probs: vec![1.0, 0.0, 0.0],
            },
        ],
        // Leaves urgent with weak channels, center patient on a sure one.
        2 => vec![
            PatternSlot {
                arrivals: vec![vec![arrival(1, 2)], vec![arrival(1, 1)], vec![arrival(1, 1)]],
                success_probs: vec![1.0, 0.5, 0.5],
            },
            PatternSlot::quiet(vec![1.0, 0.5, 0.5]),
        ],
        _ => scenarios::three_link_greedy_trap_slots(),
    };
    let d_max = 2;
    let a_max = 2;
    let chain = build_alternating_pattern(&AlternatingPattern {
        patterns: vec![slots],
        switch_prob: 1.0,
        d_max,
        a_max,
    })
    .unwrap();
    (graph, chain)
}

/// Urgency whipsaw on the star: one pattern makes the leaves urgent and the
/// center patient, the mirror swaps the roles; phases flip randomly.
fn whipsaw_three(q: f64) -> (InterferenceGraph, TrafficFadingChain) {
    let graph = scenarios::three_link_star();
    let qv = vec![q, q, q];
    let leaves_urgent = vec![
        PatternSlot {
            arrivals: vec![vec![arrival(1, 2)], vec![arrival(1, 1)], vec![arrival(1, 1)]],
            success_probs: qv.clone(),
        },
        PatternSlot::quiet(qv.clone()),
    ];
    let center_urgent = vec![
        PatternSlot {
            arrivals: vec![vec![arrival(1, 1)], vec![arrival(1, 2)], vec![arrival(1, 2)]],
            success_probs: qv.clone(),
        },
        PatternSlot::quiet(qv.clone()),
    ];
    let chain = build_alternating_pattern(&AlternatingPattern {
        patterns: vec![leaves_urgent, center_urgent],
        switch_prob: 0.5,
        d_max: 2,
        a_max: 1,
    })
    .unwrap();
    (graph, chain)
}

/// Phase-flip variants: a center-burst pattern alternating with a
/// leaves-urgent pattern.
fn flip_three(center_burst: u32, switch_prob: f64) -> (InterferenceGraph, TrafficFadingChain) {
    let graph = scenarios::three_link_star();
    let q = vec![1.0, 1.0, 1.0];
    let center_slot = PatternSlot {
        arrivals: vec![vec![arrival(center_burst, 2)], vec![], vec![]],
        success_probs: q.clone(),
    };
    let leaves_slot = PatternSlot {
        arrivals: vec![vec![], vec![arrival(1, 1)], vec![arrival(1, 1)]],
        success_probs: q.clone(),
    };
    let chain = build_alternating_pattern(&AlternatingPattern {
        patterns: vec![vec![center_slot], vec![leaves_slot]],
        switch_prob,
        d_max: 2,
        a_max: center_burst,
    })
    .unwrap();
    (graph, chain)
}
