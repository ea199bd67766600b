//! Named reproductions. Each preset carries its expected values, which
//! [`run`](super::run) checks automatically.

use super::checks::{Check, Expectation};
use super::{ExperimentSpec, Mode, SweepSpec, TableRow};
use crate::error::{Error, Result};
use crate::lindblad::PhysicalConfig;
use crate::mdp::{DisorderModel, EpisodeConfig};
use crate::pattern::Pattern;
use crate::policy::PpoHyperparams;

pub const SINK_OPTIMUM: &str = "100000100010010010001";
pub const UNITARY_OPTIMUM: &str = "100010111010111010001";
pub const EVERY_FOURTH: &str = "100010001000100010001";
pub const EVERY_FIFTH: &str = "100001000010000100001";
pub const ALTERNATING_11: &str = "10101010101";
pub const MIDPOINT_11: &str = "10000100001";

#[derive(Debug, Clone, Copy)]
pub struct Preset {
    pub name: &'static str,
    pub summary: &'static str,
    build: fn() -> ExperimentSpec,
}

impl Preset {
    pub fn spec(&self) -> ExperimentSpec {
        (self.build)()
    }
}

fn pat(s: &str) -> Pattern {
    s.parse().expect("preset patterns are valid")
}

fn within(metric: &str, expected: f64, tolerance: f64) -> Expectation {
    Expectation::new(metric, Check::Within { expected, tolerance })
}

fn above(metric: &str, threshold: f64) -> Expectation {
    Expectation::new(metric, Check::Above { threshold })
}

fn at_least(metric: &str, threshold: f64) -> Expectation {
    Expectation::new(metric, Check::AtLeast { threshold })
}

fn mc(metric: &str, expected: f64) -> Expectation {
    Expectation::new(metric, Check::MonteCarlo { expected, floor: 0.01 })
}

fn equals(metric: &str, expected: &str) -> Expectation {
    Expectation::new(
        metric,
        Check::Equals {
            expected: expected.into(),
        },
    )
}

fn evaluate(name: &str, physical: PhysicalConfig, pattern: &str, expect: Expectation) -> ExperimentSpec {
    let mut s = ExperimentSpec::new(name, Mode::EvaluatePattern);
    s.physical = physical;
    s.pattern = Some(pat(pattern));
    s.expectations = vec![expect];
    s
}

fn sink(n: usize) -> PhysicalConfig {
    PhysicalConfig::default().with_cells(n)
}

fn unitary(n: usize) -> PhysicalConfig {
    PhysicalConfig::unitary().with_cells(n)
}

fn train(name: &str, physical: PhysicalConfig, disorder: DisorderModel, ppo: PpoHyperparams) -> ExperimentSpec {
    let mut s = ExperimentSpec::new(name, Mode::Train);
    s.episode = EpisodeConfig {
        reward_mode: physical.target_mode(),
        ..EpisodeConfig::default()
    };
    s.physical = physical;
    s.disorder = disorder;
    s.ppo = ppo;
    s.seeds = vec![0, 1, 2];
    s
}

fn disorder_train(name: &str, disorder: DisorderModel, ppo: PpoHyperparams, expected: f64) -> ExperimentSpec {
    let mut s = train(name, sink(21), disorder, ppo);
    s.eval_episodes = 5000;
    s.expectations = vec![mc("policy_mean_transfer", expected).with_note("published disorder-averaged optimum")];
    s
}

fn table1() -> ExperimentSpec {
    let mut s = ExperimentSpec::new("table1", Mode::DisorderTable);
    s.description = "Disorder-averaged transfer of the optimal, reference and filled chains".into();
    s.pattern = Some(pat(SINK_OPTIMUM));
    let rows: [(DisorderModel, &str, [f64; 3]); 4] = [
        (DisorderModel::Uniform { r: 0.1 }, SINK_OPTIMUM, [0.998, 0.998, 0.796]),
        (DisorderModel::Uniform { r: 0.25 }, EVERY_FOURTH, [0.995, 0.989, 0.300]),
        (DisorderModel::Uniform { r: 0.5 }, EVERY_FIFTH, [0.988, 0.943, 0.045]),
        (
            DisorderModel::TruncatedNormal { sigma: 0.1 },
            EVERY_FOURTH,
            [0.979, 0.972, 0.188],
        ),
    ];
    for (i, (disorder, p, expected)) in rows.into_iter().enumerate() {
        s.table.push(TableRow {
            disorder,
            pattern: pat(p),
            samples: 5000,
            filled_samples: 100,
        });
        for (col, e) in ["opt", "reference", "filled"].iter().zip(expected) {
            s.expectations.push(mc(&format!("row{i}.{col}"), e));
        }
    }
    s
}

fn chain11_strong() -> ExperimentSpec {
    let mut s = ExperimentSpec::new("chain11-strong", Mode::BruteForce);
    s.physical = sink(11).with_coupling(1.0);
    s.search.max_added_particles = 1;
    s.pattern = Some(pat(MIDPOINT_11));
    s.expectations = vec![equals("best_pattern", MIDPOINT_11), above("best_transfer", 0.99)];
    s
}

fn brute_force_21() -> ExperimentSpec {
    let mut s = ExperimentSpec::new("brute-force-21", Mode::BruteForce);
    s.description = "Exhaustive search over up to five added particles".into();
    s.pattern = Some(pat(SINK_OPTIMUM));
    s.expectations = vec![at_least("dominance_margin", 0.0), above("best_transfer", 0.99)];
    s
}

fn sink_noerror() -> ExperimentSpec {
    let mut s = train(
        "sink-noerror-21",
        sink(21),
        DisorderModel::None,
        PpoHyperparams::no_error(),
    );
    s.expectations = vec![above("best_transfer", 0.99), at_least("return_gain", 0.5)];
    s
}

fn learning_curve() -> ExperimentSpec {
    let mut s = sink_noerror();
    s.name = "learning-curve".into();
    s.description = "Single-seed learning curve on the default sink chain".into();
    s.seeds = vec![0];
    s
}

fn unitary_noerror() -> ExperimentSpec {
    let mut s = train(
        "unitary-noerror-21",
        unitary(21),
        DisorderModel::None,
        PpoHyperparams::unitary(),
    );
    s.expectations = vec![above("best_transfer", 0.99)];
    s
}

fn adaptive() -> ExperimentSpec {
    let mut s = train(
        "adaptive-normal",
        sink(21),
        DisorderModel::TruncatedNormal { sigma: 0.1 },
        PpoHyperparams::adaptive(),
    );
    s.episode.adaptive_encoding = true;
    s.eval_episodes = 5000;
    s.expectations = vec![at_least("policy_mean_transfer", 0.979).with_note("static optimum's published mean")];
    s
}

fn fig1_sweep() -> ExperimentSpec {
    let mut s = ExperimentSpec::new("fig1-sweep", Mode::CouplingSweep);
    s.description = "Two-site transfer against the coupling constant".into();
    s.physical = sink(2);
    s.pattern = Some(Pattern::endpoints(2));
    s.sweep = SweepSpec::default();
    s.expectations = vec![equals("sink_monotone", "true"), equals("unitary_monotone", "true")];
    s
}

fn described(mut s: ExperimentSpec, d: &str) -> ExperimentSpec {
    s.description = d.into();
    s
}

const REGISTRY: &[Preset] = &[
    Preset {
        name: "two-site-sink",
        summary: "A and B only, weak coupling, final sink population",
        build: || {
            described(
                evaluate("two-site-sink", sink(2), "11", within("transfer", 0.005, 0.001)),
                "two-site baseline",
            )
        },
    },
    Preset {
        name: "two-site-unitary",
        summary: "A and B only, weak coupling, maximum population of B",
        build: || evaluate("two-site-unitary", unitary(2), "11", within("transfer", 0.06, 0.01)),
    },
    Preset {
        name: "two-site-strong",
        summary: "11 cells with only the endpoints occupied, J = delta E",
        build: || {
            evaluate(
                "two-site-strong",
                sink(11).with_coupling(1.0),
                "10000000001",
                within("transfer", 0.86, 0.01),
            )
        },
    },
    Preset {
        name: "chain11-strong",
        summary: "11 cells, J = delta E, best single addition (brute force)",
        build: chain11_strong,
    },
    Preset {
        name: "chain11-weak",
        summary: "11 cells, J = 0.05 delta E, alternating pattern",
        build: || evaluate("chain11-weak", sink(11), ALTERNATING_11, within("transfer", 0.98, 0.01)),
    },
    Preset {
        name: "sink-optimum-21",
        summary: "21 cells, the sink optimum found by the agent",
        build: || evaluate("sink-optimum-21", sink(21), SINK_OPTIMUM, above("transfer", 0.99)),
    },
    Preset {
        name: "filled-21",
        summary: "21 cells, every cell occupied, sink mode",
        build: || evaluate("filled-21", sink(21), &"1".repeat(21), within("transfer", 0.97, 0.01)),
    },
    Preset {
        name: "brute-force-21",
        summary: "21 cells, exhaustive search up to 5 additions against the sink optimum",
        build: brute_force_21,
    },
    Preset {
        name: "sink-noerror-21",
        summary: "PPO on the 21-cell sink chain without disorder (3 seeds)",
        build: sink_noerror,
    },
    Preset {
        name: "learning-curve",
        summary: "PPO on the 21-cell sink chain, single seed, learning curve",
        build: learning_curve,
    },
    Preset {
        name: "unitary-noerror-21",
        summary: "PPO on the 21-cell chain without sink (3 seeds)",
        build: unitary_noerror,
    },
    Preset {
        name: "unitary-optimum-21",
        summary: "21 cells, the unitary optimum found by the agent",
        build: || {
            evaluate(
                "unitary-optimum-21",
                unitary(21),
                UNITARY_OPTIMUM,
                above("transfer", 0.99),
            )
        },
    },
    Preset {
        name: "unitary-filled-21",
        summary: "21 cells, every cell occupied, unitary mode",
        build: || {
            evaluate(
                "unitary-filled-21",
                unitary(21),
                &"1".repeat(21),
                within("transfer", 0.3, 0.05),
            )
        },
    },
    Preset {
        name: "unitary-optimum-in-sink",
        summary: "The unitary optimum evaluated with the sink",
        build: || {
            evaluate(
                "unitary-optimum-in-sink",
                sink(21),
                UNITARY_OPTIMUM,
                within("transfer", 0.991, 0.005),
            )
        },
    },
    Preset {
        name: "sink-optimum-in-unitary",
        summary: "The sink optimum evaluated without the sink",
        build: || {
            evaluate(
                "sink-optimum-in-unitary",
                unitary(21),
                SINK_OPTIMUM,
                within("transfer", 0.5, 0.05),
            )
        },
    },
    Preset {
        name: "table1",
        summary: "Disorder table: four error models, optimal / reference / filled chains",
        build: table1,
    },
    Preset {
        name: "uniform-r010",
        summary: "PPO under uniform disorder, r = 0.1",
        build: || {
            disorder_train(
                "uniform-r010",
                DisorderModel::Uniform { r: 0.1 },
                PpoHyperparams::uniform_error(),
                0.998,
            )
        },
    },
    Preset {
        name: "uniform-r025",
        summary: "PPO under uniform disorder, r = 0.25",
        build: || {
            disorder_train(
                "uniform-r025",
                DisorderModel::Uniform { r: 0.25 },
                PpoHyperparams::uniform_error(),
                0.995,
            )
        },
    },
    Preset {
        name: "uniform-r050",
        summary: "PPO under uniform disorder, r = 0.5",
        build: || {
            disorder_train(
                "uniform-r050",
                DisorderModel::Uniform { r: 0.5 },
                PpoHyperparams::uniform_error(),
                0.988,
            )
        },
    },
    Preset {
        name: "normal-s010",
        summary: "PPO under truncated normal disorder, sigma = 0.1 d",
        build: || {
            disorder_train(
                "normal-s010",
                DisorderModel::TruncatedNormal { sigma: 0.1 },
                PpoHyperparams::normal_error(),
                0.979,
            )
        },
    },
    Preset {
        name: "adaptive-normal",
        summary: "PPO with transfer-encoded state under truncated normal disorder",
        build: adaptive,
    },
    Preset {
        name: "fig1-sweep",
        summary: "Two-site p_sink(T) and max p_B against J, log-spaced 0.01 to 0.3",
        build: fig1_sweep,
    },
];

pub fn presets() -> &'static [Preset] {
    REGISTRY
}

/// Spec of a named preset.
pub fn preset(name: &str) -> Result<ExperimentSpec> {
    REGISTRY
        .iter()
        .find(|p| p.name == name)
        .map(Preset::spec)
        .ok_or_else(|| Error::UnknownPreset(name.to_string()))
}
