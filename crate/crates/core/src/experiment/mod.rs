//! Declarative experiments: a spec (TOML or JSON) names a mode and its
//! inputs, [`run`] dispatches it and writes CSV tables plus `summary.json`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lindblad::PhysicalConfig;
use crate::mdp::{DisorderModel, EpisodeConfig};
use crate::pattern::Pattern;
use crate::policy::PpoHyperparams;
use crate::search::evaluate_samples;
use crate::stats::SampleStats;

mod checks;
mod presets;
mod run;

pub use checks::{Check, CheckResult, Expectation, Metric, Metrics};
pub use presets::{
    preset, presets, Preset, ALTERNATING_11, EVERY_FIFTH, EVERY_FOURTH, MIDPOINT_11, SINK_OPTIMUM, UNITARY_OPTIMUM,
};
pub use run::{run, RunRecord, RunStatus, SeedResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Train,
    BruteForce,
    Greedy,
    EvaluatePattern,
    DisorderTable,
    /// Time series of one geometry.
    Simulate,
    /// Transfer against the coupling constant for one pattern.
    CouplingSweep,
}

impl Mode {
    fn needs_pattern(self) -> bool {
        matches!(
            self,
            Mode::EvaluatePattern | Mode::DisorderTable | Mode::Simulate | Mode::CouplingSweep
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub disorder: DisorderModel,
    /// Pattern that is optimal for this disorder level.
    pub pattern: Pattern,
    pub samples: usize,
    pub filled_samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepSpec {
    pub coupling_min: f64,
    pub coupling_max: f64,
    pub points: usize,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            coupling_min: 0.01,
            coupling_max: 0.3,
            points: 16,
        }
    }
}

impl SweepSpec {
    /// Log-spaced grid including both ends.
    pub fn grid(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.coupling_min];
        }
        let (a, b) = (self.coupling_min.ln(), self.coupling_max.ln());
        (0..self.points)
            .map(|i| {
                if i == 0 {
                    self.coupling_min
                } else if i + 1 == self.points {
                    self.coupling_max
                } else {
                    (a + (b - a) * i as f64 / (self.points - 1) as f64).exp()
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchSpec {
    pub max_added_particles: usize,
    pub max_evaluations: u128,
    /// Disorder samples per pattern when `disorder` is not `none`.
    pub disorder_samples: usize,
}

impl Default for SearchSpec {
    fn default() -> Self {
        SearchSpec {
            max_added_particles: 5,
            max_evaluations: 1_000_000,
            disorder_samples: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub name: String,
    pub mode: Mode,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub physical: PhysicalConfig,
    #[serde(default)]
    pub episode: EpisodeConfig,
    #[serde(default)]
    pub disorder: DisorderModel,
    #[serde(default)]
    pub ppo: PpoHyperparams,
    #[serde(default)]
    pub search: SearchSpec,
    /// Pattern to evaluate or simulate. In `disorder_table` it is the
    /// reference pattern of the middle column; in `brute_force` and `greedy`
    /// it is an optional comparison point.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pattern: Option<Pattern>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    /// Monte-Carlo samples for `evaluate_pattern`.
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Fresh greedy episodes used to score each trained policy; 0 skips.
    #[serde(default)]
    pub eval_episodes: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub table: Vec<TableRow>,
    #[serde(default)]
    pub sweep: SweepSpec,
    #[serde(default)]
    pub single_thread: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub expectations: Vec<Expectation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}

fn default_samples() -> usize {
    1
}

impl ExperimentSpec {
    pub fn new(name: impl Into<String>, mode: Mode) -> Self {
        ExperimentSpec {
            name: name.into(),
            mode,
            description: String::new(),
            physical: PhysicalConfig::default(),
            episode: EpisodeConfig::default(),
            disorder: DisorderModel::None,
            ppo: PpoHyperparams::default(),
            search: SearchSpec::default(),
            pattern: None,
            seeds: default_seeds(),
            samples: default_samples(),
            eval_episodes: 0,
            table: Vec::new(),
            sweep: SweepSpec::default(),
            single_thread: false,
            expectations: Vec::new(),
            output_dir: None,
        }
    }

    /// Parses TOML, or JSON when the text starts with `{`.
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            Ok(serde_json::from_str(text)?)
        } else {
            Ok(toml::from_str(text)?)
        }
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    /// Forces deterministic single-threaded execution everywhere.
    pub fn set_single_thread(&mut self, on: bool) {
        self.single_thread = on;
        self.ppo.single_thread = on;
    }

    /// Overrides every Monte-Carlo sample count except the filled column of
    /// disorder tables.
    pub fn set_samples(&mut self, n: usize) {
        self.samples = n;
        self.search.disorder_samples = n;
        if self.eval_episodes > 0 {
            self.eval_episodes = n;
        }
        for row in &mut self.table {
            row.samples = n;
        }
    }

    /// Checks every field and reports all problems at once.
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        let mut push = |r: Result<()>| {
            if let Err(e) = r {
                problems.push(e.to_string());
            }
        };
        push(self.physical.validate());
        push(self.episode.validate());
        push(self.disorder.validate());
        if self.mode == Mode::Train {
            push(self.ppo.validate());
        }
        if self.name.is_empty() {
            problems.push("name must not be empty".into());
        }
        if self.seeds.is_empty() {
            problems.push("seeds must not be empty".into());
        }
        if self.samples == 0 {
            problems.push("samples must be >= 1".into());
        }
        match (&self.pattern, self.mode.needs_pattern()) {
            (None, true) => problems.push(format!("mode {:?} requires a pattern", self.mode)),
            (Some(_), false) if matches!(self.mode, Mode::Train) => {
                problems.push("mode train does not take a pattern".into())
            }
            _ => {}
        }
        if let Some(p) = &self.pattern {
            if p.len() != self.physical.n_cells {
                problems.push(format!(
                    "pattern has {} cells but physical.n_cells = {}",
                    p.len(),
                    self.physical.n_cells
                ));
            }
        }
        if self.mode == Mode::DisorderTable {
            if self.table.is_empty() {
                problems.push("disorder_table needs at least one table row".into());
            }
            for (i, row) in self.table.iter().enumerate() {
                if row.pattern.len() != self.physical.n_cells {
                    problems.push(format!("table row {i}: pattern length mismatch"));
                }
                if row.samples == 0 || row.filled_samples == 0 {
                    problems.push(format!("table row {i}: sample counts must be >= 1"));
                }
                if let Err(e) = row.disorder.validate() {
                    problems.push(format!("table row {i}: {e}"));
                }
            }
        }
        if self.mode == Mode::CouplingSweep {
            let s = &self.sweep;
            if !(s.coupling_min > 0.0 && s.coupling_max >= s.coupling_min && s.points >= 1) {
                problems.push("sweep needs 0 < coupling_min <= coupling_max and points >= 1".into());
            }
        }
        if self.mode == Mode::Train && self.episode.reward_mode != self.physical.target_mode() {
            problems.push("episode.reward_mode must match physical.sink_enabled".into());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(problems.join("; ")))
        }
    }
}

/// Transfer statistics of `pattern` over `n_samples` disorder realisations
/// drawn from `seed`. Without disorder this is the deterministic value.
pub fn evaluate_pattern(
    pattern: &Pattern,
    config: &PhysicalConfig,
    disorder: &DisorderModel,
    n_samples: usize,
    seed: u64,
) -> Result<SampleStats> {
    config.validate()?;
    disorder.validate()?;
    if pattern.len() != config.n_cells {
        return Err(Error::InvalidPattern(format!(
            "pattern has {} cells, config expects {}",
            pattern.len(),
            config.n_cells
        )));
    }
    evaluate_samples(pattern, config, disorder, n_samples, seed, false)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_and_json_agree() {
        let toml_text = r#"
name = "demo"
mode = "evaluate_pattern"
pattern = "10101010101"
samples = 1

[physical]
n_cells = 11

[disorder]
kind = "uniform"
r = 0.25
"#;
        let a = ExperimentSpec::parse(toml_text).unwrap();
        let b = ExperimentSpec::parse(&serde_json::to_string(&a).unwrap()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.physical.n_cells, 11);
        assert_eq!(a.physical.coupling_j, 0.05);
        assert_eq!(a.disorder, DisorderModel::Uniform { r: 0.25 });
        a.validate().unwrap();
        let again = ExperimentSpec::parse(&a.to_toml().unwrap()).unwrap();
        assert_eq!(a, again);
    }

    #[test]
    fn validation_collects_all_problems() {
        let mut s = ExperimentSpec::new("", Mode::EvaluatePattern);
        s.seeds.clear();
        let msg = s.validate().unwrap_err().to_string();
        assert!(msg.contains("name"));
        assert!(msg.contains("seeds"));
        assert!(msg.contains("requires a pattern"));
    }

    #[test]
    fn sweep_grid_is_log_spaced() {
        let g = SweepSpec::default().grid();
        assert_eq!(g.len(), 16);
        assert_eq!(g[0], 0.01);
        assert_eq!(g[15], 0.3);
        let r1 = g[1] / g[0];
        for w in g.windows(2) {
            assert!((w[1] / w[0] - r1).abs() < 1e-9);
        }
    }

    #[test]
    fn deterministic_value_without_disorder() {
        let c = PhysicalConfig::default().with_cells(2);
        let s = evaluate_pattern(&Pattern::endpoints(2), &c, &DisorderModel::None, 1, 0).unwrap();
        assert_eq!(s.samples, 1);
        assert!((s.mean - 0.005).abs() < 1e-3);
    }
}
