use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::DisorderModel;
use crate::error::{Error, Result};
use crate::exec::{rng_from_seed, Rng};
use crate::lindblad::{transfer_value, Backend, ChainGeometry, PhysicalConfig, TargetMode};
use crate::pattern::Pattern;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EpisodeConfig {
    /// Step budget ν_steps.
    pub max_steps: usize,
    /// Episodes end once the transfer exceeds this value.
    pub success_threshold: f64,
    /// Encode placed cells as `η = (1 + transfer)/2` instead of 1.
    pub adaptive_encoding: bool,
    pub reward_mode: TargetMode,
}

impl Default for EpisodeConfig {
    fn default() -> Self {
        EpisodeConfig {
            max_steps: 11,
            success_threshold: 0.99,
            adaptive_encoding: false,
            reward_mode: TargetMode::SinkFinal,
        }
    }
}

impl EpisodeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_steps == 0 {
            return Err(Error::InvalidConfig("max_steps must be >= 1".into()));
        }
        if !(self.success_threshold > 0.0 && self.success_threshold <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "success_threshold must lie in (0, 1], got {}",
                self.success_threshold
            )));
        }
        Ok(())
    }
}

/// Environment state: the observation vector plus where particles really are.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellState {
    /// 0 for empty cells, the fill value (1 or η) for occupied ones.
    pub occupancy: Vec<f64>,
    /// Realised coordinate of each occupied cell.
    pub realized_positions: BTreeMap<usize, f64>,
}

impl CellState {
    fn endpoints(config: &PhysicalConfig) -> Self {
        let n = config.n_cells;
        let mut occupancy = vec![0.0; n];
        occupancy[0] = 1.0;
        occupancy[n - 1] = 1.0;
        let realized_positions = BTreeMap::from([(0, 0.0), (n - 1, config.d_ab)]);
        CellState {
            occupancy,
            realized_positions,
        }
    }

    pub fn is_occupied(&self, cell: usize) -> bool {
        self.realized_positions.contains_key(&cell)
    }

    pub fn pattern(&self) -> Pattern {
        let cells = (0..self.occupancy.len()).map(|c| self.is_occupied(c)).collect();
        Pattern::from_cells(cells).expect("endpoints are always occupied")
    }

    pub fn particle_count(&self) -> usize {
        self.realized_positions.len()
    }

    pub fn geometry(&self, d_ab: f64) -> Result<ChainGeometry> {
        ChainGeometry::new(self.realized_positions.values().copied().collect(), d_ab)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub observation: Vec<f64>,
    pub reward: f64,
    pub done: bool,
    /// Target transfer after the step.
    pub transfer: f64,
    /// False when the action hit an occupied cell.
    pub placed: bool,
}

/// One chain-building environment. Owns its RNG stream; reseeded by
/// [`ChainEnv::reset`].
#[derive(Debug, Clone)]
pub struct ChainEnv {
    physical: PhysicalConfig,
    episode: EpisodeConfig,
    disorder: DisorderModel,
    backend: Backend,
    rng: Rng,
    state: CellState,
    baseline: Option<f64>,
    transfer: f64,
    steps: usize,
    done: bool,
    evaluations: u64,
}

impl ChainEnv {
    pub fn new(physical: PhysicalConfig, episode: EpisodeConfig, disorder: DisorderModel) -> Result<Self> {
        physical.validate()?;
        episode.validate()?;
        disorder.validate()?;
        if physical.target_mode() != episode.reward_mode {
            return Err(Error::InvalidConfig(format!(
                "reward mode {:?} does not match sink_enabled = {}",
                episode.reward_mode, physical.sink_enabled
            )));
        }
        let state = CellState::endpoints(&physical);
        Ok(ChainEnv {
            physical,
            episode,
            disorder,
            backend: Backend::Amplitude,
            rng: rng_from_seed(0),
            state,
            baseline: None,
            transfer: 0.0,
            steps: 0,
            done: true,
            evaluations: 0,
        })
    }

    /// Selects the dynamics route used for rewards (amplitude by default).
    pub fn with_backend(mut self, backend: Backend) -> Self {
        self.backend = backend;
        self
    }

    pub fn physical(&self) -> &PhysicalConfig {
        &self.physical
    }

    pub fn episode_config(&self) -> &EpisodeConfig {
        &self.episode
    }

    pub fn disorder(&self) -> &DisorderModel {
        &self.disorder
    }

    pub fn n_actions(&self) -> usize {
        self.physical.n_cells
    }

    /// Starts a new episode with only A and B, both placed exactly.
    pub fn reset(&mut self, seed: u64) -> Result<&CellState> {
        self.rng = rng_from_seed(seed);
        self.state = CellState::endpoints(&self.physical);
        let baseline = match self.baseline {
            Some(b) => b,
            None => {
                let b = self.evaluate()?;
                self.baseline = Some(b);
                b
            }
        };
        self.transfer = baseline;
        self.steps = 0;
        self.done = baseline > self.episode.success_threshold;
        Ok(&self.state)
    }

    fn evaluate(&mut self) -> Result<f64> {
        self.evaluations += 1;
        let g = self.state.geometry(self.physical.d_ab)?;
        transfer_value(&g, &self.physical, self.backend)
    }

    pub fn step(&mut self, action: usize) -> Result<StepOutcome> {
        let n = self.physical.n_cells;
        if action >= n {
            return Err(Error::InvalidAction { action, n_cells: n });
        }
        if self.done {
            return Err(Error::EpisodeFinished);
        }
        self.steps += 1;
        let before = self.transfer;
        let placed = !self.state.is_occupied(action);
        if placed {
            let d = self.physical.cell_spacing();
            let x = self.physical.cell_position(action) + self.disorder.sample_offset(&mut self.rng, d);
            self.state.realized_positions.insert(action, x);
            self.transfer = self.evaluate()?;
            self.state.occupancy[action] = if self.episode.adaptive_encoding {
                (1.0 + self.transfer) / 2.0
            } else {
                1.0
            };
        }
        let reward = if placed { self.transfer - before } else { 0.0 };
        self.done = self.steps >= self.episode.max_steps || self.transfer > self.episode.success_threshold;
        Ok(StepOutcome {
            observation: self.state.occupancy.clone(),
            reward,
            done: self.done,
            transfer: self.transfer,
            placed,
        })
    }

    pub fn state(&self) -> &CellState {
        &self.state
    }

    pub fn observation(&self) -> &[f64] {
        &self.state.occupancy
    }

    /// Current target transfer.
    pub fn transfer(&self) -> f64 {
        self.transfer
    }

    /// Transfer of the bare A–B chain, once [`ChainEnv::reset`] has run.
    pub fn baseline(&self) -> Option<f64> {
        self.baseline
    }

    pub fn steps_taken(&self) -> usize {
        self.steps
    }

    pub fn is_done(&self) -> bool {
        self.done
    }

    /// Number of dynamics evaluations performed so far.
    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }
}
