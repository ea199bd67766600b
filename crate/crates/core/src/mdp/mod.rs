//! Chain construction as an episodic decision process.
//!
//! The space between A and B is split into `n_cells` cells; an action is the
//! index of the next cell to populate. Selecting an occupied cell (including
//! the endpoints) is a no-op that still consumes a step. The reward is the
//! change of the target transfer caused by the step, so undiscounted returns
//! telescope to `final − baseline`.

mod disorder;
mod env;

pub use disorder::{realize_configuration, DisorderModel};
pub use env::{CellState, ChainEnv, EpisodeConfig, StepOutcome};
