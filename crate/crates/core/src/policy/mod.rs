//! Clipped PPO written from scratch: dense ReLU networks with hand-written
//! backpropagation, Adam, generalized advantage estimation and the
//! rollout/update loop.

mod adam;
mod checkpoint;
mod gae;
mod mlp;
mod ppo;
mod train;

pub use adam::Adam;
pub use checkpoint::{Checkpoint, CHECKPOINT_FORMAT, CHECKPOINT_VERSION};
pub use gae::{compute_gae, gae_from_slices};
pub use mlp::{entropy, log_softmax, softmax, Forward, Mlp, MlpSpec, OutputActivation};
pub use ppo::{
    ppo_update, prepare_samples, surrogate_gradient, surrogate_objective, value_loss, value_loss_gradient,
    PolicyParameters, PpoHyperparams, Sample, UpdateStats,
};
pub use train::{
    evaluate_policy, run_episode, train, ActionSelection, EpisodeLog, PolicyEvaluation, TrainingOutcome, Trajectory,
};
