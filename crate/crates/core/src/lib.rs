//! Design of particle chains for single-excitation transfer.
//!
//! The crate is organised bottom-up:
//!
//! - [`lindblad`] builds tight-binding Hamiltonians with dipolar couplings, the
//!   vectorised Lindblad generator with an optional sink, and propagates them.
//! - [`mdp`] turns chain construction into an episodic environment with
//!   add-particle actions, transfer-delta rewards and positional disorder.
//! - [`policy`] is a from-scratch clipped PPO (MLPs, Adam, GAE, training loop).
//! - [`search`] holds RL-independent baselines: exhaustive search, greedy
//!   construction and the filled chain.
//! - [`experiment`] wires everything into declarative, reproducible runs and
//!   named presets.
//!
//! Runnable walkthroughs live in the crate's `examples/` directory.

pub mod error;
pub mod exec;
pub mod experiment;
pub mod lindblad;
pub mod mdp;
pub mod pattern;
pub mod policy;
pub mod search;
pub mod stats;

pub use error::{Error, Result};
pub use lindblad::{
    evaluate_transfer, transfer_value, Backend, ChainGeometry, PhysicalConfig, SinkConvention, TargetMode,
    TransferResult,
};
pub use mdp::{ChainEnv, DisorderModel, EpisodeConfig};
pub use pattern::Pattern;
