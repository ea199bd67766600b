//! Single-excitation dynamics of a dipolar tight-binding chain.
//!
//! Units: ħ = 1 and energies are quoted in units of the site energy ΔE, so
//! times are in 1/ΔE and rates in ΔE.

mod amplitude;
mod config;
pub mod expm;
mod hamiltonian;
mod superop;
mod transfer;

pub use amplitude::{effective_hamiltonian, propagate_amplitudes};
pub use config::{PhysicalConfig, SinkConvention, TargetMode};
pub use hamiltonian::{build_hamiltonian, ChainGeometry, Hamiltonian};
pub use superop::{build_liouvillian, initial_state, population, propagate, Liouvillian};
pub use transfer::{evaluate_transfer, evaluate_transfer_with, transfer_value, Backend, TimeSample, TransferResult};
