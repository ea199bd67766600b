//! Pure-state route for the single-excitation problem.
//!
//! The only jump operator maps the chain onto the sink, which is decoupled
//! from everything else, so the chain block of ρ evolves exactly as
//! `ψ(t) = exp(−i H_eff t) ψ(0)` with `H_eff = H − i (κ/2) |B⟩⟨B|` and
//! `κ` the sink rate. The sink population is the lost norm, `1 − ‖ψ(t)‖²`.
//! This needs an N×N exponential instead of the (N+1)²×(N+1)² one.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::expm::expm;
use super::{Hamiltonian, PhysicalConfig};
use crate::error::{Error, Result};

/// `H − i (κ/2)|B⟩⟨B|` with sink, `H` otherwise.
pub fn effective_hamiltonian(h: &Hamiltonian, config: &PhysicalConfig) -> DMatrix<Complex64> {
    let mut m = h.matrix.clone();
    if config.sink_enabled {
        let b = m.nrows() - 1;
        m[(b, b)] -= Complex64::new(0.0, 0.5 * config.sink_rate());
    }
    m
}

/// `exp(−i H_eff t) ψ0`.
pub fn propagate_amplitudes(
    h_eff: &DMatrix<Complex64>,
    psi0: &DVector<Complex64>,
    t: f64,
) -> Result<DVector<Complex64>> {
    if t < 0.0 || !t.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "propagation time must be finite and >= 0, got {t}"
        )));
    }
    if t == 0.0 {
        return Ok(psi0.clone());
    }
    let u = expm(&(h_eff * Complex64::new(0.0, -t)))?;
    Ok(u * psi0)
}
