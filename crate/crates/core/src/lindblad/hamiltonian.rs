use nalgebra::DMatrix;
use num_complex::Complex64;

use super::PhysicalConfig;
use crate::error::{Error, Result};
use crate::pattern::Pattern;

/// Particle coordinates along the A–B axis, A at 0 and B at `d_ab`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainGeometry {
    positions: Vec<f64>,
}

impl ChainGeometry {
    /// Validates that positions are finite, strictly increasing and span
    /// exactly `[0, d_ab]`.
    pub fn new(positions: Vec<f64>, d_ab: f64) -> Result<Self> {
        if positions.len() < 2 {
            return Err(Error::DegenerateGeometry(format!(
                "need at least the two endpoints, got {} positions",
                positions.len()
            )));
        }
        if positions.iter().any(|x| !x.is_finite()) {
            return Err(Error::DegenerateGeometry("non-finite position".into()));
        }
        let slack = 1e-12 * d_ab;
        let first = positions[0];
        let last = positions[positions.len() - 1];
        if first.abs() > slack || (last - d_ab).abs() > slack {
            return Err(Error::DegenerateGeometry(format!(
                "endpoints must sit at 0 and {d_ab}, got {first} and {last}"
            )));
        }
        if let Some(w) = positions.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::DegenerateGeometry(format!(
                "positions must be strictly increasing, found {} then {}",
                w[0], w[1]
            )));
        }
        Ok(ChainGeometry { positions })
    }

    /// Cell centres of the occupied cells of `pattern`.
    pub fn from_pattern(pattern: &Pattern, config: &PhysicalConfig) -> Result<Self> {
        if pattern.len() != config.n_cells {
            return Err(Error::InvalidPattern(format!(
                "pattern has {} cells, config expects {}",
                pattern.len(),
                config.n_cells
            )));
        }
        let xs = pattern.occupied().map(|c| config.cell_position(c)).collect();
        Self::new(xs, config.d_ab)
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn count(&self) -> usize {
        self.positions.len()
    }

    /// Spatial reversal `x → d_ab − x`, relabelled so positions increase.
    pub fn reversed(&self) -> Self {
        let d_ab = self.positions[self.positions.len() - 1];
        ChainGeometry {
            positions: self.positions.iter().rev().map(|x| d_ab - x).collect(),
        }
    }
}

/// Dense N×N tight-binding Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    pub matrix: DMatrix<Complex64>,
}

impl Hamiltonian {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Largest |H_ij − conj(H_ji)| relative to the largest entry.
    pub fn hermiticity_error(&self) -> f64 {
        let h = &self.matrix;
        let scale = h.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        let mut worst: f64 = 0.0;
        for i in 0..h.nrows() {
            for j in 0..h.ncols() {
                worst = worst.max((h[(i, j)] - h[(j, i)].conj()).norm());
            }
        }
        worst / scale
    }
}

/// `H = ΔE Σ|i⟩⟨i| + Σ_{i≠j} J/|x_i − x_j|³ |i⟩⟨j|`, fully connected.
pub fn build_hamiltonian(geometry: &ChainGeometry, config: &PhysicalConfig) -> Result<Hamiltonian> {
    let x = geometry.positions();
    let n = x.len();
    let mut h = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for i in 0..n {
        h[(i, i)] = Complex64::new(config.delta_e, 0.0);
        for j in (i + 1)..n {
            let dist = (x[i] - x[j]).abs();
            if dist == 0.0 {
                return Err(Error::DegenerateGeometry(format!(
                    "particles {i} and {j} coincide at {}",
                    x[i]
                )));
            }
            let v = Complex64::new(config.coupling_j / dist.powi(3), 0.0);
            h[(i, j)] = v;
            h[(j, i)] = v;
        }
    }
    Ok(Hamiltonian { matrix: h })
}
