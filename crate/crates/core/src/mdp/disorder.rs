use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Rng;
use crate::lindblad::{ChainGeometry, PhysicalConfig};
use crate::pattern::Pattern;

/// Static positional error of particles added between A and B.
///
/// Offsets are always strictly smaller than half a cell in magnitude, so the
/// nearest cell centre of a realised particle is still its intended cell.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DisorderModel {
    #[default]
    None,
    /// Magnitude `~ U([0, r d/2])` with a uniformly random sign, `0 < r < 1`.
    Uniform { r: f64 },
    /// `~ N(0, σ)` re-drawn until `|δ| < d/2`. `sigma` is in units of the
    /// cell spacing `d` (so `0.1` is `5σ = d/2`).
    TruncatedNormal { sigma: f64 },
}

impl DisorderModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            DisorderModel::None => Ok(()),
            DisorderModel::Uniform { r } if r > 0.0 && r < 1.0 => Ok(()),
            DisorderModel::Uniform { r } => Err(Error::InvalidConfig(format!(
                "uniform disorder needs 0 < r < 1, got {r}"
            ))),
            DisorderModel::TruncatedNormal { sigma } if sigma > 0.0 && sigma.is_finite() => Ok(()),
            DisorderModel::TruncatedNormal { sigma } => Err(Error::InvalidConfig(format!(
                "normal disorder needs sigma > 0, got {sigma}"
            ))),
        }
    }

    pub fn is_none(&self) -> bool {
        matches!(self, DisorderModel::None)
    }

    /// One signed offset for a particle in a grid of spacing `d`.
    pub fn sample_offset(&self, rng: &mut Rng, d: f64) -> f64 {
        match *self {
            DisorderModel::None => 0.0,
            DisorderModel::Uniform { r } => {
                let magnitude = rng.random::<f64>() * r * d / 2.0;
                if rng.random::<bool>() {
                    magnitude
                } else {
                    -magnitude
                }
            }
            DisorderModel::TruncatedNormal { sigma } => loop {
                let z: f64 = rng.sample(StandardNormal);
                let x = z * sigma * d;
                if x.abs() < d / 2.0 {
                    break x;
                }
            },
        }
    }

    /// Offsets for every cell of a grid, drawn in cell order; the endpoints get
    /// exactly 0. Sharing one draw across several patterns gives common random
    /// numbers: a cell's offset does not depend on which other cells are filled.
    pub fn cell_offsets(&self, rng: &mut Rng, n_cells: usize, d: f64) -> Vec<f64> {
        let mut out = vec![0.0; n_cells];
        if !self.is_none() {
            for o in out.iter_mut().take(n_cells - 1).skip(1) {
                *o = self.sample_offset(rng, d);
            }
        }
        out
    }

    /// Short label used in tables and file names.
    pub fn label(&self) -> String {
        match *self {
            DisorderModel::None => "none".into(),
            DisorderModel::Uniform { r } => format!("uniform(r={r})"),
            DisorderModel::TruncatedNormal { sigma } => format!("normal(sigma={sigma}d)"),
        }
    }
}

/// Realised geometry of `pattern`: interior particles at `j d + δ_j`,
/// endpoints exact.
pub fn realize_configuration(
    pattern: &Pattern,
    config: &PhysicalConfig,
    disorder: &DisorderModel,
    rng: &mut Rng,
) -> Result<ChainGeometry> {
    let offsets = disorder.cell_offsets(rng, config.n_cells, config.cell_spacing());
    realize_with_offsets(pattern, config, &offsets)
}

pub(crate) fn realize_with_offsets(
    pattern: &Pattern,
    config: &PhysicalConfig,
    offsets: &[f64],
) -> Result<ChainGeometry> {
    if pattern.len() != config.n_cells {
        return Err(Error::InvalidPattern(format!(
            "pattern has {} cells, config expects {}",
            pattern.len(),
            config.n_cells
        )));
    }
    let xs = pattern
        .occupied()
        .map(|c| config.cell_position(c) + offsets[c])
        .collect();
    ChainGeometry::new(xs, config.d_ab)
}
