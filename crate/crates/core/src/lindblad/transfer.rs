use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::amplitude::effective_hamiltonian;
use super::expm::expm;
use super::superop::{build_liouvillian, initial_state, population};
use super::{build_hamiltonian, ChainGeometry, PhysicalConfig, TargetMode};
use crate::error::Result;

/// How the dynamics is integrated. Both routes are exact for this model and
/// agree to round-off; the amplitude route is much cheaper for long chains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    /// Dense vectorised Liouvillian, `exp(t G)` on K² components.
    #[default]
    Superoperator,
    /// Non-Hermitian effective Hamiltonian on the N chain amplitudes.
    Amplitude,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSample {
    pub time: f64,
    /// Site populations in chain order, followed by the sink when present.
    pub populations: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferResult {
    pub mode: TargetMode,
    /// Target population at t = T.
    pub target_population_final: f64,
    /// Largest target population on the sampled grid.
    pub target_population_max: f64,
    pub time_series: Vec<TimeSample>,
}

impl TransferResult {
    /// The figure of merit for this mode: final sink population, or the
    /// maximum of p_B over the grid.
    pub fn target_value(&self) -> f64 {
        match self.mode {
            TargetMode::SinkFinal => self.target_population_final,
            TargetMode::UnitaryMax => self.target_population_max,
        }
    }
}

/// Full evaluation with the superoperator route.
pub fn evaluate_transfer(geometry: &ChainGeometry, config: &PhysicalConfig) -> Result<TransferResult> {
    evaluate_transfer_with(geometry, config, Backend::Superoperator)
}

/// Time series on the `n_T` grid plus the target figures.
pub fn evaluate_transfer_with(
    geometry: &ChainGeometry,
    config: &PhysicalConfig,
    backend: Backend,
) -> Result<TransferResult> {
    config.validate()?;
    let grid = config.time_grid();
    let dt = config.horizon_t / config.n_time_samples as f64;
    let n = geometry.count();
    let h = build_hamiltonian(geometry, config)?;
    let sink = config.sink_enabled;

    let mut series = Vec::with_capacity(grid.len());
    let final_target;
    match backend {
        Backend::Superoperator => {
            let g = build_liouvillian(&h, config)?;
            let k = g.dim;
            let step = expm(&(&g.matrix * Complex64::new(dt, 0.0)))?;
            let mut r = initial_state(k);
            for (idx, &t) in grid.iter().enumerate() {
                if idx > 0 {
                    r = &step * &r;
                }
                series.push(TimeSample {
                    time: t,
                    populations: (0..k).map(|i| population(&r, k, i)).collect(),
                });
            }
            final_target = if sink {
                let full = expm(&(&g.matrix * Complex64::new(config.horizon_t, 0.0)))?;
                population(&(full * initial_state(k)), k, n)
            } else {
                series.last().unwrap().populations[n - 1]
            };
        }
        Backend::Amplitude => {
            let h_eff = effective_hamiltonian(&h, config);
            let step = expm(&(&h_eff * Complex64::new(0.0, -dt)))?;
            let mut psi = unit_vector(n);
            for (idx, &t) in grid.iter().enumerate() {
                if idx > 0 {
                    psi = &step * &psi;
                }
                let mut pops: Vec<f64> = psi.iter().map(|z| z.norm_sqr()).collect();
                if sink {
                    pops.push(1.0 - pops.iter().sum::<f64>());
                }
                series.push(TimeSample {
                    time: t,
                    populations: pops,
                });
            }
            final_target = if sink {
                sink_population_at(&h_eff, config.horizon_t)?
            } else {
                series.last().unwrap().populations[n - 1]
            };
        }
    }
    let target_idx = if sink { n } else { n - 1 };
    let grid_max = series
        .iter()
        .map(|s| s.populations[target_idx])
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(TransferResult {
        mode: config.target_mode(),
        target_population_final: final_target,
        target_population_max: grid_max.max(final_target),
        time_series: series,
    })
}

fn unit_vector(n: usize) -> DVector<Complex64> {
    let mut psi = DVector::from_element(n, Complex64::new(0.0, 0.0));
    psi[0] = Complex64::new(1.0, 0.0);
    psi
}

fn sink_population_at(h_eff: &nalgebra::DMatrix<Complex64>, t: f64) -> Result<f64> {
    let u = expm(&(h_eff * Complex64::new(0.0, -t)))?;
    // ψ(t) = U e_A is U's first column.
    let norm: f64 = u.column(0).iter().map(|z| z.norm_sqr()).sum();
    Ok(1.0 - norm)
}

/// Only the figure of merit, computed as cheaply as the mode allows: a single
/// propagation to T in sink mode, a stepped sweep of the grid otherwise.
pub fn transfer_value(geometry: &ChainGeometry, config: &PhysicalConfig, backend: Backend) -> Result<f64> {
    match (config.target_mode(), backend) {
        (TargetMode::SinkFinal, Backend::Amplitude) => {
            let h = build_hamiltonian(geometry, config)?;
            sink_population_at(&effective_hamiltonian(&h, config), config.horizon_t)
        }
        (TargetMode::SinkFinal, Backend::Superoperator) => {
            let h = build_hamiltonian(geometry, config)?;
            let g = build_liouvillian(&h, config)?;
            let full = expm(&(&g.matrix * Complex64::new(config.horizon_t, 0.0)))?;
            Ok(population(&(full * initial_state(g.dim)), g.dim, g.sites))
        }
        (TargetMode::UnitaryMax, _) => Ok(evaluate_transfer_with(geometry, config, backend)?.target_population_max),
    }
}
