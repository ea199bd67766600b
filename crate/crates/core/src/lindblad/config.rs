use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Normalisation of the sink dissipator built from `L = √Γ |S⟩⟨B|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SinkConvention {
    /// `L ρ L† − ½{L†L, ρ}`: population leaves B at rate Γ.
    Standard,
    /// `2 L ρ L† − {L†L, ρ}`: population leaves B at rate 2Γ. This is the
    /// normalisation under which the reported two-site baselines
    /// (p_sink ≈ 0.005 at J = 0.05, ≈ 0.86 at J = 1) are recovered.
    #[default]
    Doubled,
}

impl SinkConvention {
    fn factor(self) -> f64 {
        match self {
            SinkConvention::Standard => 1.0,
            SinkConvention::Doubled => 2.0,
        }
    }
}

/// Which population counts as "transferred".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetMode {
    /// Sink population at the horizon, `p_sink(T)`.
    SinkFinal,
    /// Maximum population of the right-most site over the sampled time grid.
    UnitaryMax,
}

/// Physical constants of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PhysicalConfig {
    /// Site energy ΔE.
    pub delta_e: f64,
    /// Dipolar coupling constant J.
    pub coupling_j: f64,
    /// Sink damping Γ.
    pub gamma_sink: f64,
    /// Evolution horizon T.
    pub horizon_t: f64,
    /// Distance between the endpoints A and B.
    pub d_ab: f64,
    pub n_cells: usize,
    /// Number of equal intervals of the sampling grid on [0, T]; the grid has
    /// `n_time_samples + 1` points including both ends.
    pub n_time_samples: usize,
    pub sink_enabled: bool,
    pub sink_convention: SinkConvention,
}

impl Default for PhysicalConfig {
    fn default() -> Self {
        PhysicalConfig {
            delta_e: 1.0,
            coupling_j: 0.05,
            gamma_sink: 5.0,
            horizon_t: 5.0,
            d_ab: 1.0,
            n_cells: 21,
            n_time_samples: 20,
            sink_enabled: true,
            sink_convention: SinkConvention::default(),
        }
    }
}

impl PhysicalConfig {
    /// Default constants with the sink removed (purely unitary dynamics).
    pub fn unitary() -> Self {
        PhysicalConfig {
            sink_enabled: false,
            ..Default::default()
        }
    }

    pub fn with_cells(mut self, n_cells: usize) -> Self {
        self.n_cells = n_cells;
        self
    }

    pub fn with_coupling(mut self, coupling_j: f64) -> Self {
        self.coupling_j = coupling_j;
        self
    }

    pub fn with_mode(mut self, mode: TargetMode) -> Self {
        self.sink_enabled = mode == TargetMode::SinkFinal;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let checks: [(bool, &str); 7] = [
            (self.delta_e > 0.0, "delta_e must be > 0"),
            (self.coupling_j > 0.0, "coupling_j must be > 0"),
            (self.gamma_sink >= 0.0, "gamma_sink must be >= 0"),
            (self.horizon_t > 0.0, "horizon_t must be > 0"),
            (self.d_ab > 0.0, "d_ab must be > 0"),
            (self.n_cells >= 2, "n_cells must be >= 2"),
            (self.n_time_samples >= 2, "n_time_samples must be >= 2"),
        ];
        for (ok, msg) in checks {
            if !ok {
                return Err(Error::InvalidConfig(msg.to_string()));
            }
        }
        let all_finite = [
            self.delta_e,
            self.coupling_j,
            self.gamma_sink,
            self.horizon_t,
            self.d_ab,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::InvalidConfig("physical constants must be finite".into()));
        }
        Ok(())
    }

    pub fn target_mode(&self) -> TargetMode {
        if self.sink_enabled {
            TargetMode::SinkFinal
        } else {
            TargetMode::UnitaryMax
        }
    }

    /// Spacing between adjacent cell centres, `d_AB / (N_cells − 1)`.
    pub fn cell_spacing(&self) -> f64 {
        self.d_ab / (self.n_cells - 1) as f64
    }

    /// Coordinate of the centre of `cell`.
    pub fn cell_position(&self, cell: usize) -> f64 {
        if cell + 1 == self.n_cells {
            self.d_ab
        } else {
            cell as f64 * self.cell_spacing()
        }
    }

    /// Rate at which population leaves B towards the sink.
    pub fn sink_rate(&self) -> f64 {
        self.gamma_sink * self.sink_convention.factor()
    }

    /// Sampling grid `t_k = k T / n_T`, `k = 0..=n_T`.
    pub fn time_grid(&self) -> Vec<f64> {
        let n = self.n_time_samples;
        (0..=n)
            .map(|k| {
                if k == n {
                    self.horizon_t
                } else {
                    self.horizon_t * k as f64 / n as f64
                }
            })
            .collect()
    }
}
