use serde::{Deserialize, Serialize};

/// Sample statistics of a set of transfer values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleStats {
    pub mean: f64,
    /// Standard error of the mean (sample standard deviation / sqrt(n)); 0 for n = 1.
    pub stderr: f64,
    pub min: f64,
    pub max: f64,
    pub samples: usize,
}

impl SampleStats {
    /// Statistics of `values` accumulated in slice order.
    ///
    /// Panics on an empty slice.
    pub fn from_values(values: &[f64]) -> Self {
        assert!(!values.is_empty(), "statistics of an empty sample");
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let stderr = if n > 1 {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        } else {
            0.0
        };
        let (min, max) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
        SampleStats {
            mean,
            stderr,
            min,
            max,
            samples: n,
        }
    }

    /// Monte-Carlo comparison tolerance: `max(floor, 3 * stderr)`.
    pub fn tolerance(&self, floor: f64) -> f64 {
        floor.max(3.0 * self.stderr)
    }
}
