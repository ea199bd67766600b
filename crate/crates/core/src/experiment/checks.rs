use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::stats::SampleStats;

/// A reported number, with its standard error for Monte-Carlo estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metric {
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stderr: Option<f64>,
}

impl From<f64> for Metric {
    fn from(value: f64) -> Self {
        Metric { value, stderr: None }
    }
}

impl From<SampleStats> for Metric {
    fn from(s: SampleStats) -> Self {
        Metric {
            value: s.mean,
            stderr: (s.samples > 1).then_some(s.stderr),
        }
    }
}

/// Numeric and textual results of a run, keyed by name.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub values: BTreeMap<String, Metric>,
    pub labels: BTreeMap<String, String>,
}

impl Metrics {
    pub fn set(&mut self, key: impl Into<String>, m: impl Into<Metric>) {
        self.values.insert(key.into(), m.into());
    }

    pub fn label(&mut self, key: impl Into<String>, v: impl Into<String>) {
        self.labels.insert(key.into(), v.into());
    }

    pub fn value(&self, key: &str) -> Option<f64> {
        self.values.get(key).map(|m| m.value)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Check {
    /// `|value − expected| ≤ tolerance`.
    Within { expected: f64, tolerance: f64 },
    /// `value > threshold`.
    Above { threshold: f64 },
    /// `value ≥ threshold`.
    AtLeast { threshold: f64 },
    /// `|value − expected| ≤ max(floor, 3·stderr)`.
    MonteCarlo { expected: f64, floor: f64 },
    /// Label equals `expected`.
    Equals { expected: String },
}

/// An expected outcome attached to a preset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expectation {
    pub metric: String,
    pub check: Check,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub note: String,
}

impl Expectation {
    pub fn new(metric: &str, check: Check) -> Self {
        Expectation {
            metric: metric.into(),
            check,
            note: String::new(),
        }
    }

    pub fn with_note(mut self, note: &str) -> Self {
        self.note = note.into();
        self
    }

    pub fn evaluate(&self, metrics: &Metrics) -> CheckResult {
        let (observed, passed, tolerance) = match &self.check {
            Check::Equals { expected } => {
                let got = metrics.labels.get(&self.metric).cloned();
                let passed = got.as_deref() == Some(expected.as_str());
                (got.map(serde_json::Value::String), passed, None)
            }
            check => match metrics.values.get(&self.metric) {
                None => (None, false, None),
                Some(m) => {
                    let v = m.value;
                    let (passed, tol) = match *check {
                        Check::Within { expected, tolerance } => ((v - expected).abs() <= tolerance, Some(tolerance)),
                        Check::Above { threshold } => (v > threshold, None),
                        Check::AtLeast { threshold } => (v >= threshold, None),
                        Check::MonteCarlo { expected, floor } => {
                            let tol = floor.max(3.0 * m.stderr.unwrap_or(0.0));
                            ((v - expected).abs() <= tol, Some(tol))
                        }
                        Check::Equals { .. } => unreachable!(),
                    };
                    (Some(serde_json::json!(v)), passed && v.is_finite(), tol)
                }
            },
        };
        CheckResult {
            metric: self.metric.clone(),
            check: self.check.clone(),
            observed,
            tolerance,
            passed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub metric: String,
    pub check: Check,
    /// `None` when the run did not produce the metric.
    pub observed: Option<serde_json::Value>,
    /// Tolerance actually applied, for tolerance-based checks.
    pub tolerance: Option<f64>,
    pub passed: bool,
}
