//! Verification reports: named checks with residuals and thresholds.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl Check {
    /// Passes when `residual <= threshold`.
    pub fn at_most(name: impl Into<String>, residual: f64, threshold: f64) -> Self {
        Self::with_pass(name, residual, threshold, residual <= threshold)
    }

    /// Integer equality; the residual counts mismatches.
    pub fn mismatches(name: impl Into<String>, count: usize) -> Self {
        Self::at_most(name, count as f64, 0.0)
    }

    /// Explicit verdict. Non-finite residuals are clamped to `f64::MAX` and fail.
    pub fn with_pass(name: impl Into<String>, residual: f64, threshold: f64, pass: bool) -> Self {
        let finite = residual.is_finite();
        Self {
            name: name.into(),
            residual: if finite { residual } else { f64::MAX },
            threshold,
            pass: pass && finite,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub checks: Vec<Check>,
    pub pass: bool,
    pub duration_ms: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<serde_json::Value>,
}

impl Report {
    /// Sorts checks by name; overall pass iff every check passes.
    pub fn new(command: impl Into<String>, mut checks: Vec<Check>, data: Option<serde_json::Value>) -> Self {
        checks.sort_by(|a, b| a.name.cmp(&b.name));
        let pass = checks.iter().all(|c| c.pass);
        Self {
            command: command.into(),
            checks,
            pass,
            duration_ms: 0.0,
            data,
        }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Copy with the timing zeroed, for content comparisons.
    pub fn without_duration(&self) -> Self {
        Self {
            duration_ms: 0.0,
            ..self.clone()
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is finite")
    }
}
