//! Outcomes of numerical checks.

use serde::{Deserialize, Serialize};

/// One named check: the worst residual seen and the bound it was held to.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub residual: f64,
    pub tolerance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    /// Passes iff `residual ≤ tolerance` (NaN fails).
    pub fn at_most(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            passed: residual <= tolerance,
            residual,
            tolerance,
            detail: None,
        }
    }

    /// Passes iff `residual > threshold`; used for documented negative cases.
    pub fn at_least(name: impl Into<String>, residual: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            passed: residual > threshold,
            residual,
            tolerance: threshold,
            detail: None,
        }
    }

    /// A boolean condition with no meaningful residual.
    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self {
            name: name.into(),
            passed: ok,
            residual: if ok { 0.0 } else { 1.0 },
            tolerance: 0.0,
            detail: None,
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }

    pub fn status(&self) -> &'static str {
        if self.passed {
            "pass"
        } else {
            "fail"
        }
    }
}

/// Running maximum that remembers where it was attained.
#[derive(Clone, Debug, Default)]
pub struct Worst {
    pub value: f64,
    pub at: Option<String>,
}

impl Worst {
    pub fn update(&mut self, value: f64, at: impl FnOnce() -> String) {
        if value > self.value || value.is_nan() {
            self.value = value;
            self.at = Some(at());
        }
    }

    pub fn into_check(self, name: &str, tolerance: f64) -> Check {
        let check = Check::at_most(name, self.value, tolerance);
        match self.at {
            Some(at) => check.with_detail(format!("worst at {at}")),
            None => check,
        }
    }
}
