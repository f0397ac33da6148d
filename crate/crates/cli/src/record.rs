//! Run records: measured values next to their theoretical counterparts.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// How a measured value is compared with its theoretical value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `|measured - theory| ≤ tolerance`
    Near,
    /// `measured ≤ theory + tolerance`
    AtMost,
    /// `measured ≥ theory - tolerance`
    AtLeast,
    /// `measured < theory`
    Below,
    /// `measured > theory`
    Above,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub theory: f64,
    pub tolerance: f64,
    pub relation: Relation,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, measured: f64, theory: f64, tolerance: f64, relation: Relation) -> Self {
        let mut c = Self {
            name: name.into(),
            measured,
            theory,
            tolerance,
            relation,
            pass: false,
        };
        c.pass = c.evaluate();
        c
    }

    pub fn near(name: impl Into<String>, measured: f64, theory: f64, tolerance: f64) -> Self {
        Self::new(name, measured, theory, tolerance, Relation::Near)
    }

    pub fn at_most(name: impl Into<String>, measured: f64, bound: f64, tolerance: f64) -> Self {
        Self::new(name, measured, bound, tolerance, Relation::AtMost)
    }

    pub fn at_least(name: impl Into<String>, measured: f64, bound: f64, tolerance: f64) -> Self {
        Self::new(name, measured, bound, tolerance, Relation::AtLeast)
    }

    pub fn flag(name: impl Into<String>, ok: bool) -> Self {
        Self::near(name, if ok { 1.0 } else { 0.0 }, 1.0, 0.0)
    }

    /// Recomputes the verdict from the stored numbers; NaN never passes.
    pub fn evaluate(&self) -> bool {
        let (m, t, tol) = (self.measured, self.theory, self.tolerance);
        match self.relation {
            Relation::Near => (m - t).abs() <= tol,
            Relation::AtMost => m <= t + tol,
            Relation::AtLeast => m >= t - tol,
            Relation::Below => m < t,
            Relation::Above => m > t,
        }
    }
}

/// Result of one experiment run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub experiment: String,
    pub config_hash: String,
    pub seed: u64,
    pub started_unix: f64,
    pub finished_unix: f64,
    /// Experiment-specific measurements.
    pub payload: serde_json::Value,
    pub checks: Vec<Check>,
    pub files: Vec<String>,
    pub pass: bool,
}

impl RunRecord {
    /// Verdict from the stored checks alone.
    pub fn recompute_pass(&self) -> bool {
        self.checks.iter().all(Check::evaluate)
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.evaluate())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relations() {
        assert!(Check::near("a", 0.74, 0.75, 0.05).pass);
        assert!(!Check::near("a", 0.55, 0.5, 0.02).pass);
        assert!(Check::at_most("b", 1e-11, 0.0, 1e-10).pass);
        assert!(!Check::at_least("c", 0.2, 0.25, 0.0125).pass);
        assert!(Check::new("d", -1.0, 0.0, 0.0, Relation::Below).pass);
        assert!(!Check::new("e", 0.0, 0.0, 0.0, Relation::Above).pass);
        assert!(!Check::near("nan", f64::NAN, 0.0, 1.0).pass);
    }
}
