//! Composite identity checks and the seeded suite runner behind `cr-mobius verify`.

mod identities;
pub mod random;
mod suite;

use serde::{Deserialize, Serialize};

pub use identities::{
    bochner_residual, bochner_sides, graham_lee_residual, hamiltonian_check, torsion_rank_check, BochnerSides,
};
pub use suite::{run_suite, SuiteError, ModelSpec, Report, SuiteConfig, SuiteSelection, CHECKS, SUITES};

/// Worst residual of one named check over all evaluated points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub worst_point: Vec<f64>,
    /// Whether a failure of this check fails the run.
    #[serde(default = "yes")]
    pub asserted: bool,
}

fn yes() -> bool {
    true
}

/// Named residuals in insertion order. Non-finite values never pass.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ResidualSet {
    pub checks: Vec<CheckResult>,
}

impl ResidualSet {
    /// Folds `value` at `point` into the check `name`, creating it on first use.
    pub fn record(&mut self, name: &str, value: f64, point: &[f64], tolerance: f64, asserted: bool) {
        let value = if value.is_nan() { f64::INFINITY } else { value };
        match self.checks.iter_mut().find(|c| c.name == name) {
            Some(c) => {
                if value > c.max_residual {
                    c.max_residual = value;
                    c.worst_point = point.to_vec();
                }
                c.pass = c.max_residual < c.tolerance;
            }
            None => self.checks.push(CheckResult {
                name: name.to_string(),
                max_residual: value,
                tolerance,
                pass: value < tolerance,
                worst_point: point.to_vec(),
                asserted,
            }),
        }
    }

    pub fn get(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn extend(&mut self, other: ResidualSet) {
        self.checks.extend(other.checks);
    }

    /// True when every asserted check passes.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass || !c.asserted)
    }

    pub fn set_tolerance(&mut self, name: &str, tolerance: f64) {
        for c in self.checks.iter_mut().filter(|c| c.name == name) {
            c.tolerance = tolerance;
            c.pass = c.max_residual < tolerance;
        }
    }
}
