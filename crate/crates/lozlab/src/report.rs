//! Suite reports: a named list of checks, each carrying its inputs, the
//! expected and observed values as decimal strings, the tolerance, and a
//! pass flag. Serialization is deterministic for a fixed seed except for
//! the wall-clock field.

use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

use crate::error::invalid;
use crate::Result;

#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub inputs: Value,
    pub expected: String,
    pub observed: String,
    pub tol: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<CheckRecord>,
    /// True exactly when every check passed.
    pub pass: bool,
    pub wall_ms: u64,
}

impl SuiteReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports are plain data")
    }

    pub fn failed_names(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect()
    }

    /// Join per-seed reports of one suite into a single report; check
    /// names gain a `s<seed>:` prefix so the provenance stays visible.
    pub fn join(suite: &str, reports: &[SuiteReport]) -> Result<SuiteReport> {
        if reports.is_empty() {
            return Err(invalid("nothing to join"));
        }
        let mut checks = Vec::new();
        for r in reports {
            for c in &r.checks {
                let mut c = c.clone();
                c.name = format!("s{}:{}", r.seed, c.name);
                checks.push(c);
            }
        }
        let pass = checks.iter().all(|c| c.pass);
        Ok(SuiteReport {
            suite: suite.to_string(),
            seed: reports[0].seed,
            checks,
            pass,
            wall_ms: reports.iter().map(|r| r.wall_ms).sum(),
        })
    }
}

/// Accumulates checks and stamps the wall time on finish.
pub struct SuiteBuilder {
    suite: String,
    seed: u64,
    checks: Vec<CheckRecord>,
    started: Instant,
}

impl SuiteBuilder {
    pub fn new(suite: &str, seed: u64) -> SuiteBuilder {
        SuiteBuilder {
            suite: suite.to_string(),
            seed,
            checks: Vec::new(),
            started: Instant::now(),
        }
    }

    pub fn record(
        &mut self,
        name: &str,
        inputs: Value,
        expected: impl ToString,
        observed: impl ToString,
        tol: f64,
        pass: bool,
    ) {
        self.checks.push(CheckRecord {
            name: name.to_string(),
            inputs,
            expected: expected.to_string(),
            observed: observed.to_string(),
            tol,
            pass,
        });
    }

    /// Pass iff |observed| <= tol.
    pub fn check_within(&mut self, name: &str, inputs: Value, observed: f64, tol: f64) {
        self.record(
            name,
            inputs,
            format!("|.| <= {tol}"),
            format!("{observed}"),
            tol,
            observed.abs() <= tol,
        );
    }

    /// Pass iff the two strings are identical (exact values).
    pub fn check_exact(&mut self, name: &str, inputs: Value, expected: &str, observed: &str) {
        self.record(name, inputs, expected, observed, 0.0, expected == observed);
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn finish(self) -> SuiteReport {
        let pass = self.checks.iter().all(|c| c.pass);
        SuiteReport {
            suite: self.suite,
            seed: self.seed,
            checks: self.checks,
            pass,
            wall_ms: self.started.elapsed().as_millis() as u64,
        }
    }
}
