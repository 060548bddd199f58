use std::collections::BTreeMap;
use std::time::Instant;

use nalgebra::DMatrix;
use serde::Serialize;
use serde_json::Value;

#[derive(Serialize, Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// JSON document emitted by every subcommand.
#[derive(Serialize, Clone, Debug)]
pub struct Report {
    pub command: String,
    pub inputs: Value,
    pub matrices: BTreeMap<String, Vec<Vec<f64>>>,
    pub checks: Vec<Check>,
    pub data: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<BTreeMap<String, f64>>,
    #[serde(skip)]
    tol_override: Option<f64>,
    #[serde(skip)]
    clock: Option<Instant>,
}

impl Report {
    pub fn new(command: &str, inputs: impl Serialize) -> Self {
        Self {
            command: command.to_string(),
            inputs: to_value(inputs),
            matrices: BTreeMap::new(),
            checks: Vec::new(),
            data: BTreeMap::new(),
            timings_ms: None,
            tol_override: None,
            clock: None,
        }
    }

    /// Every later check uses `tol` instead of its built-in tolerance.
    pub fn with_tol_override(mut self, tol: Option<f64>) -> Self {
        self.tol_override = tol;
        self
    }

    /// Records wall-clock time per phase. Off by default so reports stay byte-identical.
    pub fn with_timings(mut self, on: bool) -> Self {
        if on {
            self.timings_ms = Some(BTreeMap::new());
            self.clock = Some(Instant::now());
        }
        self
    }

    /// Closes the current phase under `name`.
    pub fn phase(&mut self, name: &str) {
        if let (Some(t), Some(clock)) = (self.timings_ms.as_mut(), self.clock.as_mut()) {
            t.insert(name.to_string(), clock.elapsed().as_secs_f64() * 1e3);
            *clock = Instant::now();
        }
    }

    pub fn check(&mut self, name: impl Into<String>, residual: f64, tolerance: f64) -> bool {
        let tolerance = self.tol_override.unwrap_or(tolerance);
        let pass = residual <= tolerance;
        self.checks.push(Check { name: name.into(), residual, tolerance, pass });
        pass
    }

    /// A boolean condition recorded as residual 0 or 1 against tolerance 0.
    pub fn check_flag(&mut self, name: impl Into<String>, ok: bool) -> bool {
        self.checks.push(Check { name: name.into(), residual: if ok { 0.0 } else { 1.0 }, tolerance: 0.0, pass: ok });
        ok
    }

    pub fn matrix(&mut self, name: &str, m: &DMatrix<f64>) {
        let rows = (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect();
        self.matrices.insert(name.to_string(), rows);
    }

    pub fn matrix2(&mut self, name: &str, m: &[[f64; 2]; 2]) {
        self.matrices.insert(name.to_string(), m.iter().map(|r| r.to_vec()).collect());
    }

    pub fn data(&mut self, key: &str, value: impl Serialize) {
        self.data.insert(key.to_string(), to_value(value));
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn find(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("value serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_iff_within_tolerance() {
        let mut r = Report::new("t", ());
        assert!(r.check("a", 1e-12, 1e-10));
        assert!(!r.check("b", 1e-9, 1e-10));
        assert!(!r.check("nan", f64::NAN, 1.0));
        assert!(!r.passed());
        assert_eq!(r.failed_checks().count(), 2);
        for c in &r.checks {
            assert_eq!(c.pass, c.residual <= c.tolerance);
        }
    }

    #[test]
    fn override_replaces_tolerance() {
        let mut r = Report::new("t", ()).with_tol_override(Some(1e-3));
        assert!(r.check("a", 1e-5, 1e-10));
        assert_eq!(r.checks[0].tolerance, 1e-3);
    }

    #[test]
    fn timings_are_opt_in() {
        let mut r = Report::new("t", ());
        r.phase("x");
        assert!(!r.to_json().contains("timings_ms"));
        let mut r = Report::new("t", ()).with_timings(true);
        r.phase("x");
        assert!(r.to_json().contains("timings_ms"));
    }
}
