//! Check verdicts and validation reports.

use serde::{Serialize, Serializer};

/// Verdict of a single check.
#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    Pass,
    Fail,
    Skipped(String),
}

impl Serialize for Verdict {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Verdict::Pass => s.serialize_str("PASS"),
            Verdict::Fail => s.serialize_str("FAIL"),
            Verdict::Skipped(reason) => s.serialize_str(&format!("SKIPPED({reason})")),
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Pass => write!(f, "PASS"),
            Verdict::Fail => write!(f, "FAIL"),
            Verdict::Skipped(r) => write!(f, "SKIPPED({r})"),
        }
    }
}

/// One named check with its residual, the tolerance it was held to, and a witness on failure.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub verdict: Verdict,
    pub checked: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            verdict: Verdict::Pass,
            checked: 0,
            max_residual: None,
            tolerance: None,
            witness: None,
            note: None,
        }
    }

    pub fn skipped(name: impl Into<String>, reason: impl Into<String>) -> Self {
        let mut c = Self::new(name);
        c.verdict = Verdict::Skipped(reason.into());
        c
    }

    /// A residual check against `tolerance`; residuals above it fail.
    pub fn residual(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        let mut c = Self::new(name);
        c.checked = 1;
        c.max_residual = Some(residual);
        c.tolerance = Some(tolerance);
        if !(residual <= tolerance) {
            c.verdict = Verdict::Fail;
        }
        c
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = Some(tol);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// Records one evaluated instance; the first failing instance becomes the witness.
    pub fn record(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok && self.verdict == Verdict::Pass {
            self.verdict = Verdict::Fail;
            self.witness = Some(witness());
        }
    }

    /// Records a residual; fails (with witness) when it exceeds the tolerance.
    pub fn record_residual(&mut self, residual: f64, witness: impl FnOnce() -> String) {
        let tol = self.tolerance.unwrap_or(0.0);
        let worst = self.max_residual.map_or(residual, |m| m.max(residual));
        self.max_residual = Some(if residual.is_nan() { f64::NAN } else { worst });
        self.record(residual <= tol, witness);
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn failed(&self) -> bool {
        self.verdict == Verdict::Fail
    }
}

/// A list of checks about one subject.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub subject: String,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn new(subject: impl Into<String>) -> Self {
        Self {
            subject: subject.into(),
            checks: Vec::new(),
        }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, other: ValidationReport) {
        self.checks.extend(other.checks);
    }

    /// No check failed (skipped checks do not count as failures).
    pub fn passed(&self) -> bool {
        !self.checks.iter().any(Check::failed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.failed())
    }

    pub fn max_residual(&self, name: &str) -> Option<f64> {
        self.get(name).and_then(|c| c.max_residual)
    }
}
