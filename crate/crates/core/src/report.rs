//! Check records shared by the verification suites and the CLI.

use std::collections::BTreeMap;

/// Outcome of one numerical check.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckReport {
    pub check_id: String,
    pub params: BTreeMap<String, String>,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub notes: String,
    /// Warning-class checks always pass and never affect the exit status.
    pub warning: bool,
}

pub type Params = BTreeMap<String, String>;

pub fn params<const N: usize>(entries: [(&str, String); N]) -> Params {
    entries.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

impl CheckReport {
    /// `pass = residual ≤ tolerance`; NaN fails.
    pub fn gate(id: impl Into<String>, params: Params, residual: f64, tolerance: f64) -> Self {
        CheckReport {
            check_id: id.into(),
            params,
            residual,
            tolerance,
            pass: residual <= tolerance,
            notes: String::new(),
            warning: false,
        }
    }

    /// Negative control: passes when `value` exceeds `threshold`. Stored as
    /// the ratio `threshold / value` against tolerance 1.
    pub fn exceeds(id: impl Into<String>, params: Params, value: f64, threshold: f64) -> Self {
        let ratio = if value > 0.0 { threshold / value } else { f64::INFINITY };
        CheckReport::gate(id, params, ratio, 1.0)
            .with_notes(format!("negative control: perturbed residual {value:.3e} must exceed {threshold:.0e}"))
    }

    pub fn warning(id: impl Into<String>, params: Params, residual: f64, tolerance: f64, notes: String) -> Self {
        CheckReport {
            check_id: id.into(),
            params,
            residual,
            tolerance,
            pass: true,
            notes,
            warning: true,
        }
    }

    /// Failed check standing in for a computation that raised an error.
    pub fn error(id: impl Into<String>, params: Params, err: impl std::fmt::Display) -> Self {
        CheckReport {
            check_id: id.into(),
            params,
            residual: f64::INFINITY,
            tolerance: 0.0,
            pass: false,
            notes: format!("error: {err}"),
            warning: false,
        }
    }

    pub fn with_notes(mut self, notes: impl Into<String>) -> Self {
        self.notes = notes.into();
        self
    }
}

/// Selection among competing readings of a formula: each candidate is
/// scored by a residual and the reading is resolved when exactly one
/// candidate meets the gate.
#[derive(Clone, Debug)]
pub struct Adjudication {
    pub id: String,
    pub candidates: Vec<(String, f64)>,
    pub tolerance: f64,
}

impl Adjudication {
    pub fn new(id: impl Into<String>, tolerance: f64) -> Self {
        Adjudication { id: id.into(), candidates: Vec::new(), tolerance }
    }

    pub fn candidate(mut self, name: impl Into<String>, residual: f64) -> Self {
        self.candidates.push((name.into(), residual));
        self
    }

    pub fn passing(&self) -> Vec<&str> {
        self.candidates
            .iter()
            .filter(|(_, r)| *r <= self.tolerance)
            .map(|(n, _)| n.as_str())
            .collect()
    }

    pub fn resolved(&self) -> Option<&str> {
        match self.passing().as_slice() {
            [one] => Some(one),
            _ => None,
        }
    }

    /// A resolved adjudication is warning-class; zero or several passing
    /// candidates is a failure.
    pub fn to_report(&self, params: Params) -> CheckReport {
        let listing = self
            .candidates
            .iter()
            .map(|(n, r)| format!("{n}: {r:.3e}"))
            .collect::<Vec<_>>()
            .join("; ");
        match self.resolved() {
            Some(name) => {
                let r = self.candidates.iter().find(|c| c.0 == name).map_or(f64::NAN, |c| c.1);
                CheckReport::warning(
                    self.id.clone(),
                    params,
                    r,
                    self.tolerance,
                    format!("resolved: {name} | {listing}"),
                )
            }
            None => {
                let best = self.candidates.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
                let n = self.passing().len();
                CheckReport::gate(self.id.clone(), params, best, self.tolerance)
                    .with_notes(format!("ambiguous: {n} candidates pass | {listing}"))
                    .failed()
            }
        }
    }
}

impl CheckReport {
    fn failed(mut self) -> Self {
        self.pass = false;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gate_semantics() {
        let p = params([("q", "0.5".into())]);
        assert!(CheckReport::gate("a", p.clone(), 1e-12, 1e-10).pass);
        assert!(!CheckReport::gate("a", p.clone(), f64::NAN, 1e-10).pass);
        assert!(CheckReport::exceeds("b", p.clone(), 0.1, 1e-3).pass);
        assert!(!CheckReport::exceeds("b", p, 1e-5, 1e-3).pass);
    }

    #[test]
    fn adjudication_outcomes() {
        let a = Adjudication::new("x", 1e-10).candidate("one", 1e-3).candidate("two", 1e-14);
        assert_eq!(a.resolved(), Some("two"));
        let r = a.to_report(Params::new());
        assert!(r.pass && r.warning && r.notes.starts_with("resolved: two"));
        let b = Adjudication::new("x", 1e-10).candidate("one", 0.0).candidate("two", 0.0);
        assert!(!b.to_report(Params::new()).pass);
        let c = Adjudication::new("x", 1e-10).candidate("one", 1.0);
        assert!(!c.to_report(Params::new()).pass);
    }
}
