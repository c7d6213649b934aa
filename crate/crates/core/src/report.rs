//! JSON verification reports. Reports carry the seed but no timestamp, so
//! the same configuration always serializes to the same bytes.

use serde::Serialize;

use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub bound: f64,
}

impl Check {
    /// Passes when `value < bound`.
    pub fn below(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            passed: value < bound,
            value,
            bound,
        }
    }

    /// Passes when `value > bound`.
    pub fn above(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            passed: value > bound,
            value,
            bound,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub schema: u32,
    pub suite: String,
    pub algebra: String,
    pub seed: Option<u64>,
    pub samples: usize,
    pub passed: bool,
    pub max_residual: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_sample: Option<Vec<f64>>,
    /// Indices locating the worst case (e.g. a coordinate triple).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<usize>>,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn new(suite: &str, algebra: &str, seed: Option<u64>) -> Self {
        Self {
            schema: SCHEMA_VERSION,
            suite: suite.to_string(),
            algebra: algebra.to_string(),
            seed,
            samples: 0,
            passed: true,
            max_residual: 0.0,
            tolerance: 0.0,
            worst_sample: None,
            witness: None,
            checks: Vec::new(),
        }
    }

    pub fn push(&mut self, check: Check) {
        self.passed &= check.passed;
        self.checks.push(check);
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Converts a failing report into an error: `JacobiViolation` when a
    /// coordinate triple is attached, `VerificationFailed` otherwise.
    pub fn require(self) -> Result<Self> {
        if self.passed {
            return Ok(self);
        }
        if let Some([i, j, k]) = self.witness.as_deref() {
            return Err(Error::JacobiViolation {
                i: *i,
                j: *j,
                k: *k,
                residual: self.max_residual,
            });
        }
        let failed: Vec<String> = self
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| format!("{} = {:.3e} (bound {:.3e})", c.name, c.value, c.bound))
            .collect();
        let mut detail = failed.join("; ");
        if let Some(w) = &self.worst_sample {
            detail.push_str(&format!("; worst sample {w:?}"));
        }
        Err(Error::VerificationFailed {
            suite: self.suite,
            detail,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Running maximum that remembers the sample attaining it. Merging keeps the
/// earlier index on ties so parallel reductions stay deterministic.
#[derive(Clone, Debug)]
pub(crate) struct Worst {
    pub value: f64,
    pub index: usize,
    pub sample: Option<Vec<f64>>,
}

impl Default for Worst {
    fn default() -> Self {
        Self {
            value: 0.0,
            index: usize::MAX,
            sample: None,
        }
    }
}

impl Worst {
    pub fn of(value: f64, index: usize, sample: Vec<f64>) -> Self {
        Self {
            value,
            index,
            sample: Some(sample),
        }
    }

    pub fn merge(self, other: Self) -> Self {
        // NaN ranks above everything so failures cannot hide
        let rank = |w: &Worst| if w.value.is_nan() { f64::INFINITY } else { w.value };
        let (a, b) = (rank(&self), rank(&other));
        let take_other = b > a || (b == a && other.index < self.index);
        if take_other {
            other
        } else {
            self
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failing_check_fails_report() {
        let mut r = VerificationReport::new("x", "su(2)", Some(1));
        r.push(Check::below("a", 0.5, 1.0));
        assert!(r.passed);
        r.push(Check::below("b", 2.0, 1.0));
        assert!(!r.passed);
        assert!(matches!(r.require(), Err(Error::VerificationFailed { .. })));
    }

    #[test]
    fn worst_merge_is_order_independent() {
        let a = Worst::of(1.0, 3, vec![3.0]);
        let b = Worst::of(1.0, 1, vec![1.0]);
        let c = Worst::of(0.5, 0, vec![0.0]);
        let x = a.clone().merge(b.clone()).merge(c.clone());
        let y = c.merge(b).merge(a);
        assert_eq!(x.index, 1);
        assert_eq!(y.index, 1);
    }
}
