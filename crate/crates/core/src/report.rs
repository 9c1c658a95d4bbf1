use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

/// Verdict of a decision procedure together with its evidence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub passed: bool,
    pub detail: String,
    pub witness: BTreeMap<String, String>,
}

impl CheckReport {
    pub fn pass(check: impl Into<String>, detail: impl Into<String>) -> Self {
        CheckReport { check: check.into(), passed: true, detail: detail.into(), witness: BTreeMap::new() }
    }

    pub fn fail(check: impl Into<String>, detail: impl Into<String>) -> Self {
        CheckReport { check: check.into(), passed: false, detail: detail.into(), witness: BTreeMap::new() }
    }

    pub fn verdict(check: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        CheckReport { check: check.into(), passed, detail: detail.into(), witness: BTreeMap::new() }
    }

    pub fn with(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.witness.insert(key.into(), value.to_string());
        self
    }

    /// First failing report of `reports`, or a pass named `check`.
    pub fn all(check: impl Into<String>, reports: impl IntoIterator<Item = CheckReport>) -> Self {
        let check = check.into();
        for r in reports {
            if !r.passed {
                let mut out = CheckReport::fail(check, format!("{}: {}", r.check, r.detail));
                out.witness = r.witness;
                return out;
            }
        }
        CheckReport::pass(check, "all conditions hold")
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}: {}", self.check, self.detail)?;
        for (k, v) in &self.witness {
            write!(f, "\n  {k} = {v}")?;
        }
        Ok(())
    }
}
