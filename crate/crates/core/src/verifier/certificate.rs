use std::collections::BTreeMap;

use rug::Rational;
use serde::{Deserialize, Serialize};

use super::grid::GridSpec;
use crate::real::{Interval, Mode};

pub const CERTIFICATE_SCHEMA_VERSION: u32 = 1;

/// One named step of a verification pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// A recorded quantity: an outward-rounded enclosure, plus the exact value
/// when one is known.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueRecord {
    pub lo: f64,
    pub hi: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
}

impl ValueRecord {
    pub fn enclosure(v: &Interval) -> Self {
        ValueRecord { lo: v.lo_f64(), hi: v.hi_f64(), exact: None }
    }

    pub fn exact(r: &Rational) -> Self {
        let v = Interval::from_rational(64, r);
        ValueRecord { lo: v.lo_f64(), hi: v.hi_f64(), exact: Some(r.to_string()) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub schema_version: u32,
    pub target: String,
    pub grid: Option<GridSpec>,
    pub cells_checked: u64,
    /// Lower bound on the smallest verified positive gap.
    pub min_margin: f64,
    pub mode: Mode,
    pub passed: bool,
    pub failures: Vec<u64>,
    pub premises: Vec<String>,
    pub stages: Vec<Stage>,
    pub values: BTreeMap<String, ValueRecord>,
}

impl Certificate {
    pub fn new(target: impl Into<String>, mode: Mode) -> Self {
        Certificate {
            schema_version: CERTIFICATE_SCHEMA_VERSION,
            target: target.into(),
            grid: None,
            cells_checked: 0,
            min_margin: f64::INFINITY,
            mode,
            passed: false,
            failures: Vec::new(),
            premises: Vec::new(),
            stages: Vec::new(),
            values: BTreeMap::new(),
        }
    }

    pub fn stage(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.stages.push(Stage { name: name.into(), passed, detail: detail.into() });
    }

    pub fn premise(&mut self, text: impl Into<String>) {
        self.premises.push(text.into());
    }

    pub fn record(&mut self, key: impl Into<String>, value: ValueRecord) {
        self.values.insert(key.into(), value);
    }

    pub fn observe_margin(&mut self, lower_bound: f64) {
        if lower_bound < self.min_margin {
            self.min_margin = lower_bound;
        }
    }

    /// Sets `passed` from the stages, the failures, the margin and the mode.
    /// Only certified runs can pass.
    pub fn finalize(mut self) -> Self {
        if !self.min_margin.is_finite() {
            self.min_margin = 0.0;
        }
        if self.mode != Mode::Certified {
            self.stage("mode", false, "fast arithmetic does not certify");
        }
        self.passed = self.mode == Mode::Certified
            && self.failures.is_empty()
            && self.min_margin > 0.0
            && self.stages.iter().all(|s| s.passed);
        self
    }

    pub fn failed_stages(&self) -> Vec<&str> {
        self.stages.iter().filter(|s| !s.passed).map(|s| s.name.as_str()).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_never_passes() {
        let mut c = Certificate::new("x", Mode::Fast);
        c.observe_margin(1.0);
        let c = c.finalize();
        assert!(!c.passed);
        assert_eq!(c.failed_stages(), vec!["mode"]);
    }

    #[test]
    fn certified_pass_needs_margin() {
        let c = Certificate::new("x", Mode::Certified).finalize();
        assert!(!c.passed);
        let mut c = Certificate::new("x", Mode::Certified);
        c.observe_margin(0.5);
        assert!(c.finalize().passed);
    }

    #[test]
    fn json_fields() {
        let mut c = Certificate::new("L2_9", Mode::Certified);
        c.record("j2_at_one", ValueRecord::exact(&Rational::from((208609, 55440))));
        let v: serde_json::Value = serde_json::from_str(&c.to_json()).unwrap();
        for key in ["schema_version", "target", "grid", "cells_checked", "min_margin", "mode", "passed", "failures", "premises"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["mode"], "certified");
        assert_eq!(v["values"]["j2_at_one"]["exact"], "208609/55440");
    }
}
