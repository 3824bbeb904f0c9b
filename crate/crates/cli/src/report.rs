//! Versioned JSON report shared by every subcommand.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

pub const SCHEMA: &str = "dressage-report-1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Comparison {
    /// Pass when `measured <= tolerance`.
    Le,
    /// Pass when `measured >= tolerance`.
    Ge,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub pass: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            tolerance,
            comparison: Comparison::Le,
            pass: measured <= tolerance,
        }
    }

    pub fn at_least(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            tolerance,
            comparison: Comparison::Ge,
            pass: measured >= tolerance,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: String,
    pub config: Value,
    pub checks: Vec<Check>,
    pub values: BTreeMap<String, Value>,
    pub pass: bool,
    /// Wall-clock time of the run; the only field that differs between identical runs.
    pub timestamp: String,
}

impl Report {
    pub fn new(command: &str, config: Value) -> Self {
        Self {
            schema: SCHEMA,
            command: command.to_string(),
            config,
            checks: Vec::new(),
            values: BTreeMap::new(),
            pass: true,
            timestamp: String::new(),
        }
    }

    pub fn check(&mut self, check: Check) {
        self.pass &= check.pass;
        self.checks.push(check);
    }

    pub fn value(&mut self, key: &str, value: impl Serialize) {
        self.values.insert(
            key.to_string(),
            serde_json::to_value(value).expect("serializable value"),
        );
    }

    pub fn stamp(&mut self) {
        let secs = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        self.timestamp = format!("unix:{secs}");
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// One line per check.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let op = match c.comparison {
                Comparison::Le => "<=",
                Comparison::Ge => ">=",
            };
            out.push_str(&format!(
                "[{}] {}: {:.3e} {op} {:.3e}\n",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.measured,
                c.tolerance
            ));
        }
        out.push_str(&format!(
            "overall: {}\n",
            if self.pass { "PASS" } else { "FAIL" }
        ));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overall_pass_tracks_checks() {
        let mut r = Report::new("x", Value::Null);
        r.check(Check::at_most("a", 1e-12, 1e-10));
        assert!(r.pass);
        r.check(Check::at_least("b", 0.05, 0.1));
        assert!(!r.pass);
        assert!(r.summary().contains("[FAIL] b"));
    }

    #[test]
    fn nan_fails() {
        assert!(!Check::at_most("n", f64::NAN, 1.0).pass);
        assert!(!Check::at_least("n", f64::NAN, 1.0).pass);
    }

    #[test]
    fn schema_id_present() {
        let json = Report::new("x", Value::Null).to_json();
        assert!(json.contains("\"schema\": \"dressage-report-1\""));
    }
}
