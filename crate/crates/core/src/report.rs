//! Machine-readable check reports: `{check, parameters, counts, violations, max_deviation}`.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

/// Violations beyond this many are counted but not listed.
pub const MAX_LISTED_VIOLATIONS: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub parameters: BTreeMap<String, Value>,
    pub counts: BTreeMap<String, u64>,
    pub violations: Vec<Value>,
    pub max_deviation: Option<f64>,
}

impl CheckReport {
    pub fn new(check: &str) -> Self {
        Self {
            check: check.to_string(),
            parameters: BTreeMap::new(),
            counts: BTreeMap::new(),
            violations: Vec::new(),
            max_deviation: None,
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.parameters.insert(key.to_string(), value.into());
        self
    }

    pub fn count(&mut self, key: &str, by: u64) {
        *self.counts.entry(key.to_string()).or_insert(0) += by;
    }

    pub fn get_count(&self, key: &str) -> u64 {
        self.counts.get(key).copied().unwrap_or(0)
    }

    /// Records a violation; the total lives in `counts["violations"]`.
    pub fn violation(&mut self, witness: Value) {
        self.count("violations", 1);
        if self.violations.len() < MAX_LISTED_VIOLATIONS {
            self.violations.push(witness);
        }
    }

    pub fn deviation(&mut self, value: f64) {
        let current = self.max_deviation.unwrap_or(0.0);
        self.max_deviation = Some(if value.is_nan() { f64::NAN } else { current.max(value) });
    }

    pub fn passed(&self) -> bool {
        self.get_count("violations") == 0
    }

    pub fn summary(&self) -> String {
        let counts: Vec<String> = self.counts.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let dev = self
            .max_deviation
            .map(|d| format!(" max_deviation={d:.3e}"))
            .unwrap_or_default();
        format!(
            "{:<28} {}  {}{}",
            self.check,
            if self.passed() { "PASS" } else { "FAIL" },
            counts.join(" "),
            dev
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn violations_are_capped_but_counted() {
        let mut r = CheckReport::new("demo");
        for i in 0..(MAX_LISTED_VIOLATIONS + 5) {
            r.violation(json!(i));
        }
        assert_eq!(r.violations.len(), MAX_LISTED_VIOLATIONS);
        assert_eq!(r.get_count("violations"), (MAX_LISTED_VIOLATIONS + 5) as u64);
        assert!(!r.passed());
    }

    #[test]
    fn serializes_with_stable_field_order() {
        let mut r = CheckReport::new("demo").param("b", 2).param("a", 1);
        r.count("checked", 3);
        r.deviation(1e-13);
        let text = serde_json::to_string(&r).unwrap();
        assert_eq!(
            text,
            r#"{"check":"demo","parameters":{"a":1,"b":2},"counts":{"checked":3},"violations":[],"max_deviation":1e-13}"#
        );
    }
}
