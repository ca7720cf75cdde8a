//! Structured axiom-violation reports shared by the validators.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    /// Which axiom failed, e.g. `"associativity"`.
    pub axiom: String,
    /// Size of the failure; 1 for discrete (table) axioms.
    pub deviation: f64,
    pub witness: Value,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    /// Extra localization data, e.g. the table entry implicated most often.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub localization: Option<Value>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn push(&mut self, axiom: &str, deviation: f64, witness: Value) {
        self.violations.push(Violation {
            axiom: axiom.to_string(),
            deviation,
            witness,
        });
    }

    pub fn has_axiom(&self, axiom: &str) -> bool {
        self.violations.iter().any(|v| v.axiom == axiom)
    }

    pub fn max_deviation(&self) -> f64 {
        self.violations
            .iter()
            .map(|v| v.deviation)
            .fold(0.0, f64::max)
    }

    pub fn first(&self) -> Option<&Violation> {
        self.violations.first()
    }

    pub fn extend(&mut self, other: ValidationReport) {
        self.violations.extend(other.violations);
        if self.localization.is_none() {
            self.localization = other.localization;
        }
    }
}

/// Counts how often each arrow pair takes part in a violated identity; a
/// single corrupted entry takes part in all of them.
#[derive(Debug, Default)]
pub(crate) struct Blame(BTreeMap<(usize, usize), usize>);

impl Blame {
    pub(crate) fn add(&mut self, pairs: &[(usize, usize)]) {
        for &p in pairs {
            *self.0.entry(p).or_default() += 1;
        }
    }

    /// The most implicated pair (ties go to the smallest pair) and its count.
    pub(crate) fn worst(&self) -> Option<((usize, usize), usize)> {
        self.0
            .iter()
            .max_by(|a, b| a.1.cmp(b.1).then_with(|| b.0.cmp(a.0)))
            .map(|(&p, &c)| (p, c))
    }
}
