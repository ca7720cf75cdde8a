use serde_json::json;

use super::FiniteGroupoid;
use crate::validation::ValidationReport;
use crate::{Error, Result};

/// A left invariant Haar system on a finite groupoid: `λ^x` puts weight
/// `weights[g]` on each `g ∈ G^x`.
#[derive(Debug, Clone, PartialEq)]
pub struct HaarSystem {
    weights: Vec<f64>,
}

const INVARIANCE_RTOL: f64 = 1e-12;

impl HaarSystem {
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        if let Some((g, w)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !(w.is_finite() && **w > 0.0))
        {
            return Err(Error::invalid(format!(
                "Haar weight of arrow #{g} must be positive, got {w}"
            )));
        }
        Ok(HaarSystem { weights })
    }

    /// All weights 1.
    pub fn counting(g: &FiniteGroupoid) -> Self {
        HaarSystem {
            weights: vec![1.0; g.num_arrows()],
        }
    }

    /// `weights(g) = u(s(g))`; left invariant for any positive `u`.
    pub fn from_unit_weights(g: &FiniteGroupoid, u: &[f64]) -> Result<Self> {
        if u.len() != g.num_units() {
            return Err(Error::invalid(format!(
                "{} unit weights for {} units",
                u.len(),
                g.num_units()
            )));
        }
        Self::from_weights((0..g.num_arrows()).map(|a| u[g.src(a)]).collect())
    }

    pub fn weight(&self, g: usize) -> f64 {
        self.weights[g]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn is_counting(&self) -> bool {
        self.weights.iter().all(|&w| w == 1.0)
    }

    /// Composable pairs with `weights(gh) ≠ weights(h)`.
    pub fn validate(&self, g: &FiniteGroupoid) -> ValidationReport {
        let mut rep = ValidationReport::default();
        if self.weights.len() != g.num_arrows() {
            rep.push(
                "weight count",
                1.0,
                json!({ "weights": self.weights.len(), "arrows": g.num_arrows() }),
            );
            return rep;
        }
        for (a, &w) in self.weights.iter().enumerate() {
            if !(w.is_finite() && w > 0.0) {
                rep.push(
                    "positivity",
                    1.0,
                    json!({ "arrow": g.arrow_id(a), "weight": w }),
                );
            }
        }
        for (a, b) in g.composable_pairs() {
            let Some(ab) = g.try_compose(a, b) else {
                continue;
            };
            let (lhs, rhs) = (self.weights[ab], self.weights[b]);
            let dev = (lhs - rhs).abs();
            if dev > INVARIANCE_RTOL * lhs.abs().max(rhs.abs()) {
                rep.push(
                    "left invariance",
                    dev,
                    json!({ "pair": [g.arrow_id(a), g.arrow_id(b)], "weight(gh)": lhs, "weight(h)": rhs }),
                );
            }
        }
        rep
    }

    /// `u(x) = weights(unit_arrow(x))`. For a valid system,
    /// `weights(g) = u(s(g))`.
    pub fn unit_function(&self, g: &FiniteGroupoid) -> Vec<f64> {
        (0..g.num_units())
            .map(|x| self.weights[g.unit_arrow(x)])
            .collect()
    }

    /// The image under inversion: the Haar system `λ^op` on `G^op`, i.e. the
    /// right invariant system `λₓ` read on `G^op`.
    pub fn inverted(&self, g: &FiniteGroupoid) -> HaarSystem {
        HaarSystem {
            weights: (0..g.num_arrows())
                .map(|a| self.weights[g.inv(a)])
                .collect(),
        }
    }

    /// Weights on `G × H` for the product of this system with `other`.
    pub fn product(&self, other: &HaarSystem) -> HaarSystem {
        let weights = self
            .weights
            .iter()
            .flat_map(|&a| other.weights.iter().map(move |&b| a * b))
            .collect();
        HaarSystem { weights }
    }
}
