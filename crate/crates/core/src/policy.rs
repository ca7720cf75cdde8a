use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Every numeric threshold used by the crate, in one place.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NumericPolicy {
    /// Absolute tolerance for exact identities of the scalar algebra.
    pub exact_tol: f64,
    /// Absolute tolerance for exact identities of bundle section algebras.
    pub bundle_tol: f64,
    /// Relative tolerance for equalities between norms.
    pub norm_tol: f64,
    /// Relative eigenvalue gap used to split spectra.
    pub gap_tol: f64,
    /// Hermiticity tolerance, `‖M − M*‖∞`.
    pub herm_tol: f64,
    /// Tolerance for invariance of a Gram kernel under an operator.
    pub kernel_tol: f64,
    pub seed: u64,
    pub samples: usize,
}

impl Default for NumericPolicy {
    fn default() -> Self {
        NumericPolicy {
            exact_tol: 1e-12,
            bundle_tol: 1e-11,
            norm_tol: 1e-9,
            gap_tol: 1e-8,
            herm_tol: 1e-10,
            kernel_tol: 1e-9,
            seed: 0,
            samples: 30,
        }
    }
}

impl NumericPolicy {
    pub fn validate(&self) -> Result<()> {
        let tols = [
            ("exact_tol", self.exact_tol),
            ("bundle_tol", self.bundle_tol),
            ("norm_tol", self.norm_tol),
            ("gap_tol", self.gap_tol),
            ("herm_tol", self.herm_tol),
            ("kernel_tol", self.kernel_tol),
        ];
        for (name, v) in tols {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(format!(
                    "{name} must be a positive real, got {v}"
                )));
            }
        }
        if self.samples == 0 {
            return Err(Error::invalid("samples must be positive"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let p = NumericPolicy::default();
        assert_eq!(p.exact_tol, 1e-12);
        assert_eq!(p.norm_tol, 1e-9);
        assert_eq!(p.gap_tol, 1e-8);
        assert_eq!(p.samples, 30);
        assert_eq!(p.seed, 0);
        p.validate().unwrap();
    }

    #[test]
    fn rejects_nonpositive() {
        let p = NumericPolicy {
            norm_tol: 0.0,
            ..Default::default()
        };
        assert!(p.validate().is_err());
        let p = NumericPolicy {
            samples: 0,
            ..Default::default()
        };
        assert!(p.validate().is_err());
    }
}
