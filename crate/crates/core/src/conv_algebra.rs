//! The convolution *-algebra of a finite groupoid with Haar system.
//!
//! Functions are complex vectors indexed by arrows. The product is
//! `(f1*f2)(g) = Σ_{h ∈ G^{r(g)}} f1(h) f2(h⁻¹g) λ(h)` and the involution
//! `f*(g) = conj f(g⁻¹)`.

use std::sync::Arc;

use num_complex::Complex64;
use serde_json::json;

use crate::groupoid::{opposite_groupoid, FiniteGroupoid, HaarSystem};
use crate::linalg::{op_norm, CMatrix, ZERO};
use crate::{Error, Result};

/// Why the full norm is reported equal to the reduced norm.
pub const FULL_NORM_NOTE: &str = "finite-dimensional model: the direct sum of the regular \
representations is a faithful *-representation of the finite-dimensional algebra, so the \
enveloping C*-norm coincides with the reduced norm; the supremum over all I-norm decreasing \
representations is not computed separately";

#[derive(Debug, Clone, PartialEq)]
pub struct GroupoidFunction {
    groupoid: Arc<FiniteGroupoid>,
    values: Vec<Complex64>,
}

impl GroupoidFunction {
    pub fn new(groupoid: Arc<FiniteGroupoid>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != groupoid.num_arrows() {
            return Err(Error::invalid(format!(
                "{} values for a groupoid with {} arrows",
                values.len(),
                groupoid.num_arrows()
            )));
        }
        if values
            .iter()
            .any(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::invalid("function values must be finite"));
        }
        Ok(GroupoidFunction { groupoid, values })
    }

    pub fn zero(groupoid: Arc<FiniteGroupoid>) -> Self {
        let n = groupoid.num_arrows();
        GroupoidFunction {
            groupoid,
            values: vec![ZERO; n],
        }
    }

    pub fn delta(groupoid: Arc<FiniteGroupoid>, g: usize) -> Self {
        let mut f = Self::zero(groupoid);
        f.values[g] = Complex64::new(1.0, 0.0);
        f
    }

    pub fn groupoid(&self) -> &Arc<FiniteGroupoid> {
        &self.groupoid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn value(&self, g: usize) -> Complex64 {
        self.values[g]
    }

    pub fn set(&mut self, g: usize, z: Complex64) {
        self.values[g] = z;
    }

    /// `f*(g) = conj f(g⁻¹)`.
    pub fn involution(&self) -> Self {
        let g = &self.groupoid;
        let values = (0..g.num_arrows())
            .map(|a| self.values[g.inv(a)].conj())
            .collect();
        GroupoidFunction {
            groupoid: g.clone(),
            values,
        }
    }

    /// `f^op(g) = f(g⁻¹)`.
    pub fn op_map(&self) -> Self {
        let g = &self.groupoid;
        let values = (0..g.num_arrows()).map(|a| self.values[g.inv(a)]).collect();
        GroupoidFunction {
            groupoid: g.clone(),
            values,
        }
    }

    /// Pointwise conjugate, the coordinates of `f` in the conjugate algebra.
    pub fn conj_map(&self) -> Self {
        let values = self.values.iter().map(|z| z.conj()).collect();
        GroupoidFunction {
            groupoid: self.groupoid.clone(),
            values,
        }
    }

    /// The same values read as a function on another groupoid with the same
    /// arrow set (e.g. `G^op`).
    pub fn reinterpret(&self, target: Arc<FiniteGroupoid>) -> Result<Self> {
        Self::new(target, self.values.clone())
    }

    pub fn add(&self, other: &Self) -> Self {
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + b)
            .collect();
        GroupoidFunction {
            groupoid: self.groupoid.clone(),
            values,
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let values = self.values.iter().map(|a| a * s).collect();
        GroupoidFunction {
            groupoid: self.groupoid.clone(),
            values,
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest pointwise difference and the arrow where it occurs.
    pub fn deviation(&self, other: &Self) -> (f64, usize) {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .enumerate()
            .fold((0.0, 0), |acc, (k, d)| if d > acc.0 { (d, k) } else { acc })
    }
}

pub(crate) fn sorted_sum(mut terms: Vec<f64>) -> f64 {
    terms.sort_by(f64::total_cmp);
    terms.iter().sum()
}

/// `f` together with an explanation; see [`FULL_NORM_NOTE`].
#[derive(Debug, Clone, PartialEq)]
pub struct FullNorm {
    pub value: f64,
    pub note: &'static str,
}

/// `𝔠c(G, λ)` for a validated groupoid and Haar system.
#[derive(Debug, Clone)]
pub struct ConvAlgebra {
    groupoid: Arc<FiniteGroupoid>,
    haar: HaarSystem,
}

impl ConvAlgebra {
    pub fn new(groupoid: Arc<FiniteGroupoid>, haar: HaarSystem) -> Result<Self> {
        let rep = groupoid.validate();
        if let Some(v) = rep.first() {
            return Err(Error::invalid(format!(
                "not a groupoid: {} at {}",
                v.axiom, v.witness
            )));
        }
        let rep = haar.validate(&groupoid);
        if let Some(v) = rep.first() {
            return Err(Error::invalid(format!(
                "not a Haar system: {} at {}",
                v.axiom, v.witness
            )));
        }
        Ok(ConvAlgebra { groupoid, haar })
    }

    pub fn counting(groupoid: Arc<FiniteGroupoid>) -> Result<Self> {
        let haar = HaarSystem::counting(&groupoid);
        Self::new(groupoid, haar)
    }

    pub fn groupoid(&self) -> &Arc<FiniteGroupoid> {
        &self.groupoid
    }

    pub fn haar(&self) -> &HaarSystem {
        &self.haar
    }

    /// `𝔠c(G^op, λ^op)`, with `λ^op` the image of `λ` under inversion.
    pub fn opposite(&self) -> ConvAlgebra {
        let op = Arc::new(opposite_groupoid(&self.groupoid));
        let haar = self.haar.inverted(&self.groupoid);
        ConvAlgebra { groupoid: op, haar }
    }

    pub fn zero(&self) -> GroupoidFunction {
        GroupoidFunction::zero(self.groupoid.clone())
    }

    pub fn delta(&self, g: usize) -> GroupoidFunction {
        GroupoidFunction::delta(self.groupoid.clone(), g)
    }

    pub fn function(&self, values: Vec<Complex64>) -> Result<GroupoidFunction> {
        GroupoidFunction::new(self.groupoid.clone(), values)
    }

    fn check(&self, f: &GroupoidFunction) -> Result<()> {
        if Arc::ptr_eq(&self.groupoid, &f.groupoid) || *self.groupoid == *f.groupoid {
            Ok(())
        } else {
            Err(Error::invalid("function lives on a different groupoid"))
        }
    }

    pub fn convolve(
        &self,
        f1: &GroupoidFunction,
        f2: &GroupoidFunction,
    ) -> Result<GroupoidFunction> {
        self.check(f1)?;
        self.check(f2)?;
        let g = &*self.groupoid;
        let values = (0..g.num_arrows())
            .map(|a| {
                g.range_fiber(g.rng(a))
                    .iter()
                    .map(|&h| {
                        f1.values[h] * f2.values[g.compose(g.inv(h), a)] * self.haar.weight(h)
                    })
                    .sum()
            })
            .collect();
        Ok(GroupoidFunction {
            groupoid: self.groupoid.clone(),
            values,
        })
    }

    /// `λ(f)(x) = Σ_{g ∈ G^x} f(g) λ(g)`.
    pub fn lambda_map(&self, f: &GroupoidFunction) -> Result<Vec<Complex64>> {
        self.check(f)?;
        let g = &*self.groupoid;
        Ok((0..g.num_units())
            .map(|x| {
                g.range_fiber(x)
                    .iter()
                    .map(|&a| f.values[a] * self.haar.weight(a))
                    .sum()
            })
            .collect())
    }

    /// `max(‖λ(|f|)‖∞, ‖λ(|f*|)‖∞)`. Fiber sums are accumulated in sorted
    /// order, so the value depends only on the multiset of terms.
    pub fn i_norm(&self, f: &GroupoidFunction) -> Result<f64> {
        self.check(f)?;
        let g = &*self.groupoid;
        let sup = |h: &GroupoidFunction| {
            (0..g.num_units())
                .map(|x| {
                    sorted_sum(
                        g.range_fiber(x)
                            .iter()
                            .map(|&a| h.values[a].norm() * self.haar.weight(a))
                            .collect(),
                    )
                })
                .fold(0.0, f64::max)
        };
        Ok(sup(f).max(sup(&f.involution())))
    }

    /// Matrix of `πₓ(f)` on `ℓ²(Gₓ, λₓ)` in the orthonormal basis
    /// `e_g / √λ(g⁻¹)`, `g ∈ Gₓ` (ordered as [`FiniteGroupoid::source_fiber`]).
    pub fn regular_rep(&self, f: &GroupoidFunction, x: usize) -> Result<CMatrix> {
        self.check(f)?;
        let g = &*self.groupoid;
        if x >= g.num_units() {
            return Err(Error::invalid(format!("unit #{x} does not exist")));
        }
        let fiber = g.source_fiber(x);
        let sw: Vec<f64> = fiber
            .iter()
            .map(|&a| self.haar.weight(g.inv(a)).sqrt())
            .collect();
        // πₓ(f)ξ(a) = Σ_{b ∈ Gₓ} f(a b⁻¹) ξ(b) λ(b⁻¹)
        Ok(CMatrix::from_fn(fiber.len(), fiber.len(), |r, c| {
            let (a, b) = (fiber[r], fiber[c]);
            f.values[g.compose(a, g.inv(b))] * (sw[r] * sw[c])
        }))
    }

    /// `sup_x ‖πₓ(f)‖`.
    pub fn reduced_norm(&self, f: &GroupoidFunction) -> Result<f64> {
        let mut best = 0.0f64;
        for x in 0..self.groupoid.num_units() {
            best = best.max(op_norm(&self.regular_rep(f, x)?)?);
        }
        Ok(best)
    }

    pub fn full_norm(&self, f: &GroupoidFunction) -> Result<FullNorm> {
        Ok(FullNorm {
            value: self.reduced_norm(f)?,
            note: FULL_NORM_NOTE,
        })
    }

    /// JSON summary of the three norms of `f`.
    pub fn norms_json(&self, f: &GroupoidFunction) -> Result<serde_json::Value> {
        let full = self.full_norm(f)?;
        Ok(json!({
            "i_norm": self.i_norm(f)?,
            "reduced_norm": self.reduced_norm(f)?,
            "full_norm": { "value": full.value, "note": full.note },
        }))
    }
}
