use std::sync::Arc;

use num_complex::Complex64;

use super::{max_gap, FellBundle, Tensor3};
use crate::cocycle::TCocycle;
use crate::groupoid::{pair_groupoid, FiniteGroupoid};
use crate::linalg::{CMatrix, ONE, ZERO};
use crate::{Error, NumericPolicy, Result};

/// The line bundle `L_σ`: one-dimensional fibers, `e_g e_h = σ(g,h) e_{gh}`,
/// `(z e_g)* = conj(z σ(g,g⁻¹)) e_{g⁻¹}`.
pub fn line_bundle(sigma: &TCocycle) -> Result<FellBundle> {
    if let Some(v) = sigma.validate().first() {
        return Err(Error::invalid(format!(
            "invalid cocycle: {} at {}",
            v.axiom, v.witness
        )));
    }
    let g = sigma.groupoid();
    let na = g.num_arrows();
    let mut mult = vec![None; na * na];
    for (a, b) in g.composable_pairs() {
        mult[a * na + b] = Some(Tensor3::scalar(sigma.value(a, b)));
    }
    let invol = (0..na)
        .map(|a| CMatrix::diag(&[sigma.value(a, g.inv(a)).conj()]))
        .collect();
    FellBundle::new(g.clone(), vec![1; na], mult, invol)
}

/// A finite-dimensional *-algebra in structure constant form.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberAlgebra {
    pub mult: Tensor3,
    pub invol: CMatrix,
}

impl FiberAlgebra {
    pub fn new(mult: Tensor3, invol: CMatrix) -> Result<Self> {
        let (o, l, r) = mult.shape();
        if o == 0 || o != l || o != r || (invol.rows(), invol.cols()) != (o, o) {
            return Err(Error::invalid(
                "fiber algebra needs a d×d×d tensor and a d×d involution",
            ));
        }
        Ok(FiberAlgebra { mult, invol })
    }

    pub fn dim(&self) -> usize {
        self.mult.shape().0
    }

    /// `M_n` with basis `E_ij` at index `i·n + j`.
    pub fn matrix_algebra(n: usize) -> Self {
        let d = n * n;
        let mult = Tensor3::from_fn(d, d, d, |o, l, r| {
            let ((i, j), (k, m)) = ((l / n, l % n), (r / n, r % n));
            if j == k && o == i * n + m {
                ONE
            } else {
                ZERO
            }
        });
        let invol = CMatrix::from_fn(
            d,
            d,
            |o, l| if o == (l % n) * n + l / n { ONE } else { ZERO },
        );
        FiberAlgebra { mult, invol }
    }

    /// `ℂ^n` with coordinatewise product and conjugation.
    pub fn diagonal(n: usize) -> Self {
        let mult = Tensor3::from_fn(n, n, n, |o, l, r| if o == l && l == r { ONE } else { ZERO });
        FiberAlgebra {
            mult,
            invol: CMatrix::identity(n),
        }
    }

    pub fn conj(&self) -> Self {
        FiberAlgebra {
            mult: self.mult.conj(),
            invol: self.invol.conj(),
        }
    }

    /// The algebra as a bundle over the one-arrow groupoid.
    pub fn as_bundle(&self) -> Result<FellBundle> {
        let g = Arc::new(pair_groupoid(1)?);
        FellBundle::new(
            g,
            vec![self.dim()],
            vec![Some(self.mult.clone())],
            vec![self.invol.clone()],
        )
    }

    /// The *-algebra and C*-axioms, via the one-arrow bundle validator.
    pub fn validate(&self, policy: &NumericPolicy) -> Result<crate::validation::ValidationReport> {
        Ok(self.as_bundle()?.validate(policy))
    }

    fn basis(&self, i: usize) -> Vec<Complex64> {
        let mut v = vec![ZERO; self.dim()];
        v[i] = ONE;
        v
    }
}

/// The bundle of an action of a group `Γ` on `A` by *-automorphisms:
/// `A_γ = A`, `a ·_{(γ,δ)} b = a α_γ(b)`, `a*_γ = α_{γ⁻¹}(a*)`.
pub fn action_bundle(
    group: Arc<FiniteGroupoid>,
    algebra: &FiberAlgebra,
    alpha: &[CMatrix],
    policy: &NumericPolicy,
) -> Result<FellBundle> {
    let g = &*group;
    if g.num_units() != 1 {
        return Err(Error::invalid("action bundles need a group (one unit)"));
    }
    if let Some(v) = algebra.validate(policy)?.first() {
        return Err(Error::invalid(format!(
            "fiber algebra is not a C*-algebra: {} at {}",
            v.axiom, v.witness
        )));
    }
    let d = algebra.dim();
    let na = g.num_arrows();
    if alpha.len() != na || alpha.iter().any(|m| (m.rows(), m.cols()) != (d, d)) {
        return Err(Error::invalid(format!(
            "need one {d}×{d} matrix per group element"
        )));
    }
    let tol = policy.exact_tol;
    let name = |a: usize| g.arrow_id(a);
    let e = g.unit_arrow(0);
    let dev = alpha[e].max_deviation(&CMatrix::identity(d));
    if dev > tol {
        return Err(Error::invalid(format!(
            "α at the identity is not the identity (deviation {dev:e})"
        )));
    }
    let t = &algebra.mult;
    for a in 0..na {
        let al = &alpha[a];
        let scale = al.max_abs().max(1.0);
        for i in 0..d {
            for j in 0..d {
                let (ei, ej) = (algebra.basis(i), algebra.basis(j));
                let lhs = al.apply(&t.apply(&ei, &ej));
                let rhs = t.apply(&al.apply(&ei), &al.apply(&ej));
                let dev = max_gap(&lhs, &rhs);
                if dev > tol * scale * scale {
                    return Err(Error::invalid(format!(
                        "α_{} is not multiplicative on basis ({i}, {j}) (deviation {dev:e})",
                        name(a)
                    )));
                }
            }
        }
        let dev = (al * &algebra.invol).max_deviation(&(&algebra.invol * &al.conj()));
        if dev > tol * scale {
            return Err(Error::invalid(format!(
                "α_{} does not commute with the involution (deviation {dev:e})",
                name(a)
            )));
        }
    }
    for (a, b) in g.composable_pairs() {
        let dev = (&alpha[a] * &alpha[b]).max_deviation(&alpha[g.compose(a, b)]);
        if dev > tol * alpha[a].max_abs().max(1.0) * alpha[b].max_abs().max(1.0) {
            return Err(Error::invalid(format!(
                "α_{} α_{} differs from α_{} (deviation {dev:e})",
                name(a),
                name(b),
                name(g.compose(a, b))
            )));
        }
    }
    let mut mult = vec![None; na * na];
    for (a, b) in g.composable_pairs() {
        let al = &alpha[a];
        mult[a * na + b] = Some(Tensor3::from_fn(d, d, d, |o, l, r| {
            (0..d).map(|m| t.get(o, l, m) * al[(m, r)]).sum()
        }));
    }
    let invol = (0..na).map(|a| &alpha[g.inv(a)] * &algebra.invol).collect();
    FellBundle::new(group.clone(), vec![d; na], mult, invol)
}
