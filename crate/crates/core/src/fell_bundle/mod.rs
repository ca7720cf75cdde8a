//! Finite-dimensional Fell bundles over finite groupoids, in structure
//! constant form.
//!
//! The fiber over `g` is `ℂ^{d_g}`. Multiplication `A_g × A_h → A_{gh}` is a
//! tensor `T_{g,h}[out][left][right]` and the involution `A_g → A_{g⁻¹}` is
//! `a ↦ J_g · conj(a)`.

mod build;
mod tensor;

use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use serde_json::json;

use crate::groupoid::FiniteGroupoid;
use crate::linalg::{gram_posdef, herm_eig_tol, op_norm, CMatrix, Definiteness, ZERO};
use crate::validation::{Blame, ValidationReport};
use crate::{Error, NumericPolicy, Result};

pub use build::{action_bundle, line_bundle, FiberAlgebra};
pub use tensor::Tensor3;

/// Left regular representation of a unit fiber `A_x`, in an orthonormal basis
/// of the trace form `⟨a, b⟩ = tr(L_{a*b})`.
#[derive(Debug, Clone)]
pub struct Gns {
    /// `Gr[i][j] = ⟨e_i, e_j⟩`.
    pub gram: CMatrix,
    /// `Gr^{-1/2}`; its columns form an orthonormal basis.
    pub w: CMatrix,
    pub w_inv: CMatrix,
}

#[derive(Debug)]
pub struct FellBundle {
    groupoid: Arc<FiniteGroupoid>,
    dims: Vec<usize>,
    /// Row-major over arrow pairs; `Some` exactly on composable pairs.
    mult: Vec<Option<Tensor3>>,
    invol: Vec<CMatrix>,
    gns: OnceLock<Vec<Result<Gns>>>,
}

impl Clone for FellBundle {
    fn clone(&self) -> Self {
        FellBundle {
            groupoid: self.groupoid.clone(),
            dims: self.dims.clone(),
            mult: self.mult.clone(),
            invol: self.invol.clone(),
            gns: OnceLock::new(),
        }
    }
}

/// Tensor-identical bundles over equal groupoids.
impl PartialEq for FellBundle {
    fn eq(&self, other: &Self) -> bool {
        *self.groupoid == *other.groupoid
            && self.dims == other.dims
            && self.mult == other.mult
            && self.invol == other.invol
    }
}

/// Result of one property of an explicit fiberwise map.
#[derive(Debug, Clone, PartialEq)]
pub struct PropertyCheck {
    pub name: &'static str,
    pub max_deviation: f64,
    pub witness: serde_json::Value,
}

impl FellBundle {
    /// Assembles a bundle, checking only shapes: `mult` holds one tensor per
    /// composable pair (row-major over arrow pairs, `None` elsewhere) and
    /// `invol[g]` is `d_{g⁻¹} × d_g`. The groupoid must satisfy its axioms.
    pub fn new(
        groupoid: Arc<FiniteGroupoid>,
        dims: Vec<usize>,
        mult: Vec<Option<Tensor3>>,
        invol: Vec<CMatrix>,
    ) -> Result<Self> {
        let g = &*groupoid;
        let na = g.num_arrows();
        if let Some(v) = g.validate().first() {
            return Err(Error::invalid(format!(
                "bundle over an invalid groupoid: {} at {}",
                v.axiom, v.witness
            )));
        }
        if dims.len() != na || invol.len() != na || mult.len() != na * na {
            return Err(Error::invalid("bundle data does not match the arrow count"));
        }
        if let Some(a) = (0..na).find(|&a| dims[a] == 0) {
            return Err(Error::invalid(format!(
                "fiber over {} has dimension 0",
                g.arrow_id(a)
            )));
        }
        for a in 0..na {
            for b in 0..na {
                let t = &mult[a * na + b];
                match (g.composable(a, b), t) {
                    (false, None) => {}
                    (false, Some(_)) => {
                        return Err(Error::invalid(format!(
                            "multiplication given on non-composable pair {}|{}",
                            g.arrow_id(a),
                            g.arrow_id(b)
                        )))
                    }
                    (true, None) => {
                        return Err(Error::invalid(format!(
                            "multiplication missing on {}|{}",
                            g.arrow_id(a),
                            g.arrow_id(b)
                        )))
                    }
                    (true, Some(t)) => {
                        let want = (dims[g.compose(a, b)], dims[a], dims[b]);
                        if t.shape() != want || !t.is_finite() {
                            return Err(Error::invalid(format!(
                                "multiplication on {}|{} has shape {:?}, expected {:?}",
                                g.arrow_id(a),
                                g.arrow_id(b),
                                t.shape(),
                                want
                            )));
                        }
                    }
                }
            }
        }
        for a in 0..na {
            let j = &invol[a];
            if (j.rows(), j.cols()) != (dims[g.inv(a)], dims[a]) || !j.is_finite() {
                return Err(Error::invalid(format!(
                    "involution at {} has shape {}x{}, expected {}x{}",
                    g.arrow_id(a),
                    j.rows(),
                    j.cols(),
                    dims[g.inv(a)],
                    dims[a]
                )));
            }
        }
        Ok(FellBundle {
            groupoid,
            dims,
            mult,
            invol,
            gns: OnceLock::new(),
        })
    }

    pub fn groupoid(&self) -> &Arc<FiniteGroupoid> {
        &self.groupoid
    }

    pub fn dim(&self, g: usize) -> usize {
        self.dims[g]
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// `Σ_g d_g`.
    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    /// `T_{g,h}` for a composable pair.
    pub fn tensor(&self, g: usize, h: usize) -> &Tensor3 {
        self.mult[g * self.groupoid.num_arrows() + h]
            .as_ref()
            .unwrap_or_else(|| panic!("pair ({g}, {h}) is not composable"))
    }

    pub fn invol(&self, g: usize) -> &CMatrix {
        &self.invol[g]
    }

    /// Replaces one multiplication tensor (fault injection and tests).
    pub fn set_tensor(&mut self, g: usize, h: usize, t: Tensor3) {
        let na = self.groupoid.num_arrows();
        assert_eq!(
            t.shape(),
            self.tensor(g, h).shape(),
            "tensor shape must be preserved"
        );
        self.mult[g * na + h] = Some(t);
        self.gns = OnceLock::new();
    }

    pub fn set_invol(&mut self, g: usize, j: CMatrix) {
        assert_eq!(
            (j.rows(), j.cols()),
            (self.invol[g].rows(), self.invol[g].cols())
        );
        self.invol[g] = j;
        self.gns = OnceLock::new();
    }

    /// `a · b` for `a ∈ A_g`, `b ∈ A_h`.
    pub fn multiply(&self, g: usize, h: usize, a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
        self.tensor(g, h).apply(a, b)
    }

    /// `a* ∈ A_{g⁻¹}` for `a ∈ A_g`.
    pub fn star(&self, g: usize, a: &[Complex64]) -> Vec<Complex64> {
        let c: Vec<Complex64> = a.iter().map(|z| z.conj()).collect();
        self.invol[g].apply(&c)
    }

    /// Matrix of `b ↦ a · b` from `A_h` to `A_{gh}`.
    pub fn left_mult(&self, g: usize, h: usize, a: &[Complex64]) -> CMatrix {
        self.tensor(g, h).left_matrix(a)
    }

    fn basis(d: usize, i: usize) -> Vec<Complex64> {
        let mut v = vec![ZERO; d];
        v[i] = Complex64::new(1.0, 0.0);
        v
    }

    /// Associativity, anti-multiplicativity and involutivity of `*`, and
    /// positivity of the unit fibers and of `a*a` in every fiber.
    pub fn validate(&self, policy: &NumericPolicy) -> ValidationReport {
        let g = &*self.groupoid;
        let id = |a: usize| g.arrow_id(a).to_string();
        let tol = policy.exact_tol;
        let mut rep = ValidationReport::default();
        let mut blame = Blame::default();

        for (a, b) in g.composable_pairs() {
            let ab = g.compose(a, b);
            for &c in g.range_fiber(g.src(b)) {
                let bc = g.compose(b, c);
                let lhs = self.tensor(ab, c).compose_left(self.tensor(a, b));
                let rhs = self.tensor(a, bc).compose_right(self.tensor(b, c));
                let (dev, at) = lhs.deviation(&rhs);
                let scale = lhs.max_abs().max(rhs.max_abs()).max(1.0);
                if dev > tol * scale {
                    rep.push(
                        "associativity",
                        dev,
                        json!({ "triple": [id(a), id(b), id(c)], "basis": at }),
                    );
                    blame.add(&[(a, b), (ab, c), (a, bc), (b, c)]);
                }
            }
        }

        for (a, b) in g.composable_pairs() {
            let ab = g.compose(a, b);
            let (ia, ib) = (g.inv(a), g.inv(b));
            let mut worst = (0.0f64, [0usize; 2], 1.0f64);
            for i in 0..self.dims[a] {
                for j in 0..self.dims[b] {
                    let (ei, ej) = (Self::basis(self.dims[a], i), Self::basis(self.dims[b], j));
                    let lhs = self.star(ab, &self.multiply(a, b, &ei, &ej));
                    let rhs = self.multiply(ib, ia, &self.star(b, &ej), &self.star(a, &ei));
                    let dev = max_gap(&lhs, &rhs);
                    if dev > worst.0 {
                        let scale = lhs.iter().chain(&rhs).map(|z| z.norm()).fold(1.0, f64::max);
                        worst = (dev, [i, j], scale);
                    }
                }
            }
            if worst.0 > tol * worst.2 {
                rep.push(
                    "involution reverses products",
                    worst.0,
                    json!({ "pair": [id(a), id(b)], "basis": worst.1 }),
                );
                blame.add(&[(a, b), (ib, ia)]);
            }
        }

        for a in 0..g.num_arrows() {
            let prod = &self.invol[g.inv(a)] * &self.invol[a].conj();
            let dev = prod.max_deviation(&CMatrix::identity(self.dims[a]));
            if dev > tol * prod.max_abs().max(1.0) {
                rep.push("involution is involutive", dev, json!({ "arrow": id(a) }));
            }
        }

        for x in 0..g.num_units() {
            let gram = self.trace_form(x);
            match gram_posdef(&gram, policy.herm_tol) {
                Ok(Definiteness::PositiveDefinite) => {}
                Ok(d) => {
                    rep.push(
                        "unit fiber trace form is positive definite",
                        1.0,
                        json!({
                        "unit": g.unit_id(x), "definiteness": format!("{d:?}") }),
                    );
                    continue;
                }
                Err(e) => {
                    rep.push(
                        "unit fiber trace form is positive definite",
                        1.0,
                        json!({
                        "unit": g.unit_id(x), "error": e.to_string() }),
                    );
                    continue;
                }
            }
            let Ok(gns) = self.compute_gns(x, policy) else {
                continue;
            };
            for &a in g.source_fiber(x) {
                let m = self.fiber_gram_block(&gns, a);
                let min = match herm_eig_tol(&m, policy.herm_tol) {
                    Ok(e) => e.values.last().copied().unwrap_or(0.0),
                    Err(_) => f64::NEG_INFINITY,
                };
                let scale = m.max_abs().max(1.0);
                if min < -policy.herm_tol * scale {
                    rep.push(
                        "a*a is positive",
                        -min,
                        json!({ "arrow": id(a), "min_eigenvalue": min }),
                    );
                }
            }
        }
        if let Some(((a, b), count)) = blame.worst() {
            rep.localization = Some(
                json!({ "most_implicated_pair": [id(a), id(b)], "violations_involving_it": count }),
            );
        }
        rep
    }

    /// `τ(c) = tr(L_c)` on `A_x` as a row of coefficients.
    fn trace_functional(&self, x: usize) -> Vec<Complex64> {
        let e = self.groupoid.unit_arrow(x);
        let t = self.tensor(e, e);
        let d = self.dims[e];
        (0..d)
            .map(|l| (0..d).map(|o| t.get(o, l, o)).sum())
            .collect()
    }

    /// `Gr[i][j] = tr(L_{e_i* e_j})` on `A_x`.
    pub fn trace_form(&self, x: usize) -> CMatrix {
        let e = self.groupoid.unit_arrow(x);
        let d = self.dims[e];
        let tau = self.trace_functional(x);
        CMatrix::from_fn(d, d, |i, j| {
            let p = self.multiply(e, e, &self.star(e, &Self::basis(d, i)), &Self::basis(d, j));
            p.iter().zip(&tau).map(|(c, t)| c * t).sum()
        })
    }

    /// Block matrix `[ρ(e_i* e_j)]` for the basis of `A_a`, `s(a) = x`.
    fn fiber_gram_block(&self, gns: &Gns, a: usize) -> CMatrix {
        let g = &*self.groupoid;
        let (d, dx) = (self.dims[a], gns.gram.rows());
        let ia = g.inv(a);
        let mut out = CMatrix::zeros(d * dx, d * dx);
        for i in 0..d {
            let si = self.star(a, &Self::basis(d, i));
            for j in 0..d {
                let p = self.multiply(ia, a, &si, &Self::basis(d, j));
                let r = self.rho_with(gns, g.src(a), &p);
                for u in 0..dx {
                    for v in 0..dx {
                        out[(i * dx + u, j * dx + v)] = r[(u, v)];
                    }
                }
            }
        }
        out
    }

    fn compute_gns(&self, x: usize, policy: &NumericPolicy) -> Result<Gns> {
        let gram = self.trace_form(x);
        if gram_posdef(&gram, policy.herm_tol)? != Definiteness::PositiveDefinite {
            return Err(Error::NotCStar(format!(
                "trace form of the fiber over unit {} is degenerate",
                self.groupoid.unit_id(x)
            )));
        }
        let eig = herm_eig_tol(&gram, policy.herm_tol)?;
        // Symmetric orthonormalization W = Gr^{-1/2}, so an orthonormal basis
        // is left as it is.
        let d = gram.rows();
        let v = &eig.vectors;
        let power = |p: f64| {
            let scaled = CMatrix::from_fn(d, d, |r, c| v[(r, c)] * eig.values[c].powf(p));
            &scaled * &v.adjoint()
        };
        Ok(Gns {
            w: power(-0.5),
            w_inv: power(0.5),
            gram,
        })
    }

    fn gns_all(&self) -> &Vec<Result<Gns>> {
        self.gns.get_or_init(|| {
            let policy = NumericPolicy::default();
            (0..self.groupoid.num_units())
                .map(|x| self.compute_gns(x, &policy))
                .collect()
        })
    }

    /// GNS data for the unit fiber over `x`.
    pub fn gns_unit_rep(&self, x: usize) -> Result<&Gns> {
        if x >= self.groupoid.num_units() {
            return Err(Error::invalid(format!("unit #{x} does not exist")));
        }
        self.gns_all()[x].as_ref().map_err(Clone::clone)
    }

    fn rho_with(&self, gns: &Gns, x: usize, a: &[Complex64]) -> CMatrix {
        let e = self.groupoid.unit_arrow(x);
        let l = self.left_mult(e, e, a);
        &(&gns.w_inv * &l) * &gns.w
    }

    /// `ρₓ(a)` for `a ∈ A_x`.
    pub fn rho(&self, x: usize, a: &[Complex64]) -> Result<CMatrix> {
        let gns = self.gns_unit_rep(x)?;
        Ok(self.rho_with(gns, x, a))
    }

    /// `‖a‖ = √‖ρ_{s(g)}(a*a)‖`.
    pub fn fiber_norm(&self, g: usize, a: &[Complex64]) -> Result<f64> {
        let gr = &*self.groupoid;
        if g >= gr.num_arrows() {
            return Err(Error::invalid(format!("arrow #{g} does not exist")));
        }
        if a.len() != self.dims[g] {
            return Err(Error::invalid(format!(
                "vector of length {} in a fiber of dimension {}",
                a.len(),
                self.dims[g]
            )));
        }
        if a.iter().all(|z| *z == ZERO) {
            return Ok(0.0);
        }
        let aa = self.multiply(gr.inv(g), g, &self.star(g, a), a);
        Ok(op_norm(&self.rho(gr.src(g), &aa)?)?.sqrt())
    }

    /// Entrywise conjugate tensors and involution matrices.
    pub fn conjugate_bundle(&self) -> FellBundle {
        FellBundle {
            groupoid: self.groupoid.clone(),
            dims: self.dims.clone(),
            mult: self
                .mult
                .iter()
                .map(|t| t.as_ref().map(Tensor3::conj))
                .collect(),
            invol: self.invol.iter().map(CMatrix::conj).collect(),
            gns: OnceLock::new(),
        }
    }

    /// `𝒜ᵒᵒ`: fiber `A_{g⁻¹}` over `g`, `a ·ᵒᵒ b = b · a`, involution
    /// `J_{g⁻¹}`.
    pub fn oo_bundle(&self) -> FellBundle {
        let g = &*self.groupoid;
        let na = g.num_arrows();
        let mut mult = vec![None; na * na];
        for (a, b) in g.composable_pairs() {
            mult[a * na + b] = Some(self.tensor(g.inv(b), g.inv(a)).swap_args());
        }
        FellBundle {
            groupoid: self.groupoid.clone(),
            dims: (0..na).map(|a| self.dims[g.inv(a)]).collect(),
            mult,
            invol: (0..na).map(|a| self.invol[g.inv(a)].clone()).collect(),
            gns: OnceLock::new(),
        }
    }

    /// `𝒜^op` over `G^op`: same fibers and involution, `a ·op b = b · a`.
    pub fn opposite_bundle_over_op(&self) -> FellBundle {
        let g = &*self.groupoid;
        let op = Arc::new(crate::groupoid::opposite_groupoid(g));
        let na = g.num_arrows();
        let mut mult = vec![None; na * na];
        for (a, b) in op.composable_pairs() {
            mult[a * na + b] = Some(self.tensor(b, a).swap_args());
        }
        FellBundle {
            groupoid: op,
            dims: self.dims.clone(),
            mult,
            invol: self.invol.clone(),
            gns: OnceLock::new(),
        }
    }

    /// `σ`-twisted bundle: `T_{g,h} ↦ σ(g,h) T_{g,h}`, `J_g ↦ conj σ(g,g⁻¹) J_g`.
    pub fn twist(&self, sigma: &crate::cocycle::TCocycle) -> Result<FellBundle> {
        let g = &*self.groupoid;
        if **sigma.groupoid() != *g {
            return Err(Error::invalid("cocycle lives on a different groupoid"));
        }
        if let Some(v) = sigma.validate().first() {
            return Err(Error::invalid(format!(
                "invalid cocycle: {} at {}",
                v.axiom, v.witness
            )));
        }
        let na = g.num_arrows();
        let mut mult = self.mult.clone();
        for (a, b) in g.composable_pairs() {
            mult[a * na + b] = Some(self.tensor(a, b).scale(sigma.value(a, b)));
        }
        let invol = (0..na)
            .map(|a| self.invol[a].scale(sigma.value(a, g.inv(a)).conj()))
            .collect();
        FellBundle::new(self.groupoid.clone(), self.dims.clone(), mult, invol)
    }

    /// The same bundle in the basis given by the columns of `s[g]`
    /// (invertible, `d_g × d_g`).
    pub fn change_basis(&self, s: &[CMatrix]) -> Result<FellBundle> {
        let g = &*self.groupoid;
        let na = g.num_arrows();
        if s.len() != na {
            return Err(Error::invalid("one basis change per arrow is required"));
        }
        let mut inv = Vec::with_capacity(na);
        for a in 0..na {
            if (s[a].rows(), s[a].cols()) != (self.dims[a], self.dims[a]) {
                return Err(Error::invalid(format!(
                    "basis change at {} has the wrong shape",
                    g.arrow_id(a)
                )));
            }
            inv.push(
                s[a].inverse()
                    .ok_or_else(|| Error::invalid("basis change is singular"))?,
            );
        }
        let mut mult = vec![None; na * na];
        for (a, b) in g.composable_pairs() {
            mult[a * na + b] = Some(self.tensor(a, b).transform(
                &inv[g.compose(a, b)],
                &s[a],
                &s[b],
            ));
        }
        let invol = (0..na)
            .map(|a| &(&inv[g.inv(a)] * &self.invol[a]) * &s[a].conj())
            .collect();
        FellBundle::new(self.groupoid.clone(), self.dims.clone(), mult, invol)
    }

    /// Pullback along the projection `G × H → G`: fiber `A_g` over `(g, h)`.
    /// `product` indexes `(g, h)` as `g·|H| + h`.
    pub fn pullback_to_product(
        &self,
        product: Arc<FiniteGroupoid>,
        other: &FiniteGroupoid,
    ) -> Result<FellBundle> {
        let nh = other.num_arrows();
        let np = product.num_arrows();
        if np != self.groupoid.num_arrows() * nh {
            return Err(Error::invalid(
                "product groupoid does not match the factors",
            ));
        }
        let mut mult = vec![None; np * np];
        for (p, q) in product.composable_pairs() {
            mult[p * np + q] = Some(self.tensor(p / nh, q / nh).clone());
        }
        let dims = (0..np).map(|p| self.dims[p / nh]).collect();
        let invol = (0..np).map(|p| self.invol[p / nh].clone()).collect();
        FellBundle::new(product, dims, mult, invol)
    }

    /// Tensor-level comparison with another bundle over an equal groupoid;
    /// `None` if dimensions or groupoids differ.
    pub fn tensor_deviation(&self, other: &FellBundle) -> Option<f64> {
        if *self.groupoid != *other.groupoid || self.dims != other.dims {
            return None;
        }
        let g = &*self.groupoid;
        let m = g
            .composable_pairs()
            .map(|(a, b)| self.tensor(a, b).deviation(other.tensor(a, b)).0)
            .fold(0.0, f64::max);
        let j = (0..g.num_arrows())
            .map(|a| self.invol[a].max_deviation(&other.invol[a]))
            .fold(0.0, f64::max);
        Some(m.max(j))
    }

    /// Checks that `Φ_g = conj(J_{g⁻¹})` (that is `a ↦ conj(a*)`) is an
    /// isomorphism of Fell bundles from `𝒜ᵒᵒ` onto the conjugate bundle.
    pub fn oo_conj_iso_check(&self) -> Result<Vec<PropertyCheck>> {
        let g = &*self.groupoid;
        let id = |a: usize| g.arrow_id(a).to_string();
        let oo = self.oo_bundle();
        let cj = self.conjugate_bundle();
        let na = g.num_arrows();
        let phi: Vec<CMatrix> = (0..na).map(|a| self.invol[g.inv(a)].conj()).collect();
        let mut checks = Vec::new();
        let mut track = |name: &'static str, items: Vec<(f64, serde_json::Value)>| {
            let (dev, wit) =
                items.into_iter().fold(
                    (0.0, json!(null)),
                    |acc, (d, w)| if d > acc.0 { (d, w) } else { acc },
                );
            checks.push(PropertyCheck {
                name,
                max_deviation: dev,
                witness: wit,
            });
        };

        // Linear bijection A_{g⁻¹} → A_g.
        track(
            "fiber map is a linear bijection",
            (0..na)
                .map(|a| {
                    let dev = match phi[a].inverse() {
                        Some(inv) => {
                            (&phi[a] * &inv).max_deviation(&CMatrix::identity(phi[a].rows()))
                        }
                        None => f64::INFINITY,
                    };
                    (dev, json!({ "arrow": id(a) }))
                })
                .collect(),
        );

        let mut mult_items = Vec::new();
        for (a, b) in g.composable_pairs() {
            let ab = g.compose(a, b);
            for i in 0..oo.dim(a) {
                for j in 0..oo.dim(b) {
                    let (ei, ej) = (Self::basis(oo.dim(a), i), Self::basis(oo.dim(b), j));
                    let lhs = phi[ab].apply(&oo.multiply(a, b, &ei, &ej));
                    let rhs = cj.multiply(a, b, &phi[a].apply(&ei), &phi[b].apply(&ej));
                    mult_items.push((
                        max_gap(&lhs, &rhs),
                        json!({ "pair": [id(a), id(b)], "basis": [i, j] }),
                    ));
                }
            }
        }
        track("fiber map is multiplicative", mult_items);

        let mut star_items = Vec::new();
        for a in 0..na {
            for i in 0..oo.dim(a) {
                let ei = Self::basis(oo.dim(a), i);
                let lhs = phi[g.inv(a)].apply(&oo.star(a, &ei));
                let rhs = cj.star(a, &phi[a].apply(&ei));
                star_items.push((max_gap(&lhs, &rhs), json!({ "arrow": id(a), "basis": i })));
            }
        }
        track("fiber map preserves the involution", star_items);

        let mut norm_items = Vec::new();
        for a in 0..na {
            let d = oo.dim(a);
            let mut probes: Vec<Vec<Complex64>> = (0..d).map(|i| Self::basis(d, i)).collect();
            probes.push(
                (0..d)
                    .map(|k| Complex64::new(1.0, k as f64 * 0.5))
                    .collect(),
            );
            probes.push(
                (0..d)
                    .map(|k| Complex64::from_polar(1.0 + k as f64, 0.7 * k as f64))
                    .collect(),
            );
            for (p, v) in probes.iter().enumerate() {
                let n1 = oo.fiber_norm(a, v)?;
                let n2 = cj.fiber_norm(a, &phi[a].apply(v))?;
                norm_items.push((
                    (n1 - n2).abs() / n1.max(1.0),
                    json!({ "arrow": id(a), "probe": p }),
                ));
            }
        }
        track("fiber map is isometric", norm_items);
        Ok(checks)
    }
}

pub(crate) fn max_gap(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
