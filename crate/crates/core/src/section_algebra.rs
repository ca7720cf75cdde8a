//! The section *-algebra `𝔠c(G, 𝒜)` of a Fell bundle.
//!
//! The reduced norm is computed on the Hilbert space obtained from the
//! Hilbert `A_x`-module `L²(Gₓ, 𝒜)` by inducing along the trace-form GNS
//! representation of `A_x`: the space `(⊕_{h ∈ Gₓ} A_h) ⊗ A_x` with the
//! semi-inner product `⟨v ⊗ a, w ⊗ b⟩ = tr(L_{a* ⟨v,w⟩ b})`, divided by its
//! kernel. Since a faithful representation of a finite-dimensional
//! C*-algebra is isometric, this gives the norm of `πₓ(ξ)` on the module.

use std::sync::Arc;

use num_complex::Complex64;
use serde_json::json;

use crate::conv_algebra::{sorted_sum, FULL_NORM_NOTE};
use crate::fell_bundle::FellBundle;
use crate::groupoid::HaarSystem;
use crate::linalg::{op_norm, CMatrix, GramQuotient, ZERO};
use crate::{Error, NumericPolicy, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    bundle: Arc<FellBundle>,
    values: Vec<Vec<Complex64>>,
}

impl Section {
    pub fn bundle(&self) -> &Arc<FellBundle> {
        &self.bundle
    }

    pub fn values(&self) -> &[Vec<Complex64>] {
        &self.values
    }

    pub fn value(&self, g: usize) -> &[Complex64] {
        &self.values[g]
    }

    /// `ξ*(g) = J_{g⁻¹} conj ξ(g⁻¹)`.
    pub fn involution(&self) -> Section {
        let g = self.bundle.groupoid();
        let values = (0..g.num_arrows())
            .map(|a| self.bundle.star(g.inv(a), &self.values[g.inv(a)]))
            .collect();
        Section {
            bundle: self.bundle.clone(),
            values,
        }
    }

    pub fn add(&self, other: &Section) -> Section {
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
            .collect();
        Section {
            bundle: self.bundle.clone(),
            values,
        }
    }

    pub fn scale(&self, s: Complex64) -> Section {
        let values = self
            .values
            .iter()
            .map(|v| v.iter().map(|z| z * s).collect())
            .collect();
        Section {
            bundle: self.bundle.clone(),
            values,
        }
    }

    /// `max_g max_i |ξ(g)_i|`.
    pub fn sup_abs(&self) -> f64 {
        self.values
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Largest coordinate gap and the arrow where it occurs; `inf` if the
    /// shapes differ.
    pub fn deviation(&self, other: &Section) -> (f64, usize) {
        if self.values.len() != other.values.len() {
            return (f64::INFINITY, 0);
        }
        let mut worst = (0.0, 0);
        for (g, (a, b)) in self.values.iter().zip(&other.values).enumerate() {
            let d = crate::fell_bundle::max_gap(a, b);
            if d > worst.0 {
                worst = (d, g);
            }
        }
        worst
    }
}

/// Per-unit data of the localized regular representation.
#[derive(Debug, Clone)]
struct Localization {
    /// `Gₓ` in order, with the offset of each fiber in `⊕_h A_h`.
    fiber: Vec<usize>,
    offsets: Vec<usize>,
    /// `dim ⊕_h A_h`.
    module_dim: usize,
    unit_dim: usize,
    gram: CMatrix,
    quotient: GramQuotient,
}

/// `𝔠c(G, 𝒜)` for a validated bundle and Haar system.
#[derive(Debug, Clone)]
pub struct SectionAlgebra {
    bundle: Arc<FellBundle>,
    haar: HaarSystem,
    policy: NumericPolicy,
    local: Vec<Localization>,
}

impl SectionAlgebra {
    pub fn new(bundle: Arc<FellBundle>, haar: HaarSystem, policy: &NumericPolicy) -> Result<Self> {
        let g = bundle.groupoid().clone();
        if let Some(v) = haar.validate(&g).first() {
            return Err(Error::invalid(format!(
                "not a Haar system: {} at {}",
                v.axiom, v.witness
            )));
        }
        if let Some(v) = bundle.validate(policy).first() {
            return Err(Error::invalid(format!(
                "not a Fell bundle: {} at {}",
                v.axiom, v.witness
            )));
        }
        let mut local = Vec::with_capacity(g.num_units());
        for x in 0..g.num_units() {
            local.push(Self::localize(&bundle, &haar, x, policy)?);
        }
        Ok(SectionAlgebra {
            bundle,
            haar,
            policy: *policy,
            local,
        })
    }

    pub fn counting(bundle: Arc<FellBundle>, policy: &NumericPolicy) -> Result<Self> {
        let haar = HaarSystem::counting(bundle.groupoid());
        Self::new(bundle, haar, policy)
    }

    fn localize(
        bundle: &FellBundle,
        haar: &HaarSystem,
        x: usize,
        policy: &NumericPolicy,
    ) -> Result<Localization> {
        let g = bundle.groupoid();
        let fiber = g.source_fiber(x).to_vec();
        let mut offsets = Vec::with_capacity(fiber.len());
        let mut module_dim = 0;
        for &h in &fiber {
            offsets.push(module_dim);
            module_dim += bundle.dim(h);
        }
        let e = g.unit_arrow(x);
        let dx = bundle.dim(e);
        let basis = |d: usize, i: usize| {
            let mut v = vec![ZERO; d];
            v[i] = Complex64::new(1.0, 0.0);
            v
        };
        // tr(L_c) as a linear functional on A_x.
        let t = bundle.tensor(e, e);
        let tau: Vec<Complex64> = (0..dx)
            .map(|l| (0..dx).map(|o| t.get(o, l, o)).sum())
            .collect();
        let tr = |c: &[Complex64]| -> Complex64 { c.iter().zip(&tau).map(|(a, b)| a * b).sum() };
        let fstar: Vec<Vec<Complex64>> = (0..dx).map(|k| bundle.star(e, &basis(dx, k))).collect();

        let n = module_dim * dx;
        let mut gram = CMatrix::zeros(n, n);
        for (p, &h) in fiber.iter().enumerate() {
            let dh = bundle.dim(h);
            let w = haar.weight(g.inv(h));
            let hi = g.inv(h);
            for i in 0..dh {
                let si = bundle.star(h, &basis(dh, i));
                for j in 0..dh {
                    // ⟨e_{h,i}, e_{h,j}⟩ = e_{h,i}* e_{h,j} λₓ(h) ∈ A_x.
                    let c = bundle.multiply(hi, h, &si, &basis(dh, j));
                    for k in 0..dx {
                        let left = bundle.multiply(e, e, &fstar[k], &c);
                        for l in 0..dx {
                            let v = tr(&bundle.multiply(e, e, &left, &basis(dx, l))) * w;
                            gram[((offsets[p] + i) * dx + k, (offsets[p] + j) * dx + l)] = v;
                        }
                    }
                }
            }
        }
        let quotient = GramQuotient::new(&gram, policy)?;
        Ok(Localization {
            fiber,
            offsets,
            module_dim,
            unit_dim: dx,
            gram,
            quotient,
        })
    }

    pub fn bundle(&self) -> &Arc<FellBundle> {
        &self.bundle
    }

    pub fn haar(&self) -> &HaarSystem {
        &self.haar
    }

    pub fn policy(&self) -> &NumericPolicy {
        &self.policy
    }

    pub fn zero(&self) -> Section {
        let values = self.bundle.dims().iter().map(|&d| vec![ZERO; d]).collect();
        Section {
            bundle: self.bundle.clone(),
            values,
        }
    }

    /// The section supported on `g` with value `v`.
    pub fn delta(&self, g: usize, v: Vec<Complex64>) -> Result<Section> {
        let mut s = self.zero();
        if g >= s.values.len() || v.len() != self.bundle.dim(g) {
            return Err(Error::invalid("delta section does not fit the fiber"));
        }
        s.values[g] = v;
        Ok(s)
    }

    pub fn section(&self, values: Vec<Vec<Complex64>>) -> Result<Section> {
        let dims = self.bundle.dims();
        if values.len() != dims.len() {
            return Err(Error::invalid(format!(
                "{} section values for {} arrows",
                values.len(),
                dims.len()
            )));
        }
        for (a, v) in values.iter().enumerate() {
            if v.len() != dims[a] {
                return Err(Error::invalid(format!(
                    "value at {} has length {}, fiber dimension is {}",
                    self.bundle.groupoid().arrow_id(a),
                    v.len(),
                    dims[a]
                )));
            }
            if v.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
                return Err(Error::invalid("section values must be finite"));
            }
        }
        Ok(Section {
            bundle: self.bundle.clone(),
            values,
        })
    }

    fn check(&self, s: &Section) -> Result<()> {
        if Arc::ptr_eq(&self.bundle, &s.bundle) || *self.bundle == *s.bundle {
            Ok(())
        } else {
            Err(Error::invalid("section belongs to a different bundle"))
        }
    }

    /// `(ξ*η)(g) = Σ_{h ∈ G^{r(g)}} ξ(h) · η(h⁻¹g) λ(h)`.
    pub fn convolve(&self, xi: &Section, eta: &Section) -> Result<Section> {
        self.check(xi)?;
        self.check(eta)?;
        let b = &*self.bundle;
        let g = b.groupoid();
        let values = (0..g.num_arrows())
            .map(|a| {
                let mut acc = vec![ZERO; b.dim(a)];
                for &h in g.range_fiber(g.rng(a)) {
                    let k = g.compose(g.inv(h), a);
                    let p = b.multiply(h, k, &xi.values[h], &eta.values[k]);
                    let w = self.haar.weight(h);
                    for (s, v) in acc.iter_mut().zip(p) {
                        *s += v * w;
                    }
                }
                acc
            })
            .collect();
        Ok(Section {
            bundle: self.bundle.clone(),
            values,
        })
    }

    /// `sup_x max(Σ_{g ∈ G^x} ‖ξ(g)‖ λ(g), Σ_{g ∈ G^x} ‖ξ*(g)‖ λ(g))`.
    pub fn i_norm(&self, xi: &Section) -> Result<f64> {
        self.check(xi)?;
        let b = &*self.bundle;
        let g = b.groupoid();
        let norms = |s: &Section| -> Result<Vec<f64>> {
            (0..g.num_arrows())
                .map(|a| b.fiber_norm(a, &s.values[a]))
                .collect()
        };
        let (n1, n2) = (norms(xi)?, norms(&xi.involution())?);
        let mut best = 0.0f64;
        for x in 0..g.num_units() {
            let s = |n: &[f64]| {
                sorted_sum(
                    g.range_fiber(x)
                        .iter()
                        .map(|&a| n[a] * self.haar.weight(a))
                        .collect(),
                )
            };
            best = best.max(s(&n1)).max(s(&n2));
        }
        Ok(best)
    }

    /// `πₓ(ξ) ⊗ id` on `(⊕_{h ∈ Gₓ} A_h) ⊗ A_x`, together with the Gram
    /// matrix of the semi-inner product. Basis vectors are `e_{h,i} ⊗ f_k`
    /// at index `(offset(h) + i)·d_x + k`.
    pub fn regular_rep(&self, xi: &Section, x: usize) -> Result<(CMatrix, CMatrix)> {
        self.check(xi)?;
        let loc = self
            .local
            .get(x)
            .ok_or_else(|| Error::invalid(format!("unit #{x} does not exist")))?;
        Ok((self.action_matrix(xi, loc), loc.gram.clone()))
    }

    fn action_matrix(&self, xi: &Section, loc: &Localization) -> CMatrix {
        let b = &*self.bundle;
        let g = b.groupoid();
        let dx = loc.unit_dim;
        let n = loc.module_dim * dx;
        let mut m = CMatrix::zeros(n, n);
        // (πₓ(ξ)η)(a) = Σ_{h ∈ Gₓ} ξ(a h⁻¹) · η(h) λ(h⁻¹)
        for (p, &a) in loc.fiber.iter().enumerate() {
            for (q, &h) in loc.fiber.iter().enumerate() {
                let c = g.compose(a, g.inv(h));
                let v = &xi.values[c];
                if v.iter().all(|z| *z == ZERO) {
                    continue;
                }
                let block = b.left_mult(c, h, v);
                let w = self.haar.weight(g.inv(h));
                for i in 0..block.rows() {
                    for j in 0..block.cols() {
                        let z = block[(i, j)] * w;
                        for k in 0..dx {
                            m[((loc.offsets[p] + i) * dx + k, (loc.offsets[q] + j) * dx + k)] = z;
                        }
                    }
                }
            }
        }
        m
    }

    /// `‖πₓ(ξ)‖` on the quotient by the Gram kernel.
    pub fn unit_norm(&self, xi: &Section, x: usize) -> Result<f64> {
        self.check(xi)?;
        let loc = self
            .local
            .get(x)
            .ok_or_else(|| Error::invalid(format!("unit #{x} does not exist")))?;
        let m = self.action_matrix(xi, loc);
        op_norm(&loc.quotient.compress(&m, &self.policy)?)
    }

    /// `max_x ‖πₓ(ξ)‖`.
    pub fn reduced_norm(&self, xi: &Section) -> Result<f64> {
        let mut best = 0.0f64;
        for x in 0..self.local.len() {
            best = best.max(self.unit_norm(xi, x)?);
        }
        Ok(best)
    }

    /// `⊕ₓ πₓ(ξ)` in Gram-orthonormal coordinates of the quotient spaces.
    pub fn whitened_rep(&self, xi: &Section) -> Result<CMatrix> {
        self.check(xi)?;
        let blocks = self
            .local
            .iter()
            .map(|loc| {
                loc.quotient
                    .compress(&self.action_matrix(xi, loc), &self.policy)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CMatrix::block_diag(&blocks))
    }

    pub fn full_norm(&self, xi: &Section) -> Result<crate::conv_algebra::FullNorm> {
        Ok(crate::conv_algebra::FullNorm {
            value: self.reduced_norm(xi)?,
            note: FULL_NORM_NOTE,
        })
    }

    pub fn norms_json(&self, xi: &Section) -> Result<serde_json::Value> {
        let full = self.full_norm(xi)?;
        Ok(json!({
            "i_norm": self.i_norm(xi)?,
            "reduced_norm": self.reduced_norm(xi)?,
            "full_norm": { "value": full.value, "note": full.note },
        }))
    }

    /// `𝔠c(G, 𝒜ᵒᵒ)` with the same Haar system.
    pub fn oo_algebra(&self) -> Result<SectionAlgebra> {
        SectionAlgebra::new(
            Arc::new(self.bundle.oo_bundle()),
            self.haar.clone(),
            &self.policy,
        )
    }

    /// `𝔠c(G, 𝒜̄)` with the same Haar system.
    pub fn conjugate_algebra(&self) -> Result<SectionAlgebra> {
        SectionAlgebra::new(
            Arc::new(self.bundle.conjugate_bundle()),
            self.haar.clone(),
            &self.policy,
        )
    }

    /// `ξᵒᵒ(g) = ξ(g⁻¹)` as a section of `oo`'s bundle.
    pub fn oo_map(&self, xi: &Section, oo: &SectionAlgebra) -> Result<Section> {
        self.check(xi)?;
        let g = self.bundle.groupoid();
        oo.section(
            (0..g.num_arrows())
                .map(|a| xi.values[g.inv(a)].clone())
                .collect(),
        )
    }

    /// `ξ̄(g) = conj(ξ(g⁻¹)*)` in coordinates, as a section of `conj`'s bundle.
    pub fn conj_section_map(&self, xi: &Section, conj: &SectionAlgebra) -> Result<Section> {
        self.check(xi)?;
        let g = self.bundle.groupoid();
        let star = xi.involution();
        conj.section(
            (0..g.num_arrows())
                .map(|a| star.values[a].iter().map(|z| z.conj()).collect())
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocycle::{random_cocycle, TCocycle};
    use crate::conv_algebra::ConvAlgebra;
    use crate::fell_bundle::{action_bundle, line_bundle, FiberAlgebra};
    use crate::groupoid::{
        cyclic_group, klein_four, pair_groupoid, product_groupoid, symmetric_group,
    };
    use crate::linalg::{I, ONE};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn policy() -> NumericPolicy {
        NumericPolicy::default()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pauli_algebra() -> SectionAlgebra {
        let sigma = TCocycle::from_fn(Arc::new(klein_four()), 2, |a, b| ((a % 2) * (b / 2)) as i64)
            .unwrap();
        SectionAlgebra::counting(Arc::new(line_bundle(&sigma).unwrap()), &policy()).unwrap()
    }

    fn swap_algebra() -> SectionAlgebra {
        let z2 = Arc::new(cyclic_group(2).unwrap());
        let swap = CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let b = action_bundle(
            z2,
            &FiberAlgebra::diagonal(2),
            &[CMatrix::identity(2), swap],
            &policy(),
        )
        .unwrap();
        SectionAlgebra::counting(Arc::new(b), &policy()).unwrap()
    }

    fn random_section(alg: &SectionAlgebra, rng: &mut impl Rng) -> Section {
        let values = alg
            .bundle()
            .dims()
            .iter()
            .map(|&d| {
                (0..d)
                    .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                    .collect()
            })
            .collect();
        alg.section(values).unwrap()
    }

    /// Trivial line bundle algebra and the matching convolution algebra.
    fn trivial_pair(
        g: crate::groupoid::FiniteGroupoid,
        u: &[f64],
    ) -> (SectionAlgebra, ConvAlgebra) {
        let g = Arc::new(g);
        let haar = HaarSystem::from_unit_weights(&g, u).unwrap();
        let b = Arc::new(line_bundle(&TCocycle::trivial(g.clone(), 2).unwrap()).unwrap());
        (
            SectionAlgebra::new(b, haar.clone(), &policy()).unwrap(),
            ConvAlgebra::new(g, haar).unwrap(),
        )
    }

    fn as_function(conv: &ConvAlgebra, s: &Section) -> crate::conv_algebra::GroupoidFunction {
        conv.function(s.values().iter().map(|v| v[0]).collect())
            .unwrap()
    }

    #[test]
    fn trivial_line_bundle_reduces_to_convolution() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (alg, conv) = trivial_pair(
            product_groupoid(&symmetric_group(3).unwrap(), &pair_groupoid(2).unwrap()).unwrap(),
            &[0.5, 2.0],
        );
        for _ in 0..5 {
            let (x, y) = (
                random_section(&alg, &mut rng),
                random_section(&alg, &mut rng),
            );
            let (fx, fy) = (as_function(&conv, &x), as_function(&conv, &y));
            let p = as_function(&conv, &alg.convolve(&x, &y).unwrap());
            assert!(p.deviation(&conv.convolve(&fx, &fy).unwrap()).0 <= 1e-13);
            assert!(
                as_function(&conv, &x.involution())
                    .deviation(&fx.involution())
                    .0
                    == 0.0
            );
            assert!((alg.i_norm(&x).unwrap() - conv.i_norm(&fx).unwrap()).abs() <= 1e-13);
            for u in 0..2 {
                let a = alg.unit_norm(&x, u).unwrap();
                let b = op_norm(&conv.regular_rep(&fx, u).unwrap()).unwrap();
                assert!((a - b).abs() <= 1e-10 * b.max(1.0));
            }
            let oo = alg.oo_algebra().unwrap();
            assert_eq!(
                as_function(&conv, &alg.oo_map(&x, &oo).unwrap()),
                fx.op_map()
            );
        }
    }

    #[test]
    fn pauli_products() {
        let alg = pauli_algebra();
        // (1,0) ↦ index 2, (0,1) ↦ 1, (1,1) ↦ 3.
        let d = |g| alg.delta(g, vec![ONE]).unwrap();
        assert_eq!(alg.convolve(&d(2), &d(1)).unwrap(), d(3));
        assert_eq!(alg.convolve(&d(1), &d(2)).unwrap(), d(3).scale(-ONE));
        // (δ_g)*(g⁻¹) = conj σ(g, g⁻¹): σ((1,1),(1,1)) = 1·1 = 1.
        assert_eq!(d(3).involution(), d(3).scale(-ONE));
        assert_eq!(d(2).involution(), d(2));
    }

    #[test]
    fn swap_products() {
        let alg = swap_algebra();
        let (a, b) = (
            vec![c(1.0, 2.0), c(-0.5, 0.0)],
            vec![c(0.0, 1.0), c(3.0, 1.0)],
        );
        let p = alg
            .convolve(
                &alg.delta(0, a.clone()).unwrap(),
                &alg.delta(1, b.clone()).unwrap(),
            )
            .unwrap();
        assert_eq!(p, alg.delta(1, vec![a[0] * b[0], a[1] * b[1]]).unwrap());
    }

    #[test]
    fn i_norm_examples() {
        let alg = pauli_algebra();
        let xi = alg
            .delta(2, vec![ONE])
            .unwrap()
            .add(&alg.delta(1, vec![ONE]).unwrap());
        assert!((alg.i_norm(&xi).unwrap() - 2.0).abs() < 1e-14);
        assert_eq!(alg.i_norm(&alg.zero()).unwrap(), 0.0);
    }

    #[test]
    fn reduced_norm_examples() {
        let alg = pauli_algebra();
        let xi = alg
            .delta(0, vec![ONE])
            .unwrap()
            .add(&alg.delta(3, vec![ONE]).unwrap());
        assert!((alg.reduced_norm(&xi).unwrap() - 2f64.sqrt()).abs() < 1e-12);
        let s = swap_algebra();
        let one = s.delta(0, vec![ONE, ONE]).unwrap();
        assert!((s.reduced_norm(&one).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(s.reduced_norm(&s.zero()).unwrap(), 0.0);
    }

    #[test]
    fn involution_reverses_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for alg in [pauli_algebra(), swap_algebra()] {
            for _ in 0..30 {
                let (x, y) = (
                    random_section(&alg, &mut rng),
                    random_section(&alg, &mut rng),
                );
                let lhs = alg.convolve(&x, &y).unwrap().involution();
                let rhs = alg.convolve(&y.involution(), &x.involution()).unwrap();
                assert!(lhs.deviation(&rhs).0 <= 1e-12);
                assert!(x.involution().involution().deviation(&x).0 <= 1e-15);
            }
        }
    }

    #[test]
    fn regular_representation_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let sigma = random_cocycle(Arc::new(symmetric_group(3).unwrap()), 3, &mut rng).unwrap();
        let line =
            SectionAlgebra::counting(Arc::new(line_bundle(&sigma).unwrap()), &policy()).unwrap();
        for alg in [pauli_algebra(), swap_algebra(), line] {
            for _ in 0..10 {
                let (x, y) = (
                    random_section(&alg, &mut rng),
                    random_section(&alg, &mut rng),
                );
                let nx = alg.reduced_norm(&x).unwrap();
                assert!(nx <= alg.i_norm(&x).unwrap() + 1e-9);
                let xx = alg.convolve(&x.involution(), &x).unwrap();
                assert!((alg.reduced_norm(&xx).unwrap() - nx * nx).abs() <= 1e-8 * nx * nx);
                for u in 0..alg.bundle().groupoid().num_units() {
                    let (mx, _) = alg.regular_rep(&x, u).unwrap();
                    let (my, _) = alg.regular_rep(&y, u).unwrap();
                    let (mxy, _) = alg.regular_rep(&alg.convolve(&x, &y).unwrap(), u).unwrap();
                    assert!(mxy.max_deviation(&(&mx * &my)) <= 1e-11);
                }
            }
        }
    }

    #[test]
    fn oo_and_conjugate_maps() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for alg in [pauli_algebra(), swap_algebra()] {
            let oo = alg.oo_algebra().unwrap();
            let cj = alg.conjugate_algebra().unwrap();
            for _ in 0..30 {
                let (x, y) = (
                    random_section(&alg, &mut rng),
                    random_section(&alg, &mut rng),
                );
                let xy = alg.convolve(&x, &y).unwrap();
                let (xo, yo) = (alg.oo_map(&x, &oo).unwrap(), alg.oo_map(&y, &oo).unwrap());
                let lhs = alg.oo_map(&xy, &oo).unwrap();
                assert!(lhs.deviation(&oo.convolve(&yo, &xo).unwrap()).0 <= 1e-11);
                assert!(
                    alg.oo_map(&x.involution(), &oo)
                        .unwrap()
                        .deviation(&xo.involution())
                        .0
                        <= 1e-11
                );
                assert!((oo.i_norm(&xo).unwrap() - alg.i_norm(&x).unwrap()).abs() <= 1e-12);
                let (r1, r2) = (oo.reduced_norm(&xo).unwrap(), alg.reduced_norm(&x).unwrap());
                assert!((r1 - r2).abs() <= 1e-9 * r2);
                // ξ ↦ ξ̄ reverses products into the conjugate algebra.
                let (xc, yc) = (
                    alg.conj_section_map(&x, &cj).unwrap(),
                    alg.conj_section_map(&y, &cj).unwrap(),
                );
                let lhs = alg.conj_section_map(&xy, &cj).unwrap();
                assert!(lhs.deviation(&cj.convolve(&yc, &xc).unwrap()).0 <= 1e-11);
            }
        }
    }

    #[test]
    fn faithfulness() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let alg = swap_algebra();
        for _ in 0..10 {
            let x = random_section(&alg, &mut rng);
            assert!(alg.reduced_norm(&x).unwrap() > 1e-6);
        }
        let tiny = alg.delta(1, vec![c(1e-13, 0.0), I * 1e-13]).unwrap();
        assert!(alg.reduced_norm(&tiny).unwrap() < 1e-12);
    }

    #[test]
    fn mismatched_sections_are_rejected() {
        let a = pauli_algebra();
        let b = swap_algebra();
        assert!(matches!(
            a.convolve(&a.zero(), &b.zero()),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            a.section(vec![vec![ONE]; 3]),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            a.unit_norm(&a.zero(), 5),
            Err(Error::InvalidInput(_))
        ));
    }
}
