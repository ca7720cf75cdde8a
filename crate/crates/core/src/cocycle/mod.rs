//! Normalized 2-cocycles with values in the `N`-th roots of unity.
//!
//! A cocycle is stored additively: `vals(g,h) = k` stands for
//! `exp(2πi k / N)`. Cohomology is decided exactly by linear algebra over
//! `ℤ/N`.

mod zn;

use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use serde_json::json;

use crate::groupoid::FiniteGroupoid;
use crate::validation::{Blame, ValidationReport};
use crate::{Error, Result};

/// `exp(2πi k / n)`, exact at multiples of a quarter turn and with
/// `root(n - k) == conj(root(k))` bit for bit.
pub fn root_of_unity(k: u64, n: u64) -> Complex64 {
    let k = k % n;
    if k == 0 {
        return Complex64::new(1.0, 0.0);
    }
    if 2 * k > n {
        return root_of_unity(n - k, n).conj();
    }
    if 2 * k == n {
        return Complex64::new(-1.0, 0.0);
    }
    if 4 * k == n {
        return Complex64::new(0.0, 1.0);
    }
    let t = std::f64::consts::TAU * k as f64 / n as f64;
    Complex64::new(t.cos(), t.sin())
}

#[derive(Debug, Clone, PartialEq)]
pub struct TCocycle {
    groupoid: Arc<FiniteGroupoid>,
    n: u64,
    /// Row-major `arrows × arrows`; zero off the composable pairs.
    vals: Vec<u64>,
}

/// Outcome of [`TCocycle::cohomologous`].
#[derive(Debug, Clone, PartialEq)]
pub enum Cohomology {
    /// `σ1 − σ2 = δb` for the returned `b` (indexed by arrow).
    Cohomologous(Vec<u64>),
    NotCohomologous,
}

impl Cohomology {
    pub fn is_cohomologous(&self) -> bool {
        matches!(self, Cohomology::Cohomologous(_))
    }
}

impl TCocycle {
    pub fn trivial(groupoid: Arc<FiniteGroupoid>, n: u64) -> Result<Self> {
        Self::new(groupoid, n, std::iter::empty())
    }

    /// Builds a cocycle from `(g, h, k)` entries; values are reduced mod `n`,
    /// missing pairs are 0. Entries on non-composable pairs are rejected.
    pub fn new(
        groupoid: Arc<FiniteGroupoid>,
        n: u64,
        entries: impl IntoIterator<Item = (usize, usize, i64)>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("cocycle modulus N must be positive"));
        }
        let na = groupoid.num_arrows();
        let mut vals = vec![0; na * na];
        for (g, h, k) in entries {
            if g >= na || h >= na {
                return Err(Error::invalid("cocycle entry refers to a missing arrow"));
            }
            if !groupoid.composable(g, h) {
                return Err(Error::invalid(format!(
                    "cocycle entry on non-composable pair ({}, {})",
                    groupoid.arrow_id(g),
                    groupoid.arrow_id(h)
                )));
            }
            vals[g * na + h] = (k as i128).rem_euclid(n as i128) as u64;
        }
        Ok(TCocycle { groupoid, n, vals })
    }

    /// `vals(g,h) = k(g,h)` on every composable pair.
    pub fn from_fn(
        groupoid: Arc<FiniteGroupoid>,
        n: u64,
        k: impl Fn(usize, usize) -> i64,
    ) -> Result<Self> {
        let entries: Vec<_> = groupoid
            .composable_pairs()
            .map(|(g, h)| (g, h, k(g, h)))
            .collect();
        Self::new(groupoid, n, entries)
    }

    /// `δb(g,h) = b(g) + b(h) − b(gh)`.
    pub fn coboundary(groupoid: Arc<FiniteGroupoid>, n: u64, b: &[u64]) -> Result<Self> {
        if b.len() != groupoid.num_arrows() {
            return Err(Error::invalid("coboundary needs one value per arrow"));
        }
        let g2 = groupoid.clone();
        Self::from_fn(groupoid, n, move |g, h| {
            b[g] as i64 + b[h] as i64 - b[g2.compose(g, h)] as i64
        })
    }

    pub fn groupoid(&self) -> &Arc<FiniteGroupoid> {
        &self.groupoid
    }

    pub fn modulus(&self) -> u64 {
        self.n
    }

    pub fn val(&self, g: usize, h: usize) -> u64 {
        self.vals[g * self.groupoid.num_arrows() + h]
    }

    /// `σ(g,h)` as a complex number.
    pub fn value(&self, g: usize, h: usize) -> Complex64 {
        root_of_unity(self.val(g, h), self.n)
    }

    pub fn set(&mut self, g: usize, h: usize, k: u64) {
        let na = self.groupoid.num_arrows();
        self.vals[g * na + h] = k % self.n;
    }

    /// `(g, h, vals(g,h))` over composable pairs.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        self.groupoid
            .composable_pairs()
            .map(|(g, h)| (g, h, self.val(g, h)))
    }

    pub fn is_trivial(&self) -> bool {
        self.vals.iter().all(|&v| v == 0)
    }

    /// Normalization and the cocycle identity, each failure with its pair or
    /// triple.
    pub fn validate(&self) -> ValidationReport {
        let g = &*self.groupoid;
        let n = self.n;
        let id = |a: usize| g.arrow_id(a).to_string();
        let mut rep = ValidationReport::default();
        let gap = |a: u64, b: u64| (root_of_unity(a, n) - root_of_unity(b, n)).norm();
        let mut blame = Blame::default();
        for a in 0..g.num_arrows() {
            let (l, r) = (g.unit_arrow(g.rng(a)), g.unit_arrow(g.src(a)));
            for (x, y) in [(l, a), (a, r)] {
                let v = self.val(x, y);
                if v != 0 {
                    rep.push(
                        "normalization",
                        gap(v, 0),
                        json!({ "pair": [id(x), id(y)], "value": v }),
                    );
                    blame.add(&[(x, y)]);
                }
            }
        }
        for (a, b) in g.composable_pairs() {
            let ab = g.compose(a, b);
            for &c in g.range_fiber(g.src(b)) {
                let bc = g.compose(b, c);
                let lhs = (self.val(a, b) + self.val(ab, c)) % n;
                let rhs = (self.val(a, bc) + self.val(b, c)) % n;
                if lhs != rhs {
                    rep.push(
                        "cocycle identity",
                        gap(lhs, rhs),
                        json!({ "triple": [id(a), id(b), id(c)], "lhs": lhs, "rhs": rhs }),
                    );
                    blame.add(&[(a, b), (ab, c), (a, bc), (b, c)]);
                }
            }
        }
        if let Some(((a, b), count)) = blame.worst() {
            rep.localization = Some(json!({
                "most_implicated_pair": [id(a), id(b)],
                "value": self.val(a, b),
                "violations_involving_it": count,
            }));
        }
        rep
    }

    /// `vals ↦ −vals`.
    pub fn conjugate(&self) -> TCocycle {
        let n = self.n;
        TCocycle {
            groupoid: self.groupoid.clone(),
            n,
            vals: self.vals.iter().map(|&v| (n - v) % n).collect(),
        }
    }

    /// `σᵒᵒ(g,h) = σ(h⁻¹, g⁻¹)`.
    pub fn oo(&self) -> TCocycle {
        let g = &*self.groupoid;
        let na = g.num_arrows();
        let mut vals = vec![0; na * na];
        for (a, b) in g.composable_pairs() {
            vals[a * na + b] = self.val(g.inv(b), g.inv(a));
        }
        TCocycle {
            groupoid: self.groupoid.clone(),
            n: self.n,
            vals,
        }
    }

    /// The cocycle `((g,a),(h,b)) ↦ σ(g,h)` on `G × H`, where `product` is
    /// the product groupoid with arrow `(g,a)` at index `g·|H| + a`.
    pub fn extend_over_product(
        &self,
        product: Arc<FiniteGroupoid>,
        other: &FiniteGroupoid,
    ) -> Result<TCocycle> {
        let nh = other.num_arrows();
        if product.num_arrows() != self.groupoid.num_arrows() * nh {
            return Err(Error::invalid(
                "product groupoid does not match the factors",
            ));
        }
        let entries: Vec<_> = product
            .composable_pairs()
            .map(|(p, q)| (p, q, self.val(p / nh, q / nh) as i64))
            .collect();
        TCocycle::new(product, self.n, entries)
    }

    fn check_compatible(&self, other: &TCocycle) -> Result<()> {
        if self.n != other.n {
            return Err(Error::invalid(format!(
                "cocycle moduli differ: {} vs {}",
                self.n, other.n
            )));
        }
        if !(Arc::ptr_eq(&self.groupoid, &other.groupoid) || *self.groupoid == *other.groupoid) {
            return Err(Error::invalid("cocycles live on different groupoids"));
        }
        Ok(())
    }

    /// Decides whether `self − other = δb` for some `b` vanishing on unit
    /// arrows.
    pub fn cohomologous(&self, other: &TCocycle) -> Result<Cohomology> {
        self.check_compatible(other)?;
        let g = &*self.groupoid;
        let n = self.n;
        let free: Vec<usize> = (0..g.num_arrows())
            .filter(|&a| !g.is_unit_arrow(a))
            .collect();
        let mut col = vec![usize::MAX; g.num_arrows()];
        for (k, &a) in free.iter().enumerate() {
            col[a] = k;
        }
        let mut rows = Vec::new();
        let mut c = Vec::new();
        for (a, b) in g.composable_pairs() {
            let mut row = vec![0u64; free.len()];
            let mut add = |x: usize, s: i64| {
                if col[x] != usize::MAX {
                    row[col[x]] = ((row[col[x]] as i64 + s).rem_euclid(n as i64)) as u64;
                }
            };
            add(a, 1);
            add(b, 1);
            add(g.compose(a, b), -1);
            rows.push(row);
            c.push((self.val(a, b) + n - other.val(a, b)) % n);
        }
        let mut rhs = vec![c];
        let diag = zn::diagonalize(rows, free.len(), n, &mut rhs);
        let Some(x) = diag.solve(&rhs[0]) else {
            return Ok(Cohomology::NotCohomologous);
        };
        let mut b = vec![0u64; g.num_arrows()];
        for (k, &a) in free.iter().enumerate() {
            b[a] = x[k];
        }
        let check = TCocycle::coboundary(self.groupoid.clone(), n, &b)?;
        if g.composable_pairs()
            .any(|(p, q)| (other.val(p, q) + check.val(p, q)) % n != self.val(p, q))
        {
            return Err(Error::inconsistent(
                "cohomology witness fails the coboundary equation",
            ));
        }
        Ok(Cohomology::Cohomologous(b))
    }

    /// JSON form of the values, keyed `"g|h"`, omitting zeros.
    pub fn vals_json(&self) -> serde_json::Value {
        let g = &*self.groupoid;
        let map: serde_json::Map<String, serde_json::Value> = self
            .entries()
            .filter(|&(_, _, v)| v != 0)
            .map(|(a, b, v)| (format!("{}|{}", g.arrow_id(a), g.arrow_id(b)), json!(v)))
            .collect();
        serde_json::Value::Object(map)
    }
}

/// Generators of the group of normalized cocycles on `g` with values in
/// `ℤ/n`, each as a list of `(g, h, k)` entries.
pub fn cocycle_generators(groupoid: &FiniteGroupoid, n: u64) -> Vec<Vec<(usize, usize, u64)>> {
    let g = groupoid;
    let pairs: Vec<(usize, usize)> = g
        .composable_pairs()
        .filter(|&(a, b)| !g.is_unit_arrow(a) && !g.is_unit_arrow(b))
        .collect();
    let na = g.num_arrows();
    let mut col = vec![usize::MAX; na * na];
    for (k, &(a, b)) in pairs.iter().enumerate() {
        col[a * na + b] = k;
    }
    let mut rows = Vec::new();
    for (a, b) in g.composable_pairs() {
        let ab = g.compose(a, b);
        for &c in g.range_fiber(g.src(b)) {
            let bc = g.compose(b, c);
            let mut row = vec![0u64; pairs.len()];
            for (x, y, s) in [(a, b, 1i64), (ab, c, 1), (a, bc, -1), (b, c, -1)] {
                let k = col[x * na + y];
                if k != usize::MAX {
                    row[k] = ((row[k] as i64 + s).rem_euclid(n as i64)) as u64;
                }
            }
            if row.iter().any(|&v| v != 0) {
                rows.push(row);
            }
        }
    }
    let diag = zn::diagonalize(rows, pairs.len(), n, &mut []);
    diag.kernel_generators()
        .into_iter()
        .map(|v| {
            pairs
                .iter()
                .zip(v)
                .filter(|(_, k)| *k != 0)
                .map(|(&(a, b), k)| (a, b, k))
                .collect()
        })
        .collect()
}

/// A uniformly random normalized cocycle (random combination of generators).
pub fn random_cocycle(
    groupoid: Arc<FiniteGroupoid>,
    n: u64,
    rng: &mut impl Rng,
) -> Result<TCocycle> {
    let gens = cocycle_generators(&groupoid, n);
    let mut sigma = TCocycle::trivial(groupoid, n)?;
    for gen in gens {
        let c = rng.random_range(0..n);
        for (a, b, k) in gen {
            let v = sigma.val(a, b);
            sigma.set(a, b, v + c * k % n);
        }
    }
    Ok(sigma)
}

/// A random `b` vanishing on unit arrows.
pub fn random_cochain(groupoid: &FiniteGroupoid, n: u64, rng: &mut impl Rng) -> Vec<u64> {
    (0..groupoid.num_arrows())
        .map(|a| {
            if groupoid.is_unit_arrow(a) {
                0
            } else {
                rng.random_range(0..n)
            }
        })
        .collect()
}
