//! Wedderburn block sizes of the finite-dimensional C*-algebras built by the
//! other modules, computed from a faithful matrix model.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cocycle::TCocycle;
use crate::conv_algebra::ConvAlgebra;
use crate::fell_bundle::line_bundle;
use crate::groupoid::{pair_groupoid, product_groupoid, FiniteGroupoid, HaarSystem};
use crate::linalg::{herm_eig_tol, null_space, span_rank, CMatrix, ZERO};
use crate::section_algebra::SectionAlgebra;
use crate::{Error, NumericPolicy, Result};

/// Relative tolerance for span membership and ranks.
const SPAN_TOL: f64 = 1e-10;
/// Relative threshold on squared singular values of the commutator map.
const CENTER_TOL: f64 = 1e-12;
const MAX_ATTEMPTS: usize = 6;

/// A *-algebra of matrices given by a spanning set, with an orthonormal
/// (Frobenius) basis and its structure constants.
#[derive(Debug, Clone)]
pub struct MatrixAlgebraModel {
    basis: Vec<CMatrix>,
    /// `structure[i][j]` = coordinates of `B_i B_j`.
    structure: Vec<Vec<Vec<Complex64>>>,
}

impl MatrixAlgebraModel {
    /// Orthonormalizes the span of `generators` and checks that it is closed
    /// under products and adjoints.
    pub fn new(generators: &[CMatrix]) -> Result<Self> {
        let n = generators.len();
        if n == 0 {
            return Err(Error::invalid("algebra model needs at least one generator"));
        }
        let gram = CMatrix::from_fn(n, n, |r, c| generators[r].frobenius_dot(&generators[c]));
        let eig = herm_eig_tol(&gram, f64::INFINITY)?;
        let top = eig.values[0].max(0.0);
        let keep: Vec<usize> = (0..n)
            .filter(|&k| eig.values[k] > SPAN_TOL * SPAN_TOL * top)
            .collect();
        let (rows, cols) = (generators[0].rows(), generators[0].cols());
        let basis: Vec<CMatrix> = keep
            .iter()
            .map(|&k| {
                let s = 1.0 / eig.values[k].sqrt();
                let mut m = CMatrix::zeros(rows, cols);
                for (j, gen) in generators.iter().enumerate() {
                    let c = eig.vectors[(j, k)] * s;
                    if c != ZERO {
                        m = &m + &gen.scale(c);
                    }
                }
                m
            })
            .collect();

        let coords = |m: &CMatrix| -> (Vec<Complex64>, f64) {
            let c: Vec<Complex64> = basis.iter().map(|b| b.frobenius_dot(m)).collect();
            let mut r = m.clone();
            for (b, &z) in basis.iter().zip(&c) {
                r = &r - &b.scale(z);
            }
            let scale = m.frobenius_dot(m).re.sqrt().max(1.0);
            (c, r.frobenius_dot(&r).re.sqrt() / scale)
        };
        let mut structure = Vec::with_capacity(basis.len());
        for (i, bi) in basis.iter().enumerate() {
            let (_, res) = coords(&bi.adjoint());
            if res > SPAN_TOL {
                return Err(Error::inconsistent(format!(
                    "model not closed under adjoints (residual {res:e} at basis {i})"
                )));
            }
            let mut row = Vec::with_capacity(basis.len());
            for (j, bj) in basis.iter().enumerate() {
                let (c, res) = coords(&(bi * bj));
                if res > SPAN_TOL {
                    return Err(Error::inconsistent(format!(
                        "model not closed under products (residual {res:e} at basis pair ({i}, {j}))"
                    )));
                }
                row.push(c);
            }
            structure.push(row);
        }
        Ok(MatrixAlgebraModel { basis, structure })
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[CMatrix] {
        &self.basis
    }

    fn combine(&self, coeffs: &[Complex64]) -> CMatrix {
        let b = &self.basis[0];
        let mut m = CMatrix::zeros(b.rows(), b.cols());
        for (bk, &c) in self.basis.iter().zip(coeffs) {
            if c != ZERO {
                m = &m + &bk.scale(c);
            }
        }
        m
    }

    /// Coordinates of a basis of the center.
    pub fn center(&self) -> Result<Vec<Vec<Complex64>>> {
        let d = self.dimension();
        // Column k: coordinates of [B_k, B_j] for all j, stacked.
        let k = CMatrix::from_fn(d * d, d, |r, c| {
            let (j, l) = (r / d, r % d);
            self.structure[c][j][l] - self.structure[j][c][l]
        });
        let ns = null_space(&k, CENTER_TOL)?;
        Ok((0..ns.cols()).map(|c| ns.column(c)).collect())
    }

    /// Matrix sizes of the simple summands, ascending.
    pub fn block_dims(&self, seed: u64, policy: &NumericPolicy) -> Result<Vec<usize>> {
        let center = self.center()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut last_err = None;
        for _ in 0..MAX_ATTEMPTS {
            match self.try_split(&center, &mut rng, policy) {
                Ok(dims) => return Ok(dims),
                Err(e) => last_err = Some(e),
            }
        }
        Err(last_err.unwrap_or_else(|| Error::inconsistent("Wedderburn splitting failed")))
    }

    fn try_split(
        &self,
        center: &[Vec<Complex64>],
        rng: &mut ChaCha8Rng,
        policy: &NumericPolicy,
    ) -> Result<Vec<usize>> {
        let d = self.dimension();
        let mut coeffs = vec![ZERO; d];
        for z in center {
            let r = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            for (c, v) in coeffs.iter_mut().zip(z) {
                *c += v * r;
            }
        }
        let a = self.combine(&coeffs);
        let h = &a + &a.adjoint();
        let eig = herm_eig_tol(&h, f64::INFINITY)?;
        let scale = eig
            .values
            .iter()
            .map(|v| v.abs())
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);
        // Cluster the spectrum at gaps above gap_tol · scale.
        let mut clusters: Vec<Vec<usize>> = vec![vec![0]];
        for k in 1..eig.values.len() {
            if eig.values[k - 1] - eig.values[k] > policy.gap_tol * scale {
                clusters.push(vec![k]);
            } else {
                clusters.last_mut().unwrap().push(k);
            }
        }
        if clusters.len() != center.len() {
            return Err(Error::inconsistent(format!(
                "central element separated {} spectral clusters for a {}-dimensional center",
                clusters.len(),
                center.len()
            )));
        }
        let mut dims = Vec::with_capacity(clusters.len());
        for cl in &clusters {
            let v = eig.vectors.select_columns(cl);
            let p = &v * &v.adjoint();
            let corners: Vec<CMatrix> = self.basis.iter().map(|b| &(&p * b) * &p).collect();
            let r = span_rank(&corners, SPAN_TOL)?;
            let n = (r as f64).sqrt().round() as usize;
            if n * n != r || n == 0 {
                return Err(Error::inconsistent(format!(
                    "central block of dimension {r} is not a full matrix algebra"
                )));
            }
            dims.push(n);
        }
        let total: usize = dims.iter().map(|n| n * n).sum();
        if total != d {
            return Err(Error::inconsistent(format!(
                "block dimensions {dims:?} do not add up to {d}"
            )));
        }
        dims.sort_unstable();
        Ok(dims)
    }
}

/// `⊕ₓ πₓ` applied to the δ-basis of `𝔠c(G, λ)`.
pub fn algebra_model(alg: &ConvAlgebra) -> Result<MatrixAlgebraModel> {
    let g = alg.groupoid();
    let gens = (0..g.num_arrows())
        .map(|a| {
            let f = alg.delta(a);
            let blocks = (0..g.num_units())
                .map(|x| alg.regular_rep(&f, x))
                .collect::<Result<Vec<_>>>()?;
            Ok(CMatrix::block_diag(&blocks))
        })
        .collect::<Result<Vec<_>>>()?;
    let model = MatrixAlgebraModel::new(&gens)?;
    if model.dimension() != g.num_arrows() {
        return Err(Error::inconsistent(
            "regular representation is not faithful",
        ));
    }
    Ok(model)
}

/// `⊕ₓ πₓ` (Gram-whitened) applied to the fiber-basis sections of `𝔠c(G, 𝒜)`.
pub fn algebra_model_bundle(alg: &SectionAlgebra) -> Result<MatrixAlgebraModel> {
    let b = alg.bundle();
    let mut gens = Vec::with_capacity(b.total_dim());
    for a in 0..b.groupoid().num_arrows() {
        for i in 0..b.dim(a) {
            let mut v = vec![ZERO; b.dim(a)];
            v[i] = Complex64::new(1.0, 0.0);
            gens.push(alg.whitened_rep(&alg.delta(a, v)?)?);
        }
    }
    let model = MatrixAlgebraModel::new(&gens)?;
    if model.dimension() != b.total_dim() {
        return Err(Error::inconsistent(
            "regular representation is not faithful",
        ));
    }
    Ok(model)
}

/// Block sizes of `C*(G, λ)` or, with a cocycle, of `C*(G, σ)`.
pub fn block_dims(
    g: Arc<FiniteGroupoid>,
    haar: HaarSystem,
    sigma: Option<&TCocycle>,
    policy: &NumericPolicy,
) -> Result<Vec<usize>> {
    let model = match sigma {
        None => algebra_model(&ConvAlgebra::new(g, haar)?)?,
        Some(s) => {
            let b = Arc::new(line_bundle(s)?);
            algebra_model_bundle(&SectionAlgebra::new(b, haar, policy)?)?
        }
    };
    model.block_dims(policy.seed, policy)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilizationResult {
    pub n: usize,
    pub base: Vec<usize>,
    pub stabilized: Vec<usize>,
    pub expected: Vec<usize>,
    pub pass: bool,
}

/// Compares the blocks of `C*(G × ℛₙ)` with `{n·m : m ∈ blocks(C*(G))}`,
/// with the cocycle (if any) extended trivially over `ℛₙ`.
pub fn stabilization_check(
    g: Arc<FiniteGroupoid>,
    haar: &HaarSystem,
    n: usize,
    sigma: Option<&TCocycle>,
    policy: &NumericPolicy,
) -> Result<StabilizationResult> {
    let r = pair_groupoid(n)?;
    let prod = Arc::new(product_groupoid(&g, &r)?);
    let prod_haar = haar.product(&HaarSystem::counting(&r));
    let prod_sigma = sigma
        .map(|s| s.extend_over_product(prod.clone(), &r))
        .transpose()?;
    let base = block_dims(g, haar.clone(), sigma, policy)?;
    let stabilized = block_dims(prod, prod_haar, prod_sigma.as_ref(), policy)?;
    let mut expected: Vec<usize> = base.iter().map(|m| m * n).collect();
    expected.sort_unstable();
    let pass = stabilized == expected;
    Ok(StabilizationResult {
        n,
        base,
        stabilized,
        expected,
        pass,
    })
}
