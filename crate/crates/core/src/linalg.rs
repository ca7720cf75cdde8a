//! Dense complex linear algebra.
//!
//! A thin layer over `nalgebra`: operator norms via the Hermitian eigenproblem
//! of `M*M`, classification of Gram matrices, and operator norms on
//! semi-inner-product spaces (quotient by the Gram kernel).

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::{Error, NumericPolicy, Result};

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Dense complex matrix.
#[derive(Clone, PartialEq)]
pub struct CMatrix(DMatrix<Complex64>);

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CMatrix {}x{} [", self.rows(), self.cols())?;
        for r in 0..self.rows() {
            write!(f, "[")?;
            for c in 0..self.cols() {
                let z = self[(r, c)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix(DMatrix::from_element(rows, cols, ZERO))
    }

    pub fn identity(n: usize) -> Self {
        CMatrix(DMatrix::identity(n, n))
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        CMatrix(DMatrix::from_fn(rows, cols, f))
    }

    /// Builds a matrix from row-major entries.
    pub fn from_row_slice(rows: usize, cols: usize, entries: &[Complex64]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::invalid(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(CMatrix(DMatrix::from_row_slice(rows, cols, entries)))
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::invalid("ragged rows"));
        }
        let flat: Vec<Complex64> = rows.iter().flatten().copied().collect();
        Self::from_row_slice(n, m, &flat)
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn diag(values: &[Complex64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |r, c| if r == c { values[r] } else { ZERO })
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let v: Vec<Complex64> = values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::diag(&v)
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn inner(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        CMatrix(self.0.adjoint())
    }

    pub fn transpose(&self) -> Self {
        CMatrix(self.0.transpose())
    }

    pub fn conj(&self) -> Self {
        CMatrix(self.0.map(|z| z.conj()))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        CMatrix(&self.0 * s)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    /// Frobenius inner product `tr(self* · other)`.
    pub fn frobenius_dot(&self, other: &CMatrix) -> Complex64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(
            v.len(),
            self.cols(),
            "dimension mismatch in matrix-vector product"
        );
        (0..self.rows())
            .map(|r| (0..self.cols()).map(|c| self[(r, c)] * v[c]).sum())
            .collect()
    }

    pub fn column(&self, c: usize) -> Vec<Complex64> {
        (0..self.rows()).map(|r| self[(r, c)]).collect()
    }

    /// Places the given square blocks along the diagonal.
    pub fn block_diag(blocks: &[CMatrix]) -> Self {
        let rows: usize = blocks.iter().map(CMatrix::rows).sum();
        let cols: usize = blocks.iter().map(CMatrix::cols).sum();
        let mut out = CMatrix::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for r in 0..b.rows() {
                for c in 0..b.cols() {
                    out[(r0 + r, c0 + c)] = b[(r, c)];
                }
            }
            r0 += b.rows();
            c0 += b.cols();
        }
        out
    }

    /// Columns `cols` of `self`, in order.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        CMatrix::from_fn(self.rows(), cols.len(), |r, c| self[(r, cols[c])])
    }

    /// `max |self − other|` entrywise; `inf` on shape mismatch.
    pub fn max_deviation(&self, other: &CMatrix) -> f64 {
        if self.rows() != other.rows() || self.cols() != other.cols() {
            return f64::INFINITY;
        }
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn check_finite(&self, what: &str) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::invalid(format!(
                "{what}: matrix has non-finite entries"
            )))
        }
    }

    /// Inverse of a square matrix, `None` if singular.
    pub fn inverse(&self) -> Option<CMatrix> {
        if !self.is_square() {
            return None;
        }
        self.0.clone().try_inverse().map(CMatrix)
    }

    /// `‖M − M*‖` entrywise, for square matrices.
    pub fn hermitian_defect(&self) -> f64 {
        self.max_deviation(&self.adjoint())
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, idx: (usize, usize)) -> &Complex64 {
        &self.0[idx]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, idx: (usize, usize)) -> &mut Complex64 {
        &mut self.0[idx]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        CMatrix(&self.0 * &rhs.0)
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        CMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        CMatrix(&self.0 - &rhs.0)
    }
}

/// Spectrum and eigenbasis of a Hermitian matrix, eigenvalues descending.
#[derive(Debug, Clone)]
pub struct HermEig {
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector of `values[k]`.
    pub vectors: CMatrix,
}

impl HermEig {
    /// `V · diag(λ) · V*`.
    pub fn reconstruct(&self) -> CMatrix {
        let d = CMatrix::diag_real(&self.values);
        &(&self.vectors * &d) * &self.vectors.adjoint()
    }
}

/// Hermitian eigendecomposition with the default Hermiticity tolerance.
pub fn herm_eig(m: &CMatrix) -> Result<HermEig> {
    herm_eig_tol(m, NumericPolicy::default().herm_tol)
}

/// Hermitian eigendecomposition. `m` must satisfy
/// `max|M − M*| ≤ tol · max(1, max|M|)`; it is symmetrized before solving.
pub fn herm_eig_tol(m: &CMatrix, tol: f64) -> Result<HermEig> {
    m.check_finite("herm_eig")?;
    if !m.is_square() {
        return Err(Error::invalid(format!(
            "herm_eig: {}x{} is not square",
            m.rows(),
            m.cols()
        )));
    }
    let defect = m.hermitian_defect();
    if defect > tol * m.max_abs().max(1.0) {
        return Err(Error::invalid(format!(
            "herm_eig: matrix is not Hermitian (defect {defect:e})"
        )));
    }
    let n = m.rows();
    if n == 0 {
        return Ok(HermEig {
            values: vec![],
            vectors: CMatrix::zeros(0, 0),
        });
    }
    let sym = (&m.0 + m.0.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(HermEig { values, vectors })
}

/// Largest singular value.
pub fn op_norm(m: &CMatrix) -> Result<f64> {
    m.check_finite("op_norm")?;
    if m.rows() == 0 || m.cols() == 0 {
        return Ok(0.0);
    }
    // The smaller of M*M and MM* has the same nonzero spectrum.
    let gram = if m.cols() <= m.rows() {
        &m.adjoint() * m
    } else {
        m * &m.adjoint()
    };
    let eig = herm_eig_tol(&gram, f64::INFINITY)?;
    Ok(eig.values[0].max(0.0).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Definiteness {
    PositiveDefinite,
    PositiveSemidefinite { kernel_dim: usize },
    Indefinite { min_eigenvalue: f64 },
}

/// Classifies a Hermitian matrix by the sign pattern of its spectrum, with
/// eigenvalues of modulus at most `tol · ‖Gr‖` treated as zero.
pub fn gram_posdef(gr: &CMatrix, tol: f64) -> Result<Definiteness> {
    let eig = herm_eig_tol(gr, tol)?;
    let scale = eig.values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let thr = tol * scale;
    let min = eig.values.last().copied().unwrap_or(0.0);
    if min < -thr {
        return Ok(Definiteness::Indefinite {
            min_eigenvalue: min,
        });
    }
    let kernel_dim = eig.values.iter().filter(|v| v.abs() <= thr).count();
    Ok(if kernel_dim == 0 {
        Definiteness::PositiveDefinite
    } else {
        Definiteness::PositiveSemidefinite { kernel_dim }
    })
}

/// Whitened coordinates on the quotient of a semi-inner-product space by the
/// kernel of its Gram matrix.
#[derive(Debug, Clone)]
pub struct GramQuotient {
    /// Orthonormal eigenvectors of the positive part of the spectrum.
    positive: CMatrix,
    sqrt_values: Vec<f64>,
    /// Orthonormal basis of the (numerical) kernel.
    kernel: CMatrix,
}

impl GramQuotient {
    pub fn new(gr: &CMatrix, policy: &NumericPolicy) -> Result<Self> {
        let eig = herm_eig_tol(gr, policy.herm_tol)?;
        let scale = eig.values.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let thr = policy.herm_tol * scale;
        if let Some(&min) = eig.values.last() {
            if min < -thr {
                return Err(Error::NotCStar(format!(
                    "Gram matrix is indefinite (eigenvalue {min:e})"
                )));
            }
        }
        let pos: Vec<usize> = (0..eig.values.len())
            .filter(|&k| eig.values[k] > thr)
            .collect();
        let ker: Vec<usize> = (0..eig.values.len())
            .filter(|&k| eig.values[k] <= thr)
            .collect();
        Ok(GramQuotient {
            positive: eig.vectors.select_columns(&pos),
            sqrt_values: pos.iter().map(|&k| eig.values[k].sqrt()).collect(),
            kernel: eig.vectors.select_columns(&ker),
        })
    }

    pub fn rank(&self) -> usize {
        self.sqrt_values.len()
    }

    pub fn kernel_dim(&self) -> usize {
        self.kernel.cols()
    }

    /// Size of the component of `M·ker` outside the kernel, relative to `M`.
    pub fn kernel_leak(&self, m: &CMatrix) -> f64 {
        if self.kernel_dim() == 0 || self.rank() == 0 {
            return 0.0;
        }
        let leak = &(&self.positive.adjoint() * m) * &self.kernel;
        leak.max_abs() / m.max_abs().max(1.0)
    }

    /// Matrix of the operator induced by `m` on the quotient, in a
    /// Gram-orthonormal basis. Fails if `m` does not preserve the kernel.
    pub fn compress(&self, m: &CMatrix, policy: &NumericPolicy) -> Result<CMatrix> {
        let leak = self.kernel_leak(m);
        if leak > policy.kernel_tol {
            return Err(Error::inconsistent(format!(
                "operator does not preserve the Gram kernel (leak {leak:e})"
            )));
        }
        let inner = &(&self.positive.adjoint() * m) * &self.positive;
        let s = &self.sqrt_values;
        Ok(CMatrix::from_fn(s.len(), s.len(), |r, c| {
            inner[(r, c)] * (s[r] / s[c])
        }))
    }
}

/// Operator norm of `m` on the semi-inner-product space with Gram matrix `gr`.
pub fn quotient_op_norm(m: &CMatrix, gr: &CMatrix) -> Result<f64> {
    quotient_op_norm_with(m, gr, &NumericPolicy::default())
}

pub fn quotient_op_norm_with(m: &CMatrix, gr: &CMatrix, policy: &NumericPolicy) -> Result<f64> {
    m.check_finite("quotient_op_norm")?;
    if !m.is_square() || m.rows() != gr.rows() {
        return Err(Error::invalid("quotient_op_norm: shape mismatch"));
    }
    let q = GramQuotient::new(gr, policy)?;
    op_norm(&q.compress(m, policy)?)
}

/// Orthonormal basis (as columns) of the kernel of `m`: eigenvectors of `M*M`
/// whose eigenvalue is at most `rel_tol` times the largest one.
pub fn null_space(m: &CMatrix, rel_tol: f64) -> Result<CMatrix> {
    m.check_finite("null_space")?;
    let gram = &m.adjoint() * m;
    let eig = herm_eig_tol(&gram, f64::INFINITY)?;
    let top = eig.values.first().copied().unwrap_or(0.0).max(0.0);
    let ker: Vec<usize> = (0..eig.values.len())
        .filter(|&k| eig.values[k] <= rel_tol * top)
        .collect();
    Ok(eig.vectors.select_columns(&ker))
}

/// Dimension of the span of `mats` (Frobenius Gram rank at relative `rel_tol`).
pub fn span_rank(mats: &[CMatrix], rel_tol: f64) -> Result<usize> {
    if mats.is_empty() {
        return Ok(0);
    }
    let gram = CMatrix::from_fn(mats.len(), mats.len(), |r, c| {
        mats[r].frobenius_dot(&mats[c])
    });
    let eig = herm_eig_tol(&gram, f64::INFINITY)?;
    let top = eig.values[0].max(0.0);
    if top == 0.0 {
        return Ok(0);
    }
    Ok(eig.values.iter().filter(|&&v| v > rel_tol * top).count())
}
