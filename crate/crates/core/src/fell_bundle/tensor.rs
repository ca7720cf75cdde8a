use num_complex::Complex64;

use crate::linalg::{CMatrix, ZERO};
use crate::{Error, Result};

/// A bilinear map `ℂ^left × ℂ^right → ℂ^out`, stored `[out][left][right]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3 {
    shape: (usize, usize, usize),
    data: Vec<Complex64>,
}

/// Four-index array produced when composing two multiplications.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor4 {
    shape: [usize; 4],
    data: Vec<Complex64>,
}

impl Tensor3 {
    pub fn zeros(out: usize, left: usize, right: usize) -> Self {
        Tensor3 {
            shape: (out, left, right),
            data: vec![ZERO; out * left * right],
        }
    }

    pub fn from_fn(
        out: usize,
        left: usize,
        right: usize,
        mut f: impl FnMut(usize, usize, usize) -> Complex64,
    ) -> Self {
        let mut t = Self::zeros(out, left, right);
        for o in 0..out {
            for l in 0..left {
                for r in 0..right {
                    t.set(o, l, r, f(o, l, r));
                }
            }
        }
        t
    }

    /// From nested `[out][left][right]` rows; all rows must be rectangular.
    pub fn from_nested(rows: &[Vec<Vec<Complex64>>]) -> Result<Self> {
        let out = rows.len();
        let left = rows.first().map_or(0, Vec::len);
        let right = rows.first().and_then(|r| r.first()).map_or(0, Vec::len);
        if rows
            .iter()
            .any(|m| m.len() != left || m.iter().any(|v| v.len() != right))
        {
            return Err(Error::invalid("ragged multiplication tensor"));
        }
        Ok(Self::from_fn(out, left, right, |o, l, r| rows[o][l][r]))
    }

    pub fn to_nested(&self) -> Vec<Vec<Vec<Complex64>>> {
        let (out, left, right) = self.shape;
        (0..out)
            .map(|o| {
                (0..left)
                    .map(|l| (0..right).map(|r| self.get(o, l, r)).collect())
                    .collect()
            })
            .collect()
    }

    pub fn scalar(z: Complex64) -> Self {
        Tensor3 {
            shape: (1, 1, 1),
            data: vec![z],
        }
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        self.shape
    }

    fn ix(&self, o: usize, l: usize, r: usize) -> usize {
        (o * self.shape.1 + l) * self.shape.2 + r
    }

    pub fn get(&self, o: usize, l: usize, r: usize) -> Complex64 {
        self.data[self.ix(o, l, r)]
    }

    pub fn set(&mut self, o: usize, l: usize, r: usize, z: Complex64) {
        let k = self.ix(o, l, r);
        self.data[k] = z;
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn apply(&self, a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
        let (out, left, right) = self.shape;
        assert!(
            a.len() == left && b.len() == right,
            "fiber vector of the wrong length"
        );
        (0..out)
            .map(|o| {
                let mut s = ZERO;
                for (l, x) in a.iter().enumerate() {
                    if *x == ZERO {
                        continue;
                    }
                    for (r, y) in b.iter().enumerate() {
                        s += self.get(o, l, r) * x * y;
                    }
                }
                s
            })
            .collect()
    }

    /// Matrix of `b ↦ T(a, b)`.
    pub fn left_matrix(&self, a: &[Complex64]) -> CMatrix {
        let (out, left, right) = self.shape;
        assert_eq!(a.len(), left);
        CMatrix::from_fn(out, right, |o, r| {
            (0..left).map(|l| a[l] * self.get(o, l, r)).sum()
        })
    }

    /// Matrix of `a ↦ T(a, b)`.
    pub fn right_matrix(&self, b: &[Complex64]) -> CMatrix {
        let (out, left, right) = self.shape;
        assert_eq!(b.len(), right);
        CMatrix::from_fn(out, left, |o, l| {
            (0..right).map(|r| b[r] * self.get(o, l, r)).sum()
        })
    }

    pub fn conj(&self) -> Self {
        Tensor3 {
            shape: self.shape,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Tensor3 {
            shape: self.shape,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    /// `T'(a, b) = T(b, a)`.
    pub fn swap_args(&self) -> Self {
        let (out, left, right) = self.shape;
        Self::from_fn(out, right, left, |o, l, r| self.get(o, r, l))
    }

    /// `T'(a, b) = P · T(S a, R b)`.
    pub fn transform(&self, p: &CMatrix, s: &CMatrix, r: &CMatrix) -> Self {
        let (out, left, right) = self.shape;
        let mut mid = Self::zeros(out, left, right);
        // Contract the two input slots first.
        for o in 0..out {
            for l in 0..left {
                for rr in 0..right {
                    let mut acc = ZERO;
                    for l2 in 0..left {
                        for r2 in 0..right {
                            acc += self.get(o, l2, r2) * s[(l2, l)] * r[(r2, rr)];
                        }
                    }
                    mid.set(o, l, rr, acc);
                }
            }
        }
        Self::from_fn(p.rows(), left, right, |o, l, rr| {
            (0..out).map(|m| p[(o, m)] * mid.get(m, l, rr)).sum()
        })
    }

    /// `(a, b, c) ↦ self(inner(a, b), c)`.
    pub fn compose_left(&self, inner: &Tensor3) -> Tensor4 {
        let (out, mid, right) = self.shape;
        let (_, a, b) = inner.shape;
        let mut t = Tensor4::zeros([out, a, b, right]);
        for o in 0..out {
            for i in 0..a {
                for j in 0..b {
                    for l in 0..right {
                        let s = (0..mid)
                            .map(|m| self.get(o, m, l) * inner.get(m, i, j))
                            .sum();
                        t.set([o, i, j, l], s);
                    }
                }
            }
        }
        t
    }

    /// `(a, b, c) ↦ self(a, inner(b, c))`.
    pub fn compose_right(&self, inner: &Tensor3) -> Tensor4 {
        let (out, left, mid) = self.shape;
        let (_, b, c) = inner.shape;
        let mut t = Tensor4::zeros([out, left, b, c]);
        for o in 0..out {
            for i in 0..left {
                for j in 0..b {
                    for l in 0..c {
                        let s = (0..mid)
                            .map(|m| self.get(o, i, m) * inner.get(m, j, l))
                            .sum();
                        t.set([o, i, j, l], s);
                    }
                }
            }
        }
        t
    }

    /// Largest entry gap and its index; `inf` on shape mismatch.
    pub fn deviation(&self, other: &Tensor3) -> (f64, [usize; 3]) {
        if self.shape != other.shape {
            return (f64::INFINITY, [0; 3]);
        }
        let (_, left, right) = self.shape;
        let mut worst = (0.0, [0; 3]);
        for (k, (a, b)) in self.data.iter().zip(&other.data).enumerate() {
            let d = (a - b).norm();
            if d > worst.0 {
                worst = (d, [k / (left * right), (k / right) % left, k % right]);
            }
        }
        worst
    }
}

impl Tensor4 {
    fn zeros(shape: [usize; 4]) -> Self {
        Tensor4 {
            shape,
            data: vec![ZERO; shape.iter().product()],
        }
    }

    fn ix(&self, i: [usize; 4]) -> usize {
        ((i[0] * self.shape[1] + i[1]) * self.shape[2] + i[2]) * self.shape[3] + i[3]
    }

    fn set(&mut self, i: [usize; 4], z: Complex64) {
        let k = self.ix(i);
        self.data[k] = z;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entry gap and the basis indices `[out, a, b, c]` where it occurs.
    pub fn deviation(&self, other: &Tensor4) -> (f64, [usize; 4]) {
        if self.shape != other.shape {
            return (f64::INFINITY, [0; 4]);
        }
        let s = self.shape;
        let mut worst = (0.0, [0; 4]);
        for (k, (a, b)) in self.data.iter().zip(&other.data).enumerate() {
            let d = (a - b).norm();
            if d > worst.0 {
                worst = (
                    d,
                    [
                        k / (s[1] * s[2] * s[3]),
                        (k / (s[2] * s[3])) % s[1],
                        (k / s[3]) % s[2],
                        k % s[3],
                    ],
                );
            }
        }
        worst
    }
}
