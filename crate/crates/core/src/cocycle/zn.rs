//! Linear algebra over `ℤ/N` for composite `N`.
//!
//! A matrix is brought to diagonal form `P A Q = D` with unimodular row and
//! column operations (Bezout steps), which is enough to decide solvability of
//! `A x = c` and to describe `ker A`.

/// `(g, x, y)` with `x a + y b = g = gcd(a, b)`.
fn egcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = egcd(b, a.rem_euclid(b));
        (g, y, x - (a / b) * y)
    }
}

pub(crate) fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn md(v: i128, n: u64) -> u64 {
    v.rem_euclid(n as i128) as u64
}

/// Inverse of `a` modulo `m` (requires `gcd(a, m) = 1`).
fn inv_mod(a: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let (_, x, _) = egcd(a as i128, m as i128);
    md(x, m)
}

/// Diagonal form of a matrix over `ℤ/N`.
#[derive(Debug, Clone)]
pub(crate) struct Diagonal {
    pub n: u64,
    pub cols: usize,
    /// Nonzero diagonal entries `d_0, …, d_{k-1}`.
    pub d: Vec<u64>,
    /// `cols × cols`, row-major: `x = Q y`.
    pub q: Vec<Vec<u64>>,
}

/// Reduces `a` (rows of length `cols`, entries in `[0, n)`) in place, applying
/// the row operations to every vector in `rhs`.
pub(crate) fn diagonalize(
    mut a: Vec<Vec<u64>>,
    cols: usize,
    n: u64,
    rhs: &mut [Vec<u64>],
) -> Diagonal {
    let rows = a.len();
    let mut q: Vec<Vec<u64>> = (0..cols)
        .map(|i| (0..cols).map(|j| u64::from(i == j)).collect())
        .collect();
    let mut d = Vec::new();

    // Replaces rows (t, i) by (x·t + y·i, u·t + v·i).
    let row_op = |a: &mut Vec<Vec<u64>>, rhs: &mut [Vec<u64>], t: usize, i: usize, m: [i128; 4]| {
        let mix = |p: u64, r: u64| {
            (
                md(m[0] * p as i128 + m[1] * r as i128, n),
                md(m[2] * p as i128 + m[3] * r as i128, n),
            )
        };
        for c in 0..cols {
            (a[t][c], a[i][c]) = mix(a[t][c], a[i][c]);
        }
        for v in rhs.iter_mut() {
            (v[t], v[i]) = mix(v[t], v[i]);
        }
    };
    let col_op =
        |a: &mut Vec<Vec<u64>>, q: &mut Vec<Vec<u64>>, t: usize, j: usize, m: [i128; 4]| {
            let mix = |p: u64, r: u64| {
                (
                    md(m[0] * p as i128 + m[1] * r as i128, n),
                    md(m[2] * p as i128 + m[3] * r as i128, n),
                )
            };
            for row in a.iter_mut().chain(q.iter_mut()) {
                (row[t], row[j]) = mix(row[t], row[j]);
            }
        };
    // Bezout matrix sending (p, b) to (gcd, 0).
    let bezout = |p: u64, b: u64| -> [i128; 4] {
        if b.is_multiple_of(p) {
            [1, 0, -((b / p) as i128), 1]
        } else {
            let (g, x, y) = egcd(p as i128, b as i128);
            [x, y, -(b as i128 / g), p as i128 / g]
        }
    };

    for t in 0..rows.min(cols) {
        let mut best: Option<(u64, usize, usize)> = None;
        for (i, row) in a.iter().enumerate().skip(t) {
            for (j, &v) in row.iter().enumerate().skip(t) {
                if v != 0 && best.is_none_or(|(g, _, _)| gcd(v, n) < g) {
                    best = Some((gcd(v, n), i, j));
                }
            }
        }
        let Some((_, i, j)) = best else { break };
        a.swap(t, i);
        for v in rhs.iter_mut() {
            v.swap(t, i);
        }
        for row in a.iter_mut().chain(q.iter_mut()) {
            row.swap(t, j);
        }
        loop {
            for i in t + 1..rows {
                if a[i][t] != 0 {
                    let m = bezout(a[t][t], a[i][t]);
                    row_op(&mut a, rhs, t, i, m);
                }
            }
            for j in t + 1..cols {
                if a[t][j] != 0 {
                    let m = bezout(a[t][t], a[t][j]);
                    // Column version: (col_t, col_j) ← (x·t + y·j, u·t + v·j).
                    col_op(&mut a, &mut q, t, j, m);
                }
            }
            if (t + 1..rows).all(|i| a[i][t] == 0) {
                break;
            }
        }
        d.push(a[t][t]);
    }
    Diagonal { n, cols, d, q }
}

impl Diagonal {
    /// A solution of `A x = c` given `P c` (the transformed right-hand side).
    pub fn solve(&self, pc: &[u64]) -> Option<Vec<u64>> {
        let n = self.n;
        let k = self.d.len();
        if pc.iter().skip(k).any(|&v| v != 0) {
            return None;
        }
        let mut y = vec![0u64; self.cols];
        for (i, &di) in self.d.iter().enumerate() {
            let g = gcd(di, n);
            if !pc[i].is_multiple_of(g) {
                return None;
            }
            let m = n / g;
            y[i] = ((pc[i] / g) as u128 * inv_mod((di / g) % m, m) as u128 % m as u128) as u64;
        }
        Some(self.apply_q(&y))
    }

    fn apply_q(&self, y: &[u64]) -> Vec<u64> {
        (0..self.cols)
            .map(|r| {
                let s: u128 = (0..self.cols)
                    .map(|c| self.q[r][c] as u128 * y[c] as u128 % self.n as u128)
                    .sum();
                (s % self.n as u128) as u64
            })
            .collect()
    }

    /// Generators of `ker A` as a subgroup of `(ℤ/N)^cols`.
    pub fn kernel_generators(&self) -> Vec<Vec<u64>> {
        let n = self.n;
        let mut out = Vec::new();
        for c in 0..self.cols {
            let scale = match self.d.get(c) {
                Some(&di) => n / gcd(di, n),
                None => 1,
            };
            if scale == n {
                continue;
            }
            let mut y = vec![0u64; self.cols];
            y[c] = scale;
            out.push(self.apply_q(&y));
        }
        out
    }
}
