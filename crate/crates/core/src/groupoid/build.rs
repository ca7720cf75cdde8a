use serde_json::json;

use super::{Arrow, FiniteGroupoid};
use crate::{Error, Result};

fn arrow(id: String, src: usize, rng: usize) -> Arrow {
    Arrow { id, src, rng }
}

/// The pair groupoid on `{1, …, n}`: arrows `(i,j)` from `j` to `i`, with
/// `(i,j)(j,k) = (i,k)`.
pub fn pair_groupoid(n: usize) -> Result<FiniteGroupoid> {
    if n == 0 {
        return Err(Error::invalid("pair groupoid needs n >= 1"));
    }
    let ix = |i: usize, j: usize| i * n + j;
    let units = (1..=n).map(|i| i.to_string()).collect();
    let mut arrows = Vec::with_capacity(n * n);
    let mut inv = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            arrows.push(arrow(format!("({},{})", i + 1, j + 1), j, i));
            inv.push(ix(j, i));
        }
    }
    let comp = (0..n).flat_map(move |i| {
        (0..n).flat_map(move |j| (0..n).map(move |k| (ix(i, j), ix(j, k), ix(i, k))))
    });
    let unit_arrow = (0..n).map(|i| ix(i, i)).collect();
    FiniteGroupoid::from_parts(units, arrows, inv, comp, unit_arrow)
}

/// A finite group given by its multiplication table: `table[a][b] = ab`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CayleyTable {
    pub elements: Vec<String>,
    pub table: Vec<Vec<usize>>,
}

impl CayleyTable {
    /// Checks the group axioms, returning the identity's index.
    pub fn check(&self) -> Result<usize> {
        let n = self.elements.len();
        if n == 0 {
            return Err(Error::invalid("empty Cayley table"));
        }
        if self.table.len() != n
            || self
                .table
                .iter()
                .any(|r| r.len() != n || r.iter().any(|&v| v >= n))
        {
            return Err(Error::invalid(
                "Cayley table must be a square table over its elements",
            ));
        }
        let t = &self.table;
        let name = |a: usize| self.elements[a].as_str();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if t[t[a][b]][c] != t[a][t[b][c]] {
                        return Err(Error::invalid(format!(
                            "not associative: witness triple ({}, {}, {})",
                            name(a),
                            name(b),
                            name(c)
                        )));
                    }
                }
            }
        }
        let e = (0..n)
            .find(|&e| (0..n).all(|a| t[e][a] == a && t[a][e] == a))
            .ok_or_else(|| Error::invalid("no identity element"))?;
        for a in 0..n {
            if !(0..n).any(|b| t[a][b] == e && t[b][a] == e) {
                return Err(Error::invalid(format!(
                    "element {} has no inverse",
                    name(a)
                )));
            }
        }
        Ok(e)
    }

    pub fn from_fn(elements: Vec<String>, mul: impl Fn(usize, usize) -> usize) -> Self {
        let n = elements.len();
        let table = (0..n)
            .map(|a| (0..n).map(|b| mul(a, b)).collect())
            .collect();
        CayleyTable { elements, table }
    }
}

/// A group as a one-unit groupoid. The unit carries the identity's name.
pub fn group_groupoid(table: &CayleyTable) -> Result<FiniteGroupoid> {
    let e = table.check()?;
    let n = table.elements.len();
    let arrows = table
        .elements
        .iter()
        .map(|id| arrow(id.clone(), 0, 0))
        .collect();
    let inv = (0..n)
        .map(|a| (0..n).find(|&b| table.table[a][b] == e).expect("checked"))
        .collect();
    let comp = (0..n).flat_map(|a| (0..n).map(move |b| (a, b, table.table[a][b])));
    FiniteGroupoid::from_parts(vec![table.elements[e].clone()], arrows, inv, comp, vec![e])
}

/// `ℤ/n` with elements named `"0"`, …, `"n-1"`.
pub fn cyclic_group(n: usize) -> Result<FiniteGroupoid> {
    if n == 0 {
        return Err(Error::invalid("cyclic group needs n >= 1"));
    }
    let elements = (0..n).map(|k| k.to_string()).collect();
    group_groupoid(&CayleyTable::from_fn(elements, |a, b| (a + b) % n))
}

/// `ℤ/n₁ × … × ℤ/n_k` with elements named `"(a1,…,ak)"`.
pub fn zn_product(orders: &[usize]) -> Result<FiniteGroupoid> {
    if orders.is_empty() || orders.contains(&0) {
        return Err(Error::invalid("orders must be positive"));
    }
    let total: usize = orders.iter().product();
    let digits = |mut k: usize| {
        let mut d = vec![0; orders.len()];
        for (slot, &m) in d.iter_mut().zip(orders).rev() {
            *slot = k % m;
            k /= m;
        }
        d
    };
    let undigits = |d: &[usize]| d.iter().zip(orders).fold(0, |acc, (&x, &m)| acc * m + x);
    let elements = (0..total)
        .map(|k| {
            let d: Vec<String> = digits(k).iter().map(usize::to_string).collect();
            format!("({})", d.join(","))
        })
        .collect();
    group_groupoid(&CayleyTable::from_fn(elements, |a, b| {
        let (da, db) = (digits(a), digits(b));
        let sum: Vec<usize> = da
            .iter()
            .zip(&db)
            .zip(orders)
            .map(|((x, y), m)| (x + y) % m)
            .collect();
        undigits(&sum)
    }))
}

/// The Klein four-group `ℤ/2 × ℤ/2`, elements `"(a,b)"`.
pub fn klein_four() -> FiniteGroupoid {
    zn_product(&[2, 2]).expect("valid orders")
}

/// The symmetric group on `n` letters; elements are images `"[p0,p1,…]"`,
/// composed as functions (`(στ)(i) = σ(τ(i))`).
pub fn symmetric_group(n: usize) -> Result<FiniteGroupoid> {
    if n == 0 || n > 5 {
        return Err(Error::invalid("symmetric group supported for 1 <= n <= 5"));
    }
    let mut perms: Vec<Vec<usize>> = vec![(0..n).collect()];
    // Lexicographic enumeration.
    loop {
        let mut p = perms.last().unwrap().clone();
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| p[i] < p[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| p[j] > p[i]).unwrap();
        p.swap(i, j);
        p[i + 1..].reverse();
        perms.push(p);
    }
    let names = perms
        .iter()
        .map(|p| {
            format!(
                "[{}]",
                p.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
            )
        })
        .collect();
    let pos = |q: &Vec<usize>| perms.iter().position(|p| p == q).unwrap();
    group_groupoid(&CayleyTable::from_fn(names, |a, b| {
        let q: Vec<usize> = (0..n).map(|i| perms[a][perms[b][i]]).collect();
        pos(&q)
    }))
}

/// The transformation groupoid of a group acting on a finite set.
///
/// `act[γ][x]` is the image of point `x` under group element `γ`. Arrows are
/// `(γ,x)` from `x` to `γ·x`; `(γ, δ·x)(δ, x) = (γδ, x)`.
pub fn action_groupoid(
    group: &FiniteGroupoid,
    points: &[String],
    act: &[Vec<usize>],
) -> Result<FiniteGroupoid> {
    if group.num_units() != 1 {
        return Err(Error::invalid("acting groupoid must have exactly one unit"));
    }
    let report = group.validate();
    if !report.is_valid() {
        return Err(Error::invalid(format!(
            "acting group is not a group: {}",
            json!(report.first())
        )));
    }
    let ng = group.num_arrows();
    let nx = points.len();
    if nx == 0 {
        return Err(Error::invalid("action needs a nonempty set"));
    }
    if act.len() != ng
        || act
            .iter()
            .any(|row| row.len() != nx || row.iter().any(|&y| y >= nx))
    {
        return Err(Error::invalid(
            "action table must map every (element, point) to a point",
        ));
    }
    let e = group.unit_arrow(0);
    for x in 0..nx {
        if act[e][x] != x {
            return Err(Error::invalid(format!(
                "identity moves point {}",
                points[x]
            )));
        }
        for a in 0..ng {
            for b in 0..ng {
                if act[a][act[b][x]] != act[group.compose(a, b)][x] {
                    return Err(Error::invalid(format!(
                        "not an action: ({} · {}) · {} differs from {} · ({} · {})",
                        group.arrow_id(a),
                        group.arrow_id(b),
                        points[x],
                        group.arrow_id(a),
                        group.arrow_id(b),
                        points[x]
                    )));
                }
            }
        }
    }
    let ix = |a: usize, x: usize| a * nx + x;
    let mut arrows = Vec::with_capacity(ng * nx);
    let mut inv = Vec::with_capacity(ng * nx);
    for a in 0..ng {
        for x in 0..nx {
            arrows.push(arrow(
                format!("({},{})", group.arrow_id(a), points[x]),
                x,
                act[a][x],
            ));
            inv.push(ix(group.inv(a), act[a][x]));
        }
    }
    let mut comp = Vec::new();
    for a in 0..ng {
        for b in 0..ng {
            for x in 0..nx {
                comp.push((ix(a, act[b][x]), ix(b, x), ix(group.compose(a, b), x)));
            }
        }
    }
    let unit_arrow = (0..nx).map(|x| ix(e, x)).collect();
    FiniteGroupoid::from_parts(points.to_vec(), arrows, inv, comp, unit_arrow)
}

/// `G × H` with componentwise structure. Arrow `(g,h)` has index
/// `g * |H| + h` and id `"(g;h)"`.
pub fn product_groupoid(g: &FiniteGroupoid, h: &FiniteGroupoid) -> Result<FiniteGroupoid> {
    for (name, x) in [("left", g), ("right", h)] {
        let rep = x.validate();
        if !rep.is_valid() {
            return Err(Error::invalid(format!(
                "{name} factor is not a groupoid: {}",
                json!(rep.first())
            )));
        }
    }
    let (ng, nh) = (g.num_arrows(), h.num_arrows());
    let nuh = h.num_units();
    let ux = |x: usize, y: usize| x * nuh + y;
    let ax = |a: usize, b: usize| a * nh + b;
    let mut units = Vec::new();
    for x in g.units() {
        for y in h.units() {
            units.push(format!("({x};{y})"));
        }
    }
    let mut arrows = Vec::with_capacity(ng * nh);
    let mut inv = Vec::with_capacity(ng * nh);
    for a in 0..ng {
        for b in 0..nh {
            arrows.push(arrow(
                format!("({};{})", g.arrow_id(a), h.arrow_id(b)),
                ux(g.src(a), h.src(b)),
                ux(g.rng(a), h.rng(b)),
            ));
            inv.push(ax(g.inv(a), h.inv(b)));
        }
    }
    let gp: Vec<_> = g.composable_pairs().collect();
    let hp: Vec<_> = h.composable_pairs().collect();
    let mut comp = Vec::with_capacity(gp.len() * hp.len());
    for &(a1, a2) in &gp {
        for &(b1, b2) in &hp {
            comp.push((
                ax(a1, b1),
                ax(a2, b2),
                ax(g.compose(a1, a2), h.compose(b1, b2)),
            ));
        }
    }
    let mut unit_arrow = Vec::new();
    for x in 0..g.num_units() {
        for y in 0..nuh {
            unit_arrow.push(ax(g.unit_arrow(x), h.unit_arrow(y)));
        }
    }
    FiniteGroupoid::from_parts(units, arrows, inv, comp, unit_arrow)
}

/// `G^op`: same arrows, source and range swapped, `h ·op g = gh`.
pub fn opposite_groupoid(g: &FiniteGroupoid) -> FiniteGroupoid {
    let arrows = g
        .arrows()
        .iter()
        .map(|a| arrow(a.id.clone(), a.rng, a.src))
        .collect();
    let inv = (0..g.num_arrows()).map(|a| g.inv(a)).collect();
    let comp: Vec<_> = g.comp_entries().map(|(a, b, ab)| (b, a, ab)).collect();
    let unit_arrow = (0..g.num_units()).map(|x| g.unit_arrow(x)).collect();
    FiniteGroupoid::from_parts(g.units().to_vec(), arrows, inv, comp, unit_arrow)
        .expect("opposite of a well-formed table is well formed")
}
