//! Finite groupoids as explicit composition tables, and Haar systems on them.
//!
//! Arrows and units are addressed by dense indices internally; their string
//! identifiers are kept for I/O and witnesses. A [`FiniteGroupoid`] may hold
//! tables that violate the groupoid axioms (e.g. a corrupted input file);
//! [`FiniteGroupoid::validate`] lists every violation, and the algebra layers
//! refuse to build on top of an invalid groupoid.

mod build;
mod haar;

use std::collections::HashMap;

use serde_json::json;

use crate::validation::ValidationReport;
use crate::{Error, Result};

pub use build::{
    action_groupoid, cyclic_group, group_groupoid, klein_four, opposite_groupoid, pair_groupoid,
    product_groupoid, symmetric_group, zn_product, CayleyTable,
};
pub use haar::HaarSystem;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arrow {
    pub id: String,
    pub src: usize,
    pub rng: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroupoid {
    units: Vec<String>,
    arrows: Vec<Arrow>,
    inv: Vec<usize>,
    /// Row-major `n × n`; `comp[g * n + h]` is `gh` when defined.
    comp: Vec<Option<usize>>,
    unit_arrow: Vec<usize>,
    arrow_index: HashMap<String, usize>,
    unit_index: HashMap<String, usize>,
    range_fibers: Vec<Vec<usize>>,
    source_fibers: Vec<Vec<usize>>,
}

impl FiniteGroupoid {
    /// Assembles a groupoid from index-based tables. Only structural problems
    /// (duplicate identifiers, indices out of range, conflicting table
    /// entries) are errors here; axioms are checked by [`Self::validate`].
    pub fn from_parts(
        units: Vec<String>,
        arrows: Vec<Arrow>,
        inv: Vec<usize>,
        comp: impl IntoIterator<Item = (usize, usize, usize)>,
        unit_arrow: Vec<usize>,
    ) -> Result<Self> {
        let n = arrows.len();
        let nu = units.len();
        if nu == 0 || n == 0 {
            return Err(Error::invalid(
                "a groupoid needs at least one unit and one arrow",
            ));
        }
        let mut unit_index = HashMap::with_capacity(nu);
        for (i, u) in units.iter().enumerate() {
            if unit_index.insert(u.clone(), i).is_some() {
                return Err(Error::invalid(format!("duplicate unit id {u:?}")));
            }
        }
        let mut arrow_index = HashMap::with_capacity(n);
        for (i, a) in arrows.iter().enumerate() {
            if arrow_index.insert(a.id.clone(), i).is_some() {
                return Err(Error::invalid(format!("duplicate arrow id {:?}", a.id)));
            }
            if a.src >= nu || a.rng >= nu {
                return Err(Error::invalid(format!(
                    "arrow {:?} has an unknown endpoint",
                    a.id
                )));
            }
        }
        if inv.len() != n || inv.iter().any(|&k| k >= n) {
            return Err(Error::invalid(
                "inverse table must map every arrow to an arrow",
            ));
        }
        if unit_arrow.len() != nu || unit_arrow.iter().any(|&k| k >= n) {
            return Err(Error::invalid("every unit needs an identity arrow"));
        }
        let mut table = vec![None; n * n];
        for (g, h, gh) in comp {
            if g >= n || h >= n || gh >= n {
                return Err(Error::invalid(
                    "composition entry refers to an unknown arrow",
                ));
            }
            match table[g * n + h] {
                Some(prev) if prev != gh => {
                    return Err(Error::invalid(format!(
                        "composition of ({:?}, {:?}) given twice with different values",
                        arrows[g].id, arrows[h].id
                    )))
                }
                _ => table[g * n + h] = Some(gh),
            }
        }
        let mut range_fibers = vec![Vec::new(); nu];
        let mut source_fibers = vec![Vec::new(); nu];
        for (i, a) in arrows.iter().enumerate() {
            range_fibers[a.rng].push(i);
            source_fibers[a.src].push(i);
        }
        Ok(FiniteGroupoid {
            units,
            arrows,
            inv,
            comp: table,
            unit_arrow,
            arrow_index,
            unit_index,
            range_fibers,
            source_fibers,
        })
    }

    pub fn num_arrows(&self) -> usize {
        self.arrows.len()
    }

    pub fn num_units(&self) -> usize {
        self.units.len()
    }

    pub fn units(&self) -> &[String] {
        &self.units
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn arrow_id(&self, g: usize) -> &str {
        &self.arrows[g].id
    }

    pub fn unit_id(&self, x: usize) -> &str {
        &self.units[x]
    }

    pub fn arrow_by_id(&self, id: &str) -> Option<usize> {
        self.arrow_index.get(id).copied()
    }

    pub fn unit_by_id(&self, id: &str) -> Option<usize> {
        self.unit_index.get(id).copied()
    }

    pub fn src(&self, g: usize) -> usize {
        self.arrows[g].src
    }

    pub fn rng(&self, g: usize) -> usize {
        self.arrows[g].rng
    }

    pub fn inv(&self, g: usize) -> usize {
        self.inv[g]
    }

    pub fn unit_arrow(&self, x: usize) -> usize {
        self.unit_arrow[x]
    }

    pub fn is_unit_arrow(&self, g: usize) -> bool {
        self.unit_arrow[self.rng(g)] == g || self.unit_arrow[self.src(g)] == g
    }

    pub fn composable(&self, g: usize, h: usize) -> bool {
        self.src(g) == self.rng(h)
    }

    /// The table entry for `(g, h)`, whether or not the pair is composable.
    pub fn try_compose(&self, g: usize, h: usize) -> Option<usize> {
        self.comp[g * self.num_arrows() + h]
    }

    /// `gh` for a composable pair of a validated groupoid.
    ///
    /// Panics if the table has no entry; callers hold a validated groupoid.
    pub fn compose(&self, g: usize, h: usize) -> usize {
        self.try_compose(g, h).unwrap_or_else(|| {
            panic!(
                "composition ({}, {}) undefined",
                self.arrow_id(g),
                self.arrow_id(h)
            )
        })
    }

    /// `G^x = r⁻¹(x)`.
    pub fn range_fiber(&self, x: usize) -> &[usize] {
        &self.range_fibers[x]
    }

    /// `G_x = s⁻¹(x)`.
    pub fn source_fiber(&self, x: usize) -> &[usize] {
        &self.source_fibers[x]
    }

    /// Composable pairs `(g, h)` in lexicographic index order.
    pub fn composable_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.num_arrows())
            .flat_map(move |g| self.range_fiber(self.src(g)).iter().map(move |&h| (g, h)))
    }

    /// All `(g, h, gh)` entries of the composition table.
    pub fn comp_entries(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        let n = self.num_arrows();
        self.comp
            .iter()
            .enumerate()
            .filter_map(move |(k, v)| v.map(|gh| (k / n, k % n, gh)))
    }

    /// Overwrites one composition entry (used for fault injection and repair).
    pub fn set_comp(&mut self, g: usize, h: usize, value: Option<usize>) {
        let n = self.num_arrows();
        self.comp[g * n + h] = value;
    }

    pub fn set_inv(&mut self, g: usize, value: usize) {
        self.inv[g] = value;
    }

    /// Every violated groupoid axiom, with the offending arrows.
    pub fn validate(&self) -> ValidationReport {
        let n = self.num_arrows();
        let id = |g: usize| self.arrow_id(g).to_string();
        let mut rep = ValidationReport::default();
        // How often each table entry takes part in a failed law.
        let mut blame: HashMap<(usize, usize), usize> = HashMap::new();

        for (x, &e) in self.unit_arrow.iter().enumerate() {
            if self.src(e) != x || self.rng(e) != x {
                rep.push(
                    "unit arrow endpoints",
                    1.0,
                    json!({ "unit": self.unit_id(x), "arrow": id(e) }),
                );
            }
        }
        for g in 0..n {
            let gi = self.inv(g);
            if self.src(gi) != self.rng(g) || self.rng(gi) != self.src(g) {
                rep.push(
                    "inverse endpoints",
                    1.0,
                    json!({ "arrow": id(g), "inverse": id(gi) }),
                );
            }
            if self.inv(gi) != g {
                rep.push("inverse involutive", 1.0, json!({ "arrow": id(g), "inverse": id(gi), "inverse_of_inverse": id(self.inv(gi)) }));
            }
        }
        for g in 0..n {
            for h in 0..n {
                let entry = self.try_compose(g, h);
                match (self.composable(g, h), entry) {
                    (true, None) => rep.push(
                        "composition defined on composable pairs",
                        1.0,
                        json!({ "pair": [id(g), id(h)] }),
                    ),
                    (false, Some(gh)) => rep.push(
                        "composition undefined off composable pairs",
                        1.0,
                        json!({ "pair": [id(g), id(h)], "value": id(gh) }),
                    ),
                    (true, Some(gh)) => {
                        if self.rng(gh) != self.rng(g) || self.src(gh) != self.src(h) {
                            rep.push(
                                "composite endpoints",
                                1.0,
                                json!({ "pair": [id(g), id(h)], "value": id(gh) }),
                            );
                            *blame.entry((g, h)).or_default() += 1;
                        }
                    }
                    (false, None) => {}
                }
            }
        }
        for g in 0..n {
            let left = self.unit_arrow[self.rng(g)];
            let right = self.unit_arrow[self.src(g)];
            if self.try_compose(left, g) != Some(g) {
                rep.push(
                    "left unit law",
                    1.0,
                    json!({ "arrow": id(g), "unit_arrow": id(left) }),
                );
                *blame.entry((left, g)).or_default() += 1;
            }
            if self.try_compose(g, right) != Some(g) {
                rep.push(
                    "right unit law",
                    1.0,
                    json!({ "arrow": id(g), "unit_arrow": id(right) }),
                );
                *blame.entry((g, right)).or_default() += 1;
            }
            let gi = self.inv(g);
            if self.try_compose(g, gi) != Some(left) {
                rep.push(
                    "inverse law g·g⁻¹",
                    1.0,
                    json!({ "arrow": id(g), "inverse": id(gi) }),
                );
                *blame.entry((g, gi)).or_default() += 1;
            }
            if self.try_compose(gi, g) != Some(right) {
                rep.push(
                    "inverse law g⁻¹·g",
                    1.0,
                    json!({ "arrow": id(g), "inverse": id(gi) }),
                );
                *blame.entry((gi, g)).or_default() += 1;
            }
        }
        for (g, h) in self.composable_pairs().collect::<Vec<_>>() {
            let Some(gh) = self.try_compose(g, h) else {
                continue;
            };
            for &k in self.range_fiber(self.src(h)) {
                let Some(hk) = self.try_compose(h, k) else {
                    continue;
                };
                let (Some(left), Some(right)) = (self.try_compose(gh, k), self.try_compose(g, hk))
                else {
                    continue;
                };
                if left != right {
                    rep.push(
                        "associativity",
                        1.0,
                        json!({
                            "triple": [id(g), id(h), id(k)],
                            "(gh)k": { "gh": id(gh), "value": id(left) },
                            "g(hk)": { "hk": id(hk), "value": id(right) },
                        }),
                    );
                    for pair in [(g, h), (gh, k), (h, k), (g, hk)] {
                        *blame.entry(pair).or_default() += 1;
                    }
                }
            }
        }
        if let Some((&(g, h), &count)) = blame
            .iter()
            .max_by(|a, b| a.1.cmp(b.1).then_with(|| b.0.cmp(a.0)))
        {
            rep.localization = Some(json!({
                "most_implicated_pair": [id(g), id(h)],
                "table_value": self.try_compose(g, h).map(id),
                "violations_involving_it": count,
            }));
        }
        rep
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_valid()
    }

    /// Checks that `map` (an arrow relabeling) is an isomorphism onto `other`:
    /// a bijection that respects composability, composition and inverses.
    pub fn check_isomorphism(&self, other: &FiniteGroupoid, map: &[usize]) -> ValidationReport {
        let mut rep = ValidationReport::default();
        let n = self.num_arrows();
        if map.len() != n || other.num_arrows() != n {
            rep.push(
                "arrow count",
                1.0,
                json!({ "source": n, "target": other.num_arrows(), "map": map.len() }),
            );
            return rep;
        }
        let mut seen = vec![false; n];
        for &m in map {
            if m >= n || std::mem::replace(&mut seen[m], true) {
                rep.push("bijective", 1.0, json!({ "image": m }));
                return rep;
            }
        }
        for g in 0..n {
            for h in 0..n {
                if self.composable(g, h) != other.composable(map[g], map[h]) {
                    rep.push(
                        "composability",
                        1.0,
                        json!({ "pair": [self.arrow_id(g), self.arrow_id(h)] }),
                    );
                } else if self.composable(g, h) {
                    let lhs = self.try_compose(g, h).map(|gh| map[gh]);
                    if lhs != other.try_compose(map[g], map[h]) {
                        rep.push(
                            "composition",
                            1.0,
                            json!({ "pair": [self.arrow_id(g), self.arrow_id(h)] }),
                        );
                    }
                }
            }
            if map[self.inv(g)] != other.inv(map[g]) {
                rep.push("inverse", 1.0, json!({ "arrow": self.arrow_id(g) }));
            }
        }
        rep
    }

    /// Units reachable from `x` by an arrow.
    pub fn orbit(&self, x: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.source_fiber(x).iter().map(|&g| self.rng(g)).collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

#[cfg(test)]
mod tests;
