//! JSON file formats. Complex numbers are `[re, im]` pairs (a bare number is
//! read as a real). Objects that reference other files (`"groupoid"`,
//! `"bundle"`) accept a path relative to the referring file or an inline
//! object.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_complex::Complex64;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::cocycle::TCocycle;
use crate::fell_bundle::{FellBundle, FiberAlgebra, Tensor3};
use crate::groupoid::{Arrow, CayleyTable, FiniteGroupoid, HaarSystem};
use crate::linalg::CMatrix;
use crate::{Error, Result};

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

/// Reads JSON files, resolving references and recording a SHA-256 digest of
/// every file it touches.
#[derive(Debug, Default, Clone)]
pub struct Loader {
    digests: BTreeMap<String, String>,
}

impl Loader {
    pub fn new() -> Self {
        Self::default()
    }

    /// Digests keyed by path as given.
    pub fn digests(&self) -> &BTreeMap<String, String> {
        &self.digests
    }

    /// Reads and parses `path`; `-` is standard input.
    pub fn load(&mut self, path: &Path) -> Result<Value> {
        let bytes = if path == Path::new("-") {
            let mut buf = Vec::new();
            std::io::stdin()
                .read_to_end(&mut buf)
                .map_err(|e| bad(format!("cannot read standard input: {e}")))?;
            buf
        } else {
            std::fs::read(path).map_err(|e| bad(format!("cannot read {}: {e}", path.display())))?
        };
        self.digests.insert(
            path.display().to_string(),
            hex::encode(Sha256::digest(&bytes)),
        );
        serde_json::from_slice(&bytes)
            .map_err(|e| bad(format!("{} is not valid JSON: {e}", path.display())))
    }

    /// A string is a path relative to `base`'s directory; an object is inline.
    pub fn resolve(&mut self, v: &Value, base: &Path) -> Result<(Value, PathBuf)> {
        match v {
            Value::String(p) => {
                let path = base.parent().unwrap_or(Path::new("")).join(p);
                Ok((self.load(&path)?, path))
            }
            Value::Object(_) => Ok((v.clone(), base.to_path_buf())),
            _ => Err(bad("reference must be a path string or an inline object")),
        }
    }

    pub fn groupoid(&mut self, path: &Path) -> Result<GroupoidData> {
        groupoid_from_json(&self.load(path)?)
    }
}

/// A parsed groupoid file. The groupoid itself may violate the axioms.
#[derive(Debug, Clone)]
pub struct GroupoidData {
    pub groupoid: Arc<FiniteGroupoid>,
    /// Per-arrow weights from the optional `"haar"` field.
    pub haar_weights: Option<Vec<f64>>,
}

impl GroupoidData {
    /// The file's Haar system, or counting measure when absent.
    pub fn haar(&self) -> Result<HaarSystem> {
        match &self.haar_weights {
            Some(w) => HaarSystem::from_weights(w.clone()),
            None => Ok(HaarSystem::counting(&self.groupoid)),
        }
    }
}

pub fn complex_from_json(v: &Value) -> Result<Complex64> {
    match v {
        Value::Number(n) => n
            .as_f64()
            .map(|re| Complex64::new(re, 0.0))
            .ok_or_else(|| bad("bad number")),
        Value::Array(a) if a.len() == 2 => {
            let re = a[0]
                .as_f64()
                .ok_or_else(|| bad("complex entries must be numbers"))?;
            let im = a[1]
                .as_f64()
                .ok_or_else(|| bad("complex entries must be numbers"))?;
            Ok(Complex64::new(re, im))
        }
        _ => Err(bad(format!("expected a complex number [re, im], got {v}"))),
    }
}

pub fn complex_to_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

pub fn vector_from_json(v: &Value) -> Result<Vec<Complex64>> {
    v.as_array()
        .ok_or_else(|| bad("expected an array of complex numbers"))?
        .iter()
        .map(complex_from_json)
        .collect()
}

pub fn vector_to_json(v: &[Complex64]) -> Value {
    Value::Array(v.iter().map(|&z| complex_to_json(z)).collect())
}

pub fn matrix_from_json(v: &Value) -> Result<CMatrix> {
    let rows = v
        .as_array()
        .ok_or_else(|| bad("expected a matrix (array of rows)"))?;
    let rows = rows
        .iter()
        .map(vector_from_json)
        .collect::<Result<Vec<_>>>()?;
    CMatrix::from_rows(&rows)
}

pub fn matrix_to_json(m: &CMatrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|r| Value::Array((0..m.cols()).map(|c| complex_to_json(m[(r, c)])).collect()))
            .collect(),
    )
}

pub fn tensor_from_json(v: &Value) -> Result<Tensor3> {
    let outs = v
        .as_array()
        .ok_or_else(|| bad("expected a tensor [out][left][right]"))?;
    let nested = outs
        .iter()
        .map(|o| {
            o.as_array()
                .ok_or_else(|| bad("tensor slices must be matrices"))?
                .iter()
                .map(vector_from_json)
                .collect()
        })
        .collect::<Result<Vec<Vec<Vec<Complex64>>>>>()?;
    Tensor3::from_nested(&nested)
}

pub fn tensor_to_json(t: &Tensor3) -> Value {
    Value::Array(
        t.to_nested()
            .iter()
            .map(|m| Value::Array(m.iter().map(|r| vector_to_json(r)).collect()))
            .collect(),
    )
}

fn object<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| bad(format!("{what} must be a JSON object")))
}

fn field<'a>(v: &'a Map<String, Value>, key: &str, what: &str) -> Result<&'a Value> {
    v.get(key)
        .ok_or_else(|| bad(format!("{what} is missing {key:?}")))
}

fn string_list(v: &Value, what: &str) -> Result<Vec<String>> {
    v.as_array()
        .ok_or_else(|| bad(format!("{what} must be an array of strings")))?
        .iter()
        .map(|s| {
            s.as_str()
                .map(str::to_string)
                .ok_or_else(|| bad(format!("{what} must contain strings")))
        })
        .collect()
}

fn arrow_ix(g: &FiniteGroupoid, id: &str) -> Result<usize> {
    g.arrow_by_id(id)
        .ok_or_else(|| bad(format!("unknown arrow {id:?}")))
}

fn pair_key(g: &FiniteGroupoid, key: &str) -> Result<(usize, usize)> {
    let (a, b) = key
        .split_once('|')
        .ok_or_else(|| bad(format!("pair key {key:?} must look like \"g|h\"")))?;
    Ok((arrow_ix(g, a)?, arrow_ix(g, b)?))
}

/// Parses a groupoid file:
/// `{"units", "arrows": [{"id","src","rng"}], "inv": {id: id}, "comp": [[g,h,gh]], "haar"?, "unit_arrows"?}`.
/// Without `"unit_arrows"`, the identity at `x` is the loop at `x` acting
/// trivially on the most composable arrows.
pub fn groupoid_from_json(v: &Value) -> Result<GroupoidData> {
    let o = object(v, "groupoid")?;
    let units = string_list(field(o, "units", "groupoid")?, "units")?;
    let unit_ix = |id: &str| {
        units
            .iter()
            .position(|u| u == id)
            .ok_or_else(|| bad(format!("unknown unit {id:?}")))
    };
    let raw = field(o, "arrows", "groupoid")?
        .as_array()
        .ok_or_else(|| bad("arrows must be an array"))?;
    let mut arrows = Vec::with_capacity(raw.len());
    for a in raw {
        let a = object(a, "arrow")?;
        let s = |k: &str| {
            field(a, k, "arrow")?
                .as_str()
                .ok_or_else(|| bad(format!("arrow {k} must be a string")))
        };
        arrows.push(Arrow {
            id: s("id")?.to_string(),
            src: unit_ix(s("src")?)?,
            rng: unit_ix(s("rng")?)?,
        });
    }
    let n = arrows.len();
    let ix_of = |id: &Value| -> Result<usize> {
        let id = id
            .as_str()
            .ok_or_else(|| bad("arrow references must be strings"))?;
        arrows
            .iter()
            .position(|a| a.id == id)
            .ok_or_else(|| bad(format!("unknown arrow {id:?}")))
    };
    let inv_map = object(field(o, "inv", "groupoid")?, "inv")?;
    let mut inv = vec![usize::MAX; n];
    for (k, val) in inv_map {
        inv[ix_of(&Value::String(k.clone()))?] = ix_of(val)?;
    }
    if let Some(a) = inv.iter().position(|&i| i == usize::MAX) {
        return Err(bad(format!(
            "arrow {:?} has no inverse entry",
            arrows[a].id
        )));
    }
    let mut comp = Vec::new();
    for e in field(o, "comp", "groupoid")?
        .as_array()
        .ok_or_else(|| bad("comp must be an array"))?
    {
        match e.as_array().map(Vec::as_slice) {
            Some([a, b, c]) => comp.push((ix_of(a)?, ix_of(b)?, ix_of(c)?)),
            _ => return Err(bad(format!("comp entries must be [g, h, gh], got {e}"))),
        }
    }
    let unit_arrow = match o.get("unit_arrows") {
        Some(ua) => {
            let ua = object(ua, "unit_arrows")?;
            let mut out = vec![usize::MAX; units.len()];
            for (k, val) in ua {
                out[unit_ix(k)?] = ix_of(val)?;
            }
            if out.contains(&usize::MAX) {
                return Err(bad("unit_arrows must name an arrow for every unit"));
            }
            out
        }
        None => infer_unit_arrows(&units, &arrows, &comp)?,
    };
    let groupoid = Arc::new(FiniteGroupoid::from_parts(
        units, arrows, inv, comp, unit_arrow,
    )?);
    let haar_weights = match o.get("haar") {
        None | Some(Value::Null) => None,
        Some(h) => {
            let h = object(h, "haar")?;
            let mut w = vec![f64::NAN; n];
            for (k, val) in h {
                w[arrow_ix(&groupoid, k)?] = val
                    .as_f64()
                    .ok_or_else(|| bad("Haar weights must be numbers"))?;
            }
            if let Some(a) = w.iter().position(|x| x.is_nan()) {
                return Err(bad(format!(
                    "Haar weight missing for arrow {:?}",
                    groupoid.arrow_id(a)
                )));
            }
            Some(w)
        }
    };
    Ok(GroupoidData {
        groupoid,
        haar_weights,
    })
}

fn infer_unit_arrows(
    units: &[String],
    arrows: &[Arrow],
    comp: &[(usize, usize, usize)],
) -> Result<Vec<usize>> {
    let mut score = vec![0usize; arrows.len()];
    for &(a, b, c) in comp {
        if c == b && arrows[a].src == arrows[a].rng {
            score[a] += 1;
        }
        if c == a && arrows[b].src == arrows[b].rng {
            score[b] += 1;
        }
    }
    (0..units.len())
        .map(|x| {
            (0..arrows.len())
                .filter(|&a| arrows[a].src == x && arrows[a].rng == x)
                .max_by(|&a, &b| score[a].cmp(&score[b]).then(b.cmp(&a)))
                .ok_or_else(|| {
                    bad(format!(
                        "unit {:?} has no loop to serve as its identity",
                        units[x]
                    ))
                })
        })
        .collect()
}

/// Writes `"haar"` only when `haar` is given.
pub fn groupoid_to_json(g: &FiniteGroupoid, haar: Option<&HaarSystem>) -> Value {
    let id = |a: usize| g.arrow_id(a);
    let arrows: Vec<Value> = g
        .arrows()
        .iter()
        .map(|a| json!({"id": a.id, "src": g.unit_id(a.src), "rng": g.unit_id(a.rng)}))
        .collect();
    let inv: Map<String, Value> = (0..g.num_arrows())
        .map(|a| (id(a).to_string(), json!(id(g.inv(a)))))
        .collect();
    let comp: Vec<Value> = g
        .comp_entries()
        .map(|(a, b, c)| json!([id(a), id(b), id(c)]))
        .collect();
    let unit_arrows: Map<String, Value> = (0..g.num_units())
        .map(|x| (g.unit_id(x).to_string(), json!(id(g.unit_arrow(x)))))
        .collect();
    let mut out = json!({"units": g.units(), "arrows": arrows, "inv": inv, "comp": comp, "unit_arrows": unit_arrows});
    if let Some(h) = haar {
        let w: Map<String, Value> = (0..g.num_arrows())
            .map(|a| (id(a).to_string(), json!(h.weight(a))))
            .collect();
        out["haar"] = Value::Object(w);
    }
    out
}

/// `{"values": {arrowId: [re, im]}}`; missing arrows are 0.
pub fn function_from_json(v: &Value, g: &FiniteGroupoid) -> Result<Vec<Complex64>> {
    let o = object(v, "function")?;
    let vals = object(field(o, "values", "function")?, "values")?;
    let mut out = vec![Complex64::new(0.0, 0.0); g.num_arrows()];
    for (k, z) in vals {
        out[arrow_ix(g, k)?] = complex_from_json(z)?;
    }
    Ok(out)
}

pub fn function_to_json(g: &FiniteGroupoid, values: &[Complex64]) -> Value {
    let vals: Map<String, Value> = values
        .iter()
        .enumerate()
        .filter(|(_, z)| z.norm() != 0.0)
        .map(|(a, &z)| (g.arrow_id(a).to_string(), complex_to_json(z)))
        .collect();
    json!({ "values": vals })
}

/// `{"N": n, "vals": {"g|h": k}}`; `n_override` replaces (and must agree
/// with, when both are present) the file's modulus.
pub fn cocycle_from_json(
    v: &Value,
    g: Arc<FiniteGroupoid>,
    n_override: Option<u64>,
) -> Result<TCocycle> {
    let o = object(v, "cocycle")?;
    let n_file = o
        .get("N")
        .map(|n| {
            n.as_u64()
                .ok_or_else(|| bad("N must be a positive integer"))
        })
        .transpose()?;
    let n = match (n_file, n_override) {
        (Some(a), Some(b)) if a != b => {
            return Err(bad(format!(
                "cocycle file has N = {a} but N = {b} was requested"
            )))
        }
        (Some(a), _) | (None, Some(a)) => a,
        (None, None) => return Err(bad("cocycle modulus N missing")),
    };
    let mut entries = Vec::new();
    if let Some(vals) = o.get("vals") {
        for (k, val) in object(vals, "vals")? {
            let (a, b) = pair_key(&g, k)?;
            entries.push((
                a,
                b,
                val.as_i64()
                    .ok_or_else(|| bad("cocycle values must be integers"))?,
            ));
        }
    }
    TCocycle::new(g, n, entries)
}

pub fn cocycle_to_json(s: &TCocycle) -> Value {
    json!({"N": s.modulus(), "vals": s.vals_json()})
}

/// `{"dims": {g: d}, "mult": {"g|h": tensor}, "invol": {g: matrix}}`.
pub fn bundle_from_json(v: &Value, g: Arc<FiniteGroupoid>) -> Result<FellBundle> {
    let o = object(v, "bundle")?;
    if o.contains_key("norm") {
        return Err(bad("bundle files may not supply fiber norms; norms are derived from the structure constants"));
    }
    let na = g.num_arrows();
    let mut dims = vec![0; na];
    for (k, d) in object(field(o, "dims", "bundle")?, "dims")? {
        dims[arrow_ix(&g, k)?] = d
            .as_u64()
            .ok_or_else(|| bad("fiber dimensions must be nonnegative integers"))?
            as usize;
    }
    let mut mult = vec![None; na * na];
    for (k, t) in object(field(o, "mult", "bundle")?, "mult")? {
        let (a, b) = pair_key(&g, k)?;
        mult[a * na + b] = Some(tensor_from_json(t)?);
    }
    let mut invol: Vec<Option<CMatrix>> = vec![None; na];
    for (k, m) in object(field(o, "invol", "bundle")?, "invol")? {
        invol[arrow_ix(&g, k)?] = Some(matrix_from_json(m)?);
    }
    let invol = invol
        .into_iter()
        .enumerate()
        .map(|(a, m)| {
            m.ok_or_else(|| bad(format!("involution missing for arrow {:?}", g.arrow_id(a))))
        })
        .collect::<Result<Vec<_>>>()?;
    FellBundle::new(g, dims, mult, invol)
}

pub fn bundle_to_json(b: &FellBundle) -> Value {
    let g = b.groupoid();
    let id = |a: usize| g.arrow_id(a).to_string();
    let dims: Map<String, Value> = (0..g.num_arrows())
        .map(|a| (id(a), json!(b.dim(a))))
        .collect();
    let mult: Map<String, Value> = g
        .composable_pairs()
        .map(|(a, c)| {
            (
                format!("{}|{}", id(a), id(c)),
                tensor_to_json(b.tensor(a, c)),
            )
        })
        .collect();
    let invol: Map<String, Value> = (0..g.num_arrows())
        .map(|a| (id(a), matrix_to_json(b.invol(a))))
        .collect();
    json!({"dims": dims, "mult": mult, "invol": invol})
}

/// `{"values": {arrowId: [[re, im], …]}}`; missing arrows are 0.
pub fn section_from_json(v: &Value, b: &FellBundle) -> Result<Vec<Vec<Complex64>>> {
    let o = object(v, "section")?;
    let g = b.groupoid();
    let mut out: Vec<Vec<Complex64>> = b
        .dims()
        .iter()
        .map(|&d| vec![Complex64::new(0.0, 0.0); d])
        .collect();
    for (k, val) in object(field(o, "values", "section")?, "values")? {
        out[arrow_ix(g, k)?] = vector_from_json(val)?;
    }
    Ok(out)
}

pub fn section_to_json(b: &FellBundle, values: &[Vec<Complex64>]) -> Value {
    let g = b.groupoid();
    let vals: Map<String, Value> = values
        .iter()
        .enumerate()
        .map(|(a, v)| (g.arrow_id(a).to_string(), vector_to_json(v)))
        .collect();
    json!({ "values": vals })
}

/// `{"mult": tensor, "invol": matrix}`.
pub fn fiber_from_json(v: &Value) -> Result<FiberAlgebra> {
    let o = object(v, "fiber algebra")?;
    FiberAlgebra::new(
        tensor_from_json(field(o, "mult", "fiber algebra")?)?,
        matrix_from_json(field(o, "invol", "fiber algebra")?)?,
    )
}

/// `{elementId: matrix}`, one matrix per group element.
pub fn alpha_from_json(v: &Value, group: &FiniteGroupoid) -> Result<Vec<CMatrix>> {
    let o = object(v, "alpha")?;
    let mut out: Vec<Option<CMatrix>> = vec![None; group.num_arrows()];
    for (k, m) in o {
        out[arrow_ix(group, k)?] = Some(matrix_from_json(m)?);
    }
    out.into_iter()
        .enumerate()
        .map(|(a, m)| {
            m.ok_or_else(|| bad(format!("alpha missing for element {:?}", group.arrow_id(a))))
        })
        .collect()
}

/// `{"elements": [...], "table": [[id, ...], ...]}` with `table[a][b] = ab`.
pub fn cayley_from_json(v: &Value) -> Result<CayleyTable> {
    let o = object(v, "Cayley table")?;
    let elements = string_list(field(o, "elements", "Cayley table")?, "elements")?;
    let ix = |s: &Value| -> Result<usize> {
        let s = s
            .as_str()
            .ok_or_else(|| bad("table entries must be element ids"))?;
        elements
            .iter()
            .position(|e| e == s)
            .ok_or_else(|| bad(format!("unknown element {s:?}")))
    };
    let table = field(o, "table", "Cayley table")?
        .as_array()
        .ok_or_else(|| bad("table must be an array of rows"))?
        .iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(|| bad("table rows must be arrays"))?
                .iter()
                .map(ix)
                .collect()
        })
        .collect::<Result<Vec<Vec<usize>>>>()?;
    Ok(CayleyTable { elements, table })
}

/// A set file: an array of point ids, or `{"points": [...]}`.
pub fn set_from_json(v: &Value) -> Result<Vec<String>> {
    match v {
        Value::Array(_) => string_list(v, "set"),
        Value::Object(o) => string_list(field(o, "points", "set")?, "points"),
        _ => Err(bad("set must be an array of point ids")),
    }
}

/// `{elementId: {point: image}}`.
pub fn act_from_json(
    v: &Value,
    group: &FiniteGroupoid,
    points: &[String],
) -> Result<Vec<Vec<usize>>> {
    let o = object(v, "action")?;
    let pix = |s: &str| {
        points
            .iter()
            .position(|p| p == s)
            .ok_or_else(|| bad(format!("unknown point {s:?}")))
    };
    let mut out = vec![vec![usize::MAX; points.len()]; group.num_arrows()];
    for (k, row) in o {
        let a = arrow_ix(group, k)?;
        for (p, img) in object(row, "action row")? {
            out[a][pix(p)?] = pix(img
                .as_str()
                .ok_or_else(|| bad("action images must be point ids"))?)?;
        }
    }
    if out.iter().any(|r| r.contains(&usize::MAX)) {
        return Err(bad(
            "action must give the image of every point under every element",
        ));
    }
    Ok(out)
}

/// `{"u": {unitId: weight}}` or a plain `{unitId: weight}` map.
pub fn unit_weights_from_json(v: &Value, g: &FiniteGroupoid) -> Result<Vec<f64>> {
    let o = object(v, "unit weights")?;
    let o = match o.get("u") {
        Some(inner) => object(inner, "unit weights")?,
        None => o,
    };
    let mut out = vec![f64::NAN; g.num_units()];
    for (k, w) in o {
        let x = g
            .unit_by_id(k)
            .ok_or_else(|| bad(format!("unknown unit {k:?}")))?;
        out[x] = w
            .as_f64()
            .ok_or_else(|| bad("unit weights must be numbers"))?;
    }
    if out.iter().any(|w| w.is_nan()) {
        return Err(bad("unit weights must cover every unit"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocycle::TCocycle;
    use crate::fell_bundle::line_bundle;
    use crate::groupoid::{
        action_groupoid, cyclic_group, klein_four, pair_groupoid, product_groupoid,
    };
    use crate::NumericPolicy;

    #[test]
    fn groupoid_round_trip_without_unit_hints() {
        let z2 = cyclic_group(2).unwrap();
        let pts = vec!["a".to_string(), "b".to_string()];
        let act = action_groupoid(&z2, &pts, &[vec![0, 1], vec![1, 0]]).unwrap();
        for g in [
            pair_groupoid(3).unwrap(),
            klein_four(),
            product_groupoid(&act, &pair_groupoid(2).unwrap()).unwrap(),
        ] {
            let mut v = groupoid_to_json(&g, None);
            assert_eq!(*groupoid_from_json(&v).unwrap().groupoid, g);
            v.as_object_mut().unwrap().remove("unit_arrows");
            assert_eq!(*groupoid_from_json(&v).unwrap().groupoid, g);
        }
    }

    #[test]
    fn haar_weights_round_trip() {
        let g = product_groupoid(&cyclic_group(2).unwrap(), &pair_groupoid(2).unwrap()).unwrap();
        let h = HaarSystem::from_unit_weights(&g, &[0.5, 3.0]).unwrap();
        let d = groupoid_from_json(&groupoid_to_json(&g, Some(&h))).unwrap();
        assert_eq!(d.haar().unwrap(), h);
    }

    #[test]
    fn corrupted_comp_still_loads() {
        let g = klein_four();
        let mut v = groupoid_to_json(&g, None);
        v.as_object_mut().unwrap().remove("unit_arrows");
        v["comp"][5][2] = v["comp"][6][2].clone();
        let d = groupoid_from_json(&v).unwrap();
        assert!(!d.groupoid.validate().is_valid());
    }

    #[test]
    fn malformed_files_are_invalid_input() {
        let g = pair_groupoid(2).unwrap();
        let good = groupoid_to_json(&g, None);
        let mut cases = Vec::new();
        let mut v = good.clone();
        v.as_object_mut().unwrap().remove("inv");
        cases.push(v);
        let mut v = good.clone();
        v["comp"][0] = json!(["(1,1)", "nope", "(1,1)"]);
        cases.push(v);
        let mut v = good.clone();
        v["arrows"][0]["src"] = json!("7");
        cases.push(v);
        cases.push(json!([1, 2]));
        for c in cases {
            assert!(
                matches!(groupoid_from_json(&c), Err(Error::InvalidInput(_))),
                "{c}"
            );
        }
    }

    #[test]
    fn cocycle_and_bundle_round_trip() {
        let g = Arc::new(klein_four());
        let s = TCocycle::from_fn(g.clone(), 2, |a, b| ((a % 2) * (b / 2)) as i64).unwrap();
        let back = cocycle_from_json(&cocycle_to_json(&s), g.clone(), None).unwrap();
        assert_eq!(back, s);
        assert!(cocycle_from_json(&cocycle_to_json(&s), g.clone(), Some(3)).is_err());
        let b = line_bundle(&s).unwrap();
        let back = bundle_from_json(&bundle_to_json(&b), g).unwrap();
        assert_eq!(back, b);
        assert!(back.validate(&NumericPolicy::default()).is_valid());
        let mut with_norm = bundle_to_json(&b);
        with_norm["norm"] = json!({});
        assert!(bundle_from_json(&with_norm, back.groupoid().clone()).is_err());
    }

    #[test]
    fn complex_parsing() {
        assert_eq!(
            complex_from_json(&json!(2.5)).unwrap(),
            Complex64::new(2.5, 0.0)
        );
        assert_eq!(
            complex_from_json(&json!([1, -2])).unwrap(),
            Complex64::new(1.0, -2.0)
        );
        assert!(complex_from_json(&json!([1, 2, 3])).is_err());
        assert!(complex_from_json(&json!("x")).is_err());
    }
}
