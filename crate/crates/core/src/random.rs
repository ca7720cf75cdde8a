//! Seeded random instances: functions, sections, groupoids, Haar systems,
//! cocycles and bundles.
//!
//! Sample `i` of a run with master seed `s` draws from ChaCha8 seeded with `s`
//! on stream `i`, so samples can be generated in any order or in parallel.
//! Functions and sections draw one complex Gaussian per fiber coordinate in
//! arrow order; on one-dimensional fibers they see identical values.

use std::sync::Arc;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::cocycle::random_cocycle;
use crate::conv_algebra::{ConvAlgebra, GroupoidFunction};
use crate::fell_bundle::{action_bundle, FellBundle, FiberAlgebra};
use crate::groupoid::{
    action_groupoid, cyclic_group, klein_four, opposite_groupoid, pair_groupoid, product_groupoid,
    symmetric_group, FiniteGroupoid, HaarSystem,
};
use crate::linalg::{CMatrix, ONE};
use crate::section_algebra::{Section, SectionAlgebra};
use crate::{Error, NumericPolicy, Result};

pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Standard complex Gaussian: independent real and imaginary parts of
/// variance ½.
pub fn complex_gaussian(rng: &mut impl Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn random_function(alg: &ConvAlgebra, rng: &mut impl Rng) -> GroupoidFunction {
    let n = alg.groupoid().num_arrows();
    GroupoidFunction::new(
        alg.groupoid().clone(),
        (0..n).map(|_| complex_gaussian(rng)).collect(),
    )
    .expect("length matches the arrow count")
}

pub fn random_section(alg: &SectionAlgebra, rng: &mut impl Rng) -> Section {
    let values = alg
        .bundle()
        .dims()
        .iter()
        .map(|&d| (0..d).map(|_| complex_gaussian(rng)).collect())
        .collect();
    alg.section(values).expect("shapes match the bundle")
}

/// `I + scale·G` with `G` Gaussian; retried until invertible.
pub fn random_near_identity(n: usize, scale: f64, rng: &mut impl Rng) -> CMatrix {
    loop {
        let m = CMatrix::from_fn(n, n, |r, c| {
            let g = complex_gaussian(rng) * scale;
            if r == c {
                g + ONE
            } else {
                g
            }
        });
        if m.inverse().is_some() {
            return m;
        }
    }
}

/// Haar system `w(g) = u(s(g))` with `u` log-uniform in `[¼, 4]`.
pub fn random_haar(g: &FiniteGroupoid, rng: &mut impl Rng) -> HaarSystem {
    let u: Vec<f64> = (0..g.num_units())
        .map(|_| 4f64.powf(rng.random_range(-1.0..1.0)))
        .collect();
    HaarSystem::from_unit_weights(g, &u).expect("weights are positive")
}

fn permutation_order(p: &[usize]) -> usize {
    let gcd = |mut a: usize, mut b: usize| {
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a
    };
    let mut order = 1;
    let mut seen = vec![false; p.len()];
    for start in 0..p.len() {
        let mut len = 0;
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            x = p[x];
            len += 1;
        }
        if len > 0 {
            order = order / gcd(order, len) * len;
        }
    }
    order
}

/// A cyclic group `ℤ/m` acting on `k` points through a random permutation
/// whose order divides `m`; several orbits with different isotropy.
fn random_cyclic_action(rng: &mut impl Rng, max_arrows: usize) -> Result<FiniteGroupoid> {
    let k = rng.random_range(2..=6.min(max_arrows / 2).max(2));
    loop {
        let mut p: Vec<usize> = (0..k).collect();
        p.shuffle(rng);
        let ord = permutation_order(&p);
        if ord * k > max_arrows {
            continue;
        }
        let mult = rng.random_range(1..=(max_arrows / (ord * k)).min(3));
        let m = ord * mult;
        let group = cyclic_group(m)?;
        let points: Vec<String> = (0..k).map(|x| format!("p{x}")).collect();
        let mut act = vec![(0..k).collect::<Vec<usize>>()];
        for a in 1..m {
            act.push((0..k).map(|x| p[act[a - 1][x]]).collect());
        }
        return action_groupoid(&group, &points, &act);
    }
}

/// A valid groupoid with at most `max_arrows` (≥ 8) arrows, drawn from pair
/// groupoids, finite groups, group actions, products and opposites of these.
pub fn random_groupoid(rng: &mut impl Rng, max_arrows: usize) -> Result<FiniteGroupoid> {
    if max_arrows < 8 {
        return Err(Error::invalid(
            "random groupoids need room for at least 8 arrows",
        ));
    }
    let isqrt = (max_arrows as f64).sqrt() as usize;
    let g = match rng.random_range(0..7) {
        0 => pair_groupoid(rng.random_range(1..=isqrt.min(6)))?,
        1 => cyclic_group(rng.random_range(1..=max_arrows.min(12)))?,
        2 => symmetric_group(3)?,
        3 => random_cyclic_action(rng, max_arrows)?,
        4 => {
            let n = if max_arrows >= 18 {
                rng.random_range(2..=3)
            } else {
                2
            };
            let room = max_arrows / (n * n);
            let grp = if room >= 4 && rng.random_bool(0.5) {
                klein_four()
            } else {
                cyclic_group(rng.random_range(2..=room))?
            };
            product_groupoid(&grp, &pair_groupoid(n)?)?
        }
        5 if max_arrows >= 18 => {
            let s3 = symmetric_group(3)?;
            let pts: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
            // S₃ is indexed by permutations of {0,1,2}; act through them.
            let perms = permutations3();
            action_groupoid(&s3, &pts, &perms)?
        }
        5 => symmetric_group(3)?,
        _ => opposite_groupoid(&random_cyclic_action(rng, max_arrows)?),
    };
    Ok(g)
}

fn permutations3() -> Vec<Vec<usize>> {
    // Same enumeration order as `symmetric_group(3)`.
    let mut out = Vec::new();
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                if a != b && b != c && a != c {
                    out.push(vec![a, b, c]);
                }
            }
        }
    }
    out
}

/// A random validated bundle with two-dimensional fibers: `ℂ²` acted on by
/// a small group (by the coordinate swap or trivially), twisted by a random
/// cocycle, optionally pulled back to a product with a pair groupoid, and
/// written in a random basis in every fiber.
pub fn random_bundle(
    rng: &mut impl Rng,
    policy: &NumericPolicy,
) -> Result<(FellBundle, HaarSystem)> {
    let swap = CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])?;
    let group = Arc::new(match rng.random_range(0..3) {
        0 => cyclic_group(2)?,
        1 => cyclic_group(4)?,
        _ => klein_four(),
    });
    let acts = rng.random_bool(0.75);
    let alpha: Vec<CMatrix> = (0..group.num_arrows())
        .map(|a| {
            if acts && a % 2 == 1 {
                swap.clone()
            } else {
                CMatrix::identity(2)
            }
        })
        .collect();
    let base = action_bundle(group.clone(), &FiberAlgebra::diagonal(2), &alpha, policy)?;
    let sigma = random_cocycle(group.clone(), rng.random_range(2..=4), rng)?;
    let mut bundle = base.twist(&sigma)?;
    if rng.random_bool(0.5) {
        let r = pair_groupoid(2)?;
        let prod = Arc::new(product_groupoid(&group, &r)?);
        bundle = bundle.pullback_to_product(prod, &r)?;
    }
    let s: Vec<CMatrix> = (0..bundle.groupoid().num_arrows())
        .map(|_| random_near_identity(2, 0.3, rng))
        .collect();
    let bundle = bundle.change_basis(&s)?;
    if let Some(v) = bundle.validate(policy).first() {
        return Err(Error::inconsistent(format!(
            "random bundle failed {} at {}",
            v.axiom, v.witness
        )));
    }
    let haar = random_haar(bundle.groupoid(), rng);
    Ok((bundle, haar))
}

/// Draws `random_groupoid` with a fresh generator per call.
pub fn random_groupoid_seeded(
    seed: u64,
    index: u64,
    max_arrows: usize,
) -> Result<Arc<FiniteGroupoid>> {
    random_groupoid(&mut sample_rng(seed, index), max_arrows).map(Arc::new)
}
