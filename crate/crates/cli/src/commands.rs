use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use opalg::cocycle::{Cohomology, TCocycle};
use opalg::conv_algebra::ConvAlgebra;
use opalg::fell_bundle::{action_bundle, line_bundle, FellBundle};
use opalg::groupoid::{
    action_groupoid, cyclic_group, group_groupoid, opposite_groupoid, pair_groupoid,
    product_groupoid, FiniteGroupoid, HaarSystem,
};
use opalg::io::{self, GroupoidData, Loader};
use opalg::section_algebra::SectionAlgebra;
use opalg::structure::{algebra_model_bundle, block_dims};
use opalg::validation::ValidationReport;
use opalg::verify::{self, Report};
use opalg::{Error, NumericPolicy, Result};
use serde_json::{json, Value};

use crate::{
    AlgebraCmd, BundleBuild, BundleCmd, CocycleCmd, CocycleSource, Command, Global, GroupoidBuild,
    GroupoidCmd, HaarCmd, Out, Suite, VerifyArgs,
};

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

fn emit(v: &Value, out: &Out) -> Result<()> {
    match &out.out {
        Some(p) => {
            let text = serde_json::to_string_pretty(v).expect("JSON values serialize");
            std::fs::write(p, text + "\n")
                .map_err(|e| invalid(format!("cannot write {}: {e}", p.display())))
        }
        None => {
            print(v);
            Ok(())
        }
    }
}

/// Writes one JSON line to stdout; a closed pipe is not an error.
fn print(v: &Value) {
    let _ = writeln!(std::io::stdout().lock(), "{v}");
}

/// Prints the listing and returns exit code 2 when there are violations.
fn validation_outcome(rep: &ValidationReport, global: &Global, what: &str) -> u8 {
    let valid = rep.is_valid();
    print(
        &json!({ "valid": valid, "violations": rep.violations, "localization": rep.localization }),
    );
    if !global.quiet {
        match rep.first() {
            None => eprintln!("{what}: valid"),
            Some(v) => eprintln!(
                "{what}: {} violation(s), first: {} at {}",
                rep.violations.len(),
                v.axiom,
                v.witness
            ),
        }
    }
    if valid {
        0
    } else {
        2
    }
}

fn require_valid(gd: &GroupoidData) -> Result<()> {
    if let Some(v) = gd.groupoid.validate().first() {
        return Err(invalid(format!(
            "not a groupoid: {} at {}",
            v.axiom, v.witness
        )));
    }
    Ok(())
}

/// `explicit`, or else the `"groupoid"` reference inside `file`.
fn referenced_groupoid(
    loader: &mut Loader,
    explicit: Option<&Path>,
    file: &Value,
    path: &Path,
) -> Result<GroupoidData> {
    if let Some(p) = explicit {
        return loader.groupoid(p);
    }
    let r = file.get("groupoid").ok_or_else(|| {
        invalid(format!(
            "{} has no \"groupoid\" reference; pass --groupoid",
            path.display()
        ))
    })?;
    let (v, _) = loader.resolve(r, path)?;
    io::groupoid_from_json(&v)
}

fn load_cocycle(
    loader: &mut Loader,
    path: &Path,
    src: &CocycleSource,
) -> Result<(TCocycle, GroupoidData)> {
    let v = loader.load(path)?;
    let gd = referenced_groupoid(loader, src.groupoid.as_deref(), &v, path)?;
    let sigma = io::cocycle_from_json(&v, gd.groupoid.clone(), src.modulus)?;
    Ok((sigma, gd))
}

fn load_bundle(
    loader: &mut Loader,
    path: &Path,
    groupoid: Option<&Path>,
) -> Result<(FellBundle, GroupoidData)> {
    let v = loader.load(path)?;
    let gd = referenced_groupoid(loader, groupoid, &v, path)?;
    require_valid(&gd)?;
    Ok((io::bundle_from_json(&v, gd.groupoid.clone())?, gd))
}

fn haar_json(gd: &GroupoidData) -> Result<Option<HaarSystem>> {
    gd.haar_weights
        .as_ref()
        .map(|w| HaarSystem::from_weights(w.clone()))
        .transpose()
}

fn with_groupoid(mut v: Value, g: &FiniteGroupoid, haar: Option<&HaarSystem>) -> Value {
    v["groupoid"] = io::groupoid_to_json(g, haar);
    v
}

fn cocycle_out(s: &TCocycle, haar: Option<&HaarSystem>) -> Value {
    with_groupoid(io::cocycle_to_json(s), s.groupoid(), haar)
}

fn bundle_out(b: &FellBundle, haar: Option<&HaarSystem>) -> Value {
    with_groupoid(io::bundle_to_json(b), b.groupoid(), haar)
}

pub fn run(cmd: Command, global: &Global) -> Result<u8> {
    let policy = global.policy()?;
    let mut loader = Loader::new();
    match cmd {
        Command::Groupoid(c) => groupoid_cmd(c, &mut loader, global),
        Command::Haar(c) => haar_cmd(c, &mut loader, global),
        Command::Algebra(c) => algebra_cmd(c, &mut loader, &policy),
        Command::Cocycle(c) => cocycle_cmd(c, &mut loader, global),
        Command::Bundle(c) => bundle_cmd(c, &mut loader, global, &policy),
        Command::Verify(args) => verify_cmd(args, &mut loader, global, &policy),
    }
}

fn groupoid_cmd(cmd: GroupoidCmd, loader: &mut Loader, global: &Global) -> Result<u8> {
    match cmd {
        GroupoidCmd::Validate { file } => {
            let gd = loader.groupoid(&file)?;
            let mut rep = gd.groupoid.validate();
            if rep.is_valid() {
                rep.extend(gd.haar()?.validate(&gd.groupoid));
            }
            Ok(validation_outcome(&rep, global, "groupoid"))
        }
        GroupoidCmd::Build(b) => {
            let (g, out) = match b {
                GroupoidBuild::Pair { n, out } => (pair_groupoid(n)?, out),
                GroupoidBuild::Cyclic { n, out } => (cyclic_group(n)?, out),
                GroupoidBuild::Group { table, out } => (
                    group_groupoid(&io::cayley_from_json(&loader.load(&table)?)?)?,
                    out,
                ),
                GroupoidBuild::Action {
                    group,
                    set,
                    act,
                    out,
                } => {
                    let gd = loader.groupoid(&group)?;
                    require_valid(&gd)?;
                    let points = io::set_from_json(&loader.load(&set)?)?;
                    let table = io::act_from_json(&loader.load(&act)?, &gd.groupoid, &points)?;
                    (action_groupoid(&gd.groupoid, &points, &table)?, out)
                }
            };
            emit(&io::groupoid_to_json(&g, None), &out)?;
            Ok(0)
        }
        GroupoidCmd::Product { a, b, out } => {
            let (ga, gb) = (loader.groupoid(&a)?, loader.groupoid(&b)?);
            let g = product_groupoid(&ga.groupoid, &gb.groupoid)?;
            let haar = match (&ga.haar_weights, &gb.haar_weights) {
                (None, None) => None,
                _ => Some(ga.haar()?.product(&gb.haar()?)),
            };
            emit(&io::groupoid_to_json(&g, haar.as_ref()), &out)?;
            Ok(0)
        }
        GroupoidCmd::Opposite { file, out } => {
            let gd = loader.groupoid(&file)?;
            let haar = haar_json(&gd)?.map(|h| h.inverted(&gd.groupoid));
            emit(
                &io::groupoid_to_json(&opposite_groupoid(&gd.groupoid), haar.as_ref()),
                &out,
            )?;
            Ok(0)
        }
    }
}

fn haar_cmd(cmd: HaarCmd, loader: &mut Loader, global: &Global) -> Result<u8> {
    match cmd {
        HaarCmd::Counting { groupoid, out } => {
            let gd = loader.groupoid(&groupoid)?;
            emit(
                &io::groupoid_to_json(&gd.groupoid, Some(&HaarSystem::counting(&gd.groupoid))),
                &out,
            )?;
            Ok(0)
        }
        HaarCmd::UnitWeights { groupoid, u, out } => {
            let gd = loader.groupoid(&groupoid)?;
            let w = io::unit_weights_from_json(&loader.load(&u)?, &gd.groupoid)?;
            let h = HaarSystem::from_unit_weights(&gd.groupoid, &w)?;
            emit(&io::groupoid_to_json(&gd.groupoid, Some(&h)), &out)?;
            Ok(0)
        }
        HaarCmd::Validate { groupoid } => {
            let gd = loader.groupoid(&groupoid)?;
            require_valid(&gd)?;
            Ok(validation_outcome(
                &gd.haar()?.validate(&gd.groupoid),
                global,
                "Haar system",
            ))
        }
    }
}

fn algebra_cmd(cmd: AlgebraCmd, loader: &mut Loader, policy: &NumericPolicy) -> Result<u8> {
    match cmd {
        AlgebraCmd::Norms {
            groupoid,
            function,
            bundle,
            section,
        } => {
            if let (Some(b), Some(s)) = (bundle, section) {
                let (bundle, gd) = load_bundle(loader, &b, groupoid.as_deref())?;
                let bundle = Arc::new(bundle);
                let alg = SectionAlgebra::new(bundle.clone(), gd.haar()?, policy)?;
                let xi = alg.section(io::section_from_json(&loader.load(&s)?, &bundle)?)?;
                print(&alg.norms_json(&xi)?);
                return Ok(0);
            }
            let f = function.ok_or_else(|| invalid("--function is required"))?;
            let fv = loader.load(&f)?;
            let gd = referenced_groupoid(loader, groupoid.as_deref(), &fv, &f)?;
            let alg = ConvAlgebra::new(gd.groupoid.clone(), gd.haar()?)?;
            let func = alg.function(io::function_from_json(&fv, &gd.groupoid)?)?;
            print(&alg.norms_json(&func)?);
            Ok(0)
        }
        AlgebraCmd::Rep {
            groupoid,
            function,
            unit,
        } => {
            let fv = loader.load(&function)?;
            let gd = referenced_groupoid(loader, groupoid.as_deref(), &fv, &function)?;
            let g = gd.groupoid.clone();
            let alg = ConvAlgebra::new(g.clone(), gd.haar()?)?;
            let f = alg.function(io::function_from_json(&fv, &g)?)?;
            let x = g
                .unit_by_id(&unit)
                .ok_or_else(|| invalid(format!("unknown unit {unit:?}")))?;
            let m = alg.regular_rep(&f, x)?;
            let basis: Vec<&str> = g.source_fiber(x).iter().map(|&a| g.arrow_id(a)).collect();
            print(&json!({ "unit": unit, "basis": basis, "matrix": io::matrix_to_json(&m) }));
            Ok(0)
        }
        AlgebraCmd::Wedderburn {
            groupoid,
            cocycle,
            bundle,
        } => {
            let blocks = if let Some(c) = cocycle {
                let src = CocycleSource {
                    groupoid,
                    modulus: None,
                };
                let (sigma, gd) = load_cocycle(loader, &c, &src)?;
                require_valid(&gd)?;
                block_dims(gd.groupoid.clone(), gd.haar()?, Some(&sigma), policy)?
            } else if let Some(b) = bundle {
                let (bundle, gd) = load_bundle(loader, &b, groupoid.as_deref())?;
                let alg = SectionAlgebra::new(Arc::new(bundle), gd.haar()?, policy)?;
                algebra_model_bundle(&alg)?.block_dims(policy.seed, policy)?
            } else {
                let p = groupoid.ok_or_else(|| invalid("--groupoid is required"))?;
                let gd = loader.groupoid(&p)?;
                require_valid(&gd)?;
                block_dims(gd.groupoid.clone(), gd.haar()?, None, policy)?
            };
            print(&json!({ "blocks": blocks }));
            Ok(0)
        }
    }
}

fn cocycle_cmd(cmd: CocycleCmd, loader: &mut Loader, global: &Global) -> Result<u8> {
    match cmd {
        CocycleCmd::Validate { file, src } => {
            let (sigma, gd) = load_cocycle(loader, &file, &src)?;
            require_valid(&gd)?;
            Ok(validation_outcome(&sigma.validate(), global, "cocycle"))
        }
        CocycleCmd::Conjugate { file, src, out } => {
            let (sigma, gd) = load_cocycle(loader, &file, &src)?;
            emit(
                &cocycle_out(&sigma.conjugate(), haar_json(&gd)?.as_ref()),
                &out,
            )?;
            Ok(0)
        }
        CocycleCmd::Oo { file, src, out } => {
            let (sigma, gd) = load_cocycle(loader, &file, &src)?;
            emit(&cocycle_out(&sigma.oo(), haar_json(&gd)?.as_ref()), &out)?;
            Ok(0)
        }
        CocycleCmd::Cohomologous { a, b, src } => {
            let (sa, gd) = load_cocycle(loader, &a, &src)?;
            require_valid(&gd)?;
            let bv = loader.load(&b)?;
            let sb = io::cocycle_from_json(
                &bv,
                gd.groupoid.clone(),
                src.modulus.or(Some(sa.modulus())),
            )?;
            for (name, s) in [("first", &sa), ("second", &sb)] {
                if let Some(v) = s.validate().first() {
                    return Err(invalid(format!(
                        "{name} cocycle is invalid: {} at {}",
                        v.axiom, v.witness
                    )));
                }
            }
            let g = &gd.groupoid;
            let v = match sa.cohomologous(&sb)? {
                Cohomology::Cohomologous(bvec) => {
                    let b: serde_json::Map<String, Value> = bvec
                        .iter()
                        .enumerate()
                        .filter(|(_, &k)| k != 0)
                        .map(|(i, &k)| (g.arrow_id(i).to_string(), json!(k)))
                        .collect();
                    json!({ "cohomologous": true, "b": b })
                }
                Cohomology::NotCohomologous => json!({ "cohomologous": false }),
            };
            print(&v);
            Ok(0)
        }
    }
}

fn bundle_cmd(
    cmd: BundleCmd,
    loader: &mut Loader,
    global: &Global,
    policy: &NumericPolicy,
) -> Result<u8> {
    match cmd {
        BundleCmd::Validate { file, groupoid } => {
            let (b, gd) = load_bundle(loader, &file, groupoid.as_deref())?;
            let mut rep = gd.haar()?.validate(&gd.groupoid);
            rep.extend(b.validate(policy));
            Ok(validation_outcome(&rep, global, "bundle"))
        }
        BundleCmd::Build(BundleBuild::Line { cocycle, src, out }) => {
            let (sigma, gd) = load_cocycle(loader, &cocycle, &src)?;
            require_valid(&gd)?;
            emit(
                &bundle_out(&line_bundle(&sigma)?, haar_json(&gd)?.as_ref()),
                &out,
            )?;
            Ok(0)
        }
        BundleCmd::Build(BundleBuild::Action {
            group,
            fiber,
            alpha,
            out,
        }) => {
            let gd = loader.groupoid(&group)?;
            require_valid(&gd)?;
            let fib = io::fiber_from_json(&loader.load(&fiber)?)?;
            let al = io::alpha_from_json(&loader.load(&alpha)?, &gd.groupoid)?;
            let b = action_bundle(gd.groupoid.clone(), &fib, &al, policy)?;
            emit(&bundle_out(&b, haar_json(&gd)?.as_ref()), &out)?;
            Ok(0)
        }
        BundleCmd::Oo {
            file,
            groupoid,
            out,
        } => {
            let (b, gd) = load_bundle(loader, &file, groupoid.as_deref())?;
            emit(&bundle_out(&b.oo_bundle(), haar_json(&gd)?.as_ref()), &out)?;
            Ok(0)
        }
        BundleCmd::Conjugate {
            file,
            groupoid,
            out,
        } => {
            let (b, gd) = load_bundle(loader, &file, groupoid.as_deref())?;
            emit(
                &bundle_out(&b.conjugate_bundle(), haar_json(&gd)?.as_ref()),
                &out,
            )?;
            Ok(0)
        }
        BundleCmd::Opposite {
            file,
            groupoid,
            out,
        } => {
            let (b, gd) = load_bundle(loader, &file, groupoid.as_deref())?;
            let haar = haar_json(&gd)?.map(|h| h.inverted(&gd.groupoid));
            emit(
                &bundle_out(&b.opposite_bundle_over_op(), haar.as_ref()),
                &out,
            )?;
            Ok(0)
        }
    }
}

fn verify_cmd(
    args: VerifyArgs,
    loader: &mut Loader,
    global: &Global,
    policy: &NumericPolicy,
) -> Result<u8> {
    let report = match args.suite {
        Suite::T21 => {
            let p = args
                .groupoid
                .as_deref()
                .ok_or_else(|| invalid("verify t21 needs --groupoid"))?;
            let gd = loader.groupoid(p)?;
            verify::suite_theorem21(gd.groupoid.clone(), gd.haar()?, policy)?
        }
        Suite::T3 => {
            let p = args
                .bundle
                .as_deref()
                .ok_or_else(|| invalid("verify t3 needs --bundle"))?;
            let v = loader.load(p)?;
            let gd = referenced_groupoid(loader, args.groupoid.as_deref(), &v, p)?;
            let haar = gd.haar()?;
            match verify::reject_invalid_groupoid("t3", &gd.groupoid, &haar, policy)? {
                Some(r) => r,
                None => verify::suite_theorem3(
                    Arc::new(io::bundle_from_json(&v, gd.groupoid.clone())?),
                    haar,
                    policy,
                )?,
            }
        }
        Suite::Twist => {
            let p = args
                .cocycle
                .as_deref()
                .ok_or_else(|| invalid("verify twist needs --cocycle"))?;
            let src = CocycleSource {
                groupoid: args.groupoid.clone(),
                modulus: None,
            };
            let (sigma, gd) = load_cocycle(loader, p, &src)?;
            verify::suite_twist(&sigma, gd.haar()?, policy)?
        }
        Suite::Stab => {
            let n = args.n.ok_or_else(|| invalid("verify stab needs --n"))?;
            let (sigma, gd) = match args.cocycle.as_deref() {
                Some(c) => {
                    let src = CocycleSource {
                        groupoid: args.groupoid.clone(),
                        modulus: None,
                    };
                    let (s, gd) = load_cocycle(loader, c, &src)?;
                    (Some(s), gd)
                }
                None => {
                    let p = args
                        .groupoid
                        .as_deref()
                        .ok_or_else(|| invalid("verify stab needs --groupoid"))?;
                    (None, loader.groupoid(p)?)
                }
            };
            verify::suite_stabilization(gd.groupoid.clone(), gd.haar()?, n, sigma.as_ref(), policy)?
        }
    };
    let report = report.with_digests(loader.digests().clone());
    emit(&report.to_json(), &args.out)?;
    if !global.quiet {
        summarize(&report);
    }
    Ok(if report.pass { 0 } else { 1 })
}

fn summarize(r: &Report) {
    let failed: Vec<_> = r.failed().collect();
    eprintln!(
        "suite {}: {} ({} checks, {} failed)",
        r.suite,
        if r.pass { "PASS" } else { "FAIL" },
        r.checks.len(),
        failed.len()
    );
    for c in failed {
        let w = c.witness.as_ref().map(Value::to_string).unwrap_or_default();
        eprintln!(
            "  FAIL {}: deviation {:e} > {:e} {w}",
            c.name, c.max_deviation, c.threshold
        );
    }
}
