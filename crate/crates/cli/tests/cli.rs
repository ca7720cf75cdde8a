use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn opalg(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_opalg"))
        .current_dir(dir)
        .arg("--quiet")
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn write(dir: &Path, name: &str, v: &Value) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, v.to_string()).unwrap();
    p
}

fn read(dir: &Path, name: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join(name)).unwrap()).unwrap()
}

/// Klein four group from its Cayley table and the Pauli cocycle
/// σ(x, y) = (-1)^{x₂y₁} with a = (1,0), b = (0,1), c = (1,1).
fn klein_and_pauli(dir: &Path) {
    write(
        dir,
        "k4table.json",
        &json!({"elements": ["e", "a", "b", "c"],
                "table": [["e","a","b","c"], ["a","e","c","b"], ["b","c","e","a"], ["c","b","a","e"]]}),
    );
    let o = opalg(
        dir,
        &[
            "groupoid",
            "build",
            "group",
            "--table",
            "k4table.json",
            "--out",
            "klein4.json",
        ],
    );
    assert_eq!(code(&o), 0);
    write(
        dir,
        "pauli.json",
        &json!({"groupoid": "klein4.json", "N": 2, "vals": {"b|a": 1, "b|c": 1, "c|a": 1, "c|c": 1}}),
    );
}

#[test]
fn verify_t21_on_pair_groupoid_passes() {
    let d = TempDir::new().unwrap();
    assert_eq!(
        code(&opalg(
            d.path(),
            &[
                "groupoid",
                "build",
                "pair",
                "--n",
                "3",
                "--out",
                "pair3.json"
            ]
        )),
        0
    );
    let o = opalg(
        d.path(),
        &[
            "verify",
            "t21",
            "--groupoid",
            "pair3.json",
            "--out",
            "report.json",
        ],
    );
    assert_eq!(code(&o), 0);
    let r = read(d.path(), "report.json");
    assert_eq!(r["pass"], true);
    assert_eq!(r["suite"], "t21");
    let checks = r["checks"].as_array().unwrap();
    assert!(checks.len() >= 10);
    for c in checks {
        assert_eq!(c["pass"], true, "{c}");
        assert!(!c["anchor"].as_str().unwrap().is_empty());
        assert!(c["max_deviation"].as_f64().unwrap() <= 1e-12, "{c}");
    }
    assert!(r["input_digests"]["pair3.json"].as_str().unwrap().len() == 64);
}

#[test]
fn reports_are_reproducible() {
    let d = TempDir::new().unwrap();
    opalg(
        d.path(),
        &[
            "groupoid", "build", "cyclic", "--n", "4", "--out", "z4.json",
        ],
    );
    let a = opalg(
        d.path(),
        &[
            "--seed",
            "9",
            "--samples",
            "5",
            "verify",
            "t21",
            "--groupoid",
            "z4.json",
        ],
    );
    let b = opalg(
        d.path(),
        &[
            "--seed",
            "9",
            "--samples",
            "5",
            "verify",
            "t21",
            "--groupoid",
            "z4.json",
        ],
    );
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout_json(&a)["policy"]["samples"], 5);
}

#[test]
fn broken_groupoid_is_rejected_with_listing() {
    let d = TempDir::new().unwrap();
    opalg(
        d.path(),
        &[
            "groupoid",
            "build",
            "pair",
            "--n",
            "3",
            "--out",
            "pair3.json",
        ],
    );
    let mut g = read(d.path(), "pair3.json");
    g["comp"][4][2] = json!("(1,3)");
    write(d.path(), "broken.json", &g);
    let o = opalg(d.path(), &["groupoid", "validate", "broken.json"]);
    assert_eq!(code(&o), 2);
    let v = stdout_json(&o);
    assert_eq!(v["valid"], false);
    assert!(!v["violations"].as_array().unwrap().is_empty());
}

#[test]
fn malformed_json_is_invalid_input() {
    let d = TempDir::new().unwrap();
    std::fs::write(d.path().join("bad.json"), "{\"units\":").unwrap();
    assert_eq!(
        code(&opalg(d.path(), &["groupoid", "validate", "bad.json"])),
        2
    );
    assert_eq!(
        code(&opalg(
            d.path(),
            &["verify", "t21", "--groupoid", "missing.json"]
        )),
        2
    );
}

#[test]
fn pauli_wedderburn_blocks() {
    let d = TempDir::new().unwrap();
    klein_and_pauli(d.path());
    let o = opalg(
        d.path(),
        &[
            "algebra",
            "wedderburn",
            "--groupoid",
            "klein4.json",
            "--cocycle",
            "pauli.json",
        ],
    );
    assert_eq!(code(&o), 0);
    assert_eq!(
        String::from_utf8(o.stdout).unwrap().trim(),
        r#"{"blocks":[2]}"#
    );
    let o = opalg(
        d.path(),
        &["algebra", "wedderburn", "--groupoid", "klein4.json"],
    );
    assert_eq!(stdout_json(&o), json!({"blocks": [1, 1, 1, 1]}));
}

#[test]
fn cocycle_commands() {
    let d = TempDir::new().unwrap();
    klein_and_pauli(d.path());
    assert_eq!(
        code(&opalg(
            d.path(),
            &["cocycle", "validate", "pauli.json", "--N", "2"]
        )),
        0
    );
    assert_eq!(
        code(&opalg(
            d.path(),
            &["cocycle", "validate", "pauli.json", "--N", "4"]
        )),
        2
    );
    assert_eq!(
        code(&opalg(
            d.path(),
            &["cocycle", "oo", "pauli.json", "--out", "oo.json"]
        )),
        0
    );
    assert_eq!(
        code(&opalg(
            d.path(),
            &["cocycle", "conjugate", "pauli.json", "--out", "cj.json"]
        )),
        0
    );
    let o = opalg(d.path(), &["cocycle", "cohomologous", "oo.json", "cj.json"]);
    assert_eq!(stdout_json(&o)["cohomologous"], true);
    write(
        d.path(),
        "triv.json",
        &json!({"groupoid": "klein4.json", "N": 2}),
    );
    let o = opalg(
        d.path(),
        &["cocycle", "cohomologous", "pauli.json", "triv.json"],
    );
    assert_eq!(stdout_json(&o), json!({"cohomologous": false}));
}

#[test]
fn norms_and_rep_of_cyclic_group() {
    let d = TempDir::new().unwrap();
    opalg(
        d.path(),
        &[
            "groupoid", "build", "cyclic", "--n", "2", "--out", "z2.json",
        ],
    );
    write(
        d.path(),
        "f.json",
        &json!({"groupoid": "z2.json", "values": {"0": [1.0, 0.0], "1": [0.0, 1.0]}}),
    );
    let o = opalg(d.path(), &["algebra", "norms", "--function", "f.json"]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert_eq!(v["i_norm"], 2.0);
    assert!(
        (v["reduced_norm"].as_f64().unwrap() - 2f64.sqrt()).abs() < 1e-10,
        "{v}"
    );
    let o = opalg(
        d.path(),
        &["algebra", "rep", "--function", "f.json", "--unit", "0"],
    );
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert_eq!(v["matrix"].as_array().unwrap().len(), 2);
    assert_eq!(
        code(&opalg(
            d.path(),
            &["algebra", "rep", "--function", "f.json", "--unit", "zz"]
        )),
        2
    );
}

#[test]
fn builds_round_trip_through_validators() {
    let d = TempDir::new().unwrap();
    klein_and_pauli(d.path());
    let p = d.path();
    assert_eq!(
        code(&opalg(
            p,
            &[
                "groupoid",
                "build",
                "pair",
                "--n",
                "2",
                "--out",
                "pair2.json"
            ]
        )),
        0
    );
    assert_eq!(
        code(&opalg(
            p,
            &["groupoid", "build", "cyclic", "--n", "3", "--out", "z3.json"]
        )),
        0
    );
    write(p, "set.json", &json!(["x", "y"]));
    write(
        p,
        "act.json",
        &json!({"e": {"x": "x", "y": "y"}, "a": {"x": "y", "y": "x"}, "b": {"x": "x", "y": "y"}, "c": {"x": "y", "y": "x"}}),
    );
    assert_eq!(
        code(&opalg(
            p,
            &[
                "groupoid",
                "build",
                "action",
                "--group",
                "klein4.json",
                "--set",
                "set.json",
                "--act",
                "act.json",
                "--out",
                "act_g.json"
            ]
        )),
        0
    );
    assert_eq!(
        code(&opalg(
            p,
            &[
                "groupoid",
                "product",
                "z3.json",
                "pair2.json",
                "--out",
                "prod.json"
            ]
        )),
        0
    );
    write(p, "u.json", &json!({"u": {"0": 2.5}}));
    assert_eq!(
        code(&opalg(
            p,
            &[
                "haar",
                "unit-weights",
                "z3.json",
                "--u",
                "u.json",
                "--out",
                "z3w.json"
            ]
        )),
        0
    );
    assert_eq!(
        code(&opalg(
            p,
            &["haar", "counting", "pair2.json", "--out", "pair2c.json"]
        )),
        0
    );
    for f in [
        "klein4.json",
        "pair2.json",
        "z3.json",
        "act_g.json",
        "prod.json",
        "z3w.json",
        "pair2c.json",
    ] {
        assert_eq!(code(&opalg(p, &["groupoid", "validate", f])), 0, "{f}");
        assert_eq!(code(&opalg(p, &["haar", "validate", f])), 0, "{f}");
    }
    assert_eq!(read(p, "z3w.json")["haar"]["1"], 2.5);

    assert_eq!(
        code(&opalg(
            p,
            &[
                "bundle",
                "build",
                "line",
                "--cocycle",
                "pauli.json",
                "--out",
                "line.json"
            ]
        )),
        0
    );
    write(
        p,
        "fiber.json",
        &json!({
            "mult": [[[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]], [[[0.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]],
            "invol": [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]
        }),
    );
    opalg(
        p,
        &[
            "groupoid", "build", "cyclic", "--n", "2", "--out", "z2.json",
        ],
    );
    let id = json!([[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]);
    let swap = json!([[[0.0, 0.0], [1.0, 0.0]], [[1.0, 0.0], [0.0, 0.0]]]);
    write(p, "alpha.json", &json!({"0": id, "1": swap}));
    let o = opalg(
        p,
        &[
            "bundle",
            "build",
            "action",
            "--group",
            "z2.json",
            "--fiber",
            "fiber.json",
            "--alpha",
            "alpha.json",
            "--out",
            "swap.json",
        ],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for b in ["line.json", "swap.json"] {
        assert_eq!(code(&opalg(p, &["bundle", "validate", b])), 0, "{b}");
        for op in ["oo", "conjugate", "opposite"] {
            let out = format!("{op}_{b}");
            assert_eq!(code(&opalg(p, &["bundle", op, b, "--out", &out])), 0);
            assert_eq!(code(&opalg(p, &["bundle", "validate", &out])), 0, "{out}");
        }
    }
    let o = opalg(p, &["algebra", "wedderburn", "--bundle", "swap.json"]);
    assert_eq!(stdout_json(&o), json!({"blocks": [2]}));
    let o = opalg(p, &["algebra", "wedderburn", "--bundle", "oo_swap.json"]);
    assert_eq!(stdout_json(&o), json!({"blocks": [2]}));
}

#[test]
fn opposite_of_pair_feeds_verify() {
    let d = TempDir::new().unwrap();
    let p = d.path();
    opalg(
        p,
        &[
            "groupoid",
            "build",
            "pair",
            "--n",
            "3",
            "--out",
            "pair3.json",
        ],
    );
    assert_eq!(
        code(&opalg(
            p,
            &["groupoid", "opposite", "pair3.json", "--out", "op.json"]
        )),
        0
    );
    assert_eq!(code(&opalg(p, &["groupoid", "validate", "op.json"])), 0);
    assert_eq!(
        code(&opalg(
            p,
            &["--samples", "5", "verify", "t21", "--groupoid", "op.json"]
        )),
        0
    );
}

#[test]
fn all_suites_pass_on_valid_inputs() {
    let d = TempDir::new().unwrap();
    let p = d.path();
    klein_and_pauli(p);
    opalg(
        p,
        &[
            "bundle",
            "build",
            "line",
            "--cocycle",
            "pauli.json",
            "--out",
            "line.json",
        ],
    );
    let runs: [&[&str]; 3] = [
        &["verify", "t3", "--bundle", "line.json"],
        &["verify", "twist", "--cocycle", "pauli.json"],
        &["verify", "stab", "--cocycle", "pauli.json", "--n", "2"],
    ];
    for args in runs {
        let mut a = vec!["--samples", "5"];
        a.extend_from_slice(args);
        let o = opalg(p, &a);
        assert_eq!(code(&o), 0, "{args:?}");
        assert_eq!(stdout_json(&o)["pass"], true);
    }
    assert_eq!(
        code(&opalg(p, &["verify", "stab", "--groupoid", "klein4.json"])),
        2
    );
}

#[test]
fn fault_injection_fails_suites() {
    let d = TempDir::new().unwrap();
    let p = d.path();
    klein_and_pauli(p);
    let mut c = read(p, "pauli.json");
    c["vals"]["a|b"] = json!(1);
    write(p, "bad_cocycle.json", &c);
    let o = opalg(p, &["verify", "twist", "--cocycle", "bad_cocycle.json"]);
    assert_eq!(code(&o), 1);
    let r = stdout_json(&o);
    let failed: Vec<&Value> = r["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["pass"] == false)
        .collect();
    assert!(!failed.is_empty());
    assert!(failed[0]["witness"].to_string().contains("\"a\""));

    opalg(
        p,
        &[
            "bundle",
            "build",
            "line",
            "--cocycle",
            "pauli.json",
            "--out",
            "line.json",
        ],
    );
    let mut b = read(p, "line.json");
    b["mult"]["a|b"] = json!([[[[0.5, 0.0]]]]);
    write(p, "bad_line.json", &b);
    let o = opalg(p, &["verify", "t3", "--bundle", "bad_line.json"]);
    assert_eq!(code(&o), 1);
    assert!(stdout_json(&o)["checks"][0]["witness"]
        .to_string()
        .contains("\"b\""));

    let mut g = read(p, "klein4.json");
    g["comp"][0][2] = json!("b");
    write(p, "bad_klein.json", &g);
    assert_eq!(
        code(&opalg(
            p,
            &["verify", "t21", "--groupoid", "bad_klein.json"]
        )),
        1
    );
    assert_eq!(
        code(&opalg(
            p,
            &["verify", "stab", "--groupoid", "bad_klein.json", "--n", "2"]
        )),
        1
    );
}

#[test]
fn invalid_policy_and_threads() {
    let d = TempDir::new().unwrap();
    opalg(
        d.path(),
        &["groupoid", "build", "pair", "--n", "2", "--out", "p.json"],
    );
    assert_eq!(
        code(&opalg(
            d.path(),
            &["--tol-norm", "-1", "verify", "t21", "--groupoid", "p.json"]
        )),
        2
    );
    let o = Command::new(env!("CARGO_BIN_EXE_opalg"))
        .current_dir(d.path())
        .env("OPALG_NUM_THREADS", "2")
        .args([
            "--quiet",
            "--samples",
            "3",
            "verify",
            "t21",
            "--groupoid",
            "p.json",
        ])
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    let o = Command::new(env!("CARGO_BIN_EXE_opalg"))
        .current_dir(d.path())
        .env("OPALG_NUM_THREADS", "many")
        .args(["groupoid", "validate", "p.json"])
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn stdin_pipeline() {
    use std::io::Write;
    use std::process::Stdio;
    let d = TempDir::new().unwrap();
    let built = opalg(d.path(), &["groupoid", "build", "pair", "--n", "2"]);
    let mut child = Command::new(env!("CARGO_BIN_EXE_opalg"))
        .current_dir(d.path())
        .args(["--quiet", "groupoid", "opposite", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(&built.stdout)
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["units"], stdout_json(&built)["units"]);
}
