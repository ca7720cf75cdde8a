use super::*;

fn arrow_ix(g: &FiniteGroupoid, id: &str) -> usize {
    g.arrow_by_id(id).unwrap_or_else(|| panic!("no arrow {id}"))
}

/// Independent associativity scan over the raw table.
fn brute_force_assoc_failures(g: &FiniteGroupoid) -> Vec<(usize, usize, usize)> {
    let n = g.num_arrows();
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let ab = g.try_compose(a, b);
                let bc = g.try_compose(b, c);
                if let (Some(ab), Some(bc)) = (ab, bc) {
                    if let (Some(l), Some(r)) = (g.try_compose(ab, c), g.try_compose(a, bc)) {
                        if l != r {
                            out.push((a, b, c));
                        }
                    }
                }
            }
        }
    }
    out
}

#[test]
fn pair_groupoid_shapes() {
    let g1 = pair_groupoid(1).unwrap();
    assert_eq!((g1.num_units(), g1.num_arrows()), (1, 1));
    let g2 = pair_groupoid(2).unwrap();
    assert_eq!(g2.num_arrows(), 4);
    let (a, b) = (arrow_ix(&g2, "(1,2)"), arrow_ix(&g2, "(2,1)"));
    assert_eq!(g2.compose(a, b), arrow_ix(&g2, "(1,1)"));
    assert_eq!(g2.rng(a), g2.unit_by_id("1").unwrap());
    assert_eq!(g2.src(a), g2.unit_by_id("2").unwrap());
    let g3 = pair_groupoid(3).unwrap();
    assert_eq!(g3.num_arrows(), 9);
    assert!(g3.validate().is_valid());
    assert!(brute_force_assoc_failures(&g3).is_empty());
    assert!(matches!(pair_groupoid(0), Err(Error::InvalidInput(_))));
}

#[test]
fn broken_inverse_is_reported_at_the_arrow() {
    let mut g = pair_groupoid(2).unwrap();
    let a = arrow_ix(&g, "(1,2)");
    g.set_inv(a, a);
    let rep = g.validate();
    assert!(!rep.is_valid());
    let hits: Vec<_> = rep
        .violations
        .iter()
        .filter(|v| v.axiom.starts_with("inverse law") && v.witness["arrow"] == "(1,2)")
        .collect();
    assert!(!hits.is_empty(), "{rep:?}");
}

#[test]
fn corrupted_cyclic_table_breaks_associativity() {
    let mut g = cyclic_group(4).unwrap();
    g.set_comp(1, 1, Some(3));
    let oracle = brute_force_assoc_failures(&g);
    assert!(!oracle.is_empty());
    let rep = g.validate();
    let reported = rep
        .violations
        .iter()
        .filter(|v| v.axiom == "associativity")
        .count();
    assert_eq!(reported, oracle.len());
    let loc = rep.localization.as_ref().unwrap();
    assert_eq!(loc["most_implicated_pair"], serde_json::json!(["1", "1"]));
    assert_eq!(loc["table_value"], "3");
}

#[test]
fn groups_from_tables() {
    let z2 = cyclic_group(2).unwrap();
    assert_eq!(z2.num_arrows(), 2);
    assert_eq!(z2.unit_arrow(0), 0);
    assert_eq!(z2.compose(1, 1), 0);
    let k4 = klein_four();
    assert_eq!(k4.num_arrows(), 4);
    assert!(k4.validate().is_valid());
    let s3 = symmetric_group(3).unwrap();
    assert_eq!(s3.num_arrows(), 6);
    assert!(s3.validate().is_valid());
    assert!(brute_force_assoc_failures(&s3).is_empty());
    // Non-abelian.
    assert!((0..6).any(|a| (0..6).any(|b| s3.compose(a, b) != s3.compose(b, a))));
}

#[test]
fn non_associative_table_is_rejected_with_triple() {
    // A commutative loop of order 5 with identity 0 that is not associative.
    let t = vec![
        vec![0, 1, 2, 3, 4],
        vec![1, 0, 3, 4, 2],
        vec![2, 4, 0, 1, 3],
        vec![3, 2, 4, 0, 1],
        vec![4, 3, 1, 2, 0],
    ];
    let table = CayleyTable {
        elements: (0..5).map(|k| format!("x{k}")).collect(),
        table: t.clone(),
    };
    // Oracle: first failing triple in lexicographic order.
    let mut first = None;
    'outer: for a in 0..5 {
        for b in 0..5 {
            for c in 0..5 {
                if t[t[a][b]][c] != t[a][t[b][c]] {
                    first = Some((a, b, c));
                    break 'outer;
                }
            }
        }
    }
    let (a, b, c) = first.expect("table is non-associative");
    let err = group_groupoid(&table).unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains(&format!("(x{a}, x{b}, x{c})")), "{msg}");
}

#[test]
fn action_groupoids() {
    let z2 = cyclic_group(2).unwrap();
    let trivial = action_groupoid(&z2, &["p".into()], &[vec![0], vec![0]]).unwrap();
    assert!(trivial.validate().is_valid());
    assert!(trivial.check_isomorphism(&z2, &[0, 1]).is_valid());

    let swap = action_groupoid(&z2, &["p".into(), "q".into()], &[vec![0, 1], vec![1, 0]]).unwrap();
    assert!(swap.validate().is_valid());
    let pair = pair_groupoid(2).unwrap();
    // (0,p) ↦ (1,1), (0,q) ↦ (2,2), (1,p): p→q ↦ (2,1), (1,q): q→p ↦ (1,2)
    let map = ["(1,1)", "(2,2)", "(2,1)", "(1,2)"].map(|id| arrow_ix(&pair, id));
    assert!(swap.check_isomorphism(&pair, &map).is_valid());

    let z3 = cyclic_group(3).unwrap();
    let rot: Vec<Vec<usize>> = (0..3)
        .map(|k| (0..3).map(|x| (x + k) % 3).collect())
        .collect();
    let pts: Vec<String> = ["a", "b", "c"].map(String::from).to_vec();
    let g = action_groupoid(&z3, &pts, &rot).unwrap();
    assert_eq!(g.num_arrows(), 9);
    assert!(g.validate().is_valid());
    assert!(brute_force_assoc_failures(&g).is_empty());

    let not_action = vec![vec![0, 1], vec![0, 0]];
    assert!(matches!(
        action_groupoid(&z2, &["p".into(), "q".into()], &not_action),
        Err(Error::InvalidInput(_))
    ));
}

#[test]
fn products() {
    let z3 = cyclic_group(3).unwrap();
    let p1 = pair_groupoid(1).unwrap();
    let g = product_groupoid(&z3, &p1).unwrap();
    assert_eq!(g.num_arrows(), 3);
    assert!(g.validate().is_valid());
    assert!(g.check_isomorphism(&z3, &[0, 1, 2]).is_valid());

    let g = product_groupoid(&cyclic_group(2).unwrap(), &pair_groupoid(2).unwrap()).unwrap();
    assert_eq!((g.num_arrows(), g.num_units()), (8, 2));
    assert!(g.validate().is_valid());
}

#[test]
fn opposites() {
    let z4 = cyclic_group(4).unwrap();
    let op = opposite_groupoid(&z4);
    for a in 0..4 {
        for b in 0..4 {
            assert_eq!(op.compose(a, b), z4.compose(a, b));
        }
    }

    let pair = pair_groupoid(2).unwrap();
    let op = opposite_groupoid(&pair);
    assert!(op.validate().is_valid());
    let map: Vec<usize> = (0..4)
        .map(|a| {
            let id = pair.arrow_id(a);
            let (i, j) = (&id[1..2], &id[3..4]);
            arrow_ix(&pair, &format!("({j},{i})"))
        })
        .collect();
    assert!(op.check_isomorphism(&pair, &map).is_valid());

    // Inversion is an isomorphism G → G^op.
    let s3 = symmetric_group(3).unwrap();
    let op = opposite_groupoid(&s3);
    let inv: Vec<usize> = (0..6).map(|a| s3.inv(a)).collect();
    assert!(s3.check_isomorphism(&op, &inv).is_valid());
    assert_eq!(opposite_groupoid(&op), s3);
}

#[test]
fn haar_systems() {
    let g = pair_groupoid(2).unwrap();
    assert!(HaarSystem::counting(&g).validate(&g).is_valid());
    let lam = HaarSystem::from_unit_weights(&g, &[1.0, 2.0]).unwrap();
    assert!(lam.validate(&g).is_valid());
    for a in 0..4 {
        let expect = if g.arrow_id(a).ends_with("2)") {
            2.0
        } else {
            1.0
        };
        assert_eq!(lam.weight(a), expect);
    }

    let mut w = vec![1.0; 4];
    w[arrow_ix(&g, "(1,2)")] = 2.0;
    let bad = HaarSystem::from_weights(w).unwrap();
    let rep = bad.validate(&g);
    assert!(!rep.is_valid());
    assert!(rep.violations.iter().all(|v| {
        let pair = v.witness["pair"].as_array().unwrap();
        pair.iter().any(|p| p == "(1,2)")
            || g.compose(
                arrow_ix(&g, pair[0].as_str().unwrap()),
                arrow_ix(&g, pair[1].as_str().unwrap()),
            ) == arrow_ix(&g, "(1,2)")
    }));

    assert!(matches!(
        HaarSystem::from_weights(vec![1.0, 0.0]),
        Err(Error::InvalidInput(_))
    ));
    assert!(matches!(
        HaarSystem::from_weights(vec![-1.0]),
        Err(Error::InvalidInput(_))
    ));
}

#[test]
fn valid_haar_factors_through_source() {
    let z3 = cyclic_group(3).unwrap();
    let rot: Vec<Vec<usize>> = (0..3)
        .map(|k| (0..3).map(|x| (x + k) % 3).collect())
        .collect();
    let g = action_groupoid(&z3, &["a".into(), "b".into(), "c".into()], &rot).unwrap();
    let lam = HaarSystem::from_unit_weights(&g, &[0.5, 2.0, 3.0]).unwrap();
    let u = lam.unit_function(&g);
    let rebuilt = HaarSystem::from_unit_weights(&g, &u).unwrap();
    assert_eq!(rebuilt, lam);
    assert!(rebuilt.validate(&g).is_valid());
}

#[test]
fn fibers_have_equal_size_along_orbits() {
    let z2 = cyclic_group(2).unwrap();
    let pts: Vec<String> = ["p", "q", "r"].map(String::from).to_vec();
    // Swap p and q, fix r.
    let g = action_groupoid(&z2, &pts, &[vec![0, 1, 2], vec![1, 0, 2]]).unwrap();
    for x in 0..g.num_units() {
        for y in g.orbit(x) {
            assert_eq!(g.range_fiber(x).len(), g.source_fiber(y).len());
        }
    }
    assert_eq!(g.orbit(0), vec![0, 1]);
    assert_eq!(g.orbit(2), vec![2]);
}
