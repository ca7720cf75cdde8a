use std::sync::Arc;

use opalg::cocycle::{random_cochain, random_cocycle, TCocycle};
use opalg::conv_algebra::ConvAlgebra;
use opalg::fell_bundle::line_bundle;
use opalg::groupoid::{opposite_groupoid, FiniteGroupoid};
use opalg::io;
use opalg::random::{
    random_bundle, random_function, random_groupoid, random_haar, random_section, sample_rng,
};
use opalg::section_algebra::SectionAlgebra;
use opalg::NumericPolicy;
use proptest::prelude::*;

fn groupoid(seed: u64) -> Arc<FiniteGroupoid> {
    Arc::new(random_groupoid(&mut sample_rng(seed, 0), 24).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_groupoids_validate_and_double_opposite_is_identity(seed in any::<u64>()) {
        let g = groupoid(seed);
        prop_assert!(g.is_valid());
        let op = opposite_groupoid(&g);
        prop_assert!(op.is_valid());
        prop_assert_eq!(&opposite_groupoid(&op), &*g);
        let inv: Vec<usize> = (0..g.num_arrows()).map(|a| g.inv(a)).collect();
        prop_assert!(g.check_isomorphism(&op, &inv).is_valid());
    }

    #[test]
    fn convolution_is_associative_and_op_reverses_it(seed in any::<u64>()) {
        let g = groupoid(seed);
        let mut rng = sample_rng(seed, 1);
        let alg = ConvAlgebra::new(g.clone(), random_haar(&g, &mut rng)).unwrap();
        let (f1, f2, f3) = (random_function(&alg, &mut rng), random_function(&alg, &mut rng), random_function(&alg, &mut rng));
        let left = alg.convolve(&alg.convolve(&f1, &f2).unwrap(), &f3).unwrap();
        let right = alg.convolve(&f1, &alg.convolve(&f2, &f3).unwrap()).unwrap();
        prop_assert!(left.deviation(&right).0 <= 1e-11);
        let op = alg.convolve(&f1, &f2).unwrap().op_map();
        let rev = alg.convolve(&f2.op_map(), &f1.op_map()).unwrap();
        prop_assert!(op.deviation(&rev).0 <= 1e-12);
        let star = alg.convolve(&f1, &f2).unwrap().involution();
        let star_rev = alg.convolve(&f2.involution(), &f1.involution()).unwrap();
        prop_assert!(star.deviation(&star_rev).0 <= 1e-12);
    }

    #[test]
    fn norms_are_invariant_and_ordered(seed in any::<u64>()) {
        let g = groupoid(seed);
        let mut rng = sample_rng(seed, 2);
        let alg = ConvAlgebra::new(g.clone(), random_haar(&g, &mut rng)).unwrap();
        let opp = alg.opposite();
        let f = random_function(&alg, &mut rng);
        let i = alg.i_norm(&f).unwrap();
        prop_assert_eq!(alg.i_norm(&f.op_map()).unwrap(), i);
        prop_assert_eq!(alg.i_norm(&f.involution()).unwrap(), i);
        let fo = f.op_map().reinterpret(opp.groupoid().clone()).unwrap();
        prop_assert_eq!(opp.i_norm(&fo).unwrap(), i);
        let r = alg.reduced_norm(&f).unwrap();
        prop_assert!(r <= i * (1.0 + 1e-12));
        prop_assert!((opp.reduced_norm(&fo).unwrap() - r).abs() <= 1e-9 * r);
        prop_assert!((alg.reduced_norm(&f.involution()).unwrap() - r).abs() <= 1e-9 * r);
    }

    #[test]
    fn oo_cocycle_is_cohomologous_to_conjugate(seed in any::<u64>(), n in 2u64..=4) {
        let g = groupoid(seed);
        let mut rng = sample_rng(seed, 3);
        let sigma = random_cocycle(g.clone(), n, &mut rng).unwrap();
        prop_assert!(sigma.validate().is_valid());
        prop_assert!(sigma.oo().validate().is_valid());
        prop_assert!(sigma.oo().cohomologous(&sigma.conjugate()).unwrap().is_cohomologous());
        let b = random_cochain(&g, n, &mut rng);
        let cob = TCocycle::coboundary(g.clone(), n, &b).unwrap();
        prop_assert!(cob.cohomologous(&TCocycle::trivial(g, n).unwrap()).unwrap().is_cohomologous());
    }

    #[test]
    fn json_round_trips(seed in any::<u64>(), n in 2u64..=4) {
        let g = groupoid(seed);
        let mut rng = sample_rng(seed, 4);
        let haar = random_haar(&g, &mut rng);
        let back = io::groupoid_from_json(&io::groupoid_to_json(&g, Some(&haar))).unwrap();
        prop_assert_eq!(&*back.groupoid, &*g);
        let back_haar = back.haar().unwrap();
        prop_assert_eq!(back_haar.weights(), haar.weights());
        let sigma = random_cocycle(g.clone(), n, &mut rng).unwrap();
        let s2 = io::cocycle_from_json(&io::cocycle_to_json(&sigma), g.clone(), None).unwrap();
        prop_assert_eq!(&s2, &sigma);
        let b = line_bundle(&sigma).unwrap();
        let b2 = io::bundle_from_json(&io::bundle_to_json(&b), g.clone()).unwrap();
        prop_assert_eq!(&b2, &b);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn bundle_oo_is_an_involution_and_maps_preserve_norms(seed in any::<u64>()) {
        let policy = NumericPolicy::default();
        let (b, haar) = random_bundle(&mut sample_rng(seed, 5), &policy).unwrap();
        prop_assert!(b.oo_bundle().validate(&policy).is_valid());
        prop_assert_eq!(&b.oo_bundle().oo_bundle(), &b);
        let alg = SectionAlgebra::new(Arc::new(b), haar, &policy).unwrap();
        let oo = alg.oo_algebra().unwrap();
        let conj = alg.conjugate_algebra().unwrap();
        let mut rng = sample_rng(seed, 6);
        let (x, y) = (random_section(&alg, &mut rng), random_section(&alg, &mut rng));
        let lhs = alg.oo_map(&alg.convolve(&x, &y).unwrap(), &oo).unwrap();
        let rhs = oo.convolve(&alg.oo_map(&y, &oo).unwrap(), &alg.oo_map(&x, &oo).unwrap()).unwrap();
        prop_assert!(lhs.deviation(&rhs).0 <= 1e-10);
        let r = alg.reduced_norm(&x).unwrap();
        prop_assert!((oo.reduced_norm(&alg.oo_map(&x, &oo).unwrap()).unwrap() - r).abs() <= 1e-9 * r);
        prop_assert!((conj.reduced_norm(&alg.conj_section_map(&x, &conj).unwrap()).unwrap() - r).abs() <= 1e-9 * r);
        prop_assert!(r <= alg.i_norm(&x).unwrap() * (1.0 + 1e-9));
    }
}
