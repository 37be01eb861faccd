mod common;

use common::{pipeline, shape};
use distvar::dilation;
use distvar::instance::{random_poly2, seeded_rng};
use distvar::linalg;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn embedding_is_isometric_and_intertwines(seed in any::<u64>(), shape in shape()) {
        let run = pipeline(seed, shape);
        let r = &run.bundle.residuals;
        prop_assert!(r["isometry"] <= dilation::TOL_TRUNC, "isometry {:e}", r["isometry"]);
        let tw = r["intertwine_t1"].max(r["intertwine_t2"]);
        prop_assert!(tw <= 10.0 * dilation::TOL_TRUNC, "intertwining {tw:e}");
    }

    #[test]
    fn functional_calculus_factors_through_the_dilation(seed in any::<u64>(), shape in shape()) {
        let run = pipeline(seed, shape);
        let mut rng = seeded_rng(seed ^ 0x77);
        for _ in 0..4 {
            let p = random_poly2(3, 3, &mut rng);
            let res = dilation::calculus_residual(&run.bundle, &p).unwrap();
            prop_assert!(res <= 1e-7 * p.l1_norm(), "calculus residual {res:e}");
        }
    }

    #[test]
    fn model_space_contains_the_embedded_space(seed in any::<u64>(), shape in shape()) {
        let run = pipeline(seed, shape);
        let b = &run.bundle;
        prop_assert!(b.kpsi_dim() >= run.pair.dim());
        prop_assert!(b.kpsi_dim() <= b.m1.degree() * b.psi.dim());
        if b.psi.dim() == 1 && b.kpsi_conclusive {
            prop_assert_eq!(b.kpsi_dim(), b.m1.degree());
        }
    }

    #[test]
    fn compressions_commute_and_are_pure(seed in any::<u64>(), shape in shape()) {
        let run = pipeline(seed, shape);
        let b = &run.bundle;
        prop_assert!(linalg::op_norm(&linalg::commutator(&b.s1, &b.s2)) <= 1e-9);
        prop_assert!(linalg::spectral_radius(&b.s1) < 1.0);
        prop_assert!(linalg::spectral_radius(&b.s2) < 1.0);
    }

    #[test]
    fn annihilator_is_invariant_under_compression(seed in any::<u64>(), shape in shape()) {
        let run = pipeline(seed, shape);
        let e = distvar::annvar::check_ann_invariance(&run.bundle, &run.basis);
        prop_assert_ne!(e.status, distvar::report::Status::Fail, "{:?}", e.witnesses);
    }
}
