mod common;

use common::{pipeline, shape};
use distvar::annvar;
use distvar::opcore;
use distvar::report::Status;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn generators_annihilate_the_compressions(seed in any::<u64>(), shape in shape()) {
        let run = pipeline(seed, shape);
        for g in &run.basis.generators {
            let n = distvar::linalg::op_norm(&opcore::poly_apply_mats(g, &run.bundle.s1, &run.bundle.s2));
            prop_assert!(n < 1e-7, "||g(S1,S2)|| = {n:e}");
        }
    }

    #[test]
    fn annihilator_zero_set_lies_on_the_variety(seed in any::<u64>(), shape in shape()) {
        let run = pipeline(seed, shape);
        let p = &run.variety.p;
        let scale = p.l1_norm();
        let points = match annvar::z_ann(&run.basis, &run.pair, seed) {
            Err(distvar::Error::DegenerateCluster { .. }) => return Ok(()),
            other => other.unwrap(),
        };
        for (l, m) in points {
            prop_assert!(p.eval(l, m).norm() < 1e-8 * scale);
        }
    }

    #[test]
    fn zero_set_matches_omega_or_is_flagged(seed in any::<u64>(), shape in shape()) {
        let run = pipeline(seed, shape);
        let e = annvar::check_zann_equals_omega(&run.pair, &run.bundle, &run.basis, seed).unwrap();
        prop_assert_ne!(e.status, Status::Fail, "{:?}", e.witnesses);
    }

    #[test]
    fn synthesis_conditions_agree(seed in any::<u64>(), shape in shape()) {
        let run = pipeline(seed, shape);
        let rep = match annvar::synthesis_report(&run.bundle, &run.basis) {
            Err(distvar::Error::DegenerateCluster { .. }) => return Ok(()),
            other => other.unwrap(),
        };
        let c = rep.conditions;
        prop_assert_eq!(c.ann_radical, c.m1_simple_roots);
        if rep.conclusive {
            prop_assert_eq!(c.eigenvectors_span, c.m1_simple_roots);
        }
    }

    #[test]
    fn support_bounds_coincide(seed in any::<u64>(), shape in shape()) {
        let run = pipeline(seed, shape);
        let s = match annvar::support_bounds(&run.pair, &run.bundle, &run.variety, &run.basis, seed) {
            Err(distvar::Error::DegenerateCluster { .. }) => return Ok(()),
            other => other.unwrap(),
        };
        prop_assert!(s.collapsed(), "set distance {:e}", s.set_distance);
    }
}
