mod common;

use common::shape;
use distvar::certify::{self, FiberSamples, Grids};
use distvar::inner::DiscGrid;
use distvar::instance::{certify_instance, random_poly2, seeded_rng, InstanceSource, Recipe, Settings};
use distvar::linalg;
use distvar::opcore;
use distvar::report::Status;
use proptest::prelude::*;

fn grids(boundary: usize, radii: usize, angles: usize) -> Grids {
    Grids { boundary, disc: DiscGrid { radii, angles } }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Tripling every grid dimension keeps the old sample points, so the
    /// sampled supremum cannot drop.
    #[test]
    fn variety_sup_is_monotone_under_refinement(seed in any::<u64>(), shape in shape()) {
        let psi = Recipe::seeded(seed, shape).psi().unwrap();
        let v = psi.variety_polynomial().unwrap();
        let q = random_poly2(3, 3, &mut seeded_rng(seed ^ 0x11));
        let coarse = certify::sup_on_variety(&v, &q, grids(64, 4, 16)).unwrap();
        let fine = certify::sup_on_variety(&v, &q, grids(192, 12, 48)).unwrap();
        prop_assert!(fine.sup >= coarse.sup * (1.0 - 1e-14), "{} < {}", fine.sup, coarse.sup);
    }

    #[test]
    fn von_neumann_never_fails_on_compressed_pairs(seed in any::<u64>(), shape in shape()) {
        let recipe = Recipe::seeded(seed, shape);
        let pair = recipe.pair().unwrap();
        let v = recipe.psi().unwrap().variety_polynomial().unwrap();
        let samples = FiberSamples::new(&v, grids(512, 16, 64)).unwrap();
        let mut rng = seeded_rng(seed ^ 0x22);
        let qs: Vec<_> = (0..6).map(|_| random_poly2(3, 3, &mut rng)).collect();
        for e in certify::vn_report(&pair, &v, &qs, &samples, certify::TOL_ANN) {
            prop_assert_ne!(e.status, Status::Fail, "{} failed: {:?}", e.name, e.witnesses);
        }
    }

    #[test]
    fn bidisc_baseline_holds_and_dominates_variety(seed in any::<u64>(), shape in shape()) {
        let recipe = Recipe::seeded(seed, shape);
        let pair = recipe.pair().unwrap();
        let v = recipe.psi().unwrap().variety_polynomial().unwrap();
        let q = random_poly2(3, 3, &mut seeded_rng(seed ^ 0x33));
        let n = 256;
        let torus = certify::torus_sup(&q, n);
        let h = 2.0 * std::f64::consts::PI / n as f64;
        let torus_slack = (q.d_dz().l1_norm() + q.d_dw().l1_norm()) * h / 2.0;
        let norm = linalg::op_norm(&opcore::poly_apply(&q, &pair));
        prop_assert!(norm <= torus + torus_slack + 1e-10 * torus.max(1.0));
        let on_v = certify::sup_on_variety(&v, &q, grids(n, 8, 32)).unwrap();
        prop_assert!(on_v.sup <= torus + torus_slack + 1e-10 * torus.max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn certificates_are_deterministic(seed in any::<u64>(), shape in shape()) {
        let source = InstanceSource::Recipe { recipe: Recipe::seeded(seed, shape) };
        let settings = Settings { seed, grids: grids(128, 4, 16), ..Settings::default() };
        let a = certify_instance("det", &source, &settings).report.to_json_pretty();
        let b = certify_instance("det", &source, &settings).report.to_json_pretty();
        prop_assert_eq!(a, b);
    }
}
