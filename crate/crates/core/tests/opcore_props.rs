use distvar::instance::{random_poly2, seeded_rng, Recipe, RootShape};
use distvar::linalg::{self, C64};
use distvar::opcore::{self, CommutingPair};
use distvar::poly::{BlaschkeProduct, BlaschkeZero};
use proptest::prelude::*;

fn shape() -> impl Strategy<Value = RootShape> {
    prop_oneof![Just(RootShape::Simple), Just(RootShape::Repeated)]
}

fn pair_of(seed: u64, shape: RootShape) -> CommutingPair {
    Recipe::seeded(seed, shape).pair().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn poly_apply_is_a_homomorphism(seed in any::<u64>(), shape in shape()) {
        let pair = pair_of(seed, shape);
        let mut rng = seeded_rng(seed.wrapping_mul(3));
        let p = random_poly2(3, 3, &mut rng);
        let q = random_poly2(3, 3, &mut rng);
        let pt = opcore::poly_apply(&p, &pair);
        let qt = opcore::poly_apply(&q, &pair);
        let scale = (p.l1_norm() * q.l1_norm()).max(p.l1_norm() + q.l1_norm()).max(1.0);
        let prod = linalg::op_norm(&(opcore::poly_apply(&p.mul(&q), &pair) - &pt * &qt));
        let sum = linalg::op_norm(&(opcore::poly_apply(&p.add(&q), &pair) - (&pt + &qt)));
        prop_assert!(prod <= 1e-10 * scale, "product defect {prod:e}");
        prop_assert!(sum <= 1e-10 * scale, "sum defect {sum:e}");
    }

    #[test]
    fn spectral_mapping_on_small_pairs(seed in any::<u64>()) {
        let pair = pair_of(seed, RootShape::Simple);
        prop_assume!(pair.dim() <= 10);
        let p = random_poly2(2, 2, &mut seeded_rng(seed ^ 0xabc));
        let eig = linalg::eigenvalues(&opcore::poly_apply(&p, &pair));
        let spec = opcore::joint_spectrum_taylor(&pair, seed).unwrap();
        let mapped: Vec<C64> = spec.points.iter().map(|&(l, m)| p.eval(l, m)).collect();
        let d = linalg::matching_distance(&eig, &mapped);
        prop_assert!(d < 1e-6, "spectral mapping mismatch {d:e}");
    }

    #[test]
    fn point_spectrum_sits_inside_taylor_spectrum(seed in any::<u64>(), shape in shape()) {
        let pair = pair_of(seed, shape);
        let taylor = opcore::joint_spectrum_taylor(&pair, seed).unwrap();
        let point = opcore::joint_point_spectrum(&pair);
        prop_assert!(!point.points.is_empty());
        for c in point.clustered() {
            let near = taylor
                .clustered()
                .iter()
                .map(|t| (t.center.0 - c.center.0).norm().max((t.center.1 - c.center.1).norm()))
                .fold(f64::INFINITY, f64::min);
            prop_assert!(near < 1e-8, "point {:?} is {near:e} from the Taylor spectrum", c.center);
        }
    }

    #[test]
    fn minimal_blaschke_annihilates_and_is_minimal(seed in any::<u64>(), shape in shape()) {
        let pair = pair_of(seed, shape);
        let m = opcore::minimal_blaschke(&pair.t1).unwrap();
        let at = linalg::op_norm(&opcore::blaschke_apply(&m, &pair.t1).unwrap());
        prop_assert!(at < 1e-8, "||m(T1)|| = {at:e}");
        for k in 0..m.zeros().len() {
            let mut zeros: Vec<BlaschkeZero> = m.zeros().to_vec();
            zeros[k].multiplicity -= 1;
            zeros.retain(|z| z.multiplicity > 0);
            let reduced = BlaschkeProduct::new(zeros, m.unimodular_constant()).unwrap();
            let norm = linalg::op_norm(&opcore::blaschke_apply(&reduced, &pair.t1).unwrap());
            prop_assert!(norm > 1e-4, "dropping one zero still annihilates: {norm:e}");
        }
    }
}

/// This recipe once sent the unbounded shifted QR iteration into a cycle
/// while validating the compressed pair.
#[test]
fn stalling_schur_instance_completes() {
    let recipe = Recipe::seeded(214u64.wrapping_mul(0x9e3779b97f4a7c15), RootShape::Repeated);
    let pair = recipe.pair().unwrap();
    let eig = linalg::eigenvalues(&pair.t2);
    let (q, t) = linalg::schur(&pair.t2);
    let back = &q * &t * q.adjoint();
    assert_eq!(eig.len(), pair.dim());
    assert!(linalg::op_norm(&(back - &pair.t2)) < 1e-12);
    assert!(linalg::unitarity_defect(&q) < 1e-12);
}
