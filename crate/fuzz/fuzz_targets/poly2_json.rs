#![no_main]

use distvar::linalg::C64;
use distvar::poly::Poly2;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(p) = serde_json::from_slice::<Poly2>(data) else { return };
    let again: Poly2 = serde_json::from_str(&serde_json::to_string(&p).unwrap()).expect("re-parse");
    assert_eq!(again, p);
    let (dz, dw) = p.bidegree();
    if dz + dw > 64 {
        return;
    }
    // Evaluation and the unit-normalized form stay finite for finite input.
    let v = p.eval(C64::new(0.3, -0.2), C64::new(-0.1, 0.4));
    if p.coeffs().iter().all(|c| c.re.is_finite() && c.im.is_finite()) && p.max_coeff() < 1e100 {
        assert!(v.re.is_finite() && v.im.is_finite());
    }
});
