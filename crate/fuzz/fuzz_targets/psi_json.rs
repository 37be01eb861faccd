#![no_main]

use distvar::inner::MatrixInnerFunction;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(psi) = MatrixInnerFunction::from_json(text) else { return };
    // Anything accepted must carry a passing certificate and survive a round trip.
    let cert = psi.certificate();
    assert!(cert.boundary_defect < distvar::inner::TOL_UNITARY);
    let again = MatrixInnerFunction::from_json(&serde_json::to_string(&psi).unwrap()).expect("re-parse");
    assert_eq!(again, psi);
});
