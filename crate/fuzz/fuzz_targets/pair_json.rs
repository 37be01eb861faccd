#![no_main]

use distvar::opcore::PairFile;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(file) = PairFile::from_json(text) else { return };
    let again = PairFile::from_json(&serde_json::to_string(&file).unwrap()).expect("re-parse");
    assert_eq!(again, file);
    if file.t1.nrows() > 16 {
        return;
    }
    if let Ok(pair) = file.validate() {
        assert_eq!(pair.t1.shape(), pair.t2.shape());
        assert!(distvar::linalg::spectral_radius(&pair.t1) <= 1.0 + 1e-9);
    }
});
