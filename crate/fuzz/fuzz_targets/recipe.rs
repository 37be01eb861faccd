#![no_main]

use distvar::instance::Recipe;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(recipe) = Recipe::from_json(text) else { return };
    let again = Recipe::from_json(&serde_json::to_string(&recipe).unwrap()).expect("re-parse");
    assert_eq!(again, recipe);
    let theta = recipe.theta().expect("validated recipe has a theta");
    assert!(theta.zeros().iter().all(|z| z.point.norm() < 1.0));
    // Small instances go through construction; errors are fine, panics are not.
    if theta.degree() <= 4 {
        let _ = recipe.pair();
    }
});
