#![allow(dead_code)]

use distvar::annvar::{self, AnnihilatorBasis};
use distvar::dilation::{self, CoextensionBundle};
use distvar::inner::VarietyDescription;
use distvar::instance::{Recipe, RootShape};
use distvar::opcore::CommutingPair;
use proptest::prelude::*;

pub struct Pipeline {
    pub pair: CommutingPair,
    pub variety: VarietyDescription,
    pub basis: AnnihilatorBasis,
    pub bundle: CoextensionBundle,
}

pub fn shape() -> impl Strategy<Value = RootShape> {
    prop_oneof![Just(RootShape::Simple), Just(RootShape::Repeated)]
}

pub fn pipeline(seed: u64, shape: RootShape) -> Pipeline {
    let pair = Recipe::seeded(seed, shape).pair().unwrap();
    let psi = dilation::construct_psi(&pair).unwrap();
    let variety = psi.variety_polynomial().unwrap();
    let basis = annvar::ann_generators(&pair).unwrap();
    let bundle = dilation::constrained_coextension(&pair, &psi, &basis.generators).unwrap();
    Pipeline { pair, variety, basis, bundle }
}
