//! Instance descriptions, seeded generators and the end-to-end pipeline
//! that turns one instance into a consolidated certificate report.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::annvar;
use crate::certify::{self, FiberSamples, Grids};
use crate::dilation;
use crate::error::{Error, Result};
use crate::inner::{self, MatrixInnerFunction, PsiJson};
use crate::json;
use crate::linalg::{self, c, cr, CMat, C64};
use crate::opcore::{self, CommutingPair, PairFile};
use crate::poly::{BlaschkeProduct, Poly2};
use crate::report::{CertificateReport, Entry, Status};

/// Largest state dimension drawn by the seeded generator.
pub const MAX_STATE_DIM: usize = 2;
/// Rejection bound on the spectral radius of random state matrices.
pub const RANDOM_STATE_RADIUS: f64 = 0.9;
/// Seeded θ zeros stay within this radius and at least this far apart.
pub const THETA_RADIUS: f64 = 0.8;
pub const THETA_SEPARATION: f64 = 0.15;

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut impl Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(re, im) / 2f64.sqrt()
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the phases
/// of `R`'s diagonal moved into `Q`.
pub fn haar_unitary(n: usize, rng: &mut impl Rng) -> CMat {
    let g = CMat::from_fn(n, n, |_, _| gaussian(rng));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { cr(1.0) };
        let mut col = q.column_mut(j);
        col *= ph;
    }
    q
}

/// Unitary colligation `[[A, B], [C, D]]` cut from a Haar unitary, redrawn
/// until `ρ(A) ≤ RANDOM_STATE_RADIUS`.
pub fn random_colligation(io_dim: usize, state_dim: usize, rng: &mut impl Rng) -> Result<MatrixInnerFunction> {
    if io_dim == 0 || state_dim == 0 {
        return Err(Error::InvalidInput("random colligation needs positive dimensions".into()));
    }
    for _ in 0..10_000 {
        let u = haar_unitary(io_dim + state_dim, rng);
        let a = u.view((0, 0), (state_dim, state_dim)).into_owned();
        if linalg::spectral_radius(&a) > RANDOM_STATE_RADIUS {
            continue;
        }
        let b = u.view((0, state_dim), (state_dim, io_dim)).into_owned();
        let cm = u.view((state_dim, 0), (io_dim, state_dim)).into_owned();
        let d = u.view((state_dim, state_dim), (io_dim, io_dim)).into_owned();
        return MatrixInnerFunction::from_colligation(a, b, cm, d);
    }
    Err(Error::NoInnerSolution("rejection sampling of a pure colligation did not terminate".into()))
}

/// Random polynomial of bidegree at most `(max_z, max_w)` with complex
/// Gaussian coefficients.
pub fn random_poly2(max_z: usize, max_w: usize, rng: &mut impl Rng) -> Poly2 {
    let dz = rng.random_range(0..=max_z);
    let dw = rng.random_range(0..=max_w);
    Poly2::new(CMat::from_fn(dz + 1, dw + 1, |_, _| gaussian(rng)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RandomKind {
    RandomColligation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomPsi {
    pub kind: RandomKind,
    pub io_dim: usize,
    pub state_dim: usize,
}

/// Where a recipe's `Ψ` comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PsiSource {
    Random(RandomPsi),
    Explicit(PsiJson),
}

/// Generator recipe: the pair is the compression of `(M_z ⊗ I, M_Ψ)` to
/// `K_θ ⊗ C^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Recipe {
    #[serde(with = "json::complex_vec")]
    pub theta_zeros: Vec<C64>,
    pub psi: PsiSource,
    #[serde(default)]
    pub seed: u64,
}

/// Which kind of `θ` a seeded recipe draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootShape {
    Simple,
    Repeated,
}

impl Recipe {
    pub fn from_json(s: &str) -> Result<Self> {
        let r: Recipe = serde_json::from_str(s)?;
        r.theta()?;
        if let PsiSource::Random(p) = r.psi {
            if p.io_dim == 0 || p.state_dim == 0 || p.io_dim > 8 || p.state_dim > 8 {
                return Err(Error::InvalidInput("random colligation dimensions must lie in 1..=8".into()));
            }
        }
        Ok(r)
    }

    pub fn theta(&self) -> Result<BlaschkeProduct> {
        if self.theta_zeros.is_empty() {
            return Err(Error::InvalidInput("recipe needs at least one zero of theta".into()));
        }
        if self.theta_zeros.len() > 16 {
            return Err(Error::InvalidInput("at most 16 zeros of theta".into()));
        }
        if self.theta_zeros.iter().any(|z| !(z.norm() < 1.0)) {
            return Err(Error::InvalidInput("zeros of theta must lie in the open disc".into()));
        }
        BlaschkeProduct::from_points(&self.theta_zeros)
    }

    pub fn psi(&self) -> Result<MatrixInnerFunction> {
        match &self.psi {
            PsiSource::Explicit(raw) => MatrixInnerFunction::from_json_form(raw.clone()),
            PsiSource::Random(p) => random_colligation(p.io_dim, p.state_dim, &mut seeded_rng(self.seed)),
        }
    }

    pub fn pair(&self) -> Result<CommutingPair> {
        let theta = self.theta()?;
        let psi = self.psi()?;
        if psi.dim() * theta.degree() > 64 {
            return Err(Error::InvalidInput("instance dimension exceeds 64".into()));
        }
        dilation::compress_pair(&psi, &theta)
    }

    /// Deterministic random recipe: `deg θ ≤ 4` and `d ≤ 3`, with well
    /// separated zeros of `θ`; `Repeated` doubles one of them.
    pub fn seeded(seed: u64, shape: RootShape) -> Recipe {
        let mut rng = seeded_rng(seed);
        let distinct = match shape {
            RootShape::Simple => rng.random_range(1..=4),
            RootShape::Repeated => rng.random_range(1..=3),
        };
        let mut zeros: Vec<C64> = Vec::new();
        while zeros.len() < distinct {
            let r = THETA_RADIUS * rng.random::<f64>().sqrt();
            let t = rng.random_range(0.0..std::f64::consts::TAU);
            let z = C64::from_polar(r, t);
            if zeros.iter().all(|w| (w - z).norm() >= THETA_SEPARATION) {
                zeros.push(z);
            }
        }
        if shape == RootShape::Repeated {
            zeros.push(zeros[0]);
        }
        let io_dim = rng.random_range(1..=3);
        let state_dim = rng.random_range(1..=MAX_STATE_DIM);
        Recipe {
            theta_zeros: zeros,
            psi: PsiSource::Random(RandomPsi { kind: RandomKind::RandomColligation, io_dim, state_dim }),
            seed: rng.random(),
        }
    }
}

/// Input of one pipeline run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum InstanceSource {
    Pair { pair: PairFile },
    Recipe { recipe: Recipe },
}

/// Run settings that enter the report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub seed: u64,
    pub grids: Grids,
    /// Annihilation tolerance for the defining polynomial.
    pub tol: f64,
    /// Number of random test polynomials for the von Neumann inequality.
    pub test_polys: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Settings { seed: 0, grids: Grids::default(), tol: certify::TOL_ANN, test_polys: 8 }
    }
}

impl Settings {
    pub fn tolerances(&self) -> BTreeMap<String, f64> {
        let mut t = BTreeMap::new();
        t.insert("tol_ann".into(), self.tol);
        t.insert("tol_unitary".into(), inner::TOL_UNITARY);
        t.insert("tol_commute".into(), opcore::TOL_COMMUTE);
        t.insert("tol_trunc".into(), dilation::TOL_TRUNC);
        t.insert("tol_intertwine".into(), dilation::TOL_INTERTWINE);
        t.insert("tol_kernel".into(), dilation::TOL_KERNEL);
        t.insert("cluster_merge".into(), opcore::CLUSTER_MERGE);
        t.insert("cluster_separation".into(), opcore::CLUSTER_SEPARATION);
        t.insert("match_cap".into(), opcore::MATCH_CAP);
        t.insert("boundary_samples".into(), self.grids.boundary as f64);
        t.insert("disc_radii".into(), self.grids.disc.radii as f64);
        t.insert("disc_angles".into(), self.grids.disc.angles as f64);
        t
    }
}

/// Pipeline stage at which a run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Validate,
    Construct,
    Variety,
    Coextension,
    Annihilator,
    Checks,
}

#[derive(Debug)]
pub struct Outcome {
    pub report: CertificateReport,
    /// Set when a stage failed; the report then holds the entries produced
    /// before it plus a failing `stage_error` entry.
    pub failed_stage: Option<(Stage, Error)>,
}

fn degenerate(name: &str, err: &Error) -> Entry {
    Entry::new(name, "well-separated joint spectrum", Status::Inconclusive, 0.0)
        .with_witnesses(serde_json::json!({ "reason": err.to_string() }))
}

/// Turns `DegenerateCluster` into an inconclusive entry and passes other
/// errors through.
fn soften(name: &str, r: Result<Vec<Entry>>) -> Result<Vec<Entry>> {
    match r {
        Err(e @ Error::DegenerateCluster { .. }) => Ok(vec![degenerate(name, &e)]),
        other => other,
    }
}

pub fn certify_instance(id: &str, source: &InstanceSource, settings: &Settings) -> Outcome {
    let mut report = CertificateReport::new(id, settings.seed, settings.tolerances());
    let failed_stage = run(source, settings, &mut report).err();
    if let Some((stage, e)) = &failed_stage {
        report.push(
            Entry::new("stage_error", "pipeline completed", Status::Fail, f64::NEG_INFINITY)
                .with_witnesses(serde_json::json!({ "stage": stage, "error": e.to_string() })),
        );
    }
    Outcome { report, failed_stage }
}

fn run(
    source: &InstanceSource,
    settings: &Settings,
    report: &mut CertificateReport,
) -> std::result::Result<(), (Stage, Error)> {
    let at = |s: Stage| move |e: Error| (s, e);
    let seed = settings.seed;

    let (pair, recipe_psi) = match source {
        InstanceSource::Pair { pair } => {
            let mut file = pair.clone();
            file.require_pure = true;
            (file.validate().map_err(at(Stage::Validate))?, None)
        }
        InstanceSource::Recipe { recipe } => {
            let psi0 = recipe.psi().map_err(at(Stage::Validate))?;
            (recipe.pair().map_err(at(Stage::Validate))?, Some(psi0))
        }
    };
    report.push(
        Entry::new("pair_valid", "commuting pure contractions", Status::Pass, pair.purity_margins.0.min(pair.purity_margins.1))
            .with_witnesses(serde_json::json!({
                "dim": pair.dim(),
                "commutator_norm": pair.commutator_norm,
                "norms": [pair.norms.0, pair.norms.1],
            })),
    );

    if let Some(psi0) = recipe_psi {
        let v0 = psi0.variety_polynomial().map_err(at(Stage::Variety))?;
        let r = linalg::op_norm(&opcore::poly_apply(&v0.p, &pair)) / v0.p.l1_norm();
        report.push(Entry::new(
            "recipe_variety_annihilates",
            "the generating inner function's variety polynomial annihilates the pair",
            Status::from_bool(r < settings.tol),
            settings.tol - r,
        ));
    }

    let psi = dilation::construct_psi(&pair).map_err(at(Stage::Construct))?;
    let cert = psi.certificate();
    report.push(
        Entry::new(
            "inner_function",
            "Psi is inner with spectrum of Psi(lambda) in D",
            Status::from_bool(cert.boundary_defect < inner::TOL_UNITARY && cert.state_radius < 1.0),
            (inner::TOL_UNITARY - cert.boundary_defect).min(1.0 - cert.state_radius),
        )
        .with_witnesses(serde_json::to_value(cert).expect("serializes")),
    );
    let resid = dilation::coefficient_identity_residual(&pair, &psi).map_err(at(Stage::Construct))?;
    report.push(Entry::new(
        "psi_coefficient_identity",
        "T2 Dc* = sum_k T1^k Dc* Psi_k on the defect coordinates",
        Status::from_bool(resid < dilation::TOL_INTERTWINE),
        dilation::TOL_INTERTWINE - resid,
    ));

    let variety = psi.variety_polynomial().map_err(at(Stage::Variety))?;
    report.push(
        inner::distinguished_certificate(&psi, settings.grids.boundary, settings.grids.disc)
            .map_err(at(Stage::Variety))?,
    );

    let basis = annvar::ann_generators(&pair).map_err(at(Stage::Annihilator))?;
    let bundle =
        dilation::constrained_coextension(&pair, &psi, &basis.generators).map_err(at(Stage::Coextension))?;
    report.extend(dilation::verify_coextension(&bundle, &variety.p).map_err(at(Stage::Coextension))?);

    let checks = at(Stage::Checks);
    report.push(annvar::check_zann_equals_omega(&pair, &bundle, &basis, seed).map_err(checks)?);
    report.push(annvar::check_projection(&bundle).map_err(checks)?);
    let support =
        annvar::support_bounds(&pair, &bundle, &variety, &basis, seed).map(|s| vec![s.entry()]);
    report.extend(soften("support_sandwich", support).map_err(checks)?);
    report.push(annvar::check_ann_invariance(&bundle, &basis));
    let synth = annvar::synthesis_report(&bundle, &basis).map(|s| s.entries);
    report.extend(soften("synthesis_equivalence", synth).map_err(checks)?);

    let samples = FiberSamples::new(&variety, settings.grids).map_err(checks)?;
    let mut rng = seeded_rng(seed ^ 0x9e37_79b9_7f4a_7c15);
    let polys: Vec<Poly2> = (0..settings.test_polys).map(|_| random_poly2(3, 3, &mut rng)).collect();
    report.extend(certify::vn_report(&pair, &variety, &polys, &samples, settings.tol));
    Ok(())
}

/// The `w² = z` walkthrough: `Ψ = [[0, z], [1, 0]]` compressed to
/// `K_{z²} ⊗ C²`.
pub fn demo_source() -> InstanceSource {
    InstanceSource::Recipe {
        recipe: Recipe {
            theta_zeros: vec![cr(0.0), cr(0.0)],
            psi: PsiSource::Explicit(inner::sqrt_psi().to_json_form()),
            seed: 0,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inner::DiscGrid;

    fn quick() -> Settings {
        Settings { seed: 3, grids: Grids { boundary: 256, disc: DiscGrid { radii: 8, angles: 32 } }, tol: 1e-8, test_polys: 4 }
    }

    fn scalar_recipe(zeros: Vec<C64>) -> InstanceSource {
        InstanceSource::Recipe {
            recipe: Recipe {
                theta_zeros: zeros,
                psi: PsiSource::Explicit(PsiJson::ScalarBlaschkeTimesIdentity { zeros: vec![cr(0.0)], d: 1 }),
                seed: 0,
            },
        }
    }

    #[test]
    fn haar_is_unitary() {
        let mut rng = seeded_rng(1);
        for n in 1..5 {
            let u = haar_unitary(n, &mut rng);
            assert!(linalg::unitarity_defect(&u) < 1e-12);
        }
    }

    #[test]
    fn recipes_are_deterministic() {
        let a = Recipe::seeded(11, RootShape::Simple);
        let b = Recipe::seeded(11, RootShape::Simple);
        assert_eq!(a, b);
        assert_eq!(a.pair().unwrap(), b.pair().unwrap());
        let r = Recipe::seeded(5, RootShape::Repeated);
        assert_eq!(r.theta_zeros.first(), r.theta_zeros.last());
    }

    #[test]
    fn recipe_json_round_trip() {
        let r = Recipe::seeded(2, RootShape::Simple);
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(Recipe::from_json(&s).unwrap(), r);
        assert!(Recipe::from_json(r#"{"theta_zeros":[[1.0,0.0]],"psi":{"kind":"random_colligation","io_dim":1,"state_dim":1}}"#).is_err());
    }

    #[test]
    fn nilpotent_recipe_is_all_false_and_zann_passes() {
        let out = certify_instance("nil", &scalar_recipe(vec![cr(0.0), cr(0.0)]), &quick());
        assert!(out.failed_stage.is_none(), "{:?}", out.failed_stage);
        let r = &out.report;
        assert_eq!(r.entry("zann_equals_omega").unwrap().status, Status::Pass);
        assert_eq!(r.entry("synthesis_equivalence").unwrap().status, Status::Pass);
        let w = &r.entry("synthesis_equivalence").unwrap().witnesses;
        assert_eq!(w["m1_simple_roots"], false, "{w}");
    }

    #[test]
    fn simple_recipe_is_all_true() {
        let out = certify_instance("half", &scalar_recipe(vec![cr(0.0), cr(0.5)]), &quick());
        assert!(out.failed_stage.is_none(), "{:?}", out.failed_stage);
        let r = &out.report;
        assert_eq!(r.entry("zann_equals_omega").unwrap().status, Status::Pass);
        let w = &r.entry("synthesis_equivalence").unwrap().witnesses;
        assert_eq!(w["m1_simple_roots"], true, "{w}");
        assert_eq!(r.overall(), Status::Pass, "{}", r.to_json_pretty());
    }

    #[test]
    fn demo_passes_and_is_deterministic() {
        let a = certify_instance("demo", &demo_source(), &quick());
        let b = certify_instance("demo", &demo_source(), &quick());
        assert_eq!(a.report.overall(), Status::Pass, "{}", a.report.to_json_pretty());
        assert_eq!(a.report.to_json_pretty(), b.report.to_json_pretty());
    }

    #[test]
    fn bad_pair_fails_at_validation() {
        let file = PairFile { t1: linalg::diag(&[cr(2.0)]), t2: linalg::diag(&[cr(0.0)]), require_pure: true };
        let out = certify_instance("bad", &InstanceSource::Pair { pair: file }, &quick());
        assert!(matches!(out.failed_stage, Some((Stage::Validate, _))));
        assert_eq!(out.report.overall(), Status::Fail);
    }
}
