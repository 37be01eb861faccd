//! Acceptance suite: one line per criterion, `PASS` or `FAIL`, and a
//! non-zero exit status when an enforced criterion fails.
//!
//! The `dim K_Ψ = deg m₁` clause of the dilation criterion does not hold
//! once the inner function has size `d ≥ 2`, because `J` embeds the whole
//! space isometrically into `K_Ψ`. It is measured and reported on every run
//! but only enforced with `--include-ignored` (or `--ignored`).

use std::fs;
use std::time::Instant;

use distvar::annvar;
use distvar::certify::{self, FiberSamples, Grids, Symbol, MARGIN_SPEC};
use distvar::dilation;
use distvar::inner::{self, DiscGrid, MatrixInnerFunction, PsiJson};
use distvar::instance::{self, certify_instance, InstanceSource, PsiSource, Recipe, RootShape, Settings};
use distvar::linalg::{self, cr, from_real_rows, CMat};
use distvar::opcore::{self, validate_pair, PairFlags};
use distvar::poly::{self, BlaschkeProduct, Poly1};
use distvar::report::{CertificateReport, Status};
use distvar_cli::{cmd_certify, cmd_demo, Options};
use rand::Rng;
use rayon::prelude::*;

struct Line {
    id: usize,
    title: &'static str,
    ok: bool,
    enforced: bool,
    detail: String,
}

fn quick_settings(seed: u64) -> Settings {
    Settings { seed, grids: Grids { boundary: 256, disc: DiscGrid { radii: 8, angles: 32 } }, ..Settings::default() }
}

fn scalar_z_recipe(zeros: Vec<linalg::C64>) -> InstanceSource {
    InstanceSource::Recipe {
        recipe: Recipe {
            theta_zeros: zeros,
            psi: PsiSource::Explicit(PsiJson::ScalarBlaschkeTimesIdentity { zeros: vec![cr(0.0)], d: 1 }),
            seed: 0,
        },
    }
}

fn status_of(r: &CertificateReport, name: &str) -> Option<Status> {
    r.entry(name).map(|e| e.status)
}

fn criterion_1() -> Line {
    let psi = inner::sqrt_psi();
    let v = psi.variety_polynomial().expect("variety");
    let dist = v.p.unit_distance(&poly::sqrt_variety());
    let dist_entry = inner::distinguished_certificate(&psi, 2048, DiscGrid::default()).expect("certificate");
    let theta = BlaschkeProduct::from_points(&[cr(0.0), cr(0.0)]).expect("theta");
    let pair = dilation::compress_pair(&psi, &theta).expect("pair");
    let ann = linalg::op_norm(&opcore::poly_apply(&v.p, &pair));
    Line {
        id: 1,
        title: "w^2 = z end to end",
        ok: dist < 1e-8 && dist_entry.status == Status::Pass && ann < 1e-10,
        enforced: true,
        detail: format!("coefficient distance {dist:.1e}, distinguished {}, ||p(T1,T2)|| = {ann:.1e}", dist_entry.status),
    }
}

fn criterion_2() -> Line {
    let results: Vec<(usize, usize, usize)> = (0..50u64)
        .into_par_iter()
        .map(|k| {
            let shape = if k % 2 == 0 { RootShape::Simple } else { RootShape::Repeated };
            let recipe = Recipe::seeded(1000 + k, shape);
            let pair = recipe.pair().expect("pair");
            let psi = recipe.psi().expect("psi");
            let v = psi.variety_polynomial().expect("variety");
            let samples = FiberSamples::new(&v, Grids::default()).expect("samples");
            let mut rng = instance::seeded_rng(5000 + k);
            let qs: Vec<_> = (0..20).map(|_| instance::random_poly2(3, 3, &mut rng)).collect();
            let entries = certify::vn_report(&pair, &v, &qs, &samples, certify::TOL_ANN);
            let vn = &entries[1..];
            let holds = vn.iter().filter(|e| e.status != Status::Fail).count();
            let strict = vn.iter().filter(|e| e.status == Status::Pass).count();
            (holds, strict, vn.len())
        })
        .collect();
    let holds: usize = results.iter().map(|r| r.0).sum();
    let strict: usize = results.iter().map(|r| r.1).sum();
    let total: usize = results.iter().map(|r| r.2).sum();
    Line {
        id: 2,
        title: "polynomial von Neumann inequality on V_Psi",
        ok: holds == total,
        enforced: true,
        detail: format!("{holds}/{total} within sup + slack ({strict} below the sampled sup itself)"),
    }
}

/// The 200-instance batch shared by the zero-set, projection, support and
/// dilation criteria.
fn batch_reports() -> Vec<CertificateReport> {
    (0..200usize)
        .into_par_iter()
        .map(|i| {
            let recipe = distvar_cli::batch_recipe(2024, i);
            certify_instance(&format!("acc-{i}"), &InstanceSource::Recipe { recipe }, &quick_settings(i as u64)).report
        })
        .collect()
}

fn criterion_3(reports: &[CertificateReport]) -> Line {
    let pass = reports.iter().filter(|r| status_of(r, "zann_equals_omega") == Some(Status::Pass)).count();
    let flagged = reports.iter().filter(|r| status_of(r, "zann_equals_omega") == Some(Status::Inconclusive)).count();
    let hard = reports.len() - pass - flagged;
    Line {
        id: 3,
        title: "Z(Ann) = Omega_Psi",
        ok: pass * 100 >= 95 * reports.len() && hard == 0,
        enforced: true,
        detail: format!("{pass}/{} match, {flagged} flagged degenerate, {hard} hard failures", reports.len()),
    }
}

fn conclusive_checks(reports: &[CertificateReport], name: &str) -> (usize, usize) {
    let conclusive: Vec<_> = reports.iter().filter_map(|r| status_of(r, name)).filter(|s| *s != Status::Inconclusive).collect();
    (conclusive.iter().filter(|s| **s == Status::Pass).count(), conclusive.len())
}

fn criterion_4(reports: &[CertificateReport]) -> Line {
    let (pass, total) = conclusive_checks(reports, "omega_projection");
    Line {
        id: 4,
        title: "projection of Omega_Psi = zeros of m1",
        ok: pass == total && total > 0,
        enforced: true,
        detail: format!("{pass}/{total} conclusive instances"),
    }
}

fn criterion_5(reports: &[CertificateReport]) -> Line {
    let (pass, total) = conclusive_checks(reports, "support_sandwich");
    Line {
        id: 5,
        title: "support collapse onto sigma(S1,S2)",
        ok: pass == total && total > 0,
        enforced: true,
        detail: format!("{pass}/{total} conclusive instances with matching sets and |p| < 1e-8"),
    }
}

fn synthesis_holds(r: &CertificateReport) -> Option<[bool; 4]> {
    let w = &r.entry("synthesis_equivalence")?.witnesses;
    Some([
        w["eigenvectors_span"].as_bool()?,
        w["ann_equals_vanishing_ideal"].as_bool()?,
        w["ann_radical"].as_bool()?,
        w["m1_simple_roots"].as_bool()?,
    ])
}

fn criterion_6() -> Line {
    let runs: Vec<(RootShape, CertificateReport)> = (0..100usize)
        .into_par_iter()
        .map(|i| {
            let shape = if i < 50 { RootShape::Simple } else { RootShape::Repeated };
            let recipe = Recipe::seeded(7000 + i as u64, shape);
            let r = certify_instance(&format!("syn-{i}"), &InstanceSource::Recipe { recipe }, &quick_settings(i as u64));
            (shape, r.report)
        })
        .collect();
    let mut conclusive = 0;
    let mut unanimous = 0;
    let mut matches_shape = 0;
    for (shape, r) in &runs {
        if status_of(r, "synthesis_equivalence") == Some(Status::Inconclusive) {
            continue;
        }
        conclusive += 1;
        if let Some(c) = synthesis_holds(r) {
            if c.iter().all(|&x| x == c[0]) {
                unanimous += 1;
                if c[0] == (*shape == RootShape::Simple) {
                    matches_shape += 1;
                }
            }
        }
    }
    let nil = certify_instance("nil", &scalar_z_recipe(vec![cr(0.0), cr(0.0)]), &quick_settings(0)).report;
    let half = certify_instance("half", &scalar_z_recipe(vec![cr(0.0), cr(0.5)]), &quick_settings(0)).report;
    let nil_ok = synthesis_holds(&nil) == Some([false; 4]);
    let half_ok = synthesis_holds(&half) == Some([true; 4]);
    Line {
        id: 6,
        title: "four-way spectral synthesis agreement",
        ok: conclusive > 0 && unanimous == conclusive && nil_ok && half_ok,
        enforced: true,
        detail: format!(
            "{unanimous}/{conclusive} conclusive unanimous ({matches_shape} agree with the root shape of theta); theta=z^2 all-false {nil_ok}; theta=z(z-1/2)/(1-z/2) all-true {half_ok}"
        ),
    }
}

fn criterion_7(reports: &[CertificateReport], enforce_dim: bool) -> (Line, Line) {
    let names = ["j_isometry", "intertwining", "minimal_blaschke_s1", "ann_invariance"];
    let mut ok = true;
    let mut parts = Vec::new();
    for n in names {
        let (pass, total) = conclusive_checks(reports, n);
        ok &= pass == total && total > 0;
        parts.push(format!("{n} {pass}/{total}"));
    }
    let j_worst = reports
        .iter()
        .filter_map(|r| r.entry("j_isometry"))
        .map(|e| e.witnesses["residual"].as_f64().unwrap_or(dilation::TOL_TRUNC - e.margin))
        .fold(0.0, f64::max);
    let contracts = Line {
        id: 7,
        title: "dilation contracts (isometry, intertwining, m_S1, Ann invariance)",
        ok,
        enforced: true,
        detail: format!("{}; worst ||J*J - I|| = {j_worst:.1e}", parts.join(", ")),
    };

    let dims: Vec<(usize, usize, usize, usize)> = (0..60usize)
        .into_par_iter()
        .map(|i| {
            let recipe = distvar_cli::batch_recipe(2024, i);
            let pair = recipe.pair().expect("pair");
            let psi = dilation::construct_psi(&pair).expect("psi");
            let basis = annvar::ann_generators(&pair).expect("ann");
            let bundle = dilation::constrained_coextension(&pair, &psi, &basis.generators).expect("bundle");
            (bundle.kpsi_dim(), bundle.m1.degree(), psi.dim(), pair.dim())
        })
        .collect();
    let equal = dims.iter().filter(|(k, m, _, _)| k == m).count();
    let tracks = dims.iter().all(|(k, m, d, _)| (k == m) == (*d == 1));
    let dominates = dims.iter().filter(|(k, _, _, h)| k >= h).count();
    let dim_line = Line {
        id: 7,
        title: "dim K_Psi = deg m1",
        ok: equal == dims.len(),
        enforced: enforce_dim,
        detail: format!(
            "{equal}/{} instances; equality holds exactly when d = 1: {tracks}; dim K_Psi >= dim H in {dominates}/{}",
            dims.len(),
            dims.len()
        ),
    };
    (contracts, dim_line)
}

fn criterion_8() -> Line {
    let mut rng = instance::seeded_rng(88);
    let mut worst_boundary: f64 = 0.0;
    let mut worst_interior: f64 = 0.0;
    let mut ok = 0;
    for k in 0..100 {
        let d = 1 + k % 3;
        let n = 1 + (k / 3) % 3;
        let psi: MatrixInnerFunction = instance::random_colligation(d, n, &mut rng).expect("colligation");
        let cert = psi.certificate();
        let mut interior: f64 = 0.0;
        for _ in 0..1000 {
            let z = linalg::C64::from_polar(0.999 * rng.random::<f64>().sqrt(), rng.random::<f64>() * std::f64::consts::TAU);
            interior = interior.max(linalg::spectral_radius(&psi.eval(z).expect("eval")));
        }
        worst_boundary = worst_boundary.max(cert.boundary_defect);
        worst_interior = worst_interior.max(interior);
        if cert.boundary_defect < 1e-8 && interior < 1.0 {
            ok += 1;
        }
    }
    Line {
        id: 8,
        title: "inner-function certification of random colligations",
        ok: ok == 100,
        enforced: true,
        detail: format!("{ok}/100; worst boundary defect {worst_boundary:.1e}, worst interior spectral radius {worst_interior:.6}"),
    }
}

fn criterion_9() -> Line {
    let j2 = from_real_rows(2, 2, &[0.0, 1.0, 0.0, 0.0]);
    let z = Symbol::from(Poly1::z());
    let mut checks = Vec::new();
    checks.push(("williams(J2, z) passes", certify::williams_check(&j2, &z, MARGIN_SPEC).map(|e| e.status).ok() == Some(Status::Pass)));
    let half = linalg::diag(&[cr(0.5)]);
    checks.push(("williams(1/2, z) fails", certify::williams_check(&half, &z, MARGIN_SPEC).map(|e| e.status).ok() == Some(Status::Fail)));

    let mut t1 = CMat::zeros(3, 3);
    t1[(0, 1)] = cr(1.0);
    let iso = validate_pair(&t1, &linalg::identity(3), PairFlags::default()).expect("pair");
    checks.push(("isometry_variant(J2+0, I) passes", certify::isometry_variant(&iso, MARGIN_SPEC).status == Status::Pass));

    let dist = inner::distinguished_certificate(&inner::sqrt_psi(), 2048, DiscGrid::default()).expect("certificate");
    let pair = validate_pair(&j2, &linalg::identity(2), PairFlags::default()).expect("pair");
    let all_pass = certify::min_conditions(&pair, &dist, &z, &z, MARGIN_SPEC)
        .map(|es| es.iter().all(|e| e.status == Status::Pass))
        .unwrap_or(false);
    checks.push(("min_conditions(J2, I; z, z) passes", all_pass));
    let t = linalg::diag(&[cr(0.999), cr(0.0)]);
    let near = validate_pair(&t, &t, PairFlags::default()).expect("pair");
    let inconclusive = certify::min_conditions(&near, &dist, &z, &z, 0.01)
        .map(|es| es[0].status == Status::Inconclusive)
        .unwrap_or(false);
    checks.push(("min_conditions spectral radius 0.999 inconclusive", inconclusive));
    let konst = Symbol::from(Poly1::constant(cr(1.0)));
    let rejected = matches!(certify::min_conditions(&near, &dist, &konst, &z, 0.01), Err(distvar::Error::ConstantSymbol));
    checks.push(("min_conditions constant symbol rejected", rejected));

    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    Line {
        id: 9,
        title: "hypothesis checkers",
        ok: failed.is_empty(),
        enforced: true,
        detail: if failed.is_empty() { format!("{} examples behave as stated", checks.len()) } else { format!("failing: {}", failed.join("; ")) },
    }
}

fn criterion_10() -> Line {
    let dir = tempfile::tempdir().expect("tempdir");
    let recipe = distvar_cli::batch_recipe(31, 3);
    let path = dir.path().join("recipe.json");
    fs::write(&path, serde_json::to_string_pretty(&recipe).expect("serializes")).expect("write");
    let opts = Options { seed: 31, ..Options::default() };
    let a = cmd_certify(&path, &opts);
    let b = cmd_certify(&path, &opts);
    let demo_a = cmd_demo(&Options { seed: 7, ..Options::default() });
    let demo_b = cmd_demo(&Options { seed: 7, ..Options::default() });
    let same = a.stdout == b.stdout && demo_a.stdout == demo_b.stdout;
    let seeded = demo_a.report.as_ref().map(|r| r.seed) == Some(7);
    Line {
        id: 10,
        title: "deterministic reports",
        ok: same && seeded && !a.stdout.is_empty(),
        enforced: true,
        detail: format!("certify and demo byte-identical across runs: {same}; demo records seed 7: {seeded}"),
    }
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    // The libtest protocol lists tests with `--list`; this target has one.
    if args.iter().any(|a| a == "--list") {
        println!("acceptance: test");
        return;
    }
    let enforce_dim = args.iter().any(|a| a == "--include-ignored" || a == "--ignored");
    let start = Instant::now();

    let mut lines = vec![criterion_1(), criterion_2()];
    let reports = batch_reports();
    lines.push(criterion_3(&reports));
    lines.push(criterion_4(&reports));
    lines.push(criterion_5(&reports));
    lines.push(criterion_6());
    let (c7, c7_dim) = criterion_7(&reports, enforce_dim);
    lines.push(c7);
    lines.push(c7_dim);
    lines.push(criterion_8());
    lines.push(criterion_9());
    lines.push(criterion_10());

    let mut failed = false;
    for l in &lines {
        let tag = if l.ok { "PASS" } else { "FAIL" };
        let note = if !l.ok && !l.enforced { " [known false in general; enforced with --include-ignored]" } else { "" };
        println!("criterion {:>2} {tag}: {} :: {}{note}", l.id, l.title, l.detail);
        failed |= !l.ok && l.enforced;
    }
    println!("acceptance finished in {:.1}s", start.elapsed().as_secs_f64());
    if failed {
        std::process::exit(1);
    }
}
