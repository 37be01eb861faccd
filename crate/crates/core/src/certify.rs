//! Spectral-set certificates: sampled suprema on `V̄_Ψ`, the polynomial
//! and rational von Neumann inequalities on the variety, and hypothesis
//! checkers for minimal spectral sets.
//!
//! Minimality is never computed here. The checkers only verify the
//! hypotheses under which minimality is known to follow.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inner::{DiscGrid, VarietyDescription};
use crate::linalg::{self, CMat, C64};
use crate::opcore::{self, CommutingPair};
use crate::poly::{self, BlaschkeProduct, Poly1, Poly2};
use crate::report::{Entry, Status};

pub const TOL_ATTAIN: f64 = 1e-6;
pub const TOL_SUP: f64 = 1e-6;
pub const TOL_ANN: f64 = 1e-8;
pub const TOL_ISOMETRY: f64 = 1e-8;
pub const MARGIN_SPEC: f64 = 1e-3;
/// Minimum of `|p₂|` on the sampled variety for rational symbols.
pub const DENOMINATOR_MARGIN: f64 = 1e-6;
pub const SYMBOL_GRID: usize = 2048;

/// Sample grids for suprema on a variety.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grids {
    pub boundary: usize,
    pub disc: DiscGrid,
}

impl Default for Grids {
    fn default() -> Self {
        Grids { boundary: 2048, disc: DiscGrid::default() }
    }
}

/// Fibers of `V_Ψ` over the boundary and disc grids.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberSamples {
    pub grids: Grids,
    /// `(z, fiber)` over the circle, in angular order.
    pub boundary: Vec<(C64, Vec<C64>)>,
    pub disc: Vec<(C64, Vec<C64>)>,
    /// Largest optimal-matching distance between fibers over consecutive
    /// boundary samples: the spacing of the sampled boundary curve in `w`.
    pub boundary_w_spacing: f64,
}

impl FiberSamples {
    pub fn new(variety: &VarietyDescription, grids: Grids) -> Result<Self> {
        let psi = &variety.psi;
        let sample = |zs: Vec<C64>| -> Result<Vec<(C64, Vec<C64>)>> {
            zs.into_par_iter().map(|z| Ok((z, psi.fiber(z)?))).collect()
        };
        let boundary = sample(poly::circle_grid(grids.boundary))?;
        let disc = sample(grids.disc.points())?;
        let mut spacing: f64 = 0.0;
        for k in 0..boundary.len() {
            let next = &boundary[(k + 1) % boundary.len()];
            spacing = spacing.max(linalg::matching_distance(&boundary[k].1, &next.1));
        }
        Ok(FiberSamples { grids, boundary, disc, boundary_w_spacing: spacing })
    }

    pub fn z_spacing(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.grids.boundary.max(1) as f64
    }

    pub fn points(&self) -> impl Iterator<Item = (C64, C64)> + '_ {
        self.boundary
            .iter()
            .chain(&self.disc)
            .flat_map(|(z, ws)| ws.iter().map(move |&w| (*z, w)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupEstimate {
    pub sup: f64,
    pub boundary_max: f64,
    pub disc_max: f64,
    /// Bound on how far the sampled maximum can sit below the true one.
    pub slack: f64,
    pub grids: Grids,
}

/// `max |q|` over the sampled fibers. Since `q` restricted to `V̄_Ψ` attains
/// its maximum on `V̄_Ψ ∩ T²`, the gap to the true supremum is bounded by
/// gradient bounds of `q` on the closed bidisc times half the boundary
/// sample spacings in `z` and `w`.
pub fn sup_on_samples(samples: &FiberSamples, q: &Poly2) -> SupEstimate {
    let fold = |s: &[(C64, Vec<C64>)]| {
        s.iter().flat_map(|(z, ws)| ws.iter().map(move |&w| q.eval(*z, w).norm())).fold(0.0, f64::max)
    };
    let boundary_max = fold(&samples.boundary);
    let disc_max = fold(&samples.disc);
    let slack = gradient_slack(&q.d_dz(), &q.d_dw(), samples);
    SupEstimate { sup: boundary_max.max(disc_max), boundary_max, disc_max, slack, grids: samples.grids }
}

fn gradient_slack(dz: &Poly2, dw: &Poly2, samples: &FiberSamples) -> f64 {
    dz.l1_norm() * samples.z_spacing() / 2.0 + dw.l1_norm() * samples.boundary_w_spacing / 2.0
}

pub fn sup_on_variety(variety: &VarietyDescription, q: &Poly2, grids: Grids) -> Result<SupEstimate> {
    Ok(sup_on_samples(&FiberSamples::new(variety, grids)?, q))
}

/// `max |q|` over an `n × n` grid of the torus, the sampled bidisc supremum.
pub fn torus_sup(q: &Poly2, n: usize) -> f64 {
    let g = poly::circle_grid(n);
    g.iter().flat_map(|&z| g.iter().map(move |&w| q.eval(z, w).norm())).fold(0.0, f64::max)
}

/// Relative roundoff allowed when a norm meets a sampled supremum exactly.
pub const ROUNDOFF: f64 = 1e-10;

fn inequality_status(lhs: f64, sup: f64, slack: f64) -> Status {
    if lhs <= sup + ROUNDOFF * sup.max(1.0) {
        Status::Pass
    } else if lhs <= sup + slack {
        Status::Inconclusive
    } else {
        Status::Fail
    }
}

/// `‖q(T₁,T₂)‖ ≤ sup_{V_Ψ}|q|` for each `q`, and `p(T₁,T₂) = 0` for the
/// defining polynomial.
pub fn vn_report(
    pair: &CommutingPair,
    variety: &VarietyDescription,
    polys: &[Poly2],
    samples: &FiberSamples,
    tol_ann: f64,
) -> Vec<Entry> {
    let scale = variety.p.l1_norm().max(f64::MIN_POSITIVE);
    let def = linalg::op_norm(&opcore::poly_apply(&variety.p, pair)) / scale;
    let mut out = vec![Entry::new(
        "defining_polynomial_annihilates",
        "p(T1,T2) = 0",
        Status::from_bool(def < tol_ann),
        tol_ann - def,
    )];
    let per_q: Vec<Entry> = polys
        .par_iter()
        .enumerate()
        .map(|(k, q)| {
            let lhs = linalg::op_norm(&opcore::poly_apply(q, pair));
            let est = sup_on_samples(samples, q);
            Entry::new(
                &format!("von_neumann_{k}"),
                "||q(T1,T2)|| <= sup over V_Psi of |q| for every polynomial q",
                inequality_status(lhs, est.sup, est.slack),
                est.sup - lhs,
            )
            .with_witnesses(serde_json::json!({ "norm": lhs, "sup": est.sup, "slack": est.slack }))
        })
        .collect();
    out.extend(per_q);
    out
}

/// Rational extension: `‖p₁(T)p₂(T)⁻¹‖ ≤ sup_{V_Ψ}|p₁/p₂|` when `p₂` stays
/// away from zero on the sampled variety.
pub fn vn_rational(
    pair: &CommutingPair,
    variety: &VarietyDescription,
    p1: &Poly2,
    p2: &Poly2,
    samples: &FiberSamples,
    name: &str,
) -> Result<Entry> {
    let mut min_den = f64::INFINITY;
    let mut sup: f64 = 0.0;
    let mut max_num: f64 = 0.0;
    for (z, w) in samples.points() {
        let den = p2.eval(z, w).norm();
        min_den = min_den.min(den);
        let num = p1.eval(z, w).norm();
        max_num = max_num.max(num);
        sup = sup.max(num / den);
    }
    if !(min_den > DENOMINATOR_MARGIN) {
        return Err(Error::DenominatorVanishes(min_den));
    }
    if denominator_zeros_in_disc(variety, p2, samples.grids.boundary)? != 0 {
        return Err(Error::DenominatorVanishes(0.0));
    }
    let den_t = opcore::poly_apply(p2, pair);
    let inv = linalg::inverse(&den_t).ok_or(Error::DenominatorVanishes(0.0))?;
    let lhs = linalg::op_norm(&(opcore::poly_apply(p1, pair) * inv));
    // |∇(p₁/p₂)| ≤ (|∇p₁|·max|p₂| + max|p₁|·|∇p₂|) / min|p₂|² on the samples.
    let max_den = p2.l1_norm();
    let gz = (p1.d_dz().l1_norm() * max_den + max_num * p2.d_dz().l1_norm()) / (min_den * min_den);
    let gw = (p1.d_dw().l1_norm() * max_den + max_num * p2.d_dw().l1_norm()) / (min_den * min_den);
    let slack = gz * samples.z_spacing() / 2.0 + gw * samples.boundary_w_spacing / 2.0;
    Ok(Entry::new(
        name,
        "V_Psi is a spectral set for (T1,T2): rational symbols with poles off the closure",
        inequality_status(lhs, sup, slack),
        sup - lhs,
    )
    .with_witnesses(serde_json::json!({ "norm": lhs, "sup": sup, "slack": slack, "min_denominator": min_den })))
}

/// Number of zeros in `D` of `h(z) = det p₂(z, Ψ(z)) = ∏_{w ∈ fiber} p₂(z, w)`,
/// which vanishes exactly where `p₂` meets `V_Ψ`. Counted by the winding
/// number of `h` around the unit circle.
pub fn denominator_zeros_in_disc(variety: &VarietyDescription, p2: &Poly2, n: usize) -> Result<usize> {
    let n = n.max(64);
    let mut vals = Vec::with_capacity(n);
    for z in poly::circle_grid(n) {
        let psi = variety.psi.eval(z)?;
        let zi = linalg::identity(psi.nrows()) * z;
        vals.push(opcore::poly_apply_mats(p2, &zi, &psi).determinant());
    }
    let mut turn = 0.0;
    for k in 0..n {
        turn += (vals[(k + 1) % n] / vals[k]).arg();
    }
    let winding = (turn / (2.0 * std::f64::consts::PI)).round();
    Ok(winding.max(0.0) as usize)
}

/// A one-variable symbol: polynomial or finite Blaschke product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Symbol {
    Polynomial { poly: Poly1 },
    Blaschke { blaschke: BlaschkeProduct },
}

impl Symbol {
    pub fn is_constant(&self) -> bool {
        match self {
            Symbol::Polynomial { poly } => poly.degree().unwrap_or(0) == 0,
            Symbol::Blaschke { blaschke } => blaschke.degree() == 0,
        }
    }

    pub fn eval(&self, z: C64) -> Result<C64> {
        match self {
            Symbol::Polynomial { poly } => Ok(poly.eval(z)),
            Symbol::Blaschke { blaschke } => blaschke.eval(z),
        }
    }

    pub fn apply(&self, t: &CMat) -> Result<CMat> {
        match self {
            Symbol::Polynomial { poly } => Ok(opcore::poly1_apply(poly, t)),
            Symbol::Blaschke { blaschke } => opcore::blaschke_apply(blaschke, t),
        }
    }

    /// Supremum on the disc, sampled on the boundary circle.
    pub fn disc_sup(&self, n: usize) -> Result<f64> {
        let mut m: f64 = 0.0;
        for z in poly::circle_grid(n) {
            m = m.max(self.eval(z)?.norm());
        }
        Ok(m)
    }
}

impl From<Poly1> for Symbol {
    fn from(poly: Poly1) -> Self {
        Symbol::Polynomial { poly }
    }
}

impl From<BlaschkeProduct> for Symbol {
    fn from(blaschke: BlaschkeProduct) -> Self {
        Symbol::Blaschke { blaschke }
    }
}

fn spectrum_inside_status(rho: f64, margin_spec: f64) -> Status {
    if rho <= 1.0 - margin_spec {
        Status::Pass
    } else if rho < 1.0 {
        Status::Inconclusive
    } else {
        Status::Fail
    }
}

/// Hypotheses of the two-variable minimality criterion: `σ(T₁) ⊂ D` and
/// `‖φ₁‖ = ‖φ₂‖ = ‖φ₁(T₁)φ₂(T₂)‖ = 1`. The overall entry additionally
/// needs the distinguished-variety certificate.
pub fn min_conditions(
    pair: &CommutingPair,
    distinguished: &Entry,
    phi1: &Symbol,
    phi2: &Symbol,
    margin_spec: f64,
) -> Result<Vec<Entry>> {
    if phi1.is_constant() || phi2.is_constant() {
        return Err(Error::ConstantSymbol);
    }
    let rho = linalg::spectral_radius(&pair.t1);
    let e1 = Entry::new(
        "min_spectrum_inside",
        "the spectrum of T1 is contained in D",
        spectrum_inside_status(rho, margin_spec),
        1.0 - margin_spec - rho,
    )
    .with_witnesses(serde_json::json!({ "spectral_radius": rho, "margin_spec": margin_spec }));

    let s1 = phi1.disc_sup(SYMBOL_GRID)?;
    let s2 = phi2.disc_sup(SYMBOL_GRID)?;
    let prod = linalg::op_norm(&(phi1.apply(&pair.t1)? * phi2.apply(&pair.t2)?));
    let sup_dev = (s1 - 1.0).abs().max((s2 - 1.0).abs());
    let att_dev = (prod - 1.0).abs();
    let e2 = Entry::new(
        "min_attainment",
        "1 = ||phi1||_D = ||phi2||_D = ||phi1(T1) phi2(T2)||",
        Status::from_bool(sup_dev <= TOL_SUP && att_dev <= TOL_ATTAIN),
        (TOL_SUP - sup_dev).min(TOL_ATTAIN - att_dev),
    )
    .with_witnesses(serde_json::json!({ "sup_phi1": s1, "sup_phi2": s2, "product_norm": prod }));

    let overall = Status::all([e1.status, e2.status, distinguished.status]);
    let e3 = Entry::new(
        "minimality_certified",
        "closure of V_Psi is a minimal spectral set (sufficient hypotheses verified)",
        overall,
        e1.margin.min(e2.margin),
    );
    Ok(vec![e1, e2, e3])
}

/// Hypotheses of the isometric variant: `T₂` an isometry, `‖T₁‖ = 1` and
/// `σ(T₁) ⊂ D`. Matrix isometries are unitary, so such a pair is never pure;
/// the certificate concerns the spectral-set claim only.
pub fn isometry_variant(pair: &CommutingPair, margin_spec: f64) -> Entry {
    let n = pair.dim();
    let iso = linalg::op_norm(&(pair.t2.adjoint() * &pair.t2 - linalg::identity(n)));
    let norm_dev = (pair.norms.0 - 1.0).abs();
    let rho = linalg::spectral_radius(&pair.t1);
    let spec = spectrum_inside_status(rho, margin_spec);
    let status = Status::all([
        Status::from_bool(iso < TOL_ISOMETRY),
        Status::from_bool(norm_dev <= TOL_ATTAIN),
        spec,
    ]);
    Entry::new(
        "isometry_variant",
        "T1 of norm 1 with spectrum in D commuting with an isometry T2",
        status,
        (TOL_ISOMETRY - iso).min(TOL_ATTAIN - norm_dev).min(1.0 - margin_spec - rho),
    )
    .with_witnesses(serde_json::json!({
        "isometry_defect": iso,
        "t1_norm": pair.norms.0,
        "t1_spectral_radius": rho,
        "note": "a matrix isometry is unitary, so the pair is not pure",
    }))
}

/// Williams' criterion on the disc: `σ(T) ⊂ D` and `‖φ(T)‖ = ‖φ‖_D = 1`.
pub fn williams_check(t: &CMat, phi: &Symbol, margin_spec: f64) -> Result<Entry> {
    let norm = linalg::op_norm(t);
    if norm > 1.0 + opcore::TOL_NORM {
        return Err(Error::NotContractive { norm });
    }
    let rho = linalg::spectral_radius(t);
    let val = linalg::op_norm(&phi.apply(t)?);
    let sup = phi.disc_sup(SYMBOL_GRID)?;
    let ok = rho < 1.0 - margin_spec && (val - 1.0).abs() <= TOL_ATTAIN && (sup - 1.0).abs() <= TOL_SUP;
    Ok(Entry::new(
        "williams",
        "the closed disc is a minimal spectral set for T",
        Status::from_bool(ok),
        (1.0 - margin_spec - rho).min(TOL_ATTAIN - (val - 1.0).abs()).min(TOL_SUP - (sup - 1.0).abs()),
    )
    .with_witnesses(serde_json::json!({ "spectral_radius": rho, "phi_norm": val, "phi_sup": sup })))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dilation::compress_pair;
    use crate::inner::{distinguished_certificate, sqrt_psi};
    use crate::linalg::{c, cr, from_real_rows};
    use crate::opcore::{validate_pair, PairFlags};

    fn small_grids() -> Grids {
        Grids { boundary: 256, disc: DiscGrid { radii: 8, angles: 32 } }
    }

    fn j2() -> CMat {
        from_real_rows(2, 2, &[0.0, 0.0, 1.0, 0.0])
    }

    fn z_sym() -> Symbol {
        Symbol::from(Poly1::z())
    }

    #[test]
    fn sup_examples() {
        let v = sqrt_psi().variety_polynomial().unwrap();
        let s = sup_on_variety(&v, &v.p, small_grids()).unwrap();
        assert!(s.sup < 1e-8);
        let z = Poly2::monomial(1, 0, cr(1.0));
        let w = Poly2::monomial(0, 1, cr(1.0));
        assert!((sup_on_variety(&v, &z, small_grids()).unwrap().sup - 1.0).abs() < 1e-10);
        assert!((sup_on_variety(&v, &w, small_grids()).unwrap().sup - 1.0).abs() < 1e-10);
    }

    #[test]
    fn sup_is_monotone_under_refinement() {
        let v = sqrt_psi().variety_polynomial().unwrap();
        let q = Poly2::from_terms(&[(0, 0, c(0.2, 0.1)), (1, 1, cr(0.7)), (0, 2, c(0.0, -0.4)), (2, 0, cr(0.3))]);
        let mut prev = 0.0;
        for n in [64, 128, 256, 512] {
            let s = sup_on_variety(&v, &q, Grids { boundary: n, disc: DiscGrid { radii: 4, angles: 16 } }).unwrap();
            assert!(s.sup >= prev);
            prev = s.sup;
        }
    }

    #[test]
    fn vn_on_sqrt_instance() {
        let theta = BlaschkeProduct::from_points(&[cr(0.0), cr(0.0)]).unwrap();
        let pair = compress_pair(&sqrt_psi(), &theta).unwrap();
        let v = sqrt_psi().variety_polynomial().unwrap();
        let samples = FiberSamples::new(&v, small_grids()).unwrap();
        let qs = vec![Poly2::monomial(1, 0, cr(1.0)), Poly2::monomial(0, 1, cr(1.0)), Poly2::monomial(1, 1, cr(1.0))];
        let entries = vn_report(&pair, &v, &qs, &samples, TOL_ANN);
        assert!(entries.iter().all(|e| e.status == Status::Pass), "{entries:?}");
        assert!(entries[0].margin > 0.0);
        for q in &qs {
            assert!(sup_on_samples(&samples, q).sup <= torus_sup(q, 256) + 1e-12);
        }
    }

    #[test]
    fn rational_symbol_on_sqrt_instance() {
        let theta = BlaschkeProduct::from_points(&[cr(0.1), cr(-0.3)]).unwrap();
        let pair = compress_pair(&sqrt_psi(), &theta).unwrap();
        let v = sqrt_psi().variety_polynomial().unwrap();
        let samples = FiberSamples::new(&v, small_grids()).unwrap();
        let p1 = Poly2::from_terms(&[(0, 1, cr(1.0)), (1, 0, cr(0.5))]);
        let p2 = Poly2::from_terms(&[(0, 0, cr(2.0)), (1, 1, cr(-0.5))]);
        let e = vn_rational(&pair, &v, &p1, &p2, &samples, "rational").unwrap();
        assert_eq!(e.status, Status::Pass);
        let bad = Poly2::from_terms(&[(0, 1, cr(1.0))]);
        assert!(matches!(vn_rational(&pair, &v, &p1, &bad, &samples, "r"), Err(Error::DenominatorVanishes(_))));
    }

    #[test]
    fn min_conditions_examples() {
        let pair = validate_pair(&j2(), &linalg::identity(2), PairFlags::default()).unwrap();
        let dist = distinguished_certificate(&sqrt_psi(), 64, DiscGrid { radii: 8, angles: 16 }).unwrap();
        let e = min_conditions(&pair, &dist, &z_sym(), &z_sym(), MARGIN_SPEC).unwrap();
        assert!(e.iter().all(|x| x.status == Status::Pass), "{e:?}");

        let t = linalg::diag(&[cr(0.999), cr(0.0)]);
        let pair = validate_pair(&t, &t, PairFlags::default()).unwrap();
        let e = min_conditions(&pair, &dist, &z_sym(), &z_sym(), 0.01).unwrap();
        assert_eq!(e[0].status, Status::Inconclusive);

        let konst = Symbol::from(Poly1::constant(cr(1.0)));
        assert!(matches!(min_conditions(&pair, &dist, &konst, &z_sym(), 0.01), Err(Error::ConstantSymbol)));
    }

    #[test]
    fn isometry_variant_examples() {
        let mut t1 = linalg::zeros(3, 3);
        t1[(1, 0)] = cr(1.0);
        let pair = validate_pair(&t1, &linalg::identity(3), PairFlags::default()).unwrap();
        assert_eq!(isometry_variant(&pair, MARGIN_SPEC).status, Status::Pass);

        let pair = validate_pair(&j2(), &linalg::diag(&[cr(1.0), cr(0.5)]), PairFlags::default()).unwrap();
        let e = isometry_variant(&pair, MARGIN_SPEC);
        assert_eq!(e.status, Status::Fail);
        assert!((e.witnesses["isometry_defect"].as_f64().unwrap() - 0.75).abs() < 1e-12);

        let u = from_real_rows(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let pair = validate_pair(&linalg::zeros(2, 2), &u, PairFlags::default()).unwrap();
        assert_eq!(isometry_variant(&pair, MARGIN_SPEC).status, Status::Fail);
    }

    #[test]
    fn williams_examples() {
        let t = from_real_rows(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert_eq!(williams_check(&t, &z_sym(), MARGIN_SPEC).unwrap().status, Status::Pass);
        let half = linalg::diag(&[cr(0.5)]);
        assert_eq!(williams_check(&half, &z_sym(), MARGIN_SPEC).unwrap().status, Status::Fail);
        let z2 = Symbol::from(Poly1::new(vec![cr(0.0), cr(0.0), cr(1.0)]));
        assert_eq!(williams_check(&t, &z2, MARGIN_SPEC).unwrap().status, Status::Fail);
    }
}
