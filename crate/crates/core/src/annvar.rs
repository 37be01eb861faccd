//! Annihilator ideals in a polynomial degree box, their zero sets, the
//! joint point spectrum `Ω_Ψ` of the constrained co-extension, support
//! bounds, and the spectral-synthesis report.

use serde::Serialize;

use crate::dilation::CoextensionBundle;
use crate::error::{Error, Result};
use crate::inner::VarietyDescription;
use crate::json;
use crate::linalg::{self, CMat, RankDecision, C64};
use crate::opcore::{self, CommutingPair, JointSpectrum, PairCluster};
use crate::poly::{BlaschkeProduct, Poly2};
use crate::report::{Entry, Status};

pub const TOL_ANN: f64 = 1e-8;
pub const TOL_ZSET: f64 = 1e-6;
/// Relative singular-value threshold for box kernels.
pub const TOL_BOX: f64 = 1e-8;
/// Subspace agreement tolerance for box kernels of different pairs.
pub const TOL_SUBSPACE: f64 = 1e-7;
const COLUMN_FLOOR: f64 = 1e-10;
/// Separation below which two roots of `m₁` count as repeated.
pub const ROOT_SEPARATION: f64 = opcore::CLUSTER_SEPARATION;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnnihilatorBasis {
    /// Monomials `z^i w^j` with `i < box.0`, `j < box.1`.
    pub box_dims: (usize, usize),
    /// Kernel of the evaluation map on the box, followed by `m₁(z)` and `m₂(w)`.
    pub generators: Vec<Poly2>,
    /// Number of leading generators that come from the box kernel.
    pub box_generators: usize,
    pub m1: BlaschkeProduct,
    pub m2: BlaschkeProduct,
    /// Orthonormal basis of the box kernel in monomial coefficient space
    /// (index `i·box.1 + j`).
    #[serde(with = "json::matrix")]
    pub box_kernel: CMat,
    pub conclusive: bool,
}

/// Orthonormal basis (monomial coefficients) of `{p in box : p(T₁,T₂) = 0}`.
pub fn box_kernel(t1: &CMat, t2: &CMat, bz: usize, bw: usize) -> (CMat, RankDecision) {
    let n = t1.nrows();
    let size = bz * bw;
    if size == 0 {
        return (linalg::zeros(0, 0), RankDecision { rank: 0, threshold: 0.0, conclusive: true });
    }
    let mut p1 = vec![linalg::identity(n)];
    for i in 1..bz {
        p1.push(&p1[i - 1] * t1);
    }
    let mut p2 = vec![linalg::identity(n)];
    for j in 1..bw {
        p2.push(&p2[j - 1] * t2);
    }
    let mut eval = linalg::zeros(n * n, size);
    let mut scales = vec![1.0; size];
    for i in 0..bz {
        for j in 0..bw {
            let col = linalg::vec_of(&(&p1[i] * &p2[j]));
            let s = col.norm();
            let k = i * bw + j;
            // Columns at roundoff level are zero: normalizing them would
            // promote noise to unit size.
            if s > COLUMN_FLOOR {
                scales[k] = s;
                eval.set_column(k, &(col / linalg::cr(s)));
            }
        }
    }
    let (kernel, decision) = linalg::null_space(&eval, TOL_BOX);
    if kernel.ncols() == 0 {
        return (kernel, decision);
    }
    let unscaled = CMat::from_fn(size, kernel.ncols(), |r, c| kernel[(r, c)] / linalg::cr(scales[r]));
    (linalg::range_basis(&unscaled, 1e-12).0, decision)
}

fn coeffs_to_poly(v: &[C64], bw: usize) -> Poly2 {
    let bz = v.len() / bw.max(1);
    Poly2::new(CMat::from_fn(bz.max(1), bw.max(1), |i, j| v.get(i * bw + j).copied().unwrap_or_default()))
}

pub fn ann_generators(pair: &CommutingPair) -> Result<AnnihilatorBasis> {
    pair.require_pure()?;
    let mb1 = opcore::minimal_blaschke_detailed(&pair.t1)?;
    let mb2 = opcore::minimal_blaschke_detailed(&pair.t2)?;
    let (bz, bw) = (mb1.blaschke.degree(), mb2.blaschke.degree());
    let (kernel, decision) = box_kernel(&pair.t1, &pair.t2, bz, bw);
    let mut generators: Vec<Poly2> = (0..kernel.ncols())
        .map(|c| {
            let col: Vec<C64> = kernel.column(c).iter().copied().collect();
            coeffs_to_poly(&col, bw).chop(1e-13)
        })
        .collect();
    let box_generators = generators.len();
    generators.push(Poly2::from_z(&mb1.blaschke.numerator()));
    generators.push(Poly2::from_w(&mb2.blaschke.numerator()));
    Ok(AnnihilatorBasis {
        box_dims: (bz, bw),
        generators,
        box_generators,
        m1: mb1.blaschke,
        m2: mb2.blaschke,
        box_kernel: kernel,
        conclusive: decision.conclusive && mb1.conclusive && mb2.conclusive,
    })
}

impl AnnihilatorBasis {
    /// Largest `‖g(T₁,T₂)‖/‖g‖₁` over the generators.
    pub fn max_residual(&self, t1: &CMat, t2: &CMat) -> f64 {
        self.generators
            .iter()
            .map(|g| linalg::op_norm(&opcore::poly_apply_mats(g, t1, t2)) / g.l1_norm().max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max)
    }

    fn vanishes_at(&self, l: C64, m: C64) -> bool {
        self.generators.iter().all(|g| g.eval(l, m).norm() <= TOL_ZSET * g.l1_norm())
    }
}

/// Taylor-spectrum points at which every generator vanishes.
pub fn z_ann(basis: &AnnihilatorBasis, pair: &CommutingPair, seed: u64) -> Result<Vec<(C64, C64)>> {
    let spec = opcore::joint_spectrum_taylor(pair, seed)?;
    let pts = spec.distinct_points()?;
    Ok(pts
        .into_iter()
        .filter(|&(l, m)| l.norm() < 1.0 && m.norm() < 1.0 && basis.vanishes_at(l, m))
        .collect())
}

/// `Ω_Ψ`: conjugated joint eigenvalues of `(S₁*, S₂*)` with eigenvector
/// witnesses (columns span each joint eigenspace).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OmegaPsi {
    pub spectrum: JointSpectrum,
}

impl OmegaPsi {
    pub fn points(&self) -> &[(C64, C64)] {
        &self.spectrum.points
    }

    pub fn distinct_points(&self) -> Result<Vec<(C64, C64)>> {
        self.spectrum.distinct_points()
    }
}

pub fn omega_psi(bundle: &CoextensionBundle) -> OmegaPsi {
    let mut s = opcore::joint_point_spectrum_mats(&bundle.s1.adjoint(), &bundle.s2.adjoint());
    for p in &mut s.points {
        *p = (p.0.conj(), p.1.conj());
    }
    OmegaPsi { spectrum: s }
}

fn pairs_json(pts: &[(C64, C64)]) -> serde_json::Value {
    serde_json::json!(pts.iter().map(|&(a, b)| [json::c64_to_pair(a), json::c64_to_pair(b)]).collect::<Vec<_>>())
}

fn degenerate_entry(name: &str, anchor: &str, err: &Error) -> Entry {
    Entry::new(name, anchor, Status::Inconclusive, 0.0).with_witnesses(serde_json::json!({ "reason": err.to_string() }))
}

pub fn check_zann_equals_omega(
    pair: &CommutingPair,
    bundle: &CoextensionBundle,
    basis: &AnnihilatorBasis,
    seed: u64,
) -> Result<Entry> {
    const NAME: &str = "zann_equals_omega";
    const ANCHOR: &str = "Z(Ann(T1,T2)) = Omega_Psi";
    let z = match z_ann(basis, pair, seed) {
        Ok(z) => z,
        Err(e @ Error::DegenerateCluster { .. }) => return Ok(degenerate_entry(NAME, ANCHOR, &e)),
        Err(e) => return Err(e),
    };
    let omega = match omega_psi(bundle).distinct_points() {
        Ok(o) => o,
        Err(e @ Error::DegenerateCluster { .. }) => return Ok(degenerate_entry(NAME, ANCHOR, &e)),
        Err(e) => return Err(e),
    };
    let dist = opcore::pair_set_distance(&z, &omega);
    Ok(Entry::new(NAME, ANCHOR, Status::from_bool(dist < opcore::MATCH_CAP), opcore::MATCH_CAP - dist)
        .with_witnesses(serde_json::json!({ "z_ann": pairs_json(&z), "omega_psi": pairs_json(&omega), "distance": dist })))
}

/// First-coordinate projection of `Ω_Ψ` against the zeros of `m₁`.
pub fn check_projection(bundle: &CoextensionBundle) -> Result<Entry> {
    const NAME: &str = "omega_projection";
    const ANCHOR: &str = "Omega_1 = Z(Ann(T1))";
    if bundle.m1.degree() == 0 {
        return Err(Error::AnnTrivial);
    }
    let omega = match omega_psi(bundle).distinct_points() {
        Ok(o) => o,
        Err(e @ Error::DegenerateCluster { .. }) => return Ok(degenerate_entry(NAME, ANCHOR, &e)),
        Err(e) => return Err(e),
    };
    let firsts: Vec<C64> = omega.iter().map(|p| p.0).collect();
    let proj: Vec<(C64, C64)> = opcore::cluster_points(&firsts, opcore::CLUSTER_MERGE)
        .into_iter()
        .map(|c| (c.center, C64::default()))
        .collect();
    let roots: Vec<(C64, C64)> = bundle.m1.zeros().iter().map(|z| (z.point, C64::default())).collect();
    let dist = opcore::pair_set_distance(&proj, &roots);
    Ok(Entry::new(NAME, ANCHOR, Status::from_bool(dist < opcore::MATCH_CAP), opcore::MATCH_CAP - dist)
        .with_witnesses(serde_json::json!({
            "projection": proj.iter().map(|p| json::c64_to_pair(p.0)).collect::<Vec<_>>(),
            "m1_roots": roots.iter().map(|p| json::c64_to_pair(p.0)).collect::<Vec<_>>(),
        })))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupportBounds {
    #[serde(serialize_with = "ser_pairs")]
    pub inner_set: Vec<(C64, C64)>,
    #[serde(serialize_with = "ser_pairs")]
    pub lower_boundary: Vec<(C64, C64)>,
    /// Largest `|p|/‖p‖₁` of the variety polynomial over both sets.
    pub variety_residual: f64,
    pub set_distance: f64,
}

fn ser_pairs<S: serde::Serializer>(v: &[(C64, C64)], s: S) -> std::result::Result<S::Ok, S::Error> {
    pairs_json(v).serialize(s)
}

impl SupportBounds {
    pub fn collapsed(&self) -> bool {
        self.set_distance < opcore::MATCH_CAP
    }

    pub fn entry(&self) -> Entry {
        let ok_sets = self.collapsed();
        let ok_var = self.variety_residual < TOL_ANN;
        Entry::new(
            "support_sandwich",
            "sigma(S1,S2) in supp(Ann) in closure of V_Psi, with supp(Ann) on D^2 equal to Z(Ann)",
            Status::from_bool(ok_sets && ok_var),
            (opcore::MATCH_CAP - self.set_distance).min(TOL_ANN - self.variety_residual),
        )
        .with_witnesses(serde_json::to_value(self).expect("serializes"))
    }
}

pub fn support_bounds(
    pair: &CommutingPair,
    bundle: &CoextensionBundle,
    variety: &VarietyDescription,
    basis: &AnnihilatorBasis,
    seed: u64,
) -> Result<SupportBounds> {
    let inner_set = z_ann(basis, pair, seed)?;
    let s_pair = bundle.compressed_pair()?;
    let lower_boundary = opcore::joint_spectrum_taylor(&s_pair, seed)?.distinct_points()?;
    let scale = variety.p.l1_norm().max(f64::MIN_POSITIVE);
    let variety_residual = inner_set
        .iter()
        .chain(&lower_boundary)
        .map(|&(l, m)| variety.p.eval(l, m).norm() / scale)
        .fold(0.0, f64::max);
    let set_distance = opcore::pair_set_distance(&inner_set, &lower_boundary);
    Ok(SupportBounds { inner_set, lower_boundary, variety_residual, set_distance })
}

/// Compares box annihilator kernels of `(T₁,T₂)` and `(S₁,S₂)` over the
/// box of `(T₁,T₂)`.
pub fn check_ann_invariance(bundle: &CoextensionBundle, basis: &AnnihilatorBasis) -> Entry {
    let (bz, bw) = basis.box_dims;
    let (ks, dec) = box_kernel(&bundle.s1, &bundle.s2, bz, bw);
    let kt = &basis.box_kernel;
    let gap = |a: &CMat, b: &CMat| -> f64 {
        if a.ncols() == 0 {
            return 0.0;
        }
        let proj = b * b.adjoint();
        linalg::op_norm(&(a - proj * a))
    };
    let g = gap(kt, &ks).max(gap(&ks, kt));
    let dims_equal = kt.ncols() == ks.ncols();
    let status = if !(dec.conclusive && basis.conclusive) {
        Status::Inconclusive
    } else {
        Status::from_bool(dims_equal && g <= TOL_SUBSPACE)
    };
    let s_residual = basis.max_residual(&bundle.s1, &bundle.s2);
    Entry::new("ann_invariance", "Ann(S1,S2) = Ann(T1,T2)", status, TOL_SUBSPACE - g).with_witnesses(
        serde_json::json!({
            "dim_pair": kt.ncols(),
            "dim_compressed": ks.ncols(),
            "subspace_gap": g,
            "generators_on_compressed": s_residual,
        }),
    )
}

/// Four conditions of the spectral-synthesis equivalence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SynthesisConditions {
    pub eigenvectors_span: bool,
    pub ann_equals_vanishing_ideal: bool,
    pub ann_radical: bool,
    pub m1_simple_roots: bool,
}

impl SynthesisConditions {
    pub fn unanimous(&self) -> bool {
        let v = [self.eigenvectors_span, self.ann_equals_vanishing_ideal, self.ann_radical, self.m1_simple_roots];
        v.iter().all(|&x| x == v[0])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SynthesisReport {
    pub conditions: SynthesisConditions,
    pub conclusive: bool,
    pub entries: Vec<Entry>,
}

pub fn synthesis_report(bundle: &CoextensionBundle, basis: &AnnihilatorBasis) -> Result<SynthesisReport> {
    if basis.m1.degree() == 0 {
        return Err(Error::AnnTrivial);
    }
    let omega = omega_psi(bundle);
    let omega_pts: Vec<PairCluster> = omega.spectrum.clustered();
    opcore::check_separation(&omega_pts)?;

    // (i) common eigenvectors of (S₁*, S₂*) span K_Ψ.
    let kdim = bundle.kpsi_dim();
    let total: usize = omega.spectrum.witnesses.iter().map(|w| w.ncols()).sum();
    let mut stacked = linalg::zeros(kdim, total);
    let mut col = 0;
    for w in &omega.spectrum.witnesses {
        stacked.view_mut((0, col), (kdim, w.ncols())).copy_from(w);
        col += w.ncols();
    }
    let (_, span_dec) = linalg::range_basis(&stacked, 1e-8);
    let span_dim = span_dec.rank;
    let c1 = span_dim == kdim;

    // (ii) box-level Ann = I(Ω_Ψ): polynomials in the box vanishing at Ω_Ψ.
    let (bz, bw) = basis.box_dims;
    let pts: Vec<(C64, C64)> = omega_pts.iter().map(|c| c.center).collect();
    let mut eval = linalg::zeros(pts.len().max(1), bz * bw);
    for (r, &(l, m)) in pts.iter().enumerate() {
        for i in 0..bz {
            for j in 0..bw {
                eval[(r, i * bw + j)] = l.powu(i as u32) * m.powu(j as u32);
            }
        }
    }
    let (iomega, iom_dec) = linalg::null_space(&eval, TOL_BOX);
    let contained = if basis.box_kernel.ncols() == 0 { 0.0 } else { linalg::op_norm(&(&eval * &basis.box_kernel)) };
    let c2 = iomega.ncols() == basis.box_kernel.ncols() && contained < TOL_SUBSPACE;

    // (iii), (iv): both reduce to simple roots of m₁.
    let simple = basis.m1.has_simple_roots(ROOT_SEPARATION);
    let conditions = SynthesisConditions {
        eigenvectors_span: c1,
        ann_equals_vanishing_ideal: c2,
        ann_radical: simple,
        m1_simple_roots: simple,
    };
    let conclusive = span_dec.conclusive && iom_dec.conclusive && basis.conclusive && bundle.kpsi_conclusive;
    let evaluated = if conclusive { Status::Pass } else { Status::Inconclusive };
    let entries = vec![
        Entry::new(
            "synthesis_i_eigenvectors_span",
            "joint eigenvectors of (S1*, S2*) span a dense subspace of K_Psi",
            evaluated,
            span_dim as f64 - kdim as f64,
        )
        .with_witnesses(serde_json::json!({ "holds": c1, "span_dim": span_dim, "kpsi_dim": kdim })),
        Entry::new(
            "synthesis_ii_ann_equals_vanishing_ideal",
            "Ann(T1,T2) = I(Omega_Psi) (box-level equality)",
            evaluated,
            iomega.ncols() as f64 - basis.box_kernel.ncols() as f64,
        )
        .with_witnesses(serde_json::json!({
            "holds": c2,
            "box": [bz, bw],
            "dim_ann_box": basis.box_kernel.ncols(),
            "dim_vanishing_box": iomega.ncols(),
            "containment_residual": contained,
        })),
        Entry::new("synthesis_iii_radical", "Ann(T1,T2) is a radical ideal", evaluated, 0.0)
            .with_witnesses(serde_json::json!({ "holds": simple })),
        Entry::new("synthesis_iv_simple_roots", "m1 is a Blaschke product with simple roots", evaluated, 0.0)
            .with_witnesses(serde_json::json!({ "holds": simple })),
        Entry::new(
            "synthesis_equivalence",
            "conditions (i)-(iv) of spectral synthesis agree",
            if !conclusive { Status::Inconclusive } else { Status::from_bool(conditions.unanimous()) },
            0.0,
        )
        .with_witnesses(serde_json::to_value(conditions).expect("serializes")),
    ];
    Ok(SynthesisReport { conditions, conclusive, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dilation::{compress_pair, constrained_coextension, construct_psi};
    use crate::inner::identity_symbol;
    use crate::linalg::{cr, from_real_rows};
    use crate::opcore::{validate_pair, PairFlags};

    fn j2() -> CMat {
        from_real_rows(2, 2, &[0.0, 0.0, 1.0, 0.0])
    }

    fn instance(pair: CommutingPair) -> (CommutingPair, AnnihilatorBasis, CoextensionBundle) {
        let basis = ann_generators(&pair).unwrap();
        let psi = construct_psi(&pair).unwrap();
        let bundle = constrained_coextension(&pair, &psi, &basis.generators).unwrap();
        (pair, basis, bundle)
    }

    fn contains(basis: &AnnihilatorBasis, p: &Poly2) -> bool {
        let (bz, bw) = basis.box_dims;
        let v = CMat::from_fn(bz * bw, 1, |k, _| p.coeff(k / bw, k % bw));
        let k = &basis.box_kernel;
        (&v - k * (k.adjoint() * &v)).norm() < 1e-10 * v.norm()
    }

    #[test]
    fn ann_of_nilpotent_pair() {
        let pair = validate_pair(&j2(), &j2(), PairFlags::strict_pure()).unwrap();
        let b = ann_generators(&pair).unwrap();
        assert_eq!(b.box_dims, (2, 2));
        assert_eq!(b.box_generators, 2);
        assert!(contains(&b, &Poly2::from_terms(&[(1, 0, cr(1.0)), (0, 1, cr(-1.0))])));
        assert!(contains(&b, &Poly2::monomial(1, 1, cr(1.0))));
        assert!(b.max_residual(&pair.t1, &pair.t2) < 1e-14);
    }

    #[test]
    fn ann_of_diagonal_pair() {
        let t1 = linalg::diag(&[cr(0.1), cr(0.2)]);
        let t2 = linalg::diag(&[cr(0.3), cr(0.4)]);
        let pair = validate_pair(&t1, &t2, PairFlags::strict_pure()).unwrap();
        let b = ann_generators(&pair).unwrap();
        let sep = Poly2::from_z(&crate::poly::Poly1::from_real(&[-0.1, 1.0]))
            .mul(&Poly2::from_w(&crate::poly::Poly1::from_real(&[-0.4, 1.0])));
        assert!(contains(&b, &sep));
        let z = z_ann(&b, &pair, 0).unwrap();
        assert!(opcore::pair_set_distance(&z, &[(cr(0.1), cr(0.3)), (cr(0.2), cr(0.4))]) < 1e-12);
    }

    #[test]
    fn zero_second_matrix_gives_w() {
        let pair = validate_pair(&j2(), &linalg::zeros(2, 2), PairFlags::strict_pure()).unwrap();
        let b = ann_generators(&pair).unwrap();
        assert!(b.generators.iter().any(|g| g.unit_distance(&Poly2::monomial(0, 1, cr(1.0))) < 1e-12));
    }

    #[test]
    fn nilpotent_instance_checks() {
        let (pair, basis, bundle) =
            instance(validate_pair(&j2(), &j2(), PairFlags::strict_pure()).unwrap());
        assert_eq!(z_ann(&basis, &pair, 0).unwrap().len(), 1);
        let om = omega_psi(&bundle);
        assert_eq!(om.points().len(), 1);
        assert!(om.points()[0].0.norm() < 1e-12);
        assert_eq!(check_zann_equals_omega(&pair, &bundle, &basis, 0).unwrap().status, Status::Pass);
        assert_eq!(check_projection(&bundle).unwrap().status, Status::Pass);
        let var = bundle.psi.variety_polynomial().unwrap();
        let sb = support_bounds(&pair, &bundle, &var, &basis, 0).unwrap();
        assert_eq!(sb.entry().status, Status::Pass, "{:?}", sb);
        let ai = check_ann_invariance(&bundle, &basis);
        assert_eq!(ai.status, Status::Pass, "{:?}", ai);
        let syn = synthesis_report(&bundle, &basis).unwrap();
        assert!(syn.conclusive);
        assert_eq!(
            syn.conditions,
            SynthesisConditions {
                eigenvectors_span: false,
                ann_equals_vanishing_ideal: false,
                ann_radical: false,
                m1_simple_roots: false
            }
        );
    }

    #[test]
    fn simple_root_instance_is_all_true() {
        let theta = BlaschkeProduct::from_points(&[cr(0.0), cr(0.5)]).unwrap();
        let pair = compress_pair(&identity_symbol(), &theta).unwrap();
        let (pair, basis, bundle) = instance(pair);
        let om = omega_psi(&bundle).distinct_points().unwrap();
        assert!(opcore::pair_set_distance(&om, &[(cr(0.0), cr(0.0)), (cr(0.5), cr(0.5))]) < 1e-10);
        assert_eq!(check_zann_equals_omega(&pair, &bundle, &basis, 0).unwrap().status, Status::Pass);
        let syn = synthesis_report(&bundle, &basis).unwrap();
        assert!(syn.conditions.unanimous() && syn.conditions.m1_simple_roots, "{:?}", syn.conditions);
    }

    #[test]
    fn dropped_omega_point_fails_projection() {
        let theta = BlaschkeProduct::from_points(&[cr(0.0), cr(0.5)]).unwrap();
        let (_, _, mut bundle) = instance(compress_pair(&identity_symbol(), &theta).unwrap());
        // Keep only the eigenvector direction at 0 by compressing further.
        let w = omega_psi(&bundle).spectrum.witnesses[0].clone();
        let q = linalg::range_basis(&w, 1e-12).0;
        bundle.s1 = q.adjoint() * &bundle.s1 * &q;
        bundle.s2 = q.adjoint() * &bundle.s2 * &q;
        bundle.kpsi_basis = bundle.kpsi_basis.clone() * &q;
        assert_eq!(check_projection(&bundle).unwrap().status, Status::Fail);
    }
}
