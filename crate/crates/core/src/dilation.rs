//! Isometric co-extensions of pure commuting pairs.
//!
//! `J` embeds `C^n` into truncated vector-valued Hardy space coefficients
//! `C^{(N+1)d}`, `Ψ` is built from a unitary colligation on defect spaces,
//! and all model-space computations happen in finite spans of normalized
//! derivative kernels `g_j = ∂̄^j k_λ / j! = z^j / (1 − λ̄z)^{j+1}`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::inner::{Colligation, MatrixInnerFunction};
use crate::json;
use crate::linalg::{self, cr, CMat, C64};
use crate::opcore::{self, CommutingPair, PairFlags, PairCluster};
use crate::poly::{BlaschkeProduct, BlaschkeZero, Poly2};
use crate::report::{Entry, Status};

pub const TOL_TRUNC: f64 = 1e-10;
pub const TOL_INTERTWINE: f64 = 1e-7;
/// Relative singular-value threshold for the kernel intersection.
pub const TOL_KERNEL: f64 = 1e-8;
pub const TOL_ANN: f64 = 1e-8;
const MAX_TRUNC: usize = 20_000;

/// `(J, N)` with row blocks `D_c T₁*^m`, `m = 0..=N`, where `D_c` is
/// `(I − T₁T₁*)^{1/2}` in coordinates of its range.
pub fn embed_j(pair: &CommutingPair, tol_trunc: f64) -> Result<(CMat, usize)> {
    let rho = linalg::spectral_radius(&pair.t1);
    if rho >= 1.0 {
        return Err(Error::NotPure { radius: rho });
    }
    let dc = defect_coordinates(&pair.t1)?;
    let d = dc.nrows();
    let n = pair.dim();
    let t1s = pair.t1.adjoint();
    let mut blocks = vec![dc.clone()];
    let mut pow = pair.t1.clone();
    // ‖J*J − I‖ = ‖T₁^{N+1}‖² and the shift intertwining residual is at most
    // ‖T₁^{N+1}‖, so the norm of the next power decides the truncation.
    while linalg::op_norm(&pow) > tol_trunc {
        if blocks.len() > MAX_TRUNC {
            return Err(Error::TruncationNotConverged { max_terms: MAX_TRUNC });
        }
        let next = blocks.last().expect("nonempty") * &t1s;
        blocks.push(next);
        pow = &pow * &pair.t1;
    }
    let mut j = linalg::zeros(blocks.len() * d, n);
    for (m, b) in blocks.iter().enumerate() {
        j.view_mut((m * d, 0), (d, n)).copy_from(b);
    }
    Ok((j, blocks.len() - 1))
}

/// `V*(I − TT*)^{1/2}` where `V` is an orthonormal basis of the defect range.
pub fn defect_coordinates(t: &CMat) -> Result<CMat> {
    let df = opcore::defect(t)?;
    Ok(df.basis.adjoint() * &df.sqrt)
}

/// Backward shift `M_z*` on `C^{(N+1)d}` coefficient blocks.
pub fn truncated_shift_adjoint(n_trunc: usize, d: usize) -> CMat {
    let size = (n_trunc + 1) * d;
    let mut s = linalg::zeros(size, size);
    for m in 0..n_trunc {
        for k in 0..d {
            s[(m * d + k, (m + 1) * d + k)] = cr(1.0);
        }
    }
    s
}

/// `M_Ψ*` compressed to coefficient blocks `0..=N`: block `(m, m+k)` is `Ψ_k*`.
pub fn truncated_toeplitz_adjoint(psi: &MatrixInnerFunction, n_trunc: usize) -> Result<CMat> {
    let d = psi.dim();
    let coeffs = psi.coefficients(n_trunc + 1)?;
    let size = (n_trunc + 1) * d;
    let mut out = linalg::zeros(size, size);
    for m in 0..=n_trunc {
        for (k, ck) in coeffs.iter().enumerate().take(n_trunc + 1 - m) {
            out.view_mut((m * d, (m + k) * d), (d, d)).copy_from(&ck.adjoint());
        }
    }
    Ok(out)
}

/// Ψ from the unitary colligation of the isometry
/// `D₁h ⊕ D₂T₁*h ↦ D₁T₂*h ⊕ D₂h` on defect spaces, with `D_i` the defect
/// coordinates of `T_i`. Writing the unitary extension as `[[a, b], [c, e]]`
/// gives `Ψ(z) = a* + z c*(I − z e*)⁻¹ b*`, and the unobservable part of the
/// state space (where `e*` is unitary) is discarded.
pub fn construct_psi(pair: &CommutingPair) -> Result<MatrixInnerFunction> {
    pair.require_pure()?;
    let d1m = defect_coordinates(&pair.t1)?;
    let d2m = defect_coordinates(&pair.t2)?;
    let d = d1m.nrows();
    let d2 = d2m.nrows();
    let n = pair.dim();
    let stack = |top: CMat, bottom: CMat| {
        let mut m = linalg::zeros(d + d2, n);
        m.view_mut((0, 0), (d, n)).copy_from(&top);
        m.view_mut((d, 0), (d2, n)).copy_from(&bottom);
        m
    };
    let left = stack(d1m.clone(), &d2m * pair.t1.adjoint());
    let right = stack(&d1m * pair.t2.adjoint(), d2m.clone());
    let w = unitary_extension(&left, &right)?;
    let a = w.view((0, 0), (d, d)).into_owned();
    let b = w.view((0, d), (d, d2)).into_owned();
    let c = w.view((d, 0), (d2, d)).into_owned();
    let e = w.view((d, d), (d2, d2)).into_owned();
    let col = Colligation { a: e.adjoint(), b: b.adjoint(), c: c.adjoint(), d: a.adjoint() };
    let col = observable_part(&col);
    MatrixInnerFunction::from_colligation(col.a, col.b, col.c, col.d)
        .map_err(|err| Error::NoInnerSolution(format!("colligation certification failed: {err}")))
}

/// A unitary `W` with `W·L = R`, given `L*L = R*R`. Defined on `ran L` by
/// the polar data of `L` and extended by the canonical complements.
fn unitary_extension(left: &CMat, right: &CMat) -> Result<CMat> {
    let size = left.nrows();
    let gram_gap = linalg::op_norm(&(left.adjoint() * left - right.adjoint() * right));
    if gram_gap > 1e-8 {
        return Err(Error::NoInnerSolution(format!("defect map is not isometric (gap {gram_gap:.3e})")));
    }
    let f = linalg::svd(left);
    let smax = f.s.first().copied().unwrap_or(0.0);
    let mut src_cols = Vec::new();
    let mut dst_cols = Vec::new();
    for (k, &s) in f.s.iter().enumerate() {
        if s > 1e-10 * smax.max(1.0) {
            src_cols.push(f.u.column(k).into_owned());
            dst_cols.push(right * f.v.column(k) / cr(s));
        }
    }
    let r = src_cols.len();
    let mut src = linalg::zeros(size, r);
    let mut dst = linalg::zeros(size, r);
    for k in 0..r {
        src.set_column(k, &src_cols[k]);
        dst.set_column(k, &dst_cols[k]);
    }
    // Re-orthonormalize the image columns (they are orthonormal up to roundoff).
    let dst = orthonormalize_keep_span(&dst);
    let src_c = linalg::complement_basis(&src);
    let dst_c = linalg::complement_basis(&dst);
    if src_c.ncols() != dst_c.ncols() {
        return Err(Error::NoInnerSolution("defect complements differ in dimension".into()));
    }
    let mut full_src = linalg::zeros(size, size);
    let mut full_dst = linalg::zeros(size, size);
    full_src.view_mut((0, 0), (size, r)).copy_from(&src);
    full_src.view_mut((0, r), (size, size - r)).copy_from(&src_c);
    full_dst.view_mut((0, 0), (size, r)).copy_from(&dst);
    full_dst.view_mut((0, r), (size, size - r)).copy_from(&dst_c);
    Ok(full_dst * full_src.adjoint())
}

/// Polar factor `X (X*X)^{-1/2}`: the closest matrix with orthonormal columns.
fn orthonormalize_keep_span(x: &CMat) -> CMat {
    if x.ncols() == 0 {
        return x.clone();
    }
    let f = linalg::svd(x);
    f.u * f.v.adjoint()
}

/// Compression of a unitary colligation to the orthogonal complement of its
/// unobservable subspace `∩_k ker C A^k`.
fn observable_part(col: &Colligation) -> Colligation {
    let n = col.state_dim();
    let d = col.io_dim();
    if n == 0 {
        return col.clone();
    }
    let mut obs = linalg::zeros(n * d, n);
    let mut ca = col.c.clone();
    for k in 0..n {
        obs.view_mut((k * d, 0), (d, n)).copy_from(&ca);
        ca = &ca * &col.a;
    }
    let (basis, _) = linalg::range_basis(&obs.adjoint(), 1e-9);
    let smax = linalg::op_norm(&obs);
    let basis = if smax == 0.0 { linalg::zeros(n, 0) } else { basis };
    Colligation {
        a: basis.adjoint() * &col.a * &basis,
        b: basis.adjoint() * &col.b,
        c: &col.c * &basis,
        d: col.d.clone(),
    }
}

/// Residual of `T₂D_c* = Σ_k T₁^k D_c* Ψ_k` summed until `T₁^k` is negligible.
pub fn coefficient_identity_residual(pair: &CommutingPair, psi: &MatrixInnerFunction) -> Result<f64> {
    let dc = defect_coordinates(&pair.t1)?;
    let (_, n_trunc) = embed_j(pair, 1e-14)?;
    let coeffs = psi.coefficients(n_trunc + 1)?;
    let mut rhs = linalg::zeros(pair.dim(), dc.nrows());
    let mut pow = linalg::identity(pair.dim());
    for ck in &coeffs {
        rhs += &pow * dc.adjoint() * ck;
        pow = &pow * &pair.t1;
    }
    Ok(linalg::op_norm(&(&pair.t2 * dc.adjoint() - rhs)))
}

/// Normalized derivative-kernel basis `g_j^{(λ)} ⊗ e_k` of `K_b ⊗ C^d`,
/// ordered by point, then jet order `j`, then component `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct JetKernelBasis {
    pub points: Vec<BlaschkeZero>,
    pub d: usize,
    pub gram: CMat,
    chol: CMat,
    offsets: Vec<usize>,
}

fn binom(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut r = 1.0;
    for i in 0..k {
        r = r * (n - i) as f64 / (i + 1) as f64;
    }
    r
}

/// `⟨g_b^{(μ)}, g_a^{(λ)}⟩` with `x = μ̄`, `y = λ`.
fn kernel_gram_entry(a: usize, b: usize, x: C64, y: C64) -> C64 {
    let base = cr(1.0) - x * y;
    let mut s = C64::default();
    for t in 0..=a.min(b) {
        let coef = binom(a, t) * binom(a + b - t, b - t);
        s += x.powu((a - t) as u32) * y.powu((b - t) as u32) * coef / base.powu((a + b + 1 - t) as u32);
    }
    s
}

impl JetKernelBasis {
    pub fn new(zeros: &[BlaschkeZero], d: usize) -> Result<Self> {
        let clusters: Vec<PairCluster> =
            zeros.iter().map(|z| PairCluster { center: (z.point, cr(0.0)), count: z.multiplicity }).collect();
        opcore::check_separation(&clusters)?;
        let mut offsets = Vec::with_capacity(zeros.len());
        let mut dim = 0;
        for z in zeros {
            offsets.push(dim);
            dim += z.multiplicity * d;
        }
        let mut gram = linalg::zeros(dim, dim);
        for (p, zp) in zeros.iter().enumerate() {
            for (q, zq) in zeros.iter().enumerate() {
                for a in 0..zp.multiplicity {
                    for b in 0..zq.multiplicity {
                        let g = kernel_gram_entry(a, b, zq.point.conj(), zp.point);
                        for k in 0..d {
                            gram[(offsets[p] + a * d + k, offsets[q] + b * d + k)] = g;
                        }
                    }
                }
            }
        }
        let chol = linalg::cholesky_lower(&gram).ok_or(Error::DegenerateCluster { separation: 0.0 })?;
        Ok(JetKernelBasis { points: zeros.to_vec(), d, gram, chol, offsets })
    }

    pub fn from_blaschke(b: &BlaschkeProduct, d: usize) -> Result<Self> {
        Self::new(b.zeros(), d)
    }

    pub fn dim(&self) -> usize {
        self.gram.nrows()
    }

    fn index(&self, p: usize, j: usize, k: usize) -> usize {
        self.offsets[p] + j * self.d + k
    }

    /// Matrix (in kernel coordinates) of `M_F*`, given Taylor coefficients
    /// `taylor[p][t] = F^{(t)}(λ_p)/t!` for `t` below the multiplicity:
    /// `M_F*(g_j ⊗ ξ) = Σ_{i≤j} g_i ⊗ F_{j−i}*ξ`.
    pub fn adjoint_action(&self, taylor: &[Vec<CMat>]) -> CMat {
        let n = self.dim();
        let d = self.d;
        let mut out = linalg::zeros(n, n);
        for (p, z) in self.points.iter().enumerate() {
            for j in 0..z.multiplicity {
                for i in 0..=j {
                    let f = &taylor[p][j - i];
                    for k in 0..d {
                        for l in 0..d {
                            out[(self.index(p, i, l), self.index(p, j, k))] = f[(k, l)].conj();
                        }
                    }
                }
            }
        }
        out
    }

    /// Coordinates change to the orthonormalized basis (Gram–Schmidt order).
    pub fn ortho_coords(&self, c: &CMat) -> CMat {
        self.chol.adjoint() * c
    }

    /// Operator matrix in orthonormal coordinates: `L^H A L^{−H}`.
    pub fn to_ortho(&self, a: &CMat) -> CMat {
        let lh = self.chol.adjoint();
        let inv = lh.clone().solve_upper_triangular(&linalg::identity(self.dim())).expect("Cholesky factor is invertible");
        lh * a * inv
    }

    /// Taylor coefficients at the origin of the orthonormalized basis
    /// vectors, rows indexed by `m·d + k` for `m < count`.
    pub fn monomial_coefficients(&self, count: usize) -> CMat {
        let d = self.d;
        let mut v = linalg::zeros(count * d, self.dim());
        for (p, z) in self.points.iter().enumerate() {
            let lb = z.point.conj();
            for j in 0..z.multiplicity {
                // g_j(z) = Σ_{m≥j} C(m, j) λ̄^{m−j} z^m.
                for m in j..count {
                    let coef = lb.powu((m - j) as u32) * binom(m, j);
                    for k in 0..d {
                        v[(m * d + k, self.index(p, j, k))] = coef;
                    }
                }
            }
        }
        let lh = self.chol.adjoint();
        let inv = lh.solve_upper_triangular(&linalg::identity(self.dim())).expect("Cholesky factor is invertible");
        v * inv
    }
}

fn series_mul(a: &[CMat], b: &[CMat], len: usize) -> Vec<CMat> {
    let d = a[0].nrows();
    (0..len)
        .map(|t| {
            let mut acc = linalg::zeros(d, d);
            for i in 0..=t {
                acc += &a[i] * &b[t - i];
            }
            acc
        })
        .collect()
}

/// Taylor coefficients at `λ` of `f(zI, Ψ(z))`, up to `len` terms.
pub fn composed_taylor(f: &Poly2, psi_taylor: &[CMat], lambda: C64, len: usize) -> Vec<CMat> {
    let d = psi_taylor[0].nrows();
    let (dz, dw) = f.bidegree();
    let mut zs = vec![linalg::zeros(d, d); len];
    zs[0] = linalg::identity(d) * lambda;
    if len > 1 {
        zs[1] = linalg::identity(d);
    }
    let mut psi_pows = vec![{
        let mut one = vec![linalg::zeros(d, d); len];
        one[0] = linalg::identity(d);
        one
    }];
    for j in 1..=dw {
        let next = series_mul(&psi_pows[j - 1], psi_taylor, len);
        psi_pows.push(next);
    }
    let row = |i: usize| -> Vec<CMat> {
        let mut acc = vec![linalg::zeros(d, d); len];
        for (j, pw) in psi_pows.iter().enumerate() {
            let c = f.coeff(i, j);
            if c != C64::default() {
                for t in 0..len {
                    acc[t] += &pw[t] * c;
                }
            }
        }
        acc
    };
    let mut acc = row(dz);
    for i in (0..dz).rev() {
        let r = row(i);
        acc = series_mul(&zs, &acc, len).into_iter().zip(r).map(|(x, y)| x + y).collect();
    }
    acc
}

fn psi_taylor_at_points(psi: &MatrixInnerFunction, basis: &JetKernelBasis) -> Result<Vec<Vec<CMat>>> {
    basis.points.iter().map(|z| psi.taylor_at(z.point, z.multiplicity.saturating_sub(1))).collect()
}

fn shift_taylor(basis: &JetKernelBasis) -> Vec<Vec<CMat>> {
    let d = basis.d;
    basis
        .points
        .iter()
        .map(|z| {
            let mut v = vec![linalg::identity(d) * z.point];
            if z.multiplicity > 1 {
                v.push(linalg::identity(d));
            }
            v.resize(z.multiplicity, linalg::zeros(d, d));
            v
        })
        .collect()
}

/// Compressions of `M_z ⊗ I` and `M_Ψ` to `K_θ ⊗ C^d`, in an orthonormal
/// basis of derivative kernels.
pub fn compress_pair(psi: &MatrixInnerFunction, theta: &BlaschkeProduct) -> Result<CommutingPair> {
    if theta.degree() == 0 {
        return Err(Error::InvalidInput("theta must be nonconstant".into()));
    }
    let basis = JetKernelBasis::from_blaschke(theta, psi.dim())?;
    let a1 = basis.adjoint_action(&shift_taylor(&basis));
    let a2 = basis.adjoint_action(&psi_taylor_at_points(psi, &basis)?);
    let t1 = basis.to_ortho(&a1).adjoint();
    let t2 = basis.to_ortho(&a2).adjoint();
    opcore::validate_pair(&t1, &t2, PairFlags::strict_pure())
}

/// Minimal isometric co-extension data constrained to `K_Ψ`.
#[derive(Debug, Clone, Serialize)]
pub struct CoextensionBundle {
    pub pair: CommutingPair,
    #[serde(rename = "J", with = "json::matrix")]
    pub j: CMat,
    pub n_trunc: usize,
    pub psi: MatrixInnerFunction,
    /// Minimal Blaschke product of `T₁`.
    pub m1: BlaschkeProduct,
    /// Orthonormal columns spanning `K_Ψ` inside orthonormal coordinates of
    /// `K_{m₁} ⊗ C^d`.
    #[serde(with = "json::matrix")]
    pub kpsi_basis: CMat,
    #[serde(with = "json::matrix")]
    pub s1: CMat,
    #[serde(with = "json::matrix")]
    pub s2: CMat,
    /// False when a singular value of the kernel computation sat within the
    /// guard band of the threshold.
    pub kpsi_conclusive: bool,
    pub residuals: BTreeMap<String, f64>,
    #[serde(skip)]
    pub jet_basis: Option<JetKernelBasis>,
}

impl CoextensionBundle {
    pub fn kpsi_dim(&self) -> usize {
        self.kpsi_basis.ncols()
    }

    pub fn compressed_pair(&self) -> Result<CommutingPair> {
        opcore::validate_pair(&self.s1, &self.s2, PairFlags { strict: true, require_pure: false })
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("bundle serializes")
    }
}

/// Builds `J`, `K_Ψ = ∩_f ker M_{f∘Δ_Ψ}*` inside `K_{m₁} ⊗ C^d` and the
/// compressions `S₁, S₂` of `M_z ⊗ I` and `M_Ψ` to it.
pub fn constrained_coextension(
    pair: &CommutingPair,
    psi: &MatrixInnerFunction,
    ann_gens: &[Poly2],
) -> Result<CoextensionBundle> {
    pair.require_pure()?;
    let m1 = opcore::minimal_blaschke(&pair.t1)?;
    if m1.degree() == 0 {
        return Err(Error::AnnTrivial);
    }
    let d = psi.dim();
    let basis = JetKernelBasis::from_blaschke(&m1, d)?;
    let psi_t = psi_taylor_at_points(psi, &basis)?;
    let n = basis.dim();

    let mut blocks: Vec<CMat> = Vec::new();
    for f in ann_gens {
        let taylor: Vec<Vec<CMat>> = basis
            .points
            .iter()
            .zip(&psi_t)
            .map(|(z, pt)| composed_taylor(f, pt, z.point, z.multiplicity))
            .collect();
        let a = basis.to_ortho(&basis.adjoint_action(&taylor));
        // Scale by the size of f itself: a generator that vanishes on Δ_Ψ up
        // to roundoff must stay negligible.
        let scale = f.l1_norm();
        if scale > 0.0 {
            blocks.push(a / cr(scale));
        }
    }
    let mut stacked = linalg::zeros(blocks.len() * n, n);
    for (k, b) in blocks.iter().enumerate() {
        stacked.view_mut((k * n, 0), (n, n)).copy_from(b);
    }
    // Blocks are normalized by the size of each generator, so the threshold
    // is relative to max(largest singular value, 1).
    let smax = linalg::op_norm(&stacked);
    let (kpsi, decision) = if smax <= TOL_KERNEL {
        (linalg::identity(n), linalg::RankDecision { rank: 0, threshold: TOL_KERNEL, conclusive: smax * linalg::RANK_GUARD <= TOL_KERNEL })
    } else {
        linalg::null_space(&stacked, TOL_KERNEL / smax.min(1.0))
    };

    let z_star = basis.to_ortho(&basis.adjoint_action(&shift_taylor(&basis)));
    let psi_star = basis.to_ortho(&basis.adjoint_action(&psi_t));
    let s1 = (kpsi.adjoint() * &z_star * &kpsi).adjoint();
    let s2 = (kpsi.adjoint() * &psi_star * &kpsi).adjoint();

    let (j, n_trunc) = embed_j(pair, TOL_TRUNC)?;
    let mut residuals = BTreeMap::new();
    residuals.insert("isometry".to_string(), linalg::op_norm(&(j.adjoint() * &j - linalg::identity(pair.dim()))));
    let shift = truncated_shift_adjoint(n_trunc, j.nrows() / (n_trunc + 1));
    residuals.insert(
        "intertwine_t1".to_string(),
        linalg::op_norm(&(&j * pair.t1.adjoint() - &shift * &j)),
    );
    if j.nrows() / (n_trunc + 1) == d {
        let mpsi = truncated_toeplitz_adjoint(psi, n_trunc)?;
        residuals.insert(
            "intertwine_t2".to_string(),
            linalg::op_norm(&(&j * pair.t2.adjoint() - &mpsi * &j)),
        );
        // J H ⊂ K_Ψ, measured in monomial coordinates.
        let mono = basis.monomial_coefficients(n_trunc + 1) * &kpsi;
        let q = linalg::range_basis(&mono, 1e-12).0;
        let outside = &j - &q * (q.adjoint() * &j);
        residuals.insert("range_in_kpsi".to_string(), linalg::op_norm(&outside));
    } else {
        residuals.insert("intertwine_t2".to_string(), f64::INFINITY);
    }
    residuals.insert("s_commutator".to_string(), linalg::op_norm(&linalg::commutator(&s1, &s2)));
    residuals.insert("s1_spectral_radius".to_string(), linalg::spectral_radius(&s1));
    residuals.insert("s2_spectral_radius".to_string(), linalg::spectral_radius(&s2));

    Ok(CoextensionBundle {
        pair: pair.clone(),
        j,
        n_trunc,
        psi: psi.clone(),
        m1,
        kpsi_basis: kpsi,
        s1,
        s2,
        kpsi_conclusive: decision.conclusive,
        residuals,
        jet_basis: Some(basis),
    })
}

/// `‖p(T₁,T₂) − J*·p(M_z, M_Ψ)·J‖` on the truncation, via the adjoint
/// identity `J p(T)* = p(M)* J`.
pub fn calculus_residual(bundle: &CoextensionBundle, p: &Poly2) -> Result<f64> {
    let d = bundle.psi.dim();
    let shift = truncated_shift_adjoint(bundle.n_trunc, d);
    let mpsi = truncated_toeplitz_adjoint(&bundle.psi, bundle.n_trunc)?;
    let conj = Poly2::new(p.coeffs().map(|c| c.conj()));
    // p(M)* = p̄(M_z*, M_Ψ*) because the adjoints commute.
    let lifted = opcore::poly_apply_mats(&conj, &shift, &mpsi) * &bundle.j;
    let direct = &bundle.j * opcore::poly_apply(p, &bundle.pair).adjoint();
    Ok(linalg::op_norm(&(lifted - direct)))
}

/// Does `m` have the same zeros and multiplicities as `reference`?
pub fn blaschke_zero_distance(m: &BlaschkeProduct, reference: &BlaschkeProduct) -> f64 {
    let mut a: Vec<C64> = m.points_with_multiplicity();
    let mut b: Vec<C64> = reference.points_with_multiplicity();
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    b.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    linalg::matching_distance(&a, &b)
}

/// Checks (a) `p(T₁,T₂) = 0` and `p(S₁,S₂) = 0` for the variety polynomial,
/// (b) joint eigenvalues of the pair lie on `V_Ψ`, (c) `m_{S₁} = m₁`, plus
/// the residual contracts of the bundle.
pub fn verify_coextension(bundle: &CoextensionBundle, p: &Poly2) -> Result<Vec<Entry>> {
    let scale = p.l1_norm().max(f64::MIN_POSITIVE);
    let on_t = linalg::op_norm(&opcore::poly_apply(p, &bundle.pair)) / scale;
    let on_s = linalg::op_norm(&opcore::poly_apply_mats(p, &bundle.s1, &bundle.s2)) / scale;
    let worst = on_t.max(on_s);
    let mut out = vec![Entry::new(
        "variety_annihilates_pair",
        "p(T1,T2) = 0 and p(S1,S2) = 0",
        Status::from_bool(worst < TOL_ANN),
        TOL_ANN - worst,
    )
    .with_witnesses(serde_json::json!({ "pair": on_t, "compressed": on_s }))];

    let pts = opcore::joint_point_spectrum(&bundle.pair);
    let dev = pts.points.iter().map(|&(l, m)| p.eval(l, m).norm() / scale).fold(0.0, f64::max);
    out.push(Entry::new(
        "point_spectrum_on_variety",
        "Z(Ann(T1,T2)) lies in V_Psi",
        Status::from_bool(dev < TOL_ANN),
        TOL_ANN - dev,
    ));

    let ms = opcore::minimal_blaschke_detailed(&bundle.s1)?;
    let dist = blaschke_zero_distance(&ms.blaschke, &bundle.m1);
    let status = if !ms.conclusive {
        Status::Inconclusive
    } else {
        Status::from_bool(dist < opcore::MATCH_CAP)
    };
    out.push(Entry::new("minimal_blaschke_s1", "Ann(S1) = Ann(T1)", status, opcore::MATCH_CAP - dist));

    let r = &bundle.residuals;
    let iso = r["isometry"];
    out.push(Entry::new("j_isometry", "J*J = I", Status::from_bool(iso <= TOL_TRUNC), TOL_TRUNC - iso));
    let tw = r["intertwine_t1"].max(r["intertwine_t2"]);
    out.push(Entry::new(
        "intertwining",
        "J T1* = (M_z* x I) J and J T2* = M_Psi* J",
        Status::from_bool(tw <= TOL_INTERTWINE),
        TOL_INTERTWINE - tw,
    ));
    let comm = r["s_commutator"];
    let rho = r["s1_spectral_radius"].max(r["s2_spectral_radius"]);
    out.push(Entry::new(
        "compressions_commute_and_pure",
        "S1, S2 commuting pure contractions",
        Status::from_bool(comm <= 1e-9 && rho < 1.0),
        (1e-9 - comm).min(1.0 - rho),
    ));
    Ok(out)
}
