//! Commuting contractive matrix pairs: validation, defect operators,
//! functional calculus, joint spectra and minimal Blaschke products.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::json;
use crate::linalg::{self, cr, CMat, CVec, C64};
use crate::poly::{BlaschkeProduct, BlaschkeZero, Poly1, Poly2};

pub const TOL_COMMUTE: f64 = 1e-9;
pub const TOL_NORM: f64 = 1e-9;
/// Relative rank threshold; multiplied by `max(‖T‖, 1)`.
pub const TOL_RANK: f64 = 1e-7;
pub const TOL_EIG: f64 = 1e-7;
pub const TOL_CALC: f64 = 1e-12;
/// Eigenvalues closer than this are treated as one (numerically split) point.
pub const CLUSTER_MERGE: f64 = 1e-3;
/// Distinct cluster centers closer than this make the instance degenerate.
pub const CLUSTER_SEPARATION: f64 = 1e-2;
/// Distance cap for matching joint eigenvalue sets.
pub const MATCH_CAP: f64 = 1e-6;
const TRIANGULARIZE_ATTEMPTS: usize = 5;
const MAX_CALC_TERMS: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PairFlags {
    /// Reject pairs that are non-commuting or non-contractive.
    pub strict: bool,
    /// Reject pairs with `ρ(T_i) ≥ 1`.
    pub require_pure: bool,
}

impl PairFlags {
    pub fn strict_pure() -> Self {
        PairFlags { strict: true, require_pure: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommutingPair {
    #[serde(with = "json::matrix")]
    pub t1: CMat,
    #[serde(with = "json::matrix")]
    pub t2: CMat,
    pub commutator_norm: f64,
    pub norms: (f64, f64),
    pub purity_margins: (f64, f64),
    pub defect_ranks: (usize, usize),
}

impl CommutingPair {
    pub fn dim(&self) -> usize {
        self.t1.nrows()
    }

    pub fn is_pure(&self) -> bool {
        self.purity_margins.0 > 0.0 && self.purity_margins.1 > 0.0
    }

    pub fn require_pure(&self) -> Result<()> {
        let (m1, m2) = self.purity_margins;
        if m1 <= 0.0 || m2 <= 0.0 {
            return Err(Error::NotPure { radius: 1.0 - m1.min(m2) });
        }
        Ok(())
    }
}

/// On-disk pair description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairFile {
    #[serde(with = "json::matrix")]
    pub t1: CMat,
    #[serde(with = "json::matrix")]
    pub t2: CMat,
    #[serde(default)]
    pub require_pure: bool,
}

impl PairFile {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn validate(&self) -> Result<CommutingPair> {
        validate_pair(&self.t1, &self.t2, PairFlags { strict: true, require_pure: self.require_pure })
    }
}

pub fn validate_pair(t1: &CMat, t2: &CMat, flags: PairFlags) -> Result<CommutingPair> {
    let n = t1.nrows();
    if t1.ncols() != n || t2.shape() != (n, n) {
        return Err(Error::DimensionMismatch(format!("pair shapes {:?} and {:?}", t1.shape(), t2.shape())));
    }
    if n == 0 {
        return Err(Error::InvalidInput("empty matrices".into()));
    }
    let norms = (linalg::op_norm(t1), linalg::op_norm(t2));
    let commutator_norm = linalg::op_norm(&linalg::commutator(t1, t2));
    if flags.strict {
        if commutator_norm > TOL_COMMUTE * norms.0.max(1.0) * norms.1.max(1.0) {
            return Err(Error::NonCommuting { norm: commutator_norm });
        }
        let worst = norms.0.max(norms.1);
        if worst > 1.0 + TOL_NORM {
            return Err(Error::NotContractive { norm: worst });
        }
    }
    let rho = (linalg::spectral_radius(t1), linalg::spectral_radius(t2));
    let purity_margins = (1.0 - rho.0, 1.0 - rho.1);
    if flags.require_pure && (purity_margins.0 <= 0.0 || purity_margins.1 <= 0.0) {
        return Err(Error::NotPure { radius: rho.0.max(rho.1) });
    }
    let defect_ranks = (defect_rank(t1), defect_rank(t2));
    Ok(CommutingPair { t1: t1.clone(), t2: t2.clone(), commutator_norm, norms, purity_margins, defect_ranks })
}

fn rank_threshold(t: &CMat) -> f64 {
    TOL_RANK * linalg::op_norm(t).max(1.0)
}

fn defect_square(t: &CMat) -> CMat {
    let n = t.nrows();
    let h = linalg::identity(n) - t * t.adjoint();
    (&h + h.adjoint()) * cr(0.5)
}

fn defect_rank(t: &CMat) -> usize {
    let h = defect_square(t);
    let eig = h.symmetric_eigen();
    eig.eigenvalues.iter().filter(|&&l| l > TOL_RANK).count()
}

/// `D_{T*} = (I − TT*)^{1/2}` with its rank and an orthonormal basis of its range.
#[derive(Debug, Clone, PartialEq)]
pub struct Defect {
    pub sqrt: CMat,
    pub rank: usize,
    pub basis: CMat,
}

pub fn defect(t: &CMat) -> Result<Defect> {
    let norm = linalg::op_norm(t);
    if norm > 1.0 + TOL_NORM {
        return Err(Error::NotContractive { norm });
    }
    let n = t.nrows();
    let h = defect_square(t);
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let keep: Vec<usize> = order.into_iter().filter(|&k| eig.eigenvalues[k] > TOL_RANK).collect();
    let mut basis = linalg::zeros(n, keep.len());
    let mut sqrt = linalg::zeros(n, n);
    for (col, &k) in keep.iter().enumerate() {
        let v = eig.eigenvectors.column(k).into_owned();
        basis.set_column(col, &v);
        sqrt += (&v * v.adjoint()) * cr(eig.eigenvalues[k].sqrt());
    }
    Ok(Defect { sqrt, rank: keep.len(), basis })
}

/// `p(T₁, T₂)` by Horner in `T₁` over precomputed powers of `T₂`.
pub fn poly_apply_mats(p: &Poly2, t1: &CMat, t2: &CMat) -> CMat {
    let n = t1.nrows();
    let (dz, dw) = p.bidegree();
    if p.is_zero() {
        return linalg::zeros(n, n);
    }
    let mut pw = Vec::with_capacity(dw + 1);
    pw.push(linalg::identity(n));
    for j in 1..=dw {
        pw.push(&pw[j - 1] * t2);
    }
    let row = |i: usize| -> CMat {
        let mut acc = linalg::zeros(n, n);
        for (j, m) in pw.iter().enumerate() {
            let c = p.coeff(i, j);
            if c != C64::new(0.0, 0.0) {
                acc += m * c;
            }
        }
        acc
    };
    let mut acc = row(dz);
    for i in (0..dz).rev() {
        acc = t1 * acc + row(i);
    }
    acc
}

pub fn poly_apply(p: &Poly2, pair: &CommutingPair) -> CMat {
    poly_apply_mats(p, &pair.t1, &pair.t2)
}

/// One-variable polynomial of a matrix.
pub fn poly1_apply(p: &Poly1, t: &CMat) -> CMat {
    let n = t.nrows();
    let mut acc = linalg::zeros(n, n);
    for &c in p.coeffs().iter().rev() {
        acc = t * acc + linalg::identity(n) * c;
    }
    acc
}

/// `b(T)` for a finite Blaschke product, as `u Π (a − T)(I − āT)⁻¹` per zero.
pub fn blaschke_apply(b: &BlaschkeProduct, t: &CMat) -> Result<CMat> {
    let n = t.nrows();
    let mut acc = linalg::identity(n) * b.unimodular_constant();
    for z in b.zeros() {
        let num = linalg::identity(n) * z.point - t;
        let den = linalg::identity(n) - t * z.point.conj();
        let inv = linalg::inverse(&den).ok_or_else(|| Error::PoleHit(format!("{}", z.point)))?;
        let factor = num * inv;
        for _ in 0..z.multiplicity {
            acc *= &factor;
        }
    }
    Ok(acc)
}

/// Power series `f(z, w) = Σ c_ij z^i w^j` with a Cauchy majorant
/// `|c_ij| ≤ M R^{−(i+j)}`, `R ≥ 1`.
pub struct AnalyticSymbol<'a> {
    pub coeff: Box<dyn Fn(usize, usize) -> C64 + Sync + 'a>,
    pub majorant: f64,
    pub radius: f64,
    /// Known finite total degree (polynomials); the series is summed exactly.
    pub total_degree: Option<usize>,
}

impl<'a> AnalyticSymbol<'a> {
    pub fn from_poly(p: &'a Poly2) -> Self {
        let (dz, dw) = p.bidegree();
        AnalyticSymbol {
            coeff: Box::new(move |i, j| p.coeff(i, j)),
            majorant: p.max_coeff(),
            radius: 1.0,
            total_degree: Some(dz + dw),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticValue {
    pub value: CMat,
    pub degree: usize,
    pub tail_bound: f64,
}

/// Bound `‖T^k‖ ≤ K r^k` with `r` halfway between `ρ(T)` and 1, where `K` is
/// taken over computed powers up to a horizon beyond which the spectral
/// radius dominates.
fn power_envelope(t: &CMat) -> (f64, f64) {
    let rho = linalg::spectral_radius(t);
    let r = (rho + 1.0) / 2.0;
    let horizon = 4 * t.nrows() + 64;
    let mut p = linalg::identity(t.nrows());
    let mut k_max: f64 = 1.0;
    for k in 1..=horizon {
        p = &p * t;
        k_max = k_max.max(linalg::op_norm(&p) / r.powi(k as i32));
    }
    (k_max, r)
}

/// `f(T₁, T₂)` by Taylor summation; requires a pure pair.
pub fn analytic_apply(f: &AnalyticSymbol<'_>, pair: &CommutingPair) -> Result<AnalyticValue> {
    pair.require_pure()?;
    let (degree, tail_bound) = match f.total_degree {
        Some(d) => (d, 0.0),
        None => {
            let (k1, r1) = power_envelope(&pair.t1);
            let (k2, r2) = power_envelope(&pair.t2);
            let q = r1.max(r2) / f.radius.max(1.0);
            let scale = f.majorant * k1 * k2;
            // Σ_{s>N} (s+1) q^s, evaluated by direct summation of the tail.
            let tail = |n: usize| -> f64 {
                let mut sum = 0.0;
                let mut s = n + 1;
                let mut term = (s as f64 + 1.0) * q.powi(s as i32);
                while term > 1e-300 && s < n + 100_000 {
                    sum += term;
                    s += 1;
                    term = (s as f64 + 1.0) * q.powi(s as i32);
                }
                scale * sum
            };
            let mut n = 0;
            loop {
                if n > MAX_CALC_TERMS {
                    return Err(Error::TruncationNotConverged { max_terms: MAX_CALC_TERMS });
                }
                let t = tail(n);
                if t < TOL_CALC {
                    break (n, t);
                }
                n += 1;
            }
        }
    };
    let n = pair.dim();
    let mut p1 = vec![linalg::identity(n)];
    let mut p2 = vec![linalg::identity(n)];
    for k in 1..=degree {
        p1.push(&p1[k - 1] * &pair.t1);
        p2.push(&p2[k - 1] * &pair.t2);
    }
    let mut value = linalg::zeros(n, n);
    for s in 0..=degree {
        for i in 0..=s {
            let c = (f.coeff)(i, s - i);
            if c != C64::new(0.0, 0.0) {
                value += (&p1[i] * &p2[s - i]) * c;
            }
        }
    }
    Ok(AnalyticValue { value, degree, tail_bound })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectrumKind {
    Taylor,
    Point,
}

/// Joint eigenvalues with multiplicity. Point spectra carry a matrix of
/// common eigenvectors per point (columns span the joint eigenspace).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointSpectrum {
    pub kind: SpectrumKind,
    #[serde(with = "pair_list")]
    pub points: Vec<(C64, C64)>,
    #[serde(with = "json::matrix_vec", default, skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<CMat>,
    /// Unitary of the simultaneous triangularization (Taylor kind).
    #[serde(skip)]
    pub flag_basis: Option<CMat>,
}

mod pair_list {
    use super::C64;
    use crate::json::{c64_to_pair, pair_to_c64};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[(C64, C64)], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|&(a, b)| [c64_to_pair(a), c64_to_pair(b)]).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<(C64, C64)>, D::Error> {
        let raw = Vec::<[[f64; 2]; 2]>::deserialize(d)?;
        Ok(raw.into_iter().map(|[a, b]| (pair_to_c64(a), pair_to_c64(b))).collect())
    }
}

impl JointSpectrum {
    /// Points merged at [`CLUSTER_MERGE`] with their total multiplicities.
    pub fn clustered(&self) -> Vec<PairCluster> {
        cluster_pairs(&self.points, CLUSTER_MERGE)
    }

    /// Distinct cluster centers, after checking they are well separated.
    pub fn distinct_points(&self) -> Result<Vec<(C64, C64)>> {
        let cl = self.clustered();
        check_separation(&cl)?;
        Ok(cl.into_iter().map(|c| c.center).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cluster {
    pub center: C64,
    pub count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairCluster {
    pub center: (C64, C64),
    pub count: usize,
}

fn union_find_groups(n: usize, close: impl Fn(usize, usize) -> bool) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for i in 0..n {
        for j in i + 1..n {
            if close(i, j) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[b.max(a)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_of: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        match root_of[r] {
            Some(g) => groups[g].push(i),
            None => {
                root_of[r] = Some(groups.len());
                groups.push(vec![i]);
            }
        }
    }
    groups
}

fn order_key(z: C64) -> (i64, i64) {
    // Rounded so that cluster order is stable under roundoff.
    ((z.re * 1e6).round() as i64, (z.im * 1e6).round() as i64)
}

/// Single-linkage clustering of complex numbers; centers are means.
pub fn cluster_points(points: &[C64], radius: f64) -> Vec<Cluster> {
    let groups = union_find_groups(points.len(), |i, j| (points[i] - points[j]).norm() <= radius);
    let mut out: Vec<Cluster> = groups
        .into_iter()
        .map(|g| {
            let s: C64 = g.iter().map(|&i| points[i]).sum();
            Cluster { center: s / cr(g.len() as f64), count: g.len() }
        })
        .collect();
    out.sort_by_key(|c| order_key(c.center));
    out
}

fn pair_dist(a: (C64, C64), b: (C64, C64)) -> f64 {
    (a.0 - b.0).norm().max((a.1 - b.1).norm())
}

pub fn cluster_pairs(points: &[(C64, C64)], radius: f64) -> Vec<PairCluster> {
    let groups = union_find_groups(points.len(), |i, j| pair_dist(points[i], points[j]) <= radius);
    let mut out: Vec<PairCluster> = groups
        .into_iter()
        .map(|g| {
            let k = cr(g.len() as f64);
            let a: C64 = g.iter().map(|&i| points[i].0).sum();
            let b: C64 = g.iter().map(|&i| points[i].1).sum();
            PairCluster { center: (a / k, b / k), count: g.len() }
        })
        .collect();
    out.sort_by_key(|c| (order_key(c.center.0), order_key(c.center.1)));
    out
}

/// `DegenerateCluster` when two distinct cluster centers are closer than
/// [`CLUSTER_SEPARATION`].
pub fn check_separation(clusters: &[PairCluster]) -> Result<()> {
    let mut min = f64::INFINITY;
    for (i, a) in clusters.iter().enumerate() {
        for b in &clusters[i + 1..] {
            min = min.min(pair_dist(a.center, b.center));
        }
    }
    if min < CLUSTER_SEPARATION {
        return Err(Error::DegenerateCluster { separation: min });
    }
    Ok(())
}

/// Bottleneck distance between two point sets (no multiplicity) under the
/// optimal assignment; `inf` when the sizes differ.
pub fn pair_set_distance(a: &[(C64, C64)], b: &[(C64, C64)]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let cost: Vec<Vec<f64>> = a.iter().map(|&x| b.iter().map(|&y| pair_dist(x, y)).collect()).collect();
    let assign = linalg::optimal_assignment(&cost);
    assign.iter().enumerate().map(|(i, &j)| cost[i][j]).fold(0.0, f64::max)
}

fn strict_lower_norm(m: &CMat) -> f64 {
    let mut s = 0.0;
    for j in 0..m.ncols() {
        for i in j + 1..m.nrows() {
            s += m[(i, j)].norm_sqr();
        }
    }
    s.sqrt()
}

fn triangular_tolerance(t1: &CMat, t2: &CMat) -> f64 {
    1e-8 * (linalg::op_norm(t1) + linalg::op_norm(t2)).max(1.0)
}

/// Unitary `Q` making both matrices upper triangular, by successive
/// deflation of common eigenvectors.
fn deflation_flag(t1: &CMat, t2: &CMat) -> CMat {
    let n = t1.nrows();
    let mut q_total = linalg::identity(n);
    let mut a = t1.clone();
    let mut b = t2.clone();
    let mut basis = linalg::identity(n);
    let mut cols: Vec<CVec> = Vec::with_capacity(n);
    while a.nrows() > 0 {
        let v = common_eigenvector(&a, &b);
        cols.push(&basis * &v);
        let vm = CMat::from_column_slice(v.len(), 1, v.as_slice());
        let comp = linalg::complement_basis(&vm);
        a = comp.adjoint() * &a * &comp;
        b = comp.adjoint() * &b * &comp;
        basis = &basis * &comp;
    }
    for (k, col) in cols.iter().enumerate() {
        q_total.set_column(k, col);
    }
    q_total
}

/// A common eigenvector of a commuting pair: an eigenvector of `T₂`
/// restricted to an eigenspace of `T₁`.
fn common_eigenvector(t1: &CMat, t2: &CMat) -> CVec {
    let n = t1.nrows();
    if n == 1 {
        return CVec::from_element(1, cr(1.0));
    }
    let lam = cluster_points(&linalg::eigenvalues(t1), CLUSTER_MERGE)[0].center;
    let k = numerical_kernel(&(t1 - linalg::identity(n) * lam), rank_threshold(t1));
    let restricted = k.adjoint() * t2 * &k;
    let mu = cluster_points(&linalg::eigenvalues(&restricted), CLUSTER_MERGE)[0].center;
    let m = restricted.nrows();
    let u = numerical_kernel(&(restricted - linalg::identity(m) * mu), rank_threshold(t2));
    let v = &k * u.column(0);
    let nv = v.norm();
    v / cr(nv)
}

/// Orthonormal kernel basis with an absolute singular-value threshold; falls
/// back to the least singular vector so the result is never empty.
fn numerical_kernel(m: &CMat, threshold: f64) -> CMat {
    let n = m.ncols();
    let smax = linalg::singular_values(m).first().copied().unwrap_or(0.0);
    if smax <= threshold {
        return linalg::identity(n);
    }
    let (basis, _) = linalg::null_space(m, threshold / smax);
    if basis.ncols() > 0 {
        return basis;
    }
    let f = linalg::svd(m);
    f.v.columns(n - 1, 1).into_owned()
}

/// Taylor spectrum by simultaneous unitary triangularization.
///
/// First tries the Schur form of a seeded generic combination `αT₁ + βT₂`
/// and verifies that both matrices are triangular in its basis. When the
/// combination has repeated eigenvalues that check can fail for structural
/// reasons, so after the attempts run out the flag is built by deflating
/// common eigenvectors. The diagonal pairs are cross-checked against the
/// eigenvalues of two fresh combinations.
pub fn joint_spectrum_taylor(pair: &CommutingPair, seed: u64) -> Result<JointSpectrum> {
    let (t1, t2) = (&pair.t1, &pair.t2);
    let n = pair.dim();
    let tol = triangular_tolerance(t1, t2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut flag: Option<CMat> = None;
    let mut residual = f64::INFINITY;
    for _ in 0..TRIANGULARIZE_ATTEMPTS {
        let alpha: f64 = rng.random_range(0.5..1.5);
        let beta: f64 = rng.random_range(0.5..1.5);
        let (q, _) = linalg::schur(&(t1 * cr(alpha) + t2 * cr(beta)));
        let r = strict_lower_norm(&(q.adjoint() * t1 * &q)).max(strict_lower_norm(&(q.adjoint() * t2 * &q)));
        if r <= tol {
            flag = Some(q);
            break;
        }
        residual = residual.min(r);
    }
    let q = match flag {
        Some(q) => q,
        None => {
            let q = deflation_flag(t1, t2);
            let r = strict_lower_norm(&(q.adjoint() * t1 * &q)).max(strict_lower_norm(&(q.adjoint() * t2 * &q)));
            if r > tol {
                return Err(Error::TriangularizationFailed {
                    attempts: TRIANGULARIZE_ATTEMPTS + 1,
                    residual: residual.min(r),
                });
            }
            q
        }
    };
    let a = q.adjoint() * t1 * &q;
    let b = q.adjoint() * t2 * &q;
    let points: Vec<(C64, C64)> = (0..n).map(|i| (a[(i, i)], b[(i, i)])).collect();

    for _ in 0..2 {
        let alpha: f64 = rng.random_range(0.5..1.5);
        let beta: f64 = rng.random_range(0.5..1.5);
        let eig = linalg::eigenvalues(&(t1 * cr(alpha) + t2 * cr(beta)));
        let predicted: Vec<C64> = points.iter().map(|&(l, m)| l * alpha + m * beta).collect();
        if !clustered_multisets_agree(&eig, &predicted) {
            return Err(Error::TriangularizationFailed {
                attempts: TRIANGULARIZE_ATTEMPTS,
                residual: linalg::matching_distance(&eig, &predicted),
            });
        }
    }
    Ok(JointSpectrum { kind: SpectrumKind::Taylor, points, witnesses: Vec::new(), flag_basis: Some(q) })
}

/// Cluster-level multiset comparison: same number of clusters, same counts,
/// centers within [`MATCH_CAP`] scaled by cluster size (mean of a split
/// cluster is accurate, its members are not).
fn clustered_multisets_agree(a: &[C64], b: &[C64]) -> bool {
    let ca = cluster_points(a, CLUSTER_MERGE);
    let cb = cluster_points(b, CLUSTER_MERGE);
    if ca.len() != cb.len() {
        return false;
    }
    let cost: Vec<Vec<f64>> = ca
        .iter()
        .map(|x| cb.iter().map(|y| if x.count == y.count { (x.center - y.center).norm() } else { 1e9 }).collect())
        .collect();
    let assign = linalg::optimal_assignment(&cost);
    assign.iter().enumerate().all(|(i, &j)| cost[i][j] <= MATCH_CAP)
}

/// Joint eigenvalues witnessed by common eigenvectors.
pub fn joint_point_spectrum(pair: &CommutingPair) -> JointSpectrum {
    joint_point_spectrum_mats(&pair.t1, &pair.t2)
}

pub fn joint_point_spectrum_mats(t1: &CMat, t2: &CMat) -> JointSpectrum {
    let n = t1.nrows();
    let mut points = Vec::new();
    let mut witnesses = Vec::new();
    for cl in cluster_points(&linalg::eigenvalues(t1), CLUSTER_MERGE) {
        let lam = cl.center;
        let k = numerical_kernel(&(t1 - linalg::identity(n) * lam), rank_threshold(t1));
        let restricted = k.adjoint() * t2 * &k;
        let m = restricted.nrows();
        for cl2 in cluster_points(&linalg::eigenvalues(&restricted), CLUSTER_MERGE) {
            let mu = cl2.center;
            let u = numerical_kernel(&(&restricted - linalg::identity(m) * mu), rank_threshold(t2));
            let w = &k * u;
            let r1 = linalg::op_norm(&(t1 * &w - &w * lam));
            let r2 = linalg::op_norm(&(t2 * &w - &w * mu));
            if r1 <= TOL_EIG * linalg::op_norm(t1).max(1.0) && r2 <= TOL_EIG * linalg::op_norm(t2).max(1.0) {
                points.push((lam, mu));
                witnesses.push(w);
            }
        }
    }
    JointSpectrum { kind: SpectrumKind::Point, points, witnesses, flag_basis: None }
}

/// Minimal Blaschke product with a conclusiveness flag for the Jordan
/// structure decisions.
#[derive(Debug, Clone, PartialEq)]
pub struct MinimalBlaschke {
    pub blaschke: BlaschkeProduct,
    pub conclusive: bool,
}

/// The Blaschke product `m` generating `Ann(T)`: zeros at the eigenvalues,
/// multiplicity the size of the largest Jordan block.
pub fn minimal_blaschke_detailed(t: &CMat) -> Result<MinimalBlaschke> {
    let rho = linalg::spectral_radius(t);
    if rho >= 1.0 {
        return Err(Error::NotPure { radius: rho });
    }
    let n = t.nrows();
    let norm = linalg::op_norm(t);
    let threshold = TOL_RANK * norm.max(f64::MIN_POSITIVE);
    let mut zeros = Vec::new();
    let mut conclusive = true;
    for cl in cluster_points(&linalg::eigenvalues(t), CLUSTER_MERGE) {
        let shifted = t - linalg::identity(n) * cl.center;
        let target = n - cl.count;
        let mut power = shifted.clone();
        let mut mult = cl.count;
        for k in 1..=cl.count {
            let dec = linalg::rank_abs(&power, threshold);
            conclusive &= dec.conclusive;
            if dec.rank <= target {
                mult = k;
                break;
            }
            power = &power * &shifted;
        }
        zeros.push(BlaschkeZero { point: cl.center, multiplicity: mult });
    }
    if norm == 0.0 {
        zeros = vec![BlaschkeZero { point: cr(0.0), multiplicity: 1 }];
    }
    Ok(MinimalBlaschke { blaschke: BlaschkeProduct::new(zeros, cr(1.0))?, conclusive })
}

pub fn minimal_blaschke(t: &CMat) -> Result<BlaschkeProduct> {
    Ok(minimal_blaschke_detailed(t)?.blaschke)
}
