//! Dense complex linear algebra helpers shared by every module.
//!
//! Everything here works on `DMatrix<Complex<f64>>`. Rank decisions are
//! always relative to the largest singular value and report whether any
//! singular value sits close enough to the threshold to make the decision
//! unreliable.

use nalgebra::{Complex, DMatrix, DVector};

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

/// Factor by which a singular value must clear the rank threshold (in either
/// direction) for a rank decision to count as conclusive.
pub const RANK_GUARD: f64 = 10.0;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

#[inline]
pub fn cr(re: f64) -> C64 {
    Complex::new(re, 0.0)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn zeros(r: usize, c: usize) -> CMat {
    CMat::zeros(r, c)
}

/// Build a complex matrix from a real row-major slice.
pub fn from_real_rows(rows: usize, cols: usize, data: &[f64]) -> CMat {
    CMat::from_row_iterator(rows, cols, data.iter().map(|&x| cr(x)))
}

pub fn diag(entries: &[C64]) -> CMat {
    CMat::from_diagonal(&CVec::from_column_slice(entries))
}

/// Spectral norm (largest singular value).
pub fn op_norm(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Singular values in descending order.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    if m.ncols() > m.nrows() {
        svd(&m.adjoint()).s
    } else {
        svd(m).s
    }
}

/// Singular value decomposition `m = u·diag(s)·v*` with `v` square unitary
/// (`n × n`), `s` of length `n` in descending order and `u` of size `m × n`
/// (columns for zero singular values are zero).
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: CMat,
    pub s: Vec<f64>,
    pub v: CMat,
}

/// One-sided Jacobi SVD. The LAPACK-free complex SVD shipped with nalgebra
/// loses accuracy (residuals near 1e-6) when singular values cluster, which
/// the defect and kernel computations cannot afford.
pub fn svd(m: &CMat) -> Svd {
    let (rows, n) = m.shape();
    let mut a = m.clone();
    let mut v = identity(n);
    const MAX_SWEEPS: usize = 80;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = a.column(p).norm_squared();
                let beta = a.column(q).norm_squared();
                let gamma = a.column(p).dotc(&a.column(q));
                let g = gamma.norm();
                if g == 0.0 || g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                for mat in [&mut a, &mut v] {
                    let r = mat.nrows();
                    for i in 0..r {
                        let x = mat[(i, p)];
                        let y = mat[(i, q)] * phase.conj();
                        mat[(i, p)] = x * cs - y * sn;
                        mat[(i, q)] = x * sn + y * cs;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<f64> = (0..n).map(|j| a.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));
    let mut u = zeros(rows, n);
    let mut vs = zeros(n, n);
    let mut s = Vec::with_capacity(n);
    for (col, &j) in order.iter().enumerate() {
        s.push(norms[j]);
        if norms[j] > 0.0 {
            u.set_column(col, &(a.column(j) / cr(norms[j])));
        }
        vs.set_column(col, &v.column(j));
    }
    Svd { u, s, v: vs }
}

/// Eigenvalues via the complex Schur form.
pub fn eigenvalues(m: &CMat) -> Vec<C64> {
    if m.is_empty() {
        return Vec::new();
    }
    let (_, t) = schur(m);
    (0..t.nrows()).map(|i| t[(i, i)]).collect()
}

pub fn spectral_radius(m: &CMat) -> f64 {
    eigenvalues(m).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Complex Schur decomposition `m = q t q*`.
///
/// The shifted QR iteration can stall on some inputs. Each attempt is capped;
/// a stalled attempt is retried on `u* m u` for a different fixed unitary `u`
/// (phased Fourier matrices), which changes the Hessenberg reduction and the
/// shift sequence, and the factor is mapped back.
pub fn schur(m: &CMat) -> (CMat, CMat) {
    let n = m.nrows();
    let max_iter = 200 * n.max(1);
    for attempt in 0..SCHUR_ATTEMPTS {
        let u = schur_similarity(n, attempt);
        let conj = u.adjoint() * m * &u;
        if let Some(s) = nalgebra::Schur::try_new(conj, f64::EPSILON, max_iter) {
            let (q, t) = s.unpack();
            return (u * q, t);
        }
    }
    panic!("complex Schur iteration did not converge for a {n}x{n} matrix after {SCHUR_ATTEMPTS} restarts");
}

const SCHUR_ATTEMPTS: usize = 12;

fn schur_similarity(n: usize, attempt: usize) -> CMat {
    if attempt == 0 {
        return identity(n);
    }
    let scale = 1.0 / (n as f64).sqrt();
    let tau = 2.0 * std::f64::consts::PI;
    CMat::from_fn(n, n, |j, k| {
        let phase = tau * (j * k) as f64 / n as f64 + 0.7 * (attempt * (j + 1)) as f64;
        C64::from_polar(scale, phase)
    })
}

/// Result of a numerical rank decision.
#[derive(Debug, Clone, PartialEq)]
pub struct RankDecision {
    pub rank: usize,
    pub threshold: f64,
    /// False when some singular value lies within `RANK_GUARD` of the threshold.
    pub conclusive: bool,
}

fn decide(sv: &[f64], threshold: f64) -> RankDecision {
    let rank = sv.iter().filter(|&&s| s > threshold).count();
    let conclusive = sv
        .iter()
        .all(|&s| !(s > threshold / RANK_GUARD && s <= threshold * RANK_GUARD));
    RankDecision { rank, threshold, conclusive }
}

/// Numerical rank with an absolute threshold.
pub fn rank_abs(m: &CMat, threshold: f64) -> RankDecision {
    decide(&singular_values(m), threshold)
}

/// Orthonormal basis of the null space of `m`, with the rank threshold taken
/// relative to the largest singular value (`rel * s_max`). A zero matrix has
/// the whole space as kernel.
pub fn null_space(m: &CMat, rel: f64) -> (CMat, RankDecision) {
    let n = m.ncols();
    if n == 0 {
        return (zeros(0, 0), RankDecision { rank: 0, threshold: 0.0, conclusive: true });
    }
    let f = svd(m);
    let smax = f.s.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return (identity(n), RankDecision { rank: 0, threshold: 0.0, conclusive: true });
    }
    let decision = decide(&f.s, rel * smax);
    let basis = f.v.columns(decision.rank, n - decision.rank).into_owned();
    (basis, decision)
}

/// Orthonormal basis of the column space of `m` (threshold relative to the
/// largest singular value).
pub fn range_basis(m: &CMat, rel: f64) -> (CMat, RankDecision) {
    let r = m.nrows();
    if m.ncols() == 0 || r == 0 {
        return (zeros(r, 0), RankDecision { rank: 0, threshold: 0.0, conclusive: true });
    }
    // The column space of m is the leading right singular space of m*.
    let f = svd(&m.adjoint());
    let sv: Vec<f64> = f.s.iter().copied().take(r).collect();
    let smax = sv.first().copied().unwrap_or(0.0);
    let decision = if smax == 0.0 {
        RankDecision { rank: 0, threshold: 0.0, conclusive: true }
    } else {
        decide(&sv, rel * smax)
    };
    let basis = f.v.columns(0, decision.rank).into_owned();
    (basis, decision)
}

/// Orthonormal basis of the orthogonal complement of the span of `q`
/// (which must have orthonormal columns) inside `C^n`.
pub fn complement_basis(q: &CMat) -> CMat {
    let n = q.nrows();
    if n == 0 {
        return zeros(0, 0);
    }
    let proj = identity(n) - q * q.adjoint();
    let eig = ((&proj + proj.adjoint()) * cr(0.5)).symmetric_eigen();
    // A projector has eigenvalues 0 and 1; split them at 1/2.
    let mut keep: Vec<usize> = (0..n).filter(|&k| eig.eigenvalues[k] > 0.5).collect();
    keep.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let mut out = zeros(n, keep.len());
    for (col, &k) in keep.iter().enumerate() {
        out.set_column(col, &eig.eigenvectors.column(k));
    }
    out
}

/// Square root and eigen-decomposition of a Hermitian positive semidefinite
/// matrix; negative eigenvalues (roundoff) are clamped to zero.
pub fn psd_sqrt(h: &CMat) -> CMat {
    let n = h.nrows();
    if n == 0 {
        return zeros(0, 0);
    }
    let herm = (h + h.adjoint()) * cr(0.5);
    let eig = herm.symmetric_eigen();
    let mut out = zeros(n, n);
    for k in 0..n {
        let lam = eig.eigenvalues[k].max(0.0).sqrt();
        let v = eig.eigenvectors.column(k);
        out += (&v * v.adjoint()) * cr(lam);
    }
    out
}

/// Lower Cholesky factor of a Hermitian positive definite matrix.
pub fn cholesky_lower(h: &CMat) -> Option<CMat> {
    let herm = (h + h.adjoint()) * cr(0.5);
    herm.cholesky().map(|c| c.unpack())
}

pub fn inverse(m: &CMat) -> Option<CMat> {
    m.clone().try_inverse()
}

/// Solve `m x = b` by LU; `None` when singular.
pub fn solve(m: &CMat, b: &CMat) -> Option<CMat> {
    m.clone().lu().solve(b)
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// `m^k` by repeated squaring.
pub fn mat_pow(m: &CMat, mut k: usize) -> CMat {
    let mut result = identity(m.nrows());
    let mut base = m.clone();
    while k > 0 {
        if k & 1 == 1 {
            result = &result * &base;
        }
        k >>= 1;
        if k > 0 {
            base = &base * &base;
        }
    }
    result
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

/// Defect of a matrix from unitarity, `‖U*U − I‖`.
pub fn unitarity_defect(u: &CMat) -> f64 {
    op_norm(&(u.adjoint() * u - identity(u.ncols())))
}

/// Column-stack a matrix into a vector (column-major order).
pub fn vec_of(m: &CMat) -> CVec {
    CVec::from_column_slice(m.as_slice())
}

/// Maximum-modulus entry, used for scale-aware tolerances.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Householder QR least-squares solve of an overdetermined (or square)
/// system; returns `None` if the triangular factor is numerically singular.
pub fn qr_solve(a: &CMat, b: &CVec) -> Option<CVec> {
    let (m, n) = a.shape();
    if m < n {
        return None;
    }
    let qr = a.clone().qr();
    let q = qr.q();
    let r = qr.r();
    let rmax = (0..n).map(|i| r[(i, i)].norm()).fold(0.0, f64::max);
    if (0..n).any(|i| r[(i, i)].norm() <= 1e-13 * rmax.max(f64::MIN_POSITIVE)) {
        return None;
    }
    let rhs = q.adjoint() * b;
    r.solve_upper_triangular(&rhs)
}

/// Minimum-cost perfect matching between two equally sized point sets
/// (Hungarian algorithm). Returns `assignment[i] = j` pairing `a[i]` with
/// `b[j]`.
pub fn optimal_assignment(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    if n == 0 {
        return Vec::new();
    }
    // Classic O(n^3) potentials formulation, 1-based internally.
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0usize; n];
    for j in 1..=n {
        if p[j] > 0 {
            assignment[p[j] - 1] = j - 1;
        }
    }
    assignment
}

/// Optimal matching distance between two multisets of complex numbers:
/// the largest pair distance under the sum-optimal assignment. Sizes must
/// agree, otherwise `f64::INFINITY`.
pub fn matching_distance(a: &[C64], b: &[C64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let cost: Vec<Vec<f64>> = a.iter().map(|x| b.iter().map(|y| (x - y).norm()).collect()).collect();
    let assign = optimal_assignment(&cost);
    assign.iter().enumerate().map(|(i, &j)| cost[i][j]).fold(0.0, f64::max)
}
