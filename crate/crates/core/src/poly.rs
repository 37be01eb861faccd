//! Complex polynomials in one and two variables, and finite Blaschke products.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::json;
use crate::linalg::{self, cr, CMat, CVec, C64};

/// Relative residual bound for computed roots.
pub const TOL_ROOT: f64 = 1e-8;
/// Relative residual bound for tensor-grid fits.
pub const TOL_FIT: f64 = 1e-10;
/// Relative tolerance for equality up to a unit factor.
pub const TOL_UNIT_EQ: f64 = 1e-8;

/// Univariate polynomial, coefficients in ascending degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Poly1 {
    #[serde(with = "json::complex_vec")]
    coeffs: Vec<C64>,
}

impl Poly1 {
    pub fn new(mut coeffs: Vec<C64>) -> Self {
        while coeffs.last().is_some_and(|z| *z == C64::default()) {
            coeffs.pop();
        }
        Poly1 { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&x| cr(x)).collect())
    }

    pub fn zero() -> Self {
        Poly1 { coeffs: Vec::new() }
    }

    pub fn constant(a: C64) -> Self {
        Self::new(vec![a])
    }

    /// The monomial `z`.
    pub fn z() -> Self {
        Self::new(vec![cr(0.0), cr(1.0)])
    }

    /// Monic polynomial with the given roots (with repetition).
    pub fn from_roots(roots: &[C64]) -> Self {
        let mut coeffs = vec![cr(1.0)];
        for &r in roots {
            let mut next = vec![C64::default(); coeffs.len() + 1];
            for (k, &a) in coeffs.iter().enumerate() {
                next[k + 1] += a;
                next[k] -= a * r;
            }
            coeffs = next;
        }
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs.iter().rev().fold(C64::default(), |acc, &a| acc * z + a)
    }

    pub fn derivative(&self) -> Self {
        Self::new(self.coeffs.iter().enumerate().skip(1).map(|(k, &a)| a * cr(k as f64)).collect())
    }

    pub fn mul(&self, other: &Poly1) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![C64::default(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn add(&self, other: &Poly1) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |v: &[C64], k: usize| v.get(k).copied().unwrap_or_default();
        Self::new((0..n).map(|k| get(&self.coeffs, k) + get(&other.coeffs, k)).collect())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(self.coeffs.iter().map(|&a| a * s).collect())
    }

    /// Sum of coefficient moduli; bounds `|p|` on the closed disc.
    pub fn l1_norm(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm()).sum()
    }

    /// Roots with multiplicity, from the eigenvalues of the balanced
    /// companion matrix.
    pub fn roots(&self) -> Result<Vec<C64>> {
        let deg = self.degree().ok_or(Error::ZeroPolynomial)?;
        // Leading zeros at the origin are split off exactly.
        let lead_zeros = self.coeffs.iter().take_while(|z| **z == C64::default()).count();
        let mut roots = vec![C64::default(); lead_zeros];
        let reduced = &self.coeffs[lead_zeros..];
        let n = deg - lead_zeros;
        if n == 0 {
            return Ok(roots);
        }
        let lead = reduced[n];
        let mut comp = linalg::zeros(n, n);
        for i in 1..n {
            comp[(i, i - 1)] = cr(1.0);
        }
        for i in 0..n {
            comp[(i, n - 1)] = -reduced[i] / lead;
        }
        balance(&mut comp);
        roots.extend(linalg::eigenvalues(&comp));
        Ok(roots)
    }
}

/// Parlett–Reinsch diagonal balancing by powers of two (in place).
pub fn balance(m: &mut CMat) {
    let n = m.nrows();
    let radix = 2.0_f64;
    let mut converged = false;
    let mut sweeps = 0;
    while !converged && sweeps < 100 {
        converged = true;
        sweeps += 1;
        for i in 0..n {
            let mut col = 0.0;
            let mut row = 0.0;
            for j in 0..n {
                if j != i {
                    col += m[(j, i)].norm();
                    row += m[(i, j)].norm();
                }
            }
            if col == 0.0 || row == 0.0 {
                continue;
            }
            let mut f = 1.0;
            let s = col + row;
            let mut g = row / radix;
            while col < g {
                f *= radix;
                col *= radix * radix;
            }
            g = row * radix;
            while col > g {
                f /= radix;
                col /= radix * radix;
            }
            if (col + row) / f < 0.95 * s {
                converged = false;
                let g = 1.0 / f;
                for j in 0..n {
                    m[(i, j)] *= g;
                }
                for j in 0..n {
                    m[(j, i)] *= f;
                }
            }
        }
    }
}

/// Bivariate polynomial; `coeffs[(i, j)]` multiplies `z^i w^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly2 {
    coeffs: CMat,
}

#[derive(Serialize, Deserialize)]
struct Poly2Json {
    coeffs: Vec<Vec<[f64; 2]>>,
}

impl Serialize for Poly2 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        Poly2Json { coeffs: json::matrix_to_rows(&self.coeffs) }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Poly2 {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = Poly2Json::deserialize(d)?;
        let m = json::rows_to_matrix(&raw.coeffs).map_err(serde::de::Error::custom)?;
        Ok(Poly2::new(m))
    }
}

impl Poly2 {
    /// Trailing all-zero rows and columns are trimmed.
    pub fn new(coeffs: CMat) -> Self {
        let zero = C64::default();
        let mut rows = coeffs.nrows();
        while rows > 0 && coeffs.row(rows - 1).iter().all(|z| *z == zero) {
            rows -= 1;
        }
        let mut cols = coeffs.ncols();
        while cols > 0 && coeffs.view((0, cols - 1), (rows, 1)).iter().all(|z| *z == zero) {
            cols -= 1;
        }
        if rows == 0 || cols == 0 {
            return Poly2 { coeffs: linalg::zeros(0, 0) };
        }
        Poly2 { coeffs: coeffs.view((0, 0), (rows, cols)).into_owned() }
    }

    pub fn zero() -> Self {
        Poly2 { coeffs: linalg::zeros(0, 0) }
    }

    pub fn constant(a: C64) -> Self {
        Self::new(CMat::from_element(1, 1, a))
    }

    pub fn monomial(i: usize, j: usize, a: C64) -> Self {
        let mut m = linalg::zeros(i + 1, j + 1);
        m[(i, j)] = a;
        Self::new(m)
    }

    /// Build from `(i, j, coefficient)` triples; repeated indices add.
    pub fn from_terms(terms: &[(usize, usize, C64)]) -> Self {
        let rows = terms.iter().map(|t| t.0 + 1).max().unwrap_or(0);
        let cols = terms.iter().map(|t| t.1 + 1).max().unwrap_or(0);
        let mut m = linalg::zeros(rows, cols);
        for &(i, j, a) in terms {
            m[(i, j)] += a;
        }
        Self::new(m)
    }

    /// `p(z)` viewed as a polynomial in `(z, w)`.
    pub fn from_z(p: &Poly1) -> Self {
        let n = p.coeffs().len();
        Self::new(CMat::from_fn(n, 1, |i, _| p.coeffs()[i]))
    }

    /// `p(w)` viewed as a polynomial in `(z, w)`.
    pub fn from_w(p: &Poly1) -> Self {
        let n = p.coeffs().len();
        Self::new(CMat::from_fn(1, n, |_, j| p.coeffs()[j]))
    }

    pub fn coeffs(&self) -> &CMat {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize, j: usize) -> C64 {
        if i < self.coeffs.nrows() && j < self.coeffs.ncols() {
            self.coeffs[(i, j)]
        } else {
            C64::default()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `(degree in z, degree in w)` as index bounds; zero polynomial is `(0, 0)`.
    pub fn bidegree(&self) -> (usize, usize) {
        (self.coeffs.nrows().saturating_sub(1), self.coeffs.ncols().saturating_sub(1))
    }

    /// Horner evaluation in `w` of Horner evaluations in `z`.
    pub fn eval(&self, z: C64, w: C64) -> C64 {
        let (rows, cols) = self.coeffs.shape();
        let mut acc = C64::default();
        for j in (0..cols).rev() {
            let mut inner = C64::default();
            for i in (0..rows).rev() {
                inner = inner * z + self.coeffs[(i, j)];
            }
            acc = acc * w + inner;
        }
        acc
    }

    /// Restriction to `w = c` as a polynomial in `z`.
    pub fn restrict_w(&self, w: C64) -> Poly1 {
        let (rows, cols) = self.coeffs.shape();
        Poly1::new(
            (0..rows)
                .map(|i| (0..cols).rev().fold(C64::default(), |acc, j| acc * w + self.coeffs[(i, j)]))
                .collect(),
        )
    }

    /// Restriction to `z = c` as a polynomial in `w`.
    pub fn restrict_z(&self, z: C64) -> Poly1 {
        let (rows, cols) = self.coeffs.shape();
        Poly1::new(
            (0..cols)
                .map(|j| (0..rows).rev().fold(C64::default(), |acc, i| acc * z + self.coeffs[(i, j)]))
                .collect(),
        )
    }

    pub fn add(&self, other: &Poly2) -> Self {
        let rows = self.coeffs.nrows().max(other.coeffs.nrows());
        let cols = self.coeffs.ncols().max(other.coeffs.ncols());
        Self::new(CMat::from_fn(rows, cols, |i, j| self.coeff(i, j) + other.coeff(i, j)))
    }

    pub fn sub(&self, other: &Poly2) -> Self {
        self.add(&other.scale(cr(-1.0)))
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(self.coeffs.map(|a| a * s))
    }

    pub fn mul(&self, other: &Poly2) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let (r1, c1) = self.coeffs.shape();
        let (r2, c2) = other.coeffs.shape();
        let mut out = linalg::zeros(r1 + r2 - 1, c1 + c2 - 1);
        for i in 0..r1 {
            for j in 0..c1 {
                let a = self.coeffs[(i, j)];
                if a == C64::default() {
                    continue;
                }
                for k in 0..r2 {
                    for l in 0..c2 {
                        out[(i + k, j + l)] += a * other.coeffs[(k, l)];
                    }
                }
            }
        }
        Self::new(out)
    }

    pub fn d_dz(&self) -> Self {
        let (rows, cols) = self.coeffs.shape();
        if rows <= 1 {
            return Self::zero();
        }
        Self::new(CMat::from_fn(rows - 1, cols, |i, j| self.coeffs[(i + 1, j)] * cr((i + 1) as f64)))
    }

    pub fn d_dw(&self) -> Self {
        let (rows, cols) = self.coeffs.shape();
        if cols <= 1 {
            return Self::zero();
        }
        Self::new(CMat::from_fn(rows, cols - 1, |i, j| self.coeffs[(i, j + 1)] * cr((j + 1) as f64)))
    }

    /// Sum of coefficient moduli; bounds `|p|` on the closed bidisc.
    pub fn l1_norm(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm()).sum()
    }

    pub fn max_coeff(&self) -> f64 {
        linalg::max_abs(&self.coeffs)
    }

    /// Zero out coefficients below `rel` times the largest one.
    pub fn chop(&self, rel: f64) -> Self {
        let cut = rel * self.max_coeff();
        Self::new(self.coeffs.map(|a| if a.norm() <= cut { C64::default() } else { a }))
    }

    /// Divide by the coefficient of largest modulus (first in column-major
    /// order on ties), making that coefficient exactly 1.
    pub fn normalize_unit(&self) -> Self {
        let mut best = C64::default();
        let mut best_abs = 0.0;
        for &a in self.coeffs.iter() {
            if a.norm() > best_abs * (1.0 + 1e-12) {
                best = a;
                best_abs = a.norm();
            }
        }
        if best_abs == 0.0 {
            return self.clone();
        }
        self.scale(cr(1.0) / best)
    }

    /// Distance between unit-normalized forms: the minimum over unit
    /// factors `u` of `max|self - u·other| / max|self|` after normalizing
    /// both to unit largest coefficient.
    pub fn unit_distance(&self, other: &Poly2) -> f64 {
        if self.is_zero() || other.is_zero() {
            return if self.is_zero() && other.is_zero() { 0.0 } else { f64::INFINITY };
        }
        let a = self.scale(cr(1.0 / self.max_coeff()));
        let b = other.scale(cr(1.0 / other.max_coeff()));
        // Align phases using the entry where `a` is largest.
        let (mut bi, mut bj, mut best) = (0, 0, 0.0);
        for i in 0..a.coeffs.nrows() {
            for j in 0..a.coeffs.ncols() {
                if a.coeffs[(i, j)].norm() > best {
                    best = a.coeffs[(i, j)].norm();
                    bi = i;
                    bj = j;
                }
            }
        }
        let bb = b.coeff(bi, bj);
        if bb.norm() == 0.0 {
            return f64::INFINITY;
        }
        let phase = a.coeffs[(bi, bj)] / bb;
        let phase = phase / phase.norm();
        a.sub(&b.scale(phase)).max_coeff()
    }

    pub fn eq_up_to_unit(&self, other: &Poly2) -> bool {
        self.unit_distance(other) < TOL_UNIT_EQ
    }
}

/// Result of a tensor-grid fit.
#[derive(Debug, Clone)]
pub struct TensorFit {
    pub poly: Poly2,
    /// Max sample misfit relative to the largest sample modulus.
    pub residual: f64,
}

/// Standard interpolation nodes: `0.9·` roots of unity in `z`, unit roots in `w`.
pub fn standard_nodes(degz: usize, degw: usize) -> (Vec<C64>, Vec<C64>) {
    let roots = |n: usize, r: f64| -> Vec<C64> {
        (0..n).map(|k| C64::from_polar(r, 2.0 * PI * k as f64 / n as f64)).collect()
    };
    (roots(degz + 1, 0.9), roots(degw + 1, 1.0))
}

fn vandermonde(nodes: &[C64]) -> CMat {
    let n = nodes.len();
    CMat::from_fn(n, n, |i, j| nodes[i].powu(j as u32))
}

fn check_distinct(nodes: &[C64], which: &str) -> Result<()> {
    for (a, x) in nodes.iter().enumerate() {
        for y in &nodes[a + 1..] {
            if (x - y).norm() < 1e-14 * (1.0 + x.norm()) {
                return Err(Error::SingularInterpolation(format!("repeated {which}-node {x}")));
            }
        }
    }
    Ok(())
}

/// Fit the unique polynomial of bidegree `(z_nodes.len()-1, w_nodes.len()-1)`
/// through `values[(i, j)] = q(z_nodes[i], w_nodes[j])`.
///
/// The tensor Vandermonde system `Vz C Vwᵀ = values` is solved as two
/// Householder-QR solves, one per factor.
pub fn fit_tensor_grid(z_nodes: &[C64], w_nodes: &[C64], values: &CMat) -> Result<TensorFit> {
    if values.shape() != (z_nodes.len(), w_nodes.len()) {
        return Err(Error::DimensionMismatch(format!(
            "values {:?} vs nodes ({}, {})",
            values.shape(),
            z_nodes.len(),
            w_nodes.len()
        )));
    }
    if z_nodes.is_empty() || w_nodes.is_empty() {
        return Ok(TensorFit { poly: Poly2::zero(), residual: 0.0 });
    }
    check_distinct(z_nodes, "z")?;
    check_distinct(w_nodes, "w")?;
    let vz = vandermonde(z_nodes);
    let vw = vandermonde(w_nodes);
    // Solve Vz Y = values, column by column.
    let mut y = linalg::zeros(z_nodes.len(), w_nodes.len());
    for j in 0..w_nodes.len() {
        let col: CVec = values.column(j).into_owned();
        let sol = linalg::qr_solve(&vz, &col)
            .ok_or_else(|| Error::SingularInterpolation("z Vandermonde singular".into()))?;
        y.set_column(j, &sol);
    }
    // Solve C Vwᵀ = Y, i.e. Vw Cᵀ = Yᵀ.
    let yt = y.transpose();
    let mut ct = linalg::zeros(w_nodes.len(), z_nodes.len());
    for i in 0..z_nodes.len() {
        let col: CVec = yt.column(i).into_owned();
        let sol = linalg::qr_solve(&vw, &col)
            .ok_or_else(|| Error::SingularInterpolation("w Vandermonde singular".into()))?;
        ct.set_column(i, &sol);
    }
    let poly = Poly2::new(ct.transpose());
    let scale = linalg::max_abs(values).max(f64::MIN_POSITIVE);
    let mut misfit: f64 = 0.0;
    for (i, &z) in z_nodes.iter().enumerate() {
        for (j, &w) in w_nodes.iter().enumerate() {
            misfit = misfit.max((poly.eval(z, w) - values[(i, j)]).norm());
        }
    }
    Ok(TensorFit { poly, residual: misfit / scale })
}

/// A zero of a Blaschke product together with its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlaschkeZero {
    #[serde(with = "json::complex")]
    pub point: C64,
    pub multiplicity: usize,
}

/// Finite Blaschke product `u · Π ((a − z)/(1 − ā z))^m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlaschkeProduct {
    zeros: Vec<BlaschkeZero>,
    #[serde(with = "json::complex")]
    unimodular_constant: C64,
}

impl BlaschkeProduct {
    pub fn new(zeros: Vec<BlaschkeZero>, unimodular_constant: C64) -> Result<Self> {
        if (unimodular_constant.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!(
                "unimodular constant has modulus {}",
                unimodular_constant.norm()
            )));
        }
        for z in &zeros {
            if !(z.point.norm() < 1.0) {
                return Err(Error::InvalidInput(format!("zero {} outside the open disc", z.point)));
            }
            if z.multiplicity == 0 {
                return Err(Error::InvalidInput("zero multiplicity must be at least 1".into()));
            }
        }
        Ok(BlaschkeProduct { zeros, unimodular_constant })
    }

    /// Product with simple zeros at the listed points (repeats merge into
    /// multiplicities) and unit constant.
    pub fn from_points(points: &[C64]) -> Result<Self> {
        let mut zeros: Vec<BlaschkeZero> = Vec::new();
        for &p in points {
            if let Some(z) = zeros.iter_mut().find(|z| z.point == p) {
                z.multiplicity += 1;
            } else {
                zeros.push(BlaschkeZero { point: p, multiplicity: 1 });
            }
        }
        Self::new(zeros, cr(1.0))
    }

    pub fn zeros(&self) -> &[BlaschkeZero] {
        &self.zeros
    }

    pub fn unimodular_constant(&self) -> C64 {
        self.unimodular_constant
    }

    /// Total number of zeros counted with multiplicity.
    pub fn degree(&self) -> usize {
        self.zeros.iter().map(|z| z.multiplicity).sum()
    }

    /// Zeros listed with repetition.
    pub fn points_with_multiplicity(&self) -> Vec<C64> {
        self.zeros.iter().flat_map(|z| std::iter::repeat_n(z.point, z.multiplicity)).collect()
    }

    pub fn eval(&self, z: C64) -> Result<C64> {
        let mut acc = self.unimodular_constant;
        for bz in &self.zeros {
            let den = cr(1.0) - bz.point.conj() * z;
            if den.norm() < 1e-14 {
                return Err(Error::PoleHit(format!("{z}")));
            }
            acc *= ((bz.point - z) / den).powu(bz.multiplicity as u32);
        }
        Ok(acc)
    }

    /// True iff all multiplicities are one and distinct zeros are more than
    /// `sep` apart.
    pub fn has_simple_roots(&self, sep: f64) -> bool {
        if self.zeros.iter().any(|z| z.multiplicity != 1) {
            return false;
        }
        for (i, a) in self.zeros.iter().enumerate() {
            for b in &self.zeros[i + 1..] {
                if (a.point - b.point).norm() <= sep {
                    return false;
                }
            }
        }
        true
    }

    /// Monic numerator `Π (z − a)^m`; the product equals this times a
    /// function that is invertible on the closed disc.
    pub fn numerator(&self) -> Poly1 {
        Poly1::from_roots(&self.points_with_multiplicity())
    }

    /// Blaschke product with the same zeros, all multiplicities reduced to one.
    pub fn radical(&self) -> Self {
        BlaschkeProduct {
            zeros: self.zeros.iter().map(|z| BlaschkeZero { point: z.point, multiplicity: 1 }).collect(),
            unimodular_constant: self.unimodular_constant,
        }
    }
}

/// Uniformly spaced points on the unit circle.
pub fn circle_grid(n: usize) -> Vec<C64> {
    (0..n).map(|k| C64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64)).collect()
}

/// Polar grid of the open disc: `radii` rings at radius `(k+0.5)/radii` and
/// `angles` points per ring.
pub fn disc_grid(radii: usize, angles: usize) -> Vec<C64> {
    let mut out = Vec::with_capacity(radii * angles);
    for k in 0..radii {
        let r = (k as f64 + 0.5) / radii as f64;
        for a in 0..angles {
            out.push(C64::from_polar(r, 2.0 * PI * a as f64 / angles as f64));
        }
    }
    out
}

/// `w² − z`, the running example of a distinguished variety.
pub fn sqrt_variety() -> Poly2 {
    Poly2::from_terms(&[(0, 2, cr(1.0)), (1, 0, cr(-1.0))])
}
