//! Rational matrix-valued inner functions on the disc.
//!
//! Every representation except the polynomial one is converted to a unitary
//! colligation `Ψ(z) = D + zC(I − zA)⁻¹B`, which drives derivative jets and
//! the determinant pencil used for the variety polynomial.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::json;
use crate::linalg::{self, cr, CMat, C64};
use crate::poly::{self, BlaschkeProduct, Poly1, Poly2};
use crate::report::{Entry, Status};

/// Unitarity tolerance for colligations, factors and boundary values.
pub const TOL_UNITARY: f64 = 1e-8;
/// Interior pureness margin: sampled spectral radii must not exceed `1 − this`.
pub const PURENESS_MARGIN: f64 = 1e-12;
/// Boundary grid used to certify inner-ness at construction.
pub const BOUNDARY_CERT_POINTS: usize = 2048;
/// State-matrix spectral radius must stay below `1 − this`.
pub const STATE_RADIUS_MARGIN: f64 = 1e-9;

/// Unitary colligation `[[A, B], [C, D]]` acting on `C^N ⊕ C^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Colligation {
    pub a: CMat,
    pub b: CMat,
    pub c: CMat,
    pub d: CMat,
}

impl Colligation {
    pub fn state_dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn io_dim(&self) -> usize {
        self.d.nrows()
    }

    pub fn block(&self) -> CMat {
        let n = self.state_dim();
        let d = self.io_dim();
        let mut m = linalg::zeros(n + d, n + d);
        m.view_mut((0, 0), (n, n)).copy_from(&self.a);
        m.view_mut((0, n), (n, d)).copy_from(&self.b);
        m.view_mut((n, 0), (d, n)).copy_from(&self.c);
        m.view_mut((n, n), (d, d)).copy_from(&self.d);
        m
    }

    fn check_shapes(&self) -> Result<()> {
        let n = self.a.nrows();
        let d = self.d.nrows();
        let ok = self.a.ncols() == n
            && self.d.ncols() == d
            && self.b.shape() == (n, d)
            && self.c.shape() == (d, n);
        if ok {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(format!(
                "colligation blocks A{:?} B{:?} C{:?} D{:?}",
                self.a.shape(),
                self.b.shape(),
                self.c.shape(),
                self.d.shape()
            )))
        }
    }

    fn resolvent(&self, z: C64) -> Result<CMat> {
        let n = self.state_dim();
        let m = linalg::identity(n) - &self.a * z;
        linalg::inverse(&m).ok_or_else(|| Error::ResolventSingular(format!("{z}")))
    }

    pub fn eval(&self, z: C64) -> Result<CMat> {
        if self.state_dim() == 0 {
            return Ok(self.d.clone());
        }
        let r = self.resolvent(z)?;
        Ok(&self.d + (&self.c * r * &self.b) * z)
    }

    /// Derivatives `Ψ^{(k)}(z)` for `k = 0..=order`, using
    /// `Ψ^{(k)} = k! C A^{k−1} (I − zA)^{−(k+1)} B`.
    pub fn jet(&self, z: C64, order: usize) -> Result<Vec<CMat>> {
        let mut out = vec![self.eval(z)?];
        if order == 0 {
            return Ok(out);
        }
        let d = self.io_dim();
        if self.state_dim() == 0 {
            out.extend(std::iter::repeat_n(linalg::zeros(d, d), order));
            return Ok(out);
        }
        let r = self.resolvent(z)?;
        let mut a_pow = linalg::identity(self.state_dim());
        let mut r_pow = &r * &r;
        let mut fact = 1.0;
        for k in 1..=order {
            fact *= k as f64;
            out.push((&self.c * &a_pow * &r_pow * &self.b) * cr(fact));
            a_pow = &a_pow * &self.a;
            r_pow = &r_pow * &r;
        }
        Ok(out)
    }

    /// Taylor coefficients at the origin, `Ψ_0 = D`, `Ψ_k = C A^{k−1} B`.
    pub fn markov(&self, count: usize) -> Vec<CMat> {
        let mut out = Vec::with_capacity(count);
        if count == 0 {
            return out;
        }
        out.push(self.d.clone());
        let mut ab = self.b.clone();
        for _ in 1..count {
            out.push(&self.c * &ab);
            ab = &self.a * ab;
        }
        out
    }

    /// Series connection `self(z) · other(z)`.
    pub fn cascade(&self, other: &Colligation) -> Colligation {
        let n1 = self.state_dim();
        let n2 = other.state_dim();
        let d = self.io_dim();
        let mut a = linalg::zeros(n1 + n2, n1 + n2);
        a.view_mut((0, 0), (n1, n1)).copy_from(&self.a);
        a.view_mut((0, n1), (n1, n2)).copy_from(&(&self.b * &other.c));
        a.view_mut((n1, n1), (n2, n2)).copy_from(&other.a);
        let mut b = linalg::zeros(n1 + n2, d);
        b.view_mut((0, 0), (n1, d)).copy_from(&(&self.b * &other.d));
        b.view_mut((n1, 0), (n2, d)).copy_from(&other.b);
        let mut c = linalg::zeros(d, n1 + n2);
        c.view_mut((0, 0), (d, n1)).copy_from(&self.c);
        c.view_mut((0, n1), (d, n2)).copy_from(&(&self.d * &other.c));
        Colligation { a, b, c, d: &self.d * &other.d }
    }

    /// Constant unitary function `U`.
    pub fn constant(u: CMat) -> Colligation {
        let d = u.nrows();
        Colligation { a: linalg::zeros(0, 0), b: linalg::zeros(0, d), c: linalg::zeros(d, 0), d: u }
    }
}

/// Elementary Blaschke–Potapov factor `U·((I − P) + b_a(z)P)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BpFactor {
    #[serde(with = "json::complex")]
    pub zero: C64,
    #[serde(with = "json::matrix")]
    pub projection: CMat,
    #[serde(with = "json::matrix")]
    pub unitary: CMat,
}

impl BpFactor {
    fn validate(&self) -> Result<()> {
        let d = self.unitary.nrows();
        if self.projection.shape() != (d, d) || self.unitary.ncols() != d {
            return Err(Error::DimensionMismatch("factor projection/unitary sizes".into()));
        }
        if !(self.zero.norm() < 1.0) {
            return Err(Error::InvalidInput(format!("factor zero {} outside the open disc", self.zero)));
        }
        let p = &self.projection;
        let idem = linalg::op_norm(&(p * p - p));
        let herm = linalg::op_norm(&(p - p.adjoint()));
        if idem > TOL_UNITARY || herm > TOL_UNITARY {
            return Err(Error::InvalidInput(format!(
                "projection not orthogonal (idempotent defect {idem:.2e}, hermitian defect {herm:.2e})"
            )));
        }
        let ud = linalg::unitarity_defect(&self.unitary);
        if ud > TOL_UNITARY {
            return Err(Error::NotUnitaryColligation { defect: ud });
        }
        Ok(())
    }

    fn eval(&self, z: C64) -> Result<CMat> {
        let den = cr(1.0) - self.zero.conj() * z;
        if den.norm() < 1e-14 {
            return Err(Error::PoleHit(format!("{z}")));
        }
        let b = (self.zero - z) / den;
        let d = self.unitary.nrows();
        Ok(&self.unitary * ((linalg::identity(d) - &self.projection) + &self.projection * b))
    }

    /// Unitary realization: with `P = QQ*`, `s = √(1 − |a|²)`:
    /// `A = ā I_r`, `B = s Q*`, `C = −s U Q`, `D = U(I + (a − 1)P)`.
    fn colligation(&self) -> Colligation {
        let d = self.unitary.nrows();
        let (q, dec) = linalg::range_basis(&self.projection, 1e-8);
        let r = dec.rank;
        let a = self.zero;
        let s = cr((1.0 - a.norm_sqr()).sqrt());
        let pq = &q * q.adjoint();
        Colligation {
            a: linalg::identity(r) * a.conj(),
            b: q.adjoint() * s,
            c: (&self.unitary * &q) * (-s),
            d: &self.unitary * (linalg::identity(d) + pq * (a - cr(1.0))),
        }
    }
}

/// The source representation a [`MatrixInnerFunction`] was built from.
#[derive(Debug, Clone, PartialEq)]
pub enum Representation {
    Colligation(Colligation),
    BpProduct(Vec<BpFactor>),
    ScalarBlaschkeTimesIdentity { zeros: Vec<C64>, d: usize },
    PolynomialMatrix(Vec<Vec<Poly1>>),
}

/// JSON form, tagged by `kind`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PsiJson {
    Colligation {
        #[serde(rename = "A", with = "json::matrix")]
        a: CMat,
        #[serde(rename = "B", with = "json::matrix")]
        b: CMat,
        #[serde(rename = "C", with = "json::matrix")]
        c: CMat,
        #[serde(rename = "D", with = "json::matrix")]
        d: CMat,
    },
    BpProduct {
        factors: Vec<BpFactor>,
    },
    ScalarBlaschkeTimesIdentity {
        #[serde(with = "json::complex_vec")]
        zeros: Vec<C64>,
        d: usize,
    },
    PolynomialMatrix {
        entries: Vec<Vec<Poly1>>,
    },
}

/// Construction-time certification data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InnerCertificate {
    /// `max ‖Ψ(ζ)*Ψ(ζ) − I‖` over the boundary grid.
    pub boundary_defect: f64,
    /// Spectral radius of the state matrix (0 for polynomial matrices).
    pub state_radius: f64,
    /// `‖[[A,B],[C,D]]*[[A,B],[C,D]] − I‖` (0 when not applicable).
    pub colligation_defect: f64,
}

/// A certified rational `d × d` inner function.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixInnerFunction {
    dim: usize,
    repr: Representation,
    realization: Option<Colligation>,
    certificate: InnerCertificate,
}

impl Serialize for MatrixInnerFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json_form().serialize(s)
    }
}

impl<'de> Deserialize<'de> for MatrixInnerFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = PsiJson::deserialize(d)?;
        MatrixInnerFunction::from_json_form(raw).map_err(serde::de::Error::custom)
    }
}

impl MatrixInnerFunction {
    /// Build from a unitary colligation, rejecting non-unitary blocks and
    /// state matrices with eigenvalues near the circle.
    pub fn from_colligation(a: CMat, b: CMat, c: CMat, d: CMat) -> Result<Self> {
        let col = Colligation { a, b, c, d };
        col.check_shapes()?;
        let colligation_defect = linalg::unitarity_defect(&col.block());
        if colligation_defect > TOL_UNITARY {
            return Err(Error::NotUnitaryColligation { defect: colligation_defect });
        }
        let state_radius = linalg::spectral_radius(&col.a);
        if state_radius >= 1.0 - STATE_RADIUS_MARGIN {
            return Err(Error::NotPureRealization { radius: state_radius });
        }
        let dim = col.io_dim();
        Self::certified(dim, Representation::Colligation(col.clone()), Some(col), state_radius, colligation_defect)
    }

    pub fn from_bp_factors(factors: Vec<BpFactor>) -> Result<Self> {
        let dim = factors
            .first()
            .map(|f| f.unitary.nrows())
            .ok_or_else(|| Error::InvalidInput("empty factor list".into()))?;
        for f in &factors {
            if f.unitary.nrows() != dim {
                return Err(Error::DimensionMismatch("factors of different sizes".into()));
            }
            f.validate()?;
        }
        let col = factors
            .iter()
            .map(BpFactor::colligation)
            .reduce(|acc, next| acc.cascade(&next))
            .expect("nonempty");
        let defect = linalg::unitarity_defect(&col.block());
        let radius = linalg::spectral_radius(&col.a);
        Self::certified(dim, Representation::BpProduct(factors), Some(col), radius, defect)
    }

    /// `b(z)·I_d` for the scalar Blaschke product with the given zeros
    /// (repetition is multiplicity).
    pub fn scalar_blaschke_times_identity(zeros: &[C64], d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        let col = if zeros.is_empty() {
            Colligation::constant(linalg::identity(d))
        } else {
            let factors: Vec<BpFactor> = zeros
                .iter()
                .map(|&a| BpFactor { zero: a, projection: linalg::identity(d), unitary: linalg::identity(d) })
                .collect();
            for f in &factors {
                f.validate()?;
            }
            factors.iter().map(BpFactor::colligation).reduce(|acc, n| acc.cascade(&n)).expect("nonempty")
        };
        let defect = linalg::unitarity_defect(&col.block());
        let radius = linalg::spectral_radius(&col.a);
        Self::certified(
            d,
            Representation::ScalarBlaschkeTimesIdentity { zeros: zeros.to_vec(), d },
            Some(col),
            radius,
            defect,
        )
    }

    pub fn from_blaschke(b: &BlaschkeProduct, d: usize) -> Result<Self> {
        let f = Self::scalar_blaschke_times_identity(&b.points_with_multiplicity(), d)?;
        let u = b.unimodular_constant();
        if (u - cr(1.0)).norm() == 0.0 {
            return Ok(f);
        }
        let mut col = f.realization.clone().expect("blaschke has realization");
        col.c *= u;
        col.d *= u;
        Self::from_colligation(col.a, col.b, col.c, col.d)
    }

    /// Polynomial matrix `Ψ(z) = [p_ij(z)]`; certified on the boundary grid
    /// and for interior pureness by sampling.
    pub fn from_polynomial_matrix(entries: Vec<Vec<Poly1>>) -> Result<Self> {
        let d = entries.len();
        if d == 0 || entries.iter().any(|row| row.len() != d) {
            return Err(Error::DimensionMismatch("polynomial matrix must be square and nonempty".into()));
        }
        let f = Self::certified(d, Representation::PolynomialMatrix(entries), None, 0.0, 0.0)?;
        for z in poly::disc_grid(16, 32) {
            let rho = linalg::spectral_radius(&f.eval(z)?);
            if rho > 1.0 - PURENESS_MARGIN {
                return Err(Error::NotPureRealization { radius: rho });
            }
        }
        Ok(f)
    }

    pub fn from_json_form(raw: PsiJson) -> Result<Self> {
        match raw {
            PsiJson::Colligation { a, mut b, mut c, d } => {
                // Row-major JSON cannot carry the column count of an empty
                // block; a zero-dimensional state space takes it from D.
                if a.nrows() == 0 && b.nrows() == 0 {
                    b = CMat::zeros(0, d.ncols());
                }
                if a.ncols() == 0 && c.ncols() == 0 {
                    c = CMat::zeros(d.nrows(), 0);
                }
                Self::from_colligation(a, b, c, d)
            }
            PsiJson::BpProduct { factors } => Self::from_bp_factors(factors),
            PsiJson::ScalarBlaschkeTimesIdentity { zeros, d } => Self::scalar_blaschke_times_identity(&zeros, d),
            PsiJson::PolynomialMatrix { entries } => Self::from_polynomial_matrix(entries),
        }
    }

    pub fn to_json_form(&self) -> PsiJson {
        match &self.repr {
            Representation::Colligation(c) => {
                PsiJson::Colligation { a: c.a.clone(), b: c.b.clone(), c: c.c.clone(), d: c.d.clone() }
            }
            Representation::BpProduct(f) => PsiJson::BpProduct { factors: f.clone() },
            Representation::ScalarBlaschkeTimesIdentity { zeros, d } => {
                PsiJson::ScalarBlaschkeTimesIdentity { zeros: zeros.clone(), d: *d }
            }
            Representation::PolynomialMatrix(e) => PsiJson::PolynomialMatrix { entries: e.clone() },
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    fn certified(
        dim: usize,
        repr: Representation,
        realization: Option<Colligation>,
        state_radius: f64,
        colligation_defect: f64,
    ) -> Result<Self> {
        if colligation_defect > TOL_UNITARY {
            return Err(Error::NotUnitaryColligation { defect: colligation_defect });
        }
        if state_radius >= 1.0 - STATE_RADIUS_MARGIN {
            return Err(Error::NotPureRealization { radius: state_radius });
        }
        let mut f = MatrixInnerFunction {
            dim,
            repr,
            realization,
            certificate: InnerCertificate { boundary_defect: 0.0, state_radius, colligation_defect },
        };
        let mut worst: f64 = 0.0;
        for z in poly::circle_grid(BOUNDARY_CERT_POINTS) {
            worst = worst.max(linalg::unitarity_defect(&f.eval(z)?));
        }
        if worst > TOL_UNITARY {
            return Err(Error::NotUnitaryColligation { defect: worst });
        }
        f.certificate.boundary_defect = worst;
        Ok(f)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn representation(&self) -> &Representation {
        &self.repr
    }

    /// Unitary realization, absent only for polynomial matrices.
    pub fn realization(&self) -> Option<&Colligation> {
        self.realization.as_ref()
    }

    pub fn certificate(&self) -> InnerCertificate {
        self.certificate
    }

    /// `Ψ(λ)`.
    pub fn eval(&self, z: C64) -> Result<CMat> {
        match &self.repr {
            Representation::BpProduct(factors) => {
                let mut acc = linalg::identity(self.dim);
                for f in factors {
                    acc *= f.eval(z)?;
                }
                Ok(acc)
            }
            Representation::PolynomialMatrix(e) => {
                Ok(CMat::from_fn(self.dim, self.dim, |i, j| e[i][j].eval(z)))
            }
            _ => self.realization.as_ref().expect("realization").eval(z),
        }
    }

    /// `(Ψ(λ), Ψ′(λ), …, Ψ^{(order)}(λ))`.
    pub fn eval_jet(&self, z: C64, order: usize) -> Result<Vec<CMat>> {
        match &self.repr {
            Representation::PolynomialMatrix(e) => {
                let mut cur: Vec<Vec<Poly1>> = e.clone();
                let mut out = Vec::with_capacity(order + 1);
                for _ in 0..=order {
                    out.push(CMat::from_fn(self.dim, self.dim, |i, j| cur[i][j].eval(z)));
                    cur = cur.iter().map(|row| row.iter().map(Poly1::derivative).collect()).collect();
                }
                Ok(out)
            }
            _ => self.realization.as_ref().expect("realization").jet(z, order),
        }
    }

    /// Taylor coefficients `Ψ^{(k)}(λ)/k!` for `k = 0..=order`.
    pub fn taylor_at(&self, z: C64, order: usize) -> Result<Vec<CMat>> {
        let jet = self.eval_jet(z, order)?;
        let mut fact = 1.0;
        Ok(jet
            .into_iter()
            .enumerate()
            .map(|(k, m)| {
                if k > 0 {
                    fact *= k as f64;
                }
                m * cr(1.0 / fact)
            })
            .collect())
    }

    /// Taylor coefficients at the origin, `count` of them.
    pub fn coefficients(&self, count: usize) -> Result<Vec<CMat>> {
        match &self.realization {
            Some(col) => Ok(col.markov(count)),
            None => {
                let Representation::PolynomialMatrix(e) = &self.repr else { unreachable!() };
                Ok((0..count)
                    .map(|k| {
                        CMat::from_fn(self.dim, self.dim, |i, j| e[i][j].coeffs().get(k).copied().unwrap_or_default())
                    })
                    .collect())
            }
        }
    }

    /// Eigenvalues of `Ψ(z)` with multiplicity.
    pub fn fiber(&self, z: C64) -> Result<Vec<C64>> {
        Ok(linalg::eigenvalues(&self.eval(z)?))
    }

    /// Defining polynomial of `{det(Ψ(z) − wI) = 0}`.
    ///
    /// For realized functions this is the determinant of the pencil
    /// `[[I − zA, zB], [−C, D − wI]] = det(I − zA)·det(Ψ(z) − wI)`, fitted on
    /// a tensor grid. `det(I − zA)` has its zeros at reciprocals of the
    /// eigenvalues of `A`, which are checked to lie outside the closed disc.
    pub fn variety_polynomial(&self) -> Result<VarietyDescription> {
        let d = self.dim;
        let (degz, values_fn): (usize, Box<dyn Fn(C64, C64) -> Result<C64>>) = match &self.realization {
            Some(col) => {
                let n = col.state_dim();
                let col = col.clone();
                (
                    n,
                    Box::new(move |z, w| {
                        let mut m = linalg::zeros(n + d, n + d);
                        m.view_mut((0, 0), (n, n)).copy_from(&(linalg::identity(n) - &col.a * z));
                        m.view_mut((0, n), (n, d)).copy_from(&(&col.b * z));
                        m.view_mut((n, 0), (d, n)).copy_from(&(-&col.c));
                        m.view_mut((n, n), (d, d)).copy_from(&(&col.d - linalg::identity(d) * w));
                        Ok(m.determinant())
                    }),
                )
            }
            None => {
                let Representation::PolynomialMatrix(e) = &self.repr else { unreachable!() };
                let maxdeg = e.iter().flatten().filter_map(Poly1::degree).max().unwrap_or(0);
                let me = self.clone();
                (
                    d * maxdeg,
                    Box::new(move |z, w| Ok((me.eval(z)? - linalg::identity(d) * w).determinant())),
                )
            }
        };
        let min_root = match &self.realization {
            Some(col) if col.state_dim() > 0 => {
                let rho = linalg::spectral_radius(&col.a);
                if rho == 0.0 {
                    f64::INFINITY
                } else {
                    1.0 / rho
                }
            }
            _ => f64::INFINITY,
        };
        if min_root <= 1.0 + STATE_RADIUS_MARGIN {
            return Err(Error::SpuriousFactorInDisc(min_root));
        }
        let (zn, wn) = poly::standard_nodes(degz, d);
        let mut values = linalg::zeros(zn.len(), wn.len());
        for (i, &z) in zn.iter().enumerate() {
            for (j, &w) in wn.iter().enumerate() {
                values[(i, j)] = values_fn(z, w)?;
            }
        }
        let fit = poly::fit_tensor_grid(&zn, &wn, &values)?;
        let p = fit.poly.chop(1e-12).normalize_unit();
        let (dz, dw) = p.bidegree();
        Ok(VarietyDescription {
            psi: self.clone(),
            p,
            degz: dz,
            degw: dw,
            fit_residual: fit.residual,
            min_denominator_root: min_root,
        })
    }
}

/// `V_Ψ` together with its defining polynomial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarietyDescription {
    pub psi: MatrixInnerFunction,
    pub p: Poly2,
    pub degz: usize,
    pub degw: usize,
    pub fit_residual: f64,
    /// Smallest modulus of a zero of the cleared denominator (`inf` if none).
    #[serde(with = "finite_or_null")]
    pub min_denominator_root: f64,
}

mod finite_or_null {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            Some(*x).serialize(s)
        } else {
            None::<f64>.serialize(s)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

impl VarietyDescription {
    /// Largest `|p(z, w)|/‖p‖₁` over `w ∈ fiber(z)` for the given `z` samples.
    pub fn consistency_defect(&self, zs: &[C64]) -> Result<f64> {
        let scale = self.p.l1_norm().max(f64::MIN_POSITIVE);
        let mut worst: f64 = 0.0;
        for &z in zs {
            for w in self.psi.fiber(z)? {
                worst = worst.max(self.p.eval(z, w).norm() / scale);
            }
        }
        Ok(worst)
    }
}

/// Disc sampling grid: `radii` rings of `angles` points each.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscGrid {
    pub radii: usize,
    pub angles: usize,
}

impl Default for DiscGrid {
    fn default() -> Self {
        DiscGrid { radii: 64, angles: 256 }
    }
}

impl DiscGrid {
    pub fn points(&self) -> Vec<C64> {
        poly::disc_grid(self.radii, self.angles)
    }
}

/// Checks that `V_Ψ` is a distinguished variety on sample grids: unimodular
/// boundary fibers, interior fibers in the open disc, and a witness point of
/// `V_Ψ ∩ D²`.
pub fn distinguished_certificate(psi: &MatrixInnerFunction, boundary_n: usize, disc: DiscGrid) -> Result<Entry> {
    let mut boundary_dev: f64 = 0.0;
    for z in poly::circle_grid(boundary_n) {
        for w in psi.fiber(z)? {
            boundary_dev = boundary_dev.max((w.norm() - 1.0).abs());
        }
    }
    let mut interior_max: f64 = 0.0;
    let mut witness: Option<(C64, C64)> = None;
    for z in disc.points() {
        for w in psi.fiber(z)? {
            interior_max = interior_max.max(w.norm());
            if witness.is_none() && w.norm() < 1.0 - PURENESS_MARGIN {
                witness = Some((z, w));
            }
        }
    }
    let a_ok = boundary_dev <= TOL_UNITARY;
    let b_ok = interior_max <= 1.0 - PURENESS_MARGIN;
    let c_ok = witness.is_some();
    let margin = (TOL_UNITARY - boundary_dev).min(1.0 - interior_max);
    let status = Status::from_bool(a_ok && b_ok && c_ok);
    let w = serde_json::json!({
        "boundary_unimodular": a_ok,
        "boundary_max_deviation": boundary_dev,
        "interior_in_open_disc": b_ok,
        "interior_max_modulus": interior_max,
        "meets_open_bidisc": c_ok,
        "witness": witness.map(|(z, w)| [json::c64_to_pair(z), json::c64_to_pair(w)]),
        "boundary_samples": boundary_n,
        "disc_grid": [disc.radii, disc.angles],
    });
    Ok(Entry::new(
        "distinguished_variety",
        "V_Psi meets D^2 and exits through the torus",
        status,
        margin,
    )
    .with_witnesses(w))
}

/// `[[0, z], [1, 0]]`, whose variety is `w² = z`.
pub fn sqrt_psi() -> MatrixInnerFunction {
    let o = cr(0.0);
    let i = cr(1.0);
    // State x = u_2; Ψ(z)u = (z u_2, u_1).
    MatrixInnerFunction::from_colligation(
        CMat::from_element(1, 1, o),
        CMat::from_row_slice(1, 2, &[o, i]),
        CMat::from_row_slice(2, 1, &[i, o]),
        CMat::from_row_slice(2, 2, &[o, o, i, o]),
    )
    .expect("[[0,z],[1,0]] is a unitary colligation")
}

/// Scalar `Ψ(z) = z`.
pub fn identity_symbol() -> MatrixInnerFunction {
    let z = CMat::from_element(1, 1, cr(0.0));
    let one = CMat::from_element(1, 1, cr(1.0));
    MatrixInnerFunction::from_colligation(z.clone(), one.clone(), one, z).expect("z is inner")
}
