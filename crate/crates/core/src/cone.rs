//! Projection onto a finitely generated cone `K = {Ax : x ≥ 0}`, the Farkas
//! decision built on it, and independent certificate checkers.
//!
//! The nearest point `v` of `K` to `b` is found by an active-set nonnegative
//! least-squares solve. If `v` coincides with `b` (up to tolerance) the
//! coefficients are a membership certificate; otherwise `y = v − b` satisfies
//! `Aᵀy ≥ 0` and `⟨b, y⟩ = −‖y‖² < 0` and separates `b` from `K`.

use std::fmt;

use thiserror::Error;

use crate::linalg::{self, LinalgError, Matrix, Support, Vector};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ConeError {
    #[error("dimension mismatch: A has {rows} rows but b has {len} entries")]
    DimensionMismatch { rows: usize, len: usize },
    #[error("active-set limit of {limit} pivots exceeded")]
    IterationLimit { limit: usize },
    #[error("non-finite value encountered")]
    NonFinite,
    #[error("tolerance must be positive and finite")]
    BadTolerance,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// The pair `(A, b)`: generators of `K` as columns of `A` and the query `b`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConeInstance<T> {
    a: Matrix<T>,
    b: Vector<T>,
}

impl<T: Real> ConeInstance<T> {
    pub fn new(a: Matrix<T>, b: Vector<T>) -> Result<Self, ConeError> {
        if a.rows() != b.len() {
            return Err(ConeError::DimensionMismatch { rows: a.rows(), len: b.len() });
        }
        Ok(Self { a, b })
    }

    /// Convenience constructor from column slices.
    pub fn from_columns_f64(columns: &[&[f64]], b: &[f64]) -> Result<Self, ConeError> {
        Self::new(Matrix::from_columns_f64(columns)?, Vector::from_f64(b)?)
    }

    pub fn a(&self) -> &Matrix<T> {
        &self.a
    }

    pub fn b(&self) -> &Vector<T> {
        &self.b
    }

    /// Ambient dimension `m`.
    pub fn rows(&self) -> usize {
        self.a.rows()
    }

    /// Number of generators `n`.
    pub fn cols(&self) -> usize {
        self.a.cols()
    }

    /// Same generators, different query point.
    pub fn with_b(&self, b: Vector<T>) -> Result<Self, ConeError> {
        Self::new(self.a.clone(), b)
    }

    pub fn default_tol(&self) -> T {
        linalg::default_tol(&self.a, &self.b)
    }

    /// Distance threshold below which `b` is classified as a member:
    /// `tol · (1 + ‖b‖)`.
    pub fn member_tol(&self, tol: T) -> T {
        tol * (T::one() + self.b.norm())
    }
}

/// Nearest point of `K` to `b` with its coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectionResult<T> {
    /// `x* ≥ 0`, zero off the final active set.
    pub coeffs: Vector<T>,
    /// `v = A x*`.
    pub point: Vector<T>,
    /// `δ = ‖v − b‖`.
    pub distance: T,
    /// Number of active-set pivots (insertions plus removals).
    pub iterations: usize,
}

impl<T: Real> ProjectionResult<T> {
    /// Largest violation of the optimality conditions: negativity of
    /// `Aᵀ(v − b)`, complementarity `x_i · (Aᵀ(v − b))_i`, and `x ≥ 0`.
    pub fn kkt_residual(&self, inst: &ConeInstance<T>) -> T {
        let y = self.point.sub(inst.b());
        let g = inst.a().tr_mul_vec(&y);
        let mut worst = T::zero();
        for (&gi, &xi) in g.iter().zip(self.coeffs.iter()) {
            worst = worst.max(-gi).max(-xi);
            if xi > T::zero() {
                worst = worst.max(gi.abs());
            }
        }
        worst
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MembershipCertificate<T> {
    pub x: Vector<T>,
    pub residual: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeparationCertificate<T> {
    pub y: Vector<T>,
    pub delta: T,
    /// `Aᵀy`
    pub margins: Vector<T>,
    /// `⟨b, y⟩`
    pub bmargin: T,
}

impl<T: Real> SeparationCertificate<T> {
    /// Builds the certificate fields for a given `y` against `inst`.
    pub fn for_vector(inst: &ConeInstance<T>, y: Vector<T>) -> Self {
        let margins = inst.a().tr_mul_vec(&y);
        let bmargin = inst.b().dot(&y);
        let delta = y.norm();
        Self { y, delta, margins, bmargin }
    }

    /// `y / ‖y‖`; the emitted certificate keeps `‖y‖ = δ`.
    pub fn unit_normal(&self) -> Vector<T> {
        let n = self.y.norm();
        if n.is_zero() {
            self.y.clone()
        } else {
            self.y.scale(T::one() / n)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Branch {
    Membership,
    Separation,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::Membership => "membership",
            Branch::Separation => "separation",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Certificate<T> {
    Membership(MembershipCertificate<T>),
    Separation(SeparationCertificate<T>),
}

impl<T> Certificate<T> {
    pub fn branch(&self) -> Branch {
        match self {
            Certificate::Membership(_) => Branch::Membership,
            Certificate::Separation(_) => Branch::Separation,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FarkasResult<T> {
    pub certificate: Certificate<T>,
    pub projection: ProjectionResult<T>,
    /// Set when `δ` lies in `(member_tol, 10 · member_tol]`.
    pub borderline: bool,
}

impl<T> FarkasResult<T> {
    pub fn branch(&self) -> Branch {
        self.certificate.branch()
    }
}

/// Why a certificate check failed.
#[derive(Clone, Debug, PartialEq)]
pub enum Rejection {
    DimensionMismatch { expected: usize, found: usize },
    NegativeCoefficient { index: usize, value: f64 },
    Residual { residual: f64, bound: f64 },
    DualInfeasible { index: usize, margin: f64 },
    NotSeparating { bmargin: f64, bound: f64 },
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rejection::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Rejection::NegativeCoefficient { index, value } => {
                write!(f, "negative coefficient x[{index}] = {value}")
            }
            Rejection::Residual { residual, bound } => {
                write!(f, "residual {residual} exceeds {bound}")
            }
            Rejection::DualInfeasible { index, margin } => {
                write!(f, "<a_{index}, y> = {margin} is negative")
            }
            Rejection::NotSeparating { bmargin, bound } => {
                write!(f, "<b, y> = {bmargin} is not below {bound}")
            }
        }
    }
}

/// Outcome of a pure certificate check.
#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    Accepted,
    Rejected(Rejection),
}

impl Verdict {
    pub fn is_accepted(&self) -> bool {
        matches!(self, Verdict::Accepted)
    }

    pub fn rejection(&self) -> Option<&Rejection> {
        match self {
            Verdict::Accepted => None,
            Verdict::Rejected(r) => Some(r),
        }
    }
}

fn check_tol<T: Real>(tol: T) -> Result<(), ConeError> {
    if tol > T::zero() && tol.is_finite() {
        Ok(())
    } else {
        Err(ConeError::BadTolerance)
    }
}

/// Nearest point of `K` to `b` by Lawson–Hanson active-set NNLS.
///
/// Entering variables are chosen by largest dual value `(Aᵀ(b − Ax))_j`,
/// ties to the smallest index; the step-back removes the blocking index of
/// smallest position first. A candidate whose column is numerically
/// dependent on the active set, or whose trial coefficient is not positive,
/// is skipped until the iterate next changes.
pub fn project_onto_cone<T: Real>(
    inst: &ConeInstance<T>,
    tol: T,
) -> Result<ProjectionResult<T>, ConeError> {
    check_tol(tol)?;
    let a = inst.a();
    let b = inst.b();
    let n = a.cols();
    let limit = 10 * n * (n + 1);
    let hundred = T::lit(100.0);

    let dual_tol: Vec<T> = (0..n)
        .map(|j| T::lit(0.01) * tol.min(T::tol_base() * (T::one() + a.column_norm(j))))
        .collect();

    let mut x = Vector::zeros(n);
    let mut active = Support::empty(n);
    let mut blocked = vec![false; n];
    let mut pivots = 0usize;

    'outer: loop {
        let residual = b.sub(&a.mul_vec(&x));
        let w = a.tr_mul_vec(&residual);

        let mut entering: Option<usize> = None;
        for j in 0..n {
            if active.contains(j) || blocked[j] || w[j] <= dual_tol[j] {
                continue;
            }
            if entering.is_none_or(|e| w[j] > w[e]) {
                entering = Some(j);
            }
        }
        let Some(j) = entering else { break };

        pivots += 1;
        if pivots > limit {
            return Err(ConeError::IterationLimit { limit });
        }
        active.insert(j);
        let mut first = true;

        loop {
            let z = match linalg::lstsq_on_support(a, b, &active, tol) {
                Ok(z) => z,
                Err(LinalgError::RankDeficient { .. }) if first => {
                    active.remove(j);
                    blocked[j] = true;
                    continue 'outer;
                }
                Err(e) => return Err(e.into()),
            };
            if first && z[j] <= T::zero() {
                active.remove(j);
                blocked[j] = true;
                continue 'outer;
            }
            first = false;

            if active.iter().all(|i| z[i] > T::zero()) {
                x = z;
                break;
            }

            // Step back towards z until the first coefficient hits zero.
            let mut alpha = T::infinity();
            let mut blocking = usize::MAX;
            for i in active.iter() {
                if z[i] <= T::zero() {
                    let ratio = x[i] / (x[i] - z[i]);
                    if ratio < alpha {
                        alpha = ratio;
                        blocking = i;
                    }
                }
            }
            x = x.axpy(alpha, &z.sub(&x));
            let floor = hundred * T::epsilon() * x.norm_inf();
            let dropped: Vec<usize> =
                active.iter().filter(|&i| i == blocking || x[i] <= floor).collect();
            for &i in &dropped {
                x.as_mut_slice()[i] = T::zero();
                active.remove(i);
            }
            pivots += dropped.len();
            if pivots > limit {
                return Err(ConeError::IterationLimit { limit });
            }
            if active.is_empty() {
                break;
            }
        }
        blocked.iter_mut().for_each(|f| *f = false);
    }

    let point = a.mul_vec(&x);
    let distance = point.sub(b).norm();
    if !distance.is_finite() || x.iter().any(|v| !v.is_finite()) {
        return Err(ConeError::NonFinite);
    }
    Ok(ProjectionResult { coeffs: x, point, distance, iterations: pivots })
}

/// Decides `b ∈ K` versus separation and returns the matching certificate.
///
/// Membership iff `δ ≤ tol · (1 + ‖b‖)`. The separating vector is `y = v − b`
/// without rescaling, so `‖y‖ = δ` and `−⟨b, y⟩ ≥ δ²`.
pub fn farkas_decide<T: Real>(
    inst: &ConeInstance<T>,
    tol: T,
) -> Result<FarkasResult<T>, ConeError> {
    check_tol(tol)?;
    let n = inst.cols();
    let m = inst.rows();

    if inst.b().is_zero() {
        let zero = Vector::zeros(n);
        return Ok(FarkasResult {
            certificate: Certificate::Membership(MembershipCertificate {
                x: zero.clone(),
                residual: T::zero(),
            }),
            projection: ProjectionResult {
                coeffs: zero,
                point: Vector::zeros(m),
                distance: T::zero(),
                iterations: 0,
            },
            borderline: false,
        });
    }

    let projection = project_onto_cone(inst, tol)?;
    let member_tol = inst.member_tol(tol);
    let delta = projection.distance;
    let borderline = delta > member_tol && delta <= T::lit(10.0) * member_tol;

    let certificate = if delta <= member_tol {
        let residual = inst.a().mul_vec(&projection.coeffs).sub(inst.b()).norm();
        Certificate::Membership(MembershipCertificate { x: projection.coeffs.clone(), residual })
    } else {
        let y = projection.point.sub(inst.b());
        let mut cert = SeparationCertificate::for_vector(inst, y);
        cert.delta = delta;
        Certificate::Separation(cert)
    };
    Ok(FarkasResult { certificate, projection, borderline })
}

/// Accepts iff `x ≥ −tol` entrywise and `‖Ax − b‖ ≤ tol · (1 + ‖b‖)`.
pub fn verify_membership<T: Real>(
    inst: &ConeInstance<T>,
    cert: &MembershipCertificate<T>,
    tol: T,
) -> Verdict {
    let x = &cert.x;
    if x.len() != inst.cols() {
        return Verdict::Rejected(Rejection::DimensionMismatch {
            expected: inst.cols(),
            found: x.len(),
        });
    }
    if let Some((index, &value)) = x.iter().enumerate().find(|(_, &v)| v < -tol) {
        return Verdict::Rejected(Rejection::NegativeCoefficient {
            index,
            value: value.to_f64_lossy(),
        });
    }
    let residual = inst.a().mul_vec(x).sub(inst.b()).norm();
    let bound = inst.member_tol(tol);
    if residual > bound {
        return Verdict::Rejected(Rejection::Residual {
            residual: residual.to_f64_lossy(),
            bound: bound.to_f64_lossy(),
        });
    }
    Verdict::Accepted
}

/// Accepts iff `Aᵀy ≥ −tol` entrywise and `⟨b, y⟩ < −tol`. Only `cert.y` is
/// consulted; the stored margins are recomputed.
pub fn verify_separation<T: Real>(
    inst: &ConeInstance<T>,
    cert: &SeparationCertificate<T>,
    tol: T,
) -> Verdict {
    let y = &cert.y;
    if y.len() != inst.rows() {
        return Verdict::Rejected(Rejection::DimensionMismatch {
            expected: inst.rows(),
            found: y.len(),
        });
    }
    let margins = inst.a().tr_mul_vec(y);
    if let Some((index, &margin)) = margins.iter().enumerate().find(|(_, &g)| g < -tol) {
        return Verdict::Rejected(Rejection::DualInfeasible {
            index,
            margin: margin.to_f64_lossy(),
        });
    }
    let bmargin = inst.b().dot(y);
    if bmargin >= -tol {
        return Verdict::Rejected(Rejection::NotSeparating {
            bmargin: bmargin.to_f64_lossy(),
            bound: (-tol).to_f64_lossy(),
        });
    }
    Verdict::Accepted
}

/// Checks whichever certificate `result` carries.
pub fn verify_result<T: Real>(inst: &ConeInstance<T>, result: &FarkasResult<T>, tol: T) -> Verdict {
    match &result.certificate {
        Certificate::Membership(c) => verify_membership(inst, c, tol),
        Certificate::Separation(c) => verify_separation(inst, c, tol),
    }
}

/// `⟨w, v − b⟩`, the one-sided derivative at `λ = 0⁺` of
/// `(‖y + λw‖² − ‖y‖²) / 2λ` with `y = v − b`. Nonnegative for every
/// direction `w` that keeps `v + λw` inside `K` when `v` is the projection.
pub fn directional_derivative_check<T: Real>(v: &Vector<T>, b: &Vector<T>, w: &Vector<T>) -> T {
    w.dot(&v.sub(b))
}
