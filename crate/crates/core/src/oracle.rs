//! Exact and brute-force reference implementations for small instances.
//!
//! Nothing here calls into the floating-point solver: elimination is a
//! separate routine over arbitrary-precision rationals, and the grid check
//! samples the cone directly.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::cone::{ConeInstance, ProjectionResult};
use crate::linalg::{Matrix, Support, Vector};

/// Arbitrary-precision rational, always in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

/// Largest `m` and `n` accepted by [`exact_farkas_decide`].
pub const MAX_EXACT_DECIDE: usize = 6;
/// Largest `n` accepted by [`exact_min_support`].
pub const MAX_EXACT_SUPPORT: usize = 12;
/// Largest `n` accepted by [`grid_projection_check`].
pub const MAX_GRID_COLUMNS: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("instance of size {m}x{n} exceeds the exhaustive-search cap of {cap}")]
    TooLarge { m: usize, n: usize, cap: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix dimensions must be positive")]
    EmptyDimension,
    #[error("value is not finite and has no exact rational form")]
    NonFinite,
    #[error("neither branch produced a certificate")]
    NoCertificate,
}

pub fn rational(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Exact value of a finite `f64`.
pub fn from_f64(x: f64) -> Result<Rational, OracleError> {
    Rational::from_float(x).ok_or(OracleError::NonFinite)
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Rational matrix stored by columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: usize,
    columns: Vec<Vec<Rational>>,
}

impl ExactMatrix {
    pub fn from_rows(rows: &[Vec<Rational>]) -> Result<Self, OracleError> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if m == 0 || n == 0 {
            return Err(OracleError::EmptyDimension);
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(OracleError::DimensionMismatch { expected: n, found: bad.len() });
        }
        let columns = (0..n).map(|j| rows.iter().map(|r| r[j].clone()).collect()).collect();
        Ok(Self { rows: m, columns })
    }

    pub fn from_columns(columns: Vec<Vec<Rational>>) -> Result<Self, OracleError> {
        let m = columns.first().map_or(0, Vec::len);
        if m == 0 {
            return Err(OracleError::EmptyDimension);
        }
        if let Some(bad) = columns.iter().find(|c| c.len() != m) {
            return Err(OracleError::DimensionMismatch { expected: m, found: bad.len() });
        }
        Ok(Self { rows: m, columns })
    }

    pub fn from_f64(a: &Matrix<f64>) -> Result<Self, OracleError> {
        let columns = a
            .columns()
            .map(|c| c.iter().map(|&x| from_f64(x)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_columns(columns)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &[Rational] {
        &self.columns[j]
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.columns[j][i]
    }

    pub fn mul_vec(&self, x: &[Rational]) -> Vec<Rational> {
        assert_eq!(x.len(), self.cols());
        let mut out = vec![Rational::zero(); self.rows];
        for (col, xj) in self.columns.iter().zip(x) {
            if xj.is_zero() {
                continue;
            }
            for (o, a) in out.iter_mut().zip(col) {
                *o += a * xj;
            }
        }
        out
    }

    pub fn tr_mul_vec(&self, y: &[Rational]) -> Vec<Rational> {
        self.columns.iter().map(|c| dot(c, y)).collect()
    }

    pub fn to_f64(&self) -> Matrix<f64> {
        let cols: Vec<Vec<f64>> = self.columns.iter().map(|c| c.iter().map(to_f64).collect()).collect();
        Matrix::from_columns(&cols).expect("finite conversion")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactInstance {
    pub a: ExactMatrix,
    pub b: Vec<Rational>,
}

impl ExactInstance {
    pub fn new(a: ExactMatrix, b: Vec<Rational>) -> Result<Self, OracleError> {
        if a.rows() != b.len() {
            return Err(OracleError::DimensionMismatch { expected: a.rows(), found: b.len() });
        }
        Ok(Self { a, b })
    }

    /// Exact rational image of a floating-point instance.
    pub fn from_f64(inst: &ConeInstance<f64>) -> Result<Self, OracleError> {
        let b = inst.b().iter().map(|&x| from_f64(x)).collect::<Result<Vec<_>, _>>()?;
        Self::new(ExactMatrix::from_f64(inst.a())?, b)
    }

    pub fn from_i64(columns: &[&[i64]], b: &[i64]) -> Result<Self, OracleError> {
        let cols = columns.iter().map(|c| c.iter().map(|&x| int(x)).collect()).collect();
        Self::new(ExactMatrix::from_columns(cols)?, b.iter().map(|&x| int(x)).collect())
    }

    pub fn to_f64(&self) -> ConeInstance<f64> {
        let b = Vector::new(self.b.iter().map(to_f64).collect()).expect("finite conversion");
        ConeInstance::new(self.a.to_f64(), b).expect("dimensions agree")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExactCertificate {
    Membership { x: Vec<Rational> },
    Separation { y: Vec<Rational> },
}

impl ExactCertificate {
    pub fn is_membership(&self) -> bool {
        matches!(self, ExactCertificate::Membership { .. })
    }
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

enum Solve {
    Unique(Vec<Rational>),
    Inconsistent,
    Dependent,
}

/// Gaussian elimination on `[C | rhs]` with `C` given by columns.
fn solve_columns(columns: &[&[Rational]], rhs: &[Rational]) -> Solve {
    let k = columns.len();
    let m = rhs.len();
    let mut rows: Vec<Vec<Rational>> = (0..m)
        .map(|i| {
            let mut r: Vec<Rational> = columns.iter().map(|c| c[i].clone()).collect();
            r.push(rhs[i].clone());
            r
        })
        .collect();
    let mut pivot_row = 0;
    for col in 0..k {
        let Some(p) = (pivot_row..m).find(|&r| !rows[r][col].is_zero()) else {
            return Solve::Dependent;
        };
        rows.swap(pivot_row, p);
        let inv = rows[pivot_row][col].recip();
        for e in rows[pivot_row].iter_mut().skip(col) {
            *e *= &inv;
        }
        for r in 0..m {
            if r == pivot_row || rows[r][col].is_zero() {
                continue;
            }
            let factor = rows[r][col].clone();
            for c in col..=k {
                let delta = &factor * &rows[pivot_row][c];
                rows[r][c] -= delta;
            }
        }
        pivot_row += 1;
    }
    if rows[k..].iter().any(|r| !r[k].is_zero()) {
        return Solve::Inconsistent;
    }
    Solve::Unique(rows[..k].iter().map(|r| r[k].clone()).collect())
}

fn exact_rank(vectors: &[&[Rational]]) -> usize {
    let Some(first) = vectors.first() else { return 0 };
    let m = first.len();
    let mut rows: Vec<Vec<Rational>> =
        (0..m).map(|i| vectors.iter().map(|v| v[i].clone()).collect()).collect();
    let mut rank = 0;
    for col in 0..vectors.len() {
        let Some(p) = (rank..m).find(|&r| !rows[r][col].is_zero()) else { continue };
        rows.swap(rank, p);
        for r in rank + 1..m {
            if rows[r][col].is_zero() {
                continue;
            }
            let factor = &rows[r][col] / &rows[rank][col];
            for c in col..vectors.len() {
                let delta = &factor * &rows[rank][c];
                rows[r][c] -= delta;
            }
        }
        rank += 1;
    }
    rank
}

fn check_decide_size(inst: &ExactInstance) -> Result<(), OracleError> {
    let (m, n) = (inst.a.rows(), inst.a.cols());
    if m > MAX_EXACT_DECIDE || n > MAX_EXACT_DECIDE {
        return Err(OracleError::TooLarge { m, n, cap: MAX_EXACT_DECIDE });
    }
    Ok(())
}

/// `x ≥ 0` with `Ax = b`, searched over supports with independent columns.
pub fn exact_membership(inst: &ExactInstance) -> Result<Option<Vec<Rational>>, OracleError> {
    check_decide_size(inst)?;
    let n = inst.a.cols();
    if inst.b.iter().all(Zero::is_zero) {
        return Ok(Some(vec![Rational::zero(); n]));
    }
    for size in 1..=n.min(inst.a.rows()) {
        for s in Support::combinations(n, size) {
            let cols: Vec<&[Rational]> = s.iter().map(|j| inst.a.column(j)).collect();
            if let Solve::Unique(xs) = solve_columns(&cols, &inst.b) {
                if xs.iter().all(|x| !x.is_negative()) {
                    let mut x = vec![Rational::zero(); n];
                    for (j, v) in s.iter().zip(xs) {
                        x[j] = v;
                    }
                    return Ok(Some(x));
                }
            }
        }
    }
    Ok(None)
}

/// `y` with `Aᵀy ≥ 0` and `⟨b, y⟩ = −1`, found as a vertex of that
/// polyhedron restricted to `span(a₁, …, aₙ, b)`.
pub fn exact_separation(inst: &ExactInstance) -> Result<Option<Vec<Rational>>, OracleError> {
    check_decide_size(inst)?;
    let n = inst.a.cols();
    if inst.b.iter().all(Zero::is_zero) {
        return Ok(None);
    }

    // Basis of W = span(columns, b), chosen greedily in order.
    let mut basis: Vec<&[Rational]> = Vec::new();
    for v in (0..n).map(|j| inst.a.column(j)).chain(std::iter::once(inst.b.as_slice())) {
        basis.push(v);
        if exact_rank(&basis) < basis.len() {
            basis.pop();
        }
    }
    let r = basis.len();

    // Constraints in coordinates y = Σ η_j basis_j.
    let g: Vec<Vec<Rational>> =
        (0..n).map(|i| basis.iter().map(|bj| dot(inst.a.column(i), bj)).collect()).collect();
    let h_neg: Vec<Rational> = basis.iter().map(|bj| -dot(&inst.b, bj)).collect();

    // A vertex has the b-constraint tight plus r − 1 tight generator constraints.
    for tight in Support::combinations(n, r - 1) {
        // Solve the r x r system whose rows are g_i (i in tight) and -h.
        let mut system_rows: Vec<&[Rational]> = tight.iter().map(|i| g[i].as_slice()).collect();
        system_rows.push(&h_neg);
        let columns: Vec<Vec<Rational>> =
            (0..r).map(|c| system_rows.iter().map(|row| row[c].clone()).collect()).collect();
        let col_refs: Vec<&[Rational]> = columns.iter().map(Vec::as_slice).collect();
        let mut rhs = vec![Rational::zero(); r];
        rhs[r - 1] = Rational::one();
        let Solve::Unique(eta) = solve_columns(&col_refs, &rhs) else { continue };
        if g.iter().all(|gi| !dot(gi, &eta).is_negative()) {
            let mut y = vec![Rational::zero(); inst.a.rows()];
            for (e, bj) in eta.iter().zip(&basis) {
                for (yi, bi) in y.iter_mut().zip(bj.iter()) {
                    *yi += e * bi;
                }
            }
            return Ok(Some(y));
        }
    }
    Ok(None)
}

/// Exact Farkas decision for `m, n ≤ 6`.
pub fn exact_farkas_decide(inst: &ExactInstance) -> Result<ExactCertificate, OracleError> {
    if let Some(x) = exact_membership(inst)? {
        return Ok(ExactCertificate::Membership { x });
    }
    match exact_separation(inst)? {
        Some(y) => Ok(ExactCertificate::Separation { y }),
        None => Err(OracleError::NoCertificate),
    }
}

/// Zero-tolerance check of an exact certificate.
pub fn verify_exact(inst: &ExactInstance, cert: &ExactCertificate) -> bool {
    match cert {
        ExactCertificate::Membership { x } => {
            x.len() == inst.a.cols()
                && x.iter().all(|v| !v.is_negative())
                && inst.a.mul_vec(x) == inst.b
        }
        ExactCertificate::Separation { y } => {
            y.len() == inst.a.rows()
                && inst.a.tr_mul_vec(y).iter().all(|g| !g.is_negative())
                && dot(&inst.b, y).is_negative()
        }
    }
}

/// Minimum number of nonzero entries of any `z ≥ 0` with `Az = Ax`.
pub fn exact_min_support(a: &ExactMatrix, x: &[Rational]) -> Result<usize, OracleError> {
    let n = a.cols();
    if n > MAX_EXACT_SUPPORT {
        return Err(OracleError::TooLarge { m: a.rows(), n, cap: MAX_EXACT_SUPPORT });
    }
    if x.len() != n {
        return Err(OracleError::DimensionMismatch { expected: n, found: x.len() });
    }
    let target = a.mul_vec(x);
    if target.iter().all(Zero::is_zero) {
        return Ok(0);
    }
    // A minimum support has independent columns, so the representation on
    // it is unique and strictly positive.
    for size in 1..=n.min(a.rows()) {
        for s in Support::combinations(n, size) {
            let cols: Vec<&[Rational]> = s.iter().map(|j| a.column(j)).collect();
            if let Solve::Unique(z) = solve_columns(&cols, &target) {
                if z.iter().all(Signed::is_positive) {
                    return Ok(size);
                }
            }
        }
    }
    unreachable!("x itself reduces to an independent positive representation")
}

/// Brute-force check of a projection: the reported point, coefficients and
/// distance must be mutually consistent, and no point `Ag` on the grid
/// `g ∈ {0, h, …, R}ⁿ` with `R = 2(‖b‖ + δ + 1) / min_j ‖a_j‖` may be closer to
/// `b` than the reported distance.
pub fn grid_projection_check(
    inst: &ConeInstance<f64>,
    result: &ProjectionResult<f64>,
    steps: usize,
) -> Result<bool, OracleError> {
    let a = inst.a();
    let b = inst.b();
    let n = a.cols();
    if n > MAX_GRID_COLUMNS {
        return Err(OracleError::TooLarge { m: a.rows(), n, cap: MAX_GRID_COLUMNS });
    }
    if result.coeffs.len() != n || result.point.len() != a.rows() {
        return Ok(false);
    }
    let delta = result.distance;
    let slack = 1e-9 * (1.0 + b.norm() + result.coeffs.norm() * a.max_abs());
    if result.coeffs.iter().any(|&x| x < -slack)
        || a.mul_vec(&result.coeffs).sub(&result.point).norm() > slack
        || (result.point.sub(b).norm() - delta).abs() > slack
    {
        return Ok(false);
    }

    let min_norm = (0..n).map(|j| a.column_norm(j)).filter(|&c| c > 0.0).fold(f64::INFINITY, f64::min);
    if !min_norm.is_finite() {
        return Ok((b.norm() - delta).abs() <= slack);
    }
    let radius = 2.0 * (b.norm() + delta + 1.0) / min_norm;
    let steps = steps.max(1);
    let h = radius / steps as f64;
    let noise = 1e-9 * (1.0 + b.norm());

    let mut idx = vec![0usize; n];
    let mut g = vec![0.0f64; n];
    loop {
        for (gi, &k) in g.iter_mut().zip(&idx) {
            *gi = h * k as f64;
        }
        let mut r: Vec<f64> = b.iter().map(|&x| -x).collect();
        for (j, &gj) in g.iter().enumerate() {
            for (ri, &aij) in r.iter_mut().zip(a.column(j)) {
                *ri += aij * gj;
            }
        }
        let dist = r.iter().map(|x| x * x).sum::<f64>().sqrt();
        if dist < delta - noise {
            return Ok(false);
        }
        // odometer
        let mut pos = 0;
        while pos < n {
            idx[pos] += 1;
            if idx[pos] <= steps {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
        if pos == n {
            break;
        }
    }
    Ok(true)
}

/// Parses `"p/q"`, an integer, or a finite decimal (optionally with an
/// exponent) into an exact rational.
pub fn parse_rational(text: &str) -> Option<Rational> {
    if let Some((p, q)) = text.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(Rational::new(p, q));
    }
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all: BigInt = format!("{int_part}{frac_part}").parse().unwrap_or_else(|_| BigInt::zero());
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from_u8(10).expect("ten");
    let mut q = Rational::from_integer(all);
    let factor = Rational::from_integer(num_traits::pow(ten, scale.unsigned_abs() as usize));
    if scale >= 0 {
        q *= factor;
    } else {
        q /= factor;
    }
    Some(if neg { -q } else { q })
}
