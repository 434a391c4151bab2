//! Limits of convergent sequences in `K` stay in `K`, constructively.
//!
//! Given terms `v_k = A x_k` converging to `v`, each term is rewritten as
//! `λ_k · A u_k` with `u_k` optimal. Finitely many supports exist, so one
//! support `S` recurs along a subsequence; on it `u_k` converges to the
//! normalized least-squares representation `u` of `v` over the columns of
//! `S`. Because the columns of `S` are independent, `Au ≠ 0`, hence
//! `λ_k → ‖v‖ / ‖Au‖ =: λ` and `v = λ·Au ∈ K`.

use std::collections::HashMap;

use crate::cone::{self, ConeInstance, MembershipCertificate, Verdict};
use crate::decomposition::{self, DecompositionError, Mode};
use crate::linalg::{self, Matrix, Support, Vector};
use crate::rng::SplitMix64;
use crate::scalar::Real;

/// Coefficient sequence `x_k = s_k · (x∞ + d / k)` with `s_k = s∞ + σ / k`,
/// so `v_k = A x_k → s∞ · A x∞`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergentFamily<T> {
    pub a: Matrix<T>,
    pub limit_coeffs: Vector<T>,
    pub drift: Vector<T>,
    pub scale_limit: T,
    pub scale_drift: T,
}

impl<T: Real> ConvergentFamily<T> {
    /// Random family with entries of `A` in `[-1, 1]`. About one family in
    /// twenty converges to the origin.
    pub fn random(rng: &mut SplitMix64, m: usize, n: usize) -> Self {
        let entries: Vec<T> = (0..m * n).map(|_| T::lit(rng.uniform(-1.0, 1.0))).collect();
        let a = Matrix::from_row_major(m, n, &entries).expect("positive dimensions");
        let to_origin = rng.chance(0.05);
        let limit: Vec<T> = (0..n)
            .map(|_| {
                if to_origin || rng.chance(0.4) {
                    T::zero()
                } else {
                    T::lit(rng.uniform(0.0, 1.0))
                }
            })
            .collect();
        let drift: Vec<T> = (0..n)
            .map(|_| if rng.chance(0.3) { T::zero() } else { T::lit(rng.uniform(0.0, 1.0)) })
            .collect();
        Self {
            a,
            limit_coeffs: Vector::from_vec(limit),
            drift: Vector::from_vec(drift),
            scale_limit: T::lit(rng.uniform(0.5, 2.0)),
            scale_drift: T::lit(rng.uniform(-0.4, 0.4)),
        }
    }

    /// Coefficients of term `k ≥ 1`.
    pub fn coeffs(&self, k: usize) -> Vector<T> {
        let inv = T::one() / T::from_usize(k).expect("term index");
        let s = self.scale_limit + self.scale_drift * inv;
        self.limit_coeffs.axpy(inv, &self.drift).scale(s)
    }

    pub fn term(&self, k: usize) -> Vector<T> {
        self.a.mul_vec(&self.coeffs(k))
    }

    pub fn limit(&self) -> Vector<T> {
        self.a.mul_vec(&self.limit_coeffs).scale(self.scale_limit)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClosednessReport<T> {
    /// Support shared by the extracted subsequence.
    pub support: Support,
    /// Positions (1-based) in the term list of the subsequence.
    pub subsequence: Vec<usize>,
    /// Limit of the optimal vectors along the subsequence.
    pub u: Vector<T>,
    /// `‖Au‖`, positive by independence of the support columns.
    pub au_norm: T,
    /// `‖v‖ / ‖Au‖`.
    pub lambda: T,
    /// `|λ_k − λ|` at the last subsequence term.
    pub lambda_gap: T,
    /// `λ·u`, a membership certificate for the limit.
    pub certificate: MembershipCertificate<T>,
    pub verdict: Verdict,
}

/// Unit-norm `z ≥ 0` on `support` with `A z ∥ limit`, from least squares;
/// `None` if the fit has an entry below `−tol·(1 + ‖z‖_∞)`.
fn nonnegative_direction<T: Real>(
    a: &Matrix<T>,
    limit: &Vector<T>,
    support: &Support,
    tol: T,
) -> Option<Vector<T>> {
    let z = linalg::lstsq_on_support(a, limit, support, tol).ok()?;
    let floor = -decomposition::support_threshold(&z, tol);
    if z.iter().any(|&zi| zi < floor) {
        return None;
    }
    let z = Vector::from_vec(z.iter().map(|&zi| zi.max(T::zero())).collect());
    let nz = z.norm();
    if nz.is_zero() {
        None
    } else {
        Some(z.scale(T::one() / nz))
    }
}

/// Recovers `v = λ·Au` from coefficient terms `x_1, …, x_K` whose images
/// converge to `limit`, and checks the certificate `λu` at `verify_tol`.
pub fn recover_limit<T: Real>(
    a: &Matrix<T>,
    terms: &[Vector<T>],
    limit: &Vector<T>,
    tol: T,
    verify_tol: T,
) -> Result<ClosednessReport<T>, DecompositionError> {
    assert!(!terms.is_empty(), "need at least one term");
    let decomps = terms
        .iter()
        .map(|x| decomposition::optimalize(a, x, Mode::Heuristic, tol))
        .collect::<Result<Vec<_>, _>>()?;

    // Tail supports by frequency, ties to the one seen last. The first whose
    // least-squares representation of the limit is nonnegative is the
    // recurring support; a support that only looks recurrent because the
    // sequence has not settled yet fails that test.
    let tail_start = decomps.len() / 2;
    let mut counts: HashMap<&Support, (usize, usize)> = HashMap::new();
    for (k, d) in decomps.iter().enumerate().skip(tail_start) {
        let e = counts.entry(&d.support).or_insert((0, k));
        e.0 += 1;
        e.1 = k;
    }
    let mut candidates: Vec<(&Support, (usize, usize))> = counts.into_iter().collect();
    candidates.sort_by_key(|&(_, (count, last))| std::cmp::Reverse((count, last)));

    let limit_zero = limit.norm() <= tol;
    let mut chosen = None;
    for (support, _) in &candidates {
        if limit_zero || support.is_empty() {
            break;
        }
        if let Some(u) = nonnegative_direction(a, limit, support, tol) {
            chosen = Some(((*support).clone(), Some(u)));
            break;
        }
    }
    let (support, fitted) = chosen.unwrap_or_else(|| (candidates[0].0.clone(), None));
    let subsequence: Vec<usize> = (tail_start..decomps.len())
        .filter(|&k| decomps[k].support == support)
        .collect();
    let last = &decomps[*subsequence.last().expect("non-empty subsequence")];
    let u = fitted.unwrap_or_else(|| last.u.clone());
    let au_norm = a.mul_vec(&u).norm();
    let lambda = if au_norm.is_zero() { T::zero() } else { limit.norm() / au_norm };
    let lambda_gap = (last.lambda - lambda).abs();
    let x = u.scale(lambda);
    let inst = ConeInstance::new(a.clone(), limit.clone())?;
    let residual = a.mul_vec(&x).sub(limit).norm();
    let certificate = MembershipCertificate { x, residual };
    let verdict = cone::verify_membership(&inst, &certificate, verify_tol);
    Ok(ClosednessReport {
        support,
        subsequence: subsequence.into_iter().map(|k| k + 1).collect(),
        u,
        au_norm,
        lambda,
        lambda_gap,
        certificate,
        verdict,
    })
}

/// Index of the `j`-th sampled term (`j ≥ 1`): `k_j = 2^(j−1)`, capped at
/// `2^52`. A subsequence has the same limit, and the geometric schedule
/// reaches the tail where the optimal supports have settled.
pub fn term_index(j: usize) -> usize {
    1usize << (j - 1).min(52).min(usize::BITS as usize - 2)
}

/// Runs [`recover_limit`] on the terms `k_1, …, k_terms` of `family`
/// (see [`term_index`]).
pub fn check_family<T: Real>(
    family: &ConvergentFamily<T>,
    terms: usize,
    tol: T,
    verify_tol: T,
) -> Result<ClosednessReport<T>, DecompositionError> {
    let xs: Vec<Vector<T>> = (1..=terms).map(|j| family.coeffs(term_index(j))).collect();
    recover_limit(&family.a, &xs, &family.limit(), tol, verify_tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn face_limit_is_recovered() {
        // Terms approach the ray of the second generator from inside the cone.
        let a = Matrix::<f64>::from_columns_f64(&[&[1.0, 0.0], &[1.0, 1.0]]).unwrap();
        let family = ConvergentFamily {
            a,
            limit_coeffs: Vector::from_f64(&[0.0, 2.0]).unwrap(),
            drift: Vector::from_f64(&[1.0, 0.0]).unwrap(),
            scale_limit: 1.0,
            scale_drift: 0.0,
        };
        let r = check_family(&family, 50, 1e-9, 1e-7).unwrap();
        assert!(r.verdict.is_accepted(), "{:?}", r.verdict);
        assert!((r.lambda - 2.0).abs() < 1e-12);
        assert!(r.au_norm > 0.0);
    }

    #[test]
    fn origin_limit() {
        let a = Matrix::<f64>::identity(2);
        let family = ConvergentFamily {
            a,
            limit_coeffs: Vector::zeros(2),
            drift: Vector::from_f64(&[1.0, 3.0]).unwrap(),
            scale_limit: 1.0,
            scale_drift: 0.1,
        };
        let r = check_family(&family, 20, 1e-9, 1e-7).unwrap();
        assert_eq!(r.lambda, 0.0);
        assert!(r.verdict.is_accepted());
    }

    #[test]
    fn random_families_close() {
        let mut rng = SplitMix64::new(11);
        for _ in 0..50 {
            let m = 1 + rng.below(4);
            let n = 1 + rng.below(5);
            let fam = ConvergentFamily::<f64>::random(&mut rng, m, n);
            let r = check_family(&fam, 40, 1e-9, 1e-7).unwrap();
            assert!(r.verdict.is_accepted(), "{fam:?} {r:?}");
        }
    }
}
