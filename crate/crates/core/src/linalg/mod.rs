//! Dense linear algebra for small instances: vectors, column-major matrices,
//! column supports, pivoted least squares, numerical rank and smallest
//! singular values.
//!
//! Every routine is deterministic: pivoting ties are broken by the smallest
//! column index and Jacobi sweeps run in a fixed order.

mod matrix;
pub(crate) mod qr;
mod support;
mod svd;
mod vector;

use thiserror::Error;

use crate::scalar::Real;

pub use matrix::Matrix;
pub use support::{Combinations, Support};
pub use vector::Vector;

use qr::PivotedQr;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("non-finite entry at position {index}")]
    NonFinite { index: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix dimensions must be positive")]
    EmptyDimension,
    #[error("index {index} out of bounds for length {len}")]
    IndexOutOfBounds { index: usize, len: usize },
    #[error("duplicate support index")]
    DuplicateIndex,
    #[error("support is empty")]
    EmptySupport,
    #[error("columns are rank deficient: numerical rank {rank} of {cols}")]
    RankDeficient { rank: usize, cols: usize },
}

/// Default comparison tolerance for an instance: `base * (1 + max(‖A‖_max, ‖b‖_∞))`,
/// with `base = 1e-9` for `f64`.
pub fn default_tol<T: Real>(a: &Matrix<T>, b: &Vector<T>) -> T {
    T::tol_base() * (T::one() + a.max_abs().max(b.norm_inf()))
}

/// Coefficients `c`, zero off `support`, minimizing `‖A_S c_S − b‖`.
///
/// Fails with [`LinalgError::RankDeficient`] when a diagonal entry of the
/// pivoted `R` factor of `A_S` drops to `tol` or below.
pub fn lstsq_on_support<T: Real>(
    a: &Matrix<T>,
    b: &Vector<T>,
    support: &Support,
    tol: T,
) -> Result<Vector<T>, LinalgError> {
    check_rows(a, b)?;
    check_support(a, support)?;
    if support.is_empty() {
        return Err(LinalgError::EmptySupport);
    }
    let sub = a.select_columns(support);
    let qr = PivotedQr::new(&sub);
    let r = qr.rank(tol);
    if r < support.len() {
        return Err(LinalgError::RankDeficient { rank: r, cols: support.len() });
    }
    let coeffs = qr.solve_full_rank(b.as_slice());
    Ok(support.expand(&coeffs))
}

/// Numerical rank: the number of pivoted `R` diagonal entries above `tol`.
pub fn rank<T: Real>(a: &Matrix<T>, tol: T) -> usize {
    PivotedQr::new(a).rank(tol)
}

/// Smallest singular value of the column submatrix `A_S`; zero when the
/// support has more columns than `A` has rows.
pub fn sigma_min_on_support<T: Real>(a: &Matrix<T>, support: &Support) -> Result<T, LinalgError> {
    check_support(a, support)?;
    if support.is_empty() {
        return Err(LinalgError::EmptySupport);
    }
    if support.len() > a.rows() {
        return Ok(T::zero());
    }
    let sub = a.select_columns(support);
    Ok(svd::jacobi_singular_values(&sub).into_iter().fold(T::infinity(), T::min))
}

/// All singular values of `a`, descending.
pub fn singular_values<T: Real>(a: &Matrix<T>) -> Vec<T> {
    let source = if a.cols() > a.rows() { a.transpose() } else { a.clone() };
    let mut s = svd::jacobi_singular_values(&source);
    s.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
    s
}

/// A nonzero `d` with `A_S d_S ≈ 0`, zero off `support`, if the support
/// columns are numerically dependent at `tol`.
pub(crate) fn kernel_direction<T: Real>(
    a: &Matrix<T>,
    support: &Support,
    tol: T,
) -> Option<Vector<T>> {
    if support.is_empty() {
        return None;
    }
    let qr = PivotedQr::new(&a.select_columns(support));
    let r = qr.rank(tol);
    qr.kernel_vector(r).map(|d| support.expand(&d))
}

fn check_rows<T: Real>(a: &Matrix<T>, b: &Vector<T>) -> Result<(), LinalgError> {
    if a.rows() != b.len() {
        return Err(LinalgError::DimensionMismatch { expected: a.rows(), found: b.len() });
    }
    Ok(())
}

fn check_support<T: Real>(a: &Matrix<T>, support: &Support) -> Result<(), LinalgError> {
    if support.ambient() != a.cols() {
        return Err(LinalgError::DimensionMismatch { expected: a.cols(), found: support.ambient() });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cols(c: &[&[f64]]) -> Matrix<f64> {
        Matrix::from_columns_f64(c).unwrap()
    }

    fn vec(v: &[f64]) -> Vector<f64> {
        Vector::from_f64(v).unwrap()
    }

    /// Solves the 2x2 normal equations `AᵀA c = Aᵀb` by Cramer's rule.
    fn normal_equations_2x2(a: &[[f64; 2]; 2], b: [f64; 2]) -> [f64; 2] {
        let g = |i: usize, j: usize| a[i][0] * a[j][0] + a[i][1] * a[j][1];
        let r = |i: usize| a[i][0] * b[0] + a[i][1] * b[1];
        let det = g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0);
        [(r(0) * g(1, 1) - g(0, 1) * r(1)) / det, (g(0, 0) * r(1) - g(1, 0) * r(0)) / det]
    }

    #[test]
    fn lstsq_identity() {
        let c = lstsq_on_support(&Matrix::identity(2), &vec(&[3.0, 4.0]), &Support::full(2), 1e-9)
            .unwrap();
        assert_eq!(c.as_slice(), &[3.0, 4.0]);
    }

    #[test]
    fn lstsq_orthogonal_residual() {
        let c = lstsq_on_support(&cols(&[&[1.0, 0.0]]), &vec(&[0.0, 1.0]), &Support::full(1), 1e-9)
            .unwrap();
        assert_eq!(c.as_slice(), &[0.0]);
    }

    #[test]
    fn lstsq_matches_normal_equations() {
        let expected = normal_equations_2x2(&[[1.0, 0.0], [1.0, 1.0]], [2.0, 1.0]);
        assert_eq!(expected, [1.0, 1.0]);
        let c = lstsq_on_support(
            &cols(&[&[1.0, 0.0], &[1.0, 1.0]]),
            &vec(&[2.0, 1.0]),
            &Support::full(2),
            1e-9,
        )
        .unwrap();
        for (got, want) in c.iter().zip(expected) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn lstsq_partial_support_scatters() {
        let a = cols(&[&[1.0, 0.0], &[0.0, 1.0], &[1.0, 1.0]]);
        let s = Support::new(vec![2], 3).unwrap();
        let c = lstsq_on_support(&a, &vec(&[2.0, 2.0]), &s, 1e-9).unwrap();
        assert_eq!(&c.as_slice()[..2], &[0.0, 0.0]);
        assert!((c[2] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn lstsq_errors() {
        let a = cols(&[&[1.0, 0.0], &[2.0, 0.0]]);
        assert!(matches!(
            lstsq_on_support(&a, &vec(&[1.0, 0.0]), &Support::full(2), 1e-9),
            Err(LinalgError::RankDeficient { rank: 1, cols: 2 })
        ));
        assert_eq!(
            lstsq_on_support(&a, &vec(&[1.0, 0.0]), &Support::empty(2), 1e-9),
            Err(LinalgError::EmptySupport)
        );
        assert!(matches!(
            lstsq_on_support(&a, &vec(&[1.0]), &Support::full(2), 1e-9),
            Err(LinalgError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&Matrix::<f64>::identity(3), 1e-9), 3);
        assert_eq!(rank(&Matrix::<f64>::zeros(2, 2), 1e-9), 0);
        assert_eq!(rank(&cols(&[&[1.0, 0.0], &[2.0, 0.0]]), 1e-9), 1);
    }

    #[test]
    fn sigma_min_examples() {
        assert_eq!(sigma_min_on_support(&Matrix::<f64>::identity(2), &Support::full(2)).unwrap(), 1.0);
        let dup = cols(&[&[1.0, 0.0], &[1.0, 0.0]]);
        assert!(sigma_min_on_support(&dup, &Support::full(2)).unwrap() < 1e-15);
        let diag = cols(&[&[3.0, 0.0], &[0.0, 4.0]]);
        assert_eq!(sigma_min_on_support(&diag, &Support::full(2)).unwrap(), 3.0);
        let wide = cols(&[&[1.0], &[2.0]]);
        assert_eq!(sigma_min_on_support(&wide, &Support::full(2)).unwrap(), 0.0);
    }

    #[test]
    fn sigma_min_matches_closed_form_2x2() {
        // σ_min = |det| / σ_max with σ_max² = (‖A‖_F² + sqrt(‖A‖_F⁴ − 4 det²)) / 2.
        let eps = 1e-3;
        let a = cols(&[&[1.0, 0.0], &[1.0, eps]]);
        let fro2: f64 = 1.0 + 1.0 + eps * eps;
        let det: f64 = eps;
        let smax = ((fro2 + (fro2 * fro2 - 4.0 * det * det).sqrt()) / 2.0).sqrt();
        let expected = det / smax;
        let got = sigma_min_on_support(&a, &Support::full(2)).unwrap();
        assert!((got - expected).abs() < 1e-12, "{got} vs {expected}");
    }

    #[test]
    fn singular_values_sorted() {
        let a = cols(&[&[0.0, 4.0, 0.0], &[3.0, 0.0, 0.0]]);
        let s = singular_values(&a);
        assert!((s[0] - 4.0).abs() < 1e-14 && (s[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn works_in_single_precision() {
        let a = Matrix::<f32>::from_columns_f64(&[&[1.0, 0.0], &[1.0, 1.0]]).unwrap();
        let b = Vector::<f32>::from_f64(&[2.0, 1.0]).unwrap();
        let c = lstsq_on_support(&a, &b, &Support::full(2), 1e-4).unwrap();
        assert!((c[0] - 1.0).abs() < 1e-5 && (c[1] - 1.0).abs() < 1e-5);
    }

    fn small_matrix() -> impl Strategy<Value = Matrix<f64>> {
        (1usize..5, 1usize..5).prop_flat_map(|(m, n)| {
            proptest::collection::vec(-3i32..=3, m * n).prop_map(move |e| {
                let e: Vec<f64> = e.into_iter().map(f64::from).collect();
                Matrix::from_row_major(m, n, &e).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn residual_is_orthogonal_to_support_columns(
            a in small_matrix(),
            seed in proptest::collection::vec(-5.0f64..5.0, 4),
        ) {
            let b = Vector::new(seed.iter().copied().cycle().take(a.rows()).collect()).unwrap();
            let tol = default_tol(&a, &b);
            if let Ok(c) = lstsq_on_support(&a, &b, &Support::full(a.cols()), tol) {
                let r = a.mul_vec(&c).sub(&b);
                let g = a.tr_mul_vec(&r);
                prop_assert!(g.norm_inf() <= 10.0 * tol * (1.0 + b.norm()));
            }
        }

        #[test]
        fn rank_invariant_under_permutation_and_scaling(
            a in small_matrix(),
            scales in proptest::collection::vec(0.25f64..4.0, 4),
            rotate in 0usize..4,
        ) {
            let n = a.cols();
            let columns: Vec<Vec<f64>> = (0..n)
                .map(|j| {
                    let src = (j + rotate) % n;
                    a.column(src).iter().map(|x| x * scales[src]).collect()
                })
                .collect();
            let b = Matrix::from_columns(&columns).unwrap();
            prop_assert_eq!(rank(&a, 1e-9), rank(&b, 1e-9));
        }

        #[test]
        fn sigma_min_zero_iff_rank_deficient(a in small_matrix()) {
            let s = Support::full(a.cols());
            let sigma = sigma_min_on_support(&a, &s).unwrap();
            let deficient = rank(&a, 1e-9) < a.cols();
            prop_assert_eq!(sigma <= 1e-9, deficient, "sigma {}", sigma);
        }
    }
}
