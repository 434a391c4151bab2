use crate::linalg::vector::dot;
use crate::linalg::Matrix;
use crate::scalar::Real;

const MAX_SWEEPS: usize = 80;

/// Singular values of `a` by one-sided (Hestenes) Jacobi rotations, in column
/// order of the converged iterate (not sorted).
///
/// Returns `min(rows, cols)` values when `rows >= cols`; when there are more
/// columns than rows the surplus values are numerically zero and are reported
/// as computed.
pub(crate) fn jacobi_singular_values<T: Real>(a: &Matrix<T>) -> Vec<T> {
    let k = a.cols();
    let mut cols: Vec<Vec<T>> = a.columns().map(<[T]>::to_vec).collect();
    let eps = T::epsilon();
    let two = T::one() + T::one();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..k {
            for q in p + 1..k {
                let alpha = dot(&cols[p], &cols[p]);
                let beta = dot(&cols[q], &cols[q]);
                let gamma = dot(&cols[p], &cols[q]);
                if gamma.is_zero() || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (two * gamma);
                let sign = if zeta >= T::zero() { T::one() } else { -T::one() };
                let t = sign / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                let (left, right) = cols.split_at_mut(q);
                let up = &mut left[p];
                let uq = &mut right[0];
                for (x, y) in up.iter_mut().zip(uq.iter_mut()) {
                    let xp = *x;
                    let yq = *y;
                    *x = c * xp - s * yq;
                    *y = s * xp + c * yq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    cols.iter().map(|c| crate::linalg::vector::norm(c)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_values() {
        let a = Matrix::<f64>::from_columns_f64(&[&[3.0, 0.0], &[0.0, 4.0]]).unwrap();
        let mut s = jacobi_singular_values(&a);
        s.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert_eq!(s, vec![3.0, 4.0]);
    }

    #[test]
    fn duplicate_columns_give_exact_zero() {
        let a = Matrix::<f64>::from_columns_f64(&[&[1.0, 0.0], &[1.0, 0.0]]).unwrap();
        let s = jacobi_singular_values(&a);
        assert!(s.contains(&0.0), "{s:?}");
    }
}
