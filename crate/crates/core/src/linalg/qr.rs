use crate::linalg::vector::{dot, norm};
use crate::linalg::Matrix;
use crate::scalar::Real;

/// Householder QR with column pivoting, `A P = Q R`.
///
/// The pivot at each step is the remaining column of largest norm; ties go to
/// the smallest original column index, so the factorization is a pure
/// function of the input.
#[derive(Clone, Debug)]
pub(crate) struct PivotedQr<T> {
    work: Matrix<T>,
    reflectors: Vec<Option<(Vec<T>, T)>>,
    perm: Vec<usize>,
}

impl<T: Real> PivotedQr<T> {
    pub(crate) fn new(a: &Matrix<T>) -> Self {
        let m = a.rows();
        let k = a.cols();
        let steps = m.min(k);
        let mut work = a.clone();
        let mut perm: Vec<usize> = (0..k).collect();
        let mut reflectors = Vec::with_capacity(steps);

        for j in 0..steps {
            let mut pivot = j;
            let mut best = norm(&work.column(j)[j..]);
            for c in j + 1..k {
                let nc = norm(&work.column(c)[j..]);
                if nc > best || (nc == best && perm[c] < perm[pivot]) {
                    pivot = c;
                    best = nc;
                }
            }
            work.swap_columns(j, pivot);
            perm.swap(j, pivot);

            if best.is_zero() {
                reflectors.push(None);
                continue;
            }
            let x0 = work.column(j)[j];
            let alpha = if x0 >= T::zero() { -best } else { best };
            let mut v = work.column(j)[j..].to_vec();
            v[0] = v[0] - alpha;
            let vtv = dot(&v, &v);
            if vtv.is_zero() {
                reflectors.push(None);
                continue;
            }
            let beta = (T::one() + T::one()) / vtv;
            for c in j + 1..k {
                let col = &mut work.column_mut(c)[j..];
                let s = beta * dot(&v, col);
                for (ci, &vi) in col.iter_mut().zip(&v) {
                    *ci = *ci - s * vi;
                }
            }
            let col = &mut work.column_mut(j)[j..];
            col[0] = alpha;
            for ci in col.iter_mut().skip(1) {
                *ci = T::zero();
            }
            reflectors.push(Some((v, beta)));
        }

        Self { work, reflectors, perm }
    }

    pub(crate) fn cols(&self) -> usize {
        self.work.cols()
    }

    fn steps(&self) -> usize {
        self.reflectors.len()
    }

    pub(crate) fn r(&self, i: usize, j: usize) -> T {
        self.work.get(i, j)
    }

    /// Number of leading diagonal entries of `R` with magnitude above `tol`.
    pub(crate) fn rank(&self, tol: T) -> usize {
        (0..self.steps()).take_while(|&j| self.r(j, j).abs() > tol).count()
    }

    pub(crate) fn apply_qt(&self, b: &[T]) -> Vec<T> {
        let mut y = b.to_vec();
        for (j, refl) in self.reflectors.iter().enumerate() {
            if let Some((v, beta)) = refl {
                let tail = &mut y[j..];
                let s = *beta * dot(v, tail);
                for (yi, &vi) in tail.iter_mut().zip(v) {
                    *yi = *yi - s * vi;
                }
            }
        }
        y
    }

    /// Least-squares solution assuming full column rank (checked by caller).
    pub(crate) fn solve_full_rank(&self, b: &[T]) -> Vec<T> {
        let k = self.cols();
        debug_assert!(k <= self.steps());
        let y = self.apply_qt(b);
        let mut c = vec![T::zero(); k];
        for i in (0..k).rev() {
            let mut s = y[i];
            for j in i + 1..k {
                s = s - self.r(i, j) * c[j];
            }
            c[i] = s / self.r(i, i);
        }
        let mut out = vec![T::zero(); k];
        for (pos, &orig) in self.perm.iter().enumerate() {
            out[orig] = c[pos];
        }
        out
    }

    /// A null vector of `A` built from the first column past the numerical
    /// rank `r`, or `None` when `A` has full column rank at this rank.
    pub(crate) fn kernel_vector(&self, r: usize) -> Option<Vec<T>> {
        let k = self.cols();
        if r >= k {
            return None;
        }
        let mut w = vec![T::zero(); r];
        for i in (0..r).rev() {
            let mut s = self.r(i, r);
            for j in i + 1..r {
                s = s - self.r(i, j) * w[j];
            }
            w[i] = s / self.r(i, i);
        }
        let mut out = vec![T::zero(); k];
        for (pos, wi) in w.into_iter().enumerate() {
            out[self.perm[pos]] = -wi;
        }
        out[self.perm[r]] = T::one();
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_vector_annihilates() {
        let a = Matrix::<f64>::from_columns_f64(&[&[1.0, 0.0], &[0.0, 1.0], &[1.0, 1.0]]).unwrap();
        let qr = PivotedQr::new(&a);
        assert_eq!(qr.rank(1e-12), 2);
        let d = qr.kernel_vector(2).unwrap();
        let ad = a.mul_vec(&crate::linalg::Vector::from_vec(d));
        assert!(ad.norm() < 1e-14);
    }

    #[test]
    fn pivot_ties_pick_smallest_index() {
        let a = Matrix::<f64>::from_columns_f64(&[&[1.0, 0.0], &[0.0, 1.0]]).unwrap();
        let qr = PivotedQr::new(&a);
        assert_eq!(qr.perm, vec![0, 1]);
    }
}
