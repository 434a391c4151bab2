//! Minimal-support representations of points of `K` and optimal vectors.
//!
//! An optimal vector is a `u ∈ [0,1]ⁿ` with `‖u‖ = 1` such that no `z ≥ 0`
//! with `Az = Au` has fewer nonzero components. Every `v = Ax`, `x ≥ 0`, can
//! be written as `λ·Au` with `λ ≥ 0` and `u` optimal.
//!
//! The workhorse is the μ-step: given `x ≥ 0` and a direction `d` with a
//! positive entry, `μ = min_{d_i > 0} x_i / d_i` and `z = x − μd` stays
//! nonnegative while losing at least one nonzero entry. With `d` in the
//! kernel of the support columns, `Az = Ax`.

use thiserror::Error;

use crate::cone::{self, ConeError, ConeInstance};
use crate::linalg::{self, LinalgError, Matrix, Support, Vector};
use crate::rng::SplitMix64;
use crate::scalar::Real;

/// Default cap on `n` for the exhaustive searches.
pub const DEFAULT_NMAX: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum DecompositionError {
    #[error("index {index} is in the direction's support but not in the current support")]
    SupportMismatch { index: usize },
    #[error("entry {index} is negative")]
    Negative { index: usize },
    #[error("direction has no positive entry")]
    ZeroDirection,
    #[error("vector length {found} does not match {expected} columns")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("exhaustive search over {n} columns exceeds the cap of {nmax}")]
    TooLarge { n: usize, nmax: usize },
    #[error("matrix is zero")]
    ZeroMatrix,
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// How strong the minimality claim on a [`SupportWitness`] is.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Minimality {
    /// No nonnegative representation of the same point has a smaller support.
    Global,
    /// The support columns are linearly independent.
    IndependentColumns,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SupportWitness<T> {
    pub z: Vector<T>,
    pub support: Support,
    pub minimality: Minimality,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MuStep<T> {
    pub z: Vector<T>,
    pub mu: T,
    /// Index attaining the minimum ratio (smallest such index).
    pub zeroed: usize,
}

/// `v = λ·Au` with `u` optimal.
#[derive(Clone, Debug, PartialEq)]
pub struct ConicDecomposition<T> {
    pub lambda: T,
    pub u: Vector<T>,
    pub support: Support,
}

impl<T: Real> ConicDecomposition<T> {
    pub fn point(&self, a: &Matrix<T>) -> Vector<T> {
        a.mul_vec(&self.u).scale(self.lambda)
    }

    pub fn coefficients(&self) -> Vector<T> {
        self.u.scale(self.lambda)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Globally minimal support by exhaustive search.
    Exact,
    /// Independent support columns by repeated kernel elimination.
    Heuristic,
}

/// Entries above `tol · (1 + ‖z‖_∞)` count as nonzero.
pub fn support_threshold<T: Real>(z: &Vector<T>, tol: T) -> T {
    tol * (T::one() + z.norm_inf())
}

pub fn support_of<T: Real>(z: &Vector<T>, tol: T) -> Support {
    Support::above(z, support_threshold(z, tol))
}

fn check_len<T: Real>(a: &Matrix<T>, x: &Vector<T>) -> Result<(), DecompositionError> {
    if x.len() != a.cols() {
        return Err(DecompositionError::DimensionMismatch { expected: a.cols(), found: x.len() });
    }
    Ok(())
}

/// Clamps entries within `tol·(1+‖x‖_∞)` of zero from below; fails on a
/// genuinely negative entry.
fn nonnegative_part<T: Real>(x: &Vector<T>, tol: T) -> Result<Vector<T>, DecompositionError> {
    let thr = support_threshold(x, tol);
    if let Some(index) = x.iter().position(|&v| v < -thr) {
        return Err(DecompositionError::Negative { index });
    }
    Ok(Vector::from_vec(x.iter().map(|&v| v.max(T::zero())).collect()))
}

/// The ratio step over the index set `ratio_set`, where every `d_i` is
/// positive.
fn mu_step<T: Real>(x: &Vector<T>, d: &Vector<T>, ratio_set: &Support) -> MuStep<T> {
    let mut mu = T::infinity();
    let mut zeroed = usize::MAX;
    for i in ratio_set.iter() {
        let r = x[i] / d[i];
        if r < mu {
            mu = r;
            zeroed = i;
        }
    }
    let mut z = x.axpy(-mu, d);
    let entries = z.as_mut_slice();
    entries[zeroed] = T::zero();
    for e in entries.iter_mut() {
        if *e < T::zero() {
            *e = T::zero();
        }
    }
    MuStep { z, mu, zeroed }
}

/// `z = ucur − μ·udir` with `μ = min_{i ∈ supp(udir)} ucurⁱ / udirⁱ`.
pub fn mu_reduce<T: Real>(
    a: &Matrix<T>,
    ucur: &Vector<T>,
    udir: &Vector<T>,
    tol: T,
) -> Result<MuStep<T>, DecompositionError> {
    check_len(a, ucur)?;
    check_len(a, udir)?;
    let ucur = nonnegative_part(ucur, tol)?;
    let udir = nonnegative_part(udir, tol)?;
    let dir_support = support_of(&udir, tol);
    if dir_support.is_empty() {
        return Err(DecompositionError::ZeroDirection);
    }
    let cur_thr = support_threshold(&ucur, tol);
    if let Some(index) = dir_support.iter().find(|&i| ucur[i] <= cur_thr) {
        return Err(DecompositionError::SupportMismatch { index });
    }
    Ok(mu_step(&ucur, &udir, &dir_support))
}

/// Repeatedly removes a kernel direction of the support columns until they
/// are linearly independent. The image `Az = Ax` is preserved and the
/// result has at most `rank(A)` nonzero entries.
pub fn reduce_to_independent_support<T: Real>(
    a: &Matrix<T>,
    x: &Vector<T>,
    tol: T,
) -> Result<SupportWitness<T>, DecompositionError> {
    check_len(a, x)?;
    let mut z = nonnegative_part(x, tol)?;
    let target = a.mul_vec(&z);
    let hundred = T::lit(100.0);

    loop {
        let support = support_of(&z, tol);
        drop_outside(&mut z, &support);
        let Some(mut d) = linalg::kernel_direction(a, &support, tol) else { break };
        let dthr = hundred * T::epsilon() * d.norm_inf();
        if !support.iter().any(|i| d[i] > dthr) {
            d = d.neg();
        }
        let ratio_set = Support::new(support.iter().filter(|&i| d[i] > dthr).collect(), a.cols())?;
        z = mu_step(&z, &d, &ratio_set).z;
    }

    let support = support_of(&z, tol);
    drop_outside(&mut z, &support);
    // Re-solve on the final support to remove drift accumulated by the steps.
    if !support.is_empty() {
        if let Ok(refined) = linalg::lstsq_on_support(a, &target, &support, tol) {
            if support.iter().all(|i| refined[i] > T::zero()) {
                z = refined;
            }
        }
    }
    Ok(SupportWitness { z, support, minimality: Minimality::IndependentColumns })
}

fn drop_outside<T: Real>(z: &mut Vector<T>, support: &Support) {
    for (i, e) in z.as_mut_slice().iter_mut().enumerate() {
        if !support.contains(i) {
            *e = T::zero();
        }
    }
}

/// Globally minimal support by enumerating supports in increasing size
/// (lexicographic within a size) and testing `Ax ∈ cone(A_S)` by projection.
///
/// Supports with dependent columns are skipped: a minimal support always
/// has independent columns.
pub fn minimal_support_exact<T: Real>(
    a: &Matrix<T>,
    x: &Vector<T>,
    nmax: usize,
    tol: T,
) -> Result<SupportWitness<T>, DecompositionError> {
    let n = a.cols();
    if n > nmax {
        return Err(DecompositionError::TooLarge { n, nmax });
    }
    check_len(a, x)?;
    let x = nonnegative_part(x, tol)?;
    let target = a.mul_vec(&x);
    if target.norm() <= tol {
        return Ok(SupportWitness {
            z: Vector::zeros(n),
            support: Support::empty(n),
            minimality: Minimality::Global,
        });
    }
    let accept = tol * (T::one() + target.norm());
    let x_support = support_of(&x, tol);

    for size in 1..=x_support.len() {
        for candidate in Support::combinations(n, size) {
            let sub = a.select_columns(&candidate);
            if linalg::rank(&sub, tol) < size {
                continue;
            }
            let inst = ConeInstance::new(sub, target.clone())?;
            let proj = cone::project_onto_cone(&inst, tol)?;
            if proj.distance <= accept {
                let z = candidate.expand(proj.coeffs.as_slice());
                let support = support_of(&z, tol);
                return Ok(SupportWitness { z, support, minimality: Minimality::Global });
            }
        }
    }
    // x itself is always a representation.
    Ok(SupportWitness { z: x, support: x_support, minimality: Minimality::Global })
}

/// `Ax = λ·Au` with `u` optimal: `λ = ‖z‖`, `u = z / ‖z‖` for a minimal
/// representation `z`; `λ = 0, u = e₁` when `Ax` vanishes.
pub fn optimalize<T: Real>(
    a: &Matrix<T>,
    x: &Vector<T>,
    mode: Mode,
    tol: T,
) -> Result<ConicDecomposition<T>, DecompositionError> {
    check_len(a, x)?;
    let n = a.cols();
    let target = a.mul_vec(&nonnegative_part(x, tol)?);
    if target.norm() <= tol {
        return Ok(ConicDecomposition {
            lambda: T::zero(),
            u: Vector::unit(n, 0),
            support: Support::new(vec![0], n)?,
        });
    }
    let witness = match mode {
        Mode::Exact => minimal_support_exact(a, x, DEFAULT_NMAX, tol)?,
        Mode::Heuristic => reduce_to_independent_support(a, x, tol)?,
    };
    let lambda = witness.z.norm();
    let u = Vector::from_vec(
        witness.z.iter().map(|&zi| (zi / lambda).max(T::zero()).min(T::one())).collect(),
    );
    Ok(ConicDecomposition { lambda, u, support: witness.support })
}

/// A certified lower bound on `c = inf ‖Au‖` over optimal vectors: the
/// smallest `σ_min(A_S)` over supports `S` whose columns are independent at
/// `tol`. Optimal vectors have such supports and unit norm, so
/// `‖Au‖ ≥ σ_min(A_S)`.
pub fn c_lower_bound<T: Real>(a: &Matrix<T>, nmax: usize, tol: T) -> Result<T, DecompositionError> {
    let n = a.cols();
    if n > nmax {
        return Err(DecompositionError::TooLarge { n, nmax });
    }
    if a.is_zero() {
        return Err(DecompositionError::ZeroMatrix);
    }
    let mut best = T::infinity();
    for size in 1..=n.min(a.rows()) {
        for s in Support::combinations(n, size) {
            let sub = a.select_columns(&s);
            if linalg::rank(&sub, tol) < size {
                continue;
            }
            best = best.min(linalg::sigma_min_on_support(a, &s)?);
        }
    }
    Ok(best)
}

/// Smallest `‖Au‖` seen over `samples` random optimal vectors (heuristic
/// mode); an upper estimate of `c`. Returns infinity if every sample maps
/// to zero.
pub fn c_sample_estimate<T: Real>(a: &Matrix<T>, samples: usize, seed: u64) -> T {
    let n = a.cols();
    let tol = T::tol_base() * (T::one() + a.max_abs());
    let mut rng = SplitMix64::new(seed);
    let mut best = T::infinity();
    for _ in 0..samples {
        let mut x: Vec<T> =
            (0..n).map(|_| if rng.chance(0.5) { T::lit(rng.next_f64()) } else { T::zero() }).collect();
        if x.iter().all(|v| v.is_zero()) {
            x[rng.below(n)] = T::one();
        }
        let Ok(dec) = optimalize(a, &Vector::from_vec(x), Mode::Heuristic, tol) else { continue };
        if dec.lambda > T::zero() {
            best = best.min(a.mul_vec(&dec.u).norm());
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const TOL: f64 = 1e-9;

    fn cols(c: &[&[f64]]) -> Matrix<f64> {
        Matrix::from_columns_f64(c).unwrap()
    }

    fn v(x: &[f64]) -> Vector<f64> {
        Vector::from_f64(x).unwrap()
    }

    fn redundant() -> Matrix<f64> {
        cols(&[&[1.0, 0.0], &[0.0, 1.0], &[1.0, 1.0]])
    }

    #[test]
    fn mu_reduce_examples() {
        let a2 = Matrix::<f64>::identity(2);
        let s = mu_reduce(&a2, &v(&[2.0, 3.0]), &v(&[1.0, 1.0]), TOL).unwrap();
        assert_eq!((s.mu, s.z.as_slice()), (2.0, &[0.0, 1.0][..]));

        let s = mu_reduce(&a2, &v(&[1.0, 0.0]), &v(&[1.0, 0.0]), TOL).unwrap();
        assert_eq!((s.mu, s.z.as_slice()), (1.0, &[0.0, 0.0][..]));

        let a3 = Matrix::<f64>::identity(3);
        let s = mu_reduce(&a3, &v(&[4.0, 2.0, 5.0]), &v(&[0.0, 1.0, 1.0]), TOL).unwrap();
        assert_eq!((s.mu, s.z.as_slice(), s.zeroed), (2.0, &[4.0, 0.0, 3.0][..], 1));
    }

    #[test]
    fn mu_reduce_ties_zero_smallest_index() {
        let a = Matrix::<f64>::identity(3);
        let s = mu_reduce(&a, &v(&[2.0, 2.0, 2.0]), &v(&[0.0, 1.0, 1.0]), TOL).unwrap();
        assert_eq!(s.zeroed, 1);
    }

    #[test]
    fn mu_reduce_errors() {
        let a = Matrix::<f64>::identity(2);
        assert_eq!(
            mu_reduce(&a, &v(&[1.0, 0.0]), &v(&[0.0, 1.0]), TOL),
            Err(DecompositionError::SupportMismatch { index: 1 })
        );
        assert_eq!(
            mu_reduce(&a, &v(&[1.0, 1.0]), &v(&[0.0, 0.0]), TOL),
            Err(DecompositionError::ZeroDirection)
        );
        assert_eq!(
            mu_reduce(&a, &v(&[1.0, -1.0]), &v(&[1.0, 0.0]), TOL),
            Err(DecompositionError::Negative { index: 1 })
        );
    }

    #[test]
    fn reduce_redundant_triple() {
        let a = redundant();
        let x = v(&[1.0, 1.0, 1.0]);
        let w = reduce_to_independent_support(&a, &x, TOL).unwrap();
        let image = a.mul_vec(&w.z);
        assert!(image.sub(&v(&[2.0, 2.0])).norm() < 1e-12);
        assert!(w.support.len() <= 2);
        assert_eq!(linalg::rank(&a.select_columns(&w.support), TOL), w.support.len());
        assert_eq!(w.minimality, Minimality::IndependentColumns);
    }

    #[test]
    fn reduce_fixpoint_on_independent_columns() {
        let w = reduce_to_independent_support(&Matrix::identity(2), &v(&[3.0, 4.0]), TOL).unwrap();
        assert_eq!(w.z.as_slice(), &[3.0, 4.0]);
        assert_eq!(w.support.indices(), &[0, 1]);
    }

    #[test]
    fn reduce_proportional_columns() {
        let a = cols(&[&[1.0, 0.0], &[2.0, 0.0]]);
        let w = reduce_to_independent_support(&a, &v(&[1.0, 1.0]), TOL).unwrap();
        assert_eq!(w.support.len(), 1);
        assert!(a.mul_vec(&w.z).sub(&v(&[3.0, 0.0])).norm() < 1e-12);
    }

    #[test]
    fn reduce_zero_input() {
        let w = reduce_to_independent_support(&redundant(), &v(&[0.0, 0.0, 0.0]), TOL).unwrap();
        assert!(w.z.is_zero() && w.support.is_empty());
    }

    #[test]
    fn minimal_support_examples() {
        let w = minimal_support_exact(&redundant(), &v(&[1.0, 1.0, 0.0]), DEFAULT_NMAX, TOL).unwrap();
        assert_eq!(w.support.indices(), &[2]);
        assert!((w.z[2] - 1.0).abs() < 1e-12 && w.z[0] == 0.0 && w.z[1] == 0.0);
        assert_eq!(w.minimality, Minimality::Global);

        let w = minimal_support_exact(&Matrix::identity(2), &v(&[3.0, 4.0]), DEFAULT_NMAX, TOL)
            .unwrap();
        assert_eq!(w.support.len(), 2);

        let w = minimal_support_exact(&redundant(), &v(&[0.0, 0.0, 0.0]), DEFAULT_NMAX, TOL).unwrap();
        assert_eq!(w.support.len(), 0);
    }

    #[test]
    fn minimal_support_too_large() {
        let a = Matrix::<f64>::identity(3);
        assert_eq!(
            minimal_support_exact(&a, &v(&[1.0, 1.0, 1.0]), 2, TOL),
            Err(DecompositionError::TooLarge { n: 3, nmax: 2 })
        );
    }

    #[test]
    fn optimalize_examples() {
        let d = optimalize(&redundant(), &v(&[0.0, 0.0, 0.0]), Mode::Heuristic, TOL).unwrap();
        assert_eq!(d.lambda, 0.0);
        assert_eq!(d.u.as_slice(), &[1.0, 0.0, 0.0]);

        let d = optimalize(&Matrix::identity(2), &v(&[3.0, 4.0]), Mode::Exact, TOL).unwrap();
        assert_eq!(d.lambda, 5.0);
        assert!((d.u[0] - 0.6).abs() < 1e-15 && (d.u[1] - 0.8).abs() < 1e-15);

        let d = optimalize(&redundant(), &v(&[1.0, 1.0, 0.0]), Mode::Exact, TOL).unwrap();
        assert!((d.lambda - 1.0).abs() < 1e-12);
        assert_eq!(d.u.as_slice()[..2], [0.0, 0.0]);
        assert!((d.u[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn c_lower_bound_examples() {
        assert_eq!(c_lower_bound(&Matrix::<f64>::identity(2), DEFAULT_NMAX, TOL).unwrap(), 1.0);
        let diag = cols(&[&[3.0, 0.0], &[0.0, 4.0]]);
        assert_eq!(c_lower_bound(&diag, DEFAULT_NMAX, TOL).unwrap(), 3.0);
        assert_eq!(
            c_lower_bound(&Matrix::<f64>::zeros(2, 2), DEFAULT_NMAX, TOL),
            Err(DecompositionError::ZeroMatrix)
        );
        assert!(matches!(
            c_lower_bound(&Matrix::<f64>::identity(3), 2, TOL),
            Err(DecompositionError::TooLarge { .. })
        ));
    }

    #[test]
    fn c_lower_bound_near_parallel_pair() {
        // Closed form for the pair: σ_min = |det| / σ_max.
        let eps = 1e-3;
        let a = cols(&[&[1.0, 0.0], &[1.0, eps]]);
        let fro2 = 2.0 + eps * eps;
        let smax = ((fro2 + (fro2 * fro2 - 4.0 * eps * eps).sqrt()) / 2.0).sqrt();
        let pair = eps / smax;
        let expected = pair.min(1.0);
        let got = c_lower_bound(&a, DEFAULT_NMAX, TOL).unwrap();
        assert!(got > 0.0);
        assert!((got - expected).abs() < 1e-9);
    }

    #[test]
    fn c_sample_estimate_examples() {
        for seed in [0, 1, 99] {
            let c = c_sample_estimate(&Matrix::<f64>::identity(2), 20, seed);
            assert!((1.0 - 1e-12..=2f64.sqrt()).contains(&c), "{c}");
        }
        assert_eq!(c_sample_estimate(&cols(&[&[1.0, 0.0]]), 10, 5), 1.0);
        let a = redundant();
        assert_eq!(c_sample_estimate(&a, 1, 42), c_sample_estimate(&a, 1, 42));
    }

    fn small_instance() -> impl Strategy<Value = (Matrix<f64>, Vector<f64>)> {
        (1usize..4, 1usize..6).prop_flat_map(|(m, n)| {
            (
                proptest::collection::vec(-2i32..=2, m * n),
                proptest::collection::vec(prop_oneof![Just(0.0), 0.0f64..3.0], n),
            )
                .prop_map(move |(e, x)| {
                    let e: Vec<f64> = e.into_iter().map(f64::from).collect();
                    (Matrix::from_row_major(m, n, &e).unwrap(), Vector::new(x).unwrap())
                })
        })
    }

    proptest! {
        #[test]
        fn mu_reduce_strictly_shrinks_support(
            cur in proptest::collection::vec(0.1f64..5.0, 1..6),
            mask in proptest::collection::vec(any::<bool>(), 6),
            dir in proptest::collection::vec(0.1f64..5.0, 6),
        ) {
            let n = cur.len();
            let mut d: Vec<f64> = (0..n).map(|i| if mask[i] { dir[i] } else { 0.0 }).collect();
            if d.iter().all(|&x| x == 0.0) { d[0] = 1.0; }
            let a = Matrix::<f64>::identity(n);
            let ucur = Vector::new(cur).unwrap();
            let step = mu_reduce(&a, &ucur, &Vector::new(d).unwrap(), TOL).unwrap();
            prop_assert!(step.z.iter().all(|&x| x >= 0.0));
            prop_assert!(support_of(&step.z, TOL).len() < support_of(&ucur, TOL).len());
        }

        #[test]
        fn reduction_preserves_image_and_bounds_support((a, x) in small_instance()) {
            let w = reduce_to_independent_support(&a, &x, TOL).unwrap();
            let ax = a.mul_vec(&x);
            prop_assert!(w.z.iter().all(|&z| z >= 0.0));
            prop_assert!(a.mul_vec(&w.z).sub(&ax).norm() <= TOL * (1.0 + ax.norm()));
            prop_assert!(w.support.len() <= linalg::rank(&a, TOL));
            if !w.support.is_empty() {
                prop_assert_eq!(linalg::rank(&a.select_columns(&w.support), TOL), w.support.len());
            }
            let exact = minimal_support_exact(&a, &x, DEFAULT_NMAX, TOL).unwrap();
            prop_assert!(exact.support.len() <= w.support.len());
        }

        #[test]
        fn optimal_vectors_are_normalized((a, x) in small_instance()) {
            for mode in [Mode::Exact, Mode::Heuristic] {
                let d = optimalize(&a, &x, mode, TOL).unwrap();
                prop_assert!(d.u.iter().all(|&u| (0.0..=1.0).contains(&u)));
                prop_assert!((d.u.norm() - 1.0).abs() <= 1e-12);
                prop_assert!(d.point(&a).sub(&a.mul_vec(&x)).norm() <= 1e-8 * (1.0 + x.norm()));
                if d.lambda > 0.0 {
                    let c = c_lower_bound(&a, DEFAULT_NMAX, TOL).unwrap();
                    prop_assert!(a.mul_vec(&d.u).norm() >= c - 1e-9);
                }
            }
        }
    }
}
