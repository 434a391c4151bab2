//! A closed convex set whose generated cone is not closed.
//!
//! `C = {(x, y) : −1 < x < 1, y ≤ ln(1 − x²)}` is closed and convex, but
//! `{λz : λ ≥ 0, z ∈ C}` is the open lower half-plane plus the origin. The
//! points `(1, −1/k)` are in that cone while their limit `(1, 0)` is not.

use crate::rng::SplitMix64;
use crate::scalar::Real;

/// Tolerance for reconstructing `p = λ(x, y)` from a witness.
pub const WITNESS_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LnConePoint<T> {
    pub p: [T; 2],
}

impl<T: Real> LnConePoint<T> {
    pub fn new(p0: T, p1: T) -> Self {
        Self { p: [p0, p1] }
    }
}

/// `p = λ·(x, y)` with `(x, y) ∈ C`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LnWitness<T> {
    pub lambda: T,
    pub x: T,
    pub y: T,
}

impl<T: Real> LnWitness<T> {
    /// `λ > 0`, `(x, y) ∈ C`, and `|λx − p₀|, |λy − p₁| ≤ tol`.
    pub fn verify(&self, p: &LnConePoint<T>, tol: T) -> bool {
        self.lambda > T::zero()
            && in_generating_set(self.x, self.y)
            && (self.lambda * self.x - p.p[0]).abs() <= tol
            && (self.lambda * self.y - p.p[1]).abs() <= tol
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LnMembership<T> {
    pub member: bool,
    /// Present for members other than the origin.
    pub witness: Option<LnWitness<T>>,
}

/// `(x, y) ∈ C`.
pub fn in_generating_set<T: Real>(x: T, y: T) -> bool {
    x.abs() < T::one() && y <= (-(x * x)).ln_1p()
}

/// Membership in the cone generated by `C`: true iff `p = 0` or `p₁ < 0`.
///
/// For `p₁ < 0` the witness scale is twice the smallest feasible `λ`, located
/// by bisection on `ln(1 − p₀²/λ²) ≥ p₁/λ`; feasibility is monotone in `λ`
/// because `t ↦ ln(1 − p₀²t²) − p₁t` is concave and vanishes at `t = 0`.
pub fn lncone_membership<T: Real>(point: &LnConePoint<T>) -> LnMembership<T> {
    let [p0, p1] = point.p;
    if p0.is_zero() && p1.is_zero() {
        return LnMembership { member: true, witness: None };
    }
    if p1 >= T::zero() {
        return LnMembership { member: false, witness: None };
    }
    if p0.is_zero() {
        let witness = LnWitness { lambda: T::one(), x: T::zero(), y: p1 };
        return LnMembership { member: true, witness: Some(witness) };
    }

    let feasible = |lambda: T| {
        let x = p0 / lambda;
        x.abs() < T::one() && p1 / lambda <= (-(x * x)).ln_1p()
    };
    let two = T::lit(2.0);
    let mut lo = p0.abs();
    let mut hi = lo.max(T::one()) * two;
    while !feasible(hi) {
        lo = hi;
        hi = hi * two;
    }
    for _ in 0..200 {
        let mid = (lo + hi) / two;
        if mid <= lo || mid >= hi {
            break;
        }
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let lambda = hi * two;
    let witness = LnWitness { lambda, x: p0 / lambda, y: p1 / lambda };
    LnMembership { member: true, witness: Some(witness) }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DemoRow<T> {
    /// Sequence index, `None` for the limit row.
    pub k: Option<usize>,
    pub point: LnConePoint<T>,
    pub membership: LnMembership<T>,
    /// Witness present and valid at [`WITNESS_TOL`].
    pub witness_verified: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NonclosednessReport<T> {
    pub rows: Vec<DemoRow<T>>,
    pub limit: DemoRow<T>,
}

impl<T: Real> NonclosednessReport<T> {
    /// Every sequence row is a verified member and the limit is not.
    pub fn exhibits_nonclosedness(&self) -> bool {
        self.rows.iter().all(|r| r.membership.member && r.witness_verified)
            && !self.limit.membership.member
    }
}

/// `p_k = (1, −1/k)` for `k = 1..=k_max`, each a member, and the non-member
/// limit `(1, 0)`.
pub fn lncone_nonclosedness_demo<T: Real>(k_max: usize) -> NonclosednessReport<T> {
    let tol = T::lit(WITNESS_TOL);
    let row = |k: Option<usize>, point: LnConePoint<T>| {
        let membership = lncone_membership(&point);
        let witness_verified = membership.witness.is_some_and(|w| w.verify(&point, tol));
        DemoRow { k, point, membership, witness_verified }
    };
    let rows = (1..=k_max)
        .map(|k| {
            let inv = T::one() / T::from_usize(k).expect("k fits");
            row(Some(k), LnConePoint::new(T::one(), -inv))
        })
        .collect();
    let limit = row(None, LnConePoint::new(T::one(), T::zero()));
    NonclosednessReport { rows, limit }
}

/// Random points of `C`, with first coordinates pushed towards `±1`:
/// `|x| = 1 − 10^(−6u)` and `y = ln(1 − x²) − e` for `u ∈ [0,1)`, `e ∈ [0,5)`.
pub fn sample_generating_set(count: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = SplitMix64::new(seed);
    (0..count)
        .map(|_| {
            let magnitude = 1.0 - 10f64.powf(-6.0 * rng.next_f64());
            let x = if rng.chance(0.5) { magnitude } else { -magnitude };
            let y = (-(x * x)).ln_1p() - rng.uniform(0.0, 5.0);
            (x, y)
        })
        .collect()
}
