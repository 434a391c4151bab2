use thiserror::Error;

use crate::cone::{self, Branch, ConeInstance, SeparationCertificate};
use crate::linalg::{Matrix, Vector};
use crate::oracle::{self, ExactInstance};
use crate::rng::SplitMix64;

/// Attempts per forced-separation request before giving up.
pub const MAX_RETRIES: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum GenerationError {
    #[error("invalid generation request: {0}")]
    InvalidSpec(String),
    #[error("could not certify the requested {branch} branch after {attempts} attempts")]
    GenerationFailed { branch: Branch, attempts: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BranchSpec {
    ForceMembership,
    ForceSeparation,
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenSpec {
    pub m: usize,
    pub n: usize,
    pub branch: BranchSpec,
    /// Half-open interval `[lo, hi)` entries are drawn from.
    pub lo: f64,
    pub hi: f64,
    pub seed: u64,
}

impl GenSpec {
    pub fn new(m: usize, n: usize, branch: BranchSpec, seed: u64) -> Self {
        Self { m, n, branch, lo: -1.0, hi: 1.0, seed }
    }

    fn validate(&self) -> Result<(), GenerationError> {
        if self.m == 0 || self.n == 0 {
            return Err(GenerationError::InvalidSpec("m and n must be positive".into()));
        }
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi) {
            return Err(GenerationError::InvalidSpec(format!(
                "entry range [{}, {}) is not a finite non-empty interval",
                self.lo, self.hi
            )));
        }
        Ok(())
    }
}

/// The certificate the generator built the instance around.
#[derive(Clone, Debug, PartialEq)]
pub enum Witness {
    Membership(Vector<f64>),
    Separation(Vector<f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Generated {
    pub instance: ConeInstance<f64>,
    pub witness: Option<Witness>,
    /// Attempts consumed (1 unless a forced separation had to retry).
    pub attempts: usize,
}

fn draw_matrix(rng: &mut SplitMix64, spec: &GenSpec) -> Matrix<f64> {
    loop {
        let entries: Vec<f64> = (0..spec.m * spec.n).map(|_| rng.uniform(spec.lo, spec.hi)).collect();
        let a = Matrix::from_row_major(spec.m, spec.n, &entries).expect("validated dimensions");
        if !a.is_zero() {
            return a;
        }
    }
}

fn draw_vector(rng: &mut SplitMix64, len: usize, lo: f64, hi: f64) -> Vector<f64> {
    Vector::new((0..len).map(|_| rng.uniform(lo, hi)).collect()).expect("finite draws")
}

/// Instance for `spec`; a pure function of the spec including its seed.
pub fn generate(spec: &GenSpec) -> Result<ConeInstance<f64>, GenerationError> {
    generate_with_witness(spec).map(|g| g.instance)
}

/// Like [`generate`], also returning the certificate used in construction.
///
/// Draw order: entries of `A` row-major, then the branch-specific vector
/// (coefficients `x ∈ [0, max(|lo|, |hi|))ⁿ` for membership, the query for
/// random, the auxiliary point `g` and the push factor `s ∈ [1, 2)` for
/// separation).
pub fn generate_with_witness(spec: &GenSpec) -> Result<Generated, GenerationError> {
    spec.validate()?;
    let mut rng = SplitMix64::new(spec.seed);
    match spec.branch {
        BranchSpec::Random => {
            let a = draw_matrix(&mut rng, spec);
            let b = draw_vector(&mut rng, spec.m, spec.lo, spec.hi);
            let instance = ConeInstance::new(a, b).expect("dimensions agree");
            Ok(Generated { instance, witness: None, attempts: 1 })
        }
        BranchSpec::ForceMembership => {
            let a = draw_matrix(&mut rng, spec);
            let scale = spec.lo.abs().max(spec.hi.abs());
            let x = draw_vector(&mut rng, spec.n, 0.0, scale);
            let b = a.mul_vec(&x);
            let instance = ConeInstance::new(a, b).expect("dimensions agree");
            Ok(Generated { instance, witness: Some(Witness::Membership(x)), attempts: 1 })
        }
        BranchSpec::ForceSeparation => {
            for attempt in 1..=MAX_RETRIES {
                if let Some((instance, y)) = try_separation(&mut rng, spec) {
                    return Ok(Generated {
                        instance,
                        witness: Some(Witness::Separation(y)),
                        attempts: attempt,
                    });
                }
            }
            Err(GenerationError::GenerationFailed {
                branch: Branch::Separation,
                attempts: MAX_RETRIES,
            })
        }
    }
}

/// Projects a random `g` onto `K`; `y₀ = P(g) − g` lies in the dual cone and
/// is orthogonal to `P(g)`, so `b = P(g) − s·y₀` has `⟨b, y₀⟩ = −s‖y₀‖² < 0`.
fn try_separation(
    rng: &mut SplitMix64,
    spec: &GenSpec,
) -> Option<(ConeInstance<f64>, Vector<f64>)> {
    let a = draw_matrix(rng, spec);
    let g = draw_vector(rng, spec.m, spec.lo, spec.hi);
    let s = rng.uniform(1.0, 2.0);

    let probe = ConeInstance::new(a, g).ok()?;
    let tol = probe.default_tol();
    let proj = cone::project_onto_cone(&probe, tol).ok()?;
    let y0 = proj.point.sub(probe.b());
    if y0.norm() <= 1e-6 * (1.0 + probe.b().norm()) {
        return None;
    }
    let b = proj.point.axpy(-s, &y0);
    let instance = probe.with_b(b).ok()?;

    let tol = instance.default_tol();
    let cert = SeparationCertificate::for_vector(&instance, y0.clone());
    if !cone::verify_separation(&instance, &cert, tol).is_accepted() {
        return None;
    }
    let decided = cone::farkas_decide(&instance, tol).ok()?;
    if decided.branch() != Branch::Separation || !cone::verify_result(&instance, &decided, tol).is_accepted() {
        return None;
    }
    if spec.m <= oracle::MAX_EXACT_DECIDE && spec.n <= oracle::MAX_EXACT_DECIDE {
        let exact = ExactInstance::from_f64(&instance).ok()?;
        let cert = oracle::exact_farkas_decide(&exact).ok()?;
        if cert.is_membership() {
            return None;
        }
    }
    Some((instance, y0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::{farkas_decide, verify_membership, MembershipCertificate};
    use crate::instances::format::{write_instance, InstanceFile};

    #[test]
    fn forced_membership_is_member() {
        let g = generate_with_witness(&GenSpec::new(2, 2, BranchSpec::ForceMembership, 7)).unwrap();
        let Some(Witness::Membership(x)) = &g.witness else { panic!() };
        let inst = &g.instance;
        let tol = inst.default_tol();
        let cert = MembershipCertificate { x: x.clone(), residual: 0.0 };
        assert!(verify_membership(inst, &cert, tol).is_accepted());
        assert_eq!(farkas_decide(inst, tol).unwrap().branch(), Branch::Membership);
        assert_eq!(g.attempts, 1);
    }

    #[test]
    fn forced_separation_verifies() {
        let g = generate_with_witness(&GenSpec::new(2, 1, BranchSpec::ForceSeparation, 7)).unwrap();
        let Some(Witness::Separation(y)) = &g.witness else { panic!() };
        let inst = &g.instance;
        let tol = inst.default_tol();
        let cert = SeparationCertificate::for_vector(inst, y.clone());
        assert!(cone::verify_separation(inst, &cert, tol).is_accepted());
    }

    #[test]
    fn deterministic_bytes() {
        for branch in [BranchSpec::ForceMembership, BranchSpec::ForceSeparation, BranchSpec::Random] {
            let spec = GenSpec::new(3, 2, branch, 12345);
            let first = write_instance(&InstanceFile::from_instance(&generate(&spec).unwrap()));
            let second = write_instance(&InstanceFile::from_instance(&generate(&spec).unwrap()));
            assert_eq!(first, second);
        }
    }

    #[test]
    fn rejects_bad_specs() {
        let mut spec = GenSpec::new(0, 2, BranchSpec::Random, 1);
        assert!(matches!(generate(&spec), Err(GenerationError::InvalidSpec(_))));
        spec.m = 2;
        spec.lo = 1.0;
        spec.hi = 1.0;
        assert!(matches!(generate(&spec), Err(GenerationError::InvalidSpec(_))));
    }

    #[test]
    fn impossible_separation_is_reported() {
        // One positive generator on the line and positive queries: every
        // draw lies inside K, so no attempt can be certified.
        let spec = GenSpec { m: 1, n: 1, branch: BranchSpec::ForceSeparation, lo: 0.5, hi: 1.0, seed: 3 };
        assert_eq!(
            generate(&spec),
            Err(GenerationError::GenerationFailed { branch: Branch::Separation, attempts: MAX_RETRIES })
        );
    }

    #[test]
    fn membership_sweep_zero_retries() {
        for seed in 0..200 {
            let spec = GenSpec::new(1 + (seed as usize % 5), 1 + (seed as usize % 7), BranchSpec::ForceMembership, seed);
            let g = generate_with_witness(&spec).unwrap();
            let Some(Witness::Membership(x)) = &g.witness else { panic!() };
            let cert = MembershipCertificate { x: x.clone(), residual: 0.0 };
            assert!(verify_membership(&g.instance, &cert, g.instance.default_tol()).is_accepted());
        }
    }
}
