use farkas_core::cone::{
    directional_derivative_check, farkas_decide, project_onto_cone, verify_membership, verify_result,
    verify_separation, Certificate, ConeInstance, MembershipCertificate, SeparationCertificate,
};
use farkas_core::instances::{generate, read_instance, write_instance, BranchSpec, GenSpec, InstanceFile};
use farkas_core::linalg::{Matrix, Vector};
use farkas_core::oracle::{exact_farkas_decide, ExactInstance};
use farkas_core::rng::SplitMix64;
use farkas_core::Branch;
use proptest::prelude::*;

fn random_instance(rng: &mut SplitMix64, m: usize, n: usize) -> ConeInstance<f64> {
    let a: Vec<f64> = (0..m * n).map(|_| rng.uniform(-1.0, 1.0)).collect();
    let b: Vec<f64> = (0..m).map(|_| rng.uniform(-1.0, 1.0)).collect();
    ConeInstance::new(Matrix::from_row_major(m, n, &a).unwrap(), Vector::from_f64(&b).unwrap()).unwrap()
}

#[test]
fn two_by_two_integer_corpus_matches_oracle() {
    // Every 2x2 matrix and query with entries in {-1, 0, 1}.
    let vals = [-1.0, 0.0, 1.0];
    let mut checked = 0;
    for code in 0..3usize.pow(6) {
        let digits: Vec<f64> = (0..6).map(|i| vals[(code / 3usize.pow(i)) % 3]).collect();
        let a = Matrix::from_row_major(2, 2, &digits[..4]).unwrap();
        if a.is_zero() {
            continue;
        }
        let inst = ConeInstance::new(a, Vector::from_f64(&digits[4..]).unwrap()).unwrap();
        let tol = 1e-9;
        let r = farkas_decide(&inst, tol).unwrap();
        assert!(verify_result(&inst, &r, tol).is_accepted(), "{inst:?}");
        let exact = exact_farkas_decide(&ExactInstance::from_f64(&inst).unwrap()).unwrap();
        assert_eq!(exact.is_membership(), r.branch() == Branch::Membership, "{inst:?}");
        checked += 1;
    }
    assert_eq!(checked, 3usize.pow(6) - 9);
}

#[test]
fn scaling_b_scales_projection() {
    let mut rng = SplitMix64::new(5);
    for _ in 0..100 {
        let inst = random_instance(&mut rng, 3, 4);
        let p = project_onto_cone(&inst, 1e-9).unwrap();
        let scaled = inst.with_b(inst.b().scale(3.0)).unwrap();
        let q = project_onto_cone(&scaled, 1e-9).unwrap();
        assert!(q.point.sub(&p.point.scale(3.0)).norm() <= 1e-9 * (1.0 + q.point.norm()));
        assert!((q.distance - 3.0 * p.distance).abs() <= 1e-9 * (1.0 + q.distance));
    }
}

#[test]
fn projection_is_idempotent() {
    let mut rng = SplitMix64::new(6);
    for _ in 0..100 {
        let inst = random_instance(&mut rng, 4, 3);
        let p = project_onto_cone(&inst, 1e-9).unwrap();
        let again = project_onto_cone(&inst.with_b(p.point.clone()).unwrap(), 1e-9).unwrap();
        assert!(again.distance <= 1e-9 * (1.0 + p.point.norm()));
        assert!(again.point.sub(&p.point).norm() <= 1e-9 * (1.0 + p.point.norm()));
    }
}

#[test]
fn nearest_point_beats_cone_samples() {
    let mut rng = SplitMix64::new(7);
    for _ in 0..50 {
        let inst = random_instance(&mut rng, 3, 3);
        let p = project_onto_cone(&inst, 1e-9).unwrap();
        let d2 = p.distance * p.distance;
        for _ in 0..50 {
            let x: Vec<f64> = (0..3).map(|_| rng.uniform(0.0, 2.0)).collect();
            let w = inst.a().mul_vec(&Vector::from_f64(&x).unwrap());
            let lhs = w.sub(inst.b()).norm_squared();
            let rhs = d2 + 0.5 * p.point.sub(&w).norm_squared();
            assert!(lhs >= rhs - 1e-9);
            assert!(directional_derivative_check(&p.point, inst.b(), &w) >= -1e-9);
        }
    }
}

#[test]
fn separation_vectors_are_dual_feasible() {
    let mut rng = SplitMix64::new(8);
    let mut seen = 0;
    for _ in 0..300 {
        let inst = random_instance(&mut rng, 3, 2);
        let tol = inst.default_tol();
        let r = farkas_decide(&inst, tol).unwrap();
        if let Certificate::Separation(cert) = &r.certificate {
            seen += 1;
            let v = &r.projection.point;
            assert!(cert.margins.iter().all(|&g| g >= -1e-9));
            assert!(v.neg().dot(&cert.y) >= -1e-9);
            assert!(-cert.bmargin >= cert.delta * cert.delta - 1e-9);
            assert!(verify_separation(&inst, cert, tol).is_accepted());
        }
    }
    assert!(seen > 50);
}

#[test]
fn never_both_certificates() {
    let mut rng = SplitMix64::new(9);
    for _ in 0..300 {
        let inst = random_instance(&mut rng, 2, 3);
        let tol = inst.default_tol();
        let r = farkas_decide(&inst, tol).unwrap();
        let mem = MembershipCertificate { x: r.projection.coeffs.clone(), residual: 0.0 };
        let sep = SeparationCertificate::for_vector(&inst, r.projection.point.sub(inst.b()));
        let accepted = [
            verify_membership(&inst, &mem, tol).is_accepted(),
            verify_separation(&inst, &sep, tol).is_accepted(),
        ];
        assert!(r.borderline || accepted[0] != accepted[1], "{inst:?}");
    }
}

#[test]
fn generated_instances_round_trip_through_text() {
    for seed in 0..20 {
        let inst = generate(&GenSpec::new(3, 4, BranchSpec::Random, seed)).unwrap();
        let text = write_instance(&InstanceFile::from_instance(&inst));
        let back: ConeInstance<f64> = read_instance(&text).unwrap().to_instance().unwrap();
        assert_eq!(back, inst);
    }
}

#[test]
fn single_precision_agrees_on_clear_cases() {
    let mut rng = SplitMix64::new(10);
    for _ in 0..100 {
        let inst = random_instance(&mut rng, 2, 2);
        let r64 = farkas_decide(&inst, inst.default_tol()).unwrap();
        if r64.projection.distance < 1e-2 && r64.projection.distance > 0.0 {
            continue;
        }
        let a32 = inst.a().map(|x| x as f32);
        let b32 = Vector::new(inst.b().iter().map(|&x| x as f32).collect()).unwrap();
        let i32 = ConeInstance::new(a32, b32).unwrap();
        let r32 = farkas_decide(&i32, i32.default_tol()).unwrap();
        assert_eq!(r32.branch(), r64.branch());
    }
}

proptest! {
    #[test]
    fn decided_certificates_verify(
        m in 1usize..5, n in 1usize..5, seed in any::<u64>()
    ) {
        let mut rng = SplitMix64::new(seed);
        let inst = random_instance(&mut rng, m, n);
        let tol = inst.default_tol();
        let r = farkas_decide(&inst, tol).unwrap();
        prop_assert!(r.projection.kkt_residual(&inst) <= 1e-8);
        if !r.borderline {
            prop_assert!(verify_result(&inst, &r, tol).is_accepted());
        }
    }
}
