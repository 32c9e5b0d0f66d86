use kpq_core::algebra::{AlgebraElement, AlgebraInstance};
use kpq_core::ensemble::{Ensemble, SamplerSpec};
use kpq_core::matrix::hermitian_eig;
use kpq_core::rng::{random_hermitian, sample_rng};
use kpq_core::spectral::*;
use kpq_core::ComplexMatrix;
use num_complex::Complex64;

#[test]
fn diagonal_radius_across_instances() {
    let x = AlgebraElement::Matrix(ComplexMatrix::from_real_diag(&[2.0, -1.0]));
    for name in ["cstar", "schatten:1", "schatten:2", "jaffard:2", "bgs:1:1"] {
        let inst = AlgebraInstance::from_name(name).unwrap();
        let r = gelfand_radius(&x, &inst, 16).unwrap();
        assert!((r.extrapolated - 2.0).abs() < 1e-3, "{name}: {}", r.extrapolated);
        assert_eq!(r.oracle, Some(2.0));
    }
}

#[test]
fn schatten_two_experiment() {
    let inst = AlgebraInstance::from_name("schatten:2").unwrap();
    let spec = SamplerSpec::default_for(&inst, 8);
    let e = radius_equality_experiment(&inst, &spec, 50, 2, 20, Some(1e-6), 1).unwrap();
    assert!(e.pass, "max gap {}", e.max_gap);
    assert_eq!(e.samples.len(), 50);
}

#[test]
fn jaffard_experiment() {
    let inst = AlgebraInstance::from_name("jaffard:2").unwrap();
    let spec = SamplerSpec::default_for(&inst, 32);
    let e = radius_equality_experiment(&inst, &spec, 50, 6, 16, Some(1e-3), 1).unwrap();
    assert!(e.pass, "max gap {}", e.max_gap);
}

#[test]
fn weighted_line_experiment() {
    let inst = AlgebraInstance::from_name("l1w:z:poly-2").unwrap();
    let spec = SamplerSpec {
        ensemble: Ensemble::Convolution,
        size: 0,
        band_beta: None,
        support_radius: Some(4),
        self_adjoint: true,
    };
    let e = radius_equality_experiment(&inst, &spec, 6, 10, 14, Some(1e-2), 1).unwrap();
    assert!(e.pass, "max gap {}", e.max_gap);
    assert_eq!(e.tolerance, 1e-2);
    assert_eq!(tolerance_schedule(14), 1e-2);
}

#[test]
fn experiment_is_deterministic() {
    let inst = AlgebraInstance::from_name("jaffard:2").unwrap();
    let spec = SamplerSpec::default_for(&inst, 12);
    let a = radius_equality_experiment(&inst, &spec, 5, 77, 10, None, 1).unwrap();
    let b = radius_equality_experiment(&inst, &spec, 5, 77, 10, None, 2).unwrap();
    assert_eq!(a, b);
}

#[test]
fn spectrum_agrees_with_eigensolver() {
    let a = random_hermitian(&mut sample_rng(1, 1), 6);
    let s = spectrum_b(&a).unwrap();
    let e = hermitian_eig(&a).unwrap();
    let mut ev = e.eigenvalues.clone();
    ev.sort_by(f64::total_cmp);
    for (z, l) in s.iter().zip(&ev) {
        assert!((z - Complex64::new(*l, 0.0)).norm() < 1e-12);
    }
    let d = ComplexMatrix::from_complex_diag(&[Complex64::new(0.0, 1.0), Complex64::new(0.0, -1.0)]);
    let s = spectrum_b(&d).unwrap();
    assert_eq!(s.len(), 2);
    assert!(s.iter().any(|z| (z - Complex64::new(0.0, 1.0)).norm() < 1e-14));
    assert!(s.iter().any(|z| (z - Complex64::new(0.0, -1.0)).norm() < 1e-14));
}

#[test]
fn radius_never_exceeds_norm() {
    let inst = AlgebraInstance::from_name("jaffard:1.5").unwrap();
    for i in 0..5 {
        let a = AlgebraElement::Matrix(random_hermitian(&mut sample_rng(40, i), 10));
        let r = gelfand_radius(&a, &inst, 12).unwrap();
        assert!(r.oracle.unwrap() <= inst.b_norm(&a).unwrap() + 1e-12);
        assert!(r.gap.unwrap() < 0.05);
    }
}
