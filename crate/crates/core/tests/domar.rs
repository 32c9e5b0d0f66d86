use std::f64::consts::PI;

use kpq_core::algebra::{AlgebraElement, AlgebraInstance, TrigPolynomial};
use kpq_core::domar::*;
use kpq_core::group::{Element, WeightedSection};
use kpq_core::matrix::{hermitian_eig, operator_norm};
use kpq_core::rng::{random_hermitian, sample_rng};
use kpq_core::ComplexMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn cstar() -> AlgebraInstance {
    AlgebraInstance::from_name("cstar").unwrap()
}

fn mat(x: &AlgebraElement) -> &ComplexMatrix {
    x.as_matrix().unwrap()
}

/// Composite Simpson rule on `[a, b]` with `n` (even) intervals.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

fn shifted(profile: FourierProfile, shift: f64) -> FourierProfile {
    FourierProfile::Sum {
        terms: vec![ShiftedTerm {
            weight: 1.0,
            shift,
            profile,
        }],
    }
}

#[test]
fn box_norm_closed_form() {
    // 2 ∫_0^1 e^{√t} dt = 4
    let v = domar_norm(&FourierProfile::box_(1.0), 0.5).unwrap();
    assert!((v - 4.0).abs() < 1e-10, "{v}");
}

#[test]
fn gaussian_norm_against_substitution() {
    // t = u² removes the cusp of e^{√t} at the origin
    let want = 4.0 * simpson(|u| u * (u - u.powi(4)).exp(), 0.0, 8.0, 40_000);
    let got = domar_norm_detailed(&FourierProfile::gaussian(1.0), 0.5).unwrap();
    assert!((got.value - want).abs() < 1e-9 * want, "{} vs {want}", got.value);
    assert!(got.error_bound < 1e-8);
}

#[test]
fn zero_profile_norm() {
    let z = FourierProfile::Tabulated {
        grid: vec![-1.0, 1.0],
        values: vec![[0.0, 0.0], [0.0, 0.0]],
        tail: Some(TailSpec { c: 0.0, rate: 1.0 }),
    };
    assert_eq!(domar_norm(&z, 0.5).unwrap(), 0.0);
}

#[test]
fn norm_dominates_plain_mass() {
    // the weight is at least 1, and ∫ e^{−σ²t²} = √π/σ
    for sigma in [0.4, 0.7, 1.3] {
        let f = FourierProfile::gaussian(sigma);
        for tau in [0.2, 0.6, 0.9] {
            assert!(domar_norm(&f, tau).unwrap() > PI.sqrt() / sigma);
        }
    }
    assert!(domar_norm(&FourierProfile::gaussian(1.0), 1.5).is_err());
}

#[test]
fn calculus_at_zero() {
    let zero = AlgebraElement::Matrix(ComplexMatrix::zeros(1));
    let r = func_calc(&FourierProfile::gaussian(1.0), &zero, &cstar(), 1e-10).unwrap();
    let want = 1.0 / (2.0 * PI.sqrt());
    assert!((mat(&r.value)[(0, 0)] - c(want)).norm() < 1e-10);
}

#[test]
fn calculus_on_diagonals() {
    let lam = [-2.0, -0.3, 0.0, 1.1, 2.5];
    let x = AlgebraElement::Matrix(ComplexMatrix::from_real_diag(&lam));
    for f in [FourierProfile::gaussian(0.8), FourierProfile::hat(3.0), shifted(FourierProfile::gaussian(0.5), 0.4)] {
        let tol = 1e-9;
        let r = func_calc(&f, &x, &cstar(), tol).unwrap();
        let shift = if r.non_unital { r.f_zero } else { c(0.0) };
        for (i, &l) in lam.iter().enumerate() {
            let d = (mat(&r.value)[(i, i)] - (f.value(l) - shift)).norm();
            assert!(d <= tol, "{f:?} at {l}: {d}");
        }
    }
}

#[test]
fn calculus_on_pauli_x() {
    // eigenvectors (1, ±1)/√2 for eigenvalues ±1
    let sx = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
    let f = shifted(FourierProfile::gaussian(0.6), 0.25);
    let tol = 1e-9;
    let r = func_calc(&f, &AlgebraElement::Matrix(sx), &cstar(), tol).unwrap();
    let (fp, fm) = (f.value(1.0), f.value(-1.0));
    let want = ComplexMatrix::new(2, vec![(fp + fm) / 2.0, (fp - fm) / 2.0, (fp - fm) / 2.0, (fp + fm) / 2.0]).unwrap();
    let got = mat(&r.value);
    assert!(operator_norm(&got.try_sub(&want).unwrap()) <= tol);
}

#[test]
fn tabulated_hat_matches_closed_form() {
    // Piecewise-linear interpolation reproduces the hat exactly.
    let tab = FourierProfile::Tabulated {
        grid: vec![-2.0, 0.0, 2.0],
        values: vec![[0.0, 0.0], [1.0, 0.0], [0.0, 0.0]],
        tail: Some(TailSpec { c: 0.0, rate: 1.0 }),
    };
    let hat = FourierProfile::hat(2.0);
    for x in [0.0, 0.4, 1.7, -3.2] {
        assert!((tab.value(x) - hat.value(x)).norm() < 1e-12, "{x}");
    }
    let a = AlgebraElement::Matrix(random_hermitian(&mut sample_rng(4, 4), 5));
    let p = func_calc(&tab, &a, &cstar(), 1e-9).unwrap();
    let q = func_calc(&hat, &a, &cstar(), 1e-9).unwrap();
    assert!(mat(&p.value).max_abs_diff(mat(&q.value)) < 1e-8);
}

#[test]
fn calculus_on_cosine_section() {
    // f(Φ)(n) = (1/2π) ∫ f(2 cos θ) e^{−inθ} dθ
    let inst = AlgebraInstance::from_name("l1w:z:poly-2").unwrap();
    let g = inst.group().unwrap().clone();
    let x = AlgebraElement::Section(WeightedSection::on_integers(g, &[(1, c(1.0)), (-1, c(1.0))]).unwrap());
    let f = FourierProfile::gaussian(0.5);
    let r = func_calc(&f, &x, &inst, 1e-10).unwrap();
    let s = r.value.as_section().unwrap();
    let m = 2048;
    for n in -6i64..=6 {
        let mut want = Complex64::new(0.0, 0.0);
        for j in 0..m {
            let th = 2.0 * PI * j as f64 / m as f64;
            want += f.value(2.0 * th.cos()) * Complex64::from_polar(1.0, -(n as f64) * th);
        }
        want /= m as f64;
        if r.non_unital && n == 0 {
            want -= r.f_zero;
        }
        assert!((s.get(&Element(vec![n])) - want).norm() < 1e-10, "n = {n}");
    }
}

#[test]
fn calculus_on_trig_polynomial_is_pointwise() {
    let inst = AlgebraInstance::from_name("c1-torus").unwrap();
    let p = TrigPolynomial::new([(0, c(0.2)), (1, Complex64::new(0.3, 0.1)), (-1, Complex64::new(0.3, -0.1))]).unwrap();
    let f = FourierProfile::hat(2.5);
    let r = func_calc(&f, &AlgebraElement::Trig(p.clone()), &inst, 1e-10).unwrap();
    let fp = r.value.as_trig().unwrap();
    let shift = if r.non_unital { r.f_zero } else { c(0.0) };
    for k in 0..17 {
        let th = 0.37 * k as f64;
        let want = f.value(p.eval(th).re) - shift;
        assert!((fp.eval(th) - want).norm() < 1e-9, "θ = {th}");
    }
}

#[test]
fn spectral_mapping_examples() {
    let g = FourierProfile::gaussian(0.9);
    assert!(spectral_mapping_check(&g, &ComplexMatrix::zeros(3), 1e-9).unwrap() <= 1e-9);
    let d = ComplexMatrix::from_real_diag(&[-1.0, 0.0, 1.0]);
    assert!(spectral_mapping_check(&g, &d, 1e-9).unwrap() <= 1e-9);
    let a = random_hermitian(&mut sample_rng(8, 0), 8);
    let tol = 1e-8;
    assert!(spectral_mapping_check(&FourierProfile::hat(2.0), &a, tol).unwrap() <= tol + 1e-8);
}

#[test]
fn homomorphism_examples() {
    let f = FourierProfile::gaussian(0.7);
    let tol = 1e-9;
    let zero = ComplexMatrix::zeros(1);
    assert!(homomorphism_check(&f, &f, &zero, tol).unwrap() <= 2.0 * tol);
    let sz = ComplexMatrix::from_real_diag(&[1.0, -1.0]);
    let g = FourierProfile::gaussian(1.3);
    assert!(homomorphism_check(&f, &g, &sz, tol).unwrap() <= 2.0 * tol);
    let a = random_hermitian(&mut sample_rng(3, 9), 4);
    let r = homomorphism_check(&f, &FourierProfile::box_(2.0), &a, 1e-7).unwrap();
    assert!(r <= 2e-7 + 1e-6, "{r}");
}

#[test]
fn unit_bump_is_an_approximate_unit() {
    let f = FourierProfile::unit_bump(0.3);
    assert!(f.value(0.0).norm() < 1e-12);
    assert!((f.value(1.0) - 1.0).norm() < 1e-12);
}

#[test]
fn approximate_identity_on_windows() {
    let inst = AlgebraInstance::from_name("jaffard:2").unwrap();
    let f = FourierProfile::unit_bump(0.3);
    let tol = 1e-8;
    let zero = ComplexMatrix::zeros(16);
    let t = approx_identity_experiment(&inst, &f, &zero, &[4, 8, 16], tol).unwrap();
    assert!(t.rows.iter().all(|r| r.residual == 0.0));

    let mut rng = sample_rng(12, 0);
    let small = random_hermitian(&mut rng, 8);
    let a = ComplexMatrix::from_fn(32, |i, j| if i < 8 && j < 8 { small[(i, j)] } else { c(0.0) });
    let t = approx_identity_experiment(&inst, &f, &a, &[4, 8, 16, 32], tol).unwrap();
    assert_eq!(t.support_radius, 8);
    assert!(t.pass, "{:?}", t.rows);
    assert!(t.rows[0].residual > 1e-3);
    assert!(t.rows.iter().all(|r| r.projection_gap <= tol));
    assert!(approx_identity_experiment(&inst, &FourierProfile::gaussian(1.0), &a, &[4], tol).is_err());
}

#[test]
fn profile_json_shapes() {
    let g: FourierProfile = serde_json::from_str(r#"{"kind":"gaussian","sigma":0.5}"#).unwrap();
    assert_eq!(g, FourierProfile::gaussian(0.5));
    let b: FourierProfile = serde_json::from_str(r#"{"kind":"box","T":2.0}"#).unwrap();
    assert_eq!(b, FourierProfile::box_(2.0));
    let h: FourierProfile = serde_json::from_str(r#"{"kind":"hat","T":1.5}"#).unwrap();
    assert_eq!(h, FourierProfile::hat(1.5));
    let t: FourierProfile = serde_json::from_str(
        r#"{"kind":"tabulated","grid":[-1,0,1],"values":[[0,0],[1,0],[0,0]],"tail":{"c":0,"rate":1}}"#,
    )
    .unwrap();
    t.validate().unwrap();
    assert!(serde_json::from_str::<FourierProfile>(r#"{"kind":"gaussian","sigma":0.5,"mu":1}"#).is_err());
    let round = serde_json::to_string(&FourierProfile::unit_bump(0.4)).unwrap();
    assert_eq!(serde_json::from_str::<FourierProfile>(&round).unwrap(), FourierProfile::unit_bump(0.4));
}

#[test]
fn rejects_non_self_adjoint_and_bad_tolerance() {
    let mut m = ComplexMatrix::zeros(2);
    m[(0, 1)] = c(1.0);
    let f = FourierProfile::gaussian(1.0);
    assert!(func_calc(&f, &AlgebraElement::Matrix(m), &cstar(), 1e-8).is_err());
    let ok = AlgebraElement::Matrix(ComplexMatrix::identity(2));
    assert!(func_calc(&f, &ok, &cstar(), 0.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn calculus_matches_eigen_oracle(seed in 0u64..100_000, dim in 1usize..7, sigma in 0.3f64..1.5) {
        let a = random_hermitian(&mut sample_rng(seed, 0), dim);
        let f = FourierProfile::gaussian(sigma);
        let tol = 1e-8;
        let r = func_calc(&f, &AlgebraElement::Matrix(a.clone()), &cstar(), tol).unwrap();
        let shift = if r.non_unital { r.f_zero } else { c(0.0) };
        let want = hermitian_eig(&a).unwrap().apply(|l| f.value(l) - shift);
        prop_assert!(operator_norm(&mat(&r.value).try_sub(&want).unwrap()) <= tol + 1e-9);
    }

    #[test]
    fn real_profiles_give_hermitian_output(seed in 0u64..100_000, dim in 1usize..6, t in 0.5f64..4.0) {
        let a = random_hermitian(&mut sample_rng(seed, 1), dim);
        let r = func_calc(&FourierProfile::hat(t), &AlgebraElement::Matrix(a), &cstar(), 1e-8).unwrap();
        prop_assert!(mat(&r.value).hermitian_defect() < 1e-12);
    }

    #[test]
    fn hausdorff_is_a_metric(xs in prop::collection::vec(-5.0f64..5.0, 1..6), ys in prop::collection::vec(-5.0f64..5.0, 1..6)) {
        let a: Vec<Complex64> = xs.iter().map(|&x| c(x)).collect();
        let b: Vec<Complex64> = ys.iter().map(|&y| c(y)).collect();
        prop_assert_eq!(hausdorff(&a, &a), 0.0);
        prop_assert!((hausdorff(&a, &b) - hausdorff(&b, &a)).abs() < 1e-15);
    }
}
