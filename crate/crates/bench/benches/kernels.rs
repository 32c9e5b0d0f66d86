use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use kpq_core::algebra::AlgebraInstance;
use kpq_core::ensemble::{Ensemble, SamplerSpec};
use kpq_core::group::{regular_rep_norm, BallOperator};
use kpq_core::matrix::hermitian_eig;
use kpq_core::rng::{random_hermitian, sample_rng};
use num_complex::Complex64;

fn section(inst: &str, ensemble: Ensemble, radius: usize, seed: u64) -> kpq_core::group::WeightedSection {
    let inst = AlgebraInstance::from_name(inst).unwrap();
    let spec = SamplerSpec {
        ensemble,
        size: 0,
        band_beta: None,
        support_radius: Some(radius),
        self_adjoint: false,
    };
    spec.sample(&inst, &mut sample_rng(seed, 0)).unwrap().as_section().unwrap().clone()
}

fn eig(c: &mut Criterion) {
    let mut g = c.benchmark_group("jacobi_eig");
    for n in [8usize, 16, 32, 64] {
        let a = random_hermitian(&mut sample_rng(1, n as u64), n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &a, |b, a| b.iter(|| hermitian_eig(black_box(a)).unwrap()));
    }
    g.finish();
}

fn convolution(c: &mut Criterion) {
    let mut g = c.benchmark_group("convolution");
    for (inst, r) in [("l1w:z:poly-2", 8usize), ("l1w:z2:poly-2", 4), ("l1w:f2:1", 3)] {
        let f = section(inst, Ensemble::Convolution, r, 2);
        let h = section(inst, Ensemble::Convolution, r, 3);
        g.bench_function(BenchmarkId::new(inst, r), |b| b.iter(|| black_box(&f).convolve(black_box(&h)).unwrap()));
    }
    g.finish();
}

fn regular_rep(c: &mut Criterion) {
    let mut g = c.benchmark_group("regular_rep");
    g.sample_size(10);
    for r in [1usize, 2, 3] {
        let f = section("l1w:f2:1", Ensemble::Sphere, r, 4);
        let op = BallOperator::new(&f, r + 4).unwrap();
        let v: Vec<Complex64> = (0..op.dim()).map(|i| Complex64::new((i % 7) as f64, 1.0)).collect();
        let mut out = vec![Complex64::new(0.0, 0.0); op.dim()];
        g.bench_function(BenchmarkId::new("matvec", r), |b| b.iter(|| op.apply(black_box(&v), &mut out)));
        g.bench_function(BenchmarkId::new("norm", r), |b| b.iter(|| regular_rep_norm(black_box(&f), r + 2).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, eig, convolution, regular_rep);
criterion_main!(benches);
