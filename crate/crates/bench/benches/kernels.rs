use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qrlab::curves::{density_probe, GridSpec};
use qrlab::exterior::comass;
use qrlab::quadrature::ball_integral;
use qrlab::{Covector, OptimizerConfig, QuadratureSpec, TorusLinearCurve};
use std::hint::black_box;

fn bench_wedge(c: &mut Criterion) {
    let mut g = c.benchmark_group("wedge");
    for m in [4usize, 6, 8] {
        let a = Covector::parse("1.0 dx1^dx2 + 0.5 dx3^dx4 - 2 dx1^dx4", m).unwrap();
        let b = Covector::parse("dx1 + 3 dx2 - dx3", m).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(m), &m, |bch, _| bch.iter(|| black_box(&a).wedge(black_box(&b))));
    }
    g.finish();
}

fn bench_comass(c: &mut Criterion) {
    let cfg = OptimizerConfig { restarts: 16, ..Default::default() };
    let mut g = c.benchmark_group("comass");
    g.sample_size(10);
    for (label, m, expr) in [
        ("kahler4", 4, "1.0 dx1^dx2 + 1.0 dx3^dx4"),
        ("generic5", 5, "0.3 dx1^dx2^dx3 - 1.2 dx2^dx4^dx5 + 0.7 dx1^dx3^dx5"),
    ] {
        let a = Covector::parse(expr, m).unwrap();
        g.bench_function(label, |b| b.iter(|| comass(black_box(&a), &cfg)));
    }
    g.finish();
}

fn bench_ball_integral(c: &mut Criterion) {
    let mut g = c.benchmark_group("ball_integral");
    let g2 = |x: &[f64]| (x[0] * 3.0).sin().powi(2) + x[1] * x[1];
    for (label, spec) in [
        ("tensor_64x256", QuadratureSpec::tensor(64, 256)),
        ("mc_1e5", QuadratureSpec::monte_carlo(100_000, 1)),
    ] {
        g.bench_function(label, |b| b.iter(|| ball_integral(g2, &[0.5, -0.5], 4.0, black_box(&spec), false)));
    }
    g.finish();
}

fn bench_density_probe(c: &mut Criterion) {
    let t = TorusLinearCurve::from_floats(&[2f64.sqrt(), 3f64.sqrt()]).unwrap();
    let grid = GridSpec::cube(2, 0.0, 50.0, 0.1).unwrap();
    let mut g = c.benchmark_group("density_probe");
    g.sample_size(10);
    g.bench_function("grid_501x501", |b| b.iter(|| density_probe(&t, black_box(&[0.3, 0.7, 0.125]), &grid)));
    g.finish();
}

criterion_group!(benches, bench_wedge, bench_comass, bench_ball_integral, bench_density_probe);
criterion_main!(benches);
