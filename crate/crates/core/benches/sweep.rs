use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use riemann_flow::sweep::{sweep_s0, sweep_x0, Execution, SweepOptions};
use riemann_flow::IntegratorConfig;

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

fn modes() -> [(&'static str, Execution); 2] {
    [
        ("serial", Execution::Serial),
        ("parallel", Execution::Parallel),
    ]
}

fn s0_curve(c: &mut Criterion) {
    let cfg = IntegratorConfig::default();
    let eps = grid(0.5, 12.0, 16);
    let mut group = c.benchmark_group("sweep_s0");
    group.sample_size(10);
    for (name, execution) in modes() {
        let opts = SweepOptions {
            execution,
            ..Default::default()
        };
        group.bench_with_input(BenchmarkId::from_parameter(name), &eps, |b, eps| {
            b.iter(|| black_box(sweep_s0(eps, &cfg, &opts).unwrap()))
        });
    }
    group.finish();
}

fn x0_curve(c: &mut Criterion) {
    let cfg = IntegratorConfig::default();
    let eps = grid(0.2, 1.6, 8);
    let mut group = c.benchmark_group("sweep_x0");
    group.sample_size(10);
    for (name, execution) in modes() {
        let opts = SweepOptions {
            tolerance: 1e-4,
            execution,
        };
        group.bench_with_input(BenchmarkId::from_parameter(name), &eps, |b, eps| {
            b.iter(|| black_box(sweep_x0(eps, &cfg, &opts).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, s0_curve, x0_curve);
criterion_main!(benches);
