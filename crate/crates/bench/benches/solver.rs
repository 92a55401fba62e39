use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;
use walsh_svie::{
    build_walsh_matrix, builtin_example, integration_matrix, sample_path, solve, walsh_domain,
    BasisConfig, CollocationSystem, SolverOptions,
};

fn walsh_matrix(c: &mut Criterion) {
    let mut group = c.benchmark_group("walsh_matrix");
    for m in [64, 256, 1024] {
        let cfg = BasisConfig::with_resolution(m).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(m), &cfg, |b, cfg| {
            b.iter(|| build_walsh_matrix(black_box(cfg)))
        });
    }
    group.finish();
}

fn walsh_domain_p(c: &mut Criterion) {
    let mut group = c.benchmark_group("walsh_domain_p");
    for m in [64, 256] {
        let cfg = BasisConfig::with_resolution(m).unwrap();
        let tw = build_walsh_matrix(&cfg);
        let p = integration_matrix(&cfg);
        group.bench_with_input(BenchmarkId::from_parameter(m), &m, |b, _| {
            b.iter(|| walsh_domain(black_box(p.matrix()), &tw).unwrap())
        });
    }
    group.finish();
}

fn solve_example(c: &mut Criterion) {
    let opts = SolverOptions::default();
    for id in [1, 2] {
        let problem = builtin_example(id).unwrap();
        let mut group = c.benchmark_group(format!("solve_example_{id}"));
        for m in [16, 64, 256] {
            let cfg = BasisConfig::with_resolution(m).unwrap();
            let path = sample_path(&cfg, 7);
            group.bench_with_input(BenchmarkId::new("cold", m), &m, |b, _| {
                b.iter(|| solve(&problem, black_box(&path), &cfg, &opts).unwrap())
            });
            let system = CollocationSystem::new(&problem, &cfg).unwrap();
            group.bench_with_input(BenchmarkId::new("prepared", m), &m, |b, _| {
                b.iter(|| system.solve(black_box(&path), &opts).unwrap())
            });
        }
        group.finish();
    }
}

criterion_group!(benches, walsh_matrix, walsh_domain_p, solve_example);
criterion_main!(benches);
