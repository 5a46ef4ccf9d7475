use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fracsub::{
    averaged_periodogram, eig_sym_desc, frac_noise, gse_estimate, run_analysis, simulate_model,
    AnalysisConfig, GseConfig, SimSpec, SubspacePartition, TaperSpec,
};
use fracsub_bench::{cointegrated_series, symmetric_matrix};

fn eigensolver(c: &mut Criterion) {
    let mut group = c.benchmark_group("eig_sym_desc");
    for q in [3, 8, 20] {
        let a = symmetric_matrix(q);
        group.bench_with_input(BenchmarkId::from_parameter(q), &a, |b, a| {
            b.iter(|| eig_sym_desc(black_box(a)).unwrap())
        });
    }
    group.finish();
}

fn periodogram(c: &mut Criterion) {
    let mut group = c.benchmark_group("averaged_periodogram");
    for n in [1024, 8192] {
        let y = cointegrated_series(n, 3, 1);
        let taper = TaperSpec::new(n, 2).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &y, |b, y| {
            b.iter(|| averaged_periodogram(black_box(y), &taper, 7).unwrap())
        });
    }
    group.finish();
}

fn memory_estimate(c: &mut Criterion) {
    let mut group = c.benchmark_group("gse_estimate");
    for n in [1024, 8192] {
        let x = frac_noise(n, 0.3, 2, 10 * n).unwrap();
        let taper = TaperSpec::new(n, 2).unwrap();
        let cfg = GseConfig::defaults(n, 2, 7);
        group.bench_with_input(BenchmarkId::from_parameter(n), &x, |b, x| {
            b.iter(|| gse_estimate(black_box(x), &cfg, &taper).unwrap())
        });
    }
    group.finish();
}

fn simulation(c: &mut Criterion) {
    let partition = SubspacePartition::new(vec![2, 1]).unwrap();
    let spec = SimSpec::new(partition, vec![0.4, -0.2], 4096, 2, 3);
    c.bench_function("simulate_model/4096", |b| b.iter(|| simulate_model(black_box(&spec)).unwrap()));
}

fn full_analysis(c: &mut Criterion) {
    let y = cointegrated_series(4096, 3, 4);
    let cfg = AnalysisConfig::default();
    c.bench_function("run_analysis/4096", |b| b.iter(|| run_analysis(&cfg, black_box(&y)).unwrap()));
}

criterion_group!(benches, eigensolver, periodogram, memory_estimate, simulation, full_analysis);
criterion_main!(benches);
