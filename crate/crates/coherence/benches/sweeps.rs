//! Parallel vs. sequential sweep drivers.
//!
//! The default build maps sweep points through rayon; the sequential
//! fallback (what you get with `--no-default-features`) is benchmarked here
//! side by side via the always-sequential `*_seq` drivers.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use coherence::oracle::{
    bell_freeze_sweep, bell_freeze_sweep_seq, qubit_condition_sweep, qubit_condition_sweep_seq,
};

fn bench_qubit_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("qubit_condition_sweep");
    for grid in [16usize, 24] {
        group.bench_with_input(BenchmarkId::new("parallel", grid), &grid, |b, &n| {
            b.iter(|| qubit_condition_sweep(n))
        });
        group.bench_with_input(BenchmarkId::new("sequential", grid), &grid, |b, &n| {
            b.iter(|| qubit_condition_sweep_seq(n))
        });
    }
    group.finish();
}

fn bench_bell_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("bell_freeze_sweep");
    group.sample_size(10);
    for grid in [9usize, 13] {
        group.bench_with_input(BenchmarkId::new("parallel", grid), &grid, |b, &n| {
            b.iter(|| bell_freeze_sweep(n, &[0.5]))
        });
        group.bench_with_input(BenchmarkId::new("sequential", grid), &grid, |b, &n| {
            b.iter(|| bell_freeze_sweep_seq(n, &[0.5]))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_qubit_sweep, bench_bell_sweep);
criterion_main!(benches);
