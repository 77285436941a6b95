//! Sequential (one worker) against data-parallel (default pool) throughput
//! of the segmented scans. Built with `--no-default-features`, both groups
//! measure the sequential fallback.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use primelab::{chebyshev, counting, mertens, par, shortint};

const X: u64 = 20_000_000;

fn pools() -> [(&'static str, usize); 2] {
    [("sequential", 1), ("parallel", std::thread::available_parallelism().map_or(1, |n| n.get()))]
}

fn bench(c: &mut Criterion) {
    let mut g = c.benchmark_group("scan");
    g.sample_size(10);
    for (name, workers) in pools() {
        g.bench_with_input(BenchmarkId::new("pi", name), &workers, |b, &w| {
            b.iter(|| par::with_workers(w, || counting::pi(black_box(X))))
        });
        g.bench_with_input(BenchmarkId::new("psi", name), &workers, |b, &w| {
            b.iter(|| par::with_workers(w, || chebyshev::psi(black_box(X))))
        });
        g.bench_with_input(BenchmarkId::new("mertens_all_x", name), &workers, |b, &w| {
            b.iter(|| par::with_workers(w, || mertens::streaming_check(black_box(X)).unwrap()))
        });
        g.bench_with_input(BenchmarkId::new("interval_variance", name), &workers, |b, &w| {
            b.iter(|| par::with_workers(w, || shortint::interval_variance(black_box(1_000_000), 1_000, 1).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
