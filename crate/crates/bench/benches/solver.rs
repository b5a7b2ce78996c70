use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use gapscope::eigensolve::smallest_eigenvalues_only;
use gapscope::{default_tol, dense_oracle_spectrum, eigenvalue_count_below, smallest_eigenvalues};
use gapscope_bench::{decaying_operator, unit_operator};

fn sturm_count(c: &mut Criterion) {
    let mut group = c.benchmark_group("sturm_count");
    for k in [1_000, 10_000] {
        let op = unit_operator(k);
        group.bench_with_input(BenchmarkId::from_parameter(2 * k + 1), &op, |b, op| {
            b.iter(|| eigenvalue_count_below(op, black_box(1e-4)))
        });
    }
    group.finish();
}

fn lowest_pair(c: &mut Criterion) {
    let mut group = c.benchmark_group("lowest_pair");
    group.sample_size(20);
    for k in [1_000, 10_000] {
        let op = unit_operator(k);
        let tol = default_tol(&op);
        group.bench_with_input(BenchmarkId::new("values", 2 * k + 1), &op, |b, op| {
            b.iter(|| smallest_eigenvalues_only(op, 2, tol).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("vectors", 2 * k + 1), &op, |b, op| {
            b.iter(|| smallest_eigenvalues(op, 2, tol).unwrap())
        });
    }
    let op = decaying_operator(10_000);
    let tol = default_tol(&op);
    group.bench_function("vectors/decaying/20001", |b| b.iter(|| smallest_eigenvalues(&op, 2, tol).unwrap()));
    group.finish();
}

fn jacobi_oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("jacobi_oracle");
    group.sample_size(10);
    for k in [25, 100] {
        let op = unit_operator(k);
        group.bench_with_input(BenchmarkId::from_parameter(2 * k + 1), &op, |b, op| {
            b.iter(|| dense_oracle_spectrum(op).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, sturm_count, lowest_pair, jacobi_oracle);
criterion_main!(benches);
