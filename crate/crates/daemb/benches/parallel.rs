//! Compares the data-parallel code paths against their sequential
//! fallbacks. With the default `parallel` feature the "par" timings use the
//! rayon pool; rerun with `--no-default-features` to measure the sequential
//! build of the same entry points.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use daemb::kcca::gaussian_gram;
use daemb::par;

fn random_rows(n: usize, d: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DMatrix::from_fn(n, d, |_, _| rng.gen_range(-1.0..1.0))
}

fn bench_gram(c: &mut Criterion) {
    let mut group = c.benchmark_group("gaussian_gram");
    for &n in &[200usize, 600] {
        let rows = random_rows(n, 100, 7);
        group.bench_with_input(BenchmarkId::new("dispatch", n), &rows, |b, rows| {
            b.iter(|| gaussian_gram(rows, 1.5))
        });
    }
    group.finish();
}

fn bench_map_indices(c: &mut Criterion) {
    let mut group = c.benchmark_group("map_indices");
    let n = 2048usize;
    let work = |i: usize| {
        let mut acc = 0.0f64;
        for j in 0..400 {
            acc += ((i * 31 + j) as f64).sqrt().sin();
        }
        acc
    };
    group.bench_function("dispatch", |b| b.iter(|| par::map_indices(n, work)));
    group.bench_function("sequential", |b| b.iter(|| par::map_indices_seq(n, work)));
    group.finish();
}

criterion_group!(benches, bench_gram, bench_map_indices);
criterion_main!(benches);
