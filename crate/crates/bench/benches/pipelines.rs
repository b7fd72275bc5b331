//! Pipeline benchmarks. The alternating-sum evaluators iterate over
//! permutation pairs (m! * m! terms) rather than all index tuples, and the
//! operator pipelines spend their time in exact polynomial products; these
//! benches track both.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use supertrace_core::contraction::{chain_factors, eps_contract, ContractionPattern};
use supertrace_core::geometry::{curvature, GeometryCtx, MetricDilatonJet};
use supertrace_core::heatcoeff::supertrace;
use supertrace_core::invariants::even_divergence_density;

fn bench_eps_contract(c: &mut Criterion) {
    let jet = MetricDilatonJet::random_with_density(4, 4, 7, 50);
    let cp = curvature(&jet, 0).unwrap();
    let pattern = ContractionPattern::scalar(4, chain_factors(0, 1, 4).unwrap());
    c.bench_function("eps chain m=4 (576 permutation pairs)", |b| {
        b.iter(|| black_box(eps_contract(&pattern, &[&cp.r])))
    });
}

fn bench_curvature(c: &mut Criterion) {
    let jet = MetricDilatonJet::random_with_density(4, 6, 11, 35);
    c.bench_function("geometry context m=4 deg=6", |b| {
        b.iter(|| black_box(GeometryCtx::new(&jet).unwrap()))
    });
    c.bench_function("curvature package m=4 orders=2", |b| {
        b.iter(|| black_box(curvature(&jet, 2).unwrap()))
    });
}

fn bench_supertrace(c: &mut Criterion) {
    let surface = MetricDilatonJet::random(2, 4, 13);
    c.bench_function("supertrace n=4 m=2", |b| {
        b.iter(|| black_box(supertrace(4, &surface).unwrap()))
    });
    let line = MetricDilatonJet::random(1, 4, 17);
    c.bench_function("supertrace n=4 m=1", |b| {
        b.iter(|| black_box(supertrace(4, &line).unwrap()))
    });
}

fn bench_even_divergence(c: &mut Criterion) {
    let surface = MetricDilatonJet::random(2, 4, 19);
    c.bench_function("even divergence density m=2", |b| {
        b.iter(|| black_box(even_divergence_density(&surface).unwrap()))
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = bench_eps_contract, bench_curvature, bench_supertrace, bench_even_divergence
}
criterion_main!(benches);
