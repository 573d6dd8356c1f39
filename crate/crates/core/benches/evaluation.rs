//! Benchmarks for network generation, single-network evaluation, and
//! population evaluation. The `population` group compares the sequential
//! path against the default (parallel when the `parallel` feature is on)
//! on the same population spec.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use ponavail::generator::{generate, GeneratorParams, Scenario};
use ponavail::model::AvailabilityTable;
use ponavail::montecarlo::{population_means, population_means_seq, PopulationSpec};
use ponavail::{engine, oracle};

fn bench_generate(c: &mut Criterion) {
    let table = AvailabilityTable::default();
    let params = GeneratorParams { r: 0.01, seed: 7, ..Default::default() };
    c.bench_function("generate_full_size_network", |b| {
        b.iter(|| generate(black_box(&params), &table).unwrap())
    });
}

fn bench_engine(c: &mut Criterion) {
    let table = AvailabilityTable::default();
    let params = GeneratorParams { r: 0.01, seed: 7, ..Default::default() };
    let tree = generate(&params, &table).unwrap();
    c.bench_function("mean_onu_availability_full_size", |b| {
        b.iter(|| engine::mean_onu_availability(black_box(&tree), &table).unwrap())
    });

    let first_onu = tree.onus().next().unwrap();
    c.bench_function("service_availability_single_onu", |b| {
        b.iter(|| engine::service_availability(black_box(&tree), first_onu, &table).unwrap())
    });
}

fn bench_oracle(c: &mut Criterion) {
    use ponavail::model::{NodeId, RnKind, TreeBuilder};
    let table = AvailabilityTable::default();
    let mut b = TreeBuilder::new(&table);
    let rn1 = b.add_rn(NodeId::ROOT, RnKind::Active);
    let rn2 = b.add_rn(rn1, RnKind::Passive);
    let rn3 = b.add_rn(rn2, RnKind::Passive);
    let rn4 = b.add_rn(rn3, RnKind::Passive);
    b.add_onu(rn2, true);
    let target = b.add_onu(rn3, false);
    b.add_onu(rn4, true);
    let tree = b.build();
    c.bench_function("oracle_exhaustive_17_components", |bench| {
        bench.iter(|| oracle::availability(black_box(&tree), target, &table).unwrap())
    });
}

fn bench_population(c: &mut Criterion) {
    let table = AvailabilityTable::default();
    let spec = PopulationSpec { r: 0.01, sample_size: 8, master_seed: 7, ..Default::default() };
    let mut group = c.benchmark_group("population");
    group.sample_size(20);
    group.bench_function("sequential", |b| {
        b.iter(|| population_means_seq(black_box(&spec), &table).unwrap())
    });
    group.bench_function("default", |b| {
        b.iter(|| population_means(black_box(&spec), &table).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_generate, bench_engine, bench_oracle, bench_population);
criterion_main!(benches);
