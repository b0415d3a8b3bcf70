use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use idnet_bench::{random_network, FixtureCorpus};
use idnet_core::community::louvain_best;
use idnet_core::corpus::{Tier, ViewSelector, DEFAULT_TIER_CUTOFF};
use idnet_core::decompose::{default_grid, lcc_curve};
use idnet_core::graph::count_cooccurrences;
use idnet_core::metrics::betweenness;
use idnet_core::null_model::{rewire, RewireMode};

fn counting(c: &mut Criterion) {
    let fx = FixtureCorpus::load();
    let view = fx
        .corpus
        .view(&fx.table, DEFAULT_TIER_CUTOFF, ViewSelector::new(Tier::NI, 2010, None))
        .unwrap();
    c.bench_function("count_cooccurrences/NI_2010", |b| {
        b.iter(|| count_cooccurrences(black_box(&view), &fx.universe).unwrap())
    });
}

fn paths(c: &mut Criterion) {
    let mut group = c.benchmark_group("betweenness");
    for n in [50, 150] {
        let g = random_network(n, 0.2, 1);
        group.bench_with_input(BenchmarkId::from_parameter(n), &g, |b, g| b.iter(|| betweenness(black_box(g))));
    }
    group.finish();
}

fn communities(c: &mut Criterion) {
    let g = random_network(200, 0.1, 2);
    c.bench_function("louvain_best/200x20", |b| b.iter(|| louvain_best(black_box(&g), 42, 20, 1.0).unwrap()));
}

fn decomposition(c: &mut Criterion) {
    let g = random_network(300, 0.1, 3);
    let grid = default_grid(&g, 400).unwrap();
    c.bench_function("lcc_curve/300x400", |b| b.iter(|| lcc_curve(black_box(&g), &grid).unwrap()));
}

fn rewiring(c: &mut Criterion) {
    let g = random_network(200, 0.1, 4);
    let swaps = 10 * g.edge_count();
    let mut group = c.benchmark_group("rewire");
    for (label, mode) in [("all-pairs", RewireMode::AllPairs), ("existing-links", RewireMode::ExistingLinks)] {
        group.bench_function(label, |b| b.iter(|| rewire(black_box(&g), swaps, 7, mode).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, counting, paths, communities, decomposition, rewiring);
criterion_main!(benches);
