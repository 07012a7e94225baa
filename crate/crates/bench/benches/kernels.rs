//! Microbenchmarks for the hot kernels: anchored-set enumeration, cluster
//! exploration (fast tree path and generic oracle path), the delayed walk
//! step loop, branching-tree sampling, and the lamplighter metric.
//!
//! Sample counts and measurement windows are kept small so the whole suite
//! finishes quickly on a single core; run `cargo bench -p anchored-bench`.

use std::hint::black_box;
use std::time::Duration;

use anchored::expansion::{animal_counts_finite, BoundaryMode};
use anchored::graph::{ExplicitGraph, FiniteGraph, FiniteGroupGraph, GraphOracle, Vertex};
use anchored::gw::{sample_tree, OffspringDistribution};
use anchored::percolation::{explore_cluster, PercolationConfig, PercolationMode};
use anchored::walks::{lamplighter_distance_bounds, lamplighter_distance_d1, speed_estimate};
use criterion::{criterion_group, criterion_main, Criterion};

fn lamplighter_line() -> GraphOracle {
    GraphOracle::lamplighter(GraphOracle::lattice(1).unwrap(), FiniteGroupGraph::cyclic(2))
}

fn bench_enumeration(c: &mut Criterion) {
    let graph = FiniteGraph::from_explicit(&ExplicitGraph::full_tree(2, 11));
    c.bench_function("enumerate/binary-tree-boundary-10", |b| {
        b.iter(|| {
            let counts =
                animal_counts_finite(black_box(&graph), 10, 10, BoundaryMode::Edge).unwrap();
            black_box(counts.count(10))
        })
    });
}

fn bench_exploration(c: &mut Criterion) {
    let tree = GraphOracle::regular_tree(2).unwrap();
    c.bench_function("explore/tree-subcritical", |b| {
        let mut seed = 0u64;
        b.iter(|| {
            seed = seed.wrapping_add(1);
            let cfg =
                PercolationConfig::new(0.45, PercolationMode::Bond, black_box(seed)).unwrap();
            let cluster = explore_cluster(&tree, &cfg, &tree.basepoint(), 100_000).unwrap();
            black_box(cluster.vertex_count())
        })
    });
    let lamp = lamplighter_line();
    c.bench_function("explore/lamplighter-10k-budget", |b| {
        let mut seed = 0u64;
        b.iter(|| {
            seed = seed.wrapping_add(1);
            let cfg = PercolationConfig::new(0.9, PercolationMode::Bond, black_box(seed)).unwrap();
            let cluster = explore_cluster(&lamp, &cfg, &lamp.basepoint(), 10_000).unwrap();
            black_box(cluster.vertex_count())
        })
    });
}

fn bench_walk(c: &mut Criterion) {
    let lamp = lamplighter_line();
    c.bench_function("walk/delayed-10k-steps", |b| {
        let mut seed = 0u64;
        b.iter(|| {
            seed = seed.wrapping_add(1);
            let est = speed_estimate(&lamp, Some(0.9), 10_000, 1, black_box(seed)).unwrap();
            black_box(est.points.last().unwrap().range_mean)
        })
    });
    c.bench_function("walk/simple-10k-steps", |b| {
        let mut seed = 0u64;
        b.iter(|| {
            seed = seed.wrapping_add(1);
            let est = speed_estimate(&lamp, None, 10_000, 1, black_box(seed)).unwrap();
            black_box(est.points.last().unwrap().range_mean)
        })
    });
}

fn bench_gw(c: &mut Criterion) {
    let law = OffspringDistribution::new(vec![0.25, 0.0, 0.75]).unwrap();
    c.bench_function("gw/sample-10k-budget", |b| {
        let mut seed = 0u64;
        b.iter(|| {
            seed = seed.wrapping_add(1);
            black_box(sample_tree(&law, black_box(seed), 10_000).size())
        })
    });
}

fn bench_metric(c: &mut Criterion) {
    let lamp = lamplighter_line();
    let ball = lamp.ball(&lamp.basepoint(), 8, 100_000).unwrap();
    c.bench_function("metric/exact-radius8-ball", |b| {
        b.iter(|| {
            let mut acc = 0u64;
            for id in 0..ball.len() as u32 {
                if let Vertex::Lamp(state) = ball.vertex(id) {
                    acc += lamplighter_distance_d1(&lamp, state).unwrap();
                }
            }
            black_box(acc)
        })
    });
    c.bench_function("metric/bounds-radius8-ball", |b| {
        b.iter(|| {
            let mut acc = 0u64;
            for id in 0..ball.len() as u32 {
                if let Vertex::Lamp(state) = ball.vertex(id) {
                    let (lo, hi) = lamplighter_distance_bounds(&lamp, state).unwrap();
                    acc += lo + hi;
                }
            }
            black_box(acc)
        })
    });
}

criterion_group! {
    name = kernels;
    config = Criterion::default()
        .sample_size(10)
        .warm_up_time(Duration::from_millis(300))
        .measurement_time(Duration::from_secs(2));
    targets = bench_enumeration, bench_exploration, bench_walk, bench_gw, bench_metric
}
criterion_main!(kernels);
