//! Feasibility tests and solvers, parallel against sequential.
//!
//! With the default `parallel` feature every case runs on the global rayon pool and on a
//! one-thread pool. `cargo bench -p ckoc-core --no-default-features` times the plain
//! sequential build; its ids are prefixed `sequential`.

use std::hint::black_box;

use ckoc_core::arrangement::solve_weighted_graph;
use ckoc_core::feasibility::FeasibilityTester;
use ckoc_core::generate::{random_graph, random_tree, GenParams};
use ckoc_core::par;
use ckoc_core::tree_solver::{solve_weighted_tree, TreeFeasibility};
use ckoc_core::{all_pairs_distances, Rational};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

/// Labelled runners: the global pool, plus a one-thread pool when rayon is active.
fn runners() -> Vec<(&'static str, Option<rayon::ThreadPool>)> {
    if par::is_parallel() {
        let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        vec![("parallel", None), ("one_thread", Some(single))]
    } else {
        vec![("sequential", None)]
    }
}

fn run<T: Send>(pool: &Option<rayon::ThreadPool>, f: impl FnOnce() -> T + Send) -> T {
    match pool {
        Some(p) => p.install(f),
        None => f(),
    }
}

fn graph_feasibility(c: &mut Criterion) {
    let mut group = c.benchmark_group("graph_feasibility");
    for n in [40, 80, 160] {
        let params = GenParams { n, density: 2.0 * n as f64 / (n * n) as f64, weighted: true, max_den: 16, seed: 1 };
        let g = random_graph(&params).unwrap();
        let dm = all_pairs_distances(&g);
        let k = n / 4;
        let lambda = solve_weighted_graph(&g, k).unwrap().lambda_star;
        let tester = FeasibilityTester::new(&g, &dm);
        for (label, pool) in &runners() {
            group.bench_with_input(BenchmarkId::new(*label, n), &lambda, |b, lambda| {
                b.iter(|| run(pool, || black_box(tester.is_feasible(k, lambda))))
            });
        }
    }
    group.finish();
}

fn tree_feasibility(c: &mut Criterion) {
    let mut group = c.benchmark_group("tree_feasibility");
    for n in [1_000, 10_000] {
        let g = random_tree(n, true, 2).unwrap();
        let tf = TreeFeasibility::new(&g).unwrap();
        let lambda = Rational::from_integer(6);
        for (label, pool) in &runners() {
            group.bench_with_input(BenchmarkId::new(*label, n), &lambda, |b, lambda| {
                b.iter(|| run(pool, || black_box(tf.is_feasible(n / 10, lambda))))
            });
        }
    }
    group.finish();
}

fn solvers(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve");
    group.sample_size(10);
    let g = random_graph(&GenParams { n: 30, density: 0.05, weighted: true, max_den: 16, seed: 3 }).unwrap();
    let t = random_tree(300, true, 4).unwrap();
    for (label, pool) in &runners() {
        group.bench_function(BenchmarkId::new(*label, "weighted_graph_n30"), |b| {
            b.iter(|| run(pool, || black_box(solve_weighted_graph(&g, 10).unwrap())))
        });
        group.bench_function(BenchmarkId::new(*label, "weighted_tree_n300"), |b| {
            b.iter(|| run(pool, || black_box(solve_weighted_tree(&t, 30).unwrap())))
        });
    }
    group.finish();
}

criterion_group!(benches, graph_feasibility, tree_feasibility, solvers);
criterion_main!(benches);
