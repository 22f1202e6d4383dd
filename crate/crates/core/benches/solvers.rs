//! Sequential fallback versus the rayon-backed paths, plus the worklist
//! solvers at one and several threads.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use llp_core::baselines::{delta_stepping, dp_row_knapsack, floyd_warshall};
use llp_core::instances::{generate, Instance};
use llp_core::par::Pool;
use llp_core::problems::{run_llp, ProblemKind, ProblemOptions};
use llp_core::solver::{SolverConfig, Strategy};

fn instance(spec: &str, seed: u64) -> Instance {
    generate(&spec.parse().unwrap(), seed).unwrap()
}

fn parallel_threads() -> usize {
    std::thread::available_parallelism()
        .map_or(4, |n| n.get())
        .max(2)
}

/// Each data-parallel kernel once on the inline pool and once on rayon.
fn sequential_vs_rayon(c: &mut Criterion) {
    let threads = parallel_threads();
    let pools = [
        ("sequential", Pool::sequential()),
        ("rayon", Pool::new(threads).unwrap()),
    ];

    let Instance::Graph(graph) = instance("randgraph:n=20000,m=100000,wmax=100", 1) else {
        unreachable!()
    };
    let Instance::Graph(dag) = instance("closuredag:n=300,p=0.05", 2) else {
        unreachable!()
    };
    let Instance::Items(items) = instance("knap:n=200,cap=20000,wmax=100,vmax=100", 3) else {
        unreachable!()
    };

    let mut group = c.benchmark_group("data_parallel");
    group.sample_size(10);
    for (name, pool) in &pools {
        group.bench_with_input(BenchmarkId::new("delta_stepping", name), pool, |b, pool| {
            b.iter(|| delta_stepping(black_box(&graph), 0, 64, pool).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("floyd_warshall", name), pool, |b, pool| {
            b.iter(|| floyd_warshall(black_box(&dag), pool))
        });
        group.bench_with_input(BenchmarkId::new("dp_rows", name), pool, |b, pool| {
            b.iter(|| dp_row_knapsack(black_box(&items), pool).unwrap())
        });
    }
    group.finish();

    let sssp = instance("randgraph:n=20000,m=100000,wmax=100", 4);
    let mut group = c.benchmark_group("allpar_sssp");
    group.sample_size(10);
    for t in [1, threads] {
        let config = SolverConfig::new(Strategy::AllIndicesPar, t);
        group.bench_with_input(BenchmarkId::from_parameter(t), &config, |b, config| {
            b.iter(|| {
                run_llp(ProblemKind::Sssp, &sssp, config, &ProblemOptions::default()).unwrap()
            })
        });
    }
    group.finish();
}

fn worklist_solvers(c: &mut Criterion) {
    let threads = parallel_threads();
    let cases = [
        (
            ProblemKind::Sssp,
            instance("randgraph:n=20000,m=100000,wmax=100", 5),
        ),
        (ProblemKind::StableMarriage, instance("sm:n=300", 6)),
        (ProblemKind::JobScheduling, instance("dag:n=1000,p=0.2", 7)),
    ];
    for (kind, inst) in &cases {
        let mut group = c.benchmark_group(format!("worklist_{kind}"));
        group.sample_size(10);
        let bag = SolverConfig::new(Strategy::BagST, 1);
        group.bench_with_input(BenchmarkId::new("bag", 1), &bag, |b, config| {
            b.iter(|| run_llp(*kind, inst, config, &ProblemOptions::default()).unwrap())
        });
        for strategy in [
            Strategy::SharedBagPar,
            Strategy::PerThreadBagPar,
            Strategy::ChunkedFifoPar,
            Strategy::BucketsPar,
        ] {
            for t in [1, threads] {
                let config = SolverConfig::new(strategy, t);
                group.bench_with_input(
                    BenchmarkId::new(strategy.name(), t),
                    &config,
                    |b, config| {
                        b.iter(|| run_llp(*kind, inst, config, &ProblemOptions::default()).unwrap())
                    },
                );
            }
        }
        group.finish();
    }
}

criterion_group!(benches, sequential_vs_rayon, worklist_solvers);
criterion_main!(benches);
