#![allow(dead_code)]

use llp_core::baselines::{oracle_for, run_baseline, BaselineOptions};
use llp_core::instances::{generate, Instance, InstanceSpec, Prng};
use llp_core::problems::{run_llp, ProblemKind, ProblemOptions};
use llp_core::{SolverConfig, Strategy};

/// Every strategy once, the parallel ones at `threads`.
pub fn configs(threads: &[usize]) -> Vec<SolverConfig> {
    let mut out = Vec::new();
    for strategy in Strategy::ALL {
        if strategy.is_single_threaded() {
            out.push(SolverConfig::new(strategy, 1));
        } else {
            for &t in threads {
                out.push(SolverConfig::new(strategy, t).with_chunk_size(8));
            }
        }
    }
    out
}

/// A small random instance of `kind`, sized from `seed`.
pub fn small_spec(kind: ProblemKind, seed: u64) -> InstanceSpec {
    let mut rng = Prng::new(seed ^ 0xA5A5_0000 ^ kind as u64);
    let spec = match kind {
        ProblemKind::Sssp | ProblemKind::Bfs => {
            let n = rng.between(1, 120);
            let m = rng.below(3 * n + 1);
            format!("randgraph:n={n},m={m},wmax=40")
        }
        ProblemKind::StableMarriage => format!("sm:n={}", rng.between(1, 40)),
        ProblemKind::JobScheduling => format!("dag:n={},p=0.1", rng.between(1, 120)),
        ProblemKind::Reduce => format!("reduce:n={}", rng.between(1, 300)),
        ProblemKind::Closure if seed.is_multiple_of(2) => {
            format!("closuredag:n={},p=0.1", rng.between(1, 64))
        }
        ProblemKind::Closure => {
            let n = rng.between(1, 64);
            format!("randgraph:n={n},m={}", rng.below(n + 1))
        }
        ProblemKind::Knapsack => format!(
            "knap:n={},cap={},wmax=60,vmax=100",
            rng.between(1, 40),
            rng.between(1, 200)
        ),
    };
    spec.parse().unwrap()
}

pub fn instance(kind: ProblemKind, seed: u64) -> Instance {
    generate(&small_spec(kind, seed), seed).unwrap()
}

pub fn options() -> ProblemOptions {
    ProblemOptions {
        source: 0,
        tile_width: 16,
    }
}

pub fn oracle(kind: ProblemKind, instance: &Instance) -> Vec<u64> {
    run_baseline(oracle_for(kind), instance, 1, &BaselineOptions::default()).unwrap()
}

pub fn llp(kind: ProblemKind, instance: &Instance, config: &SolverConfig) -> Vec<u64> {
    run_llp(kind, instance, config, &options())
        .unwrap_or_else(|e| panic!("{kind} with {} x{}: {e}", config.strategy, config.threads))
        .values
}
