//! Reference and competitor implementations. Each returns the same
//! solution shape as the matching adapter's `final_solution`.

mod dp;
mod graph;
mod matching;
mod schedule;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use dp::{binary_tree_reduce, dp_row_knapsack, floyd_warshall};
pub use graph::{bfs_mt_queue, bfs_seq, default_delta, delta_stepping, dijkstra};
pub use matching::{gale_shapley, gale_shapley_rounds};
pub use schedule::{topo_levels, topo_sort};

use crate::instances::Instance;
use crate::par::Pool;
use crate::problem::SolveError;
use crate::problems::{ProblemKind, ProblemOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BaselineId {
    DijkstraHeap,
    DeltaStepping,
    BfsSeq,
    BfsMtQueue,
    GaleShapleySeq,
    GaleShapleyRounds,
    TopoSortSeq,
    TopoLevelsPar,
    BinaryTreeReduce,
    FloydWarshallPar,
    DpRowKnapsack,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BaselineError {
    #[error("baseline {baseline} cannot run on a {instance} instance")]
    MismatchedInstance {
        baseline: BaselineId,
        instance: &'static str,
    },
    #[error(transparent)]
    Solve(#[from] SolveError),
}

impl BaselineId {
    pub const ALL: [BaselineId; 11] = [
        BaselineId::DijkstraHeap,
        BaselineId::DeltaStepping,
        BaselineId::BfsSeq,
        BaselineId::BfsMtQueue,
        BaselineId::GaleShapleySeq,
        BaselineId::GaleShapleyRounds,
        BaselineId::TopoSortSeq,
        BaselineId::TopoLevelsPar,
        BaselineId::BinaryTreeReduce,
        BaselineId::FloydWarshallPar,
        BaselineId::DpRowKnapsack,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BaselineId::DijkstraHeap => "dijkstra",
            BaselineId::DeltaStepping => "delta-stepping",
            BaselineId::BfsSeq => "bfs-seq",
            BaselineId::BfsMtQueue => "bfs-mt",
            BaselineId::GaleShapleySeq => "gs-seq",
            BaselineId::GaleShapleyRounds => "gs-rounds",
            BaselineId::TopoSortSeq => "topo-seq",
            BaselineId::TopoLevelsPar => "topo-levels",
            BaselineId::BinaryTreeReduce => "tree-reduce",
            BaselineId::FloydWarshallPar => "floyd-warshall",
            BaselineId::DpRowKnapsack => "dp-rows",
        }
    }

    pub fn problem(self) -> ProblemKind {
        match self {
            BaselineId::DijkstraHeap | BaselineId::DeltaStepping => ProblemKind::Sssp,
            BaselineId::BfsSeq | BaselineId::BfsMtQueue => ProblemKind::Bfs,
            BaselineId::GaleShapleySeq | BaselineId::GaleShapleyRounds => {
                ProblemKind::StableMarriage
            }
            BaselineId::TopoSortSeq | BaselineId::TopoLevelsPar => ProblemKind::JobScheduling,
            BaselineId::BinaryTreeReduce => ProblemKind::Reduce,
            BaselineId::FloydWarshallPar => ProblemKind::Closure,
            BaselineId::DpRowKnapsack => ProblemKind::Knapsack,
        }
    }

    /// Whether the baseline uses more than one thread when given them.
    pub fn is_parallel(self) -> bool {
        matches!(
            self,
            BaselineId::DeltaStepping
                | BaselineId::BfsMtQueue
                | BaselineId::GaleShapleyRounds
                | BaselineId::TopoLevelsPar
                | BaselineId::BinaryTreeReduce
                | BaselineId::FloydWarshallPar
                | BaselineId::DpRowKnapsack
        )
    }
}

impl fmt::Display for BaselineId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BaselineId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BaselineId::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = BaselineId::ALL.iter().map(|b| b.name()).collect();
                format!(
                    "unknown baseline '{s}' (expected one of {})",
                    names.join(", ")
                )
            })
    }
}

/// The sequential oracle that verification compares each problem against.
pub fn oracle_for(problem: ProblemKind) -> BaselineId {
    match problem {
        ProblemKind::Sssp => BaselineId::DijkstraHeap,
        ProblemKind::Bfs => BaselineId::BfsSeq,
        ProblemKind::StableMarriage => BaselineId::GaleShapleySeq,
        ProblemKind::JobScheduling => BaselineId::TopoSortSeq,
        ProblemKind::Reduce => BaselineId::BinaryTreeReduce,
        ProblemKind::Closure => BaselineId::FloydWarshallPar,
        ProblemKind::Knapsack => BaselineId::DpRowKnapsack,
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BaselineOptions {
    pub source: usize,
    /// Δ-stepping bucket width; defaults to the smallest power of two at or
    /// above the median edge weight.
    pub delta: Option<u64>,
}

impl From<&ProblemOptions> for BaselineOptions {
    fn from(options: &ProblemOptions) -> Self {
        BaselineOptions {
            source: options.source,
            delta: None,
        }
    }
}

/// Runs `id` on `instance`. Sequential baselines ignore `threads`.
pub fn run_baseline(
    id: BaselineId,
    instance: &Instance,
    threads: usize,
    options: &BaselineOptions,
) -> Result<Vec<u64>, BaselineError> {
    let mismatch = || BaselineError::MismatchedInstance {
        baseline: id,
        instance: instance.kind(),
    };
    let pool = || -> Result<Pool, BaselineError> { Ok(Pool::new(threads)?) };
    let check_source = |n: usize| -> Result<(), BaselineError> {
        if options.source >= n {
            return Err(SolveError::MalformedInstance(format!(
                "source {} outside {n} vertices",
                options.source
            ))
            .into());
        }
        Ok(())
    };
    Ok(match id {
        BaselineId::DijkstraHeap
        | BaselineId::DeltaStepping
        | BaselineId::BfsSeq
        | BaselineId::BfsMtQueue => {
            let Instance::Graph(g) = instance else {
                return Err(mismatch());
            };
            check_source(g.num_vertices())?;
            match id {
                BaselineId::DijkstraHeap => dijkstra(g, options.source),
                BaselineId::DeltaStepping => {
                    let delta = options.delta.unwrap_or_else(|| default_delta(g));
                    delta_stepping(g, options.source, delta, &pool()?)?
                }
                BaselineId::BfsSeq => bfs_seq(g, options.source),
                _ => bfs_mt_queue(g, options.source, &pool()?),
            }
        }
        BaselineId::GaleShapleySeq | BaselineId::GaleShapleyRounds => {
            let Instance::Marriage(t) = instance else {
                return Err(mismatch());
            };
            t.validate()
                .map_err(|e| SolveError::MalformedInstance(e.to_string()))?;
            if id == BaselineId::GaleShapleySeq {
                gale_shapley(t)
            } else {
                gale_shapley_rounds(t, &pool()?)
            }
        }
        BaselineId::TopoSortSeq | BaselineId::TopoLevelsPar => {
            let Instance::Jobs(jobs) = instance else {
                return Err(mismatch());
            };
            if id == BaselineId::TopoSortSeq {
                topo_sort(jobs)?
            } else {
                topo_levels(jobs, &pool()?)?
            }
        }
        BaselineId::BinaryTreeReduce => {
            let Instance::Values(values) = instance else {
                return Err(mismatch());
            };
            binary_tree_reduce(values, &pool()?)
        }
        BaselineId::FloydWarshallPar => match instance {
            Instance::Graph(g) => floyd_warshall(g, &pool()?),
            Instance::Jobs(jobs) => floyd_warshall(&jobs.graph, &pool()?),
            _ => return Err(mismatch()),
        },
        BaselineId::DpRowKnapsack => {
            let Instance::Items(items) = instance else {
                return Err(mismatch());
            };
            dp_row_knapsack(items, &pool()?)?
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::example_graph;

    #[test]
    fn oracles_cover_every_problem() {
        assert_eq!(oracle_for(ProblemKind::Sssp), BaselineId::DijkstraHeap);
        assert_eq!(
            oracle_for(ProblemKind::StableMarriage),
            BaselineId::GaleShapleySeq
        );
        assert_eq!(oracle_for(ProblemKind::Knapsack), BaselineId::DpRowKnapsack);
        for kind in ProblemKind::ALL {
            assert_eq!(oracle_for(kind).problem(), kind);
        }
    }

    #[test]
    fn names_round_trip() {
        for id in BaselineId::ALL {
            assert_eq!(id.name().parse::<BaselineId>().unwrap(), id);
        }
    }

    #[test]
    fn mismatched_instance() {
        let err = run_baseline(
            BaselineId::GaleShapleySeq,
            &Instance::Graph(example_graph()),
            1,
            &BaselineOptions::default(),
        )
        .unwrap_err();
        assert!(matches!(err, BaselineError::MismatchedInstance { .. }));
    }

    #[test]
    fn dijkstra_on_example() {
        let out = run_baseline(
            BaselineId::DijkstraHeap,
            &Instance::Graph(example_graph()),
            1,
            &BaselineOptions::default(),
        )
        .unwrap();
        assert_eq!(out, vec![0, 2, 5, 3]);
    }
}
