//! The seven problem adapters and a by-name dispatcher over them.

mod closure;
mod job;
mod knapsack;
mod paths;
mod reduce;
mod stable_marriage;

use std::fmt;
use std::str::FromStr;

pub use closure::{adjacency_rows, row_words, TransitiveClosure};
pub use job::{is_tight, JobScheduling, JobState};
pub use knapsack::{exhaustive_best, Knapsack, DEFAULT_TILE_WIDTH};
pub use paths::{Bfs, Sssp};
pub use reduce::{tree_len, ReduceState, Reduction};
pub use stable_marriage::{blocking_pairs, is_perfect_matching, StableMarriage};

pub(crate) use job::in_degrees;

use crate::instances::Instance;
use crate::problem::{LatticeLinearProblem, SolveError};
use crate::solver::{solve, Solution, SolverConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProblemKind {
    Sssp,
    Bfs,
    StableMarriage,
    JobScheduling,
    Reduce,
    Closure,
    Knapsack,
}

impl ProblemKind {
    pub const ALL: [ProblemKind; 7] = [
        ProblemKind::Sssp,
        ProblemKind::Bfs,
        ProblemKind::StableMarriage,
        ProblemKind::JobScheduling,
        ProblemKind::Reduce,
        ProblemKind::Closure,
        ProblemKind::Knapsack,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::Sssp => "sssp",
            ProblemKind::Bfs => "bfs",
            ProblemKind::StableMarriage => "sm",
            ProblemKind::JobScheduling => "job",
            ProblemKind::Reduce => "reduce",
            ProblemKind::Closure => "closure",
            ProblemKind::Knapsack => "knapsack",
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProblemKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let alias = match s {
            "knap" => "knapsack",
            "jobs" => "job",
            other => other,
        };
        ProblemKind::ALL
            .into_iter()
            .find(|k| k.name() == alias)
            .ok_or_else(|| {
                let names: Vec<_> = ProblemKind::ALL.iter().map(|k| k.name()).collect();
                format!(
                    "unknown problem '{s}' (expected one of {})",
                    names.join(", ")
                )
            })
    }
}

/// Adapter parameters that are not part of the instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProblemOptions {
    /// Source vertex for SSSP and BFS.
    pub source: usize,
    /// Capacity strip width for knapsack tiles.
    pub tile_width: usize,
}

impl Default for ProblemOptions {
    fn default() -> Self {
        ProblemOptions {
            source: 0,
            tile_width: DEFAULT_TILE_WIDTH,
        }
    }
}

/// Something to do with a concrete adapter, whatever its type.
pub trait ProblemVisitor {
    type Output;

    fn visit<P: LatticeLinearProblem>(self, problem: &P) -> Self::Output;
}

fn mismatch(kind: ProblemKind, instance: &Instance) -> SolveError {
    SolveError::MalformedInstance(format!(
        "{kind} cannot run on a {} instance",
        instance.kind()
    ))
}

/// Builds the adapter for `kind` over `instance` and hands it to `visitor`.
pub fn visit_problem<V: ProblemVisitor>(
    kind: ProblemKind,
    instance: &Instance,
    options: &ProblemOptions,
    visitor: V,
) -> Result<V::Output, SolveError> {
    Ok(match (kind, instance) {
        (ProblemKind::Sssp, Instance::Graph(g)) => visitor.visit(&Sssp::new(g, options.source)?),
        (ProblemKind::Bfs, Instance::Graph(g)) => visitor.visit(&Bfs::new(g, options.source)?),
        (ProblemKind::StableMarriage, Instance::Marriage(t)) => {
            visitor.visit(&StableMarriage::new(t)?)
        }
        (ProblemKind::JobScheduling, Instance::Jobs(jobs)) => {
            visitor.visit(&JobScheduling::new(jobs)?)
        }
        (ProblemKind::Reduce, Instance::Values(values)) => visitor.visit(&Reduction::new(values)),
        (ProblemKind::Closure, Instance::Graph(g)) => visitor.visit(&TransitiveClosure::new(g)),
        (ProblemKind::Closure, Instance::Jobs(jobs)) => {
            visitor.visit(&TransitiveClosure::new(&jobs.graph))
        }
        (ProblemKind::Knapsack, Instance::Items(items)) => {
            visitor.visit(&Knapsack::new(items, options.tile_width)?)
        }
        _ => return Err(mismatch(kind, instance)),
    })
}

struct Solve<'c>(&'c SolverConfig);

impl ProblemVisitor for Solve<'_> {
    type Output = Result<Solution, SolveError>;

    fn visit<P: LatticeLinearProblem>(self, problem: &P) -> Self::Output {
        solve(problem, self.0)
    }
}

/// Solves `kind` on `instance` with the configured strategy.
pub fn run_llp(
    kind: ProblemKind,
    instance: &Instance,
    config: &SolverConfig,
    options: &ProblemOptions,
) -> Result<Solution, SolveError> {
    visit_problem(kind, instance, options, Solve(config))?
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{example_graph, Instance};
    use crate::solver::Strategy;

    #[test]
    fn names_round_trip() {
        for kind in ProblemKind::ALL {
            assert_eq!(kind.name().parse::<ProblemKind>().unwrap(), kind);
        }
        assert_eq!(
            "knap".parse::<ProblemKind>().unwrap(),
            ProblemKind::Knapsack
        );
        assert!("tsp".parse::<ProblemKind>().is_err());
    }

    #[test]
    fn mismatched_instance_is_rejected() {
        let config = SolverConfig::new(Strategy::BagST, 1);
        let err = run_llp(
            ProblemKind::Knapsack,
            &Instance::Graph(example_graph()),
            &config,
            &ProblemOptions::default(),
        )
        .unwrap_err();
        assert!(matches!(err, SolveError::MalformedInstance(_)));
    }
}
