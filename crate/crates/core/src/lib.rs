//! Lattice-linear predicate (LLP) runtime.
//!
//! A problem exposes a vector of lattice coordinates and a predicate that
//! names *forbidden* coordinates: ones that must advance before any
//! feasible state can be reached. Solvers repeatedly find forbidden
//! coordinates and advance them, concurrently and lock-free, until none
//! remain; the result is the least feasible state.
//!
//! ```
//! use llp_core::instances::example_graph;
//! use llp_core::problems::Sssp;
//! use llp_core::solver::{solve, SolverConfig, Strategy};
//!
//! let graph = example_graph();
//! let sssp = Sssp::new(&graph, 0).unwrap();
//! let out = solve(&sssp, &SolverConfig::new(Strategy::PerThreadBagPar, 2)).unwrap();
//! assert_eq!(out.values, vec![0, 2, 5, 3]);
//! ```

pub mod baselines;
pub mod instances;
pub mod par;
pub mod problem;
pub mod problems;
pub mod solver;
pub mod state;
pub mod worklist;

pub use problem::{first_forbidden, LatticeLinearProblem, SolveError, WorkItem};
pub use solver::{solve, solve_parallel, solve_sequential, Solution, SolverConfig, Strategy};
pub use state::{GlobalState, LatticeOrder, INFINITY};
