//! The contract every lattice-linear problem implements.

use thiserror::Error;

use crate::state::{GlobalState, LatticeOrder};
use crate::worklist::Worklist;

/// A unit of scheduling: an index to re-check, plus an advisory priority.
///
/// The priority only steers ordering (buckets, recency bias); correctness never reads it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct WorkItem {
    pub index: usize,
    pub priority: u64,
}

impl WorkItem {
    #[inline]
    pub fn new(index: usize, priority: u64) -> Self {
        WorkItem { index, priority }
    }
}

impl From<usize> for WorkItem {
    fn from(index: usize) -> Self {
        WorkItem { index, priority: 0 }
    }
}

impl From<(usize, u64)> for WorkItem {
    fn from((index, priority): (usize, u64)) -> Self {
        WorkItem { index, priority }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SolveError {
    /// An advance would move a coordinate past its bound: no solution exists.
    #[error("coordinate {index} cannot advance past its bound {bound}")]
    Infeasible { index: usize, bound: u64 },
    #[error("malformed instance: {0}")]
    MalformedInstance(String),
    /// The post-solve scan found a coordinate still forbidden.
    #[error("solver returned with coordinate {index} still forbidden")]
    ForbiddenAtExit { index: usize },
    #[error("worker panicked: {0}")]
    WorkerPanic(String),
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
}

/// A problem whose feasibility predicate is lattice-linear: whenever the
/// predicate fails, some coordinate is forbidden and must advance.
///
/// Implementations must tolerate concurrent calls on any index, including
/// the same index from several threads.
pub trait LatticeLinearProblem: Sync {
    /// Auxiliary state stored beside the solution vector.
    type State: Send + Sync;

    /// Number of lattice coordinates.
    fn size(&self) -> usize;

    fn order(&self) -> LatticeOrder;

    /// Optional per-index upper bound; advancing past it means infeasible.
    fn bound(&self) -> Option<&[u64]> {
        None
    }

    fn init_global_state(&self) -> GlobalState<Self::State>;

    /// Seeds the worklist with every index that may be forbidden initially.
    fn initial_states_to_process<W: Worklist>(
        &self,
        state: &GlobalState<Self::State>,
        worklist: &W,
    );

    /// Pure read: is `index` forbidden in the current state?
    fn is_forbidden(&self, state: &GlobalState<Self::State>, index: usize) -> bool;

    /// Advances a forbidden index, pushing indices that may have become
    /// forbidden. Returns true iff the state changed.
    fn advance<W: Worklist>(
        &self,
        state: &GlobalState<Self::State>,
        index: usize,
        worklist: &W,
    ) -> Result<bool, SolveError>;

    /// Checks `index` and advances it if forbidden. Returns true iff it was
    /// forbidden and an advance was attempted. Fixed indices are skipped.
    fn ensure<W: Worklist>(
        &self,
        state: &GlobalState<Self::State>,
        index: usize,
        worklist: &W,
    ) -> Result<bool, SolveError> {
        state.stats.record_evaluation();
        if state.is_fixed(index) || !self.is_forbidden(state, index) {
            return Ok(false);
        }
        if self.advance(state, index, worklist)? {
            state.stats.record_advance();
        }
        Ok(true)
    }

    /// Extracts the answer once no index is forbidden.
    fn final_solution(&self, state: GlobalState<Self::State>) -> Vec<u64>;

    /// Problem-specific completeness check run after quiescence.
    fn check_complete(&self, _state: &GlobalState<Self::State>) -> Result<(), SolveError> {
        Ok(())
    }

    /// Errors with `Infeasible` if `value` exceeds the bound at `index`.
    fn check_bound(&self, index: usize, value: u64) -> Result<(), SolveError> {
        match self.bound() {
            Some(bound) if value > bound[index] => Err(SolveError::Infeasible {
                index,
                bound: bound[index],
            }),
            _ => Ok(()),
        }
    }
}

/// Full scan: the lowest index still forbidden, if any.
pub fn first_forbidden<P: LatticeLinearProblem>(
    problem: &P,
    state: &GlobalState<P::State>,
) -> Option<usize> {
    (0..problem.size()).find(|&i| problem.is_forbidden(state, i))
}
