use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};

use crate::instances::{CsrGraph, JobDag};
use crate::problem::{LatticeLinearProblem, SolveError, WorkItem};
use crate::state::{GlobalState, LatticeOrder};
use crate::worklist::Worklist;

/// Earliest completion times on a precedence DAG:
/// `G[j] = max_{p in P(j)} G[p] + t_j`.
///
/// A job is forbidden once all its predecessors are fixed and it is not yet
/// fixed itself. Advancing it writes its completion time, fixes it, and
/// releases successors whose last prerequisite it was.
pub struct JobScheduling<'a> {
    jobs: &'a JobDag,
    in_degree: Vec<usize>,
}

pub struct JobState {
    max_from_parents: Box<[AtomicU64]>,
    remaining_prereqs: Box<[AtomicUsize]>,
}

impl<'a> JobScheduling<'a> {
    pub fn new(jobs: &'a JobDag) -> Result<Self, SolveError> {
        let n = jobs.durations.len();
        if jobs.graph.num_vertices() != n {
            return Err(SolveError::MalformedInstance(format!(
                "{n} durations for a graph of {} jobs",
                jobs.graph.num_vertices()
            )));
        }
        Ok(JobScheduling {
            jobs,
            in_degree: in_degrees(&jobs.graph),
        })
    }

    #[inline]
    fn ready(&self, state: &GlobalState<JobState>, j: usize) -> bool {
        state.additional_state.remaining_prereqs[j].load(Ordering::Acquire) == 0
    }

    #[inline]
    fn start_time(&self, state: &GlobalState<JobState>, j: usize) -> u64 {
        state.additional_state.max_from_parents[j].load(Ordering::Acquire)
    }
}

pub(crate) fn in_degrees(graph: &CsrGraph) -> Vec<usize> {
    let mut deg = vec![0; graph.num_vertices()];
    for (_, v, _) in graph.edges() {
        deg[v] += 1;
    }
    deg
}

impl LatticeLinearProblem for JobScheduling<'_> {
    type State = JobState;

    fn size(&self) -> usize {
        self.jobs.durations.len()
    }

    fn order(&self) -> LatticeOrder {
        LatticeOrder::Max
    }

    fn init_global_state(&self) -> GlobalState<JobState> {
        let n = self.size();
        let aux = JobState {
            max_from_parents: (0..n).map(|_| AtomicU64::new(0)).collect(),
            remaining_prereqs: self
                .in_degree
                .iter()
                .map(|&d| AtomicUsize::new(d))
                .collect(),
        };
        GlobalState::new(std::iter::repeat_n(0, n), aux)
    }

    fn initial_states_to_process<W: Worklist>(&self, _state: &GlobalState<JobState>, worklist: &W) {
        worklist.push_all(
            (0..self.size())
                .filter(|&j| self.in_degree[j] == 0)
                .map(|j| WorkItem::new(j, self.jobs.durations[j])),
        );
    }

    fn is_forbidden(&self, state: &GlobalState<JobState>, index: usize) -> bool {
        !state.is_fixed(index) && self.ready(state, index)
    }

    fn advance<W: Worklist>(
        &self,
        state: &GlobalState<JobState>,
        index: usize,
        worklist: &W,
    ) -> Result<bool, SolveError> {
        let completion = self
            .start_time(state, index)
            .saturating_add(self.jobs.durations[index]);
        let changed = state
            .update(index, completion, LatticeOrder::Max)
            .is_updated();
        // Only the thread that fixes the job releases its successors.
        if !state.mark_fixed(index) {
            return Ok(changed);
        }
        let aux = &state.additional_state;
        for &c in self.jobs.graph.targets(index) {
            aux.max_from_parents[c].fetch_max(completion, Ordering::AcqRel);
            if aux.remaining_prereqs[c].fetch_sub(1, Ordering::AcqRel) == 1 {
                let start = aux.max_from_parents[c].load(Ordering::Acquire);
                worklist.push(WorkItem::new(
                    c,
                    start.saturating_add(self.jobs.durations[c]),
                ));
            }
        }
        Ok(true)
    }

    fn final_solution(&self, state: GlobalState<JobState>) -> Vec<u64> {
        state.into_values()
    }

    /// Jobs left unfixed after quiescence sit on a cycle.
    fn check_complete(&self, state: &GlobalState<JobState>) -> Result<(), SolveError> {
        match (0..self.size()).find(|&j| !state.is_fixed(j)) {
            None => Ok(()),
            Some(j) => Err(SolveError::MalformedInstance(format!(
                "job {j} never became ready; the precedence graph has a cycle"
            ))),
        }
    }
}

/// Per-job tightness check: `G[j] == max_{p in P(j)} G[p] + t_j`.
pub fn is_tight(jobs: &JobDag, completion: &[u64]) -> bool {
    let mut start = vec![0u64; completion.len()];
    for (u, v, _) in jobs.graph.edges() {
        start[v] = start[v].max(completion[u]);
    }
    (0..completion.len()).all(|j| completion[j] == start[j] + jobs.durations[j])
}
