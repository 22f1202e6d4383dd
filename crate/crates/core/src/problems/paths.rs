use std::borrow::Cow;

use crate::instances::CsrGraph;
use crate::problem::{LatticeLinearProblem, SolveError, WorkItem};
use crate::state::{GlobalState, LatticeOrder, INFINITY};
use crate::worklist::Worklist;

/// Distances from a source over non-negative weights. Forbidden: some
/// in-neighbor offers a shorter path, `d(v) > d(u) + w(u, v)`.
pub struct Sssp<'g> {
    paths: Relaxation<'g>,
}

/// Hop levels from a source: SSSP with every weight 1 and no priority hint.
pub struct Bfs<'g> {
    paths: Relaxation<'g>,
}

struct Relaxation<'g> {
    graph: &'g CsrGraph,
    incoming: Cow<'g, CsrGraph>,
    source: usize,
    unit: bool,
}

impl<'g> Relaxation<'g> {
    fn new(graph: &'g CsrGraph, source: usize, unit: bool) -> Result<Self, SolveError> {
        if source >= graph.num_vertices() {
            return Err(SolveError::MalformedInstance(format!(
                "source {source} outside a graph of {} vertices",
                graph.num_vertices()
            )));
        }
        let incoming = if graph.is_symmetric() {
            Cow::Borrowed(graph)
        } else {
            Cow::Owned(graph.transpose())
        };
        Ok(Relaxation {
            graph,
            incoming,
            source,
            unit,
        })
    }

    #[inline]
    fn weight(&self, w: u64) -> u64 {
        if self.unit {
            1
        } else {
            w
        }
    }

    /// Best distance to `v` offered by its in-neighbors.
    #[inline]
    fn candidate(&self, state: &GlobalState, v: usize) -> u64 {
        self.incoming
            .neighbors(v)
            .map(|(u, w)| state.read(u).saturating_add(self.weight(w)))
            .min()
            .unwrap_or(INFINITY)
    }

    fn init(&self) -> GlobalState {
        let n = self.graph.num_vertices();
        GlobalState::new(
            (0..n).map(|v| if v == self.source { 0 } else { INFINITY }),
            (),
        )
    }

    fn seed<W: Worklist>(&self, worklist: &W) {
        let push = self
            .graph
            .neighbors(self.source)
            .map(|(v, w)| WorkItem::new(v, self.priority(self.weight(w))));
        worklist.push_all(push);
    }

    #[inline]
    fn priority(&self, distance: u64) -> u64 {
        if self.unit {
            0
        } else {
            distance
        }
    }

    #[inline]
    fn is_forbidden(&self, state: &GlobalState, v: usize) -> bool {
        v != self.source && self.candidate(state, v) < state.read(v)
    }

    fn advance<W: Worklist>(&self, state: &GlobalState, v: usize, worklist: &W) -> bool {
        if v == self.source {
            return false;
        }
        let best = self.candidate(state, v);
        if !state.update(v, best, LatticeOrder::Min).is_updated() {
            return false;
        }
        let priority = self.priority(best);
        worklist.push_all(
            self.graph
                .targets(v)
                .iter()
                .map(|&u| WorkItem::new(u, priority)),
        );
        true
    }
}

impl<'g> Sssp<'g> {
    pub fn new(graph: &'g CsrGraph, source: usize) -> Result<Self, SolveError> {
        Ok(Sssp {
            paths: Relaxation::new(graph, source, false)?,
        })
    }
}

impl<'g> Bfs<'g> {
    pub fn new(graph: &'g CsrGraph, source: usize) -> Result<Self, SolveError> {
        Ok(Bfs {
            paths: Relaxation::new(graph, source, true)?,
        })
    }
}

macro_rules! relaxation_problem {
    ($ty:ident) => {
        impl LatticeLinearProblem for $ty<'_> {
            type State = ();

            fn size(&self) -> usize {
                self.paths.graph.num_vertices()
            }

            fn order(&self) -> LatticeOrder {
                LatticeOrder::Min
            }

            fn init_global_state(&self) -> GlobalState {
                self.paths.init()
            }

            fn initial_states_to_process<W: Worklist>(&self, _state: &GlobalState, worklist: &W) {
                self.paths.seed(worklist);
            }

            fn is_forbidden(&self, state: &GlobalState, index: usize) -> bool {
                self.paths.is_forbidden(state, index)
            }

            fn advance<W: Worklist>(
                &self,
                state: &GlobalState,
                index: usize,
                worklist: &W,
            ) -> Result<bool, SolveError> {
                Ok(self.paths.advance(state, index, worklist))
            }

            fn final_solution(&self, state: GlobalState) -> Vec<u64> {
                state.into_values()
            }
        }
    };
}

relaxation_problem!(Sssp);
relaxation_problem!(Bfs);
