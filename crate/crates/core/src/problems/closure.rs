use std::borrow::Cow;
use std::sync::atomic::Ordering;

use crate::instances::CsrGraph;
use crate::problem::{LatticeLinearProblem, SolveError, WorkItem};
use crate::state::{GlobalState, LatticeOrder};
use crate::worklist::Worklist;

/// Transitive closure (non-empty paths) with one coordinate per row of the
/// reachability matrix. Rows are packed bit-words stored back to back in
/// the solution vector; row `u` spans words `u * words .. (u + 1) * words`.
///
/// Row `u` is forbidden when it reaches some `w` whose row is not a subset
/// of its own.
pub struct TransitiveClosure<'g> {
    graph: &'g CsrGraph,
    incoming: Cow<'g, CsrGraph>,
    words: usize,
}

/// Words per packed row for `n` vertices.
pub fn row_words(n: usize) -> usize {
    n.div_ceil(64)
}

/// Packed adjacency rows of `graph`, the closure's starting point.
pub fn adjacency_rows(graph: &CsrGraph) -> Vec<u64> {
    let n = graph.num_vertices();
    let words = row_words(n);
    let mut rows = vec![0u64; n * words];
    for (u, v, _) in graph.edges() {
        rows[u * words + v / 64] |= 1 << (v % 64);
    }
    rows
}

impl<'g> TransitiveClosure<'g> {
    pub fn new(graph: &'g CsrGraph) -> Self {
        let incoming = if graph.is_symmetric() {
            Cow::Borrowed(graph)
        } else {
            Cow::Owned(graph.transpose())
        };
        TransitiveClosure {
            graph,
            incoming,
            words: row_words(graph.num_vertices()),
        }
    }

    #[inline]
    fn word(&self, state: &GlobalState, row: usize, k: usize) -> u64 {
        state.read(row * self.words + k)
    }

    /// Columns set in `row`, from a snapshot taken word by word.
    fn reached(&self, state: &GlobalState, row: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for k in 0..self.words {
            let mut bits = self.word(state, row, k);
            while bits != 0 {
                out.push(k * 64 + bits.trailing_zeros() as usize);
                bits &= bits - 1;
            }
        }
        out
    }

    fn is_subset(&self, state: &GlobalState, sub: usize, sup: usize) -> bool {
        (0..self.words).all(|k| self.word(state, sub, k) & !self.word(state, sup, k) == 0)
    }

    /// ORs row `src` into row `dst`; true if any bit was new.
    fn merge(&self, state: &GlobalState, dst: usize, src: usize) -> bool {
        let mut changed = false;
        for k in 0..self.words {
            let bits = self.word(state, src, k);
            if bits == 0 {
                continue;
            }
            let before =
                state.solution_vector[dst * self.words + k].fetch_or(bits, Ordering::AcqRel);
            changed |= bits & !before != 0;
        }
        changed
    }
}

impl LatticeLinearProblem for TransitiveClosure<'_> {
    type State = ();

    fn size(&self) -> usize {
        self.graph.num_vertices()
    }

    fn order(&self) -> LatticeOrder {
        LatticeOrder::Max
    }

    fn init_global_state(&self) -> GlobalState {
        GlobalState::new(adjacency_rows(self.graph), ())
    }

    fn initial_states_to_process<W: Worklist>(&self, _state: &GlobalState, worklist: &W) {
        worklist.push_all((0..self.size()).map(WorkItem::from));
    }

    fn is_forbidden(&self, state: &GlobalState, index: usize) -> bool {
        self.reached(state, index)
            .into_iter()
            .any(|w| !self.is_subset(state, w, index))
    }

    /// Merges reached rows into row `index` until it is closed under the
    /// current rows, then re-queues every row that reaches `index`.
    fn advance<W: Worklist>(
        &self,
        state: &GlobalState,
        index: usize,
        worklist: &W,
    ) -> Result<bool, SolveError> {
        let mut changed = false;
        loop {
            let mut grew = false;
            for w in self.reached(state, index) {
                if w != index {
                    grew |= self.merge(state, index, w);
                }
            }
            if !grew {
                break;
            }
            changed = true;
        }
        if changed {
            worklist.push_all(
                self.incoming
                    .targets(index)
                    .iter()
                    .map(|&x| WorkItem::from(x)),
            );
        }
        Ok(changed)
    }

    fn final_solution(&self, state: GlobalState) -> Vec<u64> {
        state.into_values()
    }
}
