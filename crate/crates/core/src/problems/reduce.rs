use std::sync::atomic::{AtomicU8, Ordering};

use crate::problem::{LatticeLinearProblem, SolveError, WorkItem};
use crate::state::{GlobalState, LatticeOrder};
use crate::worklist::Worklist;

/// Sum over a complete binary combine tree in heap layout: node `i` has
/// children `2i + 1` and `2i + 2`, leaves hold the inputs padded with 0 up
/// to a power of two. An internal node is forbidden once both children have
/// published and it has not published itself.
///
/// The solution is the whole tree; index 0 is the total.
pub struct Reduction<'a> {
    inputs: &'a [u64],
    leaves: usize,
}

pub struct ReduceState {
    unpublished_children: Box<[AtomicU8]>,
}

impl<'a> Reduction<'a> {
    pub fn new(inputs: &'a [u64]) -> Self {
        Reduction {
            inputs,
            leaves: inputs.len().max(1).next_power_of_two(),
        }
    }

    /// Index of the first leaf.
    #[inline]
    fn first_leaf(&self) -> usize {
        self.leaves - 1
    }

    #[inline]
    fn is_internal(&self, node: usize) -> bool {
        node < self.first_leaf()
    }

    /// Internal nodes whose children are both leaves.
    fn bottom_internal(&self) -> std::ops::Range<usize> {
        (self.leaves / 2).saturating_sub(1)..self.first_leaf()
    }
}

/// Total number of tree nodes for `n` inputs.
pub fn tree_len(n: usize) -> usize {
    2 * n.max(1).next_power_of_two() - 1
}

impl LatticeLinearProblem for Reduction<'_> {
    type State = ReduceState;

    fn size(&self) -> usize {
        2 * self.leaves - 1
    }

    fn order(&self) -> LatticeOrder {
        LatticeOrder::Max
    }

    fn init_global_state(&self) -> GlobalState<ReduceState> {
        let first_leaf = self.first_leaf();
        let values = (0..self.size()).map(|i| {
            if i < first_leaf {
                0
            } else {
                self.inputs.get(i - first_leaf).copied().unwrap_or(0)
            }
        });
        let bottom = self.bottom_internal();
        let aux = ReduceState {
            unpublished_children: (0..first_leaf)
                .map(|i| AtomicU8::new(if bottom.contains(&i) { 0 } else { 2 }))
                .collect(),
        };
        let state = GlobalState::new(values, aux);
        for leaf in first_leaf..self.size() {
            state.mark_fixed(leaf);
        }
        state
    }

    fn initial_states_to_process<W: Worklist>(
        &self,
        _state: &GlobalState<ReduceState>,
        worklist: &W,
    ) {
        worklist.push_all(self.bottom_internal().map(WorkItem::from));
    }

    fn is_forbidden(&self, state: &GlobalState<ReduceState>, index: usize) -> bool {
        self.is_internal(index)
            && !state.is_fixed(index)
            && state.additional_state.unpublished_children[index].load(Ordering::Acquire) == 0
    }

    fn advance<W: Worklist>(
        &self,
        state: &GlobalState<ReduceState>,
        index: usize,
        worklist: &W,
    ) -> Result<bool, SolveError> {
        let sum = state
            .read(2 * index + 1)
            .wrapping_add(state.read(2 * index + 2));
        let changed = state.update(index, sum, LatticeOrder::Max).is_updated();
        if !state.mark_fixed(index) {
            return Ok(changed);
        }
        if index > 0 {
            let parent = (index - 1) / 2;
            if state.additional_state.unpublished_children[parent].fetch_sub(1, Ordering::AcqRel)
                == 1
            {
                worklist.push(WorkItem::from(parent));
            }
        }
        Ok(true)
    }

    fn final_solution(&self, state: GlobalState<ReduceState>) -> Vec<u64> {
        state.into_values()
    }

    fn check_complete(&self, state: &GlobalState<ReduceState>) -> Result<(), SolveError> {
        if state.fixed_vector.all_fixed() {
            Ok(())
        } else {
            Err(SolveError::MalformedInstance(
                "reduction tree left unpublished nodes".into(),
            ))
        }
    }
}
