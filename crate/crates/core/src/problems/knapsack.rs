use std::ops::Range;

use crate::instances::KnapsackItems;
use crate::problem::{LatticeLinearProblem, SolveError, WorkItem};
use crate::state::{GlobalState, LatticeOrder};
use crate::worklist::Worklist;

pub const DEFAULT_TILE_WIDTH: usize = 256;

/// 0/1 knapsack DP `G[k, c] = max(G[k-1, c], v_k + G[k-1, c - w_k])`,
/// tiled by capacity strips. Row 0 is implicitly zero; rows `1..=n` are
/// stored back to back, `C + 1` cells each. Tile `t` covers item
/// `k = t / strips + 1` and capacities `strip * width .. (strip + 1) * width`.
///
/// A tile is forbidden when any of its cells lies below the recurrence
/// applied to the current row `k - 1`. The solution is the last row.
pub struct Knapsack<'a> {
    items: &'a KnapsackItems,
    width: usize,
    cols: usize,
    strips: usize,
}

impl<'a> Knapsack<'a> {
    pub fn new(items: &'a KnapsackItems, tile_width: usize) -> Result<Self, SolveError> {
        if tile_width == 0 {
            return Err(SolveError::InvalidConfig("tile width must be >= 1".into()));
        }
        if items.weights.len() != items.values.len() {
            return Err(SolveError::MalformedInstance(
                "weights and values differ in length".into(),
            ));
        }
        let cols = usize::try_from(items.capacity)
            .ok()
            .and_then(|c| c.checked_add(1))
            .filter(|&cols| cols.checked_mul(items.len().max(1)).is_some())
            .ok_or_else(|| {
                SolveError::MalformedInstance(format!("capacity {} too large", items.capacity))
            })?;
        Ok(Knapsack {
            items,
            width: tile_width,
            cols,
            strips: cols.div_ceil(tile_width),
        })
    }

    #[inline]
    fn tile(&self, index: usize) -> (usize, Range<usize>) {
        let k = index / self.strips + 1;
        let strip = index % self.strips;
        let start = strip * self.width;
        (k, start..(start + self.width).min(self.cols))
    }

    #[inline]
    fn cell(&self, state: &GlobalState, k: usize, c: usize) -> u64 {
        if k == 0 {
            0
        } else {
            state.read((k - 1) * self.cols + c)
        }
    }

    #[inline]
    fn target(&self, state: &GlobalState, k: usize, c: usize) -> u64 {
        let skip = self.cell(state, k - 1, c);
        let w = self.items.weights[k - 1];
        match usize::try_from(w).ok().and_then(|w| c.checked_sub(w)) {
            Some(rest) => {
                skip.max(self.items.values[k - 1].saturating_add(self.cell(state, k - 1, rest)))
            }
            None => skip,
        }
    }

    /// Tiles of row `k + 1` that read any capacity in `changed` of row `k`.
    fn dependents(&self, k: usize, changed: Range<usize>) -> Vec<WorkItem> {
        if k >= self.items.len() {
            return Vec::new();
        }
        let strip_of = |c: usize| c / self.width;
        let mut strips: Vec<usize> =
            (strip_of(changed.start)..=strip_of(changed.end - 1)).collect();
        // Row k + 1 also reads capacity c - w from row k.
        let shift = usize::try_from(self.items.weights[k]).unwrap_or(usize::MAX);
        if let Some(lo) = changed
            .start
            .checked_add(shift)
            .filter(|&lo| lo < self.cols)
        {
            let hi = (changed.end - 1).saturating_add(shift).min(self.cols - 1);
            strips.extend(strip_of(lo)..=strip_of(hi));
            strips.sort_unstable();
            strips.dedup();
        }
        let base = k * self.strips;
        strips
            .into_iter()
            .map(|s| WorkItem::new(base + s, k as u64 + 1))
            .collect()
    }
}

impl LatticeLinearProblem for Knapsack<'_> {
    type State = ();

    fn size(&self) -> usize {
        self.items.len() * self.strips
    }

    fn order(&self) -> LatticeOrder {
        LatticeOrder::Max
    }

    fn init_global_state(&self) -> GlobalState {
        GlobalState::new(std::iter::repeat_n(0, self.items.len() * self.cols), ())
    }

    fn initial_states_to_process<W: Worklist>(&self, _state: &GlobalState, worklist: &W) {
        worklist.push_all((0..self.size()).map(|t| WorkItem::new(t, (t / self.strips) as u64 + 1)));
    }

    fn is_forbidden(&self, state: &GlobalState, index: usize) -> bool {
        let (k, caps) = self.tile(index);
        caps.into_iter()
            .any(|c| self.cell(state, k, c) < self.target(state, k, c))
    }

    fn advance<W: Worklist>(
        &self,
        state: &GlobalState,
        index: usize,
        worklist: &W,
    ) -> Result<bool, SolveError> {
        let (k, caps) = self.tile(index);
        let mut first = usize::MAX;
        let mut last = 0;
        for c in caps {
            let target = self.target(state, k, c);
            if state
                .update((k - 1) * self.cols + c, target, LatticeOrder::Max)
                .is_updated()
            {
                first = first.min(c);
                last = c;
            }
        }
        if first == usize::MAX {
            return Ok(false);
        }
        worklist.push_all(self.dependents(k, first..last + 1));
        Ok(true)
    }

    fn final_solution(&self, state: GlobalState) -> Vec<u64> {
        let n = self.items.len();
        if n == 0 {
            return vec![0; self.cols];
        }
        let mut values = state.into_values();
        values.drain(..(n - 1) * self.cols);
        values
    }
}

/// Best value over all subsets, by enumeration. For small `n` only.
pub fn exhaustive_best(items: &KnapsackItems) -> u64 {
    let n = items.len();
    assert!(n <= 24, "exhaustive enumeration of {n} items");
    (0u32..1 << n)
        .filter_map(|mask| {
            let (w, v) = (0..n)
                .filter(|i| mask >> i & 1 == 1)
                .fold((0u64, 0u64), |(w, v), i| {
                    (w + items.weights[i], v + items.values[i])
                });
            (w <= items.capacity).then_some(v)
        })
        .max()
        .unwrap_or(0)
}
