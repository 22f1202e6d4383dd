//! Shared global state: atomically updated lattice coordinates, the fixed-state
//! bit vector, and work counters.
//!
//! Every coordinate only ever moves forward in its problem's lattice order.
//! [`monotone_update`] is the single primitive that enforces this: a stale
//! writer can lose a race but can never regress a cell.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

/// Sentinel for "unreached" in min-lattices. Additions saturate, so `INFINITY + w == INFINITY`.
pub const INFINITY: u64 = u64::MAX;

/// Direction in which a problem's coordinates advance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LatticeOrder {
    /// Values only decrease (distances, levels).
    Min,
    /// Values only increase (completion times, proposal indices, DP values).
    Max,
}

impl LatticeOrder {
    /// Returns true if `candidate` lies strictly further along the lattice than `current`.
    #[inline]
    pub fn improves(self, candidate: u64, current: u64) -> bool {
        match self {
            LatticeOrder::Min => candidate < current,
            LatticeOrder::Max => candidate > current,
        }
    }

    /// The lattice join of two values along this order.
    #[inline]
    pub fn join(self, a: u64, b: u64) -> u64 {
        match self {
            LatticeOrder::Min => a.min(b),
            LatticeOrder::Max => a.max(b),
        }
    }

    /// Returns true if moving from `before` to `after` does not go backwards.
    #[inline]
    pub fn is_monotone(self, before: u64, after: u64) -> bool {
        before == after || self.improves(after, before)
    }
}

/// Result of a [`monotone_update`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Update {
    /// The cell strictly improved; holds the displaced value.
    Updated(u64),
    /// The cell was already at or past the candidate; holds the value observed.
    Unchanged(u64),
}

impl Update {
    pub fn is_updated(self) -> bool {
        matches!(self, Update::Updated(_))
    }
}

/// Moves `cell` to `order.join(cell, candidate)` with a conditional-replace retry loop.
///
/// Each failed replace observes a value that another thread has already
/// improved, so the loop terminates.
#[inline]
pub fn monotone_update(cell: &AtomicU64, candidate: u64, order: LatticeOrder) -> Update {
    monotone_update_counted(cell, candidate, order).0
}

/// Like [`monotone_update`], also returning how many conditional replaces failed.
pub fn monotone_update_counted(
    cell: &AtomicU64,
    candidate: u64,
    order: LatticeOrder,
) -> (Update, u64) {
    let mut current = cell.load(Ordering::Acquire);
    let mut failures = 0;
    loop {
        if !order.improves(candidate, current) {
            return (Update::Unchanged(current), failures);
        }
        match cell.compare_exchange_weak(current, candidate, Ordering::AcqRel, Ordering::Acquire) {
            Ok(old) => return (Update::Updated(old), failures),
            Err(actual) => {
                current = actual;
                failures += 1;
            }
        }
    }
}

/// Lock-free bit vector of settled coordinates. Bits are set at most once and never cleared.
pub struct FixedVector {
    words: Box<[AtomicU64]>,
    len: usize,
}

impl FixedVector {
    pub fn new(len: usize) -> Self {
        let words = (0..len.div_ceil(64)).map(|_| AtomicU64::new(0)).collect();
        FixedVector { words, len }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Sets the bit; returns true iff this call moved it from unset to set.
    #[inline]
    pub fn set_fixed(&self, index: usize) -> bool {
        assert!(
            index < self.len,
            "fixed index {index} out of range {}",
            self.len
        );
        let mask = 1u64 << (index % 64);
        self.words[index / 64].fetch_or(mask, Ordering::AcqRel) & mask == 0
    }

    #[inline]
    pub fn is_fixed(&self, index: usize) -> bool {
        let mask = 1u64 << (index % 64);
        self.words[index / 64].load(Ordering::Acquire) & mask != 0
    }

    pub fn count(&self) -> usize {
        self.words
            .iter()
            .map(|w| w.load(Ordering::Acquire).count_ones() as usize)
            .sum()
    }

    pub fn all_fixed(&self) -> bool {
        self.count() == self.len
    }
}

impl fmt::Debug for FixedVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FixedVector")
            .field("len", &self.len)
            .field("fixed", &self.count())
            .finish()
    }
}

/// Work counters. Relaxed increments: exact single-threaded, possibly
/// undercounted when threads contend.
#[derive(Debug, Default)]
pub struct Stats {
    predicate_evaluations: AtomicU64,
    advances: AtomicU64,
    failed_updates: AtomicU64,
}

/// Plain copy of [`Stats`] taken after a solve.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StatsSnapshot {
    pub predicate_evaluations: u64,
    pub advances: u64,
    pub failed_updates: u64,
}

impl Stats {
    #[inline]
    pub fn record_evaluation(&self) {
        self.predicate_evaluations.fetch_add(1, Ordering::Relaxed);
    }

    #[inline]
    pub fn record_advance(&self) {
        self.advances.fetch_add(1, Ordering::Relaxed);
    }

    #[inline]
    pub fn record_failed_updates(&self, count: u64) {
        if count > 0 {
            self.failed_updates.fetch_add(count, Ordering::Relaxed);
        }
    }

    pub fn snapshot(&self) -> StatsSnapshot {
        StatsSnapshot {
            predicate_evaluations: self.predicate_evaluations.load(Ordering::Relaxed),
            advances: self.advances.load(Ordering::Relaxed),
            failed_updates: self.failed_updates.load(Ordering::Relaxed),
        }
    }
}

/// The global state `G` shared by all workers of one solve.
///
/// `A` is the problem-owned auxiliary state (prerequisite counters, DP
/// cells, reachability rows); all of it must be updated atomically.
pub struct GlobalState<A = ()> {
    pub solution_vector: Box<[AtomicU64]>,
    pub fixed_vector: FixedVector,
    pub additional_state: A,
    pub stats: Stats,
}

impl<A> GlobalState<A> {
    pub fn new(values: impl IntoIterator<Item = u64>, additional_state: A) -> Self {
        let solution_vector: Box<[AtomicU64]> = values.into_iter().map(AtomicU64::new).collect();
        let fixed_vector = FixedVector::new(solution_vector.len());
        GlobalState {
            solution_vector,
            fixed_vector,
            additional_state,
            stats: Stats::default(),
        }
    }

    pub fn len(&self) -> usize {
        self.solution_vector.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solution_vector.is_empty()
    }

    #[inline]
    pub fn read(&self, index: usize) -> u64 {
        self.solution_vector[index].load(Ordering::Acquire)
    }

    /// [`monotone_update`] on coordinate `index`, recording failed replaces in the stats.
    #[inline]
    pub fn update(&self, index: usize, candidate: u64, order: LatticeOrder) -> Update {
        let (outcome, failures) =
            monotone_update_counted(&self.solution_vector[index], candidate, order);
        self.stats.record_failed_updates(failures);
        outcome
    }

    /// Single conditional replace; `Err` carries the value actually found.
    #[inline]
    pub fn compare_and_swap(&self, index: usize, current: u64, new: u64) -> Result<u64, u64> {
        let outcome = self.solution_vector[index].compare_exchange(
            current,
            new,
            Ordering::AcqRel,
            Ordering::Acquire,
        );
        if outcome.is_err() {
            self.stats.record_failed_updates(1);
        }
        outcome
    }

    #[inline]
    pub fn mark_fixed(&self, index: usize) -> bool {
        self.fixed_vector.set_fixed(index)
    }

    #[inline]
    pub fn is_fixed(&self, index: usize) -> bool {
        self.fixed_vector.is_fixed(index)
    }

    pub fn snapshot(&self) -> Vec<u64> {
        self.solution_vector
            .iter()
            .map(|c| c.load(Ordering::Acquire))
            .collect()
    }

    pub fn into_values(self) -> Vec<u64> {
        self.solution_vector
            .into_vec()
            .into_iter()
            .map(AtomicU64::into_inner)
            .collect()
    }
}

impl<A> fmt::Debug for GlobalState<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GlobalState")
            .field("solution_vector", &self.snapshot())
            .field("fixed_vector", &self.fixed_vector)
            .field("stats", &self.stats.snapshot())
            .finish_non_exhaustive()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;
    use std::thread;

    #[test]
    fn min_update_lowers_infinity() {
        let cell = AtomicU64::new(INFINITY);
        assert_eq!(
            monotone_update(&cell, 3, LatticeOrder::Min),
            Update::Updated(INFINITY)
        );
        assert_eq!(cell.load(Ordering::Relaxed), 3);
    }

    #[test]
    fn stale_min_write_is_rejected() {
        let cell = AtomicU64::new(3);
        assert_eq!(
            monotone_update(&cell, 8, LatticeOrder::Min),
            Update::Unchanged(3)
        );
        assert_eq!(cell.load(Ordering::Relaxed), 3);
    }

    #[test]
    fn equal_candidate_is_unchanged() {
        let cell = AtomicU64::new(5);
        assert_eq!(
            monotone_update(&cell, 5, LatticeOrder::Min),
            Update::Unchanged(5)
        );
        assert_eq!(
            monotone_update(&cell, 5, LatticeOrder::Max),
            Update::Unchanged(5)
        );
    }

    #[test]
    fn max_update_raises() {
        let cell = AtomicU64::new(2);
        assert_eq!(
            monotone_update(&cell, 7, LatticeOrder::Max),
            Update::Updated(2)
        );
        assert_eq!(
            monotone_update(&cell, 4, LatticeOrder::Max),
            Update::Unchanged(7)
        );
    }

    #[test]
    fn mark_fixed_is_once() {
        let fixed = FixedVector::new(70);
        assert!(fixed.set_fixed(65));
        assert!(!fixed.set_fixed(65));
        assert!(fixed.is_fixed(65));
        assert!(!fixed.is_fixed(64));
        assert_eq!(fixed.count(), 1);
    }

    #[test]
    fn concurrent_mark_fixed_has_one_winner() {
        for _ in 0..200 {
            let fixed = Arc::new(FixedVector::new(8));
            let winners: usize = (0..8)
                .map(|_| {
                    let fixed = Arc::clone(&fixed);
                    thread::spawn(move || fixed.set_fixed(3) as usize)
                })
                .collect::<Vec<_>>()
                .into_iter()
                .map(|h| h.join().unwrap())
                .sum();
            assert_eq!(winners, 1);
        }
    }

    #[test]
    fn concurrent_min_updates_keep_the_minimum() {
        let cell = Arc::new(AtomicU64::new(INFINITY));
        let handles: Vec<_> = (0..4u64)
            .map(|t| {
                let cell = Arc::clone(&cell);
                thread::spawn(move || {
                    for k in (0..1000u64).rev() {
                        monotone_update(&cell, k * 4 + t + 10, LatticeOrder::Min);
                    }
                })
            })
            .collect();
        for h in handles {
            h.join().unwrap();
        }
        assert_eq!(cell.load(Ordering::Relaxed), 10);
    }

    #[test]
    fn stats_are_exact_single_threaded() {
        let state = GlobalState::new([INFINITY, INFINITY], ());
        state.stats.record_evaluation();
        state.stats.record_evaluation();
        state.stats.record_advance();
        assert!(state.update(0, 4, LatticeOrder::Min).is_updated());
        assert_eq!(state.compare_and_swap(1, 0, 1), Err(INFINITY));
        let snap = state.stats.snapshot();
        assert_eq!(snap.predicate_evaluations, 2);
        assert_eq!(snap.advances, 1);
        assert_eq!(snap.failed_updates, 1);
        assert_eq!(state.into_values(), vec![4, INFINITY]);
    }
}
