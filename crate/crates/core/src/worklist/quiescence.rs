use std::sync::atomic::{fence, AtomicU64, Ordering};

use crossbeam_utils::CachePadded;

// Both counters share one word so a single load is a consistent snapshot.
// Low bits: in-flight items. High bits: pending items.
const IN_FLIGHT_BITS: u32 = 24;
const IN_FLIGHT_MASK: u64 = (1 << IN_FLIGHT_BITS) - 1;
const PENDING_UNIT: u64 = 1 << IN_FLIGHT_BITS;

/// Termination detector for concurrent worklists.
///
/// `pending` counts items pushed but not yet claimed; `in_flight` counts
/// items claimed whose `ensure` has not returned. Pushes made during an
/// `ensure` are published before that item finishes, so once both counters
/// read zero no further work can appear.
#[derive(Debug, Default)]
pub struct QuiescenceToken {
    state: CachePadded<AtomicU64>,
}

impl QuiescenceToken {
    pub fn new() -> Self {
        QuiescenceToken::default()
    }

    /// Must be called before the item becomes visible to poppers.
    #[inline]
    pub fn published(&self, count: u64) {
        self.state.fetch_add(count * PENDING_UNIT, Ordering::AcqRel);
    }

    /// A popped item moves from pending to in-flight.
    #[inline]
    pub fn claimed(&self) {
        self.state.fetch_sub(PENDING_UNIT - 1, Ordering::AcqRel);
    }

    /// The claimed item's `ensure` returned.
    #[inline]
    pub fn finished(&self) {
        self.state.fetch_sub(1, Ordering::AcqRel);
    }

    pub fn pending(&self) -> u64 {
        self.state.load(Ordering::Acquire) >> IN_FLIGHT_BITS
    }

    pub fn in_flight(&self) -> u64 {
        self.state.load(Ordering::Acquire) & IN_FLIGHT_MASK
    }

    /// True iff no item is pending or in flight. Checked twice around a full fence.
    pub fn quiesce(&self) -> bool {
        if self.state.load(Ordering::Acquire) != 0 {
            return false;
        }
        fence(Ordering::SeqCst);
        self.state.load(Ordering::Acquire) == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn idle_token_is_quiescent() {
        assert!(QuiescenceToken::new().quiesce());
    }

    #[test]
    fn in_flight_blocks_quiescence() {
        let token = QuiescenceToken::new();
        token.published(1);
        assert!(!token.quiesce());
        token.claimed();
        assert_eq!(token.pending(), 0);
        assert_eq!(token.in_flight(), 1);
        assert!(!token.quiesce());
        token.finished();
        assert!(token.quiesce());
    }

    #[test]
    fn counters_track_batches() {
        let token = QuiescenceToken::new();
        token.published(5);
        token.claimed();
        token.published(2);
        assert_eq!(token.pending(), 6);
        assert_eq!(token.in_flight(), 1);
    }
}
