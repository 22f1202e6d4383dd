use std::sync::atomic::{AtomicUsize, Ordering};

use crossbeam_queue::SegQueue;

use crate::problem::WorkItem;

/// Bucket for `priority`: `floor(priority / delta) mod num_buckets`.
#[inline]
pub fn bucket_index(priority: u64, delta: u64, num_buckets: usize) -> usize {
    ((priority / delta) % num_buckets as u64) as usize
}

/// Lock-free bucketed multiset. Pops come from the lowest non-empty bucket
/// as observed at pop time; under concurrency this is approximate.
pub struct BucketQueue {
    buckets: Box<[SegQueue<WorkItem>]>,
    delta: u64,
    // Lowest bucket that may be non-empty. Only a hint: pops fall back to a full scan.
    hint: AtomicUsize,
}

impl BucketQueue {
    pub fn new(num_buckets: usize, delta: u64) -> Self {
        assert!(num_buckets >= 1 && delta >= 1);
        BucketQueue {
            buckets: (0..num_buckets).map(|_| SegQueue::new()).collect(),
            delta,
            hint: AtomicUsize::new(0),
        }
    }

    pub fn num_buckets(&self) -> usize {
        self.buckets.len()
    }

    pub fn delta(&self) -> u64 {
        self.delta
    }

    pub fn push(&self, item: WorkItem) {
        let b = bucket_index(item.priority, self.delta, self.buckets.len());
        self.buckets[b].push(item);
        self.hint.fetch_min(b, Ordering::AcqRel);
    }

    pub fn pop(&self) -> Option<WorkItem> {
        let start = self
            .hint
            .load(Ordering::Acquire)
            .min(self.buckets.len() - 1);
        for b in (start..self.buckets.len()).chain(0..start) {
            if let Some(item) = self.buckets[b].pop() {
                if b > start {
                    let _ =
                        self.hint
                            .compare_exchange(start, b, Ordering::AcqRel, Ordering::Relaxed);
                }
                return Some(item);
            }
        }
        None
    }

    pub fn is_empty(&self) -> bool {
        self.buckets.iter().all(SegQueue::is_empty)
    }

    pub fn len(&self) -> usize {
        self.buckets.iter().map(SegQueue::len).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bucket_arithmetic() {
        assert_eq!(bucket_index(0, 4, 1024), 0);
        assert_eq!(bucket_index(7, 4, 1024), 1);
        // floor(4097 * 4 / 4) mod 1024 = 4097 mod 1024 = 1
        assert_eq!(bucket_index(4097 * 4, 4, 1024), 1);
    }

    #[test]
    fn pops_lowest_bucket_first() {
        let q = BucketQueue::new(1024, 4);
        q.push(WorkItem::new(5, 9));
        q.push(WorkItem::new(2, 1));
        assert_eq!(q.pop().unwrap().index, 2);
        assert_eq!(q.pop().unwrap().index, 5);
        assert!(q.pop().is_none());
    }

    #[test]
    fn low_push_after_high_pop_is_found_first() {
        let q = BucketQueue::new(16, 1);
        q.push(WorkItem::new(0, 9));
        q.push(WorkItem::new(1, 12));
        assert_eq!(q.pop().unwrap().index, 0);
        q.push(WorkItem::new(2, 3));
        assert_eq!(q.pop().unwrap().index, 2);
        assert_eq!(q.pop().unwrap().index, 1);
        assert!(q.is_empty());
    }
}
