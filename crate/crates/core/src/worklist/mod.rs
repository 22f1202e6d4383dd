//! Scheduling policies behind one push/pop contract.
//!
//! Pushing is done through the [`Worklist`] trait, which is what problem
//! adapters see. Popping is policy-specific: single-threaded bags pop
//! directly, concurrent policies pop through a per-worker [`WorkerHandle`].
//! Duplicate pushes are allowed; stale items are filtered when popped by
//! re-checking forbiddenness.

mod buckets;
mod pool;
mod quiescence;

use std::cell::RefCell;
use std::fmt;
use std::str::FromStr;

pub use buckets::{bucket_index, BucketQueue};
pub use pool::{Seeder, WorkPool, WorkerHandle};
pub use quiescence::QuiescenceToken;

use crate::instances::Prng;
use crate::problem::WorkItem;

pub const DEFAULT_NUM_BUCKETS: usize = 1024;
pub const DEFAULT_CHUNK_SIZE: usize = 64;

/// Sink for work items produced by an advance.
pub trait Worklist {
    fn push(&self, item: WorkItem);

    fn push_all<I: IntoIterator<Item = WorkItem>>(&self, items: I)
    where
        Self: Sized,
    {
        for item in items {
            self.push(item);
        }
    }
}

/// Discards everything. Used by solvers that scan all indices anyway.
#[derive(Clone, Copy, Debug, Default)]
pub struct NullWorklist;

impl Worklist for NullWorklist {
    #[inline]
    fn push(&self, _item: WorkItem) {}
}

impl NullWorklist {
    pub fn pop(&self) -> Option<WorkItem> {
        None
    }
}

/// Single-threaded LIFO bag, optionally popping in a seeded random order.
#[derive(Debug, Default)]
pub struct SeqBag {
    items: RefCell<Vec<WorkItem>>,
    shuffle: Option<RefCell<Prng>>,
}

impl SeqBag {
    pub fn new() -> Self {
        SeqBag::default()
    }

    /// A bag whose pops pick a uniformly random element.
    pub fn randomized(seed: u64) -> Self {
        SeqBag {
            items: RefCell::new(Vec::new()),
            shuffle: Some(RefCell::new(Prng::new(seed))),
        }
    }

    pub fn pop(&self) -> Option<WorkItem> {
        let mut items = self.items.borrow_mut();
        match &self.shuffle {
            None => items.pop(),
            Some(rng) if !items.is_empty() => {
                let pick = rng.borrow_mut().below(items.len() as u64) as usize;
                Some(items.swap_remove(pick))
            }
            Some(_) => None,
        }
    }

    pub fn len(&self) -> usize {
        self.items.borrow().len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.borrow().is_empty()
    }
}

impl Worklist for SeqBag {
    #[inline]
    fn push(&self, item: WorkItem) {
        self.items.borrow_mut().push(item);
    }
}

/// Which scheduling structure a solve uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WorklistPolicy {
    Null,
    SeqBag,
    /// One global injector queue (SWB).
    SharedBag,
    /// Per-thread LIFO deques with an injector and peer stealing (PTWB).
    PerThreadBag,
    /// Per-thread chunks sealed into a global chunk pool (PTCF).
    ChunkedFifo {
        chunk_size: usize,
    },
    /// Priority buckets `floor(priority / delta) mod num_buckets`.
    Buckets {
        num_buckets: usize,
        delta: u64,
    },
}

impl WorklistPolicy {
    pub fn name(&self) -> &'static str {
        match self {
            WorklistPolicy::Null => "null",
            WorklistPolicy::SeqBag => "seqbag",
            WorklistPolicy::SharedBag => "swb",
            WorklistPolicy::PerThreadBag => "ptwb",
            WorklistPolicy::ChunkedFifo { .. } => "ptcf",
            WorklistPolicy::Buckets { .. } => "buckets",
        }
    }

    pub fn is_concurrent(&self) -> bool {
        !matches!(self, WorklistPolicy::Null | WorklistPolicy::SeqBag)
    }

    pub fn validate(&self) -> Result<(), String> {
        match *self {
            WorklistPolicy::ChunkedFifo { chunk_size: 0 } => Err("chunk_size must be >= 1".into()),
            WorklistPolicy::Buckets { num_buckets: 0, .. } => {
                Err("num_buckets must be >= 1".into())
            }
            WorklistPolicy::Buckets { delta: 0, .. } => Err("delta must be >= 1".into()),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for WorklistPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for WorklistPolicy {
    type Err = String;

    /// Parses a policy name with default parameters.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "null" => WorklistPolicy::Null,
            "seqbag" => WorklistPolicy::SeqBag,
            "swb" => WorklistPolicy::SharedBag,
            "ptwb" => WorklistPolicy::PerThreadBag,
            "ptcf" => WorklistPolicy::ChunkedFifo {
                chunk_size: DEFAULT_CHUNK_SIZE,
            },
            "buckets" => WorklistPolicy::Buckets {
                num_buckets: DEFAULT_NUM_BUCKETS,
                delta: 1,
            },
            other => return Err(format!("unknown worklist '{other}'")),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn null_worklist_never_yields() {
        let wl = NullWorklist;
        wl.push(WorkItem::new(3, 1));
        assert_eq!(wl.pop(), None);
    }

    #[test]
    fn seq_bag_is_lifo() {
        let bag = SeqBag::new();
        bag.push_all([WorkItem::new(1, 0), WorkItem::new(2, 0)]);
        assert_eq!(bag.pop().unwrap().index, 2);
        assert_eq!(bag.pop().unwrap().index, 1);
        assert!(bag.pop().is_none());
    }

    #[test]
    fn randomized_bag_returns_every_item_once() {
        let bag = SeqBag::randomized(11);
        bag.push_all((0..50).map(WorkItem::from));
        let mut seen: Vec<usize> = std::iter::from_fn(|| bag.pop()).map(|i| i.index).collect();
        seen.sort_unstable();
        assert_eq!(seen, (0..50).collect::<Vec<_>>());
    }

    #[test]
    fn policy_names_round_trip() {
        for name in ["null", "seqbag", "swb", "ptwb", "ptcf", "buckets"] {
            let policy: WorklistPolicy = name.parse().unwrap();
            assert_eq!(policy.name(), name);
        }
        assert!("fifo".parse::<WorklistPolicy>().is_err());
    }

    #[test]
    fn policy_validation() {
        assert!(WorklistPolicy::Buckets {
            num_buckets: 0,
            delta: 1
        }
        .validate()
        .is_err());
        assert!(WorklistPolicy::Buckets {
            num_buckets: 4,
            delta: 0
        }
        .validate()
        .is_err());
        assert!(WorklistPolicy::ChunkedFifo { chunk_size: 0 }
            .validate()
            .is_err());
        assert!(WorklistPolicy::PerThreadBag.validate().is_ok());
    }
}
