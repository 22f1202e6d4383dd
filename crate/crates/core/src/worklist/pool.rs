use std::cell::RefCell;
use std::cmp::Reverse;
use std::collections::VecDeque;
use std::mem;
use std::sync::Mutex;

use crossbeam_deque::{Injector, Steal, Stealer, Worker};

use super::{BucketQueue, QuiescenceToken, Worklist, WorklistPolicy};
use crate::problem::{SolveError, WorkItem};

enum Shared {
    Injector(Injector<WorkItem>),
    Stealing {
        injector: Injector<WorkItem>,
        stealers: Vec<Stealer<WorkItem>>,
    },
    Chunked {
        pool: Injector<Vec<WorkItem>>,
        chunk_size: usize,
    },
    Buckets(BucketQueue),
}

/// The shared half of a concurrent worklist, plus its quiescence token.
///
/// Each worker thread takes one [`WorkerHandle`]; initial items go in
/// through a [`Seeder`] before workers start.
pub struct WorkPool {
    policy: WorklistPolicy,
    threads: usize,
    token: QuiescenceToken,
    shared: Shared,
    deques: Mutex<Vec<Option<Worker<WorkItem>>>>,
}

impl WorkPool {
    pub fn new(policy: WorklistPolicy, threads: usize) -> Result<Self, SolveError> {
        policy.validate().map_err(SolveError::InvalidConfig)?;
        if threads == 0 {
            return Err(SolveError::InvalidConfig("threads must be >= 1".into()));
        }
        let mut deques = Vec::new();
        let shared = match policy {
            WorklistPolicy::Null | WorklistPolicy::SeqBag => {
                return Err(SolveError::InvalidConfig(format!(
                    "worklist '{policy}' is single-threaded"
                )))
            }
            WorklistPolicy::SharedBag => Shared::Injector(Injector::new()),
            WorklistPolicy::PerThreadBag => {
                deques = (0..threads).map(|_| Some(Worker::new_lifo())).collect();
                let stealers = deques.iter().flatten().map(Worker::stealer).collect();
                Shared::Stealing {
                    injector: Injector::new(),
                    stealers,
                }
            }
            WorklistPolicy::ChunkedFifo { chunk_size } => Shared::Chunked {
                pool: Injector::new(),
                chunk_size,
            },
            WorklistPolicy::Buckets { num_buckets, delta } => {
                Shared::Buckets(BucketQueue::new(num_buckets, delta))
            }
        };
        Ok(WorkPool {
            policy,
            threads,
            token: QuiescenceToken::new(),
            shared,
            deques: Mutex::new(deques),
        })
    }

    pub fn policy(&self) -> WorklistPolicy {
        self.policy
    }

    pub fn token(&self) -> &QuiescenceToken {
        &self.token
    }

    pub fn threads(&self) -> usize {
        self.threads
    }

    /// Pushes into the shared structure; for seeding before workers start.
    pub fn seeder(&self) -> Seeder<'_> {
        Seeder {
            pool: self,
            chunk: RefCell::new(Vec::new()),
        }
    }

    /// Handle for worker `id`. Each id may be taken once.
    pub fn handle(&self, id: usize) -> WorkerHandle<'_> {
        assert!(
            id < self.threads,
            "worker id {id} out of range {}",
            self.threads
        );
        let local = match &self.shared {
            Shared::Stealing { .. } => {
                let worker = self.deques.lock().unwrap()[id]
                    .take()
                    .unwrap_or_else(|| panic!("handle {id} already taken"));
                Local::Deque {
                    worker,
                    scratch: RefCell::new(Vec::new()),
                }
            }
            Shared::Chunked { chunk_size, .. } => Local::Chunks {
                push: RefCell::new(Vec::with_capacity(*chunk_size)),
                pop: RefCell::new(VecDeque::new()),
            },
            Shared::Injector(_) | Shared::Buckets(_) => Local::Shared,
        };
        WorkerHandle {
            pool: self,
            id,
            local,
        }
    }

    fn push_shared(&self, item: WorkItem) {
        match &self.shared {
            Shared::Injector(injector) | Shared::Stealing { injector, .. } => injector.push(item),
            Shared::Buckets(queue) => queue.push(item),
            Shared::Chunked { pool, .. } => pool.push(vec![item]),
        }
    }
}

/// Seeding view of a [`WorkPool`]. Chunked pools seal partial chunks on drop.
pub struct Seeder<'a> {
    pool: &'a WorkPool,
    chunk: RefCell<Vec<WorkItem>>,
}

impl Worklist for Seeder<'_> {
    fn push(&self, item: WorkItem) {
        self.pool.token.published(1);
        match &self.pool.shared {
            Shared::Chunked { pool, chunk_size } => {
                let mut chunk = self.chunk.borrow_mut();
                chunk.push(item);
                if chunk.len() >= *chunk_size {
                    pool.push(mem::take(&mut *chunk));
                }
            }
            _ => self.pool.push_shared(item),
        }
    }
}

impl Drop for Seeder<'_> {
    fn drop(&mut self) {
        let rest = mem::take(self.chunk.get_mut());
        if !rest.is_empty() {
            if let Shared::Chunked { pool, .. } = &self.pool.shared {
                pool.push(rest);
            }
        }
    }
}

enum Local {
    Shared,
    Deque {
        worker: Worker<WorkItem>,
        scratch: RefCell<Vec<WorkItem>>,
    },
    Chunks {
        push: RefCell<Vec<WorkItem>>,
        pop: RefCell<VecDeque<WorkItem>>,
    },
}

/// One worker thread's view of a [`WorkPool`].
pub struct WorkerHandle<'a> {
    pool: &'a WorkPool,
    id: usize,
    local: Local,
}

impl WorkerHandle<'_> {
    pub fn id(&self) -> usize {
        self.id
    }

    pub fn token(&self) -> &QuiescenceToken {
        &self.pool.token
    }

    /// Next item by policy order. `None` means nothing was found right now,
    /// not that the run is over; consult the quiescence token for that.
    pub fn pop(&self) -> Option<WorkItem> {
        match (&self.local, &self.pool.shared) {
            (Local::Deque { worker, .. }, Shared::Stealing { injector, stealers }) => {
                worker.pop().or_else(|| loop {
                    let mut retry = false;
                    match injector.steal_batch_and_pop(worker) {
                        Steal::Success(item) => return Some(item),
                        Steal::Retry => retry = true,
                        Steal::Empty => {}
                    }
                    for (peer, stealer) in stealers.iter().enumerate() {
                        if peer == self.id {
                            continue;
                        }
                        match stealer.steal() {
                            Steal::Success(item) => return Some(item),
                            Steal::Retry => retry = true,
                            Steal::Empty => {}
                        }
                    }
                    if !retry {
                        return None;
                    }
                })
            }
            (Local::Chunks { push, pop }, Shared::Chunked { pool, .. }) => {
                let mut current = pop.borrow_mut();
                if let Some(item) = current.pop_front() {
                    return Some(item);
                }
                loop {
                    match pool.steal() {
                        Steal::Success(chunk) => {
                            *current = chunk.into();
                            if let Some(item) = current.pop_front() {
                                return Some(item);
                            }
                        }
                        Steal::Retry => continue,
                        Steal::Empty => break,
                    }
                }
                let own = mem::take(&mut *push.borrow_mut());
                *current = own.into();
                current.pop_front()
            }
            (_, Shared::Injector(injector)) => loop {
                match injector.steal() {
                    Steal::Success(item) => return Some(item),
                    Steal::Empty => return None,
                    Steal::Retry => continue,
                }
            },
            (_, Shared::Buckets(queue)) => queue.pop(),
            _ => unreachable!("handle does not match pool layout"),
        }
    }
}

impl Worklist for WorkerHandle<'_> {
    fn push(&self, item: WorkItem) {
        self.pool.token.published(1);
        match (&self.local, &self.pool.shared) {
            (Local::Deque { worker, .. }, _) => worker.push(item),
            (Local::Chunks { push, .. }, Shared::Chunked { pool, chunk_size }) => {
                let mut chunk = push.borrow_mut();
                chunk.push(item);
                if chunk.len() >= *chunk_size {
                    let sealed = mem::replace(&mut *chunk, Vec::with_capacity(*chunk_size));
                    pool.push(sealed);
                }
            }
            _ => self.pool.push_shared(item),
        }
    }

    fn push_all<I: IntoIterator<Item = WorkItem>>(&self, items: I) {
        match &self.local {
            // Highest priority value first, so the owner's LIFO pops the smallest next.
            Local::Deque { worker, scratch } => {
                let mut batch = scratch.borrow_mut();
                batch.clear();
                batch.extend(items);
                batch.sort_by_key(|item| Reverse(item.priority));
                self.pool.token.published(batch.len() as u64);
                for item in batch.drain(..) {
                    worker.push(item);
                }
            }
            _ => {
                for item in items {
                    self.push(item);
                }
            }
        }
    }
}
