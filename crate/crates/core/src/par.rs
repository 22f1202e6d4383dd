//! Fork-join helpers for data-parallel sweeps.
//!
//! With the `parallel` feature a [`Pool`] with more than one thread runs
//! on its own rayon pool. Without it, or with one thread, everything runs
//! inline on the caller, in range order.

use std::ops::Range;

use crate::problem::SolveError;

pub struct Pool {
    threads: usize,
    #[cfg(feature = "parallel")]
    inner: Option<rayon::ThreadPool>,
}

impl Pool {
    pub fn new(threads: usize) -> Result<Pool, SolveError> {
        if threads == 0 {
            return Err(SolveError::InvalidConfig("threads must be >= 1".into()));
        }
        #[cfg(feature = "parallel")]
        let inner = if threads > 1 {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .thread_name(|i| format!("llp-par-{i}"))
                .build()
                .map_err(|e| SolveError::InvalidConfig(format!("cannot build thread pool: {e}")))?;
            Some(pool)
        } else {
            None
        };
        Ok(Pool {
            threads,
            #[cfg(feature = "parallel")]
            inner,
        })
    }

    /// A pool that always runs inline, whatever the build features.
    pub fn sequential() -> Pool {
        Pool {
            threads: 1,
            #[cfg(feature = "parallel")]
            inner: None,
        }
    }

    pub fn threads(&self) -> usize {
        self.threads
    }

    pub fn is_parallel(&self) -> bool {
        #[cfg(feature = "parallel")]
        {
            self.inner.is_some()
        }
        #[cfg(not(feature = "parallel"))]
        {
            false
        }
    }

    /// Splits `0..n` into at most `threads` contiguous ranges of near-equal length.
    pub fn ranges(&self, n: usize) -> Vec<Range<usize>> {
        split(n, self.threads)
    }

    /// Runs `f` once per static range of `0..n`.
    pub fn for_each_range<F>(&self, n: usize, f: F)
    where
        F: Fn(Range<usize>) + Sync + Send,
    {
        self.map_ranges(n, f);
    }

    /// Runs `f` once per static range of `0..n`, results in range order.
    pub fn map_ranges<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(Range<usize>) -> T + Sync + Send,
    {
        let ranges = self.ranges(n);
        #[cfg(feature = "parallel")]
        if let Some(pool) = &self.inner {
            use rayon::prelude::*;
            return pool.install(|| ranges.into_par_iter().map(&f).collect());
        }
        ranges.into_iter().map(f).collect()
    }

    /// Runs `f(first_index, chunk)` over contiguous chunks of `items`,
    /// cut on multiples of `stride` elements.
    pub fn for_each_chunk_mut<T, F>(&self, items: &mut [T], stride: usize, f: F)
    where
        T: Send,
        F: Fn(usize, &mut [T]) + Sync + Send,
    {
        let stride = stride.max(1);
        let units = items.len() / stride;
        let per = units.div_ceil(self.threads.max(1)).max(1) * stride;
        #[cfg(feature = "parallel")]
        if let Some(pool) = &self.inner {
            use rayon::prelude::*;
            pool.install(|| {
                items
                    .par_chunks_mut(per)
                    .enumerate()
                    .for_each(|(i, chunk)| f(i * per, chunk))
            });
            return;
        }
        for (i, chunk) in items.chunks_mut(per).enumerate() {
            f(i * per, chunk);
        }
    }
}

fn split(n: usize, parts: usize) -> Vec<Range<usize>> {
    let parts = parts.clamp(1, n.max(1));
    let base = n / parts;
    let extra = n % parts;
    let mut start = 0;
    (0..parts)
        .map(|i| {
            let len = base + usize::from(i < extra);
            let r = start..start + len;
            start += len;
            r
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::atomic::{AtomicUsize, Ordering};

    #[test]
    fn split_covers_range_contiguously() {
        for n in 0..40 {
            for parts in 1..9 {
                let ranges = split(n, parts);
                assert!(ranges.len() <= parts.max(1));
                let mut next = 0;
                for r in &ranges {
                    assert_eq!(r.start, next);
                    next = r.end;
                }
                assert_eq!(next, n);
                let lens: Vec<_> = ranges.iter().map(|r| r.len()).collect();
                assert!(lens.iter().max().unwrap() - lens.iter().min().unwrap() <= 1);
            }
        }
    }

    #[test]
    fn map_ranges_preserves_order() {
        for threads in [1, 3, 4] {
            let pool = Pool::new(threads).unwrap();
            let sums = pool.map_ranges(100, |r| r.sum::<usize>());
            assert_eq!(sums.iter().sum::<usize>(), 4950);
            let starts = pool.map_ranges(100, |r| r.start);
            assert!(starts.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn chunks_respect_stride() {
        let pool = Pool::new(3).unwrap();
        let mut items = vec![0usize; 40];
        let calls = AtomicUsize::new(0);
        pool.for_each_chunk_mut(&mut items, 8, |first, chunk| {
            assert_eq!(first % 8, 0);
            assert_eq!(chunk.len() % 8, 0);
            calls.fetch_add(1, Ordering::Relaxed);
            for (i, x) in chunk.iter_mut().enumerate() {
                *x = first + i;
            }
        });
        assert!(calls.load(Ordering::Relaxed) >= 1);
        assert_eq!(items, (0..40).collect::<Vec<_>>());
    }

    #[test]
    fn zero_threads_rejected() {
        assert!(Pool::new(0).is_err());
        assert!(!Pool::sequential().is_parallel());
    }
}
