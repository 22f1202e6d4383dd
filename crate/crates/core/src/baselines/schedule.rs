use std::sync::atomic::{AtomicUsize, Ordering};

use crate::instances::JobDag;
use crate::par::Pool;
use crate::problem::SolveError;
use crate::problems::in_degrees;

fn cycle_error(done: usize, n: usize) -> SolveError {
    SolveError::MalformedInstance(format!(
        "only {done} of {n} jobs are schedulable; the precedence graph has a cycle"
    ))
}

/// Kahn's algorithm, computing completion times in dependency order.
pub fn topo_sort(jobs: &JobDag) -> Result<Vec<u64>, SolveError> {
    let n = jobs.durations.len();
    let mut remaining = in_degrees(&jobs.graph);
    let mut start = vec![0u64; n];
    let mut completion = vec![0u64; n];
    let mut ready: Vec<usize> = (0..n).filter(|&j| remaining[j] == 0).collect();
    let mut done = 0;
    while let Some(j) = ready.pop() {
        done += 1;
        completion[j] = start[j] + jobs.durations[j];
        for &c in jobs.graph.targets(j) {
            start[c] = start[c].max(completion[j]);
            remaining[c] -= 1;
            if remaining[c] == 0 {
                ready.push(c);
            }
        }
    }
    if done != n {
        return Err(cycle_error(done, n));
    }
    Ok(completion)
}

/// Level-synchronous variant: one topological frontier per round, the
/// frontier's jobs completed in parallel.
pub fn topo_levels(jobs: &JobDag, pool: &Pool) -> Result<Vec<u64>, SolveError> {
    let n = jobs.durations.len();
    let preds = jobs.graph.transpose();
    let remaining: Vec<AtomicUsize> = in_degrees(&jobs.graph)
        .into_iter()
        .map(AtomicUsize::new)
        .collect();
    let mut completion = vec![0u64; n];
    let mut frontier: Vec<usize> = (0..n)
        .filter(|&j| remaining[j].load(Ordering::Relaxed) == 0)
        .collect();
    let mut done = 0;
    while !frontier.is_empty() {
        done += frontier.len();
        let finished: Vec<u64> = pool
            .map_ranges(frontier.len(), |range| {
                frontier[range]
                    .iter()
                    .map(|&j| {
                        let start = preds
                            .targets(j)
                            .iter()
                            .map(|&p| completion[p])
                            .max()
                            .unwrap_or(0);
                        start + jobs.durations[j]
                    })
                    .collect::<Vec<_>>()
            })
            .concat();
        for (&j, &t) in frontier.iter().zip(&finished) {
            completion[j] = t;
        }
        frontier = pool
            .map_ranges(frontier.len(), |range| {
                let mut released = Vec::new();
                for &j in &frontier[range] {
                    for &c in jobs.graph.targets(j) {
                        if remaining[c].fetch_sub(1, Ordering::AcqRel) == 1 {
                            released.push(c);
                        }
                    }
                }
                released
            })
            .concat();
    }
    if done != n {
        return Err(cycle_error(done, n));
    }
    Ok(completion)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{generate, CsrGraph, Instance};

    #[test]
    fn diamond() {
        let jobs = JobDag {
            durations: vec![2, 3, 4, 1],
            graph: CsrGraph::from_edges(4, &[(0, 1, 1), (0, 2, 1), (1, 3, 1), (2, 3, 1)]),
        };
        assert_eq!(topo_sort(&jobs).unwrap(), vec![2, 5, 6, 7]);
        assert_eq!(
            topo_levels(&jobs, &Pool::new(2).unwrap()).unwrap(),
            vec![2, 5, 6, 7]
        );
    }

    #[test]
    fn levels_agree_with_kahn() {
        for seed in 0..20 {
            let Instance::Jobs(jobs) = generate(&"dag:n=80,p=0.1".parse().unwrap(), seed).unwrap()
            else {
                panic!()
            };
            assert_eq!(
                topo_levels(&jobs, &Pool::new(3).unwrap()).unwrap(),
                topo_sort(&jobs).unwrap()
            );
        }
    }

    #[test]
    fn cycle_detected() {
        let jobs = JobDag {
            durations: vec![1, 1],
            graph: CsrGraph::from_edges(2, &[(0, 1, 1), (1, 0, 1)]),
        };
        assert!(topo_sort(&jobs).is_err());
        assert!(topo_levels(&jobs, &Pool::sequential()).is_err());
    }
}
