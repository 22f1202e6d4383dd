use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, VecDeque};
use std::sync::atomic::{AtomicU64, Ordering};

use crossbeam_queue::SegQueue;

use crate::instances::CsrGraph;
use crate::par::Pool;
use crate::problem::SolveError;
use crate::state::INFINITY;

/// Binary-heap Dijkstra with lazy deletion.
pub fn dijkstra(graph: &CsrGraph, source: usize) -> Vec<u64> {
    let mut dist = vec![INFINITY; graph.num_vertices()];
    let mut heap = BinaryHeap::new();
    dist[source] = 0;
    heap.push(Reverse((0u64, source)));
    while let Some(Reverse((d, u))) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for (v, w) in graph.neighbors(u) {
            let nd = d.saturating_add(w);
            if nd < dist[v] {
                dist[v] = nd;
                heap.push(Reverse((nd, v)));
            }
        }
    }
    dist
}

/// Smallest power of two at or above the median edge weight.
pub fn default_delta(graph: &CsrGraph) -> u64 {
    graph.median_weight().next_power_of_two()
}

/// Δ-stepping: vertices are bucketed by `d / delta`; the lowest bucket is
/// settled with repeated light-edge phases, then heavy edges are relaxed
/// once. Relaxation requests are generated in parallel and applied in order.
pub fn delta_stepping(
    graph: &CsrGraph,
    source: usize,
    delta: u64,
    pool: &Pool,
) -> Result<Vec<u64>, SolveError> {
    if delta == 0 {
        return Err(SolveError::InvalidConfig("delta must be >= 1".into()));
    }
    let n = graph.num_vertices();
    let mut dist = vec![INFINITY; n];
    let mut buckets: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    dist[source] = 0;
    buckets.entry(0).or_default().push(source);

    let requests = |dist: &[u64], frontier: &[usize], light: bool| -> Vec<(usize, u64)> {
        pool.map_ranges(frontier.len(), |range| {
            let mut out = Vec::new();
            for &u in &frontier[range] {
                for (v, w) in graph.neighbors(u) {
                    if (w <= delta) == light {
                        out.push((v, dist[u].saturating_add(w)));
                    }
                }
            }
            out
        })
        .concat()
    };
    let relax =
        |dist: &mut [u64], buckets: &mut BTreeMap<u64, Vec<usize>>, reqs: Vec<(usize, u64)>| {
            for (v, nd) in reqs {
                if nd < dist[v] {
                    dist[v] = nd;
                    buckets.entry(nd / delta).or_default().push(v);
                }
            }
        };

    while let Some(b) = buckets.keys().next().copied() {
        let mut settled = Vec::new();
        while let Some(mut frontier) = buckets.remove(&b) {
            frontier.retain(|&v| dist[v] / delta == b);
            frontier.sort_unstable();
            frontier.dedup();
            let reqs = requests(&dist, &frontier, true);
            settled.extend_from_slice(&frontier);
            relax(&mut dist, &mut buckets, reqs);
        }
        settled.sort_unstable();
        settled.dedup();
        let reqs = requests(&dist, &settled, false);
        relax(&mut dist, &mut buckets, reqs);
    }
    Ok(dist)
}

/// Queue BFS levels; unreachable vertices stay at infinity.
pub fn bfs_seq(graph: &CsrGraph, source: usize) -> Vec<u64> {
    let mut level = vec![INFINITY; graph.num_vertices()];
    let mut queue = VecDeque::from([source]);
    level[source] = 0;
    while let Some(u) = queue.pop_front() {
        for &v in graph.targets(u) {
            if level[v] == INFINITY {
                level[v] = level[u] + 1;
                queue.push_back(v);
            }
        }
    }
    level
}

/// Level-synchronous BFS whose frontier is one shared lock-free FIFO that
/// all workers drain; vertices are claimed with a conditional replace.
pub fn bfs_mt_queue(graph: &CsrGraph, source: usize, pool: &Pool) -> Vec<u64> {
    let level: Vec<AtomicU64> = (0..graph.num_vertices())
        .map(|_| AtomicU64::new(INFINITY))
        .collect();
    level[source].store(0, Ordering::Relaxed);
    let mut current = SegQueue::new();
    current.push(source);
    let mut depth = 0u64;
    while !current.is_empty() {
        let next = SegQueue::new();
        pool.for_each_range(pool.threads(), |_| {
            while let Some(u) = current.pop() {
                for &v in graph.targets(u) {
                    if level[v]
                        .compare_exchange(INFINITY, depth + 1, Ordering::AcqRel, Ordering::Relaxed)
                        .is_ok()
                    {
                        next.push(v);
                    }
                }
            }
        });
        current = next;
        depth += 1;
    }
    level.into_iter().map(AtomicU64::into_inner).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{example_graph, generate};

    #[test]
    fn example_graph_distances() {
        let g = example_graph();
        assert_eq!(dijkstra(&g, 0), vec![0, 2, 5, 3]);
        for delta in [1, 2, 8, 64] {
            assert_eq!(
                delta_stepping(&g, 0, delta, &Pool::new(2).unwrap()).unwrap(),
                vec![0, 2, 5, 3]
            );
        }
    }

    #[test]
    fn delta_defaults_to_power_of_two_over_median() {
        let g = CsrGraph::from_edges(3, &[(0, 1, 5), (1, 2, 3), (0, 2, 9)]);
        assert_eq!(default_delta(&g), 8);
        assert_eq!(default_delta(&CsrGraph::from_edges(1, &[])), 1);
    }

    #[test]
    fn bfs_levels() {
        let g = CsrGraph::from_undirected(4, &[(0, 1, 1), (1, 2, 1)]);
        assert_eq!(bfs_seq(&g, 0), vec![0, 1, 2, INFINITY]);
        assert_eq!(
            bfs_mt_queue(&g, 0, &Pool::new(3).unwrap()),
            vec![0, 1, 2, INFINITY]
        );
    }

    #[test]
    fn parallel_variants_match_sequential() {
        for seed in 0..20 {
            let spec = "randgraph:n=120,m=300,wmax=50".parse().unwrap();
            let crate::instances::Instance::Graph(g) = generate(&spec, seed).unwrap() else {
                panic!()
            };
            let want = dijkstra(&g, 0);
            for delta in [1, 2, 8, 64] {
                assert_eq!(
                    delta_stepping(&g, 0, delta, &Pool::new(2).unwrap()).unwrap(),
                    want
                );
            }
            assert_eq!(bfs_mt_queue(&g, 0, &Pool::new(2).unwrap()), bfs_seq(&g, 0));
        }
    }
}
