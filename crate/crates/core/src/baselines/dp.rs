use crate::instances::{CsrGraph, KnapsackItems};
use crate::par::Pool;
use crate::problem::SolveError;
use crate::problems::{adjacency_rows, row_words, tree_len};

/// Level-by-level sum over the heap-ordered combine tree, one level at a
/// time, each level split across the pool. Returns the whole tree.
pub fn binary_tree_reduce(inputs: &[u64], pool: &Pool) -> Vec<u64> {
    let len = tree_len(inputs.len());
    let leaves = len.div_ceil(2);
    let mut tree = vec![0u64; len];
    tree[leaves - 1..leaves - 1 + inputs.len()].copy_from_slice(inputs);
    let mut width = leaves / 2;
    while width > 0 {
        let start = width - 1;
        let (head, children) = tree.split_at_mut(start + width);
        let parents = &mut head[start..];
        let children = &*children;
        pool.for_each_chunk_mut(parents, 1, |first, chunk| {
            for (j, slot) in chunk.iter_mut().enumerate() {
                // Parent i has children 2i + 1 and 2i + 2; `children` starts at start + width.
                let i = start + first + j;
                let left = 2 * i + 1 - (start + width);
                *slot = children[left].wrapping_add(children[left + 1]);
            }
        });
        width /= 2;
    }
    tree
}

/// Warshall's algorithm on packed rows, each pivot's row updates split across
/// the pool with a join between pivots.
pub fn floyd_warshall(graph: &CsrGraph, pool: &Pool) -> Vec<u64> {
    let n = graph.num_vertices();
    let words = row_words(n);
    let mut rows = adjacency_rows(graph);
    for k in 0..n {
        let pivot = rows[k * words..(k + 1) * words].to_vec();
        let (word, bit) = (k / 64, 1u64 << (k % 64));
        pool.for_each_chunk_mut(&mut rows, words, |_, chunk| {
            for row in chunk.chunks_exact_mut(words) {
                if row[word] & bit != 0 {
                    for (dst, src) in row.iter_mut().zip(&pivot) {
                        *dst |= src;
                    }
                }
            }
        });
    }
    rows
}

/// Row-by-row 0/1 knapsack DP; each row's capacities are split across the
/// pool, synchronising at row boundaries. Returns the last row.
pub fn dp_row_knapsack(items: &KnapsackItems, pool: &Pool) -> Result<Vec<u64>, SolveError> {
    let cols = usize::try_from(items.capacity)
        .ok()
        .and_then(|c| c.checked_add(1))
        .ok_or_else(|| {
            SolveError::MalformedInstance(format!("capacity {} too large", items.capacity))
        })?;
    let mut prev = vec![0u64; cols];
    let mut next = vec![0u64; cols];
    for (&w, &v) in items.weights.iter().zip(&items.values) {
        let w = usize::try_from(w).unwrap_or(usize::MAX);
        let row = &prev;
        pool.for_each_chunk_mut(&mut next, 1, |first, chunk| {
            for (j, cell) in chunk.iter_mut().enumerate() {
                let c = first + j;
                *cell = match c.checked_sub(w) {
                    Some(rest) => row[c].max(v.saturating_add(row[rest])),
                    None => row[c],
                };
            }
        });
        std::mem::swap(&mut prev, &mut next);
    }
    Ok(prev)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduce_tree_shape() {
        let pool = Pool::new(2).unwrap();
        assert_eq!(
            binary_tree_reduce(&[1, 2, 3, 4], &pool),
            vec![10, 3, 7, 1, 2, 3, 4]
        );
        assert_eq!(binary_tree_reduce(&[5], &pool), vec![5]);
        assert_eq!(
            binary_tree_reduce(&[1, 2, 3], &pool),
            vec![6, 3, 3, 1, 2, 3, 0]
        );
    }

    #[test]
    fn warshall_path() {
        let g = CsrGraph::from_edges(3, &[(0, 1, 1), (1, 2, 1)]);
        assert_eq!(
            floyd_warshall(&g, &Pool::new(2).unwrap()),
            vec![0b110, 0b100, 0]
        );
        let cycle = CsrGraph::from_edges(2, &[(0, 1, 1), (1, 0, 1)]);
        assert_eq!(
            floyd_warshall(&cycle, &Pool::sequential()),
            vec![0b11, 0b11]
        );
    }

    #[test]
    fn knapsack_rows() {
        let items = KnapsackItems {
            weights: vec![2, 3],
            values: vec![3, 4],
            capacity: 5,
        };
        let last = dp_row_knapsack(&items, &Pool::new(3).unwrap()).unwrap();
        assert_eq!(last, vec![0, 0, 3, 4, 4, 7]);
    }
}
