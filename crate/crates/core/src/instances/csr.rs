use std::ops::Range;

/// Directed graph in compressed sparse rows. Undirected graphs are stored
/// as symmetric pairs of arcs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CsrGraph {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    weights: Vec<u64>,
    symmetric: bool,
}

impl CsrGraph {
    /// Builds from arcs `(source, target, weight)`. Per-source order follows input order.
    pub fn from_edges(num_vertices: usize, edges: &[(usize, usize, u64)]) -> Self {
        let mut offsets = vec![0usize; num_vertices + 1];
        for &(u, v, w) in edges {
            assert!(
                u < num_vertices && v < num_vertices,
                "edge ({u},{v}) out of range"
            );
            assert!(w >= 1, "edge weights must be >= 1");
            offsets[u + 1] += 1;
        }
        for i in 0..num_vertices {
            offsets[i + 1] += offsets[i];
        }
        let mut cursor = offsets.clone();
        let mut targets = vec![0; edges.len()];
        let mut weights = vec![0; edges.len()];
        for &(u, v, w) in edges {
            let slot = cursor[u];
            targets[slot] = v;
            weights[slot] = w;
            cursor[u] += 1;
        }
        CsrGraph {
            offsets,
            targets,
            weights,
            symmetric: false,
        }
    }

    /// Each undirected edge becomes two arcs (a self-loop stays one arc).
    pub fn from_undirected(num_vertices: usize, edges: &[(usize, usize, u64)]) -> Self {
        let mut arcs = Vec::with_capacity(edges.len() * 2);
        for &(u, v, w) in edges {
            arcs.push((u, v, w));
            if u != v {
                arcs.push((v, u, w));
            }
        }
        let mut graph = CsrGraph::from_edges(num_vertices, &arcs);
        graph.symmetric = true;
        graph
    }

    pub fn num_vertices(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of stored arcs.
    pub fn num_edges(&self) -> usize {
        self.targets.len()
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub(crate) fn set_symmetric(&mut self, symmetric: bool) {
        self.symmetric = symmetric;
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    #[inline]
    fn range(&self, v: usize) -> Range<usize> {
        self.offsets[v]..self.offsets[v + 1]
    }

    #[inline]
    pub fn targets(&self, v: usize) -> &[usize] {
        &self.targets[self.range(v)]
    }

    #[inline]
    pub fn weights(&self, v: usize) -> &[u64] {
        &self.weights[self.range(v)]
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = (usize, u64)> + '_ {
        let r = self.range(v);
        self.targets[r.clone()]
            .iter()
            .copied()
            .zip(self.weights[r].iter().copied())
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    /// All arcs in CSR order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        (0..self.num_vertices()).flat_map(move |u| self.neighbors(u).map(move |(v, w)| (u, v, w)))
    }

    pub fn transpose(&self) -> CsrGraph {
        let reversed: Vec<_> = self.edges().map(|(u, v, w)| (v, u, w)).collect();
        let mut graph = CsrGraph::from_edges(self.num_vertices(), &reversed);
        graph.symmetric = self.symmetric;
        graph
    }

    /// Lower median of arc weights; 1 for an empty graph.
    pub fn median_weight(&self) -> u64 {
        if self.weights.is_empty() {
            return 1;
        }
        let mut w = self.weights.clone();
        let mid = (w.len() - 1) / 2;
        *w.select_nth_unstable(mid).1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn chain_layout() {
        let g = CsrGraph::from_edges(3, &[(0, 1, 1), (1, 2, 4)]);
        assert_eq!(g.num_vertices(), 3);
        assert_eq!(g.num_edges(), 2);
        assert_eq!(g.offsets(), &[0, 1, 2, 2]);
        assert_eq!(g.neighbors(1).collect::<Vec<_>>(), vec![(2, 4)]);
        assert_eq!(g.degree(2), 0);
    }

    #[test]
    fn undirected_is_symmetric() {
        let g = CsrGraph::from_undirected(2, &[(0, 1, 5), (1, 1, 2)]);
        assert!(g.is_symmetric());
        assert_eq!(g.num_edges(), 3);
        assert_eq!(g.transpose().edges().count(), 3);
    }

    #[test]
    fn median_of_weights() {
        let g = CsrGraph::from_edges(2, &[(0, 1, 9), (0, 1, 1), (1, 0, 4)]);
        assert_eq!(g.median_weight(), 4);
        assert_eq!(CsrGraph::from_edges(1, &[]).median_weight(), 1);
    }

    proptest! {
        #[test]
        fn csr_enumerates_input_multiset(
            n in 1usize..20,
            raw in proptest::collection::vec((0usize..20, 0usize..20, 1u64..50), 0..60),
        ) {
            let edges: Vec<_> = raw.into_iter().map(|(u, v, w)| (u % n, v % n, w)).collect();
            let g = CsrGraph::from_edges(n, &edges);
            let mut got: Vec<_> = g.edges().collect();
            let mut want = edges.clone();
            got.sort_unstable();
            want.sort_unstable();
            prop_assert_eq!(got, want);
            let mut back: Vec<_> = g.transpose().transpose().edges().collect();
            back.sort_unstable();
            let mut again: Vec<_> = g.edges().collect();
            again.sort_unstable();
            prop_assert_eq!(back, again);
        }
    }
}
