//! Deterministic instance generation and graph loading.
//!
//! Every generator draws from [`Prng`] in a fixed order, so `(spec, seed)`
//! pins the instance bit for bit:
//!
//! * `chain:N` draws nothing.
//! * `randgraph`: per edge, source, target, then weight in `[1, wmax]`.
//! * `dag`: all `n` durations in `[1, 80]` first, then one draw per pair
//!   `(i, j)`, `i < j`, in lexicographic order; the edge exists iff the draw's
//!   53-bit fraction is below `p`.
//! * `closuredag`: the pair draws only.
//! * `sm`: Fisher–Yates shuffles of `0..n`, one list per man in index order,
//!   then one per woman.
//! * `knap`: all weights in `[1, wmax]` in item order, then all values in `[1, vmax]`.
//! * `reduce`: the top 32 bits of one draw per input.

mod csr;
mod loader;
mod prng;
mod spec;

use std::io;

use thiserror::Error;

pub use csr::CsrGraph;
pub use loader::{load_graph, parse_graph, GraphFormat};
pub use prng::Prng;
pub use spec::InstanceSpec;

pub const JOB_DURATION_MIN: u64 = 1;
pub const JOB_DURATION_MAX: u64 = 80;

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("cannot parse instance spec '{spec}': {reason}")]
    Parse { spec: String, reason: String },
    #[error("instance too large: {0}")]
    Overflow(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("invalid instance: {0}")]
    Invalid(String),
}

/// Jobs with durations and a precedence DAG (edge `i -> j`: `i` precedes `j`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JobDag {
    pub durations: Vec<u64>,
    pub graph: CsrGraph,
}

/// Balanced marriage instance. `men[m]` lists women best-first; `women[w]` lists men.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarriageTable {
    pub men: Vec<Vec<usize>>,
    pub women: Vec<Vec<usize>>,
}

impl MarriageTable {
    /// Checks that both sides are complete total orders over `0..n`.
    pub fn validate(&self) -> Result<(), InstanceError> {
        let n = self.men.len();
        if self.women.len() != n {
            return Err(InstanceError::Invalid(
                "unbalanced preference tables".into(),
            ));
        }
        for (side, lists) in [("man", &self.men), ("woman", &self.women)] {
            for (i, list) in lists.iter().enumerate() {
                let mut seen = vec![false; n];
                if list.len() != n {
                    return Err(InstanceError::Invalid(format!(
                        "{side} {i} has an incomplete list"
                    )));
                }
                for &x in list {
                    if x >= n || std::mem::replace(&mut seen[x], true) {
                        return Err(InstanceError::Invalid(format!(
                            "{side} {i} does not rank a permutation"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.men.len()
    }

    pub fn is_empty(&self) -> bool {
        self.men.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KnapsackItems {
    pub weights: Vec<u64>,
    pub values: Vec<u64>,
    pub capacity: u64,
}

impl KnapsackItems {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// An immutable problem input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Instance {
    Graph(CsrGraph),
    Jobs(JobDag),
    Marriage(MarriageTable),
    Items(KnapsackItems),
    Values(Vec<u64>),
}

impl Instance {
    pub fn kind(&self) -> &'static str {
        match self {
            Instance::Graph(_) => "graph",
            Instance::Jobs(_) => "jobs",
            Instance::Marriage(_) => "marriage",
            Instance::Items(_) => "items",
            Instance::Values(_) => "values",
        }
    }

    /// Graph view: plain graphs, and the precedence graph of a job DAG.
    pub fn graph(&self) -> Option<&CsrGraph> {
        match self {
            Instance::Graph(g) => Some(g),
            Instance::Jobs(jobs) => Some(&jobs.graph),
            _ => None,
        }
    }
}

/// The undirected four-vertex example: edges 0–1 (2), 0–3 (3), 3–2 (3), 2–1 (3).
pub fn example_graph() -> CsrGraph {
    CsrGraph::from_undirected(4, &[(0, 1, 2), (0, 3, 3), (3, 2, 3), (2, 1, 3)])
}

pub fn chain_graph(n: usize) -> CsrGraph {
    let edges: Vec<_> = (1..n).map(|v| (v - 1, v, 1)).collect();
    CsrGraph::from_edges(n, &edges)
}

fn pair_count(n: usize) -> Result<usize, InstanceError> {
    n.checked_mul(n.saturating_sub(1))
        .map(|x| x / 2)
        .ok_or_else(|| InstanceError::Overflow(format!("{n} vertices have too many vertex pairs")))
}

fn random_dag_edges(
    rng: &mut Prng,
    n: usize,
    p: f64,
) -> Result<Vec<(usize, usize, u64)>, InstanceError> {
    let pairs = pair_count(n)?;
    let mut edges = Vec::with_capacity(((pairs as f64) * p) as usize);
    for i in 0..n {
        for j in i + 1..n {
            if rng.next_f64() < p {
                edges.push((i, j, 1));
            }
        }
    }
    Ok(edges)
}

/// Builds the instance described by `spec`. Deterministic in `(spec, seed)`.
pub fn generate(spec: &InstanceSpec, seed: u64) -> Result<Instance, InstanceError> {
    let mut rng = Prng::new(seed);
    Ok(match *spec {
        InstanceSpec::Example => Instance::Graph(example_graph()),
        InstanceSpec::Chain { n } => Instance::Graph(chain_graph(n)),
        InstanceSpec::RandGraph { n, m, wmax } => {
            let edges: Vec<_> = (0..m)
                .map(|_| {
                    let u = rng.below(n as u64) as usize;
                    let v = rng.below(n as u64) as usize;
                    (u, v, rng.between(1, wmax))
                })
                .collect();
            Instance::Graph(CsrGraph::from_undirected(n, &edges))
        }
        InstanceSpec::Dag { n, p } => {
            let durations = (0..n)
                .map(|_| rng.between(JOB_DURATION_MIN, JOB_DURATION_MAX))
                .collect();
            let edges = random_dag_edges(&mut rng, n, p)?;
            Instance::Jobs(JobDag {
                durations,
                graph: CsrGraph::from_edges(n, &edges),
            })
        }
        InstanceSpec::ClosureDag { n, p } => {
            let edges = random_dag_edges(&mut rng, n, p)?;
            Instance::Graph(CsrGraph::from_edges(n, &edges))
        }
        InstanceSpec::Sm { n } => {
            let mut side = || -> Vec<Vec<usize>> {
                (0..n)
                    .map(|_| {
                        let mut list: Vec<usize> = (0..n).collect();
                        rng.shuffle(&mut list);
                        list
                    })
                    .collect()
            };
            let men = side();
            let women = side();
            Instance::Marriage(MarriageTable { men, women })
        }
        InstanceSpec::Knap { n, cap, wmax, vmax } => {
            let weights = (0..n).map(|_| rng.between(1, wmax)).collect();
            let values = (0..n).map(|_| rng.between(1, vmax)).collect();
            Instance::Items(KnapsackItems {
                weights,
                values,
                capacity: cap,
            })
        }
        InstanceSpec::Reduce { n } => {
            Instance::Values((0..n).map(|_| rng.next_u64() >> 32).collect())
        }
        InstanceSpec::File { ref path } => {
            Instance::Graph(load_graph(path, GraphFormat::from_path(path), false)?)
        }
    })
}

const MAGIC: &[u8; 4] = b"LLPI";
const FORMAT_VERSION: u32 = 1;

struct Writer(Vec<u8>);

impl Writer {
    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }

    fn words(&mut self, vs: impl ExactSizeIterator<Item = u64>) {
        self.u64(vs.len() as u64);
        for v in vs {
            self.u64(v);
        }
    }

    fn graph(&mut self, g: &CsrGraph) {
        self.u64(g.num_vertices() as u64);
        self.u64(g.is_symmetric() as u64);
        let arcs: Vec<_> = g.edges().collect();
        self.u64(arcs.len() as u64);
        for (u, v, w) in arcs {
            self.u64(u as u64);
            self.u64(v as u64);
            self.u64(w);
        }
    }
}

struct Reader<'a>(&'a [u8]);

impl Reader<'_> {
    fn u64(&mut self) -> Result<u64, InstanceError> {
        if self.0.len() < 8 {
            return Err(InstanceError::Invalid("truncated instance cache".into()));
        }
        let (head, rest) = self.0.split_at(8);
        self.0 = rest;
        Ok(u64::from_le_bytes(head.try_into().unwrap()))
    }

    fn usize(&mut self) -> Result<usize, InstanceError> {
        Ok(self.u64()? as usize)
    }

    fn words(&mut self) -> Result<Vec<u64>, InstanceError> {
        let len = self.usize()?;
        if len > self.0.len() / 8 {
            return Err(InstanceError::Invalid("truncated instance cache".into()));
        }
        (0..len).map(|_| self.u64()).collect()
    }

    fn graph(&mut self) -> Result<CsrGraph, InstanceError> {
        let n = self.usize()?;
        let symmetric = self.u64()? != 0;
        let m = self.usize()?;
        let mut arcs = Vec::with_capacity(m.min(self.0.len() / 24));
        for _ in 0..m {
            let (u, v, w) = (self.usize()?, self.usize()?, self.u64()?);
            if u >= n || v >= n || w == 0 {
                return Err(InstanceError::Invalid(
                    "corrupt arc in instance cache".into(),
                ));
            }
            arcs.push((u, v, w));
        }
        // Symmetric graphs were stored with both arcs already.
        let mut g = CsrGraph::from_edges(n, &arcs);
        g.set_symmetric(symmetric);
        Ok(g)
    }
}

impl Instance {
    /// Versioned little-endian binary encoding.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer(Vec::new());
        w.0.extend_from_slice(MAGIC);
        w.0.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        match self {
            Instance::Graph(g) => {
                w.u64(0);
                w.graph(g);
            }
            Instance::Jobs(jobs) => {
                w.u64(1);
                w.words(jobs.durations.iter().copied());
                w.graph(&jobs.graph);
            }
            Instance::Marriage(table) => {
                w.u64(2);
                w.u64(table.len() as u64);
                for list in table.men.iter().chain(&table.women) {
                    w.words(list.iter().map(|&x| x as u64));
                }
            }
            Instance::Items(items) => {
                w.u64(3);
                w.u64(items.capacity);
                w.words(items.weights.iter().copied());
                w.words(items.values.iter().copied());
            }
            Instance::Values(values) => {
                w.u64(4);
                w.words(values.iter().copied());
            }
        }
        w.0
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Instance, InstanceError> {
        if bytes.len() < 8 || &bytes[..4] != MAGIC {
            return Err(InstanceError::Invalid("not an instance cache".into()));
        }
        let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
        if version != FORMAT_VERSION {
            return Err(InstanceError::Invalid(format!(
                "unsupported cache version {version}"
            )));
        }
        let mut r = Reader(&bytes[8..]);
        let instance = match r.u64()? {
            0 => Instance::Graph(r.graph()?),
            1 => {
                let durations = r.words()?;
                let graph = r.graph()?;
                Instance::Jobs(JobDag { durations, graph })
            }
            2 => {
                let n = r.usize()?;
                let mut lists = (0..2 * n.min(r.0.len()))
                    .map(|_| Ok(r.words()?.into_iter().map(|x| x as usize).collect()))
                    .collect::<Result<Vec<Vec<usize>>, InstanceError>>()?;
                let women = lists.split_off(n.min(lists.len()));
                let table = MarriageTable { men: lists, women };
                table.validate()?;
                Instance::Marriage(table)
            }
            3 => {
                let capacity = r.u64()?;
                let weights = r.words()?;
                let values = r.words()?;
                Instance::Items(KnapsackItems {
                    weights,
                    values,
                    capacity,
                })
            }
            4 => Instance::Values(r.words()?),
            tag => {
                return Err(InstanceError::Invalid(format!(
                    "unknown instance tag {tag}"
                )))
            }
        };
        if !r.0.is_empty() {
            return Err(InstanceError::Invalid(
                "trailing bytes in instance cache".into(),
            ));
        }
        Ok(instance)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gen(spec: &str, seed: u64) -> Instance {
        generate(&spec.parse().unwrap(), seed).unwrap()
    }

    #[test]
    fn chain_shape() {
        let Instance::Graph(g) = gen("chain:5", 0) else {
            panic!()
        };
        assert_eq!(g.num_vertices(), 5);
        assert_eq!(g.num_edges(), 4);
        assert!(g.edges().all(|(u, v, w)| v == u + 1 && w == 1));
    }

    #[test]
    fn dag_is_reproducible() {
        let a = gen("dag:n=10,p=0.2", 42);
        let b = gen("dag:n=10,p=0.2", 42);
        assert_eq!(a, b);
        assert_eq!(a.to_bytes(), b.to_bytes());
        assert_ne!(a, gen("dag:n=10,p=0.2", 43));
        let Instance::Jobs(jobs) = a else { panic!() };
        assert!(jobs.durations.iter().all(|d| (1..=80).contains(d)));
        assert!(jobs.graph.edges().all(|(u, v, _)| u < v));
    }

    #[test]
    fn dag_edge_density_tracks_p() {
        let Instance::Jobs(jobs) = gen("dag:n=200,p=0.2", 9) else {
            panic!()
        };
        let density = jobs.graph.num_edges() as f64 / (200.0 * 199.0 / 2.0);
        assert!((density - 0.2).abs() < 0.02, "{density}");
    }

    #[test]
    fn singleton_marriage() {
        let Instance::Marriage(t) = gen("sm:n=1", 5) else {
            panic!()
        };
        assert_eq!(t.men, vec![vec![0]]);
        assert_eq!(t.women, vec![vec![0]]);
    }

    #[test]
    fn marriage_lists_are_permutations() {
        let Instance::Marriage(t) = gen("sm:n=30", 5) else {
            panic!()
        };
        t.validate().unwrap();
    }

    #[test]
    fn knapsack_ranges() {
        let Instance::Items(items) = gen("knap:n=50,cap=100,wmax=10,vmax=20", 1) else {
            panic!()
        };
        assert_eq!(items.capacity, 100);
        assert!(items.weights.iter().all(|w| (1..=10).contains(w)));
        assert!(items.values.iter().all(|v| (1..=20).contains(v)));
    }

    #[test]
    fn randgraph_is_symmetric() {
        let Instance::Graph(g) = gen("randgraph:n=50,m=100,wmax=9", 2) else {
            panic!()
        };
        assert!(g.is_symmetric());
        assert_eq!(g.transpose(), g.transpose().transpose().transpose());
        let mut fwd: Vec<_> = g.edges().collect();
        let mut rev: Vec<_> = g.transpose().edges().collect();
        fwd.sort_unstable();
        rev.sort_unstable();
        assert_eq!(fwd, rev);
    }

    #[test]
    fn pair_overflow_is_reported() {
        assert!(matches!(
            pair_count(usize::MAX),
            Err(InstanceError::Overflow(_))
        ));
    }

    #[test]
    fn missing_file_is_io_error() {
        let spec: InstanceSpec = "file:/nonexistent/graph.gr".parse().unwrap();
        assert!(matches!(generate(&spec, 0), Err(InstanceError::Io(_))));
    }

    #[test]
    fn cache_rejects_garbage() {
        assert!(Instance::from_bytes(b"nope").is_err());
        let mut bytes = gen("reduce:n=4", 0).to_bytes();
        bytes.push(0);
        assert!(Instance::from_bytes(&bytes).is_err());
    }

    proptest! {
        #[test]
        fn cache_round_trips(seed in any::<u64>(), pick in 0usize..6, n in 1usize..12) {
            let spec = match pick {
                0 => format!("randgraph:n={n},m={},wmax=9", n * 2),
                1 => format!("dag:n={n},p=0.3"),
                2 => format!("sm:n={n}"),
                3 => format!("knap:n={n},cap=40,wmax=9,vmax=9"),
                4 => format!("reduce:n={n}"),
                _ => format!("closuredag:n={n},p=0.5"),
            };
            let instance = gen(&spec, seed);
            prop_assert_eq!(Instance::from_bytes(&instance.to_bytes()).unwrap(), instance);
        }
    }
}
