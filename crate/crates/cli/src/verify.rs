//! Oracle verification: every solver configuration against the sequential
//! oracle on seeded instances.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{self, Write};

use llp_core::baselines::{oracle_for, run_baseline, BaselineOptions};
use llp_core::instances::{generate, InstanceSpec, Prng};
use llp_core::problems::{visit_problem, ProblemKind, ProblemOptions, ProblemVisitor};
use llp_core::{solve, LatticeLinearProblem, SolverConfig, Strategy};

/// Knapsack tile width under verification: narrow, so instances span many tiles.
pub const VERIFY_TILE_WIDTH: usize = 16;
pub const SMALL_PROBLEM_CAP: usize = 64;
pub const KNAPSACK_CAPACITY_CAP: u64 = 256;

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub problems: Vec<ProblemKind>,
    pub seeds: u64,
    pub max_size: usize,
    pub threads: Vec<usize>,
}

/// The instance checked for `(kind, seed)`: its size is drawn from the seed,
/// up to `max_size` (or a smaller per-problem cap).
pub fn instance_spec(kind: ProblemKind, seed: u64, max_size: usize) -> InstanceSpec {
    let mut rng = Prng::new(seed.wrapping_mul(0x2545_f491_4f6c_dd1d) ^ kind as u64);
    let max = max_size.max(1) as u64;
    let small = max.min(SMALL_PROBLEM_CAP as u64);
    let text = match kind {
        ProblemKind::Sssp | ProblemKind::Bfs => {
            let n = rng.between(1, max);
            format!("randgraph:n={n},m={},wmax=100", rng.below(4 * n + 1))
        }
        ProblemKind::StableMarriage => format!("sm:n={}", rng.between(1, small)),
        ProblemKind::JobScheduling => {
            let p = [0.02, 0.05, 0.1, 0.2][rng.below(4) as usize];
            format!("dag:n={},p={p}", rng.between(1, max))
        }
        ProblemKind::Reduce => format!("reduce:n={}", rng.between(1, max)),
        // Alternate DAGs with sparse undirected graphs, which are full of cycles.
        ProblemKind::Closure if seed.is_multiple_of(2) => {
            format!("closuredag:n={},p=0.1", rng.between(1, small))
        }
        ProblemKind::Closure => {
            let n = rng.between(1, small);
            format!("randgraph:n={n},m={}", rng.below(n + 1))
        }
        ProblemKind::Knapsack => format!(
            "knap:n={},cap={},wmax=100,vmax=100",
            rng.between(1, small),
            rng.between(1, KNAPSACK_CAPACITY_CAP)
        ),
    };
    text.parse().expect("verification spec is well-formed")
}

/// Every strategy, the parallel ones once per thread count.
pub fn solver_matrix(threads: &[usize]) -> Vec<SolverConfig> {
    let mut configs = Vec::new();
    for strategy in Strategy::ALL {
        if strategy.is_single_threaded() {
            configs.push(SolverConfig::new(strategy, 1));
        } else {
            configs.extend(threads.iter().map(|&t| SolverConfig::new(strategy, t)));
        }
    }
    configs
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Mismatch {
    Length { got: usize, want: usize },
    Value { index: usize, got: u64, want: u64 },
    Error(String),
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mismatch::Length { got, want } => {
                write!(f, "solution has {got} entries, oracle has {want}")
            }
            Mismatch::Value { index, got, want } => {
                write!(
                    f,
                    "first divergence at index {index}: got {got}, oracle {want}"
                )
            }
            Mismatch::Error(e) => write!(f, "solver failed: {e}"),
        }
    }
}

/// Compares a solution to the oracle's.
pub fn compare(got: &[u64], want: &[u64]) -> Result<(), Mismatch> {
    if let Some(index) = got.iter().zip(want).position(|(a, b)| a != b) {
        return Err(Mismatch::Value {
            index,
            got: got[index],
            want: want[index],
        });
    }
    if got.len() != want.len() {
        return Err(Mismatch::Length {
            got: got.len(),
            want: want.len(),
        });
    }
    Ok(())
}

/// Runs `problem` under each config and compares against `expected`.
pub fn check_configs<P: LatticeLinearProblem>(
    problem: &P,
    expected: &[u64],
    configs: &[SolverConfig],
) -> Vec<Result<(), Mismatch>> {
    configs
        .iter()
        .map(|config| match solve(problem, config) {
            Ok(solution) => compare(&solution.values, expected),
            Err(e) => Err(Mismatch::Error(e.to_string())),
        })
        .collect()
}

struct CheckAll<'a> {
    expected: &'a [u64],
    configs: &'a [SolverConfig],
}

impl ProblemVisitor for CheckAll<'_> {
    type Output = Vec<Result<(), Mismatch>>;

    fn visit<P: LatticeLinearProblem>(self, problem: &P) -> Self::Output {
        check_configs(problem, self.expected, self.configs)
    }
}

#[derive(Clone, Debug)]
pub struct Failure {
    pub problem: String,
    pub instance: String,
    pub seed: u64,
    pub strategy: Strategy,
    pub threads: usize,
    pub mismatch: Mismatch,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} seed {} with {} x{}: {}",
            self.problem, self.instance, self.seed, self.strategy, self.threads, self.mismatch
        )
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Tally {
    pub passed: u64,
    pub total: u64,
}

/// Pass counts per (problem, strategy, threads) plus every failure.
#[derive(Clone, Debug, Default)]
pub struct VerifyReport {
    /// Keyed by (problem position, strategy position, threads).
    pub cells: BTreeMap<(usize, usize, usize), Tally>,
    pub failures: Vec<Failure>,
    problems: Vec<String>,
    threads: Vec<usize>,
}

impl VerifyReport {
    pub fn new(threads: &[usize]) -> Self {
        VerifyReport {
            threads: threads.to_vec(),
            ..Default::default()
        }
    }

    pub fn checks(&self) -> u64 {
        self.cells.values().map(|t| t.total).sum()
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    /// Records the outcomes of `configs` on one instance.
    pub fn record(
        &mut self,
        problem: &str,
        instance: &str,
        seed: u64,
        configs: &[SolverConfig],
        outcomes: Vec<Result<(), Mismatch>>,
    ) {
        let problem_slot = match self.problems.iter().position(|p| p == problem) {
            Some(slot) => slot,
            None => {
                self.problems.push(problem.to_string());
                self.problems.len() - 1
            }
        };
        for (config, outcome) in configs.iter().zip(outcomes) {
            let strategy_slot = Strategy::ALL
                .iter()
                .position(|&s| s == config.strategy)
                .unwrap_or(usize::MAX);
            let tally = self
                .cells
                .entry((problem_slot, strategy_slot, config.threads))
                .or_default();
            tally.total += 1;
            match outcome {
                Ok(()) => tally.passed += 1,
                Err(mismatch) => self.failures.push(Failure {
                    problem: problem.to_string(),
                    instance: instance.to_string(),
                    seed,
                    strategy: config.strategy,
                    threads: config.threads,
                    mismatch,
                }),
            }
        }
    }

    /// The pass/fail matrix: one row per problem and strategy, one column
    /// per thread count.
    pub fn write_matrix<W: Write>(&self, out: &mut W) -> io::Result<()> {
        write!(out, "{:<10} {:<8}", "problem", "solver")?;
        for t in &self.threads {
            write!(out, " {:>12}", format!("threads={t}"))?;
        }
        writeln!(out)?;
        let mut rows: BTreeMap<(usize, usize), BTreeMap<usize, Tally>> = BTreeMap::new();
        for ((problem, slot, threads), tally) in &self.cells {
            rows.entry((*problem, *slot))
                .or_default()
                .insert(*threads, *tally);
        }
        for ((problem, slot), by_threads) in rows {
            let problem = &self.problems[problem];
            let name = Strategy::ALL.get(slot).map_or("?", |s| s.name());
            write!(out, "{problem:<10} {name:<8}")?;
            for t in &self.threads {
                let cell = match by_threads.get(t) {
                    None => "-".to_string(),
                    Some(tally) if tally.passed == tally.total => format!("ok {}", tally.total),
                    Some(tally) => format!("FAIL {}/{}", tally.total - tally.passed, tally.total),
                };
                write!(out, " {cell:>12}")?;
            }
            writeln!(out)?;
        }
        writeln!(
            out,
            "{} checks, {} failed",
            self.checks(),
            self.failures.len()
        )?;
        if let Some(first) = self.failures.first() {
            writeln!(out, "first failure: {first}")?;
        }
        Ok(())
    }
}

/// Runs the full verification suite described by `options`.
pub fn run_verify(options: &VerifyOptions) -> VerifyReport {
    let configs = solver_matrix(&options.threads);
    let mut report = VerifyReport::new(&options.threads);
    let problem_options = ProblemOptions {
        tile_width: VERIFY_TILE_WIDTH,
        ..ProblemOptions::default()
    };
    for &kind in &options.problems {
        for seed in 0..options.seeds {
            let spec = instance_spec(kind, seed, options.max_size);
            let label = spec.to_string();
            let outcomes = match generate(&spec, seed) {
                Err(e) => vec![Err(Mismatch::Error(e.to_string())); configs.len()],
                Ok(instance) => {
                    match run_baseline(oracle_for(kind), &instance, 1, &BaselineOptions::default())
                    {
                        Err(e) => vec![Err(Mismatch::Error(format!("oracle: {e}"))); configs.len()],
                        Ok(expected) => {
                            let visitor = CheckAll {
                                expected: &expected,
                                configs: &configs,
                            };
                            visit_problem(kind, &instance, &problem_options, visitor)
                                .unwrap_or_else(|e| {
                                    vec![Err(Mismatch::Error(e.to_string())); configs.len()]
                                })
                        }
                    }
                }
            };
            report.record(kind.name(), &label, seed, &configs, outcomes);
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compare_reports_first_divergence() {
        assert_eq!(compare(&[1, 2, 3], &[1, 2, 3]), Ok(()));
        assert_eq!(
            compare(&[1, 5, 9], &[1, 2, 3]),
            Err(Mismatch::Value {
                index: 1,
                got: 5,
                want: 2
            })
        );
        assert_eq!(
            compare(&[1], &[1, 2]),
            Err(Mismatch::Length { got: 1, want: 2 })
        );
    }

    #[test]
    fn specs_respect_caps() {
        for seed in 0..200 {
            for kind in ProblemKind::ALL {
                match instance_spec(kind, seed, 30) {
                    InstanceSpec::RandGraph { n, .. }
                    | InstanceSpec::Dag { n, .. }
                    | InstanceSpec::Reduce { n }
                    | InstanceSpec::ClosureDag { n, .. }
                    | InstanceSpec::Sm { n } => assert!((1..=30).contains(&n)),
                    InstanceSpec::Knap { n, cap, .. } => {
                        assert!((1..=30).contains(&n));
                        assert!((1..=KNAPSACK_CAPACITY_CAP).contains(&cap));
                    }
                    other => panic!("{other:?}"),
                }
            }
        }
        assert!(matches!(
            instance_spec(ProblemKind::StableMarriage, 3, 1000),
            InstanceSpec::Sm { n } if n <= SMALL_PROBLEM_CAP
        ));
    }

    #[test]
    fn matrix_has_single_threaded_once() {
        let m = solver_matrix(&[1, 2, 4]);
        assert_eq!(m.len(), 2 + 5 * 3);
        assert_eq!(
            m.iter()
                .filter(|c| c.strategy == Strategy::CyclicST)
                .count(),
            1
        );
    }

    #[test]
    fn empty_problem_set_runs_nothing() {
        let report = run_verify(&VerifyOptions {
            problems: vec![],
            seeds: 5,
            max_size: 10,
            threads: vec![1, 2],
        });
        assert_eq!(report.checks(), 0);
        assert_eq!(report.exit_code(), 0);
    }
}
