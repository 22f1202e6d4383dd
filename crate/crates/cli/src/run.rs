//! The benchmark matrix: solvers × thread counts × repetitions, one CSV row
//! per execution.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;

use llp_core::baselines::{default_delta, oracle_for, run_baseline, BaselineId, BaselineOptions};
use llp_core::instances::{generate, Instance, InstanceSpec};
use llp_core::problems::{run_llp, ProblemKind, ProblemOptions};
use llp_core::{SolverConfig, Strategy};

use crate::checksum::fnv1a;

/// Fixed CSV schema, in column order.
pub const CSV_HEADER: [&str; 12] = [
    "problem",
    "instance_spec",
    "seed",
    "solver",
    "worklist",
    "threads",
    "delta",
    "rep",
    "runtime_ns",
    "checksum",
    "predicate_evals",
    "advances",
];

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct BenchRow {
    pub problem: String,
    pub instance_spec: String,
    pub seed: u64,
    pub solver: String,
    pub worklist: String,
    pub threads: usize,
    pub delta: Option<u64>,
    pub rep: usize,
    pub runtime_ns: u64,
    /// FNV-1a of the solution vector, as 16 hex digits.
    pub checksum: String,
    pub predicate_evals: Option<u64>,
    pub advances: Option<u64>,
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub problem: ProblemKind,
    pub instance: InstanceSpec,
    pub seed: u64,
    pub solvers: Vec<Strategy>,
    pub baseline: Option<BaselineId>,
    pub threads: Vec<usize>,
    pub reps: usize,
    pub delta: Option<u64>,
    pub chunk_size: usize,
    pub num_buckets: usize,
    pub tile_width: usize,
    pub source: usize,
    pub check: bool,
    pub csv: Option<PathBuf>,
    pub dump_solution: Option<PathBuf>,
}

/// One solver or baseline at one thread count.
#[derive(Clone, Debug)]
enum Runner {
    Llp(SolverConfig),
    Baseline(BaselineId, usize),
}

impl Runner {
    fn label(&self) -> (String, String, usize) {
        match self {
            Runner::Llp(c) => (
                c.strategy.name().to_string(),
                c.strategy.worklist(c).name().to_string(),
                c.threads,
            ),
            Runner::Baseline(id, t) => (id.name().to_string(), "-".to_string(), *t),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SummaryLine {
    pub solver: String,
    pub worklist: String,
    pub threads: usize,
    pub median_ns: u64,
    /// Baseline median over this configuration's median.
    pub speedup: Option<f64>,
}

#[derive(Clone, Debug, Default)]
pub struct RunReport {
    pub rows: Vec<BenchRow>,
    pub summary: Vec<SummaryLine>,
    /// Runs whose checksum disagreed with the oracle (only with `check`).
    pub check_failures: Vec<String>,
    pub oracle_checksum: Option<String>,
}

impl RunReport {
    /// Distinct checksums across all rows.
    pub fn distinct_checksums(&self) -> usize {
        let mut sums: Vec<&str> = self.rows.iter().map(|r| r.checksum.as_str()).collect();
        sums.sort_unstable();
        sums.dedup();
        sums.len()
    }

    pub fn exit_code(&self) -> i32 {
        if self.check_failures.is_empty() {
            0
        } else {
            1
        }
    }

    pub fn write_summary<W: Write>(
        &self,
        out: &mut W,
        baseline: Option<BaselineId>,
    ) -> io::Result<()> {
        let reps = self.rows.iter().map(|r| r.rep + 1).max().unwrap_or(0);
        match baseline {
            Some(b) => writeln!(out, "summary: medians over {reps} reps, speedup vs {b}")?,
            None => writeln!(out, "summary: medians over {reps} reps")?,
        }
        writeln!(
            out,
            "{:<16} {:<8} {:>7} {:>14} {:>9}",
            "solver", "worklist", "threads", "median_ms", "speedup"
        )?;
        for line in &self.summary {
            let speedup = line.speedup.map_or("-".to_string(), |s| format!("{s:.2}x"));
            writeln!(
                out,
                "{:<16} {:<8} {:>7} {:>14.3} {:>9}",
                line.solver,
                line.worklist,
                line.threads,
                line.median_ns as f64 / 1e6,
                speedup
            )?;
        }
        if let Some(sum) = &self.oracle_checksum {
            writeln!(out, "oracle checksum {sum}")?;
        }
        writeln!(out, "distinct checksums: {}", self.distinct_checksums())?;
        for failure in &self.check_failures {
            writeln!(out, "CHECK FAILED: {failure}")?;
        }
        Ok(())
    }
}

fn median(mut xs: Vec<u64>) -> u64 {
    xs.sort_unstable();
    match xs.len() {
        0 => 0,
        n if n % 2 == 1 => xs[n / 2],
        n => (xs[n / 2 - 1] + xs[n / 2]) / 2,
    }
}

fn hex(sum: u64) -> String {
    format!("{sum:016x}")
}

fn runners(options: &RunOptions) -> Vec<Runner> {
    let mut out = Vec::new();
    for &strategy in &options.solvers {
        let counts: &[usize] = if strategy.is_single_threaded() {
            &[1]
        } else {
            &options.threads
        };
        for &threads in counts {
            let mut config = SolverConfig::new(strategy, threads)
                .with_chunk_size(options.chunk_size)
                .with_num_buckets(options.num_buckets);
            if let Some(delta) = options.delta {
                config = config.with_delta(delta);
            }
            out.push(Runner::Llp(config));
        }
    }
    if let Some(id) = options.baseline {
        if id.is_parallel() {
            out.extend(options.threads.iter().map(|&t| Runner::Baseline(id, t)));
        } else {
            out.push(Runner::Baseline(id, 1));
        }
    }
    out
}

/// Validates the configuration before anything runs; errors here are
/// configuration errors.
pub fn validate(options: &RunOptions) -> Result<()> {
    anyhow::ensure!(options.reps >= 1, "--reps must be at least 1");
    anyhow::ensure!(
        !options.threads.is_empty(),
        "--threads must list at least one count"
    );
    anyhow::ensure!(
        options.threads.iter().all(|&t| t >= 1),
        "thread counts must be at least 1"
    );
    anyhow::ensure!(
        !options.solvers.is_empty() || options.baseline.is_some(),
        "nothing to run: give --solvers or --baseline"
    );
    if let Some(id) = options.baseline {
        anyhow::ensure!(
            id.problem() == options.problem,
            "baseline {id} solves {}, not {}",
            id.problem(),
            options.problem
        );
    }
    for runner in runners(options) {
        if let Runner::Llp(config) = runner {
            config.validate()?;
        }
    }
    Ok(())
}

/// Generates the instance and executes the whole matrix.
pub fn execute(options: &RunOptions) -> Result<RunReport> {
    validate(options)?;
    let instance = generate(&options.instance, options.seed)
        .with_context(|| format!("building instance {}", options.instance))?;
    execute_on(options, &instance)
}

pub fn execute_on(options: &RunOptions, instance: &Instance) -> Result<RunReport> {
    let problem_options = ProblemOptions {
        source: options.source,
        tile_width: options.tile_width,
    };
    let baseline_options = BaselineOptions {
        source: options.source,
        delta: options.delta,
    };
    let mut report = RunReport::default();
    let oracle = if options.check {
        let values = run_baseline(oracle_for(options.problem), instance, 1, &baseline_options)
            .context("running the oracle")?;
        Some(hex(fnv1a(&values)))
    } else {
        None
    };
    let mut dump = match &options.dump_solution {
        Some(path) => Some(BufWriter::new(
            File::create(path).with_context(|| format!("creating {}", path.display()))?,
        )),
        None => None,
    };

    let mut timings: BTreeMap<usize, Vec<u64>> = BTreeMap::new();
    let runners = runners(options);
    for (slot, runner) in runners.iter().enumerate() {
        let (solver, worklist, threads) = runner.label();
        for rep in 0..options.reps {
            let (values, runtime_ns, evals, advances, delta) = match runner {
                Runner::Llp(config) => {
                    let solution = run_llp(options.problem, instance, config, &problem_options)
                        .with_context(|| format!("{solver} with {threads} threads"))?;
                    let delta = (config.strategy == Strategy::BucketsPar).then_some(config.delta);
                    (
                        solution.values,
                        solution.elapsed.as_nanos() as u64,
                        Some(solution.stats.predicate_evaluations),
                        Some(solution.stats.advances),
                        delta,
                    )
                }
                Runner::Baseline(id, t) => {
                    let start = Instant::now();
                    let values = run_baseline(*id, instance, *t, &baseline_options)
                        .with_context(|| format!("baseline {id}"))?;
                    let elapsed = start.elapsed().as_nanos() as u64;
                    let delta = match (id, instance) {
                        (BaselineId::DeltaStepping, Instance::Graph(g)) => {
                            Some(options.delta.unwrap_or_else(|| default_delta(g)))
                        }
                        _ => None,
                    };
                    (values, elapsed, None, None, delta)
                }
            };
            let checksum = hex(fnv1a(&values));
            if let Some(want) = &oracle {
                if &checksum != want {
                    report.check_failures.push(format!(
                        "{solver} x{threads} rep {rep}: checksum {checksum}, oracle {want}"
                    ));
                }
            }
            if let Some(out) = dump.as_mut() {
                writeln!(
                    out,
                    "# solver={solver} worklist={worklist} threads={threads} rep={rep}"
                )?;
                let line: Vec<String> = values.iter().map(u64::to_string).collect();
                writeln!(out, "{}", line.join(" "))?;
            }
            timings.entry(slot).or_default().push(runtime_ns);
            report.rows.push(BenchRow {
                problem: options.problem.name().to_string(),
                instance_spec: options.instance.to_string(),
                seed: options.seed,
                solver: solver.clone(),
                worklist: worklist.clone(),
                threads,
                delta,
                rep,
                runtime_ns,
                checksum,
                predicate_evals: evals,
                advances,
            });
        }
    }
    if let Some(out) = dump.as_mut() {
        out.flush()?;
    }

    // Baseline medians by thread count, for the speedup column.
    let baseline_medians: BTreeMap<usize, u64> = runners
        .iter()
        .enumerate()
        .filter_map(|(slot, r)| match r {
            Runner::Baseline(_, t) => Some((*t, median(timings[&slot].clone()))),
            Runner::Llp(_) => None,
        })
        .collect();
    for (slot, runner) in runners.iter().enumerate() {
        let (solver, worklist, threads) = runner.label();
        let median_ns = median(timings[&slot].clone());
        let reference = baseline_medians
            .get(&threads)
            .or_else(|| baseline_medians.values().next());
        report.summary.push(SummaryLine {
            solver,
            worklist,
            threads,
            median_ns,
            speedup: reference.map(|&b| b as f64 / median_ns.max(1) as f64),
        });
    }
    report.oracle_checksum = oracle;
    Ok(report)
}

/// Writes rows with the fixed header.
pub fn write_csv<W: Write>(rows: &[BenchRow], out: W) -> Result<()> {
    let mut writer = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    writer.write_record(CSV_HEADER)?;
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}
