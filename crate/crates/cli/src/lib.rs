//! The `llp` command-line driver: oracle verification and the benchmark
//! matrix, as a library so tests can drive it directly.

pub mod checksum;
pub mod run;
pub mod threads;
pub mod verify;

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use llp_core::baselines::BaselineId;
use llp_core::instances::InstanceSpec;
use llp_core::problems::{ProblemKind, DEFAULT_TILE_WIDTH};
use llp_core::worklist::{DEFAULT_CHUNK_SIZE, DEFAULT_NUM_BUCKETS};
use llp_core::Strategy;

use crate::run::{execute, write_csv, RunOptions};
use crate::threads::{apply_cap, threads_cap};
use crate::verify::{run_verify, VerifyOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "llp",
    version,
    about = "Lattice-linear predicate solvers: verification and benchmarks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check every solver configuration against the sequential oracles.
    Verify(VerifyArgs),
    /// Run a solver x thread-count matrix and report timings as CSV.
    Run(RunArgs),
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Comma-separated problem names, or "all".
    #[arg(long, default_value = "all", value_parser = parse_problems)]
    pub problems: ProblemSet,
    /// Seeded instances per problem.
    #[arg(long, default_value_t = 5)]
    pub seeds: u64,
    /// Largest instance size drawn.
    #[arg(long, default_value_t = 200)]
    pub max_size: usize,
    #[arg(long, value_delimiter = ',', default_value = "1,2,4")]
    pub threads: Vec<usize>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub problem: ProblemKind,
    /// Instance spec, e.g. chain:1024 or randgraph:n=1000,m=5000,wmax=100.
    #[arg(long)]
    pub instance: InstanceSpec,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Solver strategies: cyclic, bag, allpar, swb, ptwb, ptcf, buckets.
    #[arg(long, value_delimiter = ',', default_value = "ptwb")]
    pub solvers: Vec<Strategy>,
    /// Worker-pool strategies selected by worklist name, added to --solvers.
    #[arg(long, value_delimiter = ',', value_parser = parse_worklist)]
    pub worklists: Vec<Strategy>,
    /// Baseline that speedups are reported against.
    #[arg(long)]
    pub baseline: Option<BaselineId>,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub threads: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    pub reps: usize,
    /// Bucket width for the buckets worklist and for delta-stepping.
    #[arg(long)]
    pub delta: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_CHUNK_SIZE)]
    pub chunk_size: usize,
    #[arg(long, default_value_t = DEFAULT_NUM_BUCKETS)]
    pub num_buckets: usize,
    #[arg(long, default_value_t = DEFAULT_TILE_WIDTH)]
    pub tile_width: usize,
    /// Source vertex for sssp and bfs.
    #[arg(long, default_value_t = 0)]
    pub source: usize,
    /// Compare every run's checksum with the oracle's.
    #[arg(long)]
    pub check: bool,
    /// Write rows here instead of standard output.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Write every full solution vector here.
    #[arg(long)]
    pub dump_solution: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProblemSet(pub Vec<ProblemKind>);

fn parse_problems(s: &str) -> Result<ProblemSet, String> {
    if s.trim() == "all" {
        return Ok(ProblemSet(ProblemKind::ALL.to_vec()));
    }
    let mut kinds = Vec::new();
    for name in s.split(',').map(str::trim).filter(|n| !n.is_empty()) {
        let kind: ProblemKind = name.parse()?;
        if !kinds.contains(&kind) {
            kinds.push(kind);
        }
    }
    Ok(ProblemSet(kinds))
}

fn parse_worklist(s: &str) -> Result<Strategy, String> {
    match s.parse::<Strategy>() {
        Ok(st) if !st.is_single_threaded() && st != Strategy::AllIndicesPar => Ok(st),
        _ => Err(format!(
            "unknown worklist '{s}' (expected one of swb, ptwb, ptcf, buckets)"
        )),
    }
}

impl RunArgs {
    fn into_options(self, cap: Option<usize>) -> RunOptions {
        let mut solvers = self.solvers;
        for st in self.worklists {
            if !solvers.contains(&st) {
                solvers.push(st);
            }
        }
        RunOptions {
            problem: self.problem,
            instance: self.instance,
            seed: self.seed,
            solvers,
            baseline: self.baseline,
            threads: apply_cap(&self.threads, cap),
            reps: self.reps,
            delta: self.delta,
            chunk_size: self.chunk_size,
            num_buckets: self.num_buckets,
            tile_width: self.tile_width,
            source: self.source,
            check: self.check,
            csv: self.csv,
            dump_solution: self.dump_solution,
        }
    }
}

/// Usage line for `subcommand`, or for the whole program.
fn usage(subcommand: Option<&str>) -> String {
    use clap::CommandFactory;
    let mut cmd = Cli::command();
    cmd.build();
    match subcommand.and_then(|name| cmd.find_subcommand_mut(name)) {
        Some(sub) => sub.render_usage().to_string(),
        None => cmd.render_usage().to_string(),
    }
}

fn config_error(subcommand: &str, message: impl std::fmt::Display) -> i32 {
    let mut err = io::stderr().lock();
    let _ = writeln!(err, "error: {message}\n");
    let _ = writeln!(err, "{}", usage(Some(subcommand)));
    EXIT_CONFIG
}

fn verify_command(args: VerifyArgs) -> i32 {
    if args.threads.contains(&0) {
        return config_error("verify", "thread counts must be at least 1");
    }
    let options = VerifyOptions {
        problems: args.problems.0,
        seeds: args.seeds,
        max_size: args.max_size,
        threads: apply_cap(&args.threads, threads_cap()),
    };
    let report = run_verify(&options);
    let mut out = io::stdout().lock();
    if let Err(e) = report.write_matrix(&mut out) {
        eprintln!("error: {e}");
        return EXIT_FAILURE;
    }
    report.exit_code()
}

fn run_command(args: RunArgs) -> i32 {
    let options = args.into_options(threads_cap());
    if let Err(e) = run::validate(&options) {
        return config_error("run", format!("{e:#}"));
    }
    let report = match execute(&options) {
        Ok(report) => report,
        Err(e) => {
            eprintln!("error: {e:#}");
            return EXIT_FAILURE;
        }
    };
    let written = match &options.csv {
        Some(path) => File::create(path)
            .map_err(anyhow::Error::from)
            .and_then(|f| write_csv(&report.rows, f)),
        None => write_csv(&report.rows, io::stdout().lock()),
    };
    if let Err(e) = written {
        eprintln!("error: writing CSV: {e:#}");
        return EXIT_FAILURE;
    }
    let mut out = io::stdout().lock();
    if options.csv.is_none() {
        let _ = writeln!(out);
    }
    let _ = report.write_summary(&mut out, options.baseline);
    report.exit_code()
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString>,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return EXIT_OK;
        }
        Err(e) => {
            let rendered = e.render().to_string();
            let mut err = io::stderr().lock();
            let _ = write!(err, "{rendered}");
            if !rendered.contains("Usage:") {
                let _ = writeln!(err, "\n{}", usage(args.get(1).and_then(|a| a.to_str())));
            }
            return EXIT_CONFIG;
        }
    };
    match cli.command {
        Command::Verify(args) => verify_command(args),
        Command::Run(args) => run_command(args),
    }
}
