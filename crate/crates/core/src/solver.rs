//! Solver strategies: two single-threaded drivers, one all-indices parallel
//! sweep, and four worklist-driven worker pools.

use std::fmt;
use std::panic::{self, AssertUnwindSafe};
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Mutex;
use std::thread;
use std::time::{Duration, Instant};

use crossbeam_utils::Backoff;

use crate::par::Pool;
use crate::problem::{first_forbidden, LatticeLinearProblem, SolveError};
use crate::state::{GlobalState, StatsSnapshot};
use crate::worklist::{
    NullWorklist, SeqBag, WorkPool, WorklistPolicy, DEFAULT_CHUNK_SIZE, DEFAULT_NUM_BUCKETS,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    CyclicST,
    BagST,
    AllIndicesPar,
    SharedBagPar,
    PerThreadBagPar,
    ChunkedFifoPar,
    BucketsPar,
}

impl Strategy {
    pub const ALL: [Strategy; 7] = [
        Strategy::CyclicST,
        Strategy::BagST,
        Strategy::AllIndicesPar,
        Strategy::SharedBagPar,
        Strategy::PerThreadBagPar,
        Strategy::ChunkedFifoPar,
        Strategy::BucketsPar,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::CyclicST => "cyclic",
            Strategy::BagST => "bag",
            Strategy::AllIndicesPar => "allpar",
            Strategy::SharedBagPar => "swb",
            Strategy::PerThreadBagPar => "ptwb",
            Strategy::ChunkedFifoPar => "ptcf",
            Strategy::BucketsPar => "buckets",
        }
    }

    pub fn is_single_threaded(self) -> bool {
        matches!(self, Strategy::CyclicST | Strategy::BagST)
    }

    /// The worklist a strategy schedules with; `Null` for the scanning strategies.
    pub fn worklist(self, config: &SolverConfig) -> WorklistPolicy {
        match self {
            Strategy::CyclicST | Strategy::AllIndicesPar => WorklistPolicy::Null,
            Strategy::BagST => WorklistPolicy::SeqBag,
            Strategy::SharedBagPar => WorklistPolicy::SharedBag,
            Strategy::PerThreadBagPar => WorklistPolicy::PerThreadBag,
            Strategy::ChunkedFifoPar => WorklistPolicy::ChunkedFifo {
                chunk_size: config.chunk_size,
            },
            Strategy::BucketsPar => WorklistPolicy::Buckets {
                num_buckets: config.num_buckets,
                delta: config.delta,
            },
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Strategy::ALL.iter().map(|st| st.name()).collect();
                format!(
                    "unknown solver '{s}' (expected one of {})",
                    names.join(", ")
                )
            })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolverConfig {
    pub strategy: Strategy,
    pub threads: usize,
    /// Bucket width for `BucketsPar`.
    pub delta: u64,
    pub num_buckets: usize,
    pub chunk_size: usize,
    /// `BagST` pops in a seeded random order when set.
    pub seed: Option<u64>,
    /// Run the full forbidden-index scan after the solve.
    pub post_check: bool,
}

impl SolverConfig {
    pub fn new(strategy: Strategy, threads: usize) -> Self {
        SolverConfig {
            strategy,
            threads,
            delta: 1,
            num_buckets: DEFAULT_NUM_BUCKETS,
            chunk_size: DEFAULT_CHUNK_SIZE,
            seed: None,
            post_check: true,
        }
    }

    pub fn with_delta(mut self, delta: u64) -> Self {
        self.delta = delta;
        self
    }

    pub fn with_chunk_size(mut self, chunk_size: usize) -> Self {
        self.chunk_size = chunk_size;
        self
    }

    pub fn with_num_buckets(mut self, num_buckets: usize) -> Self {
        self.num_buckets = num_buckets;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn validate(&self) -> Result<(), SolveError> {
        if self.threads == 0 {
            return Err(SolveError::InvalidConfig("threads must be >= 1".into()));
        }
        if self.strategy.is_single_threaded() && self.threads != 1 {
            return Err(SolveError::InvalidConfig(format!(
                "{} is single-threaded but {} threads were requested",
                self.strategy, self.threads
            )));
        }
        self.strategy
            .worklist(self)
            .validate()
            .map_err(SolveError::InvalidConfig)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub values: Vec<u64>,
    pub stats: StatsSnapshot,
    /// Wall time of the solve itself, excluding the post-solve scan.
    pub elapsed: Duration,
}

/// Solves `problem` with the configured strategy.
pub fn solve<P: LatticeLinearProblem>(
    problem: &P,
    config: &SolverConfig,
) -> Result<Solution, SolveError> {
    config.validate()?;
    let start = Instant::now();
    let state = problem.init_global_state();
    match config.strategy {
        Strategy::CyclicST => run_cyclic(problem, &state)?,
        Strategy::BagST => {
            let bag = match config.seed {
                Some(seed) => SeqBag::randomized(seed),
                None => SeqBag::new(),
            };
            run_bag(problem, &state, &bag, |_| {})?
        }
        Strategy::AllIndicesPar => {
            let pool = Pool::new(config.threads)?;
            catch_panic(|| run_all_indices(problem, &state, &pool))?
        }
        _ => {
            let pool = WorkPool::new(config.strategy.worklist(config), config.threads)?;
            run_workers(problem, &state, &pool)?
        }
    }
    let elapsed = start.elapsed();
    finish(problem, state, config.post_check, elapsed)
}

/// Single-threaded entry point; `strategy` must be `CyclicST` or `BagST`.
pub fn solve_sequential<P: LatticeLinearProblem>(
    problem: &P,
    strategy: Strategy,
) -> Result<Solution, SolveError> {
    if !strategy.is_single_threaded() {
        return Err(SolveError::InvalidConfig(format!(
            "{strategy} is not a sequential strategy"
        )));
    }
    solve(problem, &SolverConfig::new(strategy, 1))
}

/// Multi-threaded entry point for the parallel strategies.
pub fn solve_parallel<P: LatticeLinearProblem>(
    problem: &P,
    strategy: Strategy,
    threads: usize,
    delta: Option<u64>,
) -> Result<Solution, SolveError> {
    if strategy.is_single_threaded() {
        return Err(SolveError::InvalidConfig(format!(
            "{strategy} is not a parallel strategy"
        )));
    }
    let mut config = SolverConfig::new(strategy, threads);
    if let Some(delta) = delta {
        config.delta = delta;
    }
    solve(problem, &config)
}

/// Single-threaded bag solve in seeded random pop order, calling `observe`
/// with the state and index after every `ensure`.
pub fn solve_observed<P, F>(problem: &P, seed: u64, observe: F) -> Result<Vec<u64>, SolveError>
where
    P: LatticeLinearProblem,
    F: FnMut(&GlobalState<P::State>, usize),
{
    let state = problem.init_global_state();
    let bag = SeqBag::randomized(seed);
    let mut observe = observe;
    run_bag(problem, &state, &bag, |index| observe(&state, index))?;
    Ok(finish(problem, state, true, Duration::ZERO)?.values)
}

fn finish<P: LatticeLinearProblem>(
    problem: &P,
    state: GlobalState<P::State>,
    post_check: bool,
    elapsed: Duration,
) -> Result<Solution, SolveError> {
    if post_check {
        if let Some(index) = first_forbidden(problem, &state) {
            return Err(SolveError::ForbiddenAtExit { index });
        }
    }
    problem.check_complete(&state)?;
    let stats = state.stats.snapshot();
    Ok(Solution {
        values: problem.final_solution(state),
        stats,
        elapsed,
    })
}

fn run_cyclic<P: LatticeLinearProblem>(
    problem: &P,
    state: &GlobalState<P::State>,
) -> Result<(), SolveError> {
    // A pass that advances nothing ends the loop: with a sound adapter that
    // means nothing was forbidden, and with a broken one the post-solve scan
    // reports it instead of spinning forever.
    loop {
        let before = state.stats.snapshot().advances;
        for index in 0..problem.size() {
            problem.ensure(state, index, &NullWorklist)?;
        }
        if state.stats.snapshot().advances == before {
            return Ok(());
        }
    }
}

fn run_bag<P: LatticeLinearProblem>(
    problem: &P,
    state: &GlobalState<P::State>,
    bag: &SeqBag,
    mut after_step: impl FnMut(usize),
) -> Result<(), SolveError> {
    problem.initial_states_to_process(state, bag);
    while let Some(item) = bag.pop() {
        problem.ensure(state, item.index, bag)?;
        after_step(item.index);
    }
    Ok(())
}

fn run_all_indices<P: LatticeLinearProblem>(
    problem: &P,
    state: &GlobalState<P::State>,
    pool: &Pool,
) -> Result<(), SolveError> {
    let mut loops_with_none_changed = 0;
    while loops_with_none_changed < 2 {
        let before = state.stats.snapshot().advances;
        let results = pool.map_ranges(problem.size(), |range| {
            for index in range {
                problem.ensure(state, index, &NullWorklist)?;
            }
            Ok(())
        });
        results.into_iter().collect::<Result<(), SolveError>>()?;
        if state.stats.snapshot().advances != before {
            loops_with_none_changed = 0;
        } else {
            loops_with_none_changed += 1;
        }
    }
    Ok(())
}

/// Shared between workers of one solve.
struct RunControl {
    abort: AtomicBool,
    error: Mutex<Option<SolveError>>,
}

impl RunControl {
    fn fail(&self, error: SolveError) {
        let mut slot = self.error.lock().unwrap_or_else(|e| e.into_inner());
        slot.get_or_insert(error);
        self.abort.store(true, Ordering::Release);
    }

    fn aborted(&self) -> bool {
        self.abort.load(Ordering::Acquire)
    }
}

/// Stops peers if the owning worker unwinds.
struct AbortOnPanic<'a>(&'a RunControl);

impl Drop for AbortOnPanic<'_> {
    fn drop(&mut self) {
        if thread::panicking() {
            self.0.abort.store(true, Ordering::Release);
        }
    }
}

fn run_workers<P: LatticeLinearProblem>(
    problem: &P,
    state: &GlobalState<P::State>,
    pool: &WorkPool,
) -> Result<(), SolveError> {
    {
        let seeder = pool.seeder();
        problem.initial_states_to_process(state, &seeder);
    }
    let control = RunControl {
        abort: AtomicBool::new(false),
        error: Mutex::new(None),
    };
    let panics: Vec<String> = thread::scope(|s| {
        let handles: Vec<_> = (0..pool.threads())
            .map(|id| {
                let control = &control;
                thread::Builder::new()
                    .name(format!("llp-worker-{id}"))
                    .spawn_scoped(s, move || {
                        let _guard = AbortOnPanic(control);
                        worker_loop(problem, state, pool, id, control)
                    })
                    .expect("failed to spawn worker thread")
            })
            .collect();
        handles
            .into_iter()
            .filter_map(|h| h.join().err().map(panic_message))
            .collect()
    });
    if let Some(message) = panics.into_iter().next() {
        return Err(SolveError::WorkerPanic(message));
    }
    match control
        .error
        .into_inner()
        .unwrap_or_else(|e| e.into_inner())
    {
        Some(error) => Err(error),
        None => Ok(()),
    }
}

fn worker_loop<P: LatticeLinearProblem>(
    problem: &P,
    state: &GlobalState<P::State>,
    pool: &WorkPool,
    id: usize,
    control: &RunControl,
) {
    let handle = pool.handle(id);
    let token = handle.token();
    let backoff = Backoff::new();
    while !control.aborted() {
        match handle.pop() {
            Some(item) => {
                token.claimed();
                let outcome = problem.ensure(state, item.index, &handle);
                token.finished();
                if let Err(error) = outcome {
                    control.fail(error);
                    return;
                }
                backoff.reset();
            }
            None if token.quiesce() => return,
            None if backoff.is_completed() => thread::yield_now(),
            None => backoff.snooze(),
        }
    }
}

fn panic_message(payload: Box<dyn std::any::Any + Send>) -> String {
    if let Some(s) = payload.downcast_ref::<&str>() {
        s.to_string()
    } else if let Some(s) = payload.downcast_ref::<String>() {
        s.clone()
    } else {
        "non-string panic payload".to_string()
    }
}

/// Runs `f`, converting a panic into `WorkerPanic`.
fn catch_panic<T>(f: impl FnOnce() -> Result<T, SolveError>) -> Result<T, SolveError> {
    panic::catch_unwind(AssertUnwindSafe(f))
        .unwrap_or_else(|p| Err(SolveError::WorkerPanic(panic_message(p))))
}
