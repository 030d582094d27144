//! Commands behind the `fsadiff` binary.
//!
//! Every command is a plain function generic over the semiring so it can be
//! driven from tests with any [`Semiring`] implementation.

use std::alloc::{GlobalAlloc, Layout, System};
use std::fmt::Write as _;
use std::hint::black_box;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fsadiff::check::{run_checks, CheckOptions, CheckReport};
use fsadiff::semiring::{parse_cotangent, DEFAULT_KAPPA, DEFAULT_TAU};
use fsadiff::tape::record_weight;
use fsadiff::text::{parse_fsa, write_fsa, write_gradients, ParsedFsa};
use fsadiff::wfsa::{concat_power, topological_sort, Forward};
use fsadiff::{
    AutomatonGradients, Cotangent, Counted, Error, Log, LogExpectation, LogKappa, Real, Semiring,
};

static ALLOCATIONS: AtomicU64 = AtomicU64::new(0);

/// System allocator that counts allocation calls. Install it with
/// `#[global_allocator]` to make [`allocation_count`] meaningful.
pub struct CountingAlloc;

unsafe impl GlobalAlloc for CountingAlloc {
    unsafe fn alloc(&self, layout: Layout) -> *mut u8 {
        ALLOCATIONS.fetch_add(1, Ordering::Relaxed);
        System.alloc(layout)
    }

    unsafe fn alloc_zeroed(&self, layout: Layout) -> *mut u8 {
        ALLOCATIONS.fetch_add(1, Ordering::Relaxed);
        System.alloc_zeroed(layout)
    }

    unsafe fn realloc(&self, ptr: *mut u8, layout: Layout, new_size: usize) -> *mut u8 {
        ALLOCATIONS.fetch_add(1, Ordering::Relaxed);
        System.realloc(ptr, layout, new_size)
    }

    unsafe fn dealloc(&self, ptr: *mut u8, layout: Layout) {
        System.dealloc(ptr, layout)
    }
}

/// Allocations (including reallocations) performed so far by the process.
pub fn allocation_count() -> u64 {
    ALLOCATIONS.load(Ordering::Relaxed)
}

/// An error with the process exit code it maps to.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    pub fn failure(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. } | Error::InvalidArgument(_) => 2,
            _ => 1,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SemiringName {
    Real,
    Log,
    Logk,
    Logexp,
    Tropical,
    Arctic,
}

#[derive(Debug, Clone, Args)]
pub struct SemiringArgs {
    #[arg(long, value_enum)]
    pub semiring: SemiringName,
    /// Log-semiring temperature.
    #[arg(long, default_value_t = DEFAULT_TAU)]
    pub tau: f64,
    /// κ of the deformed log semiring.
    #[arg(long, default_value_t = DEFAULT_KAPPA)]
    pub kappa: f64,
}

#[derive(Debug, Parser)]
#[command(name = "fsadiff", version, about = "Weights and gradients of acyclic weighted automata")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the weight of an automaton.
    Weight {
        #[arg(long)]
        fsa: String,
        #[command(flatten)]
        semiring: SemiringArgs,
    },
    /// Print the automaton with every weight replaced by its gradient.
    Grad {
        #[arg(long)]
        fsa: String,
        #[command(flatten)]
        semiring: SemiringArgs,
        /// Output cotangent, e.g. `1` or `1,0`. Defaults to the unit seed.
        #[arg(long, allow_hyphen_values = true)]
        seed: Option<String>,
    },
    /// Compare weights and gradients against the brute-force oracles.
    Check {
        #[arg(long)]
        fsa: String,
        #[command(flatten)]
        semiring: SemiringArgs,
        #[arg(long, default_value_t = fsadiff::oracle::DEFAULT_MAX_PATHS)]
        max_paths: usize,
    },
    /// Time forward, flattened backward and tape backward on repeated
    /// concatenations of an automaton and write CSV.
    Bench {
        #[arg(long)]
        base_fsa: String,
        #[command(flatten)]
        semiring: SemiringArgs,
        /// Strictly increasing concatenation powers.
        #[arg(long, value_delimiter = ',', default_value = "1,2,4,8,16,32,64,128,256")]
        repeats: Vec<usize>,
        #[arg(long, default_value_t = 5)]
        runs: usize,
        /// Output file; standard output if absent.
        #[arg(long)]
        out: Option<String>,
    },
    /// Topologically sort an automaton.
    Sort {
        #[arg(long)]
        fsa: String,
        /// Output file; standard output if absent.
        #[arg(long)]
        out: Option<String>,
        /// Weight syntax of the file.
        #[arg(long, value_enum, default_value = "log")]
        semiring: SemiringName,
    },
}

/// Parses and topologically sorts. The returned gradients of
/// [`ParsedFsa`] refer to the file's own state ids.
fn load_sorted<S: Semiring>(s: &S, text: &str) -> CliResult<(ParsedFsa<S>, fsadiff::Automaton<S>, Vec<usize>)> {
    let parsed = parse_fsa(s, text)?;
    let (sorted, perm) = topological_sort(&parsed.automaton)?;
    Ok((parsed, sorted, perm))
}

pub fn cmd_weight<S: Semiring>(s: &S, text: &str) -> CliResult<String> {
    let (_, sorted, _) = load_sorted(s, text)?;
    let fwd = Forward::evaluate(&sorted)?;
    Ok(format!("{}\n", s.format_elem(fwd.nu)))
}

/// Gradients of `ν` indexed by the file's original state ids.
pub fn gradients<S: Semiring>(
    s: &S,
    text: &str,
    seed: S::Cotangent,
) -> CliResult<(ParsedFsa<S>, AutomatonGradients<S::Cotangent>)> {
    let (parsed, sorted, perm) = load_sorted(s, text)?;
    let fwd = Forward::evaluate(&sorted)?;
    let mut g = fwd.backward(&sorted, seed)?;
    g.grad_initial = perm.iter().map(|&new| g.grad_initial[new]).collect();
    g.grad_final = perm.iter().map(|&new| g.grad_final[new]).collect();
    Ok((parsed, g))
}

pub fn cmd_grad<S: Semiring>(s: &S, text: &str, seed: Option<&str>) -> CliResult<String> {
    let seed = match seed {
        Some(spec) => parse_cotangent(spec).map_err(|e| CliError::usage(format!("--seed: {e}")))?,
        None => S::Cotangent::seed(),
    };
    let (parsed, g) = gradients(s, text, seed)?;
    Ok(write_gradients(&parsed, &g))
}

pub fn cmd_check<S: Semiring>(s: &S, text: &str, max_paths: usize) -> CliResult<CheckReport> {
    let parsed = parse_fsa(s, text)?;
    let opts = CheckOptions {
        max_paths,
        ..CheckOptions::default()
    };
    Ok(run_checks(&parsed.automaton, &opts)?)
}

/// Returns the sorted automaton in canonical form and the permutation
/// (`perm[old] = new`).
pub fn cmd_sort<S: Semiring>(s: &S, text: &str) -> CliResult<(String, Vec<usize>)> {
    let (_, sorted, perm) = load_sorted(s, text)?;
    Ok((write_fsa(&sorted), perm))
}

pub const BENCH_HEADER: &str = "K,forward_s,rule_s,naive_s,forward_allocs,rule_allocs,naive_allocs";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchRow {
    pub k: usize,
    pub forward_s: f64,
    pub rule_s: f64,
    pub naive_s: f64,
    pub forward_allocs: u64,
    pub rule_allocs: u64,
    pub naive_allocs: u64,
}

pub fn bench_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from(BENCH_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{:e},{:e},{:e},{},{},{}",
            r.k, r.forward_s, r.rule_s, r.naive_s, r.forward_allocs, r.rule_allocs, r.naive_allocs
        );
    }
    out
}

/// Calls per timing sample, so that small automata are not dominated by
/// clock resolution.
fn batch_size(k: usize) -> usize {
    (50_000 / k.max(1)).clamp(1, 10_000)
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(|a, b| a.total_cmp(b));
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

/// Median seconds per call of `f` over `runs` samples, after one warm-up.
fn time_median(runs: usize, batch: usize, mut f: impl FnMut()) -> f64 {
    f();
    let samples = (0..runs)
        .map(|_| {
            let start = Instant::now();
            for _ in 0..batch {
                f();
            }
            start.elapsed().as_secs_f64() / batch as f64
        })
        .collect();
    median(samples)
}

fn count_allocs<T>(f: impl FnOnce() -> T) -> (u64, T) {
    let before = allocation_count();
    let out = f();
    (allocation_count() - before, out)
}

/// Benchmarks `concatⁿ(base)` for every `n` in `repeats`.
///
/// Allocation counts come from [`allocation_count`] and are zero unless
/// [`CountingAlloc`] is the global allocator.
pub fn cmd_bench<S: Semiring>(
    s: &S,
    text: &str,
    repeats: &[usize],
    runs: usize,
) -> CliResult<Vec<BenchRow>> {
    if repeats.is_empty() || repeats[0] == 0 || repeats.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::usage("--repeats must be positive and strictly increasing"));
    }
    if runs < 3 {
        return Err(CliError::usage("--runs must be at least 3"));
    }
    let (_, base, _) = load_sorted(s, text)?;
    let seed = S::Cotangent::seed();
    let mut rows: Vec<BenchRow> = Vec::with_capacity(repeats.len());
    for &n in repeats {
        let a = concat_power(&base, n)?;
        let k = a.size();
        if rows.last().is_some_and(|r| r.k >= k) {
            return Err(CliError::failure("automaton size K does not grow with the repeat count"));
        }
        let batch = batch_size(k);

        let (forward_allocs, fwd) = count_allocs(|| Forward::evaluate(&a));
        let fwd = fwd?;
        let (rule_allocs, grads) = count_allocs(|| fwd.backward(&a, seed));
        drop(grads?);
        let (naive_allocs, tape_grads) = count_allocs(|| {
            record_weight(&a).and_then(|rec| rec.gradients(seed))
        });
        drop(tape_grads?);

        let forward_s = time_median(runs, batch, || {
            black_box(Forward::evaluate(black_box(&a)).ok());
        });
        let rule_s = time_median(runs, batch, || {
            black_box(fwd.backward(black_box(&a), seed).ok());
        });
        let naive_s = time_median(runs, batch, || {
            let rec = record_weight(black_box(&a)).ok();
            black_box(rec.and_then(|r| r.gradients(seed).ok()));
        });
        rows.push(BenchRow {
            k,
            forward_s,
            rule_s,
            naive_s,
            forward_allocs,
            rule_allocs,
            naive_allocs,
        });
    }
    Ok(rows)
}

/// Calls `$f(&semiring, args…)` with the semiring selected by `$args`.
macro_rules! with_semiring {
    ($args:expr, $f:ident ( $($arg:expr),* )) => {{
        let args: &$crate::SemiringArgs = &$args;
        match args.semiring {
            $crate::SemiringName::Real => $f(&$crate::Real, $($arg),*),
            $crate::SemiringName::Log => $f(&$crate::Log::new(args.tau)?, $($arg),*),
            $crate::SemiringName::Logk => $f(&$crate::LogKappa::new(args.kappa)?, $($arg),*),
            $crate::SemiringName::Logexp => $f(&$crate::LogExpectation, $($arg),*),
            $crate::SemiringName::Tropical => $f(&$crate::Counted::tropical(), $($arg),*),
            $crate::SemiringName::Arctic => $f(&$crate::Counted::arctic(), $($arg),*),
        }
    }};
}

fn read(path: &str) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::failure(format!("{path}: {e}")))
}

fn write_out(path: Option<&str>, content: &str) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, content).map_err(|e| CliError::failure(format!("{p}: {e}"))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn report<S: Semiring>(s: &S, text: &str, max_paths: usize) -> CliResult<i32> {
    let r = cmd_check(s, text, max_paths)?;
    print!("{r}");
    Ok(if r.passed() { 0 } else { 1 })
}

fn bench<S: Semiring>(
    s: &S,
    text: &str,
    repeats: &[usize],
    runs: usize,
    out: Option<&str>,
) -> CliResult<i32> {
    let rows = cmd_bench(s, text, repeats, runs)?;
    write_out(out, &bench_csv(&rows))?;
    Ok(0)
}

fn sort<S: Semiring>(s: &S, text: &str, out: Option<&str>) -> CliResult<i32> {
    let (canonical, perm) = cmd_sort(s, text)?;
    for (old, new) in perm.iter().enumerate() {
        eprintln!("{old} -> {new}");
    }
    write_out(out, &canonical)?;
    Ok(0)
}

/// Runs a parsed command line and returns the exit code.
pub fn run(cli: Cli) -> CliResult<i32> {
    match cli.command {
        Command::Weight { fsa, semiring } => {
            let text = read(&fsa)?;
            print!("{}", with_semiring!(semiring, cmd_weight(&text))?);
            Ok(0)
        }
        Command::Grad {
            fsa,
            semiring,
            seed,
        } => {
            let text = read(&fsa)?;
            print!("{}", with_semiring!(semiring, cmd_grad(&text, seed.as_deref()))?);
            Ok(0)
        }
        Command::Check {
            fsa,
            semiring,
            max_paths,
        } => {
            let text = read(&fsa)?;
            with_semiring!(semiring, report(&text, max_paths))
        }
        Command::Bench {
            base_fsa,
            semiring,
            repeats,
            runs,
            out,
        } => {
            let text = read(&base_fsa)?;
            with_semiring!(semiring, bench(&text, &repeats, runs, out.as_deref()))
        }
        Command::Sort { fsa, out, semiring } => {
            let text = read(&fsa)?;
            let args = SemiringArgs {
                semiring,
                tau: DEFAULT_TAU,
                kappa: DEFAULT_KAPPA,
            };
            with_semiring!(args, sort(&text, out.as_deref()))
        }
    }
}
