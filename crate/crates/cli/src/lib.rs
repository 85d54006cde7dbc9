//! The `tomosched` command line: schedule generation, circuit synthesis,
//! verification, sampling and count statistics.
//!
//! [`run`] is the whole program; `main` only forwards `std::env::args` and
//! exits with the returned code (0 success, 1 failure, 2 usage error).

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::json;
use tomosched::algebra::PauliString;
use tomosched::qubit_cover::{ceil_log2, qubit_words_k};
use tomosched::majorana_cover::{four_majorana_cover, pairing_cliques_1rdm};
use tomosched::schedule::{Payload, Schedule};
use tomosched::symmetry_cover::{predicted_count, symmetry_cover_bins, Bins, SymmetrySet};
use tomosched::verify::{
    check_schedule, exact_expectation, sample_estimate, CheckMode, DenseState, SampleState,
};

#[derive(Debug, Parser)]
#[command(name = "tomosched", version, about = "Measurement schedules for partial tomography")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "TOMOSCHED_JOBS")]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Output {
    /// Write to this file instead of stdout.
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ScheduleOutput {
    #[command(flatten)]
    out: Output,

    /// Also write every clique's operator list.
    #[arg(long)]
    expanded: bool,

    /// Attach measurement circuits.
    #[arg(long)]
    circuits: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Pauli words containing every k-qubit operator.
    QubitCover {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[command(flatten)]
        out: ScheduleOutput,
    },
    /// Majorana pairings covering the fermionic 1-RDM (k = 1) or 2-RDM (k = 2).
    MajoranaCover {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[command(flatten)]
        out: ScheduleOutput,
    },
    /// 2-RDM pairings for symmetry-conserving quadruples only.
    SymmetryCover {
        #[arg(long)]
        n: usize,
        /// A Pauli-word symmetry on the Jordan–Wigner qubits, e.g. ZZZZ.
        #[arg(long = "sym", conflicts_with = "balanced")]
        sym: Vec<String>,
        /// Synthetic balanced bins for this many symmetries.
        #[arg(long)]
        balanced: Option<usize>,
        /// Also write the count against its formula as a one-row CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        out: ScheduleOutput,
    },
    /// Degree-4 monomials partitioned into anticommuting sets of size ≤ ω.
    AnticommutingGroups {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        omega: usize,
        #[command(flatten)]
        out: ScheduleOutput,
    },
    /// Attach measurement circuits to every clique of a schedule.
    Circuits {
        #[arg(long)]
        from: PathBuf,
        #[arg(long)]
        expanded: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Check a schedule with the independent oracles; exit 1 on failure.
    Verify {
        #[arg(long)]
        schedule: PathBuf,
        /// Enumerate every target regardless of size.
        #[arg(long, conflicts_with = "sampled")]
        exhaustive: bool,
        /// Check this many random targets.
        #[arg(long)]
        sampled: Option<usize>,
        #[command(flatten)]
        out: Output,
    },
    /// Simulate measuring every clique and estimate every operator.
    Sample {
        #[arg(long)]
        schedule: PathBuf,
        #[arg(long, default_value_t = 1000)]
        shots: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = StateKind::Mixed)]
        state: StateKind,
        #[command(flatten)]
        out: Output,
    },
    /// Measured clique counts against their formulas, as CSV.
    Stats {
        #[arg(long, value_enum, default_value_t = StatsScheme::Symmetry)]
        scheme: StatsScheme,
        /// Largest N in the sweep (powers of two).
        #[arg(long, default_value_t = 64)]
        n_max: usize,
        /// Smallest N in the sweep.
        #[arg(long, default_value_t = 4)]
        n_min: usize,
        /// Symmetry counts, `a..b` (inclusive) or a single value.
        #[arg(long, default_value = "0..4")]
        sym_count: String,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StateKind {
    /// Maximally mixed: uniformly random outcomes.
    Mixed,
    /// A random pure state drawn from the seed.
    Random,
    /// The all-zeros computational basis state.
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StatsScheme {
    Qubit,
    Rdm1,
    Majorana,
    Symmetry,
}

impl StatsScheme {
    fn name(self) -> &'static str {
        match self {
            StatsScheme::Qubit => "qubit",
            StatsScheme::Rdm1 => "rdm1",
            StatsScheme::Majorana => "majorana",
            StatsScheme::Symmetry => "symmetry",
        }
    }
}

/// Run the program on `args` (including the program name) and return the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cli.jobs {
        if j == 0 {
            eprintln!("error: --jobs must be at least 1");
            return 2;
        }
        pool = pool.num_threads(j);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    match pool.install(|| execute(cli.command)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<Usage>() {
                Some(_) => 2,
                None => 1,
            }
        }
    }
}

/// A bad argument value detected after parsing.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

/// Generator argument errors are usage errors.
fn generated(r: tomosched::Result<Schedule>) -> anyhow::Result<Schedule> {
    r.map_err(|e| match e {
        tomosched::Error::InvalidArgument(_) | tomosched::Error::Dimension { .. } => usage(e.to_string()),
        other => other.into(),
    })
}

fn execute(cmd: Command) -> anyhow::Result<i32> {
    match cmd {
        Command::QubitCover { n, k, out } => emit_schedule(generated(Schedule::qubit(n, k))?, &out),
        Command::MajoranaCover { n, k, out } => emit_schedule(generated(Schedule::majorana(n, k))?, &out),
        Command::SymmetryCover { n, sym, balanced, csv, out } => {
            let s = match balanced {
                Some(n_sym) => generated(Bins::balanced(n, n_sym).and_then(|b| Schedule::symmetry_bins(n, b)))?,
                None => {
                    let ops = sym.iter().map(|s| s.parse::<PauliString>()).collect::<tomosched::Result<Vec<_>>>();
                    let syms = ops.and_then(SymmetrySet::new).map_err(|e| usage(e.to_string()))?;
                    generated(Schedule::symmetry(n, &syms))?
                }
            };
            if let Some(path) = csv {
                let n_sym = s.bins.as_ref().map_or(0, |b| b.n_sym);
                let measured = s.cliques.len();
                let predicted = predicted_count(n, n_sym);
                let mut text = String::from("n,n_sym,measured_count,predicted_count,ratio\n");
                writeln!(text, "{n},{n_sym},{measured},{predicted:.4},{:.6}", measured as f64 / predicted)?;
                write_file(&path, &text)?;
            }
            emit_schedule(s, &out)
        }
        Command::AnticommutingGroups { n, omega, out } => emit_schedule(generated(Schedule::anticommuting(n, omega))?, &out),
        Command::Circuits { from, expanded, out } => {
            let mut s = read_schedule(&from)?;
            s.attach_circuits()?;
            write_out(&out, &s.to_json(expanded)?)?;
            Ok(0)
        }
        Command::Verify { schedule, exhaustive, sampled, out } => {
            let s = read_schedule(&schedule)?;
            let mode = match (exhaustive, sampled) {
                (true, _) => CheckMode::Exhaustive,
                (false, Some(0)) => return Err(usage("--sampled needs a positive count")),
                (false, Some(c)) => CheckMode::Sampled(c),
                (false, None) => CheckMode::Auto,
            };
            let report = check_schedule(&s, mode)?;
            write_out(&out, &format!("{}\n", serde_json::to_string_pretty(&report)?))?;
            Ok(if report.passed { 0 } else { 1 })
        }
        Command::Sample { schedule, shots, seed, state, out } => {
            let s = read_schedule(&schedule)?;
            write_out(&out, &sample(s, shots, seed, state)?)?;
            Ok(0)
        }
        Command::Stats { scheme, n_max, n_min, sym_count, csv } => {
            let text = stats(scheme, n_min, n_max, &sym_count)?;
            match csv {
                Some(path) => write_file(&path, &text)?,
                None => print!("{text}"),
            }
            Ok(0)
        }
    }
}

fn emit_schedule(mut s: Schedule, out: &ScheduleOutput) -> anyhow::Result<i32> {
    if out.circuits {
        s.attach_circuits()?;
    }
    write_out(&out.out, &s.to_json(out.expanded)?)?;
    Ok(0)
}

fn read_schedule(path: &Path) -> anyhow::Result<Schedule> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Schedule::from_json(&text).with_context(|| format!("loading {}", path.display()))
}

fn write_file(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn write_out(out: &Output, text: &str) -> anyhow::Result<()> {
    match &out.output {
        Some(path) => write_file(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn sample(mut s: Schedule, shots: usize, seed: u64, kind: StateKind) -> anyhow::Result<String> {
    if shots == 0 {
        return Err(usage("--shots must be positive"));
    }
    if s.cliques.iter().any(|c| matches!(c.payload, Payload::AntiCommutingSet(_))) {
        return Err(usage("sample supports qubit-word and majorana-pairing schedules"));
    }
    if s.cliques.iter().any(|c| c.circuit.is_none()) {
        s.attach_circuits()?;
    }
    let n = s.n_qubits();
    let dense = match kind {
        StateKind::Mixed => None,
        StateKind::Zero => Some(DenseState::zero(n)?),
        StateKind::Random => Some(DenseState::random_seeded(n, seed)?),
    };
    let state = match &dense {
        Some(d) => SampleState::Dense(d.clone()),
        None => SampleState::MaximallyMixed { n_qubits: n },
    };
    let cliques = s
        .cliques
        .iter()
        .map(|c| Ok((c.circuit.clone().expect("attached"), s.observables(c)?)))
        .collect::<tomosched::Result<Vec<_>>>()?;
    let estimates = sample_estimate(&state, &cliques, shots, seed)?;

    // Exact values for the operators, keyed like the estimates.
    let mut exact = std::collections::BTreeMap::new();
    if let Some(d) = &dense {
        for (_, obs) in &cliques {
            for o in obs {
                let key = tomosched::verify::operator_key(&o.operator);
                if !exact.contains_key(&key) {
                    exact.insert(key, exact_expectation(d, &o.operator)?);
                }
            }
        }
    }
    let mut worst = 0.0f64;
    let rows: Vec<serde_json::Value> = estimates
        .iter()
        .map(|e| {
            // Worst-case standard error of a ±1 average.
            let sigma = 1.0 / (e.shots as f64).sqrt();
            let mut row = json!({
                "mean": e.mean,
                "operator": e.operator,
                "shots": e.shots,
                "sigma_bound": sigma,
                "variance_of_mean": e.variance_of_mean,
            });
            let reference = exact.get(&e.operator).copied().unwrap_or(0.0);
            if dense.is_some() || kind == StateKind::Mixed {
                let z = (e.mean - reference).abs() / sigma;
                worst = worst.max(z);
                row["exact"] = json!(reference);
                row["deviation_sigmas"] = json!(z);
            }
            row
        })
        .collect();
    let report = json!({
        "estimates": rows,
        "max_deviation_sigmas": worst,
        "operators": estimates.len(),
        "seed": seed,
        "shots_per_clique": shots,
        "state": match kind { StateKind::Mixed => "mixed", StateKind::Random => "random", StateKind::Zero => "zero" },
    });
    Ok(format!("{}\n", serde_json::to_string_pretty(&report)?))
}

fn parse_range(s: &str) -> anyhow::Result<Vec<usize>> {
    let bad = || usage(format!("expected `a..b` or a number, got {s:?}"));
    match s.split_once("..") {
        Some((a, b)) => {
            let (a, b): (usize, usize) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
            if a > b {
                return Err(bad());
            }
            Ok((a..=b).collect())
        }
        None => Ok(vec![s.trim().parse().map_err(|_| bad())?]),
    }
}

fn stats(scheme: StatsScheme, n_min: usize, n_max: usize, sym_count: &str) -> anyhow::Result<String> {
    if n_min < 2 || n_min > n_max {
        return Err(usage(format!("need 2 ≤ --n-min ≤ --n-max, got {n_min} and {n_max}")));
    }
    let syms = if scheme == StatsScheme::Symmetry { parse_range(sym_count)? } else { vec![0] };
    if syms.iter().any(|&s| s > 16) {
        return Err(usage("at most 16 symmetries are supported"));
    }
    let ns: Vec<usize> = (1..usize::BITS).map(|e| 1usize << e).filter(|&n| n >= n_min && n <= n_max).collect();
    if ns.is_empty() {
        bail!("no power of two lies in [{n_min}, {n_max}]");
    }
    let jobs: Vec<(usize, usize)> = syms.iter().flat_map(|&s| ns.iter().map(move |&n| (n, s))).collect();
    let rows: Vec<(usize, usize, usize, f64)> = jobs
        .par_iter()
        .map(|&(n, n_sym)| {
            let (measured, predicted) = match scheme {
                StatsScheme::Qubit => (qubit_words_k(n, 2)?.len(), (6 * ceil_log2(n) + 3) as f64),
                StatsScheme::Rdm1 => (pairing_cliques_1rdm(n)?.len(), (2 * n - 1) as f64),
                StatsScheme::Majorana => (four_majorana_cover(n)?.len(), 10.0 / 3.0 * (n * n) as f64),
                StatsScheme::Symmetry => {
                    (symmetry_cover_bins(n, &Bins::balanced(n, n_sym)?)?.len(), predicted_count(n, n_sym))
                }
            };
            Ok((n, n_sym, measured, predicted))
        })
        .collect::<tomosched::Result<_>>()?;
    let mut text = String::from("n,n_sym,scheme,measured_count,predicted_count,ratio\n");
    for (n, n_sym, measured, predicted) in rows {
        writeln!(text, "{n},{n_sym},{},{measured},{predicted:.4},{:.6}", scheme.name(), measured as f64 / predicted)?;
    }
    Ok(text)
}
