use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qpolar::harness::{
    entropy_grid, figure_grid, linear_grid, parse_probability, run_sweep, run_verify, trace_report, write_csv,
    SweepConfig, SweepProtocol, VerifyOptions,
};
use qpolar::polar::{design_frozen_set, Dimension, PolarCodeSpec, MAX_N_EXP};
use qpolar::protocol::{ExecutionMode, Protocol, ProtocolConfig};
use qpolar::qsim::QubitSource;

const EXIT_USAGE: u8 = 2;
const EXIT_VERIFY: u8 = 3;
const EXIT_RESOURCE: u8 = 4;

#[derive(Parser)]
#[command(name = "qpolar", version, about = "Quantum state compression with embedded polar codes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Design a frozen set by genie-aided Monte Carlo and write the code as JSON.
    Design(DesignArgs),
    /// Success probability and rate over a grid of source probabilities, as CSV.
    Sweep(SweepArgs),
    /// Run the cross-check suites; exit 3 if any check fails.
    Verify(VerifyArgs),
    /// Print the conditional-message trace of the length-4 example.
    Trace(TraceArgs),
    /// Run the protocol once and print the outcome as JSON.
    Run(RunArgs),
}

#[derive(Args)]
struct DesignArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=MAX_N_EXP as i64))]
    n_exp: u32,
    /// Design bit-flip probability in (0, 0.5].
    #[arg(long)]
    p: f64,
    /// Information bits kept. Defaults to the rate rule with `--delta`.
    #[arg(long, conflicts_with = "delta")]
    k: Option<usize>,
    /// Gap below capacity for K = floor((1 - h(p) - delta) N).
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum GridKind {
    /// p evenly spaced on [p-min, p-max].
    Linear,
    /// h(p) evenly spaced inside (h-min, h-max).
    Entropy,
}

#[derive(Args)]
struct SweepArgs {
    /// Code JSON written by `design`.
    #[arg(long)]
    spec: PathBuf,
    #[arg(long, value_enum, default_value_t = GridKind::Linear)]
    grid: GridKind,
    #[arg(long, default_value_t = 100)]
    points: usize,
    #[arg(long, default_value_t = 0.01)]
    p_min: f64,
    #[arg(long, default_value_t = 0.49)]
    p_max: f64,
    #[arg(long, default_value_t = 0.05)]
    h_min: f64,
    #[arg(long, default_value_t = 1.0)]
    h_max: f64,
    /// Explicit source probabilities; overrides the grid flags.
    #[arg(long, value_delimiter = ',')]
    p: Option<Vec<f64>>,
    /// Subset of polar-exact, polar-mc, schumacher.
    #[arg(long, value_delimiter = ',', default_value = "polar-exact,polar-mc,schumacher")]
    protocols: Vec<String>,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Typicality width for the Schumacher rows.
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Largest blocklength for density-matrix checks.
    #[arg(long, default_value_t = 8)]
    quantum_cap: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Build the correctable set for a different frozen set (negative control).
    #[arg(long)]
    inject_fault: bool,
    /// Print the report as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct TraceArgs {
    /// Source probability: decimal or fraction, evaluated exactly.
    #[arg(long, default_value = "0.1")]
    p: String,
    #[arg(long, default_value_t = 2)]
    n_exp: u32,
    #[arg(long, value_delimiter = ',', default_value = "1,3")]
    frozen: Vec<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    QuantumExact,
    QuantumPure,
    ClassicalFast,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    p: f64,
    #[arg(long, value_enum, default_value_t = Mode::ClassicalFast)]
    mode: Mode,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Draw the source eigenbasis at random instead of using the computational basis.
    #[arg(long)]
    random_basis: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Design(a) => design(a),
        Command::Sweep(a) => sweep(a),
        Command::Verify(a) => verify(a),
        Command::Trace(a) => trace(a),
        Command::Run(a) => run(a),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<qpolar::Error>() {
        Some(qpolar::Error::Resource(_)) => EXIT_RESOURCE,
        Some(qpolar::Error::Parameter(_) | qpolar::Error::Size(_) | qpolar::Error::Domain(_)) => EXIT_USAGE,
        _ if err.downcast_ref::<UsageError>().is_some() => EXIT_USAGE,
        _ => 1,
    }
}

#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct UsageError(String);

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn load_spec(path: &PathBuf) -> Result<PolarCodeSpec> {
    PolarCodeSpec::load(path).with_context(|| format!("reading code from {}", path.display()))
}

fn design(a: DesignArgs) -> Result<ExitCode> {
    let dimension = match (a.k, a.delta) {
        (Some(k), _) => Dimension::Explicit(k),
        (None, Some(delta)) => Dimension::RateRule { delta },
        (None, None) => bail!(UsageError("one of --k or --delta is required".into())),
    };
    let report = design_frozen_set(a.n_exp, a.p, dimension, a.trials, a.seed)?;
    let mut out = output(&a.out)?;
    writeln!(out, "{}", report.spec.to_json()?)?;
    out.flush()?;
    eprintln!("N={} K={} frozen={:?}", report.spec.n(), report.spec.k(), report.spec.frozen_set());
    Ok(ExitCode::SUCCESS)
}

fn sweep(a: SweepArgs) -> Result<ExitCode> {
    let spec = load_spec(&a.spec)?;
    let grid = match (&a.p, a.grid) {
        (Some(ps), _) => ps.clone(),
        (None, GridKind::Linear) if a.points == 100 && a.p_min == 0.01 && a.p_max == 0.49 => figure_grid(),
        (None, GridKind::Linear) => linear_grid(a.p_min, a.p_max, a.points)?,
        (None, GridKind::Entropy) => entropy_grid(a.h_min, a.h_max, a.points)?,
    };
    let protocols = a.protocols.iter().map(|s| SweepProtocol::parse(s)).collect::<qpolar::Result<Vec<_>>>()?;
    let config = SweepConfig { spec, grid, protocols, mc_trials: a.trials, seed: a.seed, delta: a.delta };
    let result = run_sweep(&config)?;
    for msg in &result.skipped {
        eprintln!("skipped: {msg}");
    }
    write_csv(&result.records, output(&a.out)?)?;
    Ok(ExitCode::SUCCESS)
}

fn verify(a: VerifyArgs) -> Result<ExitCode> {
    let opts = VerifyOptions { quantum_cap: a.quantum_cap, seed: a.seed, inject_fault: a.inject_fault };
    let report = run_verify(&opts)?;
    if a.json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        println!("{report}");
    }
    Ok(if report.all_passed() { ExitCode::SUCCESS } else { ExitCode::from(EXIT_VERIFY) })
}

fn trace(a: TraceArgs) -> Result<ExitCode> {
    if a.n_exp != 2 {
        bail!(UsageError(format!("trace supports the length-4 code only (--n-exp 2), got {}", a.n_exp)));
    }
    let p = parse_probability(&a.p)?;
    print!("{}", trace_report(&p, &a.frozen)?.text);
    Ok(ExitCode::SUCCESS)
}

fn run(a: RunArgs) -> Result<ExitCode> {
    let spec = load_spec(&a.spec)?;
    let source = if a.random_basis {
        QubitSource::random_basis(a.p, &mut ChaCha8Rng::seed_from_u64(a.seed))?
    } else {
        QubitSource::computational(a.p)?
    };
    let mode = match a.mode {
        Mode::QuantumExact => ExecutionMode::QuantumExact,
        Mode::QuantumPure => ExecutionMode::QuantumPure,
        Mode::ClassicalFast => ExecutionMode::ClassicalFast,
    };
    let outcome = Protocol::new(ProtocolConfig::new(spec, source, mode))?.run(a.trials, a.seed)?;
    println!("{}", outcome.to_json()?);
    Ok(ExitCode::SUCCESS)
}
