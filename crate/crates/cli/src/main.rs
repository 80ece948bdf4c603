//! `stablecut`: robust and local-search solvers for stable Max Cut and
//! Multiway Cut, exhaustive certification, fixture generation and benches.

mod bench;
mod commands;
mod generate;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use stablecut::reduce::Gadget;
use stablecut::Error;

use report::{RunReport, Status};

#[derive(Parser)]
#[command(name = "stablecut", version, about = "Solvers and oracles for perturbation-stable graph partitioning")]
struct Cli {
    /// Print a human-readable report instead of JSON.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve Max Cut.
    Maxcut(MaxCutArgs),
    /// Solve Minimum Multiway Cut on an instance with terminals.
    Multiway(MultiwayArgs),
    /// Decide γ-stability (or (γ, δ) weak stability) with the exact oracles.
    Certify(CertifyArgs),
    /// Write a generated, oracle-verified fixture.
    Generate(GenerateArgs),
    /// Estimate rounding separation probabilities of a relaxation solution.
    Round(RoundArgs),
    /// Run a seeded suite and write one CSV row per instance.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Mode {
    Robust,
    LocalSearch,
    Brute,
}

impl Mode {
    fn name(self) -> &'static str {
        match self {
            Mode::Robust => "robust",
            Mode::LocalSearch => "local-search",
            Mode::Brute => "brute",
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SolverKind {
    Exact,
    Spectral,
}

#[derive(Args)]
pub struct MaxCutArgs {
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "robust")]
    pub mode: Mode,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Feasibility, PSD and objective tolerance of the SDP solver.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Sparsest-cut solver used by local search.
    #[arg(long, value_enum, default_value = "exact")]
    pub sc: SolverKind,
}

#[derive(Args)]
pub struct MultiwayArgs {
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "robust")]
    pub mode: Mode,
    /// Rounding samples per improvement round (default 100·m).
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args)]
pub struct CertifyArgs {
    pub input: PathBuf,
    #[arg(long)]
    pub gamma: f64,
    #[arg(long)]
    pub delta: Option<f64>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Family {
    /// Sparsest-cut instance reduced to a stable Max Cut instance.
    ScReduction,
    /// (γ, δ)-weakly stable Max Cut with a planted cut.
    WeakMaxcut,
    /// Multiway Cut with a planted partition of margin above γ.
    Multiway,
    /// The 3-terminal star with one heavy edge.
    Star,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum GadgetArg {
    Symmetric,
    Literal,
}

impl From<GadgetArg> for Gadget {
    fn from(g: GadgetArg) -> Self {
        match g {
            GadgetArg::Symmetric => Gadget::Symmetric,
            GadgetArg::Literal => Gadget::Literal,
        }
    }
}

#[derive(Args)]
pub struct GenerateArgs {
    #[arg(value_enum)]
    pub family: Family,
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    #[arg(long, default_value_t = 2.0)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0.2)]
    pub delta: f64,
    /// Capacity gadget of the sparsest-cut reduction.
    #[arg(long, value_enum, default_value = "symmetric")]
    pub gadget: GadgetArg,
    /// Weight of the heavy star edge.
    #[arg(long, default_value_t = 5.0)]
    pub weight: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Args)]
pub struct RoundArgs {
    /// Instance with terminals.
    pub input: PathBuf,
    /// JSON array of per-vertex simplex points; the relaxation is solved
    /// when omitted.
    #[arg(long)]
    pub points: Option<PathBuf>,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 8)]
    pub streams: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Suite {
    Maxcut,
    Multiway,
    Reduction,
}

#[derive(Args)]
pub struct BenchArgs {
    #[arg(value_enum, default_value = "maxcut")]
    pub suite: Suite,
    #[arg(long, default_value_t = 50)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(short, long)]
    pub output: PathBuf,
}

fn run(command: &Command) -> RunReport {
    let start = Instant::now();
    let (mut report, result) = match command {
        Command::Maxcut(a) => {
            let mut r = RunReport::new("maxcut", a.seed);
            r.mode = Some(a.mode.name());
            let res = commands::maxcut(a, &mut r);
            (r, res)
        }
        Command::Multiway(a) => {
            let mut r = RunReport::new("multiway", a.seed);
            r.mode = Some(a.mode.name());
            let res = commands::multiway(a, &mut r);
            (r, res)
        }
        Command::Certify(a) => {
            let mut r = RunReport::new("certify", 0);
            let res = commands::certify(&a.input, a.gamma, a.delta, &mut r);
            (r, res)
        }
        Command::Generate(a) => {
            let mut r = RunReport::new("generate", a.seed);
            let res = generate::generate(a, &mut r);
            (r, res)
        }
        Command::Round(a) => {
            let mut r = RunReport::new("round", a.seed);
            let res = commands::round(a, &mut r);
            (r, res)
        }
        Command::Bench(a) => {
            let mut r = RunReport::new("bench", a.seed);
            let res = bench::bench(a, &mut r);
            (r, res)
        }
    };
    if let Err(e) = result {
        report.fail(&e);
        eprintln!("error: {e}");
        if matches!(e, Error::Validation(_) | Error::SizeCap { .. }) {
            report.diagnostics = serde_json::json!({ "usage_error": true });
        }
    }
    report.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    report
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = run(&cli.command);
    if cli.pretty {
        print!("{}", report.to_text());
    } else {
        println!("{}", serde_json::to_string(&report).expect("reports serialize"));
    }
    match (report.status, report.diagnostics.get("usage_error")) {
        (Status::Error, Some(_)) => ExitCode::from(2),
        (Status::Error, None) => ExitCode::FAILURE,
        _ => ExitCode::SUCCESS,
    }
}
