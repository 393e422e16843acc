//! Batch driver for the whole pipeline: number-field analysis, overlap
//! counting, window generation, attractor membership, growth-rate and
//! eigenweight estimation, successor dynamics, and the equidistribution
//! table, each as a subcommand writing deterministic artifacts.

mod cache;
mod config;
mod pipeline;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use bconv_core::{Error, ErrorClass};

use config::{Mode, RunConfig};
use pipeline::Pipeline;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Core(Error),
    Io(std::io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    /// One exit code per error class, documented in the README.
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(e) => match e.class() {
                ErrorClass::NumberField => 3,
                ErrorClass::Resource => 4,
                ErrorClass::Convergence => 5,
                ErrorClass::WindowOrTable => 6,
            },
            CliError::Io(_) => 7,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Config(m) => format!("config error: {m}"),
            CliError::Core(e) => format!("error: {e}"),
            CliError::Io(e) => format!("io error: {e}"),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "bconv",
    about = "algebraic overlap-counting pipeline for self-similar measures",
    version
)]
struct Cli {
    /// Key-value config file; flags below override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Monic integer polynomial, descending coefficients ("1,-1,-1,1,-1").
    #[arg(long, global = true)]
    poly: Option<String>,

    /// Force this representative index as the free direction.
    #[arg(long, global = true)]
    free_override: Option<usize>,

    /// Free-coordinate half-width of the window.
    #[arg(long, global = true)]
    b: Option<f64>,

    /// Attractor approximation depth.
    #[arg(long, global = true)]
    k: Option<usize>,

    /// Membership resolution of the window consistency sweep.
    #[arg(long, global = true)]
    eps_r: Option<f64>,

    /// Clustering tolerance for gap statistics.
    #[arg(long, global = true)]
    delta: Option<f64>,

    /// Stabilization depth of the weight table.
    #[arg(long, global = true)]
    n_stab: Option<usize>,

    /// Levels in the distance table and criterion series.
    #[arg(long = "nmax", global = true)]
    n_max: Option<usize>,

    /// Truncation mode: linear or geometric.
    #[arg(long, global = true)]
    mode: Option<Mode>,

    /// Atom-count ceiling for measure iteration.
    #[arg(long, global = true)]
    atom_cap: Option<usize>,

    /// Point-count ceiling for window and cloud generation.
    #[arg(long, global = true)]
    window_cap: Option<usize>,

    /// Output directory for artifacts and the cache.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker-thread cap (0 = runtime default).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Root classification and derived constants, as JSON.
    Analyze,
    /// Difference-measure masses and the counting criterion series.
    Count,
    /// Window enumeration and the attractor consistency sweep.
    Lattice,
    /// Attractor cloud and the level-6 difference cloud, CSV and SVG.
    Fractal,
    /// Growth rate, cross-check, and eigenweight residuals.
    Lambda,
    /// Successor chain, exchange pieces, and the weight cocycle.
    Det,
    /// Distance table and the weighted criterion series.
    Equi,
    /// Every stage in order, reusing cached artifacts.
    All,
}

fn build_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            RunConfig::load(&text).map_err(CliError::Config)?
        }
        None => RunConfig::default(),
    };
    if let Some(poly) = &cli.poly {
        let coeffs: Result<Vec<i64>, _> = poly
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(str::parse)
            .collect();
        cfg.poly = coeffs.map_err(|e| CliError::Config(format!("bad --poly: {e}")))?;
    }
    if cli.free_override.is_some() {
        cfg.free_override = cli.free_override;
    }
    if let Some(b) = cli.b {
        cfg.b = b;
    }
    if let Some(k) = cli.k {
        cfg.k = k;
    }
    if let Some(e) = cli.eps_r {
        cfg.eps_r = e;
    }
    if let Some(d) = cli.delta {
        cfg.delta = d;
    }
    if let Some(n) = cli.n_stab {
        cfg.n_stab = n;
    }
    if let Some(n) = cli.n_max {
        cfg.n_max = n;
    }
    if let Some(m) = cli.mode {
        cfg.mode = m;
    }
    if let Some(c) = cli.atom_cap {
        cfg.atom_cap = c;
    }
    if let Some(c) = cli.window_cap {
        cfg.window_cap = c;
    }
    if let Some(out) = &cli.out {
        cfg.out = out.clone();
    }
    if let Some(j) = cli.jobs {
        cfg.jobs = j;
    }
    cfg.validate().map_err(CliError::Config)?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = build_config(cli)?;
    if cfg.jobs > 0 {
        // Caps rayon's worker count for this process. Harmless when the
        // core was built without the parallel feature.
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.jobs)
            .build_global()
            .map_err(|e| CliError::Config(format!("--jobs: {e}")))?;
    }
    let mut pipeline = Pipeline::new(cfg)?;
    match cli.cmd {
        Cmd::Analyze => pipeline.analyze(),
        Cmd::Count => pipeline.count(),
        Cmd::Lattice => pipeline.lattice(),
        Cmd::Fractal => pipeline.fractal_stage(),
        Cmd::Lambda => pipeline.lambda_stage(),
        Cmd::Det => pipeline.det(),
        Cmd::Equi => pipeline.equi(),
        Cmd::All => pipeline.all(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
