//! `heatcut`: generate graphs, partition them, and run the exponential and
//! polynomial-approximation kernels from the command line. Results are JSON
//! with every float at 17 significant digits.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "heatcut", version, about = "Balanced graph partitioning with heat-kernel walk embeddings")]
pub struct Cli {
    /// Worker threads; 0 lets the runtime decide.
    #[arg(long, global = true, env = "HEATCUT_THREADS", default_value_t = 0)]
    pub threads: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write a generated graph as an edge list.
    Gen(GenArgs),
    /// Search for a balanced sparse cut.
    Partition(PartitionArgs),
    /// Apply exp(-tau A) to a vector for a graph operator A.
    Expmv(ExpmvArgs),
    /// Measure the polynomial degree needed to approximate e^{-x} on [a, b].
    Polyfit(PolyfitArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum GraphKind {
    Clique,
    Path,
    Regular,
    Planted,
    Dumbbell,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long = "type", value_enum)]
    pub kind: GraphKind,
    /// Vertex count (clique, path, regular, planted).
    #[arg(long)]
    pub n: Option<usize>,
    /// Degree (regular, planted).
    #[arg(long, default_value_t = 3)]
    pub d: usize,
    /// Edges across the planted bisection.
    #[arg(long, default_value_t = 4)]
    pub cross: usize,
    /// Dumbbell: left clique size.
    #[arg(long)]
    pub left: Option<usize>,
    /// Dumbbell: right clique size.
    #[arg(long)]
    pub right: Option<usize>,
    /// Dumbbell: edges on the path joining the cliques.
    #[arg(long, default_value_t = 1)]
    pub bridge: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(short = 'o', long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PartitionArgs {
    /// Edge list to read.
    #[arg(short = 'i', long)]
    pub input: PathBuf,
    /// Balance target in (0, 1/2].
    #[arg(short = 'b', long = "balance")]
    pub b: f64,
    /// Target conductance in [1/n^2, 1).
    #[arg(long)]
    pub gamma: f64,
    /// key = value file with alpha_factor, c_factor, c_jl, backend, seed, directions, k_jl.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// rational, lanczos or dense.
    #[arg(long)]
    pub backend: Option<String>,
    #[arg(long)]
    pub alpha_factor: Option<f64>,
    #[arg(long)]
    pub c_factor: Option<f64>,
    #[arg(long)]
    pub c_jl: Option<f64>,
    #[arg(long)]
    pub directions: Option<usize>,
    #[arg(long)]
    pub k_jl: Option<usize>,
    /// Include per-iteration wall-clock seconds (makes output run-dependent).
    #[arg(long)]
    pub timing: bool,
    /// Exit with status 2 unless a balanced cut is found.
    #[arg(long)]
    pub require_cut: bool,
    #[arg(short = 'o', long)]
    pub output: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Operator {
    /// Normalized walk generator restricted to the complement of the stationary direction.
    Normalized,
    /// Combinatorial Laplacian L = D - A.
    Laplacian,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ExpmvBackend {
    Rational,
    Lanczos,
    Taylor,
    Dense,
}

#[derive(Args, Debug)]
pub struct ExpmvArgs {
    #[arg(short = 'i', long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = Operator::Normalized)]
    pub operator: Operator,
    #[arg(long, default_value_t = 1.0)]
    pub tau: f64,
    /// Target accuracy in (0, 1].
    #[arg(long, default_value_t = 1e-8)]
    pub delta: f64,
    #[arg(long, value_enum, default_value_t = ExpmvBackend::Rational)]
    pub backend: ExpmvBackend,
    /// File of whitespace-separated entries; a seeded random unit vector otherwise.
    #[arg(long)]
    pub vector: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also report the distance to a dense eigendecomposition result.
    #[arg(long)]
    pub check: bool,
    #[arg(short = 'o', long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PolyfitArgs {
    #[arg(long)]
    pub a: f64,
    #[arg(long)]
    pub b: f64,
    /// Relative accuracy in (0, 1).
    #[arg(long)]
    pub delta: f64,
    /// Largest degree the search may try.
    #[arg(long, default_value_t = heatcut::polyapprox::DEFAULT_DEGREE_CAP)]
    pub cap: usize,
    #[arg(short = 'o', long)]
    pub output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
        eprintln!("error: thread pool: {e}");
        return ExitCode::from(1);
    }
    match commands::run(&cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
