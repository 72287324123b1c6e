//! `persets`: sampling campaigns, oracle checks, diagram-set comparisons and
//! graph Betti recovery from the command line.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;

#[derive(Parser, Debug)]
#[command(name = "persets", version, about = "Principal Vietoris-Rips persistence sets of metric spaces")]
struct Cli {
    /// Worker threads for sampling (0 = all cores).
    #[arg(long, global = true, env = "PERSETS_WORKERS", default_value_t = 0)]
    workers: usize,

    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample a persistence set and write CSV, JSON sidecar and SVG.
    Sample(SampleArgs),
    /// Check sampled points against an analytic region.
    #[command(alias = "oracle")]
    OracleCheck(OracleCheckArgs),
    /// Hausdorff-bottleneck distance between two diagram sets and the
    /// resulting Gromov-Hausdorff lower bound.
    Compare(CompareArgs),
    /// Count the cycles of a metric graph from the corners of its
    /// principal persistence set.
    GraphBetti(GraphBettiArgs),
    /// L¹ error of the sampled circle measure against its closed-form density.
    DensityCheck(DensityCheckArgs),
    /// Check the pseudo-metric axioms of a distance matrix file (CSV or JSON).
    Validate(ValidateArgs),
}

#[derive(Args, Debug)]
struct SampleArgs {
    /// Model space descriptor, e.g. `s1`, `s2`, `s1-e`, `mk:kappa=-1,r=3.14`.
    #[arg(long, group = "source")]
    space: Option<String>,
    /// Metric graph: JSON file or family descriptor such as `wedge:3.2,4`.
    #[arg(long, group = "source")]
    graph: Option<String>,
    /// Distance matrix file (CSV or JSON), sampled with uniform weights.
    #[arg(long, group = "source")]
    matrix: Option<PathBuf>,
    /// Tuple size.
    #[arg(long, default_value_t = 4)]
    n: usize,
    /// Homology degree.
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Number of tuples to draw.
    #[arg(long, default_value_t = persets::sampling::DEFAULT_TUPLES)]
    tuples: u64,
    /// Draw tuples without repeated points.
    #[arg(long)]
    distinct: bool,
    /// Allow n != 2k+2 through the boundary-matrix reduction (n <= 12).
    #[arg(long)]
    oracle_fallback: bool,
    /// Output prefix: writes PREFIX.csv, PREFIX.json and PREFIX.svg.
    #[arg(long, default_value = "sample")]
    out: PathBuf,
    /// Also write a BINS×BINS histogram (PREFIX.hist.csv, PREFIX.hist.json,
    /// PREFIX.heatmap.svg).
    #[arg(long)]
    bins: Option<usize>,
    /// Skip the SVG scatter plot.
    #[arg(long)]
    no_svg: bool,
}

#[derive(Args, Debug)]
struct OracleCheckArgs {
    /// Region descriptor, e.g. `s1`, `circle:k=2,lambda=3.14`, `s2`, `s1-e`.
    #[arg(long)]
    region: String,
    /// Sample CSV with header `t_b,t_d`.
    #[arg(long)]
    check: PathBuf,
    /// Additive membership tolerance.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Write the per-point CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CompareArgs {
    /// First sample CSV; a sidecar `.json` next to it is read when present.
    #[arg(long, requires = "b", conflicts_with_all = ["region_a", "region_b"])]
    a: Option<PathBuf>,
    /// Second sample CSV.
    #[arg(long, requires = "a")]
    b: Option<PathBuf>,
    /// First analytic region descriptor.
    #[arg(long, requires = "region_b")]
    region_a: Option<String>,
    /// Second analytic region descriptor.
    #[arg(long, requires = "region_a")]
    region_b: Option<String>,
    /// Boundary resolution of analytic regions.
    #[arg(long, default_value_t = 1e-2)]
    step: f64,
    /// Interior grid resolution of analytic regions (default: 20 × step).
    #[arg(long)]
    interior_step: Option<f64>,
}

#[derive(Args, Debug)]
struct GraphBettiArgs {
    /// Metric graph: JSON file or family descriptor.
    #[arg(long)]
    graph: String,
    /// Number of 4-tuples to draw.
    #[arg(long, default_value_t = 100_000)]
    tuples: u64,
    /// Relative width used to merge corners.
    #[arg(long, default_value_t = persets::split::DEFAULT_REL_TOL)]
    rel_tol: f64,
    /// Minimum number of supporting points per corner.
    #[arg(long, default_value_t = persets::split::DEFAULT_MIN_SUPPORT)]
    min_support: usize,
}

#[derive(Args, Debug)]
struct DensityCheckArgs {
    /// Number of 4-tuples on the geodesic unit circle.
    #[arg(long, default_value_t = persets::sampling::DEFAULT_TUPLES)]
    tuples: u64,
    /// Bins per axis on [0, π]².
    #[arg(long, default_value_t = 50)]
    bins: usize,
    /// Exit with status 1 when the L¹ error exceeds this value.
    #[arg(long)]
    max_error: Option<f64>,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    /// Matrix file: CSV rows or a JSON array of rows.
    file: PathBuf,
}

/// Failure kinds mapped to exit codes.
pub enum Failure {
    /// The input was read but failed a check.
    Invalid(String),
    /// Bad flags, descriptors or unreadable files.
    Usage(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(e.into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = commands::Global { workers: cli.workers, seed: cli.seed };
    let res = match cli.command {
        Command::Sample(a) => commands::sample(&g, a),
        Command::OracleCheck(a) => commands::oracle_check(a),
        Command::Compare(a) => commands::compare(a),
        Command::GraphBetti(a) => commands::graph_betti(&g, a),
        Command::DensityCheck(a) => commands::density_check(&g, a),
        Command::Validate(a) => commands::validate(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
