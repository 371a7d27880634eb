//! Command-line front end: tableau dumps, stability polynomials, region
//! scans, comparisons, convergence studies and spectrum-driven step sizes.

pub mod commands;
pub mod error;
pub mod format;
pub mod spectrum;

use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

pub use error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "pcrk",
    version,
    about = "Block predictor-corrector Runge-Kutta stability toolkit"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print a corrector tableau, optionally composed with m corrections.
    Tableau(TableauArgs),
    /// Stability polynomial coefficients and the Taylor-truncation check.
    Stability(StabilityArgs),
    /// Scan the stability region of a scheme.
    Region(RegionArgs),
    /// Compare several `method:m` schemes (boundaries plus summary table).
    Compare(CompareArgs),
    /// Empirical convergence order on a test problem.
    OrderTest(OrderTestArgs),
    /// Largest stable step for a given eigenvalue spectrum.
    Maxstep(MaxstepArgs),
}

#[derive(Debug, Args)]
pub struct TableauArgs {
    /// Built-in method name or path to a JSON tableau file.
    pub method: String,
    /// Also print the composed tableau with this many corrections.
    #[arg(long, value_name = "M")]
    pub compose: Option<usize>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("count").required(true).args(["m", "m_max"])))]
pub struct StabilityArgs {
    pub method: String,
    /// Number of corrections.
    #[arg(long)]
    pub m: Option<usize>,
    /// Verify the Taylor-truncation property for every m up to this value.
    #[arg(long, value_name = "M")]
    pub m_max: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct WindowArgs {
    #[arg(long, default_value_t = -6.0, allow_hyphen_values = true)]
    pub re_min: f64,
    #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
    pub re_max: f64,
    #[arg(long, default_value_t = -4.0, allow_hyphen_values = true)]
    pub im_min: f64,
    #[arg(long, default_value_t = 4.0, allow_hyphen_values = true)]
    pub im_max: f64,
    /// Nodes along the real axis.
    #[arg(long, default_value_t = 801)]
    pub nx: usize,
    /// Nodes along the imaginary axis.
    #[arg(long, default_value_t = 801)]
    pub ny: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Svg,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Axis {
    Real,
    Imag,
}

#[derive(Debug, Args)]
pub struct RegionArgs {
    pub method: String,
    #[arg(long)]
    pub m: usize,
    #[command(flatten)]
    pub window: WindowArgs,
    /// Output file; `.csv` writes the node grid, `.svg` the boundary.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format, inferred from `--out` when omitted.
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// Write the boundary polylines as CSV to this file.
    #[arg(long)]
    pub boundary: Option<PathBuf>,
    /// Print only the stable interval length along an axis.
    #[arg(long, value_enum)]
    pub axis: Option<Axis>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Schemes as `method:m`.
    #[arg(required = true)]
    pub schemes: Vec<String>,
    /// Prefix of the per-scheme boundary files.
    #[arg(long, default_value = "compare")]
    pub out: String,
    /// Also write one SVG per scheme.
    #[arg(long)]
    pub svg: bool,
    #[command(flatten)]
    pub window: WindowArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Problem {
    /// y' = -y², y(0) = 1 on [0, 1].
    Riccati,
    /// y' = -y, y(0) = 1 on [0, 1].
    Linear,
}

#[derive(Debug, Args)]
pub struct OrderTestArgs {
    pub method: String,
    #[arg(long)]
    pub m: usize,
    #[arg(long, value_enum, default_value_t = Problem::Riccati)]
    pub problem: Problem,
    /// Coarsest step size.
    #[arg(long, default_value_t = 0.1)]
    pub h0: f64,
    /// Number of halvings, including the coarsest level.
    #[arg(long, default_value_t = 4)]
    pub levels: usize,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["spectrum", "upwind"])))]
pub struct MaxstepArgs {
    pub method: String,
    #[arg(long)]
    pub m: usize,
    /// File with one eigenvalue per line as `re im`.
    #[arg(long)]
    pub spectrum: Option<PathBuf>,
    /// Use the first-order upwind advection spectrum with N points.
    #[arg(long, value_name = "N")]
    pub upwind: Option<usize>,
}

/// Runs a parsed command, writing human-readable output to `out`.
pub fn run(cli: Cli, out: &mut dyn std::io::Write) -> Result<(), CliError> {
    match cli.command {
        Command::Tableau(args) => commands::tableau(&args, out),
        Command::Stability(args) => commands::stability(&args, out),
        Command::Region(args) => commands::region(&args, out),
        Command::Compare(args) => commands::compare(&args, out).map(|_| ()),
        Command::OrderTest(args) => commands::order_test(&args, out),
        Command::Maxstep(args) => commands::maxstep(&args, out),
    }
}
