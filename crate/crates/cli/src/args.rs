use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub const DEFAULT_TOL: f64 = 1e-10;
/// Default for `verify --check parts`, whose Riemann-Stieltjes sums converge
/// only linearly in the cell count.
pub const DEFAULT_PARTS_TOL: f64 = 1e-6;

#[derive(Debug, Parser)]
#[command(name = "bvsum", version, about = "Certified Euler-Maclaurin summation for BV functions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pointwise variation, |mu_f| and the rho sum on an interval.
    Variation(VariationArgs),
    /// sum_{a <= k < b} f(k) with a certified remainder.
    Sum(SumArgs),
    /// Certified sum of the series sum_{k >= 0} f(k).
    Series(SeriesArgs),
    /// Certified Euler constant of f.
    Gamma(SeriesArgs),
    /// Whether the series and the integral converge.
    Convergence(ConvergenceArgs),
    /// Numerical check of a summation or measure identity.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct Output {
    /// Emit machine-readable JSON.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct VariationArgs {
    pub spec: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    pub lo: f64,
    /// Upper end; `inf` on a half-line.
    #[arg(long, allow_hyphen_values = true)]
    pub hi: f64,
    #[arg(long)]
    pub open_lo: bool,
    #[arg(long)]
    pub open_hi: bool,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct SumArgs {
    pub spec: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    pub a: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub b: f64,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct SeriesArgs {
    pub spec: PathBuf,
    /// Cut-off index; repeat for a convergence study.
    #[arg(long, required = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub n: Vec<f64>,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// Emit CSV rows (n, estimate, radius, oracle, error).
    #[arg(long, conflicts_with = "json")]
    pub csv: bool,
    /// Reference value for the CSV error column.
    #[arg(long, allow_hyphen_values = true)]
    pub oracle: Option<f64>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct ConvergenceArgs {
    pub spec: PathBuf,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Check {
    Midvalue,
    Parts,
    Pvv,
}

impl Check {
    pub fn name(self) -> &'static str {
        match self {
            Check::Midvalue => "midvalue",
            Check::Parts => "parts",
            Check::Pvv => "pvv",
        }
    }
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Spec file `f`; omitted with `--batch`.
    #[arg(required_unless_present = "batch")]
    pub spec: Option<PathBuf>,
    /// Second spec file `g` for `--check parts`.
    pub spec2: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    pub a: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub b: f64,
    /// Defaults to 1e-10, or 1e-6 for `parts`.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, value_enum)]
    pub check: Check,
    /// Check every `*.json` file in a directory.
    #[arg(long, conflicts_with = "spec")]
    pub batch: Option<PathBuf>,
    #[command(flatten)]
    pub output: Output,
}
