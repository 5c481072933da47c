//! Command-line surface.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cibench_core::benchmark::Basis;

use crate::report::Format;

#[derive(Debug, Parser)]
#[command(
    name = "cibench",
    version,
    about = "Production-function analytics and investment benchmarking for research computing"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BasisArg {
    /// Annual R&D expenditures ($M)
    Herd,
    /// Earned doctorates
    Phd,
    /// Scopus publications
    Pub,
}

impl From<BasisArg> for Basis {
    fn from(arg: BasisArg) -> Basis {
        match arg {
            BasisArg::Herd => Basis::Herd,
            BasisArg::Phd => Basis::Doctorates,
            BasisArg::Pub => Basis::Publications,
        }
    }
}

/// Rendering and destination flags shared by every command.
#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Markdown)]
    pub format: Format,
    /// Write output to this file (atomically) instead of stdout
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Ingestion flags shared by panel/survey readers.
#[derive(Debug, Clone, Args)]
pub struct IngestArgs {
    /// Abort on the first invalid row instead of dropping it with a warning
    #[arg(long)]
    pub strict: bool,
}

/// Source of benchmark coefficients: a named preset or a coefficient file.
#[derive(Debug, Clone, Args)]
pub struct CoeffSource {
    /// Named coefficient preset (e.g. paper-2025)
    #[arg(long, conflicts_with = "coeff_file")]
    pub preset: Option<String>,
    /// Key-value coefficient file written by benchmark-fit
    #[arg(long)]
    pub coeff_file: Option<PathBuf>,
    /// Override the salary share of total budget
    #[arg(long)]
    pub budget_fraction: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load and validate a panel CSV, reporting row counts and warnings
    Validate {
        /// Panel CSV
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        ingest: IngestArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Kendall correlation of each input against each output, per institution
    Correlate {
        /// Panel CSV
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        ingest: IngestArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Fit the four production-function models for a scope
    Fit {
        /// Panel CSV
        #[arg(long)]
        input: PathBuf,
        /// `combined` or an institution label
        #[arg(long, default_value = "combined")]
        scope: String,
        #[command(flatten)]
        ingest: IngestArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Relative importance (lmg) of TF and salaries for a scope
    Relimp {
        /// Panel CSV
        #[arg(long)]
        input: PathBuf,
        /// `combined` or an institution label
        #[arg(long, default_value = "combined")]
        scope: String,
        #[command(flatten)]
        ingest: IngestArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Estimate benchmark coefficients from a survey CSV
    BenchmarkFit {
        /// Survey CSV
        #[arg(long)]
        input: PathBuf,
        /// Sidecar device inventory CSV
        #[arg(long)]
        inventory: Option<PathBuf>,
        /// Output the model bases on
        #[arg(long, value_enum, default_value_t = BasisArg::Herd)]
        basis: BasisArg,
        /// USD per FTE when salaries must be derived from headcount
        #[arg(long, default_value_t = 90_000.0)]
        median_comp: f64,
        /// Salary share of total budget carried into the coefficients
        #[arg(long, default_value_t = 0.34)]
        budget_fraction: f64,
        /// Also write the fitted coefficients as a key-value file
        #[arg(long)]
        coeff_file: Option<PathBuf>,
        #[command(flatten)]
        ingest: IngestArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Size capacity, salaries, and budget for a target output level
    BenchmarkSize {
        /// Output the model bases on
        #[arg(long, value_enum, default_value_t = BasisArg::Herd)]
        basis: BasisArg,
        /// Target output level (in basis units)
        #[arg(long)]
        value: f64,
        #[command(flatten)]
        coeffs: CoeffSource,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Compare each surveyed institution's actuals against the model
    Position {
        /// Survey CSV
        #[arg(long)]
        input: PathBuf,
        /// Sidecar device inventory CSV
        #[arg(long)]
        inventory: Option<PathBuf>,
        /// Output the model bases on
        #[arg(long, value_enum, default_value_t = BasisArg::Herd)]
        basis: BasisArg,
        /// USD per FTE when salaries must be derived from headcount
        #[arg(long, default_value_t = 90_000.0)]
        median_comp: f64,
        #[command(flatten)]
        coeffs: CoeffSource,
        #[command(flatten)]
        ingest: IngestArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Project future capacity at a compound annual growth rate
    Project {
        /// Panel CSV used to estimate the growth rate when --rate is absent
        #[arg(long)]
        input: Option<PathBuf>,
        /// Annual growth rate as a fraction (e.g. 0.41)
        #[arg(long)]
        rate: Option<f64>,
        /// First projected year
        #[arg(long, default_value_t = 2025)]
        base_year: i32,
        /// Years beyond the base year
        #[arg(long, default_value_t = 5)]
        horizon: u32,
        /// Output the base capacity is modeled from (with --preset or
        /// --coeff-file); without coefficients --value is TeraFLOPS directly
        #[arg(long, value_enum, default_value_t = BasisArg::Herd)]
        basis: BasisArg,
        /// Output level (or base TeraFLOPS); repeatable for scenarios
        #[arg(long, required = true)]
        value: Vec<f64>,
        #[command(flatten)]
        coeffs: CoeffSource,
        #[command(flatten)]
        ingest: IngestArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Full analysis: validation, correlations, all suites, growth trend
    Report {
        /// Panel CSV
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        ingest: IngestArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::Correlate { .. } => "correlate",
            Command::Fit { .. } => "fit",
            Command::Relimp { .. } => "relimp",
            Command::BenchmarkFit { .. } => "benchmark-fit",
            Command::BenchmarkSize { .. } => "benchmark-size",
            Command::Position { .. } => "position",
            Command::Project { .. } => "project",
            Command::Report { .. } => "report",
        }
    }
}
