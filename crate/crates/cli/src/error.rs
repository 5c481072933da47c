//! Error surface of the command-line tool: every failure maps to a stable
//! machine-readable kind and one of the documented exit codes
//! (2 validation, 3 statistical degeneracy, 4 I/O).

use cibench_core::benchmark::BenchmarkError;
use cibench_core::dataset::DatasetError;
use cibench_core::model::ModelError;
use cibench_core::projection::ProjectionError;
use cibench_core::stats::StatsError;
use thiserror::Error;

pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_DEGENERACY: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Benchmark(#[from] BenchmarkError),
    #[error(transparent)]
    Projection(#[from] ProjectionError),
    #[error("{0}")]
    Usage(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Dataset(DatasetError::Io(_)) => EXIT_IO,
            CliError::Dataset(_) => EXIT_VALIDATION,
            CliError::Stats(_) => EXIT_DEGENERACY,
            CliError::Model(ModelError::UnknownScope(_)) => EXIT_VALIDATION,
            CliError::Model(_) => EXIT_DEGENERACY,
            CliError::Benchmark(BenchmarkError::InsufficientRows { .. }) => EXIT_DEGENERACY,
            CliError::Benchmark(_) => EXIT_VALIDATION,
            CliError::Projection(_) => EXIT_DEGENERACY,
            CliError::Usage(_) => EXIT_VALIDATION,
            CliError::Io(_) => EXIT_IO,
        }
    }

    /// Stable identifier for the machine-readable error record.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Dataset(e) => match e {
                DatasetError::MalformedCsv { .. } => "MalformedCsv",
                DatasetError::SchemaViolation { .. } => "SchemaViolation",
                DatasetError::DuplicateKey { .. } => "DuplicateKey",
                DatasetError::EmptyDataset => "EmptyDataset",
                DatasetError::InvalidValue { .. } => "InvalidValue",
                DatasetError::InsufficientData { .. } => "InsufficientData",
                DatasetError::InvalidConfig(_) => "InvalidConfig",
                DatasetError::Io(_) => "Io",
            },
            CliError::Stats(e) => match e {
                StatsError::InsufficientRows { .. } => "InsufficientRows",
                StatsError::SingularDesign { .. } => "SingularDesign",
                StatsError::DegenerateResponse => "DegenerateResponse",
                StatsError::LengthMismatch { .. } => "LengthMismatch",
                StatsError::DegenerateSample => "DegenerateSample",
                StatsError::DomainError { .. } => "DomainError",
                StatsError::TooManyPredictors { .. } => "TooManyPredictors",
                StatsError::ConvergenceFailure { .. } => "ConvergenceFailure",
            },
            CliError::Model(e) => match e {
                ModelError::UnknownScope(_) => "UnknownScope",
                ModelError::InsufficientRows { .. } => "InsufficientRows",
                ModelError::Stats(_) => "StatsError",
            },
            CliError::Benchmark(e) => match e {
                BenchmarkError::ZeroBasis { .. } => "ZeroBasis",
                BenchmarkError::InsufficientRows { .. } => "InsufficientRows",
                BenchmarkError::BasisMismatch(_) => "BasisMismatch",
                BenchmarkError::InvalidPreset(_) => "InvalidPreset",
                BenchmarkError::InvalidCoefficients(_) => "InvalidCoefficients",
            },
            CliError::Projection(_) => "InsufficientRows",
            CliError::Usage(_) => "Usage",
            CliError::Io(_) => "Io",
        }
    }
}
