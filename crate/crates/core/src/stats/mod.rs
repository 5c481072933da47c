//! Self-contained statistical kernels: ordinary least squares with
//! inference, Kendall rank correlation, and the special functions behind
//! Student-t p-values.

mod kendall;
mod ols;
mod special;

pub use kendall::kendall_tau;
pub use ols::{fit_ols, subset_r_squared, Coefficient, RegressionFit, RegressionSpec};
pub use special::{ln_gamma, regularized_incomplete_beta, t_pvalue};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("insufficient rows: need at least {needed}, got {got}")]
    InsufficientRows { needed: usize, got: usize },
    #[error("singular design: column `{column}` is constant or collinear")]
    SingularDesign { column: String },
    #[error("degenerate response: zero variance, no R^2 is defined")]
    DegenerateResponse,
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("degenerate sample: all-tied values leave the correlation undefined")]
    DegenerateSample,
    #[error("domain error: {message}")]
    DomainError { message: String },
    #[error("too many predictors: {count} exceeds the supported maximum {max}")]
    TooManyPredictors { count: usize, max: usize },
    #[error("{what} failed to converge")]
    ConvergenceFailure { what: &'static str },
}

/// R^2 penalized for model size: 1 - (1 - R^2)(n - 1)/(n - k - 1).
pub fn adjusted_r2(r2: f64, n: usize, k: usize) -> Result<f64, StatsError> {
    if n <= k + 1 {
        return Err(StatsError::InsufficientRows {
            needed: k + 2,
            got: n,
        });
    }
    if !(0.0..=1.0).contains(&r2) {
        return Err(StatsError::DomainError {
            message: format!("r2 must lie in [0, 1], got {r2}"),
        });
    }
    Ok(1.0 - (1.0 - r2) * (n as f64 - 1.0) / (n as f64 - k as f64 - 1.0))
}

/// Conventional significance stars at the p < 0.001 / 0.01 / 0.05 cuts
/// (strict inequalities).
pub fn significance_stars(p: f64) -> &'static str {
    if p < 0.001 {
        "***"
    } else if p < 0.01 {
        "**"
    } else if p < 0.05 {
        "*"
    } else {
        ""
    }
}
