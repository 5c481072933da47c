//! Models institutional research output as a production function of HPC
//! capital (TeraFLOPS) and labor (RCD salaries), and inverts the observed
//! relationships into benchmarking formulas that size a research-computing
//! center's capacity, salary spend, and total budget from institutional
//! outputs.
//!
//! Modules:
//! - [`dataset`]: panel/survey data model, CSV ingestion, normalization.
//! - [`stats`]: OLS with inference, Kendall tau-b, Student-t p-values.
//! - [`relimp`]: lmg relative-importance decomposition of R^2.
//! - [`model`]: correlation screens, production-function suites,
//!   real-world coefficient translation.
//! - [`benchmark`]: investment-per-output coefficients and inverted sizing.
//! - [`projection`]: capacity growth estimation and compound projection.

pub mod benchmark;
pub mod dataset;
pub mod model;
pub mod projection;
pub mod relimp;
pub mod stats;
