//! Investment benchmarking: averaged investment-per-output coefficients
//! estimated from survey data, and the inverted sizing model that turns a
//! target output level into capacity, salary spend, and total budget.

use std::fmt;

use thiserror::Error;

use crate::dataset::{ObservationRow, OutputKind};

#[derive(Debug, Error)]
pub enum BenchmarkError {
    #[error("`{institution}` {year}: non-positive {basis} basis value")]
    ZeroBasis {
        institution: String,
        year: i32,
        basis: &'static str,
    },
    #[error("insufficient rows: need at least {needed} usable, got {got}")]
    InsufficientRows { needed: usize, got: usize },
    #[error("no row carries the `{0}` basis; survey and coefficients disagree")]
    BasisMismatch(&'static str),
    #[error("invalid coefficient file: {0}")]
    InvalidPreset(String),
    #[error("invalid coefficients: {0}")]
    InvalidCoefficients(String),
}

/// The institutional output a benchmark model is keyed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    Herd,
    Doctorates,
    Publications,
}

impl Basis {
    pub const ALL: [Basis; 3] = [Basis::Herd, Basis::Doctorates, Basis::Publications];

    /// CLI/preset-file token.
    pub fn flag(self) -> &'static str {
        match self {
            Basis::Herd => "herd",
            Basis::Doctorates => "phd",
            Basis::Publications => "pub",
        }
    }

    pub fn parse(token: &str) -> Option<Basis> {
        match token.to_ascii_lowercase().as_str() {
            "herd" => Some(Basis::Herd),
            "phd" | "doctorates" => Some(Basis::Doctorates),
            "pub" | "publications" => Some(Basis::Publications),
            _ => None,
        }
    }

    pub fn output_kind(self) -> OutputKind {
        match self {
            Basis::Herd => OutputKind::Herd,
            Basis::Doctorates => OutputKind::Doctorates,
            Basis::Publications => OutputKind::Publications,
        }
    }

    /// One unit of the basis, for display.
    pub fn unit_label(self) -> &'static str {
        match self {
            Basis::Herd => "$1M R&D expenditures",
            Basis::Doctorates => "earned doctorate",
            Basis::Publications => "publication",
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.flag())
    }
}

/// Averaged investment-to-output ratios.
///
/// `tf_per_unit` is TeraFLOPS per basis unit; `salary_per_unit` is dollars
/// of annual salary spend per basis unit (for the HERD basis one unit is
/// $1M of expenditures, so the value is conventionally quoted as a
/// percentage: dollars-per-$M / 1e6).
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkCoefficients {
    pub basis: Basis,
    pub tf_per_unit: f64,
    pub salary_per_unit: f64,
    pub salary_budget_fraction: f64,
    pub n_institutions: usize,
}

/// Default Gartner-style share of a center budget that is salaries.
pub const DEFAULT_SALARY_BUDGET_FRACTION: f64 = 0.34;

impl BenchmarkCoefficients {
    pub fn validate(&self) -> Result<(), BenchmarkError> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.tf_per_unit) {
            return Err(BenchmarkError::InvalidCoefficients(format!(
                "tf_per_unit must be positive, got {}",
                self.tf_per_unit
            )));
        }
        if !positive(self.salary_per_unit) {
            return Err(BenchmarkError::InvalidCoefficients(format!(
                "salary_per_unit must be positive, got {}",
                self.salary_per_unit
            )));
        }
        if !(positive(self.salary_budget_fraction) && self.salary_budget_fraction <= 1.0) {
            return Err(BenchmarkError::InvalidCoefficients(format!(
                "salary_budget_fraction must lie in (0, 1], got {}",
                self.salary_budget_fraction
            )));
        }
        Ok(())
    }

    /// Published 2025 survey coefficients (28 R1 respondents).
    ///
    /// The salary coefficients carry the precision implied by the published
    /// sizing tables (0.2944% of HERD, $4,696/PhD, $341/publication) rather
    /// than the coarser prose roundings, so table reproduction stays within
    /// rounding distance.
    pub fn paper_2025(basis: Basis) -> BenchmarkCoefficients {
        let (tf_per_unit, salary_per_unit) = match basis {
            Basis::Herd => (11.47, 2944.0),
            Basis::Doctorates => (19.65, 4696.0),
            Basis::Publications => (1.34, 341.0),
        };
        BenchmarkCoefficients {
            basis,
            tf_per_unit,
            salary_per_unit,
            salary_budget_fraction: DEFAULT_SALARY_BUDGET_FRACTION,
            n_institutions: 28,
        }
    }

    /// Looks up a named preset; currently `paper-2025`.
    pub fn preset(name: &str, basis: Basis) -> Option<BenchmarkCoefficients> {
        match name {
            "paper-2025" => Some(Self::paper_2025(basis)),
            _ => None,
        }
    }

    /// Serializes to the key-value coefficient file format.
    pub fn to_key_values(&self) -> String {
        format!(
            "basis = {}\ntf_per_unit = {}\nsalary_per_unit = {}\nsalary_budget_fraction = {}\nn_institutions = {}\n",
            self.basis.flag(),
            self.tf_per_unit,
            self.salary_per_unit,
            self.salary_budget_fraction,
            self.n_institutions
        )
    }

    /// Parses the key-value coefficient file format: one `key = value` per
    /// line, `#` comments allowed.
    pub fn parse_key_values(text: &str) -> Result<BenchmarkCoefficients, BenchmarkError> {
        let mut basis = None;
        let mut tf_per_unit = None;
        let mut salary_per_unit = None;
        let mut salary_budget_fraction = DEFAULT_SALARY_BUDGET_FRACTION;
        let mut n_institutions = 0usize;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                BenchmarkError::InvalidPreset(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            let parse_num = |what: &str| {
                value.parse::<f64>().map_err(|_| {
                    BenchmarkError::InvalidPreset(format!("line {}: bad {what} `{value}`", lineno + 1))
                })
            };
            match key {
                "basis" => {
                    basis = Some(Basis::parse(value).ok_or_else(|| {
                        BenchmarkError::InvalidPreset(format!(
                            "line {}: unknown basis `{value}`",
                            lineno + 1
                        ))
                    })?)
                }
                "tf_per_unit" => tf_per_unit = Some(parse_num("tf_per_unit")?),
                "salary_per_unit" => salary_per_unit = Some(parse_num("salary_per_unit")?),
                "salary_budget_fraction" => salary_budget_fraction = parse_num("salary_budget_fraction")?,
                "n_institutions" => {
                    n_institutions = value.parse::<usize>().map_err(|_| {
                        BenchmarkError::InvalidPreset(format!(
                            "line {}: bad n_institutions `{value}`",
                            lineno + 1
                        ))
                    })?
                }
                other => {
                    return Err(BenchmarkError::InvalidPreset(format!(
                        "line {}: unknown key `{other}`",
                        lineno + 1
                    )))
                }
            }
        }
        let coeffs = BenchmarkCoefficients {
            basis: basis.ok_or_else(|| BenchmarkError::InvalidPreset("missing `basis`".into()))?,
            tf_per_unit: tf_per_unit
                .ok_or_else(|| BenchmarkError::InvalidPreset("missing `tf_per_unit`".into()))?,
            salary_per_unit: salary_per_unit
                .ok_or_else(|| BenchmarkError::InvalidPreset("missing `salary_per_unit`".into()))?,
            salary_budget_fraction,
            n_institutions,
        };
        coeffs.validate()?;
        Ok(coeffs)
    }
}

/// Modeled investment for one output level.
#[derive(Debug, Clone, PartialEq)]
pub struct SizingResult {
    pub basis: Basis,
    pub basis_value: f64,
    pub modeled_tf: f64,
    /// $M per year.
    pub modeled_salaries: f64,
    /// $M per year: salaries expanded by the budget fraction.
    pub modeled_budget: f64,
}

/// Actual-versus-modeled comparison for one institution.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionEntry {
    pub institution: String,
    pub year: i32,
    pub basis_value: Option<f64>,
    pub actual_tf: Option<f64>,
    pub predicted_tf: Option<f64>,
    pub tf_ratio: Option<f64>,
    pub actual_salaries: Option<f64>,
    pub predicted_salaries: Option<f64>,
    pub salary_ratio: Option<f64>,
}

/// Per-institution positioning against a benchmark model. Rows whose basis
/// value is missing or zero are flagged (fields absent), never divided.
#[derive(Debug, Clone)]
pub struct PositioningReport {
    pub basis: Basis,
    pub entries: Vec<PositionEntry>,
}

/// Averages per-institution investment-to-output ratios into benchmark
/// coefficients (unweighted arithmetic mean of ratios, not ratio of sums).
///
/// Rows missing either input are skipped; a present basis value of zero is
/// a `ZeroBasis` error rather than a silent division.
pub fn estimate_coefficients(
    rows: &[ObservationRow],
    basis: Basis,
    salary_budget_fraction: f64,
) -> Result<BenchmarkCoefficients, BenchmarkError> {
    let output = basis.output_kind();
    let mut tf_ratios = Vec::new();
    let mut salary_ratios = Vec::new();
    for row in rows {
        let (tf, sal) = match (row.teraflops, row.salaries) {
            (Some(tf), Some(sal)) => (tf, sal),
            _ => continue,
        };
        let basis_value = match row.output(output) {
            Some(v) if v > 0.0 => v,
            Some(_) => {
                return Err(BenchmarkError::ZeroBasis {
                    institution: row.institution.clone(),
                    year: row.year,
                    basis: basis.flag(),
                })
            }
            None => continue,
        };
        tf_ratios.push(tf / basis_value);
        // Salaries are carried in $M; coefficients are quoted in dollars.
        salary_ratios.push(sal * 1.0e6 / basis_value);
    }
    if tf_ratios.len() < 2 {
        return Err(BenchmarkError::InsufficientRows {
            needed: 2,
            got: tf_ratios.len(),
        });
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let coeffs = BenchmarkCoefficients {
        basis,
        tf_per_unit: mean(&tf_ratios),
        salary_per_unit: mean(&salary_ratios),
        salary_budget_fraction,
        n_institutions: tf_ratios.len(),
    };
    coeffs.validate()?;
    Ok(coeffs)
}

/// Sizes capacity, salary spend, and total budget at a basis level.
///
/// modeled_tf = tf_per_unit x value; modeled_salaries ($M) =
/// salary_per_unit x value / 1e6; modeled_budget = salaries / fraction.
pub fn size_investment(coeffs: &BenchmarkCoefficients, basis_value: f64) -> SizingResult {
    debug_assert!(basis_value >= 0.0, "basis value must be nonnegative");
    let modeled_salaries = coeffs.salary_per_unit * basis_value / 1.0e6;
    SizingResult {
        basis: coeffs.basis,
        basis_value,
        modeled_tf: coeffs.tf_per_unit * basis_value,
        modeled_salaries,
        modeled_budget: modeled_salaries / coeffs.salary_budget_fraction,
    }
}

/// Predicted-versus-actual positioning for every row of a survey against
/// one benchmark model.
pub fn position_institutions(
    rows: &[ObservationRow],
    coeffs: &BenchmarkCoefficients,
) -> Result<PositioningReport, BenchmarkError> {
    let output = coeffs.basis.output_kind();
    if !rows.iter().any(|r| r.output(output).is_some()) {
        return Err(BenchmarkError::BasisMismatch(coeffs.basis.flag()));
    }
    let ratio = |actual: Option<f64>, predicted: Option<f64>| match (actual, predicted) {
        (Some(a), Some(p)) if p > 0.0 => Some(a / p),
        _ => None,
    };
    let entries = rows
        .iter()
        .map(|row| {
            let basis_value = row.output(output).filter(|v| *v > 0.0);
            let sized = basis_value.map(|v| size_investment(coeffs, v));
            let predicted_tf = sized.as_ref().map(|s| s.modeled_tf);
            let predicted_salaries = sized.as_ref().map(|s| s.modeled_salaries);
            PositionEntry {
                institution: row.institution.clone(),
                year: row.year,
                basis_value,
                actual_tf: row.teraflops,
                predicted_tf,
                tf_ratio: ratio(row.teraflops, predicted_tf),
                actual_salaries: row.salaries,
                predicted_salaries,
                salary_ratio: ratio(row.salaries, predicted_salaries),
            }
        })
        .collect();
    Ok(PositioningReport {
        basis: coeffs.basis,
        entries,
    })
}
