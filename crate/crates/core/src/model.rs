//! Production-function analyses over a panel: per-institution correlation
//! screens, pooled and per-institution regression suites, and translation
//! of fitted coefficients into real-world effect sizes.

use std::fmt;

use thiserror::Error;

use crate::dataset::{ObservationRow, OutputKind, PanelDataset};
use crate::relimp::{lmg, RelativeImportance};
use crate::stats::{fit_ols, kendall_tau, RegressionFit, RegressionSpec, StatsError};

/// Predictor labels shared by every production-function fit.
pub const PREDICTOR_NAMES: [&str; 2] = ["TF", "Salaries"];

/// Minimum complete rows for a scope to be fitted (two predictors plus
/// intercept plus one residual degree of freedom).
pub const MIN_SUITE_ROWS: usize = 4;

/// Minimum complete pairs for a correlation cell.
pub const MIN_CORRELATION_ROWS: usize = 3;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("unknown scope `{0}`")]
    UnknownScope(String),
    #[error("scope `{scope}` has {got} complete rows; at least {needed} required")]
    InsufficientRows {
        scope: String,
        needed: usize,
        got: usize,
    },
    #[error(transparent)]
    Stats(#[from] StatsError),
}

/// Which slice of the panel a suite is fitted on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Scope {
    Combined,
    Institution(String),
}

impl Scope {
    /// Parses the CLI convention: the literal `combined` or an institution
    /// label.
    pub fn parse(label: &str) -> Scope {
        if label.eq_ignore_ascii_case("combined") {
            Scope::Combined
        } else {
            Scope::Institution(label.to_string())
        }
    }

    pub fn label(&self) -> &str {
        match self {
            Scope::Combined => "combined",
            Scope::Institution(name) => name,
        }
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Fit and importance decomposition for one output.
#[derive(Debug, Clone)]
pub struct OutputModel {
    pub output: OutputKind,
    pub fit: RegressionFit,
    pub importance: RelativeImportance,
}

/// The four production-function models for one scope. All fits share the
/// same observations: rows are listwise-deleted unless both inputs and all
/// four outputs are present.
#[derive(Debug, Clone)]
pub struct ModelSuite {
    pub scope: Scope,
    pub n_obs: usize,
    pub models: Vec<OutputModel>,
}

impl ModelSuite {
    pub fn model(&self, output: OutputKind) -> &OutputModel {
        self.models
            .iter()
            .find(|m| m.output == output)
            .expect("suite covers every output")
    }
}

/// Per-institution Kendall tau of one input against every output. Cells
/// without enough complete pairs (or with an all-tied side) are absent.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    pub input_name: String,
    pub institutions: Vec<String>,
    pub rows: Vec<CorrelationRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationRow {
    pub output: OutputKind,
    pub taus: Vec<Option<f64>>,
}

/// Fitted coefficients rescaled to tangible increments: effect of 100
/// TeraFLOPS and of $100k of salaries on each output.
#[derive(Debug, Clone)]
pub struct TranslationTable {
    pub scope: Scope,
    pub rows: Vec<TranslationRow>,
}

#[derive(Debug, Clone)]
pub struct TranslationRow {
    pub output: OutputKind,
    pub per_100_tf: f64,
    pub per_100k_salary: f64,
    pub adj_r2: f64,
}

fn input_value(row: &ObservationRow, input: usize) -> Option<f64> {
    match input {
        0 => row.teraflops,
        _ => row.salaries,
    }
}

/// Kendall tau of each input against each output, per institution, with
/// listwise deletion of incomplete years.
pub fn correlate_all(panel: &PanelDataset) -> (CorrelationMatrix, CorrelationMatrix) {
    let institutions: Vec<String> = panel.institutions().iter().map(|s| s.to_string()).collect();
    let mut matrices = Vec::with_capacity(2);
    for (input, name) in PREDICTOR_NAMES.iter().enumerate() {
        let rows = OutputKind::ALL
            .iter()
            .map(|&output| {
                let taus = institutions
                    .iter()
                    .map(|inst| {
                        let mut xs = Vec::new();
                        let mut ys = Vec::new();
                        for row in panel.institution_rows(inst) {
                            if let (Some(x), Some(y)) =
                                (input_value(row, input), row.output(output))
                            {
                                xs.push(x);
                                ys.push(y);
                            }
                        }
                        if xs.len() < MIN_CORRELATION_ROWS {
                            return None;
                        }
                        kendall_tau(&xs, &ys).ok()
                    })
                    .collect();
                CorrelationRow { output, taus }
            })
            .collect();
        matrices.push(CorrelationMatrix {
            input_name: (*name).to_string(),
            institutions: institutions.clone(),
            rows,
        });
    }
    let salaries = matrices.pop().expect("two matrices");
    let teraflops = matrices.pop().expect("two matrices");
    (teraflops, salaries)
}

/// Rows of a scope that are complete for suite fitting.
pub fn complete_rows<'a>(panel: &'a PanelDataset, scope: &Scope) -> Result<Vec<&'a ObservationRow>, ModelError> {
    let rows: Vec<&ObservationRow> = match scope {
        Scope::Combined => panel.rows().iter().collect(),
        Scope::Institution(name) => {
            if !panel.contains_institution(name) {
                return Err(ModelError::UnknownScope(name.clone()));
            }
            panel.institution_rows(name)
        }
    };
    Ok(rows.into_iter().filter(|r| r.is_complete()).collect())
}

/// Fits the four production-function models (one per output) on
/// [TF, Salaries], with lmg importances for each.
pub fn fit_suite(panel: &PanelDataset, scope: &Scope) -> Result<ModelSuite, ModelError> {
    let rows = complete_rows(panel, scope)?;
    if rows.len() < MIN_SUITE_ROWS {
        return Err(ModelError::InsufficientRows {
            scope: scope.label().to_string(),
            needed: MIN_SUITE_ROWS,
            got: rows.len(),
        });
    }

    let models = OutputKind::ALL
        .iter()
        .map(|&output| {
            let design = rows
                .iter()
                .map(|r| {
                    let tf = r.teraflops.expect("complete row");
                    let sal = r.salaries.expect("complete row");
                    let y = r.output(output).expect("complete row");
                    (vec![tf, sal], y)
                })
                .collect();
            let spec = RegressionSpec::new(
                output.label(),
                PREDICTOR_NAMES.iter().map(|s| s.to_string()).collect(),
                design,
            )?;
            let fit = fit_ols(&spec)?;
            let importance = lmg(&spec)?;
            Ok(OutputModel {
                output,
                fit,
                importance,
            })
        })
        .collect::<Result<Vec<_>, ModelError>>()?;

    Ok(ModelSuite {
        scope: scope.clone(),
        n_obs: rows.len(),
        models,
    })
}

/// Rescales a suite's coefficients to per-100-TF and per-$100k increments
/// (salaries are modeled in $M, so $100k is a tenth of a unit).
pub fn translate(suite: &ModelSuite) -> TranslationTable {
    let rows = suite
        .models
        .iter()
        .map(|m| TranslationRow {
            output: m.output,
            per_100_tf: 100.0 * m.fit.coefficients[0].estimate,
            per_100k_salary: m.fit.coefficients[1].estimate / 10.0,
            adj_r2: m.fit.adj_r_squared,
        })
        .collect();
    TranslationTable {
        scope: suite.scope.clone(),
        rows,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use crate::dataset::ObservationRow;

    fn row(inst: &str, year: i32, tf: f64, sal: f64, outputs: [f64; 4]) -> ObservationRow {
        ObservationRow {
            institution: inst.to_string(),
            year,
            teraflops: Some(tf),
            salaries: Some(sal),
            publications: Some(outputs[0]),
            doctorates: Some(outputs[1]),
            herd: Some(outputs[2]),
            hi_impact_pubs: Some(outputs[3]),
        }
    }

    /// Panel where outputs are exact linear functions of the inputs.
    fn exact_panel() -> PanelDataset {
        let mut rows = Vec::new();
        for (i, inst) in ["alpha", "beta"].iter().enumerate() {
            for t in 0..6 {
                let tf = 100.0 + 40.0 * t as f64 + 10.0 * i as f64;
                let sal = 1.0 + 0.2 * t as f64 + 0.05 * (t as f64 * 1.7).sin();
                let outputs = [
                    2000.0 + 0.2 * tf + 1300.0 * sal,
                    300.0 + 0.01 * tf + 80.0 * sal,
                    150.0 + 0.03 * tf + 145.0 * sal,
                    250.0 + 0.04 * tf + 210.0 * sal,
                ];
                rows.push(row(inst, 2015 + t, tf, sal, outputs));
            }
        }
        PanelDataset::new(rows, "test").unwrap()
    }

    #[test]
    fn monotone_series_correlates_to_one() {
        let panel = exact_panel();
        let (tf_matrix, sal_matrix) = correlate_all(&panel);
        assert_eq!(tf_matrix.input_name, "TF");
        assert_eq!(sal_matrix.input_name, "Salaries");
        for row in &tf_matrix.rows {
            for tau in &row.taus {
                assert_eq!(*tau, Some(1.0));
            }
        }
    }

    #[test]
    fn reversed_series_correlates_to_minus_one() {
        let rows: Vec<ObservationRow> = (0..4)
            .map(|t| {
                let mut r = row(
                    "gamma",
                    2020 + t,
                    (t + 1) as f64,
                    1.0 + t as f64,
                    [10.0, (4 - t) as f64, 10.0, 10.0],
                );
                r.publications = Some(100.0 + t as f64);
                r
            })
            .collect();
        let panel = PanelDataset::new(rows, "test").unwrap();
        let (tf_matrix, _) = correlate_all(&panel);
        let doct = tf_matrix
            .rows
            .iter()
            .find(|r| r.output == OutputKind::Doctorates)
            .unwrap();
        assert_eq!(doct.taus[0], Some(-1.0));
    }

    #[test]
    fn tied_output_matches_bruteforce_tau() {
        // One tie in doctorates; oracle value from O(n^2) pair counting.
        let tf = [1.0, 2.0, 3.0, 4.0];
        let phd = [5.0, 6.0, 6.0, 8.0];
        let rows: Vec<ObservationRow> = (0..4)
            .map(|t| row("delta", 2020 + t as i32, tf[t], 1.0, [1.0, phd[t], 1.0, 1.0]))
            .collect();
        let panel = PanelDataset::new(rows, "test").unwrap();
        let (tf_matrix, _) = correlate_all(&panel);
        let cell = tf_matrix
            .rows
            .iter()
            .find(|r| r.output == OutputKind::Doctorates)
            .unwrap()
            .taus[0]
            .unwrap();
        // 6 pairs: 5 concordant, 1 tied in y. tau = 5 / sqrt(6 * 5).
        assert_abs_diff_eq!(cell, 5.0 / (30.0_f64).sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn short_series_cells_are_absent_not_fabricated() {
        let rows = vec![
            row("eps", 2020, 1.0, 1.0, [1.0, 1.0, 1.0, 1.0]),
            row("eps", 2021, 2.0, 2.0, [2.0, 2.0, 2.0, 2.0]),
        ];
        let panel = PanelDataset::new(rows, "test").unwrap();
        let (tf_matrix, _) = correlate_all(&panel);
        for row in &tf_matrix.rows {
            assert_eq!(row.taus[0], None);
        }
    }

    #[test]
    fn suite_recovers_exact_coefficients() {
        let panel = exact_panel();
        let suite = fit_suite(&panel, &Scope::Combined).unwrap();
        assert_eq!(suite.n_obs, 12);
        let herd = suite.model(OutputKind::Herd);
        assert_abs_diff_eq!(herd.fit.intercept.estimate, 150.0, epsilon = 1e-6);
        assert_abs_diff_eq!(herd.fit.coefficients[0].estimate, 0.03, epsilon = 1e-9);
        assert_abs_diff_eq!(herd.fit.coefficients[1].estimate, 145.0, epsilon = 1e-6);
        // Every fit in the suite shares the same n_obs.
        for m in &suite.models {
            assert_eq!(m.fit.n_obs, suite.n_obs);
        }
    }

    #[test]
    fn unknown_scope_rejected() {
        let panel = exact_panel();
        assert!(matches!(
            fit_suite(&panel, &Scope::Institution("nowhere".into())).unwrap_err(),
            ModelError::UnknownScope(_)
        ));
    }

    #[test]
    fn constant_salary_institution_is_singular() {
        let rows: Vec<ObservationRow> = (0..5)
            .map(|t| {
                row(
                    "flat",
                    2018 + t,
                    10.0 * (t + 1) as f64,
                    2.0,
                    [
                        100.0 + t as f64,
                        50.0 + t as f64,
                        30.0 + 2.0 * t as f64,
                        20.0 + t as f64,
                    ],
                )
            })
            .collect();
        let panel = PanelDataset::new(rows, "test").unwrap();
        let err = fit_suite(&panel, &Scope::Combined).unwrap_err();
        assert!(matches!(
            err,
            ModelError::Stats(StatsError::SingularDesign { ref column }) if column == "Salaries"
        ));
    }

    #[test]
    fn scopes_are_independent() {
        let panel = exact_panel();
        let alpha_before = fit_suite(&panel, &Scope::Institution("alpha".into())).unwrap();
        let _beta = fit_suite(&panel, &Scope::Institution("beta".into())).unwrap();
        let alpha_after = fit_suite(&panel, &Scope::Institution("alpha".into())).unwrap();
        assert_eq!(
            alpha_before.model(OutputKind::Herd).fit.r_squared,
            alpha_after.model(OutputKind::Herd).fit.r_squared
        );
    }

    #[test]
    fn pooled_suite_equals_concatenated_fit() {
        let panel = exact_panel();
        let suite = fit_suite(&panel, &Scope::Combined).unwrap();
        let rows: Vec<(Vec<f64>, f64)> = panel
            .rows()
            .iter()
            .filter(|r| r.is_complete())
            .map(|r| {
                (
                    vec![r.teraflops.unwrap(), r.salaries.unwrap()],
                    r.herd.unwrap(),
                )
            })
            .collect();
        let spec = RegressionSpec::new(
            "HERD Expenditures",
            PREDICTOR_NAMES.iter().map(|s| s.to_string()).collect(),
            rows,
        )
        .unwrap();
        let direct = fit_ols(&spec).unwrap();
        let suite_fit = &suite.model(OutputKind::Herd).fit;
        assert_eq!(suite_fit.n_obs, direct.n_obs);
        assert_eq!(suite_fit.coefficients[0].estimate, direct.coefficients[0].estimate);
        assert_eq!(suite_fit.r_squared, direct.r_squared);
    }

    #[test]
    fn translation_applies_documented_scalings() {
        let panel = exact_panel();
        let suite = fit_suite(&panel, &Scope::Combined).unwrap();
        let table = translate(&suite);
        let herd = table
            .rows
            .iter()
            .find(|r| r.output == OutputKind::Herd)
            .unwrap();
        // 0.030 $M/TF scales to ~3.0 per 100 TF; 145 $M per $M of salaries
        // scales to 14.5 per $100k.
        assert_abs_diff_eq!(herd.per_100_tf, 3.0, epsilon = 1e-6);
        assert_abs_diff_eq!(herd.per_100k_salary, 14.5, epsilon = 1e-6);
        assert_eq!(herd.adj_r2, suite.model(OutputKind::Herd).fit.adj_r_squared);
    }

    #[test]
    fn correlation_runs_are_bitwise_reproducible() {
        let panel = exact_panel();
        let first = correlate_all(&panel);
        let second = correlate_all(&panel);
        assert_eq!(first.0, second.0);
        assert_eq!(first.1, second.1);
    }
}
