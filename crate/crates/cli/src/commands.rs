//! Command execution: loads inputs, runs the analyses, and renders
//! deterministic reports.

use std::io::Write;
use std::path::{Path, PathBuf};

use cibench_core::benchmark::{
    estimate_coefficients, position_institutions, size_investment, Basis, BenchmarkCoefficients,
    PositioningReport, SizingResult,
};
use cibench_core::dataset::{load_panel, load_survey, IngestConfig, PanelLoad, SurveyLoad};
use cibench_core::model::{
    correlate_all, fit_suite, translate, CorrelationMatrix, ModelSuite, Scope, TranslationTable,
};
use cibench_core::projection::{estimate_growth, project_capacity, GrowthEstimate, ProjectionCurve};
use cibench_core::stats::significance_stars;

use crate::args::{BasisArg, Command, CoeffSource, IngestArgs, OutputArgs};
use crate::error::CliError;
use crate::report::{group_thousands, render, Cell, Precision, Report, Section};

const STARS_LEGEND: &str = "*** p<0.001; ** p<0.01; * p<0.05";

pub fn execute(command: Command, precision: Precision) -> Result<(), CliError> {
    match command {
        Command::Validate { input, ingest, out } => {
            let load = load_panel_file(&input, &ingest)?;
            let mut report = Report::new("Panel Validation");
            report.sections.push(dataset_section(&load));
            emit(&report, &out)
        }
        Command::Correlate { input, ingest, out } => {
            let load = load_panel_file(&input, &ingest)?;
            let (tf, salaries) = correlate_all(&load.dataset);
            let mut report = Report::new("Kendall Correlation Analysis");
            report.sections.push(correlation_section(&tf, precision));
            report.sections.push(correlation_section(&salaries, precision));
            emit(&report, &out)
        }
        Command::Fit {
            input,
            scope,
            ingest,
            out,
        } => {
            let load = load_panel_file(&input, &ingest)?;
            let scope = Scope::parse(&scope);
            let suite = fit_suite(&load.dataset, &scope)?;
            let mut report = Report::new(format!("Production Function Models - {scope}"));
            report.sections.push(regression_section(&suite, precision));
            report
                .sections
                .push(translation_section(&translate(&suite), precision));
            emit(&report, &out)
        }
        Command::Relimp {
            input,
            scope,
            ingest,
            out,
        } => {
            let load = load_panel_file(&input, &ingest)?;
            let scope = Scope::parse(&scope);
            let suite = fit_suite(&load.dataset, &scope)?;
            let mut report = Report::new(format!("Relative Importance - {scope}"));
            report.sections.push(importance_section(&suite, precision));
            emit(&report, &out)
        }
        Command::BenchmarkFit {
            input,
            inventory,
            basis,
            median_comp,
            budget_fraction,
            coeff_file,
            ingest,
            out,
        } => {
            let survey = load_survey_file(&input, inventory.as_deref(), &ingest, median_comp)?;
            let basis = Basis::from(basis);
            let coeffs = estimate_coefficients(&survey.rows, basis, budget_fraction)?;
            let mut report = Report::new(format!("Benchmark Coefficients - {basis} basis"));
            report
                .sections
                .push(coefficients_section(&coeffs, precision));
            if let Some(path) = coeff_file {
                write_atomic(&path, &coeffs.to_key_values())?;
            }
            emit(&report, &out)
        }
        Command::BenchmarkSize {
            basis,
            value,
            coeffs,
            out,
        } => {
            if !(value.is_finite() && value >= 0.0) {
                return Err(CliError::Usage(format!(
                    "--value must be a nonnegative output level, got {value}"
                )));
            }
            let coeffs = resolve_coefficients(&coeffs, basis, true)?
                .expect("default preset always resolves");
            let sized = size_investment(&coeffs, value);
            let mut report = Report::new(format!(
                "Center Investment Benchmark - {} basis",
                coeffs.basis
            ));
            report.sections.push(sizing_section(&sized, precision));
            emit(&report, &out)
        }
        Command::Position {
            input,
            inventory,
            basis,
            median_comp,
            coeffs,
            ingest,
            out,
        } => {
            let survey = load_survey_file(&input, inventory.as_deref(), &ingest, median_comp)?;
            let coeffs = resolve_coefficients(&coeffs, basis, true)?
                .expect("default preset always resolves");
            let positioning = position_institutions(&survey.rows, &coeffs)?;
            let mut report = Report::new(format!(
                "Actual vs Modeled Investment - {} basis",
                coeffs.basis
            ));
            report
                .sections
                .push(positioning_section(&positioning, precision));
            emit(&report, &out)
        }
        Command::Project {
            input,
            rate,
            base_year,
            horizon,
            basis,
            value,
            coeffs,
            ingest,
            out,
        } => {
            let mut report = Report::new("Capacity Projection");
            let rate = match rate {
                Some(r) => {
                    if !r.is_finite() || r <= -1.0 {
                        return Err(CliError::Usage(format!(
                            "--rate must be a finite fraction greater than -1, got {r}"
                        )));
                    }
                    r
                }
                None => {
                    let input = input.ok_or_else(|| {
                        CliError::Usage(
                            "project needs --rate or --input to estimate the growth trend".into(),
                        )
                    })?;
                    let load = load_panel_file(&input, &ingest)?;
                    let estimate = estimate_growth(&load.dataset)?;
                    report.sections.push(growth_section(&estimate, precision));
                    estimate.annual_rate
                }
            };
            for v in &value {
                if !(v.is_finite() && *v >= 0.0) {
                    return Err(CliError::Usage(format!(
                        "--value must be nonnegative, got {v}"
                    )));
                }
            }
            let resolved = resolve_coefficients(&coeffs, basis, false)?;
            let scenarios: Vec<(String, ProjectionCurve)> = value
                .iter()
                .map(|&v| {
                    let (label, base_tf) = match &resolved {
                        Some(c) => (format!("{}={v}", c.basis), size_investment(c, v).modeled_tf),
                        None => (format!("tf={v}"), v),
                    };
                    (label, project_capacity(base_tf, base_year, rate, horizon))
                })
                .collect();
            report.sections.push(curve_section(&scenarios));
            emit(&report, &out)
        }
        Command::Report { input, ingest, out } => {
            let load = load_panel_file(&input, &ingest)?;
            let mut report = Report::new("Research Computing Investment Analysis");
            report.sections.push(dataset_section(&load));
            let (tf, salaries) = correlate_all(&load.dataset);
            report.sections.push(correlation_section(&tf, precision));
            report.sections.push(correlation_section(&salaries, precision));

            let mut scopes = vec![Scope::Combined];
            scopes.extend(
                load.dataset
                    .institutions()
                    .iter()
                    .map(|name| Scope::Institution(name.to_string())),
            );
            for scope in &scopes {
                match fit_suite(&load.dataset, scope) {
                    Ok(suite) => {
                        report.sections.push(regression_section(&suite, precision));
                        report
                            .sections
                            .push(translation_section(&translate(&suite), precision));
                        report.sections.push(importance_section(&suite, precision));
                    }
                    Err(err) => {
                        report.sections.push(
                            Section::new(
                                format!("Production Function Models - {scope}"),
                                vec![],
                            )
                            .with_note(format!("not available: {err}")),
                        );
                    }
                }
            }
            match estimate_growth(&load.dataset) {
                Ok(estimate) => report.sections.push(growth_section(&estimate, precision)),
                Err(err) => report.sections.push(
                    Section::new("Capacity Growth Trend", vec![])
                        .with_note(format!("not available: {err}")),
                ),
            }
            emit(&report, &out)
        }
    }
}

fn load_panel_file(path: &Path, ingest: &IngestArgs) -> Result<PanelLoad, CliError> {
    let config = IngestConfig {
        strict: ingest.strict,
        ..IngestConfig::default()
    };
    Ok(load_panel(path, &config)?)
}

fn load_survey_file(
    path: &Path,
    inventory: Option<&Path>,
    ingest: &IngestArgs,
    median_comp: f64,
) -> Result<SurveyLoad, CliError> {
    let config = IngestConfig {
        strict: ingest.strict,
        median_compensation: median_comp,
    };
    Ok(load_survey(path, inventory, &config)?)
}

/// Resolves benchmark coefficients from a file or preset. With
/// `default_preset`, absent sources fall back to `paper-2025`; otherwise
/// absent sources resolve to `None` (the caller treats values as raw TF).
fn resolve_coefficients(
    source: &CoeffSource,
    basis: BasisArg,
    default_preset: bool,
) -> Result<Option<BenchmarkCoefficients>, CliError> {
    let mut coeffs = if let Some(path) = &source.coeff_file {
        let text = std::fs::read_to_string(path)?;
        Some(BenchmarkCoefficients::parse_key_values(&text)?)
    } else {
        let name = match (&source.preset, default_preset) {
            (Some(name), _) => Some(name.clone()),
            (None, true) => Some("paper-2025".to_string()),
            (None, false) => None,
        };
        match name {
            Some(name) => Some(
                BenchmarkCoefficients::preset(&name, Basis::from(basis)).ok_or_else(|| {
                    CliError::Usage(format!("unknown preset `{name}` (available: paper-2025)"))
                })?,
            ),
            None => None,
        }
    };
    if let Some(c) = &mut coeffs {
        if let Some(fraction) = source.budget_fraction {
            c.salary_budget_fraction = fraction;
        }
        c.validate()?;
    }
    Ok(coeffs)
}

// ---------------------------------------------------------------------------
// section builders
// ---------------------------------------------------------------------------

fn dataset_section(load: &PanelLoad) -> Section {
    let rows = load.dataset.rows();
    let institutions = load.dataset.institutions();
    let complete = rows.iter().filter(|r| r.is_complete()).count();
    let year_min = rows.iter().map(|r| r.year).min().unwrap_or(0);
    let year_max = rows.iter().map(|r| r.year).max().unwrap_or(0);

    let mut section = Section::new("Dataset", vec!["Quantity".into(), "Value".into()]);
    section.push_row(vec![Cell::text("Rows"), Cell::integer(rows.len() as i64)]);
    section.push_row(vec![
        Cell::text("Complete rows"),
        Cell::integer(complete as i64),
    ]);
    section.push_row(vec![
        Cell::text("Institutions"),
        Cell::integer(institutions.len() as i64),
    ]);
    section.push_row(vec![
        Cell::text("Years"),
        Cell::text(format!("{year_min}-{year_max}")),
    ]);
    section.push_row(vec![
        Cell::text("Warnings"),
        Cell::integer(load.warnings.len() as i64),
    ]);
    for warning in &load.warnings {
        section.notes.push(warning.to_string());
    }
    section
}

fn correlation_section(matrix: &CorrelationMatrix, precision: Precision) -> Section {
    let mut columns = vec![String::new()];
    columns.extend(matrix.institutions.iter().cloned());
    let mut section = Section::new(
        format!("Kendall Correlation - {} vs Outputs", matrix.input_name),
        columns,
    );
    for row in &matrix.rows {
        let mut cells = vec![Cell::text(row.output.label())];
        cells.extend(
            row.taus
                .iter()
                .map(|tau| Cell::optional_number(*tau, precision.coeff)),
        );
        section.push_row(cells);
    }
    section.with_note("absent cells: fewer than 3 complete years or an all-tied series")
}

fn regression_section(suite: &ModelSuite, precision: Precision) -> Section {
    let mut columns = vec![String::new()];
    columns.extend(suite.models.iter().map(|m| m.output.label().to_string()));
    let mut section = Section::new(
        format!("Production Function Models - {}", suite.scope),
        columns,
    );

    // Paper layout: estimate with stars over (standard error), one term
    // pair per predictor, intercept first.
    type TermStats = Vec<(f64, f64, f64)>;
    let terms: Vec<(String, TermStats)> = {
        let mut terms = Vec::new();
        let intercept_row: Vec<(f64, f64, f64)> = suite
            .models
            .iter()
            .map(|m| {
                (
                    m.fit.intercept.estimate,
                    m.fit.intercept.std_error,
                    m.fit.intercept.p_value,
                )
            })
            .collect();
        terms.push(("(Intercept)".to_string(), intercept_row));
        for (i, name) in cibench_core::model::PREDICTOR_NAMES.iter().enumerate() {
            let row = suite
                .models
                .iter()
                .map(|m| {
                    let c = &m.fit.coefficients[i];
                    (c.estimate, c.std_error, c.p_value)
                })
                .collect();
            terms.push(((*name).to_string(), row));
        }
        terms
    };
    for (name, stats) in terms {
        let mut estimates = vec![Cell::text(&name)];
        let mut errors = vec![Cell::blank()];
        for (estimate, std_error, p_value) in stats {
            estimates.push(Cell {
                display: format!(
                    "{estimate:.prec$}{}",
                    significance_stars(p_value),
                    prec = precision.coeff
                ),
                value: estimate.is_finite().then_some(estimate),
            });
            errors.push(Cell {
                display: format!("({std_error:.prec$})", prec = precision.coeff),
                value: std_error.is_finite().then_some(std_error),
            });
        }
        section.push_row(estimates);
        section.push_row(errors);
    }

    let mut r2_row = vec![Cell::text("R^2")];
    let mut adj_row = vec![Cell::text("Adj. R^2")];
    let mut n_row = vec![Cell::text("Num. obs.")];
    for m in &suite.models {
        r2_row.push(Cell::number(m.fit.r_squared, precision.coeff));
        adj_row.push(Cell::number(m.fit.adj_r_squared, precision.coeff));
        n_row.push(Cell::integer(m.fit.n_obs as i64));
    }
    section.push_row(r2_row);
    section.push_row(adj_row);
    section.push_row(n_row);

    section.with_note(STARS_LEGEND)
}

fn translation_section(table: &TranslationTable, precision: Precision) -> Section {
    let mut columns = vec![String::new()];
    columns.extend(table.rows.iter().map(|r| r.output.label().to_string()));
    let mut section = Section::new(
        format!("Modeled Real-World Effects - {}", table.scope),
        columns,
    );
    let mut tf_row = vec![Cell::text("100 TeraFLOPS")];
    let mut salary_row = vec![Cell::text("$100k Salaries")];
    let mut adj_row = vec![Cell::text("Adj. R^2")];
    for row in &table.rows {
        tf_row.push(Cell::number(row.per_100_tf, precision.money));
        salary_row.push(Cell::number(row.per_100k_salary, precision.money));
        adj_row.push(Cell::number(row.adj_r2, precision.coeff));
    }
    section.push_row(tf_row);
    section.push_row(salary_row);
    section.push_row(adj_row);
    section
}

fn importance_section(suite: &ModelSuite, precision: Precision) -> Section {
    let mut columns = vec![String::new()];
    columns.extend(suite.models.iter().map(|m| m.output.label().to_string()));
    let mut section = Section::new(
        format!("Relative Importance (lmg) - {}", suite.scope),
        columns,
    );
    let mut tf_row = vec![Cell::text("TeraFLOPS")];
    let mut salary_row = vec![Cell::text("RCD Salaries")];
    let mut total_row = vec![Cell::text("Total R^2")];
    for m in &suite.models {
        tf_row.push(Cell::number(m.importance.shares[0].share, precision.coeff));
        salary_row.push(Cell::number(m.importance.shares[1].share, precision.coeff));
        total_row.push(Cell::number(m.importance.total_r2, precision.coeff));
    }
    section.push_row(tf_row);
    section.push_row(salary_row);
    section.push_row(total_row);
    section.with_note("shares are raw proportions of variance; they sum to the model R^2")
}

fn salary_per_unit_cell(coeffs: &BenchmarkCoefficients, precision: Precision) -> Cell {
    match coeffs.basis {
        // Dollars of salary per $M of expenditures, quoted as a percentage.
        Basis::Herd => Cell {
            display: format!(
                "{:.prec$}%",
                coeffs.salary_per_unit / 1.0e4,
                prec = precision.money
            ),
            value: Some(coeffs.salary_per_unit),
        },
        _ => Cell {
            display: format!("${}", group_thousands(coeffs.salary_per_unit.round() as i64)),
            value: Some(coeffs.salary_per_unit),
        },
    }
}

fn coefficients_section(coeffs: &BenchmarkCoefficients, precision: Precision) -> Section {
    let mut section = Section::new(
        "Benchmark Coefficients",
        vec!["Quantity".into(), "Value".into()],
    );
    section.push_row(vec![
        Cell::text(format!("TeraFLOPS per {}", coeffs.basis.unit_label())),
        Cell::number(coeffs.tf_per_unit, precision.money),
    ]);
    section.push_row(vec![
        Cell::text(format!("Salaries per {}", coeffs.basis.unit_label())),
        salary_per_unit_cell(coeffs, precision),
    ]);
    section.push_row(vec![
        Cell::text("Salary share of total budget"),
        Cell::number(coeffs.salary_budget_fraction, precision.money),
    ]);
    section.push_row(vec![
        Cell::text("Institutions"),
        Cell::integer(coeffs.n_institutions as i64),
    ]);
    section
}

fn basis_value_cell(basis: Basis, v: f64) -> Cell {
    let grouped = if v.fract() == 0.0 && v.abs() < 9.0e15 {
        group_thousands(v as i64)
    } else {
        format!("{v:.2}")
    };
    match basis {
        Basis::Herd => Cell {
            display: format!("${grouped}"),
            value: Some(v),
        },
        _ => Cell {
            display: grouped,
            value: Some(v),
        },
    }
}

fn basis_column_label(basis: Basis) -> &'static str {
    match basis {
        Basis::Herd => "R&D Expenditures ($M)",
        Basis::Doctorates => "Earned Doctorates",
        Basis::Publications => "Publications",
    }
}

fn sizing_section(sized: &SizingResult, precision: Precision) -> Section {
    let mut section = Section::new(
        "Modeled Center Investment",
        vec![
            basis_column_label(sized.basis).to_string(),
            "Modeled TF".into(),
            "Modeled Salaries ($M)".into(),
            "Modeled Budget ($M)".into(),
        ],
    );
    section.push_row(vec![
        basis_value_cell(sized.basis, sized.basis_value),
        Cell::teraflops(sized.modeled_tf),
        Cell::money(sized.modeled_salaries, precision.money),
        Cell::money(sized.modeled_budget, precision.money),
    ]);
    section
}

fn positioning_section(positioning: &PositioningReport, precision: Precision) -> Section {
    let mut section = Section::new(
        "Actual vs Modeled",
        vec![
            "Institution".into(),
            "Year".into(),
            basis_column_label(positioning.basis).to_string(),
            "Actual TF".into(),
            "Modeled TF".into(),
            "TF Ratio".into(),
            "Actual Salaries ($M)".into(),
            "Modeled Salaries ($M)".into(),
            "Salary Ratio".into(),
        ],
    );
    for entry in &positioning.entries {
        section.push_row(vec![
            Cell::text(&entry.institution),
            Cell::integer(entry.year as i64),
            entry
                .basis_value
                .map(|v| basis_value_cell(positioning.basis, v))
                .unwrap_or_else(Cell::blank),
            Cell::optional_teraflops(entry.actual_tf),
            Cell::optional_teraflops(entry.predicted_tf),
            Cell::optional_number(entry.tf_ratio, precision.money),
            Cell::optional_money(entry.actual_salaries, precision.money),
            Cell::optional_money(entry.predicted_salaries, precision.money),
            Cell::optional_number(entry.salary_ratio, precision.money),
        ]);
    }
    section.with_note("ratio = actual / modeled; blank where the basis or a prediction is unavailable")
}

fn growth_section(estimate: &GrowthEstimate, precision: Precision) -> Section {
    let mut section = Section::new(
        "Capacity Growth Trend",
        vec!["Annual Growth Rate".into(), "Intervals".into()],
    );
    section.push_row(vec![
        Cell::number(estimate.annual_rate, precision.coeff),
        Cell::integer(estimate.n_intervals as i64),
    ]);
    section
}

fn curve_section(scenarios: &[(String, ProjectionCurve)]) -> Section {
    let multi = scenarios.len() > 1;
    let mut columns = vec!["year".to_string(), "modeled_tf".to_string()];
    if multi {
        columns.push("scenario".to_string());
    }
    let mut section = Section::new("Projected Capacity", columns);
    for (label, curve) in scenarios {
        for point in &curve.points {
            let mut row = vec![Cell::integer(point.year as i64), Cell::full(point.teraflops)];
            if multi {
                row.push(Cell::text(label));
            }
            section.push_row(row);
        }
    }
    section
}

// ---------------------------------------------------------------------------
// output
// ---------------------------------------------------------------------------

fn emit(report: &Report, out: &OutputArgs) -> Result<(), CliError> {
    let text = render(report, out.format);
    match &out.output {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => write_atomic(path, &text),
    }
}

/// Write-then-rename so a failed run never leaves a partial file.
fn write_atomic(path: &PathBuf, text: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(text.as_bytes())?;
    tmp.persist(path).map_err(|e| CliError::Io(e.error))?;
    Ok(())
}
