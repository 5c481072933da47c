//! Historical capacity growth estimation and compound projection of
//! future capacity needs.

use thiserror::Error;

use crate::dataset::PanelDataset;

#[derive(Debug, Error)]
pub enum ProjectionError {
    #[error("insufficient rows: need at least {needed} consecutive-year capacity intervals, got {got}")]
    InsufficientRows { needed: usize, got: usize },
}

/// Estimated annual capacity growth, e.g. 0.41 for 41%.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthEstimate {
    pub annual_rate: f64,
    /// Year-over-year intervals pooled across institutions.
    pub n_intervals: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub year: i32,
    pub teraflops: f64,
}

/// Compound growth curve: value at `year` is
/// base_tf x (1 + annual_rate)^(year - base_year).
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionCurve {
    pub base_year: i32,
    pub base_tf: f64,
    pub annual_rate: f64,
    pub points: Vec<CurvePoint>,
}

/// Geometric mean of pooled consecutive-year capacity ratios, minus one.
///
/// Intervals are consecutive calendar years within one institution with
/// positive capacity on both ends; anything else (gap years, zero
/// capacity) contributes nothing.
pub fn estimate_growth(panel: &PanelDataset) -> Result<GrowthEstimate, ProjectionError> {
    let mut log_ratios = Vec::new();
    for institution in panel.institutions() {
        let rows = panel.institution_rows(institution);
        for pair in rows.windows(2) {
            if pair[1].year != pair[0].year + 1 {
                continue;
            }
            if let (Some(from), Some(to)) = (pair[0].teraflops, pair[1].teraflops) {
                if from > 0.0 && to > 0.0 {
                    log_ratios.push((to / from).ln());
                }
            }
        }
    }
    if log_ratios.is_empty() {
        return Err(ProjectionError::InsufficientRows { needed: 1, got: 0 });
    }
    let mean = log_ratios.iter().sum::<f64>() / log_ratios.len() as f64;
    Ok(GrowthEstimate {
        annual_rate: mean.exp() - 1.0,
        n_intervals: log_ratios.len(),
    })
}

/// Projects capacity from a base point over `horizon` additional years
/// (horizon 0 yields just the base point).
pub fn project_capacity(base_tf: f64, base_year: i32, rate: f64, horizon: u32) -> ProjectionCurve {
    let points = (0..=horizon)
        .map(|offset| CurvePoint {
            year: base_year + offset as i32,
            teraflops: base_tf * (1.0 + rate).powi(offset as i32),
        })
        .collect();
    ProjectionCurve {
        base_year,
        base_tf,
        annual_rate: rate,
        points,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use crate::dataset::ObservationRow;

    fn tf_row(inst: &str, year: i32, tf: Option<f64>) -> ObservationRow {
        ObservationRow {
            institution: inst.to_string(),
            year,
            teraflops: tf,
            salaries: None,
            herd: None,
            doctorates: None,
            publications: None,
            hi_impact_pubs: None,
        }
    }

    fn panel_of(series: &[(&str, i32, Option<f64>)]) -> PanelDataset {
        let rows = series
            .iter()
            .map(|(inst, year, tf)| tf_row(inst, *year, *tf))
            .collect();
        PanelDataset::new(rows, "test").unwrap()
    }

    #[test]
    fn exact_geometric_series_recovers_rate() {
        let panel = panel_of(&[
            ("a", 2020, Some(100.0)),
            ("a", 2021, Some(141.0)),
            ("a", 2022, Some(198.81)),
        ]);
        let est = estimate_growth(&panel).unwrap();
        assert_abs_diff_eq!(est.annual_rate, 0.41, epsilon = 1e-12);
        assert_eq!(est.n_intervals, 2);
    }

    #[test]
    fn flat_series_has_zero_growth() {
        let panel = panel_of(&[
            ("a", 2020, Some(50.0)),
            ("a", 2021, Some(50.0)),
            ("a", 2022, Some(50.0)),
        ]);
        assert_eq!(estimate_growth(&panel).unwrap().annual_rate, 0.0);
    }

    #[test]
    fn pooled_intervals_match_log_mean_oracle() {
        let series = [
            ("a", 2019, Some(100.0)),
            ("a", 2020, Some(150.0)),
            ("a", 2021, Some(180.0)),
            ("b", 2020, Some(400.0)),
            ("b", 2021, Some(520.0)),
        ];
        let panel = panel_of(&series);
        let est = estimate_growth(&panel).unwrap();
        let ratios: [f64; 3] = [150.0 / 100.0, 180.0 / 150.0, 520.0 / 400.0];
        let oracle = (ratios.iter().map(|r| r.ln()).sum::<f64>() / 3.0).exp() - 1.0;
        assert_abs_diff_eq!(est.annual_rate, oracle, epsilon = 1e-15);
        assert_eq!(est.n_intervals, 3);
    }

    #[test]
    fn gap_years_and_zero_capacity_are_excluded() {
        let panel = panel_of(&[
            ("a", 2018, Some(100.0)),
            ("a", 2020, Some(400.0)), // gap: not an interval
            ("a", 2021, Some(0.0)),   // zero end: excluded
            ("a", 2022, Some(800.0)), // zero start: excluded
            ("b", 2020, Some(10.0)),
            ("b", 2021, None), // missing: excluded
        ]);
        assert!(matches!(
            estimate_growth(&panel).unwrap_err(),
            ProjectionError::InsufficientRows { .. }
        ));
    }

    #[test]
    fn projection_compounds_from_base() {
        let curve = project_capacity(11_465.0, 2025, 0.41, 2);
        assert_eq!(curve.points.len(), 3);
        assert_eq!(curve.points[0], CurvePoint { year: 2025, teraflops: 11_465.0 });
        assert_abs_diff_eq!(curve.points[2].teraflops, 22_793.56, epsilon = 0.01);
    }

    #[test]
    fn zero_rate_is_constant() {
        let curve = project_capacity(500.0, 2025, 0.0, 4);
        for p in &curve.points {
            assert_eq!(p.teraflops, 500.0);
        }
    }

    #[test]
    fn zero_horizon_is_single_point() {
        let curve = project_capacity(500.0, 2025, 0.41, 0);
        assert_eq!(curve.points, vec![CurvePoint { year: 2025, teraflops: 500.0 }]);
    }

    #[test]
    fn composition_of_projections() {
        let full = project_capacity(1000.0, 2025, 0.37, 7);
        let first = project_capacity(1000.0, 2025, 0.37, 3);
        let second = project_capacity(first.points[3].teraflops, 2028, 0.37, 4);
        let direct = full.points[7].teraflops;
        let composed = second.points[4].teraflops;
        assert_abs_diff_eq!(composed, direct, epsilon = 1e-9 * direct);
    }
}
