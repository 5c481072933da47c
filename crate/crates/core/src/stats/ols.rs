//! Ordinary least squares with full inference via Householder QR.

use super::special::t_pvalue;
use super::StatsError;

/// Rank tolerance relative to the largest design-column norm.
const RANK_TOL: f64 = 1.0e-10;

/// A response regressed on an ordered set of predictors.
///
/// Rows are (predictor vector, response) pairs; an intercept is implied and
/// always fitted.
#[derive(Debug, Clone)]
pub struct RegressionSpec {
    output_name: String,
    predictor_names: Vec<String>,
    rows: Vec<(Vec<f64>, f64)>,
}

impl RegressionSpec {
    pub fn new(
        output_name: impl Into<String>,
        predictor_names: Vec<String>,
        rows: Vec<(Vec<f64>, f64)>,
    ) -> Result<Self, StatsError> {
        let k = predictor_names.len();
        if k == 0 {
            return Err(StatsError::DomainError {
                message: "at least one predictor is required".into(),
            });
        }
        let n = rows.len();
        if n < k + 2 {
            return Err(StatsError::InsufficientRows {
                needed: k + 2,
                got: n,
            });
        }
        for (xs, y) in &rows {
            if xs.len() != k {
                return Err(StatsError::LengthMismatch {
                    left: k,
                    right: xs.len(),
                });
            }
            if !y.is_finite() || xs.iter().any(|v| !v.is_finite()) {
                return Err(StatsError::DomainError {
                    message: "design values must be finite".into(),
                });
            }
        }
        Ok(Self {
            output_name: output_name.into(),
            predictor_names,
            rows,
        })
    }

    pub fn output_name(&self) -> &str {
        &self.output_name
    }

    pub fn predictor_names(&self) -> &[String] {
        &self.predictor_names
    }

    pub fn predictor_count(&self) -> usize {
        self.predictor_names.len()
    }

    pub fn n_obs(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[(Vec<f64>, f64)] {
        &self.rows
    }

    /// Spec restricted to the given predictor indices (same rows).
    pub fn subset(&self, indices: &[usize]) -> Result<Self, StatsError> {
        for &i in indices {
            if i >= self.predictor_count() {
                return Err(StatsError::DomainError {
                    message: format!("predictor index {i} out of range"),
                });
            }
        }
        let names = indices
            .iter()
            .map(|&i| self.predictor_names[i].clone())
            .collect();
        let rows = self
            .rows
            .iter()
            .map(|(xs, y)| (indices.iter().map(|&i| xs[i]).collect(), *y))
            .collect();
        RegressionSpec::new(self.output_name.clone(), names, rows)
    }
}

/// One fitted term: point estimate with standard error and Student-t
/// inference.
#[derive(Debug, Clone)]
pub struct Coefficient {
    pub name: String,
    pub estimate: f64,
    pub std_error: f64,
    pub t_statistic: f64,
    pub p_value: f64,
}

/// Full OLS fit for one output.
#[derive(Debug, Clone)]
pub struct RegressionFit {
    pub output_name: String,
    pub intercept: Coefficient,
    pub coefficients: Vec<Coefficient>,
    pub r_squared: f64,
    pub adj_r_squared: f64,
    pub n_obs: usize,
    pub dof_residual: usize,
}

/// Least-squares core shared by the full fit and the R^2-only path.
struct LsSolution {
    beta: Vec<f64>,
    rss: f64,
    tss: f64,
    /// Diagonal of (X'X)^-1, intercept first.
    xtx_inv_diag: Vec<f64>,
}

/// Householder QR on the intercept-augmented design; returns estimates,
/// residual and total sums of squares, and the covariance diagonal.
fn solve_least_squares(
    predictor_columns: &[Vec<f64>],
    response: &[f64],
    column_names: impl Fn(usize) -> String,
) -> Result<LsSolution, StatsError> {
    let n = response.len();
    let p = predictor_columns.len() + 1;
    debug_assert!(n > p, "caller enforces n >= k + 2");

    // Column-major working copy, intercept first.
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(p);
    cols.push(vec![1.0; n]);
    for c in predictor_columns {
        cols.push(c.clone());
    }
    let mut qty: Vec<f64> = response.to_vec();

    let max_norm = cols
        .iter()
        .map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt())
        .fold(0.0_f64, f64::max);
    let tol = RANK_TOL * max_norm.max(1.0);

    // R overwrites the top p x p of the working columns.
    for j in 0..p {
        let norm = cols[j][j..].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm <= tol {
            return Err(StatsError::SingularDesign {
                column: column_names(j),
            });
        }
        let alpha = if cols[j][j] >= 0.0 { -norm } else { norm };
        // Householder vector v = x - alpha e1, applied as H = I - 2vv'/v'v.
        let mut v: Vec<f64> = cols[j][j..].to_vec();
        v[0] -= alpha;
        let vtv: f64 = v.iter().map(|x| x * x).sum();
        if vtv > 0.0 {
            for target in cols.iter_mut().skip(j + 1) {
                let dot: f64 = v.iter().zip(&target[j..]).map(|(a, b)| a * b).sum();
                let scale = 2.0 * dot / vtv;
                for (vi, ti) in v.iter().zip(target[j..].iter_mut()) {
                    *ti -= scale * vi;
                }
            }
            let dot: f64 = v.iter().zip(&qty[j..]).map(|(a, b)| a * b).sum();
            let scale = 2.0 * dot / vtv;
            for (vi, yi) in v.iter().zip(qty[j..].iter_mut()) {
                *yi -= scale * vi;
            }
        }
        cols[j][j] = alpha;
        for r in cols[j][j + 1..].iter_mut() {
            *r = 0.0;
        }
    }

    // Back-substitute R beta = (Q'y)[..p].
    let r = |i: usize, j: usize| cols[j][i];
    let mut beta = vec![0.0; p];
    for i in (0..p).rev() {
        let tail: f64 = (i + 1..p).map(|j| r(i, j) * beta[j]).sum();
        beta[i] = (qty[i] - tail) / r(i, i);
    }

    // RSS from the transformed response tail; TSS around the mean.
    let rss: f64 = qty[p..].iter().map(|v| v * v).sum();
    let mean = response.iter().sum::<f64>() / n as f64;
    let tss: f64 = response.iter().map(|y| (y - mean) * (y - mean)).sum();

    // diag of (X'X)^-1 = row sums of squares of R^-1.
    let mut r_inv = vec![vec![0.0; p]; p];
    for j in (0..p).rev() {
        r_inv[j][j] = 1.0 / r(j, j);
        for i in (0..j).rev() {
            let acc: f64 = (i + 1..=j).map(|m| r(i, m) * r_inv[m][j]).sum();
            r_inv[i][j] = -acc / r(i, i);
        }
    }
    let xtx_inv_diag: Vec<f64> = (0..p)
        .map(|i| r_inv[i][i..].iter().map(|v| v * v).sum())
        .collect();

    Ok(LsSolution {
        beta,
        rss,
        tss,
        xtx_inv_diag,
    })
}

fn degenerate_tss(response: &[f64], tss: f64) -> bool {
    let scale = response.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    tss <= (scale * 1.0e-12).powi(2) * response.len() as f64
}

/// Fits response on intercept + predictors, minimizing the residual sum of
/// squares.
///
/// Standard errors use the unbiased residual variance s^2 = RSS/(n-k-1);
/// p-values are two-sided Student-t with n-k-1 degrees of freedom. A
/// rank-deficient design (constant or collinear predictor) is
/// `SingularDesign`; a zero-variance response is `DegenerateResponse`.
pub fn fit_ols(spec: &RegressionSpec) -> Result<RegressionFit, StatsError> {
    let n = spec.n_obs();
    let k = spec.predictor_count();

    let mut columns: Vec<Vec<f64>> = vec![Vec::with_capacity(n); k];
    let mut response: Vec<f64> = Vec::with_capacity(n);
    for (xs, y) in spec.rows() {
        for (j, x) in xs.iter().enumerate() {
            columns[j].push(*x);
        }
        response.push(*y);
    }

    let names = |j: usize| {
        if j == 0 {
            "(Intercept)".to_string()
        } else {
            spec.predictor_names()[j - 1].clone()
        }
    };
    let sol = solve_least_squares(&columns, &response, names)?;

    if degenerate_tss(&response, sol.tss) {
        return Err(StatsError::DegenerateResponse);
    }

    let dof = n - k - 1;
    let s2 = sol.rss / dof as f64;
    let r_squared = (1.0 - sol.rss / sol.tss).clamp(0.0, 1.0);
    let adj_r_squared = super::adjusted_r2(r_squared, n, k)?;

    let coefficient = |j: usize, name: String| -> Result<Coefficient, StatsError> {
        let estimate = sol.beta[j];
        let std_error = (s2 * sol.xtx_inv_diag[j]).sqrt();
        let (t_statistic, p_value) = if std_error > 0.0 {
            let t = estimate / std_error;
            (t, t_pvalue(t, dof)?)
        } else if estimate == 0.0 {
            (0.0, 1.0)
        } else {
            // Exact fit: the estimate is certain.
            (f64::INFINITY * estimate.signum(), 0.0)
        };
        Ok(Coefficient {
            name,
            estimate,
            std_error,
            t_statistic,
            p_value,
        })
    };

    let intercept = coefficient(0, "(Intercept)".to_string())?;
    let coefficients = spec
        .predictor_names()
        .iter()
        .enumerate()
        .map(|(i, name)| coefficient(i + 1, name.clone()))
        .collect::<Result<Vec<_>, _>>()?;

    Ok(RegressionFit {
        output_name: spec.output_name().to_string(),
        intercept,
        coefficients,
        r_squared,
        adj_r_squared,
        n_obs: n,
        dof_residual: dof,
    })
}

/// R^2 of the fit restricted to the given predictor indices; the empty
/// subset is the intercept-only model with R^2 = 0.
pub fn subset_r_squared(spec: &RegressionSpec, indices: &[usize]) -> Result<f64, StatsError> {
    let mut idx: Vec<usize> = indices.to_vec();
    idx.sort_unstable();
    idx.dedup();
    if idx.len() != indices.len() {
        return Err(StatsError::DomainError {
            message: "subset indices must be distinct".into(),
        });
    }
    if idx.is_empty() {
        return Ok(0.0);
    }
    for &i in &idx {
        if i >= spec.predictor_count() {
            return Err(StatsError::DomainError {
                message: format!("predictor index {i} out of range"),
            });
        }
    }

    let n = spec.n_obs();
    let mut columns: Vec<Vec<f64>> = vec![Vec::with_capacity(n); idx.len()];
    let mut response: Vec<f64> = Vec::with_capacity(n);
    for (xs, y) in spec.rows() {
        for (slot, &i) in idx.iter().enumerate() {
            columns[slot].push(xs[i]);
        }
        response.push(*y);
    }
    let names = |j: usize| {
        if j == 0 {
            "(Intercept)".to_string()
        } else {
            spec.predictor_names()[idx[j - 1]].clone()
        }
    };
    let sol = solve_least_squares(&columns, &response, names)?;
    if degenerate_tss(&response, sol.tss) {
        return Err(StatsError::DegenerateResponse);
    }
    Ok((1.0 - sol.rss / sol.tss).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn spec(rows: Vec<(Vec<f64>, f64)>) -> RegressionSpec {
        RegressionSpec::new("y", vec!["x1".into(), "x2".into()], rows).unwrap()
    }

    #[test]
    fn exactly_linear_data_recovers_plane() {
        let fit = fit_ols(&spec(vec![
            (vec![1.0, 0.0], 3.0),
            (vec![0.0, 1.0], 5.0),
            (vec![1.0, 1.0], 8.0),
            (vec![0.0, 0.0], 0.0),
        ]))
        .unwrap();
        assert_abs_diff_eq!(fit.intercept.estimate, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.coefficients[0].estimate, 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.coefficients[1].estimate, 5.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.r_squared, 1.0, epsilon = 1e-14);
        assert_eq!(fit.adj_r_squared, 1.0);
        // Exact fit: standard errors collapse to rounding dust and the
        // coefficients are certain.
        assert!(fit.coefficients[0].std_error < 1e-12);
        assert!(fit.coefficients[0].p_value < 1e-12);
    }

    #[test]
    fn constant_response_is_degenerate() {
        let err = fit_ols(&spec(vec![
            (vec![1.0, 0.0], 2.0),
            (vec![0.0, 1.0], 2.0),
            (vec![1.0, 1.0], 2.0),
            (vec![0.0, 2.0], 2.0),
        ]))
        .unwrap_err();
        assert!(matches!(err, StatsError::DegenerateResponse));
    }

    #[test]
    fn constant_predictor_is_singular() {
        let err = fit_ols(&spec(vec![
            (vec![2.0, 0.0], 1.0),
            (vec![2.0, 1.0], 2.0),
            (vec![2.0, 2.0], 3.5),
            (vec![2.0, 3.0], 4.0),
        ]))
        .unwrap_err();
        assert!(matches!(err, StatsError::SingularDesign { ref column } if column == "x1"));
    }

    #[test]
    fn collinear_predictors_are_singular() {
        let rows: Vec<(Vec<f64>, f64)> = (0..6)
            .map(|i| {
                let x = i as f64;
                (vec![x, 2.0 * x], 1.0 + x)
            })
            .collect();
        let err = fit_ols(&spec(rows)).unwrap_err();
        assert!(matches!(err, StatsError::SingularDesign { .. }));
    }

    #[test]
    fn too_few_rows_rejected_at_construction() {
        let err = RegressionSpec::new(
            "y",
            vec!["x1".into(), "x2".into()],
            vec![(vec![1.0, 2.0], 1.0), (vec![2.0, 1.0], 2.0), (vec![3.0, 3.0], 3.0)],
        )
        .unwrap_err();
        assert!(matches!(err, StatsError::InsufficientRows { needed: 4, got: 3 }));
    }

    /// Independent normal-equations oracle with explicit 3x3 inversion.
    fn normal_equations_oracle(rows: &[(Vec<f64>, f64)]) -> (Vec<f64>, Vec<f64>) {
        let n = rows.len();
        let p = 3;
        let mut xtx = [[0.0_f64; 3]; 3];
        let mut xty = [0.0_f64; 3];
        for (xs, y) in rows {
            let full = [1.0, xs[0], xs[1]];
            for i in 0..p {
                for j in 0..p {
                    xtx[i][j] += full[i] * full[j];
                }
                xty[i] += full[i] * y;
            }
        }
        // Explicit inverse via cofactors.
        let m = &xtx;
        let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
        let mut inv = [[0.0_f64; 3]; 3];
        inv[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) / det;
        inv[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / det;
        inv[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / det;
        inv[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) / det;
        inv[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / det;
        inv[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / det;
        inv[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) / det;
        inv[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / det;
        inv[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / det;

        let beta: Vec<f64> = (0..p)
            .map(|i| (0..p).map(|j| inv[i][j] * xty[j]).sum())
            .collect();
        let rss: f64 = rows
            .iter()
            .map(|(xs, y)| {
                let pred = beta[0] + beta[1] * xs[0] + beta[2] * xs[1];
                (y - pred) * (y - pred)
            })
            .sum();
        let s2 = rss / (n - p) as f64;
        let se: Vec<f64> = (0..p).map(|i| (s2 * inv[i][i]).sqrt()).collect();
        (beta, se)
    }

    #[test]
    fn matches_normal_equations_oracle_on_noisy_data() {
        // Deterministic pseudo-noise; 20 rows.
        let rows: Vec<(Vec<f64>, f64)> = (0..20)
            .map(|i| {
                let x1 = (i as f64 * 0.7).sin() * 4.0 + i as f64 * 0.3;
                let x2 = (i as f64 * 1.3).cos() * 2.0 + 5.0;
                let noise = ((i * 2654435761_usize) % 1000) as f64 / 1000.0 - 0.5;
                (vec![x1, x2], 2.0 + 1.5 * x1 - 0.8 * x2 + noise)
            })
            .collect();
        let (beta, se) = normal_equations_oracle(&rows);
        let fit = fit_ols(&spec(rows)).unwrap();
        let scale = beta[0].abs().max(beta[1].abs()).max(beta[2].abs());
        assert_abs_diff_eq!(fit.intercept.estimate, beta[0], epsilon = 1e-9 * scale);
        assert_abs_diff_eq!(fit.coefficients[0].estimate, beta[1], epsilon = 1e-9 * scale);
        assert_abs_diff_eq!(fit.coefficients[1].estimate, beta[2], epsilon = 1e-9 * scale);
        assert_abs_diff_eq!(fit.intercept.std_error, se[0], epsilon = 1e-8 * se[0]);
        assert_abs_diff_eq!(fit.coefficients[0].std_error, se[1], epsilon = 1e-8 * se[1]);
        assert_abs_diff_eq!(fit.coefficients[1].std_error, se[2], epsilon = 1e-8 * se[2]);
    }

    #[test]
    fn subset_r_squared_consistency() {
        let s = spec(vec![
            (vec![1.0, 1.0], 3.0),
            (vec![-1.0, 1.0], 1.0),
            (vec![1.0, -1.0], -1.0),
            (vec![-1.0, -1.0], -3.0),
        ]);
        assert_eq!(subset_r_squared(&s, &[]).unwrap(), 0.0);
        let full = fit_ols(&s).unwrap().r_squared;
        assert_abs_diff_eq!(subset_r_squared(&s, &[0, 1]).unwrap(), full, epsilon = 1e-14);
        assert_abs_diff_eq!(subset_r_squared(&s, &[0]).unwrap(), 0.2, epsilon = 1e-14);
        assert_abs_diff_eq!(subset_r_squared(&s, &[1]).unwrap(), 0.8, epsilon = 1e-14);
    }
}
