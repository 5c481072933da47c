//! Relative importance of predictors by the lmg method: each predictor's
//! incremental R^2 averaged over all orderings in which it can enter the
//! model. Computed by subset enumeration with Shapley weights rather than
//! brute-force ordering enumeration, exact for any predictor count up to
//! [`MAX_PREDICTORS`].

use crate::stats::{subset_r_squared, RegressionSpec, StatsError};

/// Subset enumeration walks 2^k fits; beyond this the decomposition is
/// refused rather than approximated.
pub const MAX_PREDICTORS: usize = 12;

/// One predictor's share of explained variance.
#[derive(Debug, Clone)]
pub struct PredictorShare {
    pub name: String,
    pub share: f64,
}

/// lmg decomposition of a fitted model's R^2. Shares are raw proportions
/// of variance: they sum to the full-model R^2, not to 1.
#[derive(Debug, Clone)]
pub struct RelativeImportance {
    pub output_name: String,
    pub shares: Vec<PredictorShare>,
    pub total_r2: f64,
}

/// R^2 of the model restricted to `subset` (plus intercept). The empty
/// subset is the intercept-only model with R^2 = 0.
pub fn subset_r2(spec: &RegressionSpec, subset: &[usize]) -> Result<f64, StatsError> {
    subset_r_squared(spec, subset)
}

/// Ordering-averaged incremental R^2 for every predictor.
///
/// share_j = sum over subsets S not containing j of
///   |S|! (k - |S| - 1)! / k! * (R^2(S + j) - R^2(S))
pub fn lmg(spec: &RegressionSpec) -> Result<RelativeImportance, StatsError> {
    let k = spec.predictor_count();
    if k > MAX_PREDICTORS {
        return Err(StatsError::TooManyPredictors {
            count: k,
            max: MAX_PREDICTORS,
        });
    }

    // R^2 for every predictor subset, indexed by bitmask.
    let mut r2 = vec![0.0_f64; 1 << k];
    let mut indices = Vec::with_capacity(k);
    for (mask, slot) in r2.iter_mut().enumerate().skip(1) {
        indices.clear();
        indices.extend((0..k).filter(|&j| mask & (1 << j) != 0));
        *slot = subset_r_squared(spec, &indices)?;
    }

    // factorial[s] as f64; exact for s <= 12.
    let mut factorial = vec![1.0_f64; k + 1];
    for s in 1..=k {
        factorial[s] = factorial[s - 1] * s as f64;
    }

    let shares = (0..k)
        .map(|j| {
            let bit = 1usize << j;
            let mut share = 0.0;
            for mask in 0..(1usize << k) {
                if mask & bit != 0 {
                    continue;
                }
                let s = mask.count_ones() as usize;
                let weight = factorial[s] * factorial[k - s - 1] / factorial[k];
                share += weight * (r2[mask | bit] - r2[mask]);
            }
            PredictorShare {
                name: spec.predictor_names()[j].clone(),
                // Increments are nonnegative analytically; clip rounding dust.
                share: share.max(0.0),
            }
        })
        .collect();

    Ok(RelativeImportance {
        output_name: spec.output_name().to_string(),
        shares,
        total_r2: r2[(1 << k) - 1],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn orthogonal_fixture() -> RegressionSpec {
        // y = x1 + 2 x2 over a balanced +-1 design.
        RegressionSpec::new(
            "y",
            vec!["x1".into(), "x2".into()],
            vec![
                (vec![1.0, 1.0], 3.0),
                (vec![-1.0, 1.0], 1.0),
                (vec![1.0, -1.0], -1.0),
                (vec![-1.0, -1.0], -3.0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn orthogonal_fixture_shares() {
        let spec = orthogonal_fixture();
        assert_eq!(subset_r2(&spec, &[]).unwrap(), 0.0);
        assert_abs_diff_eq!(subset_r2(&spec, &[0]).unwrap(), 0.2, epsilon = 1e-14);
        assert_abs_diff_eq!(subset_r2(&spec, &[1]).unwrap(), 0.8, epsilon = 1e-14);
        assert_abs_diff_eq!(subset_r2(&spec, &[0, 1]).unwrap(), 1.0, epsilon = 1e-14);

        let imp = lmg(&spec).unwrap();
        assert_abs_diff_eq!(imp.shares[0].share, 0.2, epsilon = 1e-12);
        assert_abs_diff_eq!(imp.shares[1].share, 0.8, epsilon = 1e-12);
        assert_abs_diff_eq!(imp.total_r2, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn single_predictor_share_is_full_r2() {
        let spec = RegressionSpec::new(
            "y",
            vec!["x".into()],
            vec![
                (vec![1.0], 2.1),
                (vec![2.0], 3.9),
                (vec![3.0], 6.2),
                (vec![4.0], 7.8),
                (vec![5.0], 10.1),
            ],
        )
        .unwrap();
        let imp = lmg(&spec).unwrap();
        assert_abs_diff_eq!(imp.shares[0].share, imp.total_r2, epsilon = 1e-14);
    }

    #[test]
    fn two_predictor_direct_formula() {
        // share_1 = 1/2 R^2({1}) + 1/2 (R^2({1,2}) - R^2({2}))
        let spec = RegressionSpec::new(
            "y",
            vec!["a".into(), "b".into()],
            vec![
                (vec![0.3, 1.9], 4.2),
                (vec![1.1, 0.4], 2.0),
                (vec![2.2, 2.8], 8.1),
                (vec![3.1, 1.2], 5.2),
                (vec![4.3, 3.3], 10.9),
                (vec![5.0, 0.7], 5.1),
            ],
        )
        .unwrap();
        let r_a = subset_r2(&spec, &[0]).unwrap();
        let r_b = subset_r2(&spec, &[1]).unwrap();
        let r_ab = subset_r2(&spec, &[0, 1]).unwrap();
        let imp = lmg(&spec).unwrap();
        assert_abs_diff_eq!(
            imp.shares[0].share,
            0.5 * r_a + 0.5 * (r_ab - r_b),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            imp.shares[1].share,
            0.5 * r_b + 0.5 * (r_ab - r_a),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(imp.shares[0].share + imp.shares[1].share, r_ab, epsilon = 1e-12);
    }

    #[test]
    fn duplicate_subset_indices_rejected() {
        let spec = orthogonal_fixture();
        assert!(subset_r2(&spec, &[0, 0]).is_err());
        assert!(subset_r2(&spec, &[7]).is_err());
    }

    #[test]
    fn too_many_predictors_refused() {
        let k = MAX_PREDICTORS + 1;
        let names: Vec<String> = (0..k).map(|i| format!("x{i}")).collect();
        let rows: Vec<(Vec<f64>, f64)> = (0..k + 2)
            .map(|i| {
                let xs: Vec<f64> = (0..k).map(|j| ((i * (j + 3)) % 7) as f64).collect();
                (xs, i as f64)
            })
            .collect();
        let spec = RegressionSpec::new("y", names, rows).unwrap();
        assert!(matches!(
            lmg(&spec).unwrap_err(),
            StatsError::TooManyPredictors { count, max: MAX_PREDICTORS } if count == k
        ));
    }

    #[test]
    fn collinearity_propagates_as_singular_design() {
        let rows: Vec<(Vec<f64>, f64)> = (0..6)
            .map(|i| {
                let x = i as f64;
                (vec![x, 3.0 * x], x + 1.0)
            })
            .collect();
        let spec = RegressionSpec::new("y", vec!["a".into(), "b".into()], rows).unwrap();
        assert!(matches!(
            lmg(&spec).unwrap_err(),
            StatsError::SingularDesign { .. }
        ));
    }
}
