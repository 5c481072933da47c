//! Kendall tau-b rank correlation with tie correction.

use super::StatsError;

/// Tie-corrected Kendall rank correlation between paired samples.
///
/// tau_b = (P - Q) / sqrt((n0 - n1)(n0 - n2)) where P/Q count concordant
/// and discordant pairs, n0 = n(n-1)/2, and n1/n2 count tied pairs within
/// x and y. With no ties this reduces to (P - Q) / C(n, 2). Discordant
/// pairs are counted as merge-sort inversions, so the evaluation is
/// O(n log n).
pub fn kendall_tau(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let n = x.len();
    if n < 2 {
        return Err(StatsError::InsufficientRows { needed: 2, got: n });
    }
    if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
        return Err(StatsError::DomainError {
            message: "samples must be finite".into(),
        });
    }

    // Order by x, breaking ties by y, so discordant pairs become strict
    // descents in the y sequence.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]).then(y[a].total_cmp(&y[b])));

    let tied_x = tied_pairs(order.iter().map(|&i| x[i]));
    let tied_xy = tied_pair_runs(order.iter().map(|&i| (x[i], y[i])));

    let mut ys: Vec<f64> = order.iter().map(|&i| y[i]).collect();
    let discordant = count_inversions(&mut ys);
    // ys is now sorted; count y ties on it.
    let tied_y = tied_pairs(ys.iter().copied());

    let n0 = n as f64 * (n as f64 - 1.0) / 2.0;
    let denom = ((n0 - tied_x as f64) * (n0 - tied_y as f64)).sqrt();
    if denom == 0.0 {
        return Err(StatsError::DegenerateSample);
    }
    let concordant_minus_discordant =
        n0 - tied_x as f64 - tied_y as f64 + tied_xy as f64 - 2.0 * discordant as f64;
    Ok((concordant_minus_discordant / denom).clamp(-1.0, 1.0))
}

/// Number of within-run pairs, summed over maximal runs of equal values.
fn tied_pairs(values: impl Iterator<Item = f64>) -> u64 {
    run_pairs(values, |a, b| a == b)
}

fn tied_pair_runs(values: impl Iterator<Item = (f64, f64)>) -> u64 {
    run_pairs(values, |a, b| a == b)
}

fn run_pairs<T: Copy>(values: impl Iterator<Item = T>, eq: impl Fn(T, T) -> bool) -> u64 {
    let mut total = 0u64;
    let mut run = 0u64;
    let mut prev: Option<T> = None;
    for v in values {
        match prev {
            Some(p) if eq(p, v) => run += 1,
            _ => {
                total += run * (run + 1) / 2;
                run = 0;
            }
        }
        prev = Some(v);
    }
    total + run * (run + 1) / 2
}

/// Bottom-up merge sort, returning the number of strict inversions.
fn count_inversions(values: &mut [f64]) -> u64 {
    let n = values.len();
    let mut buf = vec![0.0; n];
    let mut swaps = 0u64;
    let mut width = 1;
    while width < n {
        let mut start = 0;
        while start + width < n {
            let mid = start + width;
            let end = (start + 2 * width).min(n);
            let (mut i, mut j, mut k) = (start, mid, start);
            while i < mid && j < end {
                // Take left on ties so equal values are not inversions.
                if values[j] < values[i] {
                    swaps += (mid - i) as u64;
                    buf[k] = values[j];
                    j += 1;
                } else {
                    buf[k] = values[i];
                    i += 1;
                }
                k += 1;
            }
            buf[k..k + (mid - i)].copy_from_slice(&values[i..mid]);
            let k = k + (mid - i);
            buf[k..k + (end - j)].copy_from_slice(&values[j..end]);
            values[start..end].copy_from_slice(&buf[start..end]);
            start += 2 * width;
        }
        width *= 2;
    }
    swaps
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn perfect_concordance() {
        assert_eq!(kendall_tau(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap(), 1.0);
    }

    #[test]
    fn perfect_discordance() {
        assert_eq!(kendall_tau(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap(), -1.0);
    }

    #[test]
    fn one_discordant_pair_of_three() {
        let tau = kendall_tau(&[1.0, 2.0, 3.0], &[1.0, 3.0, 2.0]).unwrap();
        assert_abs_diff_eq!(tau, 1.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn mismatched_lengths_rejected() {
        assert!(matches!(
            kendall_tau(&[1.0, 2.0], &[1.0]).unwrap_err(),
            StatsError::LengthMismatch { left: 2, right: 1 }
        ));
    }

    #[test]
    fn all_tied_side_is_degenerate() {
        assert!(matches!(
            kendall_tau(&[5.0, 5.0, 5.0], &[1.0, 2.0, 3.0]).unwrap_err(),
            StatsError::DegenerateSample
        ));
        assert!(matches!(
            kendall_tau(&[1.0, 2.0, 3.0], &[7.0, 7.0, 7.0]).unwrap_err(),
            StatsError::DegenerateSample
        ));
    }

    #[test]
    fn single_element_insufficient() {
        assert!(matches!(
            kendall_tau(&[1.0], &[1.0]).unwrap_err(),
            StatsError::InsufficientRows { needed: 2, got: 1 }
        ));
    }

    /// O(n^2) brute-force tau-b used as an independent cross-check.
    fn tau_b_bruteforce(x: &[f64], y: &[f64]) -> f64 {
        // f64::signum maps +-0.0 to +-1.0, so compare explicitly.
        fn sgn(d: f64) -> i32 {
            if d > 0.0 {
                1
            } else if d < 0.0 {
                -1
            } else {
                0
            }
        }
        let n = x.len();
        let (mut concordant, mut discordant) = (0i64, 0i64);
        let (mut tied_x_only, mut tied_y_only) = (0i64, 0i64);
        for i in 0..n {
            for j in i + 1..n {
                let dx = sgn(x[i] - x[j]);
                let dy = sgn(y[i] - y[j]);
                if dx == 0 && dy == 0 {
                    continue;
                } else if dx == 0 {
                    tied_x_only += 1;
                } else if dy == 0 {
                    tied_y_only += 1;
                } else if dx == dy {
                    concordant += 1;
                } else {
                    discordant += 1;
                }
            }
        }
        // n0 - n1 = pairs not tied in x; n0 - n2 = pairs not tied in y.
        let not_tied_x = (concordant + discordant + tied_y_only) as f64;
        let not_tied_y = (concordant + discordant + tied_x_only) as f64;
        (concordant - discordant) as f64 / (not_tied_x * not_tied_y).sqrt()
    }

    #[test]
    fn tie_corrected_value_matches_bruteforce() {
        let x = [12.0, 14.0, 14.0, 17.0, 19.0, 19.0, 19.0, 17.0, 21.0];
        let y = [1.0, 4.0, 4.0, 2.0, 0.0, 0.0, 3.0, 2.0, 5.0];
        let fast = kendall_tau(&x, &y).unwrap();
        let slow = tau_b_bruteforce(&x, &y);
        assert_abs_diff_eq!(fast, slow, epsilon = 1e-12);
    }

    #[test]
    fn published_tied_sample() {
        // Cross-checked against scipy.stats.kendalltau (variant="b").
        let x = [1.0, 1.0, 2.0, 2.0, 3.0, 3.0];
        let y = [1.0, 2.0, 2.0, 3.0, 3.0, 4.0];
        assert_abs_diff_eq!(
            kendall_tau(&x, &y).unwrap(),
            0.8006407690254358,
            epsilon = 1e-12
        );
    }
}
