//! Rank statistics for validating a score against human labels.

use super::MetricError;

/// 1-based ranks with ties assigned their average rank.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        // positions i..j (0-based) share ranks i+1..=j
        let avg = (i + 1 + j) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = avg;
        }
        i = j;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> Result<f64, MetricError> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(MetricError::ConstantInput);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Spearman's rank correlation (Pearson correlation of average-tie ranks).
pub fn spearman_rho(x: &[f64], y: &[f64]) -> Result<f64, MetricError> {
    if x.len() != y.len() {
        return Err(MetricError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 3 {
        return Err(MetricError::TooFewSamples(x.len()));
    }
    if x.iter().chain(y).any(|v| v.is_nan()) {
        return Err(MetricError::NonFinite);
    }
    pearson(&average_ranks(x), &average_ranks(y))
}

/// Area under the ROC curve, `P(pos > neg) + 0.5 P(pos == neg)`.
///
/// Computed from the rank sum of the positives (Mann-Whitney U).
pub fn roc_auc(scores: &[f64], labels: &[bool]) -> Result<f64, MetricError> {
    if scores.len() != labels.len() {
        return Err(MetricError::LengthMismatch(scores.len(), labels.len()));
    }
    if scores.iter().any(|v| v.is_nan()) {
        return Err(MetricError::NonFinite);
    }
    let n_pos = labels.iter().filter(|&&l| l).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(MetricError::SingleClass);
    }
    let ranks = average_ranks(scores);
    let rank_sum: f64 = ranks.iter().zip(labels).filter(|(_, &l)| l).map(|(r, _)| r).sum();
    let u = rank_sum - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Ok(u / (n_pos as f64 * n_neg as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // Brute-force pairwise comparison.
    fn auc_oracle(scores: &[f64], labels: &[bool]) -> f64 {
        let (mut wins, mut pairs) = (0.0, 0.0);
        for (i, &si) in scores.iter().enumerate() {
            for (j, &sj) in scores.iter().enumerate() {
                if labels[i] && !labels[j] {
                    pairs += 1.0;
                    if si > sj {
                        wins += 1.0;
                    } else if si == sj {
                        wins += 0.5;
                    }
                }
            }
        }
        wins / pairs
    }

    #[test]
    fn ranks_with_ties() {
        assert_eq!(average_ranks(&[1.0, 2.0, 2.0, 3.0]), vec![1.0, 2.5, 2.5, 4.0]);
        assert_eq!(average_ranks(&[5.0, 5.0, 5.0]), vec![2.0, 2.0, 2.0]);
        assert_eq!(average_ranks(&[3.0, 1.0, 2.0]), vec![3.0, 1.0, 2.0]);
    }

    #[test]
    fn spearman_monotone_cases() {
        let x = [0.1, 0.5, 0.7, 2.0, 9.0];
        let up = [1.0, 2.0, 3.0, 10.0, 11.0];
        let down = [5.0, 4.0, 3.0, 2.0, 1.0];
        assert!((spearman_rho(&x, &up).unwrap() - 1.0).abs() < 1e-12);
        assert!((spearman_rho(&x, &down).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn spearman_tied_hand_case() {
        // ranks x = [1, 2.5, 2.5, 4], y = [1, 3, 2, 4]; centred at 2.5:
        // dx = [-1.5, 0, 0, 1.5], dy = [-1.5, 0.5, -0.5, 1.5]
        let sxy: f64 = 1.5 * 1.5 * 2.0;
        let sxx: f64 = 1.5 * 1.5 * 2.0;
        let syy = 1.5 * 1.5 * 2.0 + 0.25 * 2.0;
        let expect = sxy / (sxx * syy).sqrt();
        let got = spearman_rho(&[1.0, 2.0, 2.0, 3.0], &[1.0, 3.0, 2.0, 4.0]).unwrap();
        assert!((got - expect).abs() < 1e-12);
        assert!((got - 0.9f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn spearman_errors() {
        assert!(matches!(spearman_rho(&[1.0, 2.0, 3.0], &[1.0, 2.0]), Err(MetricError::LengthMismatch(3, 2))));
        assert!(matches!(spearman_rho(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]), Err(MetricError::ConstantInput)));
        assert!(matches!(spearman_rho(&[1.0, 2.0], &[1.0, 2.0]), Err(MetricError::TooFewSamples(2))));
    }

    #[test]
    fn auc_cases() {
        assert_eq!(roc_auc(&[0.1, 0.2, 0.8, 0.9], &[false, false, true, true]).unwrap(), 1.0);
        assert_eq!(roc_auc(&[0.1, 0.2, 0.8, 0.9], &[true, true, false, false]).unwrap(), 0.0);
        assert_eq!(roc_auc(&[0.4; 6], &[true, false, true, false, false, true]).unwrap(), 0.5);
        assert!(matches!(roc_auc(&[0.1, 0.2], &[true, true]), Err(MetricError::SingleClass)));
    }

    proptest! {
        #[test]
        fn auc_matches_pairwise_oracle(data in proptest::collection::vec((0u8..6, any::<bool>()), 2..60)) {
            let scores: Vec<f64> = data.iter().map(|(s, _)| *s as f64).collect();
            let labels: Vec<bool> = data.iter().map(|(_, l)| *l).collect();
            if labels.iter().any(|&l| l) && labels.iter().any(|&l| !l) {
                prop_assert!((roc_auc(&scores, &labels).unwrap() - auc_oracle(&scores, &labels)).abs() < 1e-12);
            }
        }

        #[test]
        fn spearman_monotone_invariance(x in proptest::collection::vec(-100.0f64..100.0, 3..40),
                                        y_seed in proptest::collection::vec(-100.0f64..100.0, 40)) {
            let y = &y_seed[..x.len()];
            if let Ok(base) = spearman_rho(&x, y) {
                let tx: Vec<f64> = x.iter().map(|v| (v / 50.0).exp()).collect();
                let ty: Vec<f64> = y.iter().map(|v| v * v * v - 7.0).collect();
                prop_assert!((spearman_rho(&tx, &ty).unwrap() - base).abs() < 1e-12);
            }
        }
    }
}
