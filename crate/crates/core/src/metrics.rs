//! Held-out evaluation: MSE, AUC and Harrell's C-index, plus seeded splits.

use crate::data::{Dataset, Outcome};
use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use crate::scorecard::ScoreCard;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Mse,
    Auc,
    CIndex,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::Mse => "MSE",
            Metric::Auc => "AUC",
            Metric::CIndex => "C-index",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub metric: Metric,
    pub value: f64,
    pub n_samples: usize,
    pub rule_count: Option<usize>,
}

pub fn mse(targets: &[f64], predictions: &[f64]) -> Result<f64> {
    if targets.is_empty() {
        return Err(Error::Metric("MSE of an empty sample".into()));
    }
    if targets.len() != predictions.len() {
        return Err(Error::Metric(format!(
            "{} targets for {} predictions",
            targets.len(),
            predictions.len()
        )));
    }
    let sse: f64 = targets
        .iter()
        .zip(predictions)
        .map(|(y, p)| (y - p) * (y - p))
        .sum();
    Ok(sse / targets.len() as f64)
}

/// Mann-Whitney AUC with ties counted as one half, via mid-ranks.
pub fn auc(labels: &[bool], scores: &[f64]) -> Result<f64> {
    if labels.len() != scores.len() {
        return Err(Error::Metric(format!(
            "{} labels for {} scores",
            labels.len(),
            scores.len()
        )));
    }
    let n_pos = labels.iter().filter(|&&l| l).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::Metric("AUC needs both classes present".into()));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    // twice the rank sum of positives keeps mid-ranks integral
    let mut twice_rank_sum: u64 = 0;
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && scores[order[end]] == scores[order[start]] {
            end += 1;
        }
        // ranks start+1 ..= end, mid-rank (start + 1 + end) / 2
        let twice_mid = (start + 1 + end) as u64;
        let pos_in_group = order[start..end].iter().filter(|&&i| labels[i]).count() as u64;
        twice_rank_sum += twice_mid * pos_in_group;
        start = end;
    }
    let n_pos = n_pos as u64;
    // 2U = 2R - n_pos (n_pos + 1)
    let twice_u = twice_rank_sum - n_pos * (n_pos + 1);
    Ok(twice_u as f64 / (2 * n_pos * n_neg as u64) as f64)
}

/// Harrell's concordance: over pairs with an observed event for `i` strictly
/// before `times[j]`, the earlier subject should carry the higher risk score.
pub fn c_index(times: &[f64], events: &[bool], scores: &[f64]) -> Result<f64> {
    if times.len() != events.len() || times.len() != scores.len() {
        return Err(Error::Metric("times, events and scores differ in length".into()));
    }
    let mut twice_concordant: u64 = 0;
    let mut pairs: u64 = 0;
    for i in 0..times.len() {
        if !events[i] {
            continue;
        }
        for j in 0..times.len() {
            if times[i] < times[j] {
                pairs += 1;
                if scores[i] > scores[j] {
                    twice_concordant += 2;
                } else if scores[i] == scores[j] {
                    twice_concordant += 1;
                }
            }
        }
    }
    if pairs == 0 {
        return Err(Error::Metric("C-index needs at least one comparable pair".into()));
    }
    Ok(twice_concordant as f64 / (2 * pairs) as f64)
}

/// Objective-appropriate metric of `card` on a labeled dataset.
pub fn evaluate(card: &ScoreCard, dataset: &Dataset) -> Result<EvalReport> {
    card.objective.ensure_matches(&dataset.outcome)?;
    let scores = card.predict(&dataset.features)?;
    let (metric, value) = match &dataset.outcome {
        Outcome::Continuous(y) => (Metric::Mse, mse(y, &scores)?),
        Outcome::Binary(y) => (Metric::Auc, auc(y, &scores)?),
        Outcome::Survival { times, events } => (Metric::CIndex, c_index(times, events, &scores)?),
    };
    Ok(EvalReport {
        metric,
        value,
        n_samples: dataset.n_rows(),
        rule_count: Some(card.count_rules()),
    })
}

/// Seeded train/test partition without replacement. Both parts keep the
/// original row order.
pub fn split(dataset: &Dataset, test_frac: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    if !(test_frac > 0.0 && test_frac < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "test fraction must lie in (0, 1), got {test_frac}"
        )));
    }
    let n = dataset.n_rows();
    let n_test = (test_frac * n as f64).round() as usize;
    if n_test == 0 || n_test == n {
        return Err(Error::InvalidConfig(format!(
            "a {test_frac} test fraction of {n} rows leaves an empty part"
        )));
    }
    let perm = SplitMix64::new(seed).permutation(n);
    let mut test = perm[..n_test].to_vec();
    let mut train = perm[n_test..].to_vec();
    test.sort_unstable();
    train.sort_unstable();
    Ok((dataset.select_rows(&train), dataset.select_rows(&test)))
}

pub fn mean_and_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Features;

    #[test]
    fn mse_basics() {
        assert_eq!(mse(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(mse(&[0.0, 2.0], &[1.0, 1.0]).unwrap(), 1.0);
        assert!(mse(&[], &[]).is_err());
    }

    #[test]
    fn auc_basics() {
        let labels = [false, false, true, true];
        assert_eq!(auc(&labels, &[0.1, 0.2, 0.8, 0.9]).unwrap(), 1.0);
        assert_eq!(auc(&labels, &[0.5; 4]).unwrap(), 0.5);
        assert_eq!(auc(&labels, &[0.9, 0.8, 0.2, 0.1]).unwrap(), 0.0);
        // one tie across classes out of four pairs
        assert_eq!(auc(&labels, &[0.1, 0.5, 0.5, 0.9]).unwrap(), 0.875);
        assert!(auc(&[true, true], &[0.1, 0.2]).is_err());
    }

    #[test]
    fn c_index_basics() {
        let times = [1.0, 2.0, 3.0, 4.0];
        let events = [true; 4];
        let risk: Vec<f64> = times.iter().map(|t| -t).collect();
        assert_eq!(c_index(&times, &events, &risk).unwrap(), 1.0);
        assert_eq!(c_index(&times, &events, &[0.0; 4]).unwrap(), 0.5);
        assert!(c_index(&times, &[false; 4], &risk).is_err());
    }

    fn rows(n: usize) -> Dataset {
        let x: Vec<f64> = (0..n).map(|i| i as f64).collect();
        Dataset::new(
            Features::new(vec!["x".into()], vec![x.clone()]).unwrap(),
            Outcome::Continuous(x),
        )
        .unwrap()
    }

    #[test]
    fn split_sizes_and_reproducibility() {
        let d = rows(10);
        let (train, test) = split(&d, 0.5, 3).unwrap();
        assert_eq!((train.n_rows(), test.n_rows()), (5, 5));
        let (train2, test2) = split(&d, 0.5, 3).unwrap();
        assert_eq!(train, train2);
        assert_eq!(test, test2);
        let mut all: Vec<f64> = train.features.column(0).to_vec();
        all.extend_from_slice(test.features.column(0));
        all.sort_by(f64::total_cmp);
        assert_eq!(all, d.features.column(0));
    }

    #[test]
    fn split_seeds_differ() {
        let d = rows(40);
        let a = split(&d, 0.3, 1).unwrap().1;
        let b = split(&d, 0.3, 2).unwrap().1;
        assert_ne!(a, b);
    }

    #[test]
    fn degenerate_splits_rejected() {
        assert!(split(&rows(2), 0.1, 0).is_err());
        assert!(split(&rows(10), 1.0, 0).is_err());
        assert!(split(&rows(10), 0.0, 0).is_err());
    }
}
