//! Gradient boosting restricted to single-threshold decision stumps.

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Features, Outcome, ThresholdPlan};
use crate::error::{Error, Result};
use crate::losses::{GradientBundle, LossState, Objective, PROB_CLAMP};
use crate::rng::SplitMix64;

/// Floor on the per-leaf hessian sum.
pub const NEWTON_FLOOR: f64 = 1e-12;

/// A one-split rule: `left_value` when `x[feature] < threshold`, otherwise
/// `right_value`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stump {
    pub feature: usize,
    pub threshold: f64,
    #[serde(rename = "left")]
    pub left_value: f64,
    #[serde(rename = "right")]
    pub right_value: f64,
}

impl Stump {
    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        if x < self.threshold {
            self.left_value
        } else {
            self.right_value
        }
    }

    pub fn scaled(self, factor: f64) -> Self {
        Self {
            left_value: factor * self.left_value,
            right_value: factor * self.right_value,
            ..self
        }
    }
}

/// Raw boosting output. Stump values already include the learning rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StumpEnsemble {
    pub intercept: f64,
    pub stumps: Vec<Stump>,
    pub objective: Objective,
    pub learning_rate: f64,
    pub feature_names: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitConfig {
    pub n_iter: usize,
    pub learning_rate: f64,
    pub n_quantiles: usize,
    pub subsample: f64,
    pub seed: u64,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            n_iter: 500,
            learning_rate: 0.05,
            n_quantiles: 4,
            subsample: 1.0,
            seed: 0,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "learning rate must lie in (0, 1], got {}",
                self.learning_rate
            )));
        }
        if !(self.subsample > 0.0 && self.subsample <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "subsample must lie in (0, 1], got {}",
                self.subsample
            )));
        }
        if self.n_quantiles == 0 {
            return Err(Error::InvalidConfig("n_quantiles must be at least 1".into()));
        }
        Ok(())
    }
}

/// Base score before any stump: the target mean, the clamped log-odds of the
/// event rate, or 0 for the (translation-invariant) ranking loss.
pub fn initial_score(outcome: &Outcome) -> f64 {
    match outcome {
        Outcome::Continuous(y) => y.iter().sum::<f64>() / y.len() as f64,
        Outcome::Binary(y) => {
            let positives = y.iter().filter(|&&v| v).count();
            let rate = (positives as f64 / y.len() as f64).clamp(PROB_CLAMP, 1.0 - PROB_CLAMP);
            (rate / (1.0 - rate)).ln()
        }
        Outcome::Survival { .. } => 0.0,
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Side {
    grad: f64,
    hess: f64,
    count: usize,
}

impl Side {
    #[inline]
    fn add(&mut self, g: f64, w: f64) {
        self.grad += g;
        self.hess += w;
        self.count += 1;
    }

    fn leaf(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            self.grad / self.hess.max(NEWTON_FLOOR)
        }
    }

    fn gain(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            self.grad * self.grad / self.hess.max(NEWTON_FLOOR)
        }
    }
}

/// Exhaustive search over every `(feature, cutoff)` in `plan`, scored by
/// `(sum g)^2 / sum w` over both sides. Ties keep the lowest feature index,
/// then the smallest cutoff. Leaf values are unscaled.
///
/// Each side's sums accumulate `active_rows` in the given order, so two
/// candidates that induce the same partition score identically.
pub fn fit_stump(
    features: &Features,
    plan: &ThresholdPlan,
    grads: &GradientBundle,
    active_rows: &[usize],
) -> Result<Stump> {
    if plan.n_features() != features.n_features() {
        return Err(Error::FeatureMismatch(format!(
            "threshold plan covers {} features, data has {}",
            plan.n_features(),
            features.n_features()
        )));
    }
    if active_rows.is_empty() {
        return Err(Error::EmptyData("no active rows for split search"));
    }
    let g = &grads.pseudo_residuals;
    let w = &grads.hessian_weights;
    let mut best: Option<(f64, Stump)> = None;
    let mut left: Vec<Side> = Vec::new();
    let mut right: Vec<Side> = Vec::new();
    for feature in 0..features.n_features() {
        let cutoffs = plan.cutoffs(feature);
        if cutoffs.is_empty() {
            continue;
        }
        let column = features.column(feature);
        left.clear();
        left.resize(cutoffs.len(), Side::default());
        right.clear();
        right.resize(cutoffs.len(), Side::default());
        for &i in active_rows {
            let x = column[i];
            // cutoffs are ascending: x goes right of the first `bin` of them
            let bin = cutoffs.partition_point(|&c| c <= x);
            for side in &mut right[..bin] {
                side.add(g[i], w[i]);
            }
            for side in &mut left[bin..] {
                side.add(g[i], w[i]);
            }
        }
        for (k, &threshold) in cutoffs.iter().enumerate() {
            let gain = left[k].gain() + right[k].gain();
            if best.as_ref().map_or(true, |(b, _)| gain > *b) {
                best = Some((
                    gain,
                    Stump {
                        feature,
                        threshold,
                        left_value: left[k].leaf(),
                        right_value: right[k].leaf(),
                    },
                ));
            }
        }
    }
    best.map(|(_, s)| s).ok_or(Error::Unfittable)
}

/// Ensemble together with the training scores tracked during boosting and,
/// when requested, the training loss before the first and after every
/// iteration.
#[derive(Debug, Clone)]
pub struct FitHistory {
    pub ensemble: StumpEnsemble,
    pub train_scores: Vec<f64>,
    pub losses: Vec<f64>,
}

pub fn fit(dataset: &Dataset, plan: &ThresholdPlan, config: &FitConfig) -> Result<StumpEnsemble> {
    Ok(boost(dataset, plan, config, false)?.ensemble)
}

pub fn fit_with_history(dataset: &Dataset, plan: &ThresholdPlan, config: &FitConfig) -> Result<FitHistory> {
    boost(dataset, plan, config, true)
}

fn boost(
    dataset: &Dataset,
    plan: &ThresholdPlan,
    config: &FitConfig,
    track_loss: bool,
) -> Result<FitHistory> {
    config.validate()?;
    if plan.n_features() != dataset.n_features() {
        return Err(Error::FeatureMismatch(format!(
            "threshold plan covers {} features, data has {}",
            plan.n_features(),
            dataset.n_features()
        )));
    }
    let objective = Objective::for_outcome(dataset.outcome.kind());
    let loss = LossState::new(objective, &dataset.outcome)?;
    if config.n_iter > 0 && !plan.is_splittable() {
        return Err(Error::Unfittable);
    }

    let n = dataset.n_rows();
    let features = &dataset.features;
    let intercept = initial_score(&dataset.outcome);
    let mut scores = vec![intercept; n];
    let mut losses = Vec::new();
    if track_loss {
        losses.reserve(config.n_iter + 1);
        losses.push(loss.loss(&scores));
    }

    let all_rows: Vec<usize> = (0..n).collect();
    let sample_size = ((config.subsample * n as f64).round() as usize).clamp(1, n);
    let mut rng = SplitMix64::new(config.seed);
    let mut stumps = Vec::with_capacity(config.n_iter);

    for _ in 0..config.n_iter {
        let grads = loss.gradients(&scores);
        let stump = if sample_size == n {
            fit_stump(features, plan, &grads, &all_rows)?
        } else {
            let rows = rng.sample_indices(n, sample_size);
            fit_stump(features, plan, &grads, &rows)?
        }
        .scaled(config.learning_rate);
        let column = features.column(stump.feature);
        for (s, &x) in scores.iter_mut().zip(column) {
            *s += stump.value(x);
        }
        stumps.push(stump);
        if track_loss {
            losses.push(loss.loss(&scores));
        }
    }

    Ok(FitHistory {
        ensemble: StumpEnsemble {
            intercept,
            stumps,
            objective,
            learning_rate: config.learning_rate,
            feature_names: features.names().to_vec(),
        },
        train_scores: scores,
        losses,
    })
}

/// Raw scores on the objective's scale.
pub fn predict_ensemble(ensemble: &StumpEnsemble, features: &Features) -> Result<Vec<f64>> {
    features.ensure_names(&ensemble.feature_names)?;
    let mut scores = vec![ensemble.intercept; features.n_rows()];
    for stump in &ensemble.stumps {
        let column = features.column(stump.feature);
        for (s, &x) in scores.iter_mut().zip(column) {
            *s += stump.value(x);
        }
    }
    Ok(scores)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{quantile_thresholds, user_thresholds, FeatureThresholds, ThresholdSource};

    fn dataset(columns: Vec<Vec<f64>>, outcome: Outcome) -> Dataset {
        let names = (0..columns.len()).map(|j| format!("x{j}")).collect();
        Dataset::new(Features::new(names, columns).unwrap(), outcome).unwrap()
    }

    fn plan(cutoffs: Vec<Vec<f64>>) -> ThresholdPlan {
        ThresholdPlan::new(
            cutoffs
                .into_iter()
                .map(|cutoffs| FeatureThresholds {
                    cutoffs,
                    source: ThresholdSource::User,
                })
                .collect(),
        )
    }

    fn unit(g: &[f64]) -> GradientBundle {
        GradientBundle {
            pseudo_residuals: g.to_vec(),
            hessian_weights: vec![1.0; g.len()],
        }
    }

    #[test]
    fn initial_scores() {
        assert_eq!(initial_score(&Outcome::Continuous(vec![2.0, 4.0])), 3.0);
        assert_eq!(
            initial_score(&Outcome::Binary(vec![true, false, true, false])),
            0.0
        );
        let surv = Outcome::Survival {
            times: vec![1.0, 5.0],
            events: vec![true, true],
        };
        assert_eq!(initial_score(&surv), 0.0);
        let all_ones = initial_score(&Outcome::Binary(vec![true; 3]));
        assert!(all_ones.is_finite() && all_ones > 20.0);
    }

    #[test]
    fn perfect_split_means() {
        let d = dataset(vec![vec![1.0, 2.0, 3.0, 4.0]], Outcome::Continuous(vec![0.0; 4]));
        let s = fit_stump(
            &d.features,
            &plan(vec![vec![2.5]]),
            &unit(&[-1.0, -1.0, 1.0, 1.0]),
            &[0, 1, 2, 3],
        )
        .unwrap();
        assert_eq!(
            s,
            Stump {
                feature: 0,
                threshold: 2.5,
                left_value: -1.0,
                right_value: 1.0
            }
        );
    }

    #[test]
    fn newton_leaf_value() {
        // residuals sum to 1.0 and weights to 0.5 on the right side
        let d = dataset(vec![vec![0.0, 1.0, 1.0]], Outcome::Continuous(vec![0.0; 3]));
        let grads = GradientBundle {
            pseudo_residuals: vec![-0.2, 0.75, 0.25],
            hessian_weights: vec![0.16, 0.25, 0.25],
        };
        let s = fit_stump(&d.features, &plan(vec![vec![0.5]]), &grads, &[0, 1, 2]).unwrap();
        assert_eq!(s.right_value, 2.0);
        assert!((s.left_value - (-0.2 / 0.16)).abs() < 1e-15);
    }

    #[test]
    fn empty_side_gets_zero_leaf() {
        let d = dataset(vec![vec![1.0, 2.0]], Outcome::Continuous(vec![0.0; 2]));
        let s = fit_stump(&d.features, &plan(vec![vec![10.0]]), &unit(&[1.0, 2.0]), &[0, 1]).unwrap();
        assert_eq!(s.left_value, 1.5);
        assert_eq!(s.right_value, 0.0);
    }

    #[test]
    fn ties_prefer_lowest_feature_then_threshold() {
        // both features and both cutoffs induce the same partition
        let d = dataset(
            vec![vec![0.0, 0.0, 1.0, 1.0], vec![0.0, 0.0, 1.0, 1.0]],
            Outcome::Continuous(vec![0.0; 4]),
        );
        let p = plan(vec![vec![0.5, 0.7], vec![0.2, 0.5]]);
        let s = fit_stump(&d.features, &p, &unit(&[-1.0, -1.0, 1.0, 1.0]), &[0, 1, 2, 3]).unwrap();
        assert_eq!((s.feature, s.threshold), (0, 0.5));
    }

    #[test]
    fn unfittable_without_cutoffs() {
        let d = dataset(vec![vec![1.0, 1.0]], Outcome::Continuous(vec![1.0, 2.0]));
        let p = quantile_thresholds(&d, 4).unwrap();
        assert!(matches!(
            fit_stump(&d.features, &p, &unit(&[1.0, 1.0]), &[0, 1]),
            Err(Error::Unfittable)
        ));
        let cfg = FitConfig {
            n_iter: 3,
            ..Default::default()
        };
        assert!(matches!(fit(&d, &p, &cfg), Err(Error::Unfittable)));
    }

    #[test]
    fn zero_iterations_is_intercept_only() {
        let d = dataset(
            vec![vec![1.0, 2.0, 3.0]],
            Outcome::Continuous(vec![1.0, 2.0, 6.0]),
        );
        let p = quantile_thresholds(&d, 2).unwrap();
        let cfg = FitConfig {
            n_iter: 0,
            ..Default::default()
        };
        let e = fit(&d, &p, &cfg).unwrap();
        assert!(e.stumps.is_empty());
        assert_eq!(predict_ensemble(&e, &d.features).unwrap(), [3.0, 3.0, 3.0]);
    }

    #[test]
    fn one_full_step_leaves_within_group_variance() {
        // x = [1,2,3,4], y = [1,3,10,14], split at 2.5 with nu = 1
        let y = vec![1.0, 3.0, 10.0, 14.0];
        let d = dataset(vec![vec![1.0, 2.0, 3.0, 4.0]], Outcome::Continuous(y.clone()));
        let cfg = FitConfig {
            n_iter: 1,
            learning_rate: 1.0,
            ..Default::default()
        };
        let e = fit(&d, &plan(vec![vec![2.5]]), &cfg).unwrap();
        let pred = predict_ensemble(&e, &d.features).unwrap();
        let rss: f64 = y.iter().zip(&pred).map(|(a, b)| (a - b) * (a - b)).sum();
        // (1-2)^2 + (3-2)^2 + (10-12)^2 + (14-12)^2
        assert!((rss - 10.0).abs() < 1e-12);
    }

    #[test]
    fn boundary_goes_right() {
        let s = Stump {
            feature: 0,
            threshold: 2.0,
            left_value: -1.0,
            right_value: 1.0,
        };
        assert_eq!(s.value(2.0), 1.0);
        assert_eq!(s.value(1.999), -1.0);
    }

    #[test]
    fn predict_rejects_mismatched_columns() {
        let d = dataset(vec![vec![1.0, 2.0]], Outcome::Continuous(vec![1.0, 2.0]));
        let e = fit(&d, &quantile_thresholds(&d, 2).unwrap(), &FitConfig::default()).unwrap();
        let other = Features::new(vec!["z".into()], vec![vec![1.0]]).unwrap();
        assert!(matches!(
            predict_ensemble(&e, &other),
            Err(Error::FeatureMismatch(_))
        ));
    }

    #[test]
    fn objective_follows_outcome() {
        let d = dataset(
            vec![vec![1.0, 2.0, 3.0, 4.0]],
            Outcome::Survival {
                times: vec![4.0, 3.0, 2.0, 1.0],
                events: vec![true; 4],
            },
        );
        let p = user_thresholds(&d, &[("x0".into(), vec![2.5])], None).unwrap();
        let e = fit(
            &d,
            &p,
            &FitConfig {
                n_iter: 5,
                learning_rate: 0.5,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(e.objective, Objective::SurvivalRank);
        // later times must score lower risk
        assert!(e.stumps.iter().all(|s| s.right_value > s.left_value));
    }

    #[test]
    fn invalid_config_rejected() {
        let d = dataset(vec![vec![1.0, 2.0]], Outcome::Continuous(vec![1.0, 2.0]));
        let p = quantile_thresholds(&d, 2).unwrap();
        for cfg in [
            FitConfig {
                learning_rate: 0.0,
                ..Default::default()
            },
            FitConfig {
                learning_rate: 1.5,
                ..Default::default()
            },
            FitConfig {
                subsample: 0.0,
                ..Default::default()
            },
        ] {
            assert!(matches!(fit(&d, &p, &cfg), Err(Error::InvalidConfig(_))));
        }
    }

    #[test]
    fn subsampling_is_seeded() {
        let x: Vec<f64> = (0..40).map(|i| (i * 7 % 40) as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| (v / 5.0).sin()).collect();
        let d = dataset(vec![x], Outcome::Continuous(y));
        let p = quantile_thresholds(&d, 8).unwrap();
        let cfg = FitConfig {
            n_iter: 30,
            subsample: 0.5,
            seed: 11,
            ..Default::default()
        };
        assert_eq!(fit(&d, &p, &cfg).unwrap(), fit(&d, &p, &cfg).unwrap());
        let other = fit(&d, &p, &FitConfig { seed: 12, ..cfg }).unwrap();
        assert_ne!(fit(&d, &p, &cfg).unwrap(), other);
    }
}
