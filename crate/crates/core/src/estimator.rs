//! `fit` / `predict` / `print` facade over the boosting and score card
//! modules. The CLI and the C ABI both go through it.

use crate::boosting::{fit, FitConfig};
use crate::data::{quantile_thresholds, user_thresholds, Dataset, Features, ThresholdPlan};
use crate::error::{Error, Result};
use crate::losses::Objective;
use crate::model::Model;
use crate::scorecard::{render, RenderOptions};

/// Where candidate cutoffs come from.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum Thresholds {
    #[default]
    Quantiles,
    /// User cutoffs per feature name. With `merge_quantiles`, unnamed features
    /// fall back to quantile cutoffs instead of being excluded.
    User {
        cutoffs: Vec<(String, Vec<f64>)>,
        merge_quantiles: bool,
    },
}

impl Thresholds {
    pub fn plan(&self, dataset: &Dataset, n_quantiles: usize) -> Result<ThresholdPlan> {
        match self {
            Thresholds::Quantiles => quantile_thresholds(dataset, n_quantiles),
            Thresholds::User {
                cutoffs,
                merge_quantiles,
            } => user_thresholds(dataset, cutoffs, merge_quantiles.then_some(n_quantiles)),
        }
    }
}

/// Fits an ensemble and aggregates it into a score card.
pub fn train(dataset: &Dataset, thresholds: &Thresholds, config: &FitConfig) -> Result<Model> {
    config.validate()?;
    let plan = thresholds.plan(dataset, config.n_quantiles)?;
    Ok(Model::from_ensemble(fit(dataset, &plan, config)?))
}

#[derive(Debug, Clone)]
pub struct Estimator {
    pub objective: Objective,
    pub config: FitConfig,
    pub thresholds: Thresholds,
    model: Option<Model>,
}

impl Estimator {
    pub fn new(objective: Objective, config: FitConfig) -> Self {
        Self {
            objective,
            config,
            thresholds: Thresholds::Quantiles,
            model: None,
        }
    }

    pub fn from_model(model: Model) -> Self {
        Self {
            objective: model.card.objective,
            config: FitConfig {
                learning_rate: model.ensemble.learning_rate,
                n_iter: model.ensemble.stumps.len(),
                ..FitConfig::default()
            },
            thresholds: Thresholds::Quantiles,
            model: Some(model),
        }
    }

    pub fn fit(&mut self, dataset: &Dataset) -> Result<&Model> {
        self.objective.ensure_matches(&dataset.outcome)?;
        let model = train(dataset, &self.thresholds, &self.config)?;
        Ok(self.model.insert(model))
    }

    pub fn is_fitted(&self) -> bool {
        self.model.is_some()
    }

    pub fn model(&self) -> Result<&Model> {
        self.model.as_ref().ok_or(Error::NotFitted)
    }

    pub fn predict(&self, features: &Features) -> Result<Vec<f64>> {
        self.model()?.card.predict(features)
    }

    pub fn print(&self, decimals: usize) -> Result<String> {
        Ok(render(&self.model()?.card, &RenderOptions::new(decimals)))
    }
}
