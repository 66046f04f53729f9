//! Loss values, pseudo-residuals and second-order weights for the three
//! objectives.

use serde::{Deserialize, Serialize};

use crate::data::{Outcome, OutcomeKind};
use crate::error::{Error, Result};

/// Probabilities are kept inside `[PROB_CLAMP, 1 - PROB_CLAMP]`.
pub const PROB_CLAMP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// Identity scale.
    SquaredError,
    /// Log-odds scale.
    Logistic,
    /// Log-risk scale, pairwise ranking loss.
    SurvivalRank,
}

impl Objective {
    pub fn for_outcome(kind: OutcomeKind) -> Self {
        match kind {
            OutcomeKind::Continuous => Objective::SquaredError,
            OutcomeKind::Binary => Objective::Logistic,
            OutcomeKind::Survival => Objective::SurvivalRank,
        }
    }

    pub fn outcome_kind(self) -> OutcomeKind {
        match self {
            Objective::SquaredError => OutcomeKind::Continuous,
            Objective::Logistic => OutcomeKind::Binary,
            Objective::SurvivalRank => OutcomeKind::Survival,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Objective::SquaredError => "squared_error",
            Objective::Logistic => "logistic",
            Objective::SurvivalRank => "survival_rank",
        }
    }

    pub fn ensure_matches(self, outcome: &Outcome) -> Result<()> {
        if outcome.kind() == self.outcome_kind() {
            Ok(())
        } else {
            Err(Error::ObjectiveMismatch {
                objective: self.as_str(),
                outcome: outcome.kind().as_str(),
            })
        }
    }
}

impl std::fmt::Display for Objective {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradientBundle {
    pub pseudo_residuals: Vec<f64>,
    pub hessian_weights: Vec<f64>,
}

impl GradientBundle {
    pub fn len(&self) -> usize {
        self.pseudo_residuals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pseudo_residuals.is_empty()
    }
}

/// Numerically stable logistic function, without clamping.
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

pub fn clamped_probability(raw: f64) -> f64 {
    sigmoid(raw).clamp(PROB_CLAMP, 1.0 - PROB_CLAMP)
}

/// `log(1 + exp(z))` without overflow.
pub fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

pub fn residuals_squared_error(targets: &[f64], predictions: &[f64]) -> GradientBundle {
    assert_eq!(targets.len(), predictions.len(), "length mismatch");
    GradientBundle {
        pseudo_residuals: targets.iter().zip(predictions).map(|(y, f)| y - f).collect(),
        hessian_weights: vec![1.0; targets.len()],
    }
}

pub fn residuals_logistic(labels: &[bool], raw_scores: &[f64]) -> GradientBundle {
    assert_eq!(labels.len(), raw_scores.len(), "length mismatch");
    let (pseudo_residuals, hessian_weights) = labels
        .iter()
        .zip(raw_scores)
        .map(|(&y, &f)| {
            let p = clamped_probability(f);
            (f64::from(u8::from(y)) - p, p * (1.0 - p))
        })
        .unzip();
    GradientBundle {
        pseudo_residuals,
        hessian_weights,
    }
}

/// Ordered pairs `(i, j)` with an observed event for `i` strictly before
/// `times[j]`. Tied times form no pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComparablePairs {
    pairs: Vec<(u32, u32)>,
}

impl ComparablePairs {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.pairs.iter().map(|&(i, j)| (i as usize, j as usize))
    }
}

pub fn build_comparable_pairs(times: &[f64], events: &[bool]) -> Result<ComparablePairs> {
    assert_eq!(times.len(), events.len(), "length mismatch");
    let n = u32::try_from(times.len())
        .map_err(|_| Error::InvalidConfig("too many samples for pair indexing".into()))?;
    let mut pairs = Vec::new();
    for i in 0..n {
        if !events[i as usize] {
            continue;
        }
        let ti = times[i as usize];
        pairs.extend((0..n).filter(|&j| ti < times[j as usize]).map(|j| (i, j)));
    }
    if pairs.is_empty() {
        return Err(Error::NoComparablePairs);
    }
    Ok(ComparablePairs { pairs })
}

/// Mean of `log(1 + exp(f_j - f_i))` over comparable pairs.
pub fn ranking_loss(raw_scores: &[f64], pairs: &ComparablePairs) -> f64 {
    assert!(!pairs.is_empty(), "ranking loss needs at least one pair");
    let total: f64 = pairs
        .iter()
        .map(|(i, j)| softplus(raw_scores[j] - raw_scores[i]))
        .sum();
    total / pairs.len() as f64
}

/// Negative gradient of [`ranking_loss`]; unit hessian weights.
pub fn residuals_ranking(raw_scores: &[f64], pairs: &ComparablePairs) -> GradientBundle {
    assert!(!pairs.is_empty(), "ranking loss needs at least one pair");
    let scale = 1.0 / pairs.len() as f64;
    let mut g = vec![0.0; raw_scores.len()];
    for (i, j) in pairs.iter() {
        let s = sigmoid(raw_scores[j] - raw_scores[i]) * scale;
        g[i] += s;
        g[j] -= s;
    }
    GradientBundle {
        hessian_weights: vec![1.0; g.len()],
        pseudo_residuals: g,
    }
}

/// Half the mean squared error.
pub fn squared_error_loss(targets: &[f64], predictions: &[f64]) -> f64 {
    assert_eq!(targets.len(), predictions.len(), "length mismatch");
    let sse: f64 = targets
        .iter()
        .zip(predictions)
        .map(|(y, f)| (y - f) * (y - f))
        .sum();
    0.5 * sse / targets.len() as f64
}

/// Mean negative Bernoulli log-likelihood on the log-odds scale.
pub fn logistic_loss(labels: &[bool], raw_scores: &[f64]) -> f64 {
    assert_eq!(labels.len(), raw_scores.len(), "length mismatch");
    let total: f64 = labels
        .iter()
        .zip(raw_scores)
        .map(|(&y, &f)| if y { softplus(-f) } else { softplus(f) })
        .sum();
    total / labels.len() as f64
}

/// Objective-specific gradient and loss evaluation over a fixed outcome.
pub(crate) enum LossState<'a> {
    Squared(&'a [f64]),
    Logistic(&'a [bool]),
    Rank(ComparablePairs),
}

impl<'a> LossState<'a> {
    pub(crate) fn new(objective: Objective, outcome: &'a Outcome) -> Result<Self> {
        objective.ensure_matches(outcome)?;
        Ok(match outcome {
            Outcome::Continuous(y) => LossState::Squared(y),
            Outcome::Binary(y) => LossState::Logistic(y),
            Outcome::Survival { times, events } => LossState::Rank(build_comparable_pairs(times, events)?),
        })
    }

    pub(crate) fn gradients(&self, scores: &[f64]) -> GradientBundle {
        match self {
            LossState::Squared(y) => residuals_squared_error(y, scores),
            LossState::Logistic(y) => residuals_logistic(y, scores),
            LossState::Rank(pairs) => residuals_ranking(scores, pairs),
        }
    }

    pub(crate) fn loss(&self, scores: &[f64]) -> f64 {
        match self {
            LossState::Squared(y) => squared_error_loss(y, scores),
            LossState::Logistic(y) => logistic_loss(y, scores),
            LossState::Rank(pairs) => ranking_loss(scores, pairs),
        }
    }
}

/// Training loss of `scores` under `objective`.
pub fn objective_loss(objective: Objective, outcome: &Outcome, scores: &[f64]) -> Result<f64> {
    Ok(LossState::new(objective, outcome)?.loss(scores))
}
