//! Transparent risk scores learned by gradient boosting over single-threshold
//! decision stumps.
//!
//! A fitted model is an additive point system: an intercept plus, for each
//! variable, a piecewise-constant table of points over a few cutoffs. It
//! supports continuous outcomes (squared error, identity scale), binary
//! outcomes (logistic loss with Newton leaves, log-odds scale) and
//! time-to-event outcomes (pairwise ranking loss, log-risk scale).
//!
//! ```
//! use stumpscore::{Dataset, Features, Outcome, FitConfig, Thresholds, train};
//!
//! let x = vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
//! let y = vec![0.0, 0.0, 0.0, 2.0, 2.0, 2.0];
//! let data = Dataset::new(
//!     Features::new(vec!["x".into()], vec![x]).unwrap(),
//!     Outcome::Continuous(y),
//! )
//! .unwrap();
//! let config = FitConfig { n_iter: 100, learning_rate: 0.2, n_quantiles: 2, ..Default::default() };
//! let model = train(&data, &Thresholds::Quantiles, &config).unwrap();
//! assert_eq!(model.card.count_rules(), 1);
//! print!("{}", model.card.render(1));
//! ```

pub mod boosting;
pub mod cli;
pub mod data;
pub mod error;
pub mod estimator;
pub mod losses;
pub mod metrics;
pub mod model;
pub mod rng;
pub mod scorecard;

pub use boosting::{
    fit, fit_stump, fit_with_history, initial_score, predict_ensemble, FitConfig, FitHistory, Stump,
    StumpEnsemble,
};
pub use data::{
    load_csv, load_features, quantile_thresholds, user_thresholds, Dataset, Features, Outcome,
    OutcomeColumns, OutcomeKind, Schema, ThresholdPlan, ThresholdSource,
};
pub use error::{Error, Result, Stage};
pub use estimator::{train, Estimator, Thresholds};
pub use losses::{GradientBundle, Objective};
pub use metrics::{auc, c_index, evaluate, mse, split, EvalReport, Metric};
pub use model::Model;
pub use scorecard::{
    aggregate, count_rules, predict_scorecard, render, to_hazard_ratio, RenderOptions, ScoreCard,
    VariableTable,
};
