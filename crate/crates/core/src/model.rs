//! Fitted model persistence.
//!
//! A model file is a JSON document:
//!
//! ```text
//! {
//!   "format_version": 1,
//!   "objective": "logistic",
//!   "learning_rate": 0.05,
//!   "intercept": -0.81,
//!   "features": ["age", "bmi"],
//!   "tables": [{"feature": "age", "cutoffs": [50.0], "bin_points": [0.0, 0.4]}],
//!   "ensemble": {"intercept": -0.74, "stumps": [{"feature": 0, "threshold": 50.0, "left": 0.0, "right": 0.02}]}
//! }
//! ```
//!
//! Floats are written in shortest round-trip form and parsed with correct
//! rounding, so save/load is exact.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::boosting::{Stump, StumpEnsemble};
use crate::error::{Error, Result};
use crate::losses::Objective;
use crate::scorecard::{aggregate, ScoreCard, VariableTable};

pub const FORMAT_VERSION: u32 = 1;

/// A fitted ensemble and the score card aggregated from it.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub ensemble: StumpEnsemble,
    pub card: ScoreCard,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format_version: u32,
    objective: Objective,
    learning_rate: f64,
    intercept: f64,
    features: Vec<String>,
    tables: Vec<VariableTable>,
    ensemble: EnsembleSection,
}

#[derive(Serialize, Deserialize)]
struct EnsembleSection {
    intercept: f64,
    stumps: Vec<Stump>,
}

impl Model {
    pub fn from_ensemble(ensemble: StumpEnsemble) -> Self {
        let card = aggregate(&ensemble);
        Self { ensemble, card }
    }

    pub fn to_json(&self) -> Result<String> {
        let file = ModelFile {
            format_version: FORMAT_VERSION,
            objective: self.card.objective,
            learning_rate: self.ensemble.learning_rate,
            intercept: self.card.intercept,
            features: self.card.features.clone(),
            tables: self.card.tables.clone(),
            ensemble: EnsembleSection {
                intercept: self.ensemble.intercept,
                stumps: self.ensemble.stumps.clone(),
            },
        };
        let mut text = serde_json::to_string_pretty(&file)?;
        text.push('\n');
        Ok(text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text).map_err(|e| Error::Model(e.to_string()))?;
        if file.format_version != FORMAT_VERSION {
            return Err(Error::Model(format!(
                "unsupported format_version {} (expected {FORMAT_VERSION})",
                file.format_version
            )));
        }
        let d = file.features.len();
        if let Some(s) = file.ensemble.stumps.iter().find(|s| s.feature >= d) {
            return Err(Error::Model(format!(
                "stump refers to feature index {} of {d}",
                s.feature
            )));
        }
        let ensemble = StumpEnsemble {
            intercept: file.ensemble.intercept,
            stumps: file.ensemble.stumps,
            objective: file.objective,
            learning_rate: file.learning_rate,
            feature_names: file.features.clone(),
        };
        let card = ScoreCard {
            objective: file.objective,
            intercept: file.intercept,
            features: file.features,
            tables: file.tables,
        };
        card.validate()?;
        Ok(Self { ensemble, card })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}
