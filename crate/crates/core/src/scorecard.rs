//! Point tables aggregated from a stump ensemble.
//!
//! Every stump on feature `j` is `left + (right - left) * 1{x >= t}`, so all
//! stumps sharing `(j, t)` collapse into one indicator coefficient. Summing
//! the coefficients of a feature's cutoffs gives the cumulative bin values of
//! a piecewise-constant function, and the constant parts (left values and the
//! per-table minimum) move into the intercept. The card predicts exactly what
//! the ensemble predicts, up to floating-point reassociation.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::boosting::StumpEnsemble;
use crate::data::Features;
use crate::error::{Error, Result};
use crate::losses::{sigmoid, Objective};

/// Piecewise-constant points for one variable: `bin_points[k]` applies on
/// `[cutoffs[k-1], cutoffs[k])`, with open ends on both sides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariableTable {
    pub feature: String,
    pub cutoffs: Vec<f64>,
    pub bin_points: Vec<f64>,
}

impl VariableTable {
    /// Builds a table from the indicator form `a0 + sum_k delta_k 1{x >= b_k}`.
    pub fn from_indicators(feature: String, base: f64, cutoffs: Vec<f64>, deltas: &[f64]) -> Self {
        assert_eq!(cutoffs.len(), deltas.len());
        let mut bin_points = Vec::with_capacity(deltas.len() + 1);
        let mut acc = base;
        bin_points.push(acc);
        for d in deltas {
            acc += d;
            bin_points.push(acc);
        }
        Self {
            feature,
            cutoffs,
            bin_points,
        }
    }

    /// `(a0, [a_k - a_{k-1}])`.
    pub fn indicator_coefficients(&self) -> (f64, Vec<f64>) {
        (
            self.bin_points[0],
            self.bin_points.windows(2).map(|w| w[1] - w[0]).collect(),
        )
    }

    pub fn bin_index(&self, x: f64) -> usize {
        self.cutoffs.partition_point(|&b| b <= x)
    }

    pub fn points(&self, x: f64) -> f64 {
        self.bin_points[self.bin_index(x)]
    }

    /// Same value as [`points`](Self::points), evaluated as an indicator sum.
    pub fn points_by_indicators(&self, x: f64) -> f64 {
        let (base, deltas) = self.indicator_coefficients();
        base + self
            .cutoffs
            .iter()
            .zip(&deltas)
            .filter(|(&b, _)| x >= b)
            .map(|(_, d)| d)
            .sum::<f64>()
    }

    pub fn n_rules(&self) -> usize {
        self.cutoffs.len()
    }

    fn validate(&self) -> Result<()> {
        if self.bin_points.len() != self.cutoffs.len() + 1 {
            return Err(Error::Model(format!(
                "table {:?}: {} cutoffs need {} bin points, found {}",
                self.feature,
                self.cutoffs.len(),
                self.cutoffs.len() + 1,
                self.bin_points.len()
            )));
        }
        if !self.cutoffs.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Model(format!(
                "table {:?}: cutoffs are not strictly increasing",
                self.feature
            )));
        }
        if !self.cutoffs.iter().chain(&self.bin_points).all(|v| v.is_finite()) {
            return Err(Error::Model(format!(
                "table {:?}: non-finite value",
                self.feature
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreCard {
    pub objective: Objective,
    pub intercept: f64,
    /// All training feature names, in column order.
    pub features: Vec<String>,
    /// One table per variable that kept at least one cutoff, in column order.
    pub tables: Vec<VariableTable>,
}

pub fn aggregate(ensemble: &StumpEnsemble) -> ScoreCard {
    let d = ensemble.feature_names.len();
    // per feature: cutoff -> summed indicator coefficient, in threshold order
    let mut deltas: Vec<Vec<(f64, f64)>> = vec![Vec::new(); d];
    let mut intercept = ensemble.intercept;
    for stump in &ensemble.stumps {
        intercept += stump.left_value;
        deltas[stump.feature].push((stump.threshold, stump.right_value - stump.left_value));
    }

    let mut tables = Vec::new();
    for (feature, mut entries) in deltas.into_iter().enumerate() {
        // stable sort keeps boosting order among equal thresholds
        entries.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::new();
        for (t, delta) in entries {
            match merged.last_mut() {
                Some((last, sum)) if *last == t => *sum += delta,
                _ => merged.push((t, delta)),
            }
        }
        merged.retain(|&(_, delta)| delta != 0.0);
        if merged.is_empty() {
            continue;
        }
        let (cutoffs, coefs): (Vec<f64>, Vec<f64>) = merged.into_iter().unzip();
        let mut table =
            VariableTable::from_indicators(ensemble.feature_names[feature].clone(), 0.0, cutoffs, &coefs);
        let min = table.bin_points.iter().copied().fold(f64::INFINITY, f64::min);
        for p in &mut table.bin_points {
            *p -= min;
        }
        intercept += min;
        tables.push(table);
    }

    ScoreCard {
        objective: ensemble.objective,
        intercept,
        features: ensemble.feature_names.clone(),
        tables,
    }
}

impl ScoreCard {
    pub fn count_rules(&self) -> usize {
        self.tables.iter().map(VariableTable::n_rules).sum()
    }

    pub fn table(&self, feature: &str) -> Option<&VariableTable> {
        self.tables.iter().find(|t| t.feature == feature)
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if !self.intercept.is_finite() {
            return Err(Error::Model("non-finite intercept".into()));
        }
        for t in &self.tables {
            t.validate()?;
            if !self.features.contains(&t.feature) {
                return Err(Error::Model(format!("table for unknown feature {:?}", t.feature)));
            }
        }
        Ok(())
    }

    fn table_columns(&self, features: &Features) -> Result<Vec<usize>> {
        features.ensure_names(&self.features)?;
        self.tables
            .iter()
            .map(|t| {
                features
                    .index_of(&t.feature)
                    .ok_or_else(|| Error::FeatureMismatch(format!("missing column {:?}", t.feature)))
            })
            .collect()
    }

    /// Raw scores: intercept plus the summed bin points of every table.
    pub fn predict(&self, features: &Features) -> Result<Vec<f64>> {
        let columns = self.table_columns(features)?;
        let mut out = vec![self.intercept; features.n_rows()];
        for (table, &j) in self.tables.iter().zip(&columns) {
            for (s, &x) in out.iter_mut().zip(features.column(j)) {
                *s += table.points(x);
            }
        }
        Ok(out)
    }

    /// Prediction from points and intercept rounded to `decimals`, i.e. what
    /// a person reading the printed table would compute.
    pub fn predict_rounded(&self, features: &Features, decimals: usize) -> Result<Vec<f64>> {
        let columns = self.table_columns(features)?;
        let mut out = vec![round_to(self.intercept, decimals); features.n_rows()];
        for (table, &j) in self.tables.iter().zip(&columns) {
            for (s, &x) in out.iter_mut().zip(features.column(j)) {
                *s += round_to(table.points(x), decimals);
            }
        }
        Ok(out)
    }

    pub fn to_probability(&self, raw: f64) -> Result<f64> {
        if self.objective != Objective::Logistic {
            return Err(Error::ObjectiveMismatch {
                objective: self.objective.as_str(),
                outcome: "probability output (logistic only)",
            });
        }
        Ok(sigmoid(raw))
    }

    /// Hazard ratio for a point difference on this card's log-risk scale.
    pub fn hazard_ratio(&self, points_delta: f64) -> Result<f64> {
        if self.objective != Objective::SurvivalRank {
            return Err(Error::ObjectiveMismatch {
                objective: self.objective.as_str(),
                outcome: "hazard ratio (survival only)",
            });
        }
        Ok(to_hazard_ratio(points_delta))
    }

    pub fn render(&self, decimals: usize) -> String {
        render(self, &RenderOptions::new(decimals))
    }
}

pub fn predict_scorecard(card: &ScoreCard, features: &Features) -> Result<Vec<f64>> {
    card.predict(features)
}

pub fn to_hazard_ratio(points_delta: f64) -> f64 {
    points_delta.exp()
}

pub fn count_rules(card: &ScoreCard) -> usize {
    card.count_rules()
}

fn round_to(v: f64, decimals: usize) -> f64 {
    let scale = 10f64.powi(decimals as i32);
    (v * scale).round() / scale
}

#[derive(Debug, Clone, Default)]
pub struct RenderOptions {
    pub decimals: usize,
    /// Display labels for single-cutoff variables, e.g. `Sex -> (F, M)`.
    pub labels: BTreeMap<String, (String, String)>,
}

impl RenderOptions {
    pub fn new(decimals: usize) -> Self {
        Self {
            decimals,
            labels: BTreeMap::new(),
        }
    }
}

const MIN_NAME_WIDTH: usize = 5;

fn format_cutoff(v: f64) -> String {
    let s = v.to_string();
    if s.contains(['.', 'e', 'E']) || !v.is_finite() {
        s
    } else {
        format!("{s}.0")
    }
}

fn bin_labels(table: &VariableTable, labels: Option<&(String, String)>) -> Vec<String> {
    let b = &table.cutoffs;
    if let (Some((lo, hi)), 1) = (labels, b.len()) {
        return vec![lo.clone(), hi.clone()];
    }
    let mut out = Vec::with_capacity(b.len() + 1);
    out.push(format!("<{}", format_cutoff(b[0])));
    for w in b.windows(2) {
        out.push(format!("[{},{})", format_cutoff(w[0]), format_cutoff(w[1])));
    }
    out.push(format!(">={}", format_cutoff(b[b.len() - 1])));
    out
}

fn table_row(name: &str, name_width: usize, cells: &[String], widths: &[usize]) -> String {
    let mut row = format!("| {name:<name_width$}");
    for (cell, &w) in cells.iter().zip(widths) {
        row.push_str(&format!(" | {cell:<w$}"));
    }
    row.trim_end().to_owned()
}

fn ruler(width: usize) -> String {
    format!(" {}", "=".repeat(width + 1))
}

/// Text point tables, one block per variable with at least one cutoff,
/// followed by the intercept line. Consecutive blocks share their ruler.
pub fn render(card: &ScoreCard, options: &RenderOptions) -> String {
    let mut out = String::new();
    let mut first = true;
    for table in &card.tables {
        let labels = bin_labels(table, options.labels.get(&table.feature));
        let points: Vec<String> = table
            .bin_points
            .iter()
            .map(|p| format!("{:.*}", options.decimals, p))
            .collect();
        let widths: Vec<usize> = labels
            .iter()
            .zip(&points)
            .map(|(l, p)| l.chars().count().max(p.chars().count()))
            .collect();
        let name_width = table.feature.chars().count().max(MIN_NAME_WIDTH);
        let label_row = table_row(&table.feature, name_width, &labels, &widths);
        let points_row = table_row("", name_width, &points, &widths);
        let width = label_row.chars().count().max(points_row.chars().count());
        if first {
            out.push_str(&ruler(width));
            out.push('\n');
            first = false;
        }
        out.push_str(&label_row);
        out.push('\n');
        out.push_str(&points_row);
        out.push('\n');
        out.push_str(&ruler(width));
        out.push('\n');
    }
    if !card.tables.is_empty() {
        out.push('\n');
    }
    out.push_str(&format!(
        "| Intercept | {:.*}\n",
        options.decimals, card.intercept
    ));
    out
}
