//! Tabular input: feature tables, outcomes, CSV loading and candidate
//! threshold plans.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use crate::error::{Error, Result};

/// Named feature columns, stored column-major. Every value is finite.
#[derive(Debug, Clone, PartialEq)]
pub struct Features {
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
    n_rows: usize,
}

impl Features {
    pub fn new(names: Vec<String>, columns: Vec<Vec<f64>>) -> Result<Self> {
        if names.len() != columns.len() {
            return Err(Error::FeatureMismatch(format!(
                "{} names for {} columns",
                names.len(),
                columns.len()
            )));
        }
        let mut seen = HashSet::new();
        for name in &names {
            if !seen.insert(name.as_str()) {
                return Err(Error::DuplicateColumn(name.clone()));
            }
        }
        let n_rows = columns.first().map_or(0, Vec::len);
        for (name, col) in names.iter().zip(&columns) {
            if col.len() != n_rows {
                return Err(Error::FeatureMismatch(format!(
                    "column {name:?} has {} rows, expected {n_rows}",
                    col.len()
                )));
            }
            if let Some(row) = col.iter().position(|v| !v.is_finite()) {
                return Err(Error::BadCell {
                    row: row + 1,
                    line: row + 2,
                    column: name.clone(),
                    reason: "value is not finite".into(),
                });
            }
        }
        Ok(Self {
            names,
            columns,
            n_rows,
        })
    }

    /// Builds a table from a row-major buffer of `n_rows * names.len()` values.
    pub fn from_row_major(names: Vec<String>, values: &[f64], n_rows: usize) -> Result<Self> {
        let d = names.len();
        if values.len() != n_rows * d {
            return Err(Error::FeatureMismatch(format!(
                "buffer of {} values is not {n_rows} x {d}",
                values.len()
            )));
        }
        let columns = (0..d)
            .map(|j| (0..n_rows).map(|i| values[i * d + j]).collect())
            .collect();
        Self::new(names, columns)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_features(&self) -> usize {
        self.columns.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j]
    }

    pub fn get(&self, row: usize, feature: usize) -> f64 {
        self.columns[feature][row]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        Self {
            names: self.names.clone(),
            columns: self
                .columns
                .iter()
                .map(|c| rows.iter().map(|&i| c[i]).collect())
                .collect(),
            n_rows: rows.len(),
        }
    }

    /// Checks that `self` carries exactly the training columns, in order.
    pub fn ensure_names(&self, expected: &[String]) -> Result<()> {
        if self.names.as_slice() == expected {
            return Ok(());
        }
        if self.names.len() != expected.len() {
            return Err(Error::FeatureMismatch(format!(
                "expected {} feature columns, got {}",
                expected.len(),
                self.names.len()
            )));
        }
        let (want, got) = expected
            .iter()
            .zip(&self.names)
            .find(|(a, b)| a != b)
            .expect("names differ somewhere");
        Err(Error::FeatureMismatch(format!(
            "expected column {want:?}, found {got:?}"
        )))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutcomeKind {
    Continuous,
    Binary,
    Survival,
}

impl OutcomeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            OutcomeKind::Continuous => "continuous",
            OutcomeKind::Binary => "binary",
            OutcomeKind::Survival => "survival",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Continuous(Vec<f64>),
    Binary(Vec<bool>),
    /// `events[i]` is true for an observed event, false for censoring.
    Survival {
        times: Vec<f64>,
        events: Vec<bool>,
    },
}

impl Outcome {
    pub fn len(&self) -> usize {
        match self {
            Outcome::Continuous(v) => v.len(),
            Outcome::Binary(v) => v.len(),
            Outcome::Survival { times, .. } => times.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn kind(&self) -> OutcomeKind {
        match self {
            Outcome::Continuous(_) => OutcomeKind::Continuous,
            Outcome::Binary(_) => OutcomeKind::Binary,
            Outcome::Survival { .. } => OutcomeKind::Survival,
        }
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        match self {
            Outcome::Continuous(v) => Outcome::Continuous(rows.iter().map(|&i| v[i]).collect()),
            Outcome::Binary(v) => Outcome::Binary(rows.iter().map(|&i| v[i]).collect()),
            Outcome::Survival { times, events } => Outcome::Survival {
                times: rows.iter().map(|&i| times[i]).collect(),
                events: rows.iter().map(|&i| events[i]).collect(),
            },
        }
    }

    fn validate(&self) -> Result<()> {
        if let Outcome::Survival { times, events } = self {
            if times.len() != events.len() {
                return Err(Error::FeatureMismatch(format!(
                    "{} survival times but {} event indicators",
                    times.len(),
                    events.len()
                )));
            }
            if let Some(row) = times.iter().position(|&t| !(t > 0.0 && t.is_finite())) {
                return Err(Error::NonPositiveTime {
                    row: row + 1,
                    value: times[row],
                });
            }
        }
        if let Outcome::Continuous(v) = self {
            if let Some(row) = v.iter().position(|x| !x.is_finite()) {
                return Err(Error::BadCell {
                    row: row + 1,
                    line: row + 2,
                    column: "target".into(),
                    reason: "value is not finite".into(),
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub features: Features,
    pub outcome: Outcome,
}

impl Dataset {
    pub fn new(features: Features, outcome: Outcome) -> Result<Self> {
        if features.n_features() == 0 {
            return Err(Error::EmptyData("no feature columns"));
        }
        if features.n_rows() == 0 {
            return Err(Error::EmptyData("no data rows"));
        }
        if outcome.len() != features.n_rows() {
            return Err(Error::FeatureMismatch(format!(
                "{} outcome values for {} rows",
                outcome.len(),
                features.n_rows()
            )));
        }
        outcome.validate()?;
        Ok(Self { features, outcome })
    }

    pub fn n_rows(&self) -> usize {
        self.features.n_rows()
    }

    pub fn n_features(&self) -> usize {
        self.features.n_features()
    }

    pub fn feature_names(&self) -> &[String] {
        self.features.names()
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        Self {
            features: self.features.select_rows(rows),
            outcome: self.outcome.select_rows(rows),
        }
    }
}

/// Which CSV columns hold the outcome.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OutcomeColumns {
    Continuous { target: String },
    Binary { target: String },
    Survival { time: String, event: String },
}

impl OutcomeColumns {
    fn names(&self) -> Vec<&str> {
        match self {
            OutcomeColumns::Continuous { target } | OutcomeColumns::Binary { target } => {
                vec![target.as_str()]
            }
            OutcomeColumns::Survival { time, event } => vec![time.as_str(), event.as_str()],
        }
    }
}

/// Column-role map for [`load_csv`]. When `features` is `None`, every column
/// that is not an outcome column is a feature, in file order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schema {
    pub outcome: OutcomeColumns,
    pub features: Option<Vec<String>>,
}

struct RawTable {
    headers: Vec<String>,
    records: Vec<csv::StringRecord>,
}

impl RawTable {
    fn read(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(std::io::BufReader::new(file));
        let headers: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
        let mut seen = HashSet::new();
        for h in &headers {
            if !seen.insert(h.as_str()) {
                return Err(Error::DuplicateColumn(h.clone()));
            }
        }
        let records = reader.records().collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(Self { headers, records })
    }

    fn column_index(&self, name: &str) -> Result<usize> {
        self.headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn(name.to_owned()))
    }

    fn numeric_column(&self, j: usize) -> Result<Vec<f64>> {
        self.records
            .iter()
            .enumerate()
            .map(|(r, rec)| {
                let cell = rec.get(j).unwrap_or("");
                let bad = |reason: String| Error::BadCell {
                    row: r + 1,
                    line: r + 2,
                    column: self.headers[j].clone(),
                    reason,
                };
                if cell.is_empty() {
                    return Err(bad("missing value".into()));
                }
                match cell.parse::<f64>() {
                    Ok(v) if v.is_finite() => Ok(v),
                    Ok(_) => Err(bad(format!("{cell:?} is not finite"))),
                    Err(_) => Err(bad(format!("{cell:?} is not a number"))),
                }
            })
            .collect()
    }

    fn indicator_column(&self, j: usize) -> Result<Vec<bool>> {
        let values = self.numeric_column(j)?;
        values
            .iter()
            .enumerate()
            .map(|(r, &v)| {
                if v == 0.0 {
                    Ok(false)
                } else if v == 1.0 {
                    Ok(true)
                } else {
                    Err(Error::BadCell {
                        row: r + 1,
                        line: r + 2,
                        column: self.headers[j].clone(),
                        reason: format!("{v} is not 0 or 1"),
                    })
                }
            })
            .collect()
    }

    fn features(&self, names: &[String]) -> Result<Features> {
        let columns = names
            .iter()
            .map(|n| self.column_index(n).and_then(|j| self.numeric_column(j)))
            .collect::<Result<Vec<_>>>()?;
        Features::new(names.to_vec(), columns)
    }
}

/// Loads a labeled dataset from a CSV file with a header row.
pub fn load_csv(path: impl AsRef<Path>, schema: &Schema) -> Result<Dataset> {
    let table = RawTable::read(path.as_ref())?;
    let outcome_names = schema.outcome.names();
    for name in &outcome_names {
        table.column_index(name)?;
    }
    let feature_names: Vec<String> = match &schema.features {
        Some(list) => list.clone(),
        None => table
            .headers
            .iter()
            .filter(|h| !outcome_names.contains(&h.as_str()))
            .cloned()
            .collect(),
    };
    if feature_names.is_empty() {
        return Err(Error::EmptyData("no feature columns"));
    }
    if table.records.is_empty() {
        return Err(Error::EmptyData("no data rows"));
    }
    let features = table.features(&feature_names)?;
    let outcome = match &schema.outcome {
        OutcomeColumns::Continuous { target } => {
            Outcome::Continuous(table.numeric_column(table.column_index(target)?)?)
        }
        OutcomeColumns::Binary { target } => {
            Outcome::Binary(table.indicator_column(table.column_index(target)?)?)
        }
        OutcomeColumns::Survival { time, event } => {
            let times = table.numeric_column(table.column_index(time)?)?;
            if let Some(row) = times.iter().position(|&t| t <= 0.0) {
                return Err(Error::NonPositiveTime {
                    row: row + 1,
                    value: times[row],
                });
            }
            let events = table.indicator_column(table.column_index(event)?)?;
            Outcome::Survival { times, events }
        }
    };
    Dataset::new(features, outcome)
}

/// Loads only the named feature columns (in the given order) from a CSV file.
/// Other columns are ignored.
pub fn load_features(path: impl AsRef<Path>, names: &[String]) -> Result<Features> {
    let table = RawTable::read(path.as_ref())?;
    if table.records.is_empty() {
        return Err(Error::EmptyData("no data rows"));
    }
    table.features(names)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThresholdSource {
    Quantile,
    User,
    /// Not named in a user plan and not merged with quantiles; never split on.
    Excluded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureThresholds {
    pub cutoffs: Vec<f64>,
    pub source: ThresholdSource,
}

/// Candidate cutoffs per feature, aligned with the dataset's columns.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdPlan {
    features: Vec<FeatureThresholds>,
}

impl ThresholdPlan {
    pub fn new(features: Vec<FeatureThresholds>) -> Self {
        Self {
            features: features
                .into_iter()
                .map(|mut f| {
                    normalize_cutoffs(&mut f.cutoffs);
                    f
                })
                .collect(),
        }
    }

    pub fn n_features(&self) -> usize {
        self.features.len()
    }

    pub fn cutoffs(&self, feature: usize) -> &[f64] {
        &self.features[feature].cutoffs
    }

    pub fn source(&self, feature: usize) -> ThresholdSource {
        self.features[feature].source
    }

    pub fn total_cutoffs(&self) -> usize {
        self.features.iter().map(|f| f.cutoffs.len()).sum()
    }

    pub fn is_splittable(&self) -> bool {
        self.total_cutoffs() > 0
    }

    pub fn contains(&self, feature: usize, cutoff: f64) -> bool {
        self.features
            .get(feature)
            .is_some_and(|f| f.cutoffs.contains(&cutoff))
    }
}

fn normalize_cutoffs(cutoffs: &mut Vec<f64>) {
    cutoffs.sort_by(f64::total_cmp);
    cutoffs.dedup();
}

/// Empirical quantile with linear interpolation between closest ranks
/// (`h = (n - 1) p`). `sorted` must be non-empty and ascending.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let frac = h - lo as f64;
    if frac == 0.0 || sorted[lo] == sorted[hi] {
        sorted[lo]
    } else {
        sorted[lo] + frac * (sorted[hi] - sorted[lo])
    }
}

fn column_quantile_cutoffs(column: &[f64], n_quantiles: usize) -> Vec<f64> {
    let mut sorted = column.to_vec();
    sorted.sort_by(f64::total_cmp);
    let min = sorted[0];
    let mut cutoffs: Vec<f64> = (1..n_quantiles)
        .map(|q| quantile_sorted(&sorted, q as f64 / n_quantiles as f64))
        // A cutoff at the column minimum sends every row right.
        .filter(|&c| c > min)
        .collect();
    normalize_cutoffs(&mut cutoffs);
    cutoffs
}

/// Interior `q / n_quantiles` quantiles of every feature column.
pub fn quantile_thresholds(dataset: &Dataset, n_quantiles: usize) -> Result<ThresholdPlan> {
    features_quantile_thresholds(&dataset.features, n_quantiles)
}

pub fn features_quantile_thresholds(features: &Features, n_quantiles: usize) -> Result<ThresholdPlan> {
    if n_quantiles == 0 {
        return Err(Error::InvalidConfig("n_quantiles must be at least 1".into()));
    }
    if features.n_rows() == 0 {
        return Err(Error::EmptyData("no data rows"));
    }
    Ok(ThresholdPlan::new(
        (0..features.n_features())
            .map(|j| FeatureThresholds {
                cutoffs: column_quantile_cutoffs(features.column(j), n_quantiles),
                source: ThresholdSource::Quantile,
            })
            .collect(),
    ))
}

/// Builds a plan from user cutoffs. Features missing from `cutoffs` are split on
/// quantile cutoffs when `merge_quantiles` is given, otherwise excluded.
pub fn user_thresholds(
    dataset: &Dataset,
    cutoffs: &[(String, Vec<f64>)],
    merge_quantiles: Option<usize>,
) -> Result<ThresholdPlan> {
    let features = &dataset.features;
    let mut user: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for (name, values) in cutoffs {
        let j = features
            .index_of(name)
            .ok_or_else(|| Error::UnknownFeature(name.clone()))?;
        if values.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFiniteCutoff(name.clone()));
        }
        user.entry(j).or_default().extend_from_slice(values);
    }
    let fallback = match merge_quantiles {
        Some(n) => Some(features_quantile_thresholds(features, n)?),
        None => None,
    };
    let plan = (0..features.n_features())
        .map(|j| match (user.remove(&j), &fallback) {
            (Some(cutoffs), _) => FeatureThresholds {
                cutoffs,
                source: ThresholdSource::User,
            },
            (None, Some(q)) => FeatureThresholds {
                cutoffs: q.cutoffs(j).to_vec(),
                source: ThresholdSource::Quantile,
            },
            (None, None) => FeatureThresholds {
                cutoffs: Vec::new(),
                source: ThresholdSource::Excluded,
            },
        })
        .collect();
    Ok(ThresholdPlan::new(plan))
}

/// Parses `name: v1, v2, ...` lines. Blank lines and `#` comments are skipped.
pub fn parse_named_lists(text: &str) -> Result<Vec<(String, Vec<String>)>> {
    Ok(named_lists(text)?
        .into_iter()
        .map(|(_, name, values)| (name, values))
        .collect())
}

fn named_lists(text: &str) -> Result<Vec<(usize, String, Vec<String>)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (name, rest) = line.split_once(':').ok_or_else(|| Error::ThresholdSyntax {
            line: i + 1,
            reason: "expected `name: v1, v2, ...`".into(),
        })?;
        let name = name.trim();
        if name.is_empty() {
            return Err(Error::ThresholdSyntax {
                line: i + 1,
                reason: "empty feature name".into(),
            });
        }
        let values = rest
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::to_owned)
            .collect();
        out.push((i + 1, name.to_owned(), values));
    }
    Ok(out)
}

/// Parses a thresholds file into per-feature cutoff lists.
pub fn parse_thresholds(text: &str) -> Result<Vec<(String, Vec<f64>)>> {
    named_lists(text)?
        .into_iter()
        .map(|(line, name, values)| {
            let cutoffs = values
                .iter()
                .map(|v| {
                    v.parse::<f64>().map_err(|_| Error::ThresholdSyntax {
                        line,
                        reason: format!("cutoff {v:?} for {name:?} is not a number"),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            if cutoffs.iter().any(|c| !c.is_finite()) {
                return Err(Error::NonFiniteCutoff(name));
            }
            Ok((name, cutoffs))
        })
        .collect()
}
