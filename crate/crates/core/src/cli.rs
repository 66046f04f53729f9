//! Command-line interface: `train`, `predict`, `print`, `eval` and `bench`.
//!
//! Exit codes: 0 on success, 1 for invalid input or usage, 2 for internal
//! failures.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::boosting::FitConfig;
use crate::data::{
    load_csv, load_features, parse_named_lists, parse_thresholds, Dataset, OutcomeColumns, Schema,
};
use crate::error::{Error, Result};
use crate::estimator::{train, Thresholds};
use crate::losses::Objective;
use crate::metrics::{evaluate, mean_and_sd, split};
use crate::model::Model;
use crate::scorecard::{render, RenderOptions};

#[derive(Debug, Parser)]
#[command(
    name = "stumpscore",
    version,
    about = "Point-based risk scores from boosted decision stumps"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a model, write it to --model and print its score table.
    Train(TrainArgs),
    /// Write one prediction per input row as CSV.
    Predict(PredictArgs),
    /// Print the score table of a saved model.
    Print(PrintArgs),
    /// Evaluate a saved model on labeled data.
    Eval(EvalArgs),
    /// Repeated random train/test splits: fit and evaluate on each.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ObjectiveArg {
    #[value(alias = "continuous", alias = "squared-error")]
    Regression,
    #[value(alias = "logistic", alias = "classification")]
    Binary,
    #[value(alias = "survival-rank")]
    Survival,
}

impl From<ObjectiveArg> for Objective {
    fn from(arg: ObjectiveArg) -> Self {
        match arg {
            ObjectiveArg::Regression => Objective::SquaredError,
            ObjectiveArg::Binary => Objective::Logistic,
            ObjectiveArg::Survival => Objective::SurvivalRank,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ColumnArgs {
    /// Outcome column for regression and binary objectives.
    #[arg(long)]
    pub target: Option<String>,
    /// Survival time column.
    #[arg(long)]
    pub time: Option<String>,
    /// Event indicator column (1 = event, 0 = censored).
    #[arg(long)]
    pub event: Option<String>,
    /// Comma-separated feature columns; default is every non-outcome column.
    #[arg(long, value_delimiter = ',')]
    pub features: Option<Vec<String>>,
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    #[arg(long, default_value_t = 500)]
    pub n_iter: usize,
    #[arg(long, default_value_t = 0.05)]
    pub lr: f64,
    #[arg(long, default_value_t = 4)]
    pub n_quantiles: usize,
    #[arg(long, default_value_t = 1.0)]
    pub subsample: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Cutoffs file, one `name: v1, v2, ...` line per feature.
    #[arg(long)]
    pub thresholds: Option<PathBuf>,
    /// With --thresholds, use quantile cutoffs for features the file omits.
    #[arg(long)]
    pub merge_quantiles: bool,
}

impl FitArgs {
    fn config(&self) -> FitConfig {
        FitConfig {
            n_iter: self.n_iter,
            learning_rate: self.lr,
            n_quantiles: self.n_quantiles,
            subsample: self.subsample,
            seed: self.seed,
        }
    }

    fn thresholds(&self) -> Result<Thresholds> {
        match &self.thresholds {
            None => Ok(Thresholds::Quantiles),
            Some(path) => Ok(Thresholds::User {
                cutoffs: parse_thresholds(&read_text(path)?)?,
                merge_quantiles: self.merge_quantiles,
            }),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, value_enum)]
    pub objective: ObjectiveArg,
    #[command(flatten)]
    pub columns: ColumnArgs,
    #[command(flatten)]
    pub fit: FitArgs,
    /// Output model file.
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub decimals: usize,
    /// Display labels for binary variables, one `name: low, high` line each.
    #[arg(long)]
    pub labels: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    /// Output CSV; standard output when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Sum points rounded to this many decimals, as read off the printed table.
    #[arg(long)]
    pub rounded: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct PrintArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub decimals: usize,
    #[arg(long)]
    pub labels: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub target: Option<String>,
    #[arg(long)]
    pub time: Option<String>,
    #[arg(long)]
    pub event: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, value_enum)]
    pub objective: ObjectiveArg,
    #[command(flatten)]
    pub columns: ColumnArgs,
    #[command(flatten)]
    pub fit: FitArgs,
    #[arg(long, default_value_t = 10)]
    pub repeats: usize,
    #[arg(long, default_value_t = 0.3)]
    pub test_frac: f64,
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_owned(),
        source: e,
    })
}

fn outcome_columns(
    objective: Objective,
    target: Option<&String>,
    time: Option<&String>,
    event: Option<&String>,
) -> Result<OutcomeColumns> {
    match objective {
        Objective::SquaredError | Objective::Logistic => {
            let target = target
                .cloned()
                .ok_or_else(|| Error::Schema(format!("the {objective} objective requires --target")))?;
            Ok(if objective == Objective::Logistic {
                OutcomeColumns::Binary { target }
            } else {
                OutcomeColumns::Continuous { target }
            })
        }
        Objective::SurvivalRank => match (time, event) {
            (Some(time), Some(event)) => Ok(OutcomeColumns::Survival {
                time: time.clone(),
                event: event.clone(),
            }),
            _ => Err(Error::Schema(
                "the survival objective requires --time and --event".into(),
            )),
        },
    }
}

fn load_labeled(path: &Path, objective: Objective, columns: &ColumnArgs) -> Result<Dataset> {
    let schema = Schema {
        outcome: outcome_columns(
            objective,
            columns.target.as_ref(),
            columns.time.as_ref(),
            columns.event.as_ref(),
        )?,
        features: columns.features.clone(),
    };
    load_csv(path, &schema)
}

fn render_options(decimals: usize, labels: Option<&PathBuf>) -> Result<RenderOptions> {
    let mut options = RenderOptions::new(decimals);
    if let Some(path) = labels {
        let mut map = BTreeMap::new();
        for (name, values) in parse_named_lists(&read_text(path)?)? {
            match <[String; 2]>::try_from(values) {
                Ok([lo, hi]) => {
                    map.insert(name, (lo, hi));
                }
                Err(_) => {
                    return Err(Error::Schema(format!(
                        "labels for {name:?} must be exactly two values"
                    )))
                }
            }
        }
        options.labels = map;
    }
    Ok(options)
}

fn write_out(out: &mut dyn Write, text: &str) -> Result<()> {
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        // the reader went away, e.g. `| head`
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => other.map_err(|e| Error::Internal(format!("writing output: {e}"))),
    }
}

pub fn cmd_train(args: &TrainArgs, out: &mut dyn Write) -> Result<()> {
    let objective = Objective::from(args.objective);
    let dataset = load_labeled(&args.data, objective, &args.columns)?;
    let thresholds = args.fit.thresholds()?;
    let options = render_options(args.decimals, args.labels.as_ref())?;
    let model = train(&dataset, &thresholds, &args.fit.config())?;
    model.save(&args.model)?;
    write_out(out, &render(&model.card, &options))
}

/// Prediction CSV: `score`, plus `probability` for logistic models.
pub fn predictions_csv(model: &Model, scores: &[f64]) -> Result<String> {
    let mut text = String::new();
    if model.card.objective == Objective::Logistic {
        text.push_str("score,probability\n");
        for &s in scores {
            text.push_str(&format!("{s},{}\n", model.card.to_probability(s)?));
        }
    } else {
        text.push_str("score\n");
        for &s in scores {
            text.push_str(&format!("{s}\n"));
        }
    }
    Ok(text)
}

pub fn cmd_predict(args: &PredictArgs, out: &mut dyn Write) -> Result<()> {
    let model = Model::load(&args.model)?;
    let features = load_features(&args.data, &model.card.features)?;
    let scores = match args.rounded {
        Some(decimals) => model.card.predict_rounded(&features, decimals)?,
        None => model.card.predict(&features)?,
    };
    let text = predictions_csv(&model, &scores)?;
    match &args.output {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Io {
            path: path.clone(),
            source: e,
        }),
        None => write_out(out, &text),
    }
}

pub fn cmd_print(args: &PrintArgs, out: &mut dyn Write) -> Result<()> {
    let model = Model::load(&args.model)?;
    let options = render_options(args.decimals, args.labels.as_ref())?;
    write_out(out, &render(&model.card, &options))
}

pub fn cmd_eval(args: &EvalArgs, out: &mut dyn Write) -> Result<()> {
    let model = Model::load(&args.model)?;
    let columns = ColumnArgs {
        target: args.target.clone(),
        time: args.time.clone(),
        event: args.event.clone(),
        features: Some(model.card.features.clone()),
    };
    let dataset = load_labeled(&args.data, model.card.objective, &columns)?;
    let report = evaluate(&model.card, &dataset)?;
    write_out(
        out,
        &format!(
            "metric={} value={} n={} rules={}\n",
            report.metric.name(),
            report.value,
            report.n_samples,
            report.rule_count.unwrap_or(0)
        ),
    )
}

pub fn cmd_bench(args: &BenchArgs, out: &mut dyn Write) -> Result<()> {
    if args.repeats == 0 {
        return Err(Error::InvalidConfig("--repeats must be at least 1".into()));
    }
    let objective = Objective::from(args.objective);
    let dataset = load_labeled(&args.data, objective, &args.columns)?;
    let thresholds = args.fit.thresholds()?;
    let mut text = String::from("repeat,seed,metric,value,n_test,rules\n");
    let mut values = Vec::with_capacity(args.repeats);
    let mut rules = Vec::with_capacity(args.repeats);
    let mut metric_name = "";
    for r in 0..args.repeats {
        let seed = args.fit.seed.wrapping_add(r as u64);
        let (train_set, test_set) = split(&dataset, args.test_frac, seed)?;
        let config = FitConfig {
            seed,
            ..args.fit.config()
        };
        let model = train(&train_set, &thresholds, &config)?;
        let report = evaluate(&model.card, &test_set)?;
        let n_rules = report.rule_count.unwrap_or(0);
        metric_name = report.metric.name();
        text.push_str(&format!(
            "{r},{seed},{metric_name},{},{},{n_rules}\n",
            report.value, report.n_samples
        ));
        values.push(report.value);
        rules.push(n_rules as f64);
    }
    let (mean, sd) = mean_and_sd(&values);
    let (mean_rules, _) = mean_and_sd(&rules);
    text.push_str(&format!(
        "# summary metric={metric_name} mean={mean:.6} sd={sd:.6} mean_rules={mean_rules:.2} repeats={}\n",
        args.repeats
    ));
    write_out(out, &text)
}

pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Train(a) => cmd_train(a, out),
        Command::Predict(a) => cmd_predict(a, out),
        Command::Print(a) => cmd_print(a, out),
        Command::Eval(a) => cmd_eval(a, out),
        Command::Bench(a) => cmd_bench(a, out),
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code. Diagnostics go to `err` as a single line.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(rendered.as_bytes())
            } else {
                err.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "stumpscore: error [{}]: {e}", e.stage());
            if e.is_user_error() {
                1
            } else {
                2
            }
        }
    }
}
