mod common;

use std::fs;
use std::path::Path;
use std::process::Command;

use common::{cli, data_path};
use stumpscore::{
    c_index, evaluate, load_features, predict_scorecard, quantile_thresholds, split, train, FitConfig, Model,
    Thresholds,
};

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

const TOY: &str = "x,z,y\n1,0,0.0\n2,1,0.5\n3,0,2.0\n4,1,2.5\n";

#[test]
fn toy_train_one_iteration() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write(dir.path(), "toy.csv", TOY);
    let model = dir.path().join("m.json");
    let (code, out, err) = cli(&[
        "train",
        "--data",
        p(&csv),
        "--objective",
        "regression",
        "--target",
        "y",
        "--n-iter",
        "1",
        "--lr",
        "1",
        "--n-quantiles",
        "2",
        "--model",
        p(&model),
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("| Intercept |"), "{out}");
    let m = Model::load(&model).unwrap();
    assert!(m.card.count_rules() <= 2);
    assert_eq!(m.ensemble.stumps.len(), 1);
}

#[test]
fn retraining_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let csv = data_path("fair.csv");
    let run = |name: &str| {
        let model = dir.path().join(name);
        let (code, out, err) = cli(&[
            "train",
            "--data",
            p(&csv),
            "--objective",
            "binary",
            "--target",
            "affair",
            "--n-iter",
            "100",
            "--subsample",
            "0.7",
            "--seed",
            "3",
            "--model",
            p(&model),
        ]);
        assert_eq!(code, 0, "{err}");
        (fs::read(model).unwrap(), out)
    };
    assert_eq!(run("a.json"), run("b.json"));
}

#[test]
fn survival_without_event_is_schema_error() {
    let (code, out, err) = cli(&[
        "train",
        "--data",
        p(&data_path("heart.csv")),
        "--objective",
        "survival",
        "--time",
        "survival",
        "--model",
        "/tmp/unused.json",
    ]);
    assert_eq!(code, 1);
    assert!(out.is_empty());
    assert!(err.starts_with("stumpscore: error [schema]:"), "{err}");
    assert_eq!(err.lines().count(), 1);
}

#[test]
fn predict_matches_library_and_rounding() {
    let dir = tempfile::tempdir().unwrap();
    let csv = data_path("diabetes.csv");
    let model = dir.path().join("m.json");
    let (code, _, err) = cli(&[
        "train",
        "--data",
        p(&csv),
        "--objective",
        "regression",
        "--target",
        "target",
        "--n-iter",
        "200",
        "--model",
        p(&model),
    ]);
    assert_eq!(code, 0, "{err}");
    let m = Model::load(&model).unwrap();
    let features = load_features(&csv, &m.card.features).unwrap();
    let want = predict_scorecard(&m.card, &features).unwrap();

    let (code, out, err) = cli(&["predict", "--model", p(&model), "--data", p(&csv)]);
    assert_eq!(code, 0, "{err}");
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("score"));
    let got: Vec<f64> = lines.map(|l| l.parse().unwrap()).collect();
    assert_eq!(got.len(), want.len());
    for (a, b) in got.iter().zip(&want) {
        assert_eq!(a.to_bits(), b.to_bits());
    }

    let out_path = dir.path().join("pred.csv");
    let (code, out, _) = cli(&[
        "predict",
        "--model",
        p(&model),
        "--data",
        p(&csv),
        "--rounded",
        "0",
        "--output",
        p(&out_path),
    ]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let rounded: Vec<f64> = fs::read_to_string(out_path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.parse().unwrap())
        .collect();
    let want_rounded = m.card.predict_rounded(&features, 0).unwrap();
    assert_eq!(rounded, want_rounded);
    assert!(rounded.iter().all(|v| v.fract() == 0.0));
}

#[test]
fn binary_predict_has_probability_column() {
    let dir = tempfile::tempdir().unwrap();
    let csv = data_path("fair.csv");
    let model = dir.path().join("m.json");
    let (code, _, err) = cli(&[
        "train",
        "--data",
        p(&csv),
        "--objective",
        "binary",
        "--target",
        "affair",
        "--n-iter",
        "50",
        "--model",
        p(&model),
    ]);
    assert_eq!(code, 0, "{err}");
    let (code, out, _) = cli(&["predict", "--model", p(&model), "--data", p(&csv)]);
    assert_eq!(code, 0);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("score,probability"));
    for line in lines.take(50) {
        let (s, prob) = line.split_once(',').unwrap();
        let (s, prob): (f64, f64) = (s.parse().unwrap(), prob.parse().unwrap());
        assert!((prob - 1.0 / (1.0 + (-s).exp())).abs() < 1e-12);
    }
}

#[test]
fn predict_missing_column_names_it() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write(dir.path(), "toy.csv", TOY);
    let model = dir.path().join("m.json");
    let (code, _, _) = cli(&[
        "train",
        "--data",
        p(&csv),
        "--objective",
        "regression",
        "--target",
        "y",
        "--n-iter",
        "5",
        "--n-quantiles",
        "2",
        "--model",
        p(&model),
    ]);
    assert_eq!(code, 0);
    let partial = write(dir.path(), "partial.csv", "x\n1\n2\n");
    let (code, _, err) = cli(&["predict", "--model", p(&model), "--data", p(&partial)]);
    assert_eq!(code, 1);
    assert!(err.contains("\"z\""), "{err}");
}

#[test]
fn intercept_only_model_predicts_constant() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write(dir.path(), "toy.csv", TOY);
    let model = dir.path().join("m.json");
    let (code, out, err) = cli(&[
        "train",
        "--data",
        p(&csv),
        "--objective",
        "regression",
        "--target",
        "y",
        "--n-iter",
        "0",
        "--model",
        p(&model),
    ]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(out, "| Intercept | 1.2\n");
    let (_, out, _) = cli(&["predict", "--model", p(&model), "--data", p(&csv)]);
    assert_eq!(out, "score\n1.25\n1.25\n1.25\n1.25\n");
}

#[test]
fn print_matches_train_output() {
    let dir = tempfile::tempdir().unwrap();
    let csv = data_path("diabetes.csv");
    let model = dir.path().join("m.json");
    let (_, trained, _) = cli(&[
        "train",
        "--data",
        p(&csv),
        "--objective",
        "regression",
        "--target",
        "target",
        "--n-iter",
        "100",
        "--decimals",
        "2",
        "--model",
        p(&model),
    ]);
    let (code, printed, _) = cli(&["print", "--model", p(&model), "--decimals", "2"]);
    assert_eq!(code, 0);
    assert_eq!(trained, printed);
}

#[test]
fn labels_file_renames_binary_bins() {
    let dir = tempfile::tempdir().unwrap();
    let csv = data_path("cardio_survival.csv");
    let model = dir.path().join("m.json");
    let cutoffs = write(dir.path(), "cut.txt", "# clinical cutoffs\nsmoker: 1\n\n");
    let labels = write(dir.path(), "labels.txt", "smoker: No, Yes\n");
    let (code, out, err) = cli(&[
        "train",
        "--data",
        p(&csv),
        "--objective",
        "survival",
        "--time",
        "time",
        "--event",
        "event",
        "--lr",
        "1",
        "--n-iter",
        "300",
        "--thresholds",
        p(&cutoffs),
        "--labels",
        p(&labels),
        "--decimals",
        "2",
        "--model",
        p(&model),
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("| smoker | No"), "{out}");
    assert!(out.contains("| Yes"), "{out}");
    let m = Model::load(&model).unwrap();
    assert_eq!(m.card.count_rules(), 1);
    assert_eq!(m.card.tables[0].feature, "smoker");
}

#[test]
fn eval_reports_metric_line() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write(dir.path(), "sep.csv", "x,y\n1,0\n2,0\n3,0\n4,1\n5,1\n6,1\n");
    let model = dir.path().join("m.json");
    let (code, _, _) = cli(&[
        "train",
        "--data",
        p(&csv),
        "--objective",
        "binary",
        "--target",
        "y",
        "--n-iter",
        "20",
        "--n-quantiles",
        "2",
        "--model",
        p(&model),
    ]);
    assert_eq!(code, 0);
    let (code, out, _) = cli(&["eval", "--model", p(&model), "--data", p(&csv), "--target", "y"]);
    assert_eq!(code, 0);
    assert_eq!(out, "metric=AUC value=1 n=6 rules=1\n");
}

#[test]
fn eval_regression_beats_intercept_only() {
    let dir = tempfile::tempdir().unwrap();
    let csv = data_path("diabetes.csv");
    let model = dir.path().join("m.json");
    cli(&[
        "train",
        "--data",
        p(&csv),
        "--objective",
        "regression",
        "--target",
        "target",
        "--model",
        p(&model),
    ]);
    let (code, out, _) = cli(&[
        "eval",
        "--model",
        p(&model),
        "--data",
        p(&csv),
        "--target",
        "target",
    ]);
    assert_eq!(code, 0);
    let value: f64 = out
        .split_whitespace()
        .nth(1)
        .unwrap()
        .trim_start_matches("value=")
        .parse()
        .unwrap();
    let d = common::diabetes();
    let stumpscore::Outcome::Continuous(y) = &d.outcome else {
        unreachable!()
    };
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let baseline = y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / y.len() as f64;
    assert!(value < baseline, "{value} vs {baseline}");
}

#[test]
fn eval_survival_matches_brute_force() {
    let dir = tempfile::tempdir().unwrap();
    let csv = data_path("heart.csv");
    let model = dir.path().join("m.json");
    let (code, _, err) = cli(&[
        "train",
        "--data",
        p(&csv),
        "--objective",
        "survival",
        "--time",
        "survival",
        "--event",
        "censors",
        "--lr",
        "1",
        "--model",
        p(&model),
    ]);
    assert_eq!(code, 0, "{err}");
    let (code, out, _) = cli(&[
        "eval",
        "--model",
        p(&model),
        "--data",
        p(&csv),
        "--time",
        "survival",
        "--event",
        "censors",
    ]);
    assert_eq!(code, 0);
    let m = Model::load(&model).unwrap();
    let d = common::heart();
    let stumpscore::Outcome::Survival { times, events } = &d.outcome else {
        unreachable!()
    };
    let s = m.card.predict(&d.features).unwrap();
    let (mut conc, mut pairs) = (0.0, 0.0);
    for i in 0..times.len() {
        for j in 0..times.len() {
            if events[i] && times[i] < times[j] {
                pairs += 1.0;
                conc += if s[i] > s[j] {
                    1.0
                } else if s[i] == s[j] {
                    0.5
                } else {
                    0.0
                };
            }
        }
    }
    let expected = c_index(times, events, &s).unwrap();
    assert_eq!(expected, conc / pairs);
    assert_eq!(
        out,
        format!(
            "metric=C-index value={expected} n=69 rules={}\n",
            m.card.count_rules()
        )
    );
}

#[test]
fn bench_single_repeat_is_train_plus_eval() {
    let csv = data_path("fair.csv");
    let (code, out, err) = cli(&[
        "bench",
        "--data",
        p(&csv),
        "--objective",
        "binary",
        "--target",
        "affair",
        "--n-iter",
        "80",
        "--repeats",
        "1",
        "--seed",
        "4",
    ]);
    assert_eq!(code, 0, "{err}");
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "repeat,seed,metric,value,n_test,rules");
    assert!(lines[2].starts_with("# summary metric=AUC "));

    let dataset = common::fair();
    let (train_set, test_set) = split(&dataset, 0.3, 4).unwrap();
    let config = FitConfig {
        n_iter: 80,
        seed: 4,
        ..Default::default()
    };
    let model = train(&train_set, &Thresholds::Quantiles, &config).unwrap();
    let report = evaluate(&model.card, &test_set).unwrap();
    assert_eq!(
        lines[1],
        format!(
            "0,4,AUC,{},{},{}",
            report.value,
            test_set.n_rows(),
            model.card.count_rules()
        )
    );
}

#[test]
fn bench_reruns_identical_and_rules_bounded() {
    let csv = data_path("diabetes.csv");
    let args = [
        "bench",
        "--data",
        p(&csv),
        "--objective",
        "regression",
        "--target",
        "target",
        "--n-iter",
        "60",
        "--repeats",
        "5",
        "--seed",
        "9",
    ];
    let (code, a, err) = cli(&args);
    assert_eq!(code, 0, "{err}");
    let (_, b, _) = cli(&args);
    assert_eq!(a, b);
    assert_eq!(a.lines().count(), 7);
    let total_cutoffs = quantile_thresholds(&common::diabetes(), 4)
        .unwrap()
        .total_cutoffs();
    let summary = a.lines().last().unwrap();
    let mean_rules: f64 = summary
        .split_whitespace()
        .find_map(|kv| kv.strip_prefix("mean_rules="))
        .unwrap()
        .parse()
        .unwrap();
    assert!(mean_rules <= total_cutoffs as f64);
}

#[test]
fn bad_cell_reports_row_and_column() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write(dir.path(), "bad.csv", "x,y\n1,0\nabc,1\n");
    let (code, _, err) = cli(&[
        "train",
        "--data",
        p(&csv),
        "--objective",
        "binary",
        "--target",
        "y",
        "--model",
        "/tmp/unused.json",
    ]);
    assert_eq!(code, 1);
    assert!(
        err.starts_with("stumpscore: error [load]: row 2 (line 3), column \"x\""),
        "{err}"
    );
}

#[test]
fn binary_exit_codes() {
    let exe = env!("CARGO_BIN_EXE_stumpscore");
    let help = Command::new(exe).arg("--help").output().unwrap();
    assert_eq!(help.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&help.stdout).contains("bench"));

    let usage = Command::new(exe).args(["train", "--bogus"]).output().unwrap();
    assert_eq!(usage.status.code(), Some(1));

    let missing = Command::new(exe)
        .args(["print", "--model", "/nonexistent/model.json"])
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(1));
    let err = String::from_utf8_lossy(&missing.stderr);
    assert!(err.starts_with("stumpscore: error [load]:"), "{err}");
}

#[test]
fn corrupt_model_file_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(dir.path(), "m.json", "{\"format_version\": 1}");
    let (code, _, err) = cli(&["print", "--model", p(&model)]);
    assert_ne!(code, 0);
    assert!(err.starts_with("stumpscore: error [model]:"), "{err}");
}
