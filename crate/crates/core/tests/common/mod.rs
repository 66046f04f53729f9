#![allow(dead_code)]

use std::path::{Path, PathBuf};

use stumpscore::{load_csv, Dataset, OutcomeColumns, Schema};

pub fn data_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

pub fn diabetes() -> Dataset {
    load(
        "diabetes.csv",
        OutcomeColumns::Continuous {
            target: "target".into(),
        },
    )
}

pub fn fair() -> Dataset {
    load(
        "fair.csv",
        OutcomeColumns::Binary {
            target: "affair".into(),
        },
    )
}

pub fn cardio() -> Dataset {
    load(
        "cardio_survival.csv",
        OutcomeColumns::Survival {
            time: "time".into(),
            event: "event".into(),
        },
    )
}

pub fn heart() -> Dataset {
    load(
        "heart.csv",
        OutcomeColumns::Survival {
            time: "survival".into(),
            event: "censors".into(),
        },
    )
}

fn load(name: &str, outcome: OutcomeColumns) -> Dataset {
    load_csv(
        data_path(name),
        &Schema {
            outcome,
            features: None,
        },
    )
    .unwrap()
}

/// Runs the CLI in-process and returns (exit code, stdout, stderr).
pub fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["stumpscore"];
    argv.extend_from_slice(args);
    let code = stumpscore::cli::run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}
