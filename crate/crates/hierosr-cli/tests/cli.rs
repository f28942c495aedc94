//! End-to-end tests driving the `hierosr` binary.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_hierosr")
}

fn run(dir: &TempDir, args: &[&str]) -> Output {
    Command::new(bin())
        .current_dir(dir.path())
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_ok(dir: &TempDir, args: &[&str]) -> String {
    let out = run(dir, args);
    assert!(
        out.status.success(),
        "command {args:?} failed:\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn run_err(dir: &TempDir, args: &[&str]) -> String {
    let out = run(dir, args);
    assert!(!out.status.success(), "command {args:?} unexpectedly succeeded");
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn unseen_from_truth(path: &Path) -> String {
    let value: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let unseen: Vec<String> = value["unseen_classes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap().to_string())
        .collect();
    unseen.join(",")
}

/// synth -> split -> build -> train -> eval -> classify -> export, with the
/// eval on near-noiseless separable clusters reaching utility 1.0.
#[test]
fn full_pipeline_on_separable_synthetic_data() {
    let dir = TempDir::new().unwrap();
    run_ok(
        &dir,
        &[
            "synth", "--classes", "6", "--unseen", "2", "--dims", "12",
            "--samples-per-class", "30", "--noise-scale", "0.0005", "--seed", "11",
            "--output", "data.csv", "--truth", "truth.json",
        ],
    );
    let unseen = unseen_from_truth(&dir.path().join("truth.json"));
    run_ok(
        &dir,
        &[
            "split", "--input", "data.csv", "--unseen", &unseen, "--test-fraction", "0.2",
            "--seed", "11", "--train-output", "train.csv", "--test-output", "test.csv",
        ],
    );
    run_ok(
        &dir,
        &[
            "build", "--input", "train.csv", "--metric", "euclidean", "--linkage", "average",
            "--output", "model.json",
        ],
    );
    run_ok(
        &dir,
        &["train", "--input", "train.csv", "--model", "model.json", "--percentile", "95"],
    );
    let eval_out = run_ok(
        &dir,
        &[
            "eval", "--input", "test.csv", "--model", "model.json", "--mode", "score",
            "--depth-bonus", "5", "--output", "report.json", "--format", "json",
        ],
    );
    assert!(eval_out.contains("utility            1.000000"), "{eval_out}");
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report["utility"], 1.0);
    assert_eq!(report["auc_roc"], 1.0);

    // Classify writes one row per input sample.
    run_ok(
        &dir,
        &[
            "classify", "--input", "test.csv", "--model", "model.json", "--mode", "traversal",
            "--output", "predictions.csv",
        ],
    );
    let predictions = std::fs::read_to_string(dir.path().join("predictions.csv")).unwrap();
    let test_rows = std::fs::read_to_string(dir.path().join("test.csv"))
        .unwrap()
        .lines()
        .count();
    assert_eq!(predictions.lines().count(), test_rows);

    run_ok(
        &dir,
        &[
            "export", "--model", "model.json", "--format", "dot", "--annotate", "report.json",
            "--output", "tree.dot",
        ],
    );
    let dot = std::fs::read_to_string(dir.path().join("tree.dot")).unwrap();
    assert!(dot.starts_with("digraph hierarchy {"));
    assert!(dot.contains("ccc("));

    run_ok(
        &dir,
        &["export", "--model", "model.json", "--format", "newick", "--output", "tree.nwk"],
    );
    let newick = std::fs::read_to_string(dir.path().join("tree.nwk")).unwrap();
    assert!(newick.trim_end().ends_with(';'));
}

/// Same flags and seed -> byte-identical artifacts, including the report.
#[test]
fn pipeline_outputs_are_reproducible() {
    let dir = TempDir::new().unwrap();
    for round in ["a", "b"] {
        run_ok(
            &dir,
            &[
                "synth", "--classes", "5", "--unseen", "1", "--dims", "8",
                "--samples-per-class", "20", "--seed", "3",
                "--output", &format!("data_{round}.csv"),
                "--truth", &format!("truth_{round}.json"),
            ],
        );
        let unseen = unseen_from_truth(&dir.path().join(format!("truth_{round}.json")));
        run_ok(
            &dir,
            &[
                "split", "--input", &format!("data_{round}.csv"), "--unseen", &unseen,
                "--seed", "3",
                "--train-output", &format!("train_{round}.csv"),
                "--test-output", &format!("test_{round}.csv"),
            ],
        );
        run_ok(
            &dir,
            &[
                "build", "--input", &format!("train_{round}.csv"),
                "--output", &format!("model_{round}.json"),
            ],
        );
        run_ok(
            &dir,
            &[
                "train", "--input", &format!("train_{round}.csv"),
                "--model", &format!("model_{round}.json"),
            ],
        );
        run_ok(
            &dir,
            &[
                "eval", "--input", &format!("test_{round}.csv"),
                "--model", &format!("model_{round}.json"),
                "--output", &format!("report_{round}.json"),
            ],
        );
    }
    for artifact in ["data", "train", "test"] {
        assert_eq!(
            std::fs::read(dir.path().join(format!("{artifact}_a.csv"))).unwrap(),
            std::fs::read(dir.path().join(format!("{artifact}_b.csv"))).unwrap(),
            "{artifact} not reproducible"
        );
    }
    for artifact in ["truth", "model", "report"] {
        assert_eq!(
            std::fs::read(dir.path().join(format!("{artifact}_a.json"))).unwrap(),
            std::fs::read(dir.path().join(format!("{artifact}_b.json"))).unwrap(),
            "{artifact} not reproducible"
        );
    }
}

#[test]
fn split_is_a_partition_and_respects_unseen_count() {
    let dir = TempDir::new().unwrap();
    run_ok(
        &dir,
        &[
            "synth", "--classes", "8", "--unseen", "2", "--dims", "4",
            "--samples-per-class", "10", "--seed", "5", "--output", "data.csv",
        ],
    );
    run_ok(
        &dir,
        &[
            "split", "--input", "data.csv", "--unseen-count", "2", "--seed", "9",
            "--train-output", "train.csv", "--test-output", "test.csv",
        ],
    );
    let ids = |name: &str| -> BTreeSet<String> {
        std::fs::read_to_string(dir.path().join(name))
            .unwrap()
            .lines()
            .skip(1)
            .map(|l| l.split(',').next().unwrap().to_string())
            .collect()
    };
    let train_ids = ids("train.csv");
    let test_ids = ids("test.csv");
    assert!(train_ids.is_disjoint(&test_ids));
    assert_eq!(train_ids.len() + test_ids.len(), 100);
    let train_classes: BTreeSet<String> = std::fs::read_to_string(dir.path().join("train.csv"))
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().to_string())
        .collect();
    assert_eq!(train_classes.len(), 8);
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = TempDir::new().unwrap();
    std::fs::write(
        dir.path().join("synth.json"),
        r#"{"classes": 4, "unseen": 1, "dims": 6, "samples-per-class": 5, "seed": 2, "output": "from_config.csv"}"#,
    )
    .unwrap();
    // Flag --classes 5 wins over the config's 4; everything else from config.
    run_ok(&dir, &["synth", "--config", "synth.json", "--classes", "5"]);
    let text = std::fs::read_to_string(dir.path().join("from_config.csv")).unwrap();
    let header = text.lines().next().unwrap();
    assert_eq!(header.split(',').count(), 2 + 6);
    let classes: BTreeSet<&str> = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(classes.len(), 5 + 1);
    assert_eq!(text.lines().count() - 1, 6 * 5);
}

#[test]
fn build_needs_at_least_two_classes() {
    let dir = TempDir::new().unwrap();
    std::fs::write(
        dir.path().join("one.csv"),
        "sample_id,label,f0,f1\ns1,only,0.0,0.0\ns2,only,1.0,0.0\n",
    )
    .unwrap();
    let stderr = run_err(&dir, &["build", "--input", "one.csv", "--output", "model.json"]);
    assert!(stderr.contains("need >= 2 classes"), "{stderr}");
}

#[test]
fn diagnostics_on_common_mistakes() {
    let dir = TempDir::new().unwrap();
    run_ok(
        &dir,
        &[
            "synth", "--classes", "3", "--unseen", "1", "--dims", "4",
            "--samples-per-class", "6", "--seed", "1",
            "--output", "data.csv", "--truth", "truth.json",
        ],
    );
    let unseen = unseen_from_truth(&dir.path().join("truth.json"));
    run_ok(
        &dir,
        &[
            "split", "--input", "data.csv", "--unseen", &unseen,
            "--train-output", "train.csv", "--test-output", "test.csv",
        ],
    );
    run_ok(&dir, &["build", "--input", "train.csv", "--output", "model.json"]);

    // Classifying with an untrained model.
    let stderr = run_err(
        &dir,
        &["classify", "--input", "test.csv", "--model", "model.json", "--output", "p.csv"],
    );
    assert!(stderr.contains("train"), "{stderr}");

    // Unknown unseen class.
    let stderr = run_err(
        &dir,
        &[
            "split", "--input", "data.csv", "--unseen", "not_a_class",
            "--train-output", "t.csv", "--test-output", "u.csv",
        ],
    );
    assert!(stderr.contains("unknown class"), "{stderr}");

    // Eval on a closed-set file (no unseen classes present).
    run_ok(&dir, &["train", "--input", "train.csv", "--model", "model.json"]);
    let stderr = run_err(
        &dir,
        &["eval", "--input", "train.csv", "--model", "model.json", "--output", "r.json"],
    );
    assert!(stderr.contains("unseen"), "{stderr}");

    // Missing required option.
    let stderr = run_err(&dir, &["build", "--output", "model.json"]);
    assert!(stderr.contains("--input"), "{stderr}");

    // Dimension mismatch between input and model.
    std::fs::write(
        dir.path().join("wrong_dim.csv"),
        "sample_id,label,f0\nx1,class_00,0.5\nx2,class_01,1.5\n",
    )
    .unwrap();
    let stderr = run_err(
        &dir,
        &["classify", "--input", "wrong_dim.csv", "--model", "model.json", "--output", "p.csv"],
    );
    assert!(stderr.contains("dimension"), "{stderr}");

    // Bad flag values.
    let stderr = run_err(
        &dir,
        &[
            "eval", "--input", "test.csv", "--model", "model.json", "--mode", "psychic",
            "--output", "r.json",
        ],
    );
    assert!(stderr.contains("psychic"), "{stderr}");
}
