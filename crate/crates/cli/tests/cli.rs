//! End-to-end tests that drive the installed binary through the same flows a
//! user would: corpus creation, model training, annotation, evaluation, and
//! full runs, plus the exit-code contract.

use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn synthner(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_synthner"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn assert_success(output: &Output) {
    assert!(
        output.status.success(),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

#[test]
fn template_train_annotate_eval_round_trip() {
    let dir = TempDir::new().unwrap();
    let path = dir.path();

    assert_success(&synthner(
        &["template", "--docs", "80", "--seed", "5", "--out", "gold.jsonl"],
        path,
    ));
    assert_success(&synthner(
        &[
            "train-ner",
            "--input",
            "gold.jsonl",
            "--epochs",
            "3",
            "--out",
            "tagger.json",
        ],
        path,
    ));
    assert_success(&synthner(
        &[
            "annotate",
            "--model",
            "tagger.json",
            "--input",
            "gold.jsonl",
            "--out",
            "predicted.jsonl",
        ],
        path,
    ));
    let eval = synthner(
        &["eval", "--gold", "gold.jsonl", "--predicted", "predicted.jsonl"],
        path,
    );
    assert_success(&eval);
    let report: serde_json::Value = serde_json::from_str(&stdout(&eval)).unwrap();
    // Evaluated on its own training data, the tagger should be near-perfect.
    assert!(report["micro_f1"].as_f64().unwrap() > 0.9);
}

#[test]
fn adapt_and_synth_produce_a_corpus() {
    let dir = TempDir::new().unwrap();
    let path = dir.path();

    assert_success(&synthner(
        &["template", "--docs", "60", "--seed", "8", "--out", "gold.jsonl"],
        path,
    ));
    assert_success(&synthner(
        &["adapt", "--input", "gold.jsonl", "--out", "lm.json"],
        path,
    ));
    assert_success(&synthner(
        &[
            "synth",
            "--model",
            "lm.json",
            "--input",
            "gold.jsonl",
            "--samples-per-prompt",
            "2",
            "--seed",
            "1",
            "--out",
            "synthetic.jsonl",
        ],
        path,
    ));
    let text = std::fs::read_to_string(path.join("synthetic.jsonl")).unwrap();
    assert_eq!(text.lines().count(), 60 * 2);

    let diversity = synthner(&["diversity", "--input", "synthetic.jsonl"], path);
    assert_success(&diversity);
    let report: serde_json::Value = serde_json::from_str(&stdout(&diversity)).unwrap();
    assert!(report["lexical_diversity"].as_f64().unwrap() > 0.0);

    let privacy = synthner(
        &[
            "privacy",
            "--reference",
            "gold.jsonl",
            "--candidate",
            "synthetic.jsonl",
            "--n",
            "3,5",
        ],
        path,
    );
    assert_success(&privacy);
    let reports: serde_json::Value = serde_json::from_str(&stdout(&privacy)).unwrap();
    assert_eq!(reports.as_array().unwrap().len(), 2);
}

#[test]
fn split_writes_a_fold_plan() {
    let dir = TempDir::new().unwrap();
    let path = dir.path();
    assert_success(&synthner(
        &["template", "--docs", "50", "--out", "gold.conll", "--format", "conll"],
        path,
    ));
    assert_success(&synthner(
        &["split", "--input", "gold.conll", "--folds", "5", "--out", "plan.json"],
        path,
    ));
    let plan: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(path.join("plan.json")).unwrap()).unwrap();
    assert_eq!(plan["folds"].as_array().unwrap().len(), 5);
}

#[test]
fn run_with_config_file_and_flag_overrides() {
    let dir = TempDir::new().unwrap();
    let path = dir.path();
    assert_success(&synthner(
        &["template", "--docs", "120", "--seed", "2", "--out", "gold.jsonl"],
        path,
    ));
    std::fs::write(
        path.join("exp.toml"),
        r#"
corpus_path = "gold.jsonl"
corpus_format = "jsonl"
seed = 3
synth_multiplier = 1.0

[annotator]
kind = "native"
epochs = 2
chunk_words = 128

[metrics]
n_values = [3]
"#,
    )
    .unwrap();
    let run = synthner(
        &[
            "run",
            "--config",
            "exp.toml",
            "--folds",
            "3",
            "--report",
            "json",
            "--out",
            "results.json",
        ],
        path,
    );
    assert_success(&run);
    let results: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(path.join("results.json")).unwrap()).unwrap();
    let run_result = &results["cells"][0][1];
    // The --folds flag must override the file's default of 5.
    assert_eq!(run_result["folds"].as_array().unwrap().len(), 3);
    assert_eq!(run_result["config"]["seed"].as_u64().unwrap(), 3);

    let report = synthner(
        &["report", "--input", "results.json", "--format", "csv"],
        path,
    );
    assert_success(&report);
    assert!(stdout(&report).starts_with("cell,"));
}

#[test]
fn validation_errors_exit_with_code_1() {
    let dir = TempDir::new().unwrap();
    let path = dir.path();
    let missing = synthner(&["split", "--input", "nope.conll", "--out", "plan.json"], path);
    assert_eq!(missing.status.code(), Some(1));

    assert_success(&synthner(&["template", "--docs", "20", "--out", "g.jsonl"], path));
    let bad_fraction = synthner(
        &["run", "--corpus", "g.jsonl", "--da-fraction", "1.5"],
        path,
    );
    assert_eq!(bad_fraction.status.code(), Some(1));
}

#[test]
fn remote_failures_exit_with_code_2() {
    let dir = TempDir::new().unwrap();
    let path = dir.path();
    assert_success(&synthner(&["template", "--docs", "20", "--out", "g.jsonl"], path));
    let unreachable = synthner(
        &[
            "annotate",
            "--endpoint",
            "http://127.0.0.1:1",
            "--input",
            "g.jsonl",
            "--out",
            "a.jsonl",
        ],
        path,
    );
    assert_eq!(unreachable.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&unreachable.stderr).contains("error:"));
}

#[test]
fn partial_runs_exit_with_code_3() {
    let dir = TempDir::new().unwrap();
    let path = dir.path();
    assert_success(&synthner(
        &["template", "--docs", "60", "--out", "g.jsonl"],
        path,
    ));
    let partial = synthner(
        &[
            "run",
            "--corpus",
            "g.jsonl",
            "--corpus-format",
            "jsonl",
            "--annotator-endpoint",
            "http://127.0.0.1:1",
            "--synth-multiplier",
            "1.0",
        ],
        path,
    );
    assert_eq!(partial.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&partial.stderr).contains("partial:"));
}
