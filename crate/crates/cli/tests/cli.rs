use std::path::PathBuf;
use std::process::{Command, Output};

fn sri(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sri"))
        .args(args)
        .env_remove("SRI_DATA_DIR")
        .output()
        .expect("spawn sri")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn data_csv() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/data/sri_2025.csv")
}

#[test]
fn reported_scores_rank_the_uk_first() {
    let out = sri(&["score", "--data", "sri_2025.csv", "--use-reported"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let first = text.lines().find(|l| l.starts_with("| 1 |")).unwrap();
    assert!(first.contains("United Kingdom") && first.contains("49.00"), "{first}");
}

#[test]
fn explicit_path_matches_bundled_copy() {
    let path = data_csv();
    let a = sri(&["score", "--data", path.to_str().unwrap(), "--format", "csv"]);
    let b = sri(&["score", "--format", "csv"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn missing_file_is_reported_with_kind() {
    let out = sri(&["score", "--data", "missing.csv"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).starts_with("ERROR:FileNotFound"), "{}", stderr(&out));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(sri(&["bogus"]).status.code(), Some(2));
    assert_eq!(sri(&["robustness"]).status.code(), Some(2));
    assert_eq!(sri(&["robustness", "--weights", "--aggregation"]).status.code(), Some(2));
}

#[test]
fn invalid_dataset_lists_violations() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    let text = std::fs::read_to_string(data_csv()).unwrap().replacen(",55,35,70,20,40,75,", ",155,35,70,20,40,75,", 1);
    std::fs::write(&path, text).unwrap();
    let out = sri(&["validate", "--data", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.starts_with("ERROR:Validation"), "{err}");
    assert!(err.contains("United Kingdom"), "{err}");
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["robustness", "--weights", "--format", "json"][..],
        &["stats", "--format", "csv"][..],
        &["chart", "--kind", "heatmap"][..],
    ] {
        let a = sri(args);
        let b = sri(args);
        assert!(a.status.success(), "{args:?}: {}", stderr(&a));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn weight_sweep_covers_family_and_equal_weights() {
    let out = sri(&["robustness", "--weights", "--format", "csv"]);
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().skip(1).filter(|l| !l.is_empty()).collect();
    assert_eq!(rows.len(), 9, "{text}");
    assert!(rows.last().unwrap().starts_with("equal,"));

    let out = sri(&["robustness", "--weights", "--delta", "10", "--targets", "public_discourse", "--format", "csv"]);
    let text = stdout(&out);
    assert!(text.contains("public_discourse+10pp"), "{text}");
    assert!(text.contains("public_discourse-10pp"), "{text}");
}

#[test]
fn full_report_prints_one_line_per_criterion() {
    let out = sri(&["report", "--full"]);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().filter(|l| l.starts_with("criterion ")).collect();
    assert_eq!(lines.len(), 14, "{text}");
    for line in &lines {
        assert!(line.contains(" PASS ") || line.contains(" FAIL "), "{line}");
    }
    // The exit status tracks the criteria; a failing one is named on stderr.
    let any_fail = lines.iter().any(|l| l.contains(" FAIL "));
    assert_eq!(out.status.success(), !any_fail);
    if any_fail {
        assert!(stderr(&out).starts_with("ERROR:ReplicationMismatch"));
    }
}

#[test]
fn chart_written_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("lollipop.svg");
    let out = sri(&["chart", "--kind", "lollipop", "--out", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(out.stdout.is_empty());
    let svg = std::fs::read_to_string(&path).unwrap();
    assert!(svg.starts_with("<svg"));
    assert_eq!(svg.matches("class=\"mark\"").count(), 31);
}

#[test]
fn group_commands_reject_unknown_dimension() {
    let out = sri(&["groups", "--dimension", "climate"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).starts_with("ERROR:UnknownDimension"), "{}", stderr(&out));
}

#[test]
fn stability_reads_run_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("runs.csv");
    std::fs::write(&path, "jurisdiction,run_id,overall\nA,1,30\nA,2,34\nA,3,32\nB,1,50\nB,2,50\n").unwrap();
    let out = sri(&["stability", "--runs", path.to_str().unwrap(), "--format", "json"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["qualifying"], 1);
    assert!((v["mean_sd"].as_f64().unwrap() - 2.0).abs() < 1e-9);
}

#[test]
fn config_overrides_weights() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("config.json");
    std::fs::write(
        &path,
        r#"{"weights": {"policy_environment": 1, "institutional_engagement": 0, "research_environment": 0,
            "professional_readiness": 0, "public_discourse": 0, "adaptive_capacity": 0}}"#,
    )
    .unwrap();
    let out = sri(&["score", "--config", path.to_str().unwrap(), "--format", "csv"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let first = text.lines().nth(1).unwrap();
    assert!(first.contains(",62.00,") || first.contains(",62,"), "{first}");
}
