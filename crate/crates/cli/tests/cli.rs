use std::fs;
use std::path::Path;

use assert_cmd::Command;
use serde_json::Value;

fn groupwalk() -> Command {
    Command::cargo_bin("groupwalk").unwrap()
}

fn json_stdout(cmd: &mut Command) -> Value {
    let out = cmd.assert().success().get_output().stdout.clone();
    serde_json::from_slice(&out).unwrap()
}

fn generate_into(dir: &Path) {
    groupwalk()
        .args(["generate", "--nodes", "800", "--links", "3", "--minority", "0.3", "--preference", "0.7", "--seed", "4", "--out"])
        .arg(dir)
        .assert()
        .success();
}

#[test]
fn generated_files_round_trip_through_truth() {
    let dir = tempfile::tempdir().unwrap();
    generate_into(dir.path());
    let edges = dir.path().join("edges.tsv");
    let labels = dir.path().join("labels.tsv");

    let from_files = json_stdout(groupwalk().arg("truth").arg("--edges").arg(&edges).arg("--labels").arg(&labels));
    let direct = json_stdout(groupwalk().args(["truth", "--nodes", "800", "--links", "3", "--minority", "0.3", "--preference", "0.7", "--seed", "4"]));
    assert_eq!(from_files["nodes"], 800);
    assert_eq!(from_files["truth"], direct["truth"]);
    let p = &from_files["truth"]["proportions"];
    assert!((p["a"].as_f64().unwrap() + p["b"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn walk_records_feed_correction() {
    let dir = tempfile::tempdir().unwrap();
    generate_into(dir.path());
    let records = dir.path().join("walk.tsv");
    let summary = json_stdout(
        groupwalk()
            .args(["walk", "--steps", "1500", "--rate", "0.2", "--seed", "9", "--edges"])
            .arg(dir.path().join("edges.tsv"))
            .arg("--labels")
            .arg(dir.path().join("labels.tsv"))
            .arg("--out")
            .arg(&records),
    );
    assert_eq!(summary["steps"], 1500);
    assert_eq!(fs::read_to_string(&records).unwrap().lines().count(), 1501);

    let report = json_stdout(groupwalk().args(["correct", "--rate", "0.2", "--records"]).arg(&records));
    let measured = report["proportion_b"]["measured"].as_f64().unwrap();
    assert!((measured - summary["estimate_b_noisy_labels"].as_f64().unwrap()).abs() < 1e-12);
    assert!(report["homophily_b"]["value"].is_number());
}

#[test]
fn correct_inverts_a_known_confusion() {
    // p_b = 0.25 measured through P(b|a) = 0.1, P(b|b) = 0.7
    let measured = 0.1 * 0.75 + 0.7 * 0.25;
    let report = json_stdout(groupwalk().args(["correct", "--confusion", "0.9,0.3,0.1,0.7", "--proportion", &measured.to_string()]));
    assert!((report["proportion_b"]["corrected"].as_f64().unwrap() - 0.25).abs() < 1e-12);
    assert!((report["variance_inflation"].as_f64().unwrap() - 1.0 / 0.36).abs() < 1e-9);
}

#[test]
fn experiment_outputs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("grid.json");
    fs::write(
        &config,
        r#"{"graph": {"generate": {"nodes": 600, "links_per_node": 2, "minority_fraction": 0.3, "ingroup_preference": 0.7}},
            "samplers": ["rwrw", "node", "edge", "snowball"], "rates": [0.0, 0.2], "sample_sizes": [100], "replications": 6}"#,
    )
    .unwrap();
    let run = |seed: &str, name: &str| {
        let out = dir.path().join(name);
        groupwalk()
            .args(["experiment", "--threads", "1", "--seed", seed, "--config"])
            .arg(&config)
            .arg("--out")
            .arg(&out)
            .assert()
            .success();
        fs::read(out.join("rows.csv")).unwrap()
    };
    let first = run("3", "a");
    assert_eq!(first, run("3", "b"));
    assert_ne!(first, run("4", "c"));
    let text = String::from_utf8(first).unwrap();
    assert!(text.starts_with("sampler,rate,size,rep,measure,variant,estimate,error,flags"));
    assert_eq!(text.lines().count(), 1 + 4 * 2 * 6 * 4 * 3);
}

#[test]
fn errors_carry_stable_codes() {
    let out = groupwalk().args(["correct", "--rate", "0.5", "--proportion", "0.3"]).assert().failure().get_output().stderr.clone();
    assert!(String::from_utf8(out).unwrap().contains("[invalid_parameter]"));

    groupwalk().args(["generate", "--nodes", "50"]).assert().failure();
    groupwalk().args(["correct", "--rate", "0.1"]).assert().failure();
    groupwalk().arg("experiment").assert().failure();
}
