//! Behavioral tests of the command-line surface: exit codes, file
//! contracts, stream handling.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_coilsense"))
}

fn run_ok(args: &[&str]) -> Output {
    let out = bin().args(args).output().expect("spawn coilsense");
    assert!(
        out.status.success(),
        "command {:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn small_config(dir: &Path) -> PathBuf {
    let path = dir.join("config.toml");
    std::fs::write(
        &path,
        r#"
seed = 5
n_coils = 8
n_elevated_coils = 2
min_measurements = 300
max_measurements = 700
hazard_max = 0.01

[testcoil]
measurements = 4500
"#,
    )
    .unwrap();
    path
}

fn generate_small(dir: &Path) -> PathBuf {
    let config = small_config(dir);
    let out = dir.join("data");
    run_ok(&[
        "generate",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    out
}

#[test]
fn generate_writes_the_contracted_files_and_one_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let data = generate_small(tmp.path());
    for name in ["coils.csv", "tensile.csv", "faults.csv", "truth.csv", "manifest.json"] {
        assert!(data.join(name).exists(), "{name} missing");
    }
    let manifests = std::fs::read_dir(&data)
        .unwrap()
        .filter(|e| {
            e.as_ref()
                .unwrap()
                .file_name()
                .to_string_lossy()
                .contains("manifest")
        })
        .count();
    assert_eq!(manifests, 1);
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(data.join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["command"], "generate");
    assert_eq!(manifest["seed"], 5);
}

#[test]
fn invalid_config_exits_2_with_diagnostic() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("bad.toml");
    std::fs::write(&config, "n_coils = 0\n").unwrap();
    let out = bin()
        .args([
            "generate",
            "--config",
            config.to_str().unwrap(),
            "--out",
            tmp.path().join("x").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());

    // unknown keys are configuration errors too
    std::fs::write(&config, "no_such_option = 1\n").unwrap();
    let out = bin()
        .args([
            "generate",
            "--config",
            config.to_str().unwrap(),
            "--out",
            tmp.path().join("y").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_required_flags_exit_2() {
    let out = bin().args(["score"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn cv_outputs_have_expected_shape() {
    let tmp = tempfile::tempdir().unwrap();
    let data = generate_small(tmp.path());
    let out = tmp.path().join("cv");
    run_ok(&[
        "cv",
        "--coils",
        data.join("coils.csv").to_str().unwrap(),
        "--tensile",
        data.join("tensile.csv").to_str().unwrap(),
        "--k-max",
        "4",
        "--out",
        out.to_str().unwrap(),
    ]);
    let rmse = std::fs::read_to_string(out.join("rmse_vs_k.csv")).unwrap();
    assert_eq!(rmse.lines().count(), 5); // header + k_max rows
    let ols = std::fs::read_to_string(out.join("per-variable-ols.csv")).unwrap();
    assert_eq!(ols.lines().count(), 21); // header + 20 variables
    let scatter = std::fs::read_to_string(out.join("cv_scatter.csv")).unwrap();
    // 8 production rows + 9 testcoil rows, two properties each
    assert_eq!(scatter.lines().count(), 1 + 2 * 17);
}

#[test]
fn monitor_with_single_in_spec_measurement_emits_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let data = generate_small(tmp.path());
    let fit = tmp.path().join("fit");
    run_ok(&[
        "fit",
        "--coils",
        data.join("coils.csv").to_str().unwrap(),
        "--tensile",
        data.join("tensile.csv").to_str().unwrap(),
        "--out",
        fit.to_str().unwrap(),
    ]);

    // first line of the generated file is an in-spec production measurement
    let coils = std::fs::read_to_string(data.join("coils.csv")).unwrap();
    let mut lines = coils.lines();
    let header = lines.next().unwrap();
    let first = lines.next().unwrap();
    let input = format!("{header}\n{first}\n");

    let mut child = bin()
        .args([
            "monitor",
            "--model",
            fit.join("model.json").to_str().unwrap(),
            "--usl-t1",
            "1.3",
            "--usl-t2",
            "1.4",
        ])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .as_mut()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    assert!(out.stdout.is_empty(), "unexpected alerts: {:?}", out.stdout);
}

#[test]
fn monitor_empty_stream_exits_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let data = generate_small(tmp.path());
    let fit = tmp.path().join("fit");
    run_ok(&[
        "fit",
        "--coils",
        data.join("coils.csv").to_str().unwrap(),
        "--tensile",
        data.join("tensile.csv").to_str().unwrap(),
        "--out",
        fit.to_str().unwrap(),
    ]);
    let mut child = bin()
        .args([
            "monitor",
            "--model",
            fit.join("model.json").to_str().unwrap(),
            "--usl-t1",
            "1.3",
            "--usl-t2",
            "1.4",
        ])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    drop(child.stdin.take()); // close without writing anything
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
}

#[test]
fn monitor_alerts_on_out_of_spec_stream() {
    let tmp = tempfile::tempdir().unwrap();
    let data = generate_small(tmp.path());
    let fit = tmp.path().join("fit");
    run_ok(&[
        "fit",
        "--coils",
        data.join("coils.csv").to_str().unwrap(),
        "--tensile",
        data.join("tensile.csv").to_str().unwrap(),
        "--out",
        fit.to_str().unwrap(),
    ]);
    let coils = std::fs::read_to_string(data.join("coils.csv")).unwrap();
    let mut child = bin()
        .args([
            "monitor",
            "--model",
            fit.join("model.json").to_str().unwrap(),
            "--usl-t1",
            "1.3",
            "--usl-t2",
            "1.4",
        ])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .as_mut()
        .unwrap()
        .write_all(coils.as_bytes())
        .unwrap();
    drop(child.stdin.take());
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    // elevated coils cross the limit; records are one JSON object per line
    assert!(!stdout.is_empty());
    for line in stdout.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v["coil_id"].is_string());
        assert!(v["position"].is_number());
        assert!(v["property"] == "t1" || v["property"] == "t2");
        assert!(v["smoothed"].is_number());
        assert!(v["usl"].is_number());
    }
}

#[test]
fn report_from_constructed_scatter_reproduces_fixture_metrics() {
    let tmp = tempfile::tempdir().unwrap();
    let data = generate_small(tmp.path());

    // scatter with known quadrant counts (9, 0, 5, 46) for both properties
    // against USL 1.0: target/prediction pairs per class
    let scatter = tmp.path().join("scatter.csv");
    let mut text = String::from("row,property,target,prediction,coil_id,fold\n");
    let mut row = 0;
    let push = |target: f64, prediction: f64, count: usize, text: &mut String, row: &mut usize| {
        for _ in 0..count {
            for property in ["t1", "t2"] {
                text.push_str(&format!(
                    "{row},{property},{target},{prediction},X,{fold}\n",
                    row = row,
                    fold = row,
                ));
            }
            *row += 1;
        }
    };
    push(1.5, 1.5, 9, &mut text, &mut row); // true positives
    push(0.5, 1.5, 5, &mut text, &mut row); // false positives
    push(0.5, 0.5, 46, &mut text, &mut row); // true negatives
    std::fs::write(&scatter, text).unwrap();

    let out = tmp.path().join("report");
    run_ok(&[
        "report",
        "--coils",
        data.join("coils.csv").to_str().unwrap(),
        "--tensile",
        data.join("tensile.csv").to_str().unwrap(),
        "--faults",
        data.join("faults.csv").to_str().unwrap(),
        "--usl-t1",
        "1.0",
        "--usl-t2",
        "1.0",
        "--min-count",
        "100",
        "--scatter",
        scatter.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);

    let metrics = std::fs::read_to_string(out.join("metrics.csv")).unwrap();
    let t2_row: Vec<&str> = metrics
        .lines()
        .find(|l| l.starts_with("t2,"))
        .expect("t2 row")
        .split(',')
        .collect();
    assert_eq!(&t2_row[1..5], &["9", "0", "5", "46"]);
    let round2 = |s: &str| (s.parse::<f64>().unwrap() * 100.0).round() / 100.0;
    assert_eq!(round2(t2_row[5]), 0.64); // precision
    assert_eq!(round2(t2_row[6]), 1.00); // recall
    assert_eq!(round2(t2_row[7]), 0.78); // f1
    assert_eq!(round2(t2_row[8]), 0.95); // f3

    for name in [
        "metrics.csv",
        "correlations.csv",
        "risk.csv",
        "faults_linked.csv",
        "fault_link_summary.csv",
        "manifest.json",
    ] {
        assert!(out.join(name).exists(), "{name} missing");
    }
}

#[test]
fn emitted_csvs_parse_under_the_ingestion_reader() {
    let tmp = tempfile::tempdir().unwrap();
    let data = generate_small(tmp.path());
    let parsed =
        coilsense::data::parse_measurement_file(data.join("coils.csv")).unwrap();
    assert!(parsed.record_errors.is_empty());
    assert_eq!(parsed.coils.len(), 9); // 8 production + testcoil
    let tensile = coilsense::data::parse_tensile_file(data.join("tensile.csv")).unwrap();
    assert_eq!(tensile.len(), 8 + 9);
    coilsense::data::parse_fault_file(data.join("faults.csv")).unwrap();
}

#[test]
fn noise_command_ranks_the_designed_noisy_variables() {
    let tmp = tempfile::tempdir().unwrap();
    let data = generate_small(tmp.path());
    let out = tmp.path().join("noise");
    run_ok(&[
        "noise",
        "--coils",
        data.join("coils.csv").to_str().unwrap(),
        "--coil-id",
        "TESTCOIL",
        "--sv",
        "17",
        "--out",
        out.to_str().unwrap(),
    ]);
    let noise = std::fs::read_to_string(out.join("noise.csv")).unwrap();
    for line in noise.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        let sv: usize = fields[0].parse().unwrap();
        let rank: usize = fields[2].parse().unwrap();
        if [3, 4, 11].contains(&sv) {
            assert!(rank <= 5, "sv{sv} ranked {rank}");
        }
    }
    assert!(out.join("smoothed_sv17.csv").exists());

    // unknown coil is a usage error
    let out2 = bin()
        .args([
            "noise",
            "--coils",
            data.join("coils.csv").to_str().unwrap(),
            "--coil-id",
            "NOPE",
            "--out",
            tmp.path().join("n2").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out2.status.code(), Some(2));
}
