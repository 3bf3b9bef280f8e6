use std::path::Path;
use std::process::Command;

use spdc_g2_cli::selftest::csv_files;
use spdc_g2_cli::{parse_scenario, run, RunOptions};

const BIN: &str = env!("CARGO_BIN_EXE_spdc-g2");

fn scenario(name: &str) -> String {
    format!("{}/scenarios/{name}.json", env!("CARGO_MANIFEST_DIR"))
}

fn spdc(args: &[&str], out: &Path) -> std::process::Output {
    Command::new(BIN).args(args).arg("--out").arg(out).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn every_bundled_scenario_runs() {
    let dir = tempfile::tempdir().unwrap();
    for entry in std::fs::read_dir(format!("{}/scenarios", env!("CARGO_MANIFEST_DIR"))).unwrap() {
        let path = entry.unwrap().path();
        let out = dir.path().join(path.file_stem().unwrap());
        let o = spdc(&["run", "--scenario", path.to_str().unwrap()], &out);
        assert!(o.status.success(), "{}: {}", path.display(), String::from_utf8_lossy(&o.stderr));
        assert!(out.join("report.json").exists());
    }
}

#[test]
fn gdd_sweep_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = spdc(&["sweep", "--scenario", &scenario("gdd_sweep")], dir.path());
    assert!(o.status.success());
    let rows = csv_rows(&dir.path().join("sweep.csv"));
    assert_eq!(rows[0].join(","), "param,rms_width_ps,fwhm_ps,s_over_b");
    assert_eq!(rows.len(), 12);
    // width² = τ₀² + (Φ₂/2τ₀)² with τ₀ = 1/2
    for row in &rows[1..] {
        let phi: f64 = row[0].parse().unwrap();
        let width: f64 = row[1].parse().unwrap();
        assert!((width / (0.25 + phi * phi).sqrt() - 1.0).abs() < 1e-6, "{phi}: {width}");
    }
    for i in 0..11 {
        let trace = csv_rows(&dir.path().join(format!("trace_{i:04}.csv")));
        assert_eq!(trace[0].join(","), "tau_ps,g2,background");
        assert_eq!(trace.len(), 8193);
    }
}

#[test]
fn intrabeam_cancelation_comb_has_single_line() {
    let dir = tempfile::tempdir().unwrap();
    assert!(spdc(&["run", "--scenario", &scenario("modulation_cancelation")], dir.path()).status.success());
    let rows = csv_rows(&dir.path().join("comb.csv"));
    assert_eq!(rows[0].join(","), "n,coefficient,ridge,envelope_axis_radps,envelope_value");
    assert!(rows[1..].iter().all(|r| r[0] == "0"));
    let coefficient: f64 = rows[1][1].parse().unwrap();
    assert!((coefficient - 1.0).abs() < 1e-12);
}

#[test]
fn report_reproduces_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first");
    let o = spdc(
        &["run", "--scenario", &scenario("intrabeam_physical"), "--grid-points", "2048", "--grid-domega", "0.02"],
        &first,
    );
    assert!(o.status.success());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(first.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["scenario"]["grid"]["n_points"], 2048);
    let embedded = serde_json::to_string(&report["scenario"]).unwrap();
    let scenario = parse_scenario(&embedded).unwrap();
    let second = dir.path().join("second");
    run(&scenario, &second, RunOptions::default()).unwrap();
    assert_eq!(csv_files(&first).unwrap(), csv_files(&second).unwrap());
    assert!(report["points"][0]["cauchy_schwarz_ratio"].as_f64().unwrap() > 1.0);
}

#[test]
fn exit_codes_follow_error_category() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let code = |args: &[&str]| spdc(args, &out).status.code().unwrap();

    let bad_json = write(dir.path(), "bad.json", "{ \"schema_version\": 1,");
    assert_eq!(code(&["run", "--scenario", &bad_json]), 2);

    assert_eq!(code(&["run", "--scenario", "/nonexistent/scenario.json"]), 4);

    assert_eq!(code(&["sweep", "--scenario", &scenario("baseline_inter_time")]), 2);

    let alias = std::fs::read_to_string(scenario("gdd_cancelation"))
        .unwrap()
        .replace("[0.0, 5.0]", "[0.0, 500.0]");
    assert_eq!(code(&["run", "--scenario", &write(dir.path(), "alias.json", &alias)]), 3);

    let broad = std::fs::read_to_string(scenario("modulation_cancelation"))
        .unwrap()
        .replace("\"mod_freq\": 0.01", "\"mod_freq\": 1.0");
    assert_eq!(code(&["run", "--scenario", &write(dir.path(), "broad.json", &broad)]), 3);

    let blocked = dir.path().join("file");
    std::fs::write(&blocked, "").unwrap();
    let o = spdc(&["run", "--scenario", &scenario("baseline_inter_time")], &blocked.join("sub"));
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn parse_errors_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let doc = std::fs::read_to_string(scenario("modulation_cancelation"))
        .unwrap()
        .replacen("\"mod_freq\": 0.01, \"index\": 1.3 }\n}", "\"mod_freq\": 0.02, \"index\": 1.3 }\n}", 1);
    let o = spdc(&["run", "--scenario", &write(dir.path(), "m.json", &doc)], &dir.path().join("o"));
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 7") && err.contains("different frequencies"), "{err}");
}

#[test]
fn selftest_filter() {
    let o = Command::new(BIN).args(["selftest", "--filter", "5"]).output().unwrap();
    assert!(o.status.success());
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.starts_with("PASS [ 5]"), "{text}");
    assert!(text.contains("1 of 1 criteria passed"));
    let o = Command::new(BIN).args(["selftest", "--filter", "no_such"]).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
}
