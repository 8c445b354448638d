use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use jcsusy::driver::{self, Axis};
use jcsusy::scenario::Scenario;

fn bin(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jcsusy"))
        .args(args)
        .env("JCSUSY_OUT", out)
        .output()
        .expect("binary runs")
}

const SMALL: &str = r#"
[model]
g = 0.1
k = 2

[initial]
state = "excited-coherent(2)"

[numerics]
cutoff = 48

[time]
start = 0.0
end = 5.0
steps = 50

[outputs]
series = ["sigma_z", "n_mean", "mandel_q", "fidelity", "c_expect", "norm_drift"]

[outputs.wigner]
times = [0.5]
grid = "-3:3:9,-3:3:9"
"#;

fn write_scenario(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn simulate_writes_all_files_deterministically() {
    let tmp = tempfile::tempdir().unwrap();
    let sc = write_scenario(tmp.path(), "small.toml", SMALL);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for out in [&a, &b] {
        let o = bin(out, &["simulate", sc.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for f in ["timeseries.csv", "wigner_t0.5.csv", "wigner_t0.5.pgm", "run.meta"] {
        let x = fs::read(a.join("small").join(f)).unwrap();
        let y = fs::read(b.join("small").join(f)).unwrap();
        assert_eq!(x, y, "{f} differs between runs");
    }
    let csv = fs::read_to_string(a.join("small/timeseries.csv")).unwrap();
    assert!(csv.starts_with("t,sigma_z,n_mean,mandel_q,fidelity,c_expect,norm_drift\n"));
    assert_eq!(csv.lines().count(), 52);
    assert!(!csv.contains('\r'));
}

#[test]
fn empty_outputs_are_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let text = SMALL
        .replace(r#"series = ["sigma_z", "n_mean", "mandel_q", "fidelity", "c_expect", "norm_drift"]"#, "series = []")
        .replace("times = [0.5]", "times = []");
    let sc = write_scenario(tmp.path(), "empty.toml", &text);
    let o = bin(tmp.path(), &["simulate", sc.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("outputs"));
}

#[test]
fn parse_errors_name_line_and_field() {
    let tmp = tempfile::tempdir().unwrap();
    let sc = write_scenario(tmp.path(), "bad.toml", &SMALL.replace("k = 2", "k = \"two\""));
    let o = bin(tmp.path(), &["simulate", sc.to_str().unwrap()]);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(!o.status.success());
    assert!(err.contains("line") && err.contains("k"), "{err}");
}

#[test]
fn tail_breach_reports_suggested_cutoff() {
    let tmp = tempfile::tempdir().unwrap();
    // Tail mass ~5e-10 on n > N - 2k: above tolerance, norm still within 1e-8, so a warning.
    let sc = write_scenario(tmp.path(), "mild.toml", &SMALL.replace("excited-coherent(2)", "excited-coherent(3.9)"));
    let o = bin(tmp.path(), &["simulate", sc.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("suggested cutoff N >="), "{err}");
    let meta = fs::read_to_string(tmp.path().join("mild/run.meta")).unwrap();
    assert!(meta.contains("tail_exceeded = true"));

    // Tail mass ~2e-4: the truncated state is not normalized, so the run is refused.
    let sc = write_scenario(tmp.path(), "severe.toml", &SMALL.replace("excited-coherent(2)", "excited-coherent(5)"));
    let o = bin(tmp.path(), &["simulate", sc.to_str().unwrap()]);
    assert!(!o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("try cutoff >="), "{err}");
}

#[test]
fn wigner_command_writes_only_snapshots() {
    let tmp = tempfile::tempdir().unwrap();
    let sc = write_scenario(tmp.path(), "w.toml", SMALL);
    let o = bin(tmp.path(), &["wigner", sc.to_str().unwrap(), "--times", "0,1.5", "--grid", "-2:2:5,-2:2:5"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let dir = tmp.path().join("w");
    assert!(dir.join("wigner_t0.csv").exists());
    assert!(dir.join("wigner_t1.5.pgm").exists());
    assert!(!dir.join("timeseries.csv").exists());
    let csv = fs::read_to_string(dir.join("wigner_t0.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "re,im,W");
    assert_eq!(csv.lines().count(), 26);
}

#[test]
fn single_value_sweep_equals_run() {
    let tmp = tempfile::tempdir().unwrap();
    let template = Scenario::parse(SMALL).unwrap();
    let points = driver::sweep(&template, Axis::Gamma, &[2.0], &tmp.path().join("sweep")).unwrap();
    assert_eq!(points.len(), 1);
    driver::run(&template, &tmp.path().join("run")).unwrap();
    let swept = tmp.path().join("sweep").join(driver::sweep_dir_name(Axis::Gamma, 2.0));
    for f in ["timeseries.csv", "wigner_t0.5.csv", "wigner_t0.5.pgm", "run.meta"] {
        assert_eq!(
            fs::read(swept.join(f)).unwrap(),
            fs::read(tmp.path().join("run").join(f)).unwrap(),
            "{f}"
        );
    }
    let summary = fs::read_to_string(tmp.path().join("sweep/summary.csv")).unwrap();
    assert_eq!(summary.lines().next().unwrap(), "gamma,t_min,q_min");
}

#[test]
fn sweep_command_writes_summary() {
    let tmp = tempfile::tempdir().unwrap();
    let sc = write_scenario(tmp.path(), "s.toml", SMALL);
    let o = bin(tmp.path(), &["sweep", sc.to_str().unwrap(), "--axis", "chi", "--values", "0,0.2,0.4"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary = fs::read_to_string(tmp.path().join("s/summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 4);
    assert!(tmp.path().join("s/chi=0.2/timeseries.csv").exists());
}

#[test]
fn verify_fast_passes_and_reports() {
    let tmp = tempfile::tempdir().unwrap();
    let o = bin(tmp.path(), &["verify"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(tmp.path().join("verify_report.json")).unwrap()).unwrap();
    assert_eq!(report["level"], "fast");
    assert_eq!(report["cutoff"], 64);
    for c in report["checks"].as_array().unwrap() {
        assert!(c["tolerance"].is_number() && c["observed"].is_number() && c["passed"] == true);
    }
}

#[test]
fn injected_g_sign_flip_fails_naming_propagate_counter() {
    let tmp = tempfile::tempdir().unwrap();
    let o = bin(tmp.path(), &["verify", "--inject-fault", "flip-g-sign"]);
    assert!(!o.status.success());
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(tmp.path().join("verify_report.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], false);
    let failed: Vec<&str> = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["passed"] == false)
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert!(failed.iter().any(|n| n.contains("propagate_counter")), "{failed:?}");
}
