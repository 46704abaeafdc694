//! End-to-end checks of the `charfront` binary: exit codes, output
//! schemas, closed-form spot values, and byte-level determinism.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_charfront"))
}

fn run(sub: &str, config: &Path, out: &Path) -> Output {
    bin()
        .args([sub, "--config"])
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

const LINEAR: &str = r#"
[pulse]
kind = "linear"

[[angles]]
a = 1.0
b = 0.0

[grid]
v_max = 1.0
eta_max = 2.0
nv = 33
neta = 33
"#;

#[test]
fn solve_linear_pulse_matches_closed_forms() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "run.toml", LINEAR);
    let out = dir.path().join("out");
    let res = run("solve", &config, &out);
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));

    let csv = std::fs::read_to_string(out.join("fields.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "v,eta,theta_index,f,h,Fprime,Hprime,omega,digamma,sigma,detk_err"
    );
    // The corner (v, eta) = (1, 1) carries exact closed-form values.
    let corner = csv
        .lines()
        .find(|l| l.starts_with("1,1,"))
        .expect("corner row present");
    let cells: Vec<f64> = corner.split(',').map(|c| c.parse().unwrap()).collect();
    assert!((cells[8] - 3.0).abs() < 1e-12, "digamma(1,1) = {}", cells[8]);
    assert!((cells[3] + 4.0 / 3.0).abs() < 1e-12, "f(1,1) = {}", cells[3]);
    assert!((cells[4] + 4.0 / 3.0).abs() < 1e-10, "h(1,1) = {}", cells[4]);
    assert!(out.join("summary.json").is_file());
}

#[test]
fn solve_zero_pulse_is_trivial() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "run.toml", &LINEAR.replace("\"linear\"", "\"zero\""));
    let out = dir.path().join("out");
    let res = run("solve", &config, &out);
    assert_eq!(res.status.code(), Some(0));
    let csv = std::fs::read_to_string(out.join("fields.csv")).unwrap();
    for line in csv.lines().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        for &k in &[3usize, 4, 5, 6, 7, 10] {
            assert_eq!(cells[k].parse::<f64>().unwrap(), 0.0, "row {line}");
        }
        assert_eq!(cells[8], "4", "digamma in row {line}");
        assert_eq!(cells[9], "inf", "sigma in row {line}");
    }
}

#[test]
fn solve_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "run.toml", LINEAR);
    let (o1, o2) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(run("solve", &config, &o1).status.code(), Some(0));
    assert_eq!(run("solve", &config, &o2).status.code(), Some(0));
    let a = std::fs::read(o1.join("fields.csv")).unwrap();
    let b = std::fs::read(o2.join("fields.csv")).unwrap();
    assert_eq!(a, b, "identical configs must produce byte-identical CSV");
}

#[test]
fn malformed_configs_exit_2_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    for (name, body) in [
        ("degenerate.toml", LINEAR.replace("nv = 33", "nv = 1")),
        ("unknown.toml", LINEAR.replace("[grid]", "unknown_key = 1\n[grid]")),
        ("syntax.toml", "[pulse".to_string()),
        ("badtol.toml", format!("{LINEAR}\n[tolerances]\ngoursat_tol = -1.0")),
    ] {
        let config = write_config(dir.path(), name, &body);
        let res = run("solve", &config, &out);
        assert_eq!(res.status.code(), Some(2), "{name}");
        assert!(!out.join("fields.csv").exists(), "{name} must not write fields");
    }
}

#[test]
fn kretschmann_rejects_zero_energy() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "run.toml", &LINEAR.replace("\"linear\"", "\"zero\""));
    let out = dir.path().join("out");
    let res = run("kretschmann", &config, &out);
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stderr).contains("zero energy"));
}

#[test]
fn kernel_reports_monitor_and_equivalence() {
    let dir = tempfile::tempdir().unwrap();
    let body = format!("{LINEAR}\n[tolerances]\nf_min = 0.5");
    let config = write_config(dir.path(), "run.toml", &body);
    let out = dir.path().join("out");
    let res = run("kernel", &config, &out);
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("kernel.json")).unwrap()).unwrap();
    let monitor = report["monitor"].as_f64().unwrap();
    assert!(monitor.is_finite() && monitor > 0.0);
    assert!(report["equivalence_error"].as_f64().unwrap() < 1e-3);
}
