use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn rand_acim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rand-acim"))
        .args(args)
        .env("RAND_ACIM_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("config.toml");
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

const SMALL: &str = r#"
[scheme]
ulam_k = 120
test_points = 20
modes = 6
"#;

#[test]
fn unknown_experiment_is_usage_error() {
    let o = rand_acim(&["bogus"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
}

#[test]
fn bad_config_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[scheme]\nulam_k = \"many\"\n");
    let o = rand_acim(&["reproduce-figure", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    let cfg = write_config(dir.path(), "[sobolev]\nt = 0.9\n");
    let o = rand_acim(&["norms-lab", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    let o = rand_acim(&["norms-lab", "--config", dir.path().join("missing.toml").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn validate_map_passes_for_example_family() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = rand_acim(&["validate-map", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert!(summary["scalars"]["min_abs_derivative"].as_f64().unwrap() >= 2.0);
    assert_eq!(summary["checks"]["min_slope"]["passed"], true);
}

#[test]
fn non_expanding_family_fails_validation() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[family]\nname = \"identity\"\n");
    let out = dir.path().join("out");
    let o = rand_acim(&["validate-map", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("min_slope"));
}

#[test]
fn reproduce_figure_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        let o = rand_acim(&["reproduce-figure", "--config", &cfg, "--out", out.to_str().unwrap(), "--plot"]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let mut csvs = 0;
    for entry in fs::read_dir(&a).unwrap() {
        let name = entry.unwrap().file_name();
        let name = name.to_str().unwrap();
        if name.ends_with(".csv") || name.ends_with(".svg") {
            csvs += name.ends_with(".csv") as usize;
            assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
        }
    }
    assert_eq!(csvs, 9);
    let header = fs::read_to_string(a.join("ulam_step20.csv")).unwrap();
    assert!(header.starts_with("x,value\n"));
    assert!(a.join("figure.svg").exists());
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(a.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["config"]["scheme"]["ulam_k"], 120);
    assert!(summary["timestamp"].is_string());
}

#[test]
fn flags_override_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = dir.path().join("o");
    let o = rand_acim(&[
        "reproduce-figure", "--config", &cfg, "--out", out.to_str().unwrap(), "--k", "60", "--modes", "0", "--steps", "3",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = fs::read_to_string(out.join("ulam_step3.csv")).unwrap().lines().count();
    assert_eq!(rows, 61);
    assert!(!out.join("fejer_step3.csv").exists());
}

#[test]
fn locked_output_dir_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join(".rand-acim.lock"), "1").unwrap();
    let o = rand_acim(&["validate-map", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!dir.path().join("summary.json").exists());
}
