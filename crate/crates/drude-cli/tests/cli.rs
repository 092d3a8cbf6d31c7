//! End-to-end runs of the `drude` binary on small scenarios.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn drude(args: &[&str], config: &Path, out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_drude")).args(args).arg(config).env("DRUDE_OUT", out).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn summary(dir: &Path) -> serde_json::Value {
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap();
    let schema: serde_json::Value = serde_json::from_str(include_str!("../schema/summary.schema.json")).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator.iter_errors(&v).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "summary violates the schema: {errors:?}");
    v
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn dispersion_passes_and_is_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let out = drude(&["dispersion", "--workers", "1"], &scenario("nc.toml"), tmp.path());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let dir = tmp.path().join("dispersion");
    let v = summary(&dir);
    assert_eq!(v["pass"], true);
    let fit = v["metrics"]["k_e_prefactor_fit"].as_f64().unwrap();
    assert!((fit / 0.297302 - 1.0).abs() < 0.01, "prefactor {fit}");
    let first = std::fs::read(dir.join("dispersion.csv")).unwrap();
    let text = String::from_utf8(first.clone()).unwrap();
    assert!(text.lines().take_while(|l| l.starts_with('#')).count() >= 3);
    assert!(text.lines().any(|l| l.starts_with("distance,lambda_e,k,")));
    let gp = std::fs::read_to_string(dir.join("dispersion.gp")).unwrap();
    assert!(gp.contains("'dispersion.csv'"));
    let again = drude(&["dispersion", "--workers", "1"], &scenario("nc.toml"), tmp.path());
    assert_eq!(again.status.code(), Some(0));
    assert_eq!(std::fs::read(dir.join("dispersion.csv")).unwrap(), first, "CSV differs between identical runs");
}

#[test]
fn frequency_domain_experiments_pass_on_the_shipped_scenario() {
    let tmp = tempfile::tempdir().unwrap();
    for kind in ["modes", "threshold", "hoelder"] {
        let out = drude(&[kind], &scenario("nc.toml"), tmp.path());
        assert_eq!(out.status.code(), Some(0), "{kind}: {}\n{}", String::from_utf8_lossy(&out.stdout), stderr(&out));
        assert_eq!(summary(&tmp.path().join(kind))["pass"], true);
    }
    let out = drude(&["hoelder"], &scenario("nc_omega_c.toml"), tmp.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn malformed_config_exits_2_without_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = write(tmp.path(), "bad.toml", "schema = \"drude-scenario/1\"\n[grid\nh = 0.1\n");
    let out_dir = tmp.path().join("out");
    let out = drude(&["dispersion"], &bad, &out_dir);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out_dir.exists(), "artifacts were created for a malformed scenario");
    let missing = drude(&["dispersion"], &tmp.path().join("missing.toml"), &out_dir);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn validation_errors_name_the_field() {
    let tmp = tempfile::tempdir().unwrap();
    let out_dir = tmp.path().join("out");
    let cases = [
        ("schema = \"drude-scenario/1\"\n[grid]\nspacing = 0.1\n", "spacing"),
        ("schema = \"drude-scenario/2\"\n", "schema"),
        ("schema = \"drude-scenario/1\"\n[source]\nwidth = -1.0\n", "source.width"),
        ("schema = \"drude-scenario/1\"\n[dispersion]\ndistance_max = 1e-7\n", "dispersion.distance_max"),
    ];
    for (text, field) in cases {
        let p = write(tmp.path(), "case.toml", text);
        let out = drude(&["dispersion"], &p, &out_dir);
        assert_eq!(out.status.code(), Some(2), "{text}");
        assert!(stderr(&out).contains(field), "{field} not named in: {}", stderr(&out));
    }
    let out = drude(&["resonance"], &scenario("nc.toml"), &out_dir);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("medium.preset"));
    assert!(!out_dir.exists());
}

#[test]
fn failed_check_exits_1_with_a_complete_summary() {
    let tmp = tempfile::tempdir().unwrap();
    let p = write(tmp.path(), "strict.toml", "schema = \"drude-scenario/1\"\n[threshold]\nslope_tol = 1e-9\n");
    let out = drude(&["threshold"], &p, tmp.path());
    assert_eq!(out.status.code(), Some(1));
    let v = summary(&tmp.path().join("threshold"));
    assert_eq!(v["pass"], false);
    assert!(v["checks"].as_array().unwrap().iter().any(|c| c["pass"] == false));
    assert!(tmp.path().join("threshold/threshold.csv").exists());
}

#[test]
fn short_oracle_comparison_writes_compatible_traces() {
    let tmp = tempfile::tempdir().unwrap();
    let text = r#"
schema = "drude-scenario/1"
[source]
half_width = 3.5
h = 0.1
[grid]
half_width = 4.0
h = 0.2
[quadrature]
lambda_min_rel = 0.03
lambda_max = 8.0
allow_excluded = true
[oracle]
t_step = 1.0
t_end = 4.0
yee = { h = 0.05 }
[oracle-compare]
t_step = 1.0
t_end = 4.0
yee = { h = 0.05 }
[evolve]
t_step = 1.0
t_end = 4.0
gap = false
"#;
    let p = write(tmp.path(), "short.toml", text);
    for kind in ["oracle", "evolve", "oracle-compare"] {
        let out = drude(&[kind, "--workers", "1"], &p, tmp.path());
        assert_eq!(out.status.code(), Some(0), "{kind}: {}\n{}", String::from_utf8_lossy(&out.stdout), stderr(&out));
        summary(&tmp.path().join(kind));
    }
    let header = |kind: &str| {
        let text = std::fs::read_to_string(tmp.path().join(kind).join(format!("{kind}.csv"))).unwrap();
        text.lines().find(|l| !l.starts_with('#')).unwrap().to_string()
    };
    assert_eq!(header("oracle"), header("evolve"));
    let cmp = std::fs::read_to_string(tmp.path().join("oracle-compare/oracle-compare.csv")).unwrap();
    assert_eq!(cmp.lines().filter(|l| !l.starts_with('#')).count(), 5);
}
