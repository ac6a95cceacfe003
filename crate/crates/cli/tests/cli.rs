use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn crisk(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crisk"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = crisk(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(path: PathBuf) -> Value {
    serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap()
}

/// Small nonlinear portfolio split into train/test, with both models fitted.
fn pipeline(dir: &Path) {
    ok(dir, &["--seed", "3", "generate", "--rows", "4000", "--features", "8", "--bad-rate", "0.1", "--nonlinear"]);
    ok(dir, &["--seed", "3", "split", "--data", "data.csv"]);
    ok(dir, &["train", "glm", "--data", "train.csv"]);
    ok(dir, &["train", "gbm", "--data", "train.csv", "--trees", "50"]);
}

#[test]
fn exit_codes_by_error_class() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(crisk(d, &["generate", "--rows", "0"]).status.code(), Some(2));
    assert_eq!(crisk(d, &["generate", "--linear", "--nonlinear"]).status.code(), Some(2));
    assert_eq!(crisk(d, &["no-such-command"]).status.code(), Some(2));
    assert_eq!(crisk(d, &["train", "glm", "--data", "missing.csv"]).status.code(), Some(3));

    std::fs::write(d.join("sep.csv"), "x,default\n-1,0\n1,1\n").unwrap();
    let out = crisk(d, &["train", "glm", "--data", "sep.csv"]);
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("separation"));
}

#[test]
fn generate_is_byte_identical_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let args = ["--seed", "11", "generate", "--rows", "500", "--features", "5"];
    ok(d, &[&args[..], &["--output", "a.csv"]].concat());
    ok(d, &[&args[..], &["--output", "b.csv"]].concat());
    assert_eq!(std::fs::read(d.join("a.csv")).unwrap(), std::fs::read(d.join("b.csv")).unwrap());
    ok(d, &["--seed", "12", "generate", "--rows", "500", "--features", "5", "--output", "c.csv"]);
    assert_ne!(std::fs::read(d.join("a.csv")).unwrap(), std::fs::read(d.join("c.csv")).unwrap());
    let manifest = json(d.join("a.csv.manifest.json"));
    assert_eq!(manifest["command"], "generate");
    assert_eq!(manifest["seed"], 11);
}

#[test]
fn evaluation_report_and_lorenz_plot() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    pipeline(d);
    let stdout = ok(d, &["evaluate", "--model-a", "gbm.model", "--model-b", "glm.model", "--data", "test.csv"]);
    assert!(stdout.contains("Gini delta"));
    let report = json(d.join("report.json"));
    assert_eq!(report["kind"], "evaluation");
    let models = report["models"].as_array().unwrap();
    assert_eq!(models.len(), 2);
    let (ga, gb) = (models[0]["gini"].as_f64().unwrap(), models[1]["gini"].as_f64().unwrap());
    assert!((report["gini_delta_points"].as_f64().unwrap() - 100.0 * (ga - gb)).abs() < 1e-9);
    for m in models {
        let auc = m["auc"].as_f64().unwrap();
        assert!((m["gini"].as_f64().unwrap() - (2.0 * auc - 1.0)).abs() < 1e-15);
    }

    ok(d, &["plot", "--input", "report.json", "--output", "lorenz.svg"]);
    let svg = std::fs::read_to_string(d.join("lorenz.svg")).unwrap();
    assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
    assert_eq!(svg.matches(r#"class="lorenz""#).count(), 2);
    assert!(svg.contains(r#"class="diagonal""#));
}

#[test]
fn uninformative_model_traces_the_diagonal() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["--seed", "1", "generate", "--rows", "2000", "--features", "3", "--bad-rate", "0.2"]);
    ok(d, &["train", "gbm", "--data", "data.csv", "--trees", "0"]);
    ok(d, &["evaluate", "--model-a", "gbm.model", "--data", "data.csv"]);
    let report = json(d.join("report.json"));
    let m = &report["models"][0];
    assert_eq!(m["gini"].as_f64().unwrap(), 0.0);
    let pts = m["lorenz_points"].as_array().unwrap();
    for p in pts {
        let (x, y) = (p[0].as_f64().unwrap(), p[1].as_f64().unwrap());
        assert!((x - y).abs() < 1e-12);
    }
    ok(d, &["plot", "--input", "report.json", "--output", "flat.svg"]);
    let svg = std::fs::read_to_string(d.join("flat.svg")).unwrap();
    let diag = attr_line(&svg, "diagonal");
    let curve = svg.lines().find(|l| l.contains(r#"class="lorenz""#)).unwrap();
    // the polyline's end points are the diagonal's end points
    let points = curve.split("points=\"").nth(1).unwrap().split('"').next().unwrap();
    let coords: Vec<&str> = points.split_whitespace().collect();
    let (x1, y1) = (attr(&diag, "x1"), attr(&diag, "y1"));
    let (x2, y2) = (attr(&diag, "x2"), attr(&diag, "y2"));
    assert_eq!(coords.first().unwrap(), &format!("{x1},{y1}"));
    assert_eq!(coords.last().unwrap(), &format!("{x2},{y2}"));
}

fn attr_line(svg: &str, class: &str) -> String {
    svg.lines().find(|l| l.contains(&format!(r#"class="{class}""#))).unwrap().to_string()
}

fn attr(line: &str, name: &str) -> String {
    line.split(&format!(" {name}=\"")).nth(1).unwrap().split('"').next().unwrap().to_string()
}

#[test]
fn explanation_plot_shows_seven_signed_bars() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    pipeline(d);
    ok(d, &[
        "--seed", "5", "explain", "--model", "gbm.model", "--data", "test.csv", "--stats-data", "train.csv", "--row", "3",
        "--samples", "2000",
    ]);
    let e = json(d.join("explanation.json"));
    assert_eq!(e["kind"], "explanation");
    let shown = e["contributions"].as_array().unwrap();
    assert_eq!(shown.len(), 7);
    let total: f64 = e["all_contributions"].as_array().unwrap().iter().map(|c| c["value"].as_f64().unwrap()).sum();
    assert!((e["intercept"].as_f64().unwrap() + total - e["surrogate_prediction"].as_f64().unwrap()).abs() < 1e-12);

    ok(d, &["plot", "--input", "explanation.json", "--output", "bars.svg"]);
    let svg = std::fs::read_to_string(d.join("bars.svg")).unwrap();
    let bars: Vec<&str> = svg.lines().filter(|l| l.contains(r#"class="bar "#)).collect();
    assert_eq!(bars.len(), 7);
    let axis_x: f64 = attr(&attr_line(&svg, "axis"), "x1").parse().unwrap();
    for bar in bars {
        let value: f64 = attr(bar, "data-value").parse().unwrap();
        let x: f64 = attr(bar, "x").parse().unwrap();
        let width: f64 = attr(bar, "width").parse().unwrap();
        if value < 0.0 {
            assert!(bar.contains("good-payer"));
            assert!((x + width - axis_x).abs() < 1e-6 && x < axis_x);
        } else {
            assert!(bar.contains("bad-payer"));
            assert!((x - axis_x).abs() < 1e-6);
        }
    }
    assert!(svg.contains("Model R²"));
}

#[test]
fn flags_override_config_which_overrides_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["--seed", "2", "generate", "--rows", "1500", "--features", "4", "--bad-rate", "0.1"]);
    std::fs::write(d.join("run.json"), r#"{"seed": 9, "gbm": {"n_trees": 7, "max_depth": 2}}"#).unwrap();

    ok(d, &["--config", "run.json", "train", "gbm", "--data", "data.csv", "--output", "cfg.model"]);
    let m = json(d.join("cfg.model"));
    assert_eq!(m["config"]["n_trees"], 7);
    assert_eq!(m["config"]["max_depth"], 2);
    assert_eq!(m["config"]["seed"], 9);
    assert_eq!(m["config"]["min_samples_leaf"], 20);

    ok(d, &["--config", "run.json", "--seed", "4", "train", "gbm", "--data", "data.csv", "--trees", "3", "--output", "flag.model"]);
    let m = json(d.join("flag.model"));
    assert_eq!(m["config"]["n_trees"], 3);
    assert_eq!(m["config"]["max_depth"], 2);
    assert_eq!(m["config"]["seed"], 4);

    std::fs::write(d.join("bad.json"), r#"{"gbm": {"trees": 7}}"#).unwrap();
    assert_eq!(crisk(d, &["--config", "bad.json", "train", "gbm", "--data", "data.csv"]).status.code(), Some(2));
}

#[test]
fn rerun_reproduces_outputs_in_another_directory() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    pipeline(d);
    ok(d, &["--out-dir", "again", "rerun", "--manifest", "gbm.model.manifest.json"]);
    assert_eq!(std::fs::read(d.join("gbm.model")).unwrap(), std::fs::read(d.join("again/gbm.model")).unwrap());
    ok(d, &["--out-dir", "again", "rerun", "--manifest", "train.csv.manifest.json"]);
    assert_eq!(std::fs::read(d.join("test.csv")).unwrap(), std::fs::read(d.join("again/test.csv")).unwrap());
}

#[test]
fn stability_with_fixed_seed_is_perfect() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    pipeline(d);
    ok(d, &["stability", "--model", "gbm.model", "--data", "test.csv", "--row", "0", "--samples", "500", "--runs", "3", "--fixed-seed"]);
    let s = json(d.join("stability.json"));
    assert_eq!(s["topk_overlap"], 1.0);
    assert_eq!(s["stable"], true);
}
