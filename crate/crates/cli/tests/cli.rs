use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_finslerlab")).args(args).env("FINSLERLAB_THREADS", "2").output().expect("binary runs")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn strip_times(v: &mut Value) {
    for c in v["checks"].as_array_mut().unwrap() {
        c["ms"] = Value::from(0.0);
    }
}

#[test]
fn euclidean_all_suite_passes_tightly() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = run(&["verify", "--metric", "euclidean", "--suite", "all", "--samples", "16", "--seed", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = read_json(&out);
    assert_eq!(v["pass"], Value::Bool(true));
    for c in v["checks"].as_array().unwrap() {
        if c["id"] != "adiabatic-convergence" {
            assert!(c["max_residual"].as_f64().unwrap() < 1e-10, "{c}");
        }
    }
}

#[test]
fn funk_chern_simons_suite_passes() {
    let o = run(&["verify", "--metric", "funk", "--suite", "chern-simons", "--samples", "64", "--seed", "42", "--tol", "1e-6"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let ids: Vec<&str> = v["checks"].as_array().unwrap().iter().map(|c| c["id"].as_str().unwrap()).collect();
    assert!(ids.contains(&"surface-identity"));
}

#[test]
fn degenerate_metric_exits_one() {
    let o = run(&["verify", "--metric", "broken-degenerate", "--suite", "basics"]);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["pass"], Value::Bool(false));
    let rec = v["checks"].as_array().unwrap().iter().find(|c| c["id"] == "fundamental-tensor").unwrap();
    assert!(rec["error"].as_str().unwrap().contains("not positive definite"));
    assert!(rec["max_residual"].is_null());
}

#[test]
fn config_errors_exit_two() {
    assert_eq!(run(&["verify", "--metric", "no-such-metric"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--metric", "funk", "--suite", "everything"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--metric", "funk", "--jet-order", "9"]).status.code(), Some(2));
    assert_eq!(run(&["table", "--metric", "funk", "--at", "x=0.1"]).status.code(), Some(2));
    assert_eq!(run(&["adiabatic", "--metric", "funk", "--eps", "0.1,0.2"]).status.code(), Some(2));
    assert_eq!(run(&["verify"]).status.code(), Some(2));
}

#[test]
fn reports_are_deterministic_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for (path, threads) in [(&a, "1"), (&b, "4")] {
        let o = Command::new(env!("CARGO_BIN_EXE_finslerlab"))
            .args(["verify", "--metric", "randers-sphere", "--suite", "connections", "--samples", "8", "--seed", "7"])
            .args(["--out", path.to_str().unwrap()])
            .env("FINSLERLAB_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let (mut va, mut vb) = (read_json(&a), read_json(&b));
    strip_times(&mut va);
    strip_times(&mut vb);
    assert_eq!(va, vb);
    let report = finslerlab_core::report::SuiteReport::from_json(&std::fs::read_to_string(&a).unwrap()).unwrap();
    assert_eq!(serde_json::to_value(&report).unwrap(), read_json(&a));
}

#[test]
fn config_file_selects_metric() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("m.toml");
    std::fs::write(&cfg, "[metric]\nname = \"randers\"\ndim = 3\nparams.b1 = 0.2\nparams.b3 = 0.1\n").unwrap();
    let o = run(&["verify", "--config", cfg.to_str().unwrap(), "--suite", "frames", "--samples", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["metric"], "randers");
    assert_eq!(v["dim"], 3);
    assert_eq!(v["params"]["b3"], 0.1);
}

#[test]
fn euclidean_table_has_zero_christoffel_part() {
    let o = run(&["table", "--metric", "euclidean", "--at", "x=0,0;y=0,1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    for line in text.lines().filter(|l| l.trim_start().starts_with('Γ') || l.trim_start().starts_with("H_")) {
        for tok in line.split_whitespace().skip(1) {
            assert_eq!(tok.parse::<f64>().unwrap(), 0.0, "{line}");
        }
    }
}

#[test]
fn riemannian_table_has_zero_cartan_endomorphism() {
    let o = run(&["table", "--metric", "round-sphere", "--at", "x=0.2,-0.1;y=0.3,1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let h: Vec<&str> = text.lines().filter(|l| l.trim_start().starts_with("H_")).collect();
    assert_eq!(h.len(), 4);
    for line in h {
        for tok in line.split_whitespace().skip(1) {
            assert!(tok.parse::<f64>().unwrap().abs() < 1e-12, "{line}");
        }
    }
}

#[test]
fn funk_table_h111_matches_sampled_point() {
    let x = "x=0.3,0;y=0.2,1";
    let o = run(&["table", "--metric", "funk", "--at", x, "--normalize"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let line = text.lines().find(|l| l.trim_start().starts_with("H_11·")).unwrap();
    let h111: f64 = line.split_whitespace().nth(1).unwrap().parse().unwrap();

    let m = finslerlab_core::FinslerMetric::funk(2, 1.0).unwrap();
    let p = finslerlab_core::ChartPoint::parse(x).unwrap();
    let p = p.scaled(1.0 / m.value(&p).unwrap()).unwrap();
    let th = finslerlab_core::chern_simons::surface_identity_check(&m, &p, 4).unwrap();
    assert!((h111 - th.h111).abs() <= 1e-6 * th.h111.abs(), "{h111} vs {}", th.h111);
}

#[test]
fn adiabatic_csv_shape_and_slope() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let o = run(&["adiabatic", "--metric", "funk", "--samples", "3", "--seed", "5", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "metric,x1,x2,y1,y2,eps,deviation");
    assert_eq!(lines.len(), 1 + 3 * 4 + 1);
    let slope: f64 = lines.last().unwrap().strip_prefix("# slope=").unwrap().parse().unwrap();
    assert!(slope.is_finite() && (slope - 2.0).abs() < 1e-6);
    for chunk in lines[1..13].chunks(4) {
        let d: Vec<f64> = chunk.iter().map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect();
        assert!(d.windows(2).all(|w| w[1] < w[0]), "{d:?}");
    }
}

#[test]
fn conformal_subcommand_runs_suite() {
    let o = run(&["conformal", "--metric", "funk", "--sigma", "c11=0.1,c2=0.2", "--samples", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["suite"], "conformal");
    assert_eq!(run(&["conformal", "--metric", "funk", "--sigma", "c1=0.3,y1=1"]).status.code(), Some(2));
}

#[test]
fn list_metrics_names_registry() {
    let o = run(&["list-metrics"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    for name in ["euclidean", "round-sphere", "hyperbolic-half-plane", "randers", "funk", "perturbed-quartic"] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name}");
    }
}
