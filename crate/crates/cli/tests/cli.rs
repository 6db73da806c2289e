use std::path::Path;
use std::process::{Command, Output};

use laguerre_cz::harness::{GridConfig, PairGrid};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_laguerre-cz"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.records().map(|r| r.unwrap().iter().map(str::to_string).collect()).collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn verify_passes_at_default_alpha() {
    let o = run(&["verify"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let out = String::from_utf8(o.stdout).unwrap();
    assert!(out.lines().all(|l| l.starts_with("PASS")));
}

#[test]
fn bessel_fault_fails_the_recurrence() {
    let o = run(&["verify", "--inject-bessel-fault", "1e-6"]);
    assert_eq!(o.status.code(), Some(1));
    let out = String::from_utf8(o.stdout).unwrap();
    assert!(out.lines().any(|l| l.starts_with("FAIL bessel_recurrence")), "{out}");
}

#[test]
fn alpha_out_of_range_is_a_usage_error() {
    let o = run(&["verify", "--alpha", "-1.2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("(-1, inf)"));
}

#[test]
fn bad_dimension_is_a_usage_error() {
    assert_eq!(run(&["verify", "--dim", "3"]).status.code(), Some(2));
}

#[test]
fn verify_json_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let o = run(&["verify", "--alpha", "0.5", "--seed", "11", "--out", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    let (a, b) = (std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
    assert!(!a.is_empty());
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["passed"], true);
}

#[test]
fn empty_family_list_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let c = write(dir.path(), "c.json", r#"{"schema_version":1,"alpha_list":[[0.0]],"families":[]}"#);
    let o = run(&["sweep", "--config", &c]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("family list is empty"));
}

#[test]
fn unknown_config_field_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let c = write(dir.path(), "c.json", r#"{"schema_version":1,"alpha_list":[[0.0]],"families":[{"kind":"heat_max"}],"extra":1}"#);
    assert_eq!(run(&["sweep", "--config", &c]).status.code(), Some(2));
}

#[test]
fn small_sweep_writes_both_formats() {
    let dir = tempfile::tempdir().unwrap();
    let c = write(
        dir.path(),
        "c.json",
        r#"{"schema_version":1,"alpha_list":[[0.0],[2.5]],
            "grid":{"coord_min":0.5,"coord_max":2.0,"points_per_axis":3,"depth":2},
            "families":[{"kind":"heat_max"},{"kind":"riesz","n":[1]}]}"#,
    );
    let out = dir.path().join("r.json");
    let o = run(&["sweep", "--config", &c, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let grid = GridConfig { coord_min: 0.5, coord_max: 2.0, points_per_axis: 3, depth: 2 };
    let pairs = PairGrid::build(&grid, 1, 0).unwrap().pairs.len();
    // heat_max: growth and two smoothness kinds; riesz adds the gradient
    let rows = csv_rows(&std::fs::read_to_string(dir.path().join("r.csv")).unwrap());
    assert_eq!(rows.len(), 2 * (3 + 4) * pairs);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["all_stable"], true);
    assert_eq!(v["tables"].as_array().unwrap().len(), 4);
}

#[test]
fn kernel_representations_agree() {
    let o = run(&["kernel", "--alpha", "-0.5,1.5", "--t", "0.4", "--x", "0.8,1.2", "--y", "1.1,0.9", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let closed = v["closed"].as_f64().unwrap();
    for rep in ["spectral", "schlafli"] {
        let r = v[rep].as_f64().unwrap();
        assert!((r - closed).abs() <= 1e-6 * closed.abs(), "{rep}: {r} vs {closed}");
    }
}

#[test]
fn kernel_dimension_mismatch_is_a_usage_error() {
    let o = run(&["kernel", "--alpha", "0", "--t", "0.4", "--x", "1,1", "--y", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn laplace_multiplier_one_is_the_identity() {
    let dir = tempfile::tempdir().unwrap();
    let c = write(
        dir.path(),
        "c.json",
        r#"{"schema_version":1,"alpha":[0.0],"k_max":300,
            "input":{"kind":"bump","center":[2.0],"width":0.1},
            "grid":[[1.5],[2.0],[2.3],[3.0]],"psi":{"kind":"constant","value":1.0}}"#,
    );
    let o = run(&["apply", "--op", "laplace-mult", "--config", &c]);
    assert_eq!(o.status.code(), Some(0));
    for r in csv_rows(&String::from_utf8(o.stdout).unwrap()) {
        assert!((num(&r[1]) - num(&r[2])).abs() < 1e-8, "{r:?}");
    }
}

#[test]
fn heat_and_gfun_on_an_eigenfunction() {
    let dir = tempfile::tempdir().unwrap();
    let c = write(
        dir.path(),
        "c.json",
        r#"{"schema_version":1,"alpha":[0.5],"input":{"kind":"laguerre","k":[2]},
            "grid":[[0.5],[1.0],[1.7]],"t":0.5,"m":1}"#,
    );
    let heat = csv_rows(&String::from_utf8(run(&["apply", "--op", "heat", "--config", &c]).stdout).unwrap());
    let decay = (-0.5f64 * (4.0 * 2.0 + 2.0 * 0.5 + 2.0)).exp();
    assert_eq!(heat.len(), 3);
    for r in &heat {
        assert!((num(&r[2]) - decay * num(&r[1])).abs() < 1e-12, "{r:?}");
    }
    let g = csv_rows(&String::from_utf8(run(&["apply", "--op", "gfun", "--config", &c]).stdout).unwrap());
    for r in &g {
        assert!((num(&r[2]) - num(&r[1]).abs() / 2.0).abs() < 1e-6, "{r:?}");
    }
}

#[test]
fn riesz_apply_matches_kernel_side_off_support() {
    let dir = tempfile::tempdir().unwrap();
    let c = write(
        dir.path(),
        "c.json",
        r#"{"schema_version":1,"alpha":[0.0],"k_max":300,
            "input":{"kind":"bump","center":[2.0],"width":0.1},
            "grid":[[2.0],[5.0]],"n":[1]}"#,
    );
    let rows = csv_rows(&String::from_utf8(run(&["apply", "--op", "riesz", "--config", &c]).stdout).unwrap());
    assert!(rows[0][4].is_empty());
    let (s, k) = (num(&rows[1][2]), num(&rows[1][4]));
    assert!((s - k).abs() < 1e-3 * k.abs(), "{s} vs {k}");
}

#[test]
fn inadmissible_measure_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let c = write(
        dir.path(),
        "c.json",
        r#"{"schema_version":1,"alpha":[0.5],"input":{"kind":"laguerre","k":[1]},
            "grid":[[1.0]],"nu":{"atoms":[{"t":-1.0,"weight":[1.0,0.0]}]}}"#,
    );
    assert_eq!(run(&["apply", "--op", "stieltjes-mult", "--config", &c]).status.code(), Some(2));
}

#[test]
fn missing_operator_parameter_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let c = write(dir.path(), "c.json", r#"{"schema_version":1,"alpha":[0.5],"input":{"kind":"laguerre","k":[1]},"grid":[[1.0]]}"#);
    let o = run(&["apply", "--op", "heat", "--config", &c]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("\"t\""));
}
