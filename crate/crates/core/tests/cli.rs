use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn hpm(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hpm"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn read_json(path: PathBuf) -> Value {
    serde_json::from_str(&std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn assert_ok(o: &Output) {
    assert_eq!(code(o), 0, "stderr: {}", String::from_utf8_lossy(&o.stderr));
}

fn has_hash(v: &Value) -> bool {
    v["config_hash"].as_str().is_some_and(|h| h.len() == 64 && h.chars().all(|c| c.is_ascii_hexdigit()))
}

#[test]
fn expand_writes_germs() {
    let dir = TempDir::new().unwrap();
    let sqrt = fixture("sqrt.json");
    let o = hpm(&["expand", "--curve", sqrt.to_str().unwrap(), "--f", "1/w", "--order", "8"], dir.path());
    assert_ok(&o);
    let v = read_json(dir.path().join("germs.json"));
    assert!(has_hash(&v));
}

#[test]
fn solve_reports_exact_residuals() {
    let dir = TempDir::new().unwrap();
    let cube = fixture("cube.json");
    let o = hpm(
        &["solve", "--curve", cube.to_str().unwrap(), "--f", "1/w", "--power-tuple", "--k", "2", "--n-range", "1:3", "--backend", "exact"],
        dir.path(),
    );
    assert_ok(&o);
    for n in 1..=3 {
        let v = read_json(dir.path().join(format!("solution_n{n}.json")));
        assert!(has_hash(&v));
        assert_eq!(v["residuals_pass"], Value::Bool(true), "n = {n}");
    }
}

#[test]
fn reconstruct_matches_the_germ_branch() {
    let dir = TempDir::new().unwrap();
    let sqrt = fixture("sqrt.json");
    let o = hpm(
        &["reconstruct", "--curve", sqrt.to_str().unwrap(), "--f", "1/w", "--k", "1", "--n-range", "4:12", "--points", "2,2+i"],
        dir.path(),
    );
    assert_ok(&o);
    let v = read_json(dir.path().join("recon.json"));
    assert!(has_hash(&v));
    let reports = v["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 2);
    for r in reports {
        assert_eq!(r["germ_in_subset"], Value::Bool(true));
        assert!(r["final_error"].as_f64().unwrap() < 1e-6);
    }
    let csv = std::fs::read_to_string(dir.path().join("errors_0.csv")).unwrap();
    assert!(csv.starts_with("n,abs_error,skipped"));
}

#[test]
fn monodromy_orbits() {
    let dir = TempDir::new().unwrap();
    let curve = fixture("sum_of_roots.json");
    let o = hpm(&["monodromy", "--curve", curve.to_str().unwrap(), "--k", "2"], dir.path());
    assert_ok(&o);
    let v = read_json(dir.path().join("monodromy.json"));
    assert!(has_hash(&v));
    let sizes: Vec<u64> = v["orbits"].as_array().unwrap().iter().map(|o| o["size"].as_u64().unwrap()).collect();
    assert_eq!(sizes, vec![2, 2, 2]);
    assert_eq!(v["connected"], Value::Bool(false));
}

#[test]
fn zeros_outputs() {
    let dir = TempDir::new().unwrap();
    let sqrt = fixture("sqrt.json");
    let o = hpm(&["zeros", "--curve", sqrt.to_str().unwrap(), "--f", "1/w", "--k", "1", "--n", "8"], dir.path());
    assert_ok(&o);
    let csv = std::fs::read_to_string(dir.path().join("zeros.csv")).unwrap();
    assert!(csv.starts_with("re,im,multiplicity"));
    assert!(csv.lines().count() > 1);
    let svg = std::fs::read_to_string(dir.path().join("zeros.svg")).unwrap();
    assert!(svg.contains("<svg"));
    assert!(has_hash(&read_json(dir.path().join("zeros.json"))));
}

#[test]
fn input_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let sqrt = fixture("sqrt.json");
    let bad_range = hpm(&["solve", "--curve", sqrt.to_str().unwrap(), "--f", "1/w", "--k", "1", "--n-range", "5:2"], dir.path());
    assert_eq!(code(&bad_range), 2);
    let missing = hpm(&["monodromy", "--curve", "/nonexistent/curve.json", "--k", "1"], dir.path());
    assert_eq!(code(&missing), 2);
    let bad_k = hpm(&["monodromy", "--curve", sqrt.to_str().unwrap(), "--k", "7"], dir.path());
    assert_eq!(code(&bad_k), 2);
    let unknown = hpm(&["frobnicate"], dir.path());
    assert_eq!(code(&unknown), 2);
}

#[test]
fn numeric_failures_exit_3() {
    let dir = TempDir::new().unwrap();
    let sqrt = fixture("sqrt.json");
    // z = 1 is a branch point: the fiber degenerates
    let o = hpm(
        &["reconstruct", "--curve", sqrt.to_str().unwrap(), "--f", "1/w", "--k", "1", "--n-range", "2:6", "--points", "1"],
        dir.path(),
    );
    assert_eq!(code(&o), 3, "stderr: {}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn strict_refuses_disconnected_surfaces() {
    let dir = TempDir::new().unwrap();
    let cyclic = fixture("cyclic.json");
    let args = ["reconstruct", "--curve", cyclic.to_str().unwrap(), "--f", "z/w", "--k", "2", "--n", "2", "--points", "3"];
    let mut strict = args.to_vec();
    strict.push("--strict");
    assert_eq!(code(&hpm(&strict, dir.path())), 4);
}

#[test]
fn thread_count_does_not_change_results() {
    let sqrt = fixture("sqrt.json");
    let run = |jobs: &str| {
        let dir = TempDir::new().unwrap();
        let o = hpm(
            &[
                "reconstruct",
                "--curve",
                sqrt.to_str().unwrap(),
                "--f",
                "1/w",
                "--k",
                "1",
                "--n-range",
                "3:9",
                "--points",
                "2,-3,2+i",
                "--backend",
                "numeric",
                "--jobs",
                jobs,
            ],
            dir.path(),
        );
        assert_ok(&o);
        std::fs::read(dir.path().join("recon.json")).unwrap()
    };
    assert_eq!(run("1"), run("4"));
}

#[test]
fn config_hash_tracks_inputs() {
    let sqrt = fixture("sqrt.json");
    let hash = |order: &str| {
        let dir = TempDir::new().unwrap();
        assert_ok(&hpm(&["expand", "--curve", sqrt.to_str().unwrap(), "--f", "1/w", "--order", order], dir.path()));
        read_json(dir.path().join("germs.json"))["config_hash"].as_str().unwrap().to_string()
    };
    assert_eq!(hash("6"), hash("6"));
    assert_ne!(hash("6"), hash("7"));
}
