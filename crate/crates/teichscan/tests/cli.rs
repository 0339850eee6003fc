use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_teichscan"));
    c.env_remove("TEICHSCAN_BUDGET");
    c
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json(path: PathBuf) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn torus_files(dir: &Path) {
    assert_eq!(code(&run(dir, &["build", "torus", "--w", "1", "--h", "1", "-o", "t.json"])), 0);
    let o = run(dir, &["curve", "--tri", "0", "--start", "0.3,0.3,0.4", "--vector", "1,0", "--output", "horiz.json"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn build_validate_estimate() {
    let d = tempfile::tempdir().unwrap();
    torus_files(d.path());
    let o = run(d.path(), &["validate", "t.json"]);
    assert_eq!(code(&o), 0);
    let o = run(d.path(), &["estimate", "--surface", "t.json", "--curve", "horiz.json", "--kind", "ext", "--json"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema"], "teichscan-estimate/1");
    let terms = v["ext"]["estimate"]["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 1);
    assert_eq!(terms[0]["component"], "Subsurface");
    assert!(v.get("hyp").is_none());
}

#[test]
fn validation_failures_exit_one() {
    let d = tempfile::tempdir().unwrap();
    torus_files(d.path());
    let mut doc = json(d.path().join("t.json"));
    doc["triangles"][0][0]["h"] = 1.1.into();
    doc["triangles"][0][1]["h"] = (-0.1).into();
    std::fs::write(d.path().join("bad.json"), doc.to_string()).unwrap();
    let o = run(d.path(), &["validate", "bad.json", "--json"]);
    assert_eq!(code(&o), 1, "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["valid"], false);
    assert!(!v["violations"].as_array().unwrap().is_empty());
    let o = run(d.path(), &["decompose", "--surface", "bad.json"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn configuration_errors_exit_three() {
    let d = tempfile::tempdir().unwrap();
    torus_files(d.path());
    assert_eq!(code(&run(d.path(), &["decompose", "--surface", "t.json", "--m0", "2"])), 3);
    assert_eq!(code(&run(d.path(), &["decompose", "--surface", "t.json", "--m0", "3"])), 3);
    assert_eq!(code(&run(d.path(), &["decompose", "--surface", "missing.json"])), 3);
    assert_eq!(code(&run(d.path(), &["decompose", "--surfac", "t.json"])), 3);
    assert_eq!(code(&run(d.path(), &["frobnicate"])), 3);
    assert_eq!(code(&run(d.path(), &["scan", "--surface", "t.json", "--curve", "horiz.json", "--t-min", "1", "--t-max", "0"])), 3);
    assert_eq!(code(&run(d.path(), &["suite", "--seed", "0", "--jobs", "0"])), 3);
    let text = std::fs::read_to_string(d.path().join("t.json")).unwrap();
    std::fs::write(d.path().join("v2.json"), text.replace("teichscan-surface/1", "teichscan-surface/2")).unwrap();
    assert_eq!(code(&run(d.path(), &["validate", "v2.json"])), 3);
    let o = bin().current_dir(d.path()).env("TEICHSCAN_BUDGET", "lots").args(["decompose", "--surface", "t.json"]).output().unwrap();
    assert_eq!(code(&o), 3);
    assert_eq!(code(&run(d.path(), &["--help"])), 0);
}

#[test]
fn budget_exhaustion_exits_two() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(d.path(), &["build", "slit-tori", "--a", "0.1", "-o", "s.json"])), 0);
    let o = bin()
        .current_dir(d.path())
        .env("TEICHSCAN_BUDGET", "50")
        .args(["decompose", "--surface", "s.json", "--t", "-2"])
        .output()
        .unwrap();
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn outputs_are_atomic() {
    let d = tempfile::tempdir().unwrap();
    torus_files(d.path());
    let o = run(d.path(), &["build", "torus", "--w", "1", "--h", "1", "-o", "no/such/dir/t.json"]);
    assert_eq!(code(&o), 3);
    assert!(!d.path().join("no").exists());

    let before = std::fs::read_to_string(d.path().join("t.json")).unwrap();
    assert_eq!(code(&run(d.path(), &["build", "torus", "--w", "2", "--h", "0.5", "-o", "t.json"])), 0);
    let after = std::fs::read_to_string(d.path().join("t.json")).unwrap();
    assert_ne!(before, after);
    let names: Vec<String> =
        std::fs::read_dir(d.path()).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(sorted, ["horiz.json", "t.json"]);
}

#[test]
fn decompose_json() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(d.path(), &["build", "slit-tori", "--a", "0.1", "-o", "f.json", "--curve-output", "alpha.json"])), 0);
    let o = run(d.path(), &["decompose", "--surface", "f.json", "--m0", "5", "--json", "--t", "-2"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema"], "teichscan-decomposition/1");
    let shorts = v["shorts"].as_array().unwrap();
    assert!(!shorts.is_empty());
    for a in shorts {
        let sum = a["mod_e"].as_f64().unwrap() + a["mod_f"].as_f64().unwrap() + a["mod_g"].as_f64().unwrap();
        assert!(sum >= 5.0);
    }
    let o = run(d.path(), &["estimate", "--surface", "f.json", "--curve", "alpha.json", "--t", "-2", "--json"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["is_short"], true);
}

#[test]
fn scans_do_not_depend_on_jobs() {
    let d = tempfile::tempdir().unwrap();
    torus_files(d.path());
    let args = |jobs: &'static str, out: &'static str, js: &'static str| {
        vec![
            "scan", "--surface", "t.json", "--curve", "horiz.json", "--t-min", "-1.5", "--t-max", "1.5", "--t-step", "0.25",
            "--jobs", jobs, "--output", out, "--json-output", js,
        ]
    };
    assert_eq!(code(&run(d.path(), &args("1", "a.csv", "a.json"))), 0);
    assert_eq!(code(&run(d.path(), &args("3", "b.csv", "b.json"))), 0);
    let read = |n: &str| std::fs::read_to_string(d.path().join(n)).unwrap();
    assert_eq!(read("a.csv"), read("b.csv"));
    assert_eq!(read("a.json"), read("b.json"));
    assert!(read("a.csv").lines().nth(1).unwrap().starts_with("t,flat_len,h,v,ext,hyp,ext_lb,hyp_lb,class,case,dominance,flags"));

    let q1 = run(d.path(), &["quasiconvexity", "--scan", "a.csv"]);
    let q2 = run(d.path(), &["quasiconvexity", "--scan", "a.json"]);
    assert_eq!(code(&q1), 0);
    assert_eq!(q1.stdout, q2.stdout);
    let v: Value = serde_json::from_slice(&q1.stdout).unwrap();
    assert_eq!(v["schema"], "teichscan-quasiconvexity/1");
    assert_eq!(v["clean_rows"], 13);
}

#[test]
fn slit_tori_example() {
    let d = tempfile::tempdir().unwrap();
    let o = run(
        d.path(),
        &[
            "example", "slit-tori", "--a", "0.1", "--t-min", "-2", "--t-max", "2.3", "--t-step", "0.1", "--output", "s.csv",
            "--report", "r.json", "--svg", "s.svg",
        ],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(d.path().join("s.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2 + 44);
    let r = json(d.path().join("r.json"));
    assert_eq!(r["schema"], "teichscan-example/1");
    assert!(r["quasiconvexity"]["k_ext"].as_f64().unwrap() >= 1.0);
    assert_eq!(r["flagged_rows"], 0);
    let svg = std::fs::read_to_string(d.path().join("s.svg")).unwrap();
    assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
    assert!(svg.contains("<polyline"));
}

#[test]
fn small_suite() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["suite", "--seed", "4", "--size", "2", "--t-min", "-1", "--t-max", "1", "--t-step", "0.5", "-o", "s.json"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(d.path().join("s.json"));
    assert_eq!(v["schema"], "teichscan-suite/1");
    assert_eq!(v["checks"].as_array().unwrap().len(), 11);
    assert!(String::from_utf8_lossy(&o.stderr).contains("PASS k_ext"));
}
