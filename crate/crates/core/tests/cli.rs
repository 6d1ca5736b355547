use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qudit-ssa"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not a JSON report ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

fn maximally_mixed(n: usize) -> String {
    let rows: Vec<Vec<[f64; 2]>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| [if i == j { 1.0 / n as f64 } else { 0.0 }, 0.0])
                .collect()
        })
        .collect();
    serde_json::to_string(&rows).unwrap()
}

#[test]
fn quantum_check_on_maximally_mixed_state_holds() {
    let dir = TempDir::new().unwrap();
    let rho = write(dir.path(), "rho7.json", &maximally_mixed(7));
    let out = run(&["check", "--mode", "quantum", "--shape", "2x2x2", "--input", &rho]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let verdict = &r["verdicts"][0];
    assert_eq!(verdict["holds"], true);
    assert!(verdict["gap"].as_f64().unwrap() > 0.0);
    assert_eq!(r["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn classical_check_on_uniform_cube_has_zero_gap() {
    let dir = TempDir::new().unwrap();
    let p = write(dir.path(), "p.json", &serde_json::to_string(&[0.125; 8]).unwrap());
    let out = run(&["check", "--mode", "classical", "--shape", "2x2x2", "--input", &p]);
    assert_eq!(out.status.code(), Some(0));
    assert!(report(&out)["verdicts"][0]["gap"].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn violated_check_exits_one() {
    let dir = TempDir::new().unwrap();
    let p = write(dir.path(), "p.json", "[0.5, 0.5]");
    let out = run(&[
        "--tolerance=-1",
        "check",
        "--mode",
        "classical",
        "--shape",
        "2x1",
        "--input",
        &p,
    ]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(report(&out)["verdicts"][0]["holds"], false);
}

#[test]
fn input_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let malformed = write(dir.path(), "bad.json", "[0.5, 0.5");
    let unnormalized = write(dir.path(), "un.json", "[0.5, 0.6]");
    let missing = dir.path().join("missing.json").to_string_lossy().into_owned();
    for input in [&malformed, &unnormalized, &missing] {
        let out = run(&["check", "--mode", "classical", "--shape", "2x2", "--input", input]);
        assert_eq!(out.status.code(), Some(2), "{input}");
        assert!(!out.stderr.is_empty());
    }
    assert_eq!(run(&["check", "--mode", "warp"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn exhaustive_scan_covers_all_permutations() {
    let dir = TempDir::new().unwrap();
    let p = write(dir.path(), "p.json", "[0.05, 0.1, 0.15, 0.2, 0.1, 0.25, 0.15]");
    let out = run(&["scan", "--input", &p, "--shape", "2x2x2", "--budget", "all"]);
    assert_eq!(out.status.code(), Some(0));
    let details = &report(&out)["details"];
    assert_eq!(details["count"], 5040);
    assert!(details["min_gap"].as_f64().unwrap() >= -1e-12);
}

#[test]
fn scan_is_deterministic_per_seed() {
    let dir = TempDir::new().unwrap();
    let p = write(dir.path(), "p.json", "[0.05, 0.1, 0.15, 0.2, 0.1, 0.25, 0.15]");
    let args = [
        "--seed",
        "7",
        "scan",
        "--input",
        &p,
        "--shape",
        "2x2x2",
        "--budget",
        "random:100",
    ];
    let (a, b) = (report(&run(&args)), report(&run(&args)));
    assert_eq!(a["digest"], b["digest"]);
    assert_eq!(a["details"], b["details"]);
}

#[test]
fn scan_rejects_oversized_exhaustive_budget() {
    let dir = TempDir::new().unwrap();
    let p = write(dir.path(), "p.json", &serde_json::to_string(&[1.0 / 11.0; 11]).unwrap());
    let out = run(&["scan", "--input", &p, "--shape", "3x4", "--budget", "all"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn falsify_audits_bundled_specs() {
    let printed = run(&["falsify", "--spec", "sub1_printed.json", "--trials", "10000"]);
    assert_eq!(printed.status.code(), Some(0));
    let violation = &report(&printed)["details"]["violation"];
    assert!(violation["gap"].as_f64().unwrap() < -1e-6);

    let derived = run(&["falsify", "--spec", "eq12.json", "--trials", "2000"]);
    assert_eq!(derived.status.code(), Some(0));
    assert_eq!(report(&derived)["details"]["violation"], "none");

    let corners_only = ["falsify", "--spec", "eq13_printed", "--trials", "0"];
    assert_eq!(
        report(&run(&corners_only))["details"],
        report(&run(&corners_only))["details"]
    );

    assert_eq!(run(&["falsify", "--spec", "no_such_spec"]).status.code(), Some(2));
}

#[test]
fn tomogram_command() {
    let dir = TempDir::new().unwrap();
    let diag = write(dir.path(), "diag.json", "[[0.2, 0, 0], [0, 0.3, 0], [0, 0, 0.5]]");
    let out = run(&["tomogram", "--rho", &diag, "--theta", "0", "--phi", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let w: Vec<f64> = serde_json::from_value(report(&out)["details"]["tomogram"]["w"].clone()).unwrap();
    for (x, y) in w.iter().zip([0.2, 0.3, 0.5]) {
        assert!((x - y).abs() < 1e-12);
    }
    let unsupported = run(&[
        "tomogram",
        "--rho",
        &diag,
        "--theta",
        "0.3",
        "--phi",
        "0.1",
        "--spec",
        "ssa-derived",
    ]);
    assert_eq!(unsupported.status.code(), Some(2));

    let rho7 = write(dir.path(), "rho7.json", &maximally_mixed(7));
    let out = run(&[
        "tomogram",
        "--rho",
        &rho7,
        "--theta",
        "1.1",
        "--phi",
        "-0.4",
        "--spec",
        "ssa-derived",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["verdicts"][0]["holds"], true);
}

#[test]
fn sample_writes_valid_reproducible_files() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    for dir in [&a, &b] {
        let out_dir = dir.path().to_string_lossy().into_owned();
        let out = run(&[
            "--seed", "1", "sample", "--kind", "density", "--n", "7", "--count", "3", "--out", &out_dir,
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let mut names: Vec<_> = std::fs::read_dir(a.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert_eq!(names.len(), 3);
    for name in &names {
        let first = std::fs::read(a.path().join(name)).unwrap();
        assert_eq!(first, std::fs::read(b.path().join(name)).unwrap());
        let path = a.path().join(name).to_string_lossy().into_owned();
        let check = run(&["check", "--mode", "quantum", "--shape", "2x2x2", "--input", &path]);
        assert_eq!(check.status.code(), Some(0));
    }
}

#[test]
fn rank_one_samples_are_pure() {
    let dir = TempDir::new().unwrap();
    let out_dir = dir.path().to_string_lossy().into_owned();
    let out = run(&[
        "--seed", "4", "sample", "--kind", "density", "--n", "5", "--rank", "1", "--out", &out_dir,
    ]);
    assert_eq!(out.status.code(), Some(0));
    let file = std::fs::read_dir(dir.path()).unwrap().next().unwrap().unwrap().path();
    let text = std::fs::read_to_string(file).unwrap();
    let rho = qudit_ssa::cli::parse_density_matrix(&text).unwrap();
    assert!(rho.entropy().unwrap().abs() < 1e-10);
}

#[test]
fn output_flag_writes_the_report() {
    let dir = TempDir::new().unwrap();
    let p = write(dir.path(), "p.json", "[0.25, 0.25, 0.25, 0.25]");
    let target = dir.path().join("report.json").to_string_lossy().into_owned();
    let out = run(&[
        "--output",
        &target,
        "check",
        "--mode",
        "classical",
        "--shape",
        "2x2",
        "--input",
        &p,
    ]);
    assert_eq!(out.status.code(), Some(0));
    let saved: Value = serde_json::from_str(&std::fs::read_to_string(&target).unwrap()).unwrap();
    assert_eq!(saved, report(&out));
}
