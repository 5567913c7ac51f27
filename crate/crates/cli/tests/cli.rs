use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn ergolab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ergolab"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header: Vec<String> = r.headers().unwrap().iter().map(String::from).collect();
    let mut rows = vec![header];
    rows.extend(r.records().map(|x| x.unwrap().iter().map(String::from).collect()));
    rows
}

fn col(rows: &[Vec<String>], name: &str) -> usize {
    rows[0].iter().position(|c| c == name).unwrap()
}

#[test]
fn gowers_of_a_character() {
    let dir = tempfile::tempdir().unwrap();
    let out = ergolab(dir.path(), &["gowers", "--N", "11,12", "--s", "2", "--f", "char:k=3", "--out", "g"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = csv_rows(&dir.path().join("g.csv"));
    assert_eq!(rows.len(), 5);
    let (s, norm, spec) = (col(&rows, "s"), col(&rows, "norm"), col(&rows, "spectral_u2"));
    for r in &rows[1..] {
        let v: f64 = r[norm].parse().unwrap();
        if r[s] == "1" {
            assert!(v < 1e-12);
        } else {
            assert!((v - 1.0).abs() < 1e-12);
            assert!((r[spec].parse::<f64>().unwrap() - 1.0).abs() < 1e-12);
        }
    }
    let meta: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("g.json")).unwrap()).unwrap();
    assert_eq!(meta["command"], "gowers");
    assert_eq!(meta["rows"], 4);
    assert_eq!(meta["runtime"]["seed"], 0);
    assert!(meta["columns"]["norm"].is_string());
}

#[test]
fn omega_parity_density() {
    let dir = tempfile::tempdir().unwrap();
    let out = ergolab(dir.path(), &["arith", "--density", "--a", "0", "--b", "2", "--N", "1000000", "--out", "d"]);
    assert!(out.status.success());
    let rows = csv_rows(&dir.path().join("d.csv"));
    let d: f64 = rows[1][col(&rows, "density")].parse().unwrap();
    assert!((d - 0.5).abs() < 0.02, "{d}");
}

#[test]
fn validation_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["gowers", "--N", "", "--out", "e"][..],
        &["arith", "--density", "--scan", "--a", "0", "--b", "2", "--N", "10"],
        &["hardy", "--level", "--a", "0.3", "--b", "0.1", "--N", "10"],
        &["hardy", "--sandwich", "--c", "0.1", "--d", "0.3", "--eps", "0"],
        &["seminorm", "--kind", "other", "--N", "10"],
    ] {
        let out = ergolab(dir.path(), args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stderr.is_empty());
    }
    assert!(!dir.path().join("e.csv").exists());
}

#[test]
fn budget_overrun_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = ergolab(dir.path(), &["--max-work", "1000", "gowers", "--N", "64", "--s", "3", "--out", "b"]);
    assert_eq!(out.status.code(), Some(3));
    let out = ergolab(dir.path(), &["--max-points", "100", "arith", "--katai", "--primes", "2,3,5,7", "--n1", "20", "--n2", "20", "--seq", "one"]);
    assert_eq!(out.status.code(), Some(0), "katai is bounded by max-work, not max-points");
}

#[test]
fn coherent_dictionary_exits_4_with_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let out = ergolab(
        dir.path(),
        &["decompose", "--input", "phase:0.3", "--N", "200", "--farey", "1", "--extra", "0.1,0.1000000001", "--max-terms", "3", "--tol", "0", "--out", "ill"],
    );
    assert_eq!(out.status.code(), Some(4));
    let diag: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("ill.json")).unwrap()).unwrap();
    assert_eq!(diag["status"], "numerical_error");
    assert_eq!(diag["details"]["partial"]["atoms"].as_array().unwrap().len(), 1);
    assert!(!dir.path().join("ill.csv").exists());
}

#[test]
fn replay_is_byte_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let run = |threads: &str, out: &str| {
        let o = ergolab(
            dir.path(),
            &["--seed", "11", "--threads", threads, "decompose", "--input", "noisy-phase:0.2,0.3", "--N", "3000", "--out", out],
        );
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        fs::read(dir.path().join(format!("{out}.csv"))).unwrap()
    };
    let a = run("1", "a");
    assert_eq!(a, run("1", "b"));
    assert_eq!(a, run("4", "c"));
    let o = ergolab(dir.path(), &["--seed", "12", "decompose", "--input", "noisy-phase:0.2,0.3", "--N", "3000", "--out", "d"]);
    assert!(o.status.success());
    assert_ne!(a, fs::read(dir.path().join("d.csv")).unwrap());
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("exp.toml"),
        "experiment = \"gowers\"\nseed = 5\nout = \"runs/u\"\n[limits]\ngowers_budget = 100000000\n[params]\nN = [5, 6]\ns = 3\nf = \"quad\"\n",
    )
    .unwrap();
    let out = ergolab(dir.path(), &["--config", "exp.toml", "gowers", "--s", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = csv_rows(&dir.path().join("runs/u.csv"));
    assert_eq!(rows.len(), 5);
    let meta: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("runs/u.json")).unwrap()).unwrap();
    assert_eq!(meta["config"]["s"], 2);
    assert_eq!(meta["config"]["f"], "quad");
    assert_eq!(meta["runtime"]["seed"], 5);

    let out = ergolab(dir.path(), &["--config", "exp.toml", "arith", "--density"]);
    assert_eq!(out.status.code(), Some(2), "experiment name must match");
    fs::write(dir.path().join("bad.toml"), "[params]\nbogus = 1\n").unwrap();
    let out = ergolab(dir.path(), &["--config", "bad.toml", "gowers", "--N", "5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn every_subcommand_writes_a_table() {
    let dir = tempfile::tempdir().unwrap();
    let cases: &[&[&str]] = &[
        &["average", "--shifts", "0.414,0|0,0.732", "--observables", "1,0|0,1", "--iterates", "1;0|0;0,1", "--N", "100"],
        &["correlate", "--shifts", "0.414", "--f0", "-1", "--observables", "1", "--N", "4"],
        &["arith", "--distance", "--phi", "liouville", "--P", "100,1000"],
        &["arith", "--scan", "--phi", "liouville", "--a-max", "3", "--N", "1000"],
        &["arith", "--twisted", "--phi", "mobius", "--alpha", "0.3", "--N", "1000"],
        &["arith", "--katai", "--primes", "2,3,5,7", "--n1", "20", "--n2", "20", "--seq", "mult:liouville"],
        &["hardy", "--level", "--a", "0", "--b", "0.1", "--N", "10000"],
        &["hardy", "--localize", "--center", "1000,10000"],
        &["hardy", "--decay", "--alpha", "0.414", "--N", "1000"],
        &["hardy", "--sandwich", "--c", "0.1", "--d", "0.3", "--eps", "0.2"],
        &["seminorm", "--seq", "phase:0.3", "--N", "300"],
        &["seminorm", "--kind", "hk", "--shifts", "0.414", "--f", "1", "--N", "50"],
    ];
    for (i, args) in cases.iter().enumerate() {
        let prefix = format!("t{i}");
        let mut full: Vec<&str> = args.to_vec();
        full.extend(["--out", &prefix]);
        let out = ergolab(dir.path(), &full);
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        let rows = csv_rows(&dir.path().join(format!("{prefix}.csv")));
        assert!(rows.len() > 1, "{args:?}");
        let text = fs::read_to_string(dir.path().join(format!("{prefix}.csv"))).unwrap();
        assert!(text.ends_with("\r\n"));
    }
}
