use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn perfgen(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_perfgen")).args(args).output().expect("binary runs")
}

fn stdout_json(o: &Output) -> Value {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("json on stdout")
}

#[test]
fn gen_then_analyze_with_provenance() {
    let dir = tempfile::tempdir().unwrap();
    let prov = dir.path().join("arr.json");
    let o = perfgen(&["gen", "-n", "40", "--count", "3", "--seed", "5", "--provenance", prov.to_str().unwrap()]);
    assert!(o.status.success());
    let g6 = dir.path().join("g.g6");
    fs::write(&g6, &o.stdout).unwrap();
    assert_eq!(String::from_utf8_lossy(&o.stdout).lines().count(), 3);
    let o = perfgen(&[
        "analyze",
        "--in",
        g6.to_str().unwrap(),
        "--arrangement",
        prov.to_str().unwrap(),
        "--hamilton",
        "--clique-colour",
        "--fast-invariants",
        "--invariants",
    ]);
    let v = stdout_json(&o);
    let items = v.as_array().unwrap();
    assert_eq!(items.len(), 3);
    for it in items {
        assert_eq!(it["fast_invariants"]["alpha"], it["invariants"]["alpha"]);
        let outcome = it["hamilton"]["result"]["outcome"].as_str().unwrap();
        if outcome != "failure" {
            assert_eq!(it["hamilton"]["verified"], true);
        }
    }
}

#[test]
fn gen_is_seeded() {
    let a = perfgen(&["gen", "-n", "30", "--count", "4", "--seed", "9", "--format", "json"]);
    let b = perfgen(&["gen", "-n", "30", "--count", "4", "--seed", "9", "--format", "json"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn experiment_output_ignores_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let mut payloads = Vec::new();
    for threads in ["1", "3"] {
        let json = dir.path().join(format!("r{threads}.json"));
        let csv = dir.path().join(format!("r{threads}.csv"));
        let o = Command::new(env!("CARGO_BIN_EXE_perfgen"))
            .env("PERFGEN_THREADS", threads)
            .args(["experiment", "hamilton", "-n", "60", "--trials", "12", "--seed", "3"])
            .args(["--json", json.to_str().unwrap(), "--csv", csv.to_str().unwrap()])
            .output()
            .unwrap();
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(fs::read_to_string(&csv).unwrap().lines().count(), 13);
        payloads.push(fs::read(&json).unwrap());
    }
    assert_eq!(payloads[0], payloads[1]);
}

#[test]
fn ldist_and_partition_summaries() {
    let v = stdout_json(&perfgen(&["ldist", "-n", "2"]));
    let pmf: Vec<f64> = serde_json::from_value(v["pmf"].clone()).unwrap();
    assert!((pmf[1] - 4.0 / 7.0).abs() < 1e-15);
    let v = stdout_json(&perfgen(&["ldist", "-n", "256", "--tail", "4", "--verify-concentration"]));
    assert_eq!(v["concentration"]["passed"], true);
    let v = stdout_json(&perfgen(&["partition", "-m", "3", "--samples", "50", "--seed", "1", "--stats"]));
    assert_eq!(v["exact_block_count_mean"], 2.0);
    let v = stdout_json(&perfgen(&["partition", "-m", "5", "--samples", "2"]));
    assert_eq!(v.as_array().unwrap().len(), 2);
}

#[test]
fn density_of_triangles() {
    let dir = tempfile::tempdir().unwrap();
    let g6 = dir.path().join("k4.g6");
    fs::write(&g6, "C~\n").unwrap();
    let v = stdout_json(&perfgen(&["density", "--in", g6.to_str().unwrap(), "--pattern", "K3"]));
    assert_eq!(v[0]["t_inj"], "1");
    assert_eq!(v[0]["t_graphon"], "7/32");
    let v = stdout_json(&perfgen(&["density", "--in", g6.to_str().unwrap(), "--pattern", "g6:A_"]));
    assert_eq!(v[0]["t_graphon"], "1/2");
}

#[test]
fn exit_codes() {
    assert_eq!(perfgen(&["experiment", "hamilton", "-n", "20", "--trials", "0"]).status.code(), Some(2));
    assert_eq!(perfgen(&["experiment", "trichotomy", "-n", "20"]).status.code(), Some(2));
    assert_eq!(perfgen(&["gen", "-n", "5", "--sign", "sideways"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let g6 = dir.path().join("bad.g6");
    fs::write(&g6, "not graph6 \u{1}\n").unwrap();
    assert_eq!(perfgen(&["analyze", "--in", g6.to_str().unwrap(), "--invariants"]).status.code(), Some(2));
    let big = dir.path().join("big.g6");
    let o = perfgen(&["gen", "-n", "70", "--seed", "1"]);
    fs::write(&big, &o.stdout).unwrap();
    assert_eq!(perfgen(&["analyze", "--in", big.to_str().unwrap(), "--invariants"]).status.code(), Some(3));
}
