use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn ogj(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ogj")).args(args).env_remove("OGJ_CACHE_DIR").output().unwrap()
}

fn run_ok(args: &[&str]) -> Value {
    let out = ogj(args);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn write(dir: &Path, name: &str, v: &Value) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, serde_json::to_string(v).unwrap()).unwrap();
    p
}

fn unweighted(n: usize, edges: &[(usize, usize)]) -> Value {
    json!({
        "vertices": (0..n).map(|i| json!({"id": i.to_string()})).collect::<Vec<_>>(),
        "edges": edges.iter().map(|(u, v)| json!({"u": u.to_string(), "v": v.to_string(), "w": "1"})).collect::<Vec<_>>(),
        "normalized": false,
    })
}

fn cycle(n: usize, offset: usize) -> Vec<(usize, usize)> {
    (0..n).map(|i| (offset + i, offset + (i + 1) % n)).collect()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn validate_reports_witnesses_and_exit_codes() {
    let dir = TempDir::new().unwrap();
    let good = write(dir.path(), "good.json", &unweighted(3, &[(0, 1), (1, 2)]));
    assert_eq!(run_ok(&["validate", s(&good)])["valid"], true);

    let bad = json!({
        "vertices": [{"id": "a"}, {"id": "b"}],
        "edges": [{"u": "a", "v": "b", "w": "1/3"}],
        "normalized": true,
    });
    let bad = write(dir.path(), "bad.json", &bad);
    let out = ogj(&["validate", s(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["violations"][0]["axiom"], "normalization");
    assert_eq!(v["violations"][0]["total"], "2/3");

    let negative = write(dir.path(), "neg.json", &json!({
        "vertices": [{"id": "a"}, {"id": "b"}],
        "edges": [{"u": "a", "v": "b", "w": "-1"}],
    }));
    assert_eq!(ogj(&["validate", s(&negative)]).status.code(), Some(2));
    assert_eq!(ogj(&["cost", s(&negative), s(&good)]).status.code(), Some(2));
}

#[test]
fn cost_solve_and_decompose() {
    let dir = TempDir::new().unwrap();
    let g = write(dir.path(), "g.json", &unweighted(3, &[(0, 1), (1, 2)]));
    let h = write(dir.path(), "h.json", &unweighted(3, &[(0, 2), (2, 1)]));
    let v = run_ok(&["cost", s(&g), s(&h), "--scheme", "degree"]);
    assert_eq!(v["rho"], "0/1");
    let star = write(dir.path(), "star.json", &unweighted(4, &[(0, 1), (0, 2), (0, 3)]));
    let path = write(dir.path(), "p4.json", &unweighted(4, &[(0, 1), (1, 2), (2, 3)]));
    let v = run_ok(&["cost", s(&star), s(&path), "--scheme", "degree"]);
    assert_ne!(v["rho"], "0/1");

    let solved = run_ok(&["solve", s(&g), s(&h), "--scheme", "degree"]);
    assert_eq!(solved["report"]["rho"], "0/1");
    let joining = write(dir.path(), "j.json", &solved["joining"]);
    let d = run_ok(&["decompose", s(&g), s(&h), s(&joining)]);
    assert_eq!(d["pi"], json!([["1/1"]]));
}

#[test]
fn detect_and_identify_verdicts() {
    let dir = TempDir::new().unwrap();
    let c6 = write(dir.path(), "c6.json", &unweighted(6, &cycle(6, 0)));
    let mut tt = cycle(3, 0);
    tt.extend(cycle(3, 3));
    let tt = write(dir.path(), "tt.json", &unweighted(6, &tt));
    let v = run_ok(&["detect", s(&c6), s(&tt)]);
    assert_eq!(v["verdict"], "zero-cost-but-uncertified");
    assert_eq!(v["flags"]["complete"], true);
    let v = run_ok(&["detect", s(&c6), s(&tt), "--brute-force"]);
    assert_eq!(v["flags"]["brute_force"], false);

    let wl = run_ok(&["wl", s(&c6), s(&tt)]);
    assert_eq!(wl["wl"]["outcome"], "inconclusive");
    assert_eq!(wl["lazy_cost_zero"], true);
    assert_eq!(ogj(&["wl", s(&c6), s(&tt), "--delta", "1/2"]).status.code(), Some(2));

    let p3 = write(dir.path(), "p3.json", &unweighted(3, &[(0, 1), (1, 2)]));
    let v = run_ok(&["identify", s(&p3), s(&p3), "--scheme", "multiweight"]);
    assert_eq!(v["isomorphisms"], json!([{"0": "0", "1": "1", "2": "2"}, {"0": "2", "1": "1", "2": "0"}]));
    assert_eq!(v["flags"]["complete"], true);
}

#[test]
fn tiny_cap_reports_cap_exceeded() {
    let dir = TempDir::new().unwrap();
    let c6 = write(dir.path(), "c6.json", &unweighted(6, &cycle(6, 0)));
    let out = ogj(&["identify", s(&c6), s(&c6), "--cap", "1"]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(ogj(&["identify", s(&c6), s(&c6), "--cap", "0"]).status.code(), Some(2));
}

#[test]
fn metric_over_three_weightings() {
    let dir = TempDir::new().unwrap();
    let weighted = |ws: [&str; 3]| {
        json!({
            "vertices": [{"id": "a"}, {"id": "b"}, {"id": "c"}, {"id": "d"}],
            "edges": [
                {"u": "a", "v": "b", "w": ws[0]},
                {"u": "b", "v": "c", "w": ws[1]},
                {"u": "c", "v": "d", "w": ws[2]},
            ],
        })
    };
    let graphs = json!([weighted(["1", "1", "1"]), weighted(["2", "1", "1"]), weighted(["1", "3", "2"])]);
    let graphs = write(dir.path(), "graphs.json", &graphs);
    let hop = json!([["0", "1", "2", "3"], ["1", "0", "1", "2"], ["2", "1", "0", "1"], ["3", "2", "1", "0"]]);
    let cost = write(dir.path(), "cost.json", &hop);
    for kappa in ["1", "2"] {
        let v = run_ok(&["metric", s(&graphs), s(&cost), "--kappa", kappa]);
        assert_eq!(v["triangle_violations"], json!([]));
        assert_eq!(v["pairs_tested"], 9);
    }
    let not_metric = write(dir.path(), "bad_cost.json", &json!([["0", "5", "1", "1"], ["5", "0", "1", "1"], ["1", "1", "0", "1"], ["1", "1", "1", "0"]]));
    assert_eq!(ogj(&["metric", s(&graphs), s(&not_metric)]).status.code(), Some(2));
}

#[test]
fn glue_two_paths_at_a_magic_vertex() {
    let dir = TempDir::new().unwrap();
    let part = unweighted(3, &[(0, 1), (1, 2)]);
    let spec = json!({
        "parts": [
            {"graph": part, "leaf_map": {"0": "r"}},
            {"graph": part, "leaf_map": {"2": "r"}},
        ],
        "m": [{"id": "r"}],
        "mu": ["1/2", "1/2"],
    });
    let spec = write(dir.path(), "spec.json", &spec);
    let v = run_ok(&["glue", s(&spec)]);
    assert_eq!(v["m_vertices"], json!(["r"]));
    assert_eq!(v["graph"]["vertices"].as_array().unwrap().len(), 5);
    let v = run_ok(&["glue", s(&spec), "--scheme", "multiweight"]);
    assert_eq!(v["holds"], true);

    let broken = json!({"parts": [{"graph": part, "leaf_map": {"1": "r"}}], "m": [{"id": "r"}], "mu": ["1"]});
    let broken = write(dir.path(), "broken.json", &broken);
    assert_eq!(ogj(&["glue", s(&broken)]).status.code(), Some(2));
}

#[test]
fn generate_is_deterministic_and_cached() {
    let dir = TempDir::new().unwrap();
    let args = ["generate", "forest", "--sizes", "3,4", "--weights", "3", "--seed", "11"];
    let a = ogj(&args).stdout;
    assert_eq!(a, ogj(&args).stdout);
    let cache = dir.path().join("cache");
    let cached = |args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_ogj")).args(args).env("OGJ_CACHE_DIR", &cache).output().unwrap()
    };
    assert_eq!(cached(&args).stdout, a);
    assert_eq!(fs::read_dir(&cache).unwrap().count(), 1);
    assert_eq!(cached(&args).stdout, a);
    let doc: Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(doc["vertices"].as_array().unwrap().len(), 7);
    assert_eq!(ogj(&["generate", "flower"]).status.code(), Some(2));
    assert_eq!(ogj(&["generate", "hypercube"]).status.code(), Some(2));
}

#[test]
fn sweep_output_is_byte_identical_across_job_counts() {
    let one = ogj(&["sweep", "trees", "--trials", "8", "--seed", "5", "--jobs", "1"]);
    let four = ogj(&["sweep", "trees", "--trials", "8", "--seed", "5", "--jobs", "4"]);
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
    let v: Value = serde_json::from_slice(&one.stdout).unwrap();
    assert_eq!(v["outcomes"].as_array().unwrap().len(), 8);
}

#[test]
fn failing_sweep_exits_with_suite_failure() {
    // Trial 17 of this stability sweep has a deviation that does not shrink as epsilon halves.
    let out = ogj(&["sweep", "stability", "--seed", "2024"]);
    assert_eq!(out.status.code(), Some(3));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["passed"], 19);
    assert_eq!(ogj(&["sweep", "nonsense"]).status.code(), Some(2));
}
