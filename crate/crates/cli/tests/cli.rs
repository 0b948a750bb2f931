use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn vcsp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vcsp")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success() || out.status.code() == Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn gen(dir: &TempDir, name: &str, args: &[&str]) -> PathBuf {
    let p = dir.path().join(name);
    let mut all = vec!["gen"];
    all.extend_from_slice(args);
    all.extend_from_slice(&["--out", p.to_str().unwrap()]);
    let out = vcsp(&all);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn gen_grid_counts() {
    let out = vcsp(&["gen", "vc-grid", "--rows", "4", "--cols", "12"]);
    let v = json(&out);
    assert_eq!(v["left"]["domain"].as_array().unwrap().len(), 48);
    // one f tuple per grid edge, one unary per vertex
    let tuples = v["left"]["tuples"].as_array().unwrap();
    let f = tuples.iter().filter(|t| t["sym"] == "f").count();
    let u = tuples.iter().filter(|t| t["sym"] == "u").count();
    assert_eq!(u, 48);
    assert_eq!(f, 4 * 11 + 3 * 12);
}

#[test]
fn gen_output_parses_back() {
    let dir = TempDir::new().unwrap();
    for (name, args) in [
        ("a.json", vec!["random-minsol", "--n", "6", "--seed", "3"]),
        ("b.json", vec!["random-maxsol", "--n", "6", "--seed", "3"]),
        ("c.json", vec!["clique-reduction", "--n", "5"]),
        ("d.json", vec!["apex-grid", "--rows", "3", "--cols", "3"]),
    ] {
        let p = gen(&dir, name, &args);
        let again = vcsp(&["check", "--instance", s(&p)]);
        assert!(again.status.success(), "{name}: {}", String::from_utf8_lossy(&again.stderr));
    }
}

#[test]
fn ptas_matches_oracle_on_grid() {
    let dir = TempDir::new().unwrap();
    let p = gen(&dir, "g.json", &["vc-grid", "--rows", "4", "--cols", "10"]);
    let v = json(&vcsp(&["solve", "--instance", s(&p), "--mode", "min", "--algo", "ptas", "--epsilon", "1/2", "--oracle", "dp"]));
    assert_eq!(v["value"], "20");
    assert_eq!(v["report"]["oracle"], "20");
    assert_eq!(v["report"]["ratio"], "1");
    assert_eq!(v["details"]["blend_violations"], 0);
}

#[test]
fn sa_levels_on_triangle() {
    let dir = TempDir::new().unwrap();
    let p = gen(&dir, "t.json", &["cycle", "--n", "3", "--right", "is"]);
    let v3 = json(&vcsp(&["solve", "--instance", s(&p), "--mode", "max", "--algo", "sa", "--level", "3", "--lp", "rational"]));
    assert_eq!(v3["value"], "1");
    let v2 = json(&vcsp(&["solve", "--instance", s(&p), "--mode", "max", "--algo", "sa", "--level", "2"]));
    assert_eq!(v2["value"], "3/2");
}

#[test]
fn empty_instance_has_value_zero() {
    let dir = TempDir::new().unwrap();
    let p = write(
        &dir,
        "e.json",
        r#"{"signature":[{"name":"f","arity":2}],"left":{"domain":[],"tuples":[]},
            "right":{"domain":["0","1"],"tables":[{"sym":"f","default":"0","entries":[]}]}}"#,
    );
    let v = json(&vcsp(&["solve", "--instance", s(&p), "--mode", "min", "--algo", "dp"]));
    assert_eq!(v["value"], "0");
    assert_eq!(v["feasible"], true);
}

#[test]
fn check_classifies_fixtures() {
    let dir = TempDir::new().unwrap();
    let vc = gen(&dir, "vc.json", &["path", "--n", "3"]);
    let v = json(&vcsp(&["check", "--instance", s(&vc)]));
    assert_eq!(v["min_sol"], serde_json::json!(["0", "1"]));
    assert_eq!(v["diagonalisable"], true);
    assert_eq!(v["path_len"], 3);

    let crisp = write(
        &dir,
        "k3.json",
        r#"{"signature":[{"name":"f","arity":2}],"left":{"domain":["a","b"],"tuples":[{"sym":"f","args":["a","b"],"value":"1"}]},
            "right":{"domain":["0","1","2"],"tables":[{"sym":"f","default":"0","entries":[
              {"args":["0","0"],"value":"inf"},{"args":["1","1"],"value":"inf"},{"args":["2","2"],"value":"inf"}]}]}}"#,
    );
    let v = json(&vcsp(&["check", "--instance", s(&crisp)]));
    assert_eq!(v["diagonalisable"], false);
    assert!(v["min_sol"].is_null());

    let is = gen(&dir, "is.json", &["cycle", "--n", "3", "--right", "is"]);
    let v = json(&vcsp(&["check", "--instance", s(&is)]));
    assert_eq!(v["max_sol_bottom"], "0");
}

#[test]
fn overcast_and_separator() {
    let dir = TempDir::new().unwrap();
    let k2 = gen(&dir, "k2.json", &["clique", "--n", "2"]);
    let k3 = gen(&dir, "k3.json", &["clique", "--n", "3"]);
    let v = json(&vcsp(&["check", "--overcast", s(&k3), s(&k2)]));
    assert_eq!(v["overcast"], true);
    assert!(!v["omega"].as_array().unwrap().is_empty());
    let v = json(&vcsp(&["check", "--overcast", s(&k2), s(&k3)]));
    assert_eq!(v["overcast"], false);
    assert_eq!(v["left_value"], "1/3");
    assert_eq!(v["right_value"], "1");
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    // infeasible: an edge into a structure forbidding everything
    let inf = write(
        &dir,
        "inf.json",
        r#"{"signature":[{"name":"f","arity":2}],"left":{"domain":["a","b"],"tuples":[{"sym":"f","args":["a","b"],"value":"1"}]},
            "right":{"domain":["0"],"tables":[{"sym":"f","default":"inf","entries":[]}]}}"#,
    );
    let out = vcsp(&["solve", "--instance", s(&inf), "--mode", "min", "--algo", "naive"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["feasible"], false);

    let g = gen(&dir, "g.json", &["vc-grid", "--rows", "4", "--cols", "6"]);
    let out = vcsp(&["solve", "--instance", s(&g), "--mode", "min", "--algo", "naive", "--budget", "10"]);
    assert_eq!(out.status.code(), Some(3));

    let out = vcsp(&["solve", "--instance", s(&g), "--mode", "min", "--algo", "sa"]);
    assert_eq!(out.status.code(), Some(4));
    let out = vcsp(&["solve", "--instance", s(&dir.path().join("missing.json")), "--mode", "min", "--algo", "dp"]);
    assert_eq!(out.status.code(), Some(4));
    let bad = write(&dir, "bad.json", "{not json");
    let out = vcsp(&["solve", "--instance", s(&bad), "--mode", "min", "--algo", "dp"]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(vcsp(&["frobnicate"]).status.code(), Some(4));
    assert_eq!(vcsp(&["--help"]).status.code(), Some(0));
}

#[test]
fn bench_is_deterministic_without_timing() {
    let dir = TempDir::new().unwrap();
    let run = |name: &str| {
        let p = dir.path().join(name);
        let out = vcsp(&["bench", "--suite", "oracle-concordance", "--cases", "20", "--seed", "5", "--no-timing", "--out", s(&p)]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        std::fs::read(p).unwrap()
    };
    let (a, b) = (run("a.csv"), run("b.csv"));
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("case,algo,eps,level,value,oracle,ratio,ms\n"));
    assert_eq!(text.lines().count(), 21);
    assert!(text.lines().skip(1).all(|l| l.ends_with(',')));
}

#[test]
fn duality_bench_resolves_every_pair() {
    let out = vcsp(&["bench", "--suite", "duality-roundtrip", "--cases", "15", "--no-timing"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 16);
    assert!(!text.contains("unresolved"));
}
