use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn leibniz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_leibniz")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json output")
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const ONE_DIM: &str = r#"{"name":"one","arity":3,"dim":1,"brackets":[{"args":[1,1,1],"out":{"1":"1"}}]}"#;
const T2_L1: &str = r#"{"name":"T2.L1","arity":3,"dim":2,"brackets":[{"args":[1,1,1],"out":{"2":"1"}}]}"#;
const LIE2: &str =
    r#"{"name":"lie2","arity":2,"dim":2,"brackets":[{"args":[1,2],"out":{"2":"1"}},{"args":[2,1],"out":{"2":"-1"}}]}"#;
const SCALAR_CENTROID: &str = r#"{"name":"c","class":"centroid","matrices":[[["c","0"],["0","c"]]],"params":["c"]}"#;

#[test]
fn verify_reports_residual_and_exit_codes() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "one.json", ONE_DIM);
    let o = leibniz(&["verify", s(&bad)]);
    assert_eq!(code(&o), 1);
    let v = json(&o);
    assert_eq!(v["identically_zero"], false);
    assert_eq!(v["entries"][0]["residual"], "-2");

    let good = write(&dir, "t2l1.json", T2_L1);
    let o = leibniz(&["verify", s(&good)]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["entries"], Value::Array(vec![]));
}

#[test]
fn input_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&leibniz(&["verify", "/nonexistent/doc.json"])), 2);
    let bad = write(&dir, "bad.json", r#"{"name":"x","arity":3,"dim":2,"brackets":[{"args":[0,1,1],"out":{}}]}"#);
    let o = leibniz(&["verify", s(&bad)]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("brackets[0].args[0]"));
    let undeclared = write(&dir, "u.json", r#"{"name":"x","arity":3,"dim":1,"brackets":[{"args":[1,1,1],"out":{"1":"alpha"}}]}"#);
    assert_eq!(code(&leibniz(&["verify", s(&undeclared)])), 2);
    assert_eq!(code(&leibniz(&["operator", "solve", s(&bad), "--class", "bogus"])), 2);
    assert_eq!(code(&leibniz(&["catalog", "show", "T9.L9"])), 2);
}

#[test]
fn field_flag_adjoins_roots() {
    let dir = TempDir::new().unwrap();
    let doc = write(&dir, "i.json", r#"{"name":"x","arity":3,"dim":2,"brackets":[{"args":[1,1,1],"out":{"2":"i"}}]}"#);
    assert_eq!(code(&leibniz(&["verify", s(&doc)])), 2);
    assert_eq!(code(&leibniz(&["verify", s(&doc), "--field=-1"])), 0);
}

#[test]
fn operator_verify_solve_enumerate() {
    let dir = TempDir::new().unwrap();
    let alg = write(&dir, "t2l1.json", T2_L1);
    let cen = write(&dir, "c.json", SCALAR_CENTROID);
    let o = leibniz(&["operator", "verify", s(&alg), s(&cen)]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert_eq!(json(&o)["verdict"]["status"], "PASS");

    let bad = write(&dir, "bad.json", r#"{"name":"c","class":"centroid","matrices":[[["0","1"],["0","0"]]]}"#);
    let o = leibniz(&["operator", "verify", s(&alg), s(&bad)]);
    assert_eq!(code(&o), 1);
    assert_eq!(json(&o)["verdict"]["status"], "FAIL");

    let o = leibniz(&["operator", "solve", s(&alg), "--class", "centroid"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["dimension"], 2);

    let o = leibniz(&["operator", "enumerate", s(&alg), "--class", "centroid", "--prime", "3", "--count-only"]);
    assert_eq!(json(&o)["count"], 9);
    let o = leibniz(&[
        "operator", "enumerate", s(&alg), "--class", "derivation-weighted", "--weight", "0", "--prime", "2", "--count-only",
    ]);
    assert_eq!(json(&o)["count"], 4);
}

#[test]
fn complete_reports_gap() {
    let dir = TempDir::new().unwrap();
    let alg = write(&dir, "t2l1.json", T2_L1);
    let cen = write(&dir, "c.json", SCALAR_CENTROID);
    let o = leibniz(&["operator", "complete", s(&alg), s(&cen), "--prime", "3"]);
    assert_eq!(code(&o), 1);
    let v = json(&o);
    assert_eq!(v["containment"], true);
    assert_eq!(v["family_instances"], 3);
    assert_eq!(v["total"], 9);
    let missing = v["missing"].as_array().unwrap();
    assert!(missing.iter().any(|m| m["entries"] == serde_json::json!([0, 0, 1, 0])));
}

#[test]
fn construct_tl_of_lie2() {
    let dir = TempDir::new().unwrap();
    let lie = write(&dir, "lie2.json", LIE2);
    let o = leibniz(&["construct", "tl", s(&lie)]);
    assert_eq!(code(&o), 0);
    let t = write(&dir, "t.json", &stdout(&o));
    let v = json(&o);
    assert_eq!(v["arity"], 3);
    assert_eq!(v["brackets"][0]["args"], serde_json::json!([1, 1, 2]));
    assert_eq!(v["brackets"][0]["out"]["2"], "1");
    assert_eq!(v["brackets"][1]["args"], serde_json::json!([1, 2, 1]));
    assert_eq!(v["brackets"][1]["out"]["2"], "-1");
    assert_eq!(code(&leibniz(&["verify", s(&t)])), 0);
}

#[test]
fn construct_nijenhuis_gives_compatible_pair() {
    let dir = TempDir::new().unwrap();
    let lie = write(&dir, "lie2.json", LIE2);
    let n = write(&dir, "n.json", r#"{"name":"N","class":"nijenhuis","matrices":[[["0","0"],["1","0"]]]}"#);
    let o = leibniz(&["construct", "nijenhuis", s(&lie), s(&n)]);
    assert_eq!(code(&o), 0);
    let pair = write(&dir, "pair.json", &stdout(&o));
    assert!(json(&o)["second"].is_array());
    assert_eq!(code(&leibniz(&["verify", s(&pair)])), 0);
}

#[test]
fn construct_refuses_non_averaging_operator() {
    let dir = TempDir::new().unwrap();
    let lie = write(&dir, "lie2.json", LIE2);
    let b = write(&dir, "b.json", r#"{"name":"b","class":"averaging","matrices":[[["1","0"],["0","2"]]]}"#);
    let o = leibniz(&["construct", "avg-binary", s(&lie), s(&b)]);
    assert_eq!(code(&o), 1);
    assert!(json(&o)["refused"].is_string());
}

#[test]
fn catalog_list_show_check() {
    let o = leibniz(&["catalog", "list", "--kind", "algebra", "--dim", "2"]);
    assert_eq!(json(&o), serde_json::json!(["T2.L1", "T2.L2"]));
    let o = leibniz(&["catalog", "show", "T2.L1"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["document"]["name"], "T2.L1");

    let dir = TempDir::new().unwrap();
    let out = dir.path().join("report.json");
    let o = leibniz(&["catalog", "check", "T2.L1", "T2.L1/derivations", "CT2.L1", "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert_eq!(std::fs::read_to_string(&out).unwrap(), stdout(&o));
    assert_eq!(code(&leibniz(&["catalog", "check"])), 2);
}

#[test]
fn catalog_check_is_byte_identical_across_runs() {
    let a = leibniz(&["catalog", "check", "--all"]);
    let b = leibniz(&["catalog", "check", "--all"]);
    assert_eq!(a.stdout, b.stdout);
    assert!(json(&a)["summary"]["checks"].as_u64().unwrap() > 60);
}

#[test]
fn invariants_of_document_and_catalog() {
    let dir = TempDir::new().unwrap();
    let alg = write(&dir, "t2l1.json", T2_L1);
    let o = leibniz(&["invariants", s(&alg), "--basis-trials", "4", "--seed", "7"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["record"]["centroid"], 2);
    assert_eq!(v["invariant"], true);

    let o = leibniz(&["invariants", "--catalog"]);
    let v = json(&o);
    assert!(v["distinguishability"]["records"].as_array().unwrap().len() >= 20);
    assert_eq!(v["corollary"]["claims"].as_array().unwrap().len(), 4);
}
