use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn pellfib(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pellfib"))
        .args(args)
        .env_remove("PELLFIB_PRECISION_CEILING")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn temp_path(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("pellfib-{}-{name}", std::process::id()))
}

#[test]
fn verify_exit_codes() {
    let ok = pellfib(&["verify", "15", "3", "5", "12"]);
    assert_eq!(code(&ok), 0);
    assert!(stdout(&ok).contains("13860"));
    assert_eq!(code(&pellfib(&["verify", "15", "3", "5", "11"])), 1);
    assert_eq!(code(&pellfib(&["verify", "7", "7", "2", "7"])), 0);
    assert_eq!(code(&pellfib(&["verify", "6", "6", "3", "7"])), 0);
}

#[test]
fn usage_errors() {
    assert_eq!(code(&pellfib(&[])), 2);
    assert_eq!(code(&pellfib(&["reduce", "--form", "4", "--M", "10"])), 2);
    assert_eq!(code(&pellfib(&["bounds"])), 2);
    assert_eq!(code(&pellfib(&["reduce", "--form", "2", "--k", "3"])), 2);
    assert_eq!(code(&pellfib(&["search", "--kmin", "5", "--kmax", "3", "--nmax", "10", "--lmax", "10"])), 2);
    assert_eq!(code(&pellfib(&["reduce", "--form", "3", "--M", "2.5"])), 2);
}

#[test]
fn large_k_reduction() {
    let o = pellfib(&["reduce", "--form", "3", "--M", "2e162", "--emit", "json"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let k = v["k_bound"].as_u64().unwrap();
    assert!((1000..=1110).contains(&k), "{k}");
    assert!(v["outcome"]["epsilon"]["lower"].as_str().unwrap().starts_with("4.99"));
}

#[test]
fn precision_exhaustion_exits_3() {
    let o = pellfib(&["reduce", "--form", "3", "--M", "2e162", "--precision-ceiling", "0"]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
    let o = Command::new(env!("CARGO_BIN_EXE_pellfib"))
        .args(["reduce", "--form", "3", "--M", "2e162"])
        .env("PELLFIB_PRECISION_CEILING", "0")
        .output()
        .unwrap();
    assert_eq!(code(&o), 3);
}

#[test]
fn small_k_reductions() {
    let o = pellfib(&["reduce", "--form", "1", "--k", "3"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("A = 33"));
    let o = pellfib(&["reduce", "--form", "2", "--k", "5", "--m", "3", "--emit", "json"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let n = v["n_bound"].as_u64().unwrap();
    assert!((15..=205).contains(&n), "{n}");
}

#[test]
fn sequences_and_search() {
    let o = pellfib(&["sequences", "pell", "--upto", "7"]);
    assert_eq!(stdout(&o).lines().last(), Some("7 169"));
    let o = pellfib(&["sequences", "kfib", "--k", "3", "--upto", "6"]);
    assert_eq!(stdout(&o).lines().last(), Some("6 13"));
    let o = pellfib(&["search", "--kmin", "2", "--kmax", "3", "--nmax", "12", "--lmax", "20", "--equal"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "(6, 6, 3, 7) = 169\n(7, 7, 2, 7) = 169\n");
    let o = pellfib(&["search", "--kmax", "6", "--nmax", "20", "--lmax", "30", "--emit", "json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 1);
    assert_eq!(v[0]["value"], "13860");
}

#[test]
fn bounds_report() {
    let o = pellfib(&["bounds", "--k", "3"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("derived one applies"));
    let o = pellfib(&["bounds", "--k", "10", "--n", "1e6", "--emit", "json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["n_stated_certified"], true);
    assert_eq!(v["forms"].as_array().unwrap().len(), 3);
}

#[test]
fn partial_proof_writes_failed_certificate() {
    let path = temp_path("partial.json");
    let o = pellfib(&["prove", "--k-split", "10", "--emit", "json", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(v["body"]["status"]["state"], "failed");
    assert_eq!(v["body"]["status"]["step"], "large_k_pass2");
}

#[test]
fn full_proof() {
    let path = temp_path("full.json");
    let o = pellfib(&["prove", "--emit", "json", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["body"]["status"]["state"], "proved");
    let sols: Vec<(u64, u64, u64, u64)> = v["body"]["solutions"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| (s["n"].as_u64().unwrap(), s["m"].as_u64().unwrap(), s["k"].as_u64().unwrap(), s["ell"].as_u64().unwrap()))
        .collect();
    assert_eq!(sols, [(6, 6, 3, 7), (7, 7, 2, 7), (15, 3, 5, 12)]);
    // no binary floats anywhere in the file
    fn no_floats(v: &Value) -> bool {
        match v {
            Value::Number(n) => !n.is_f64(),
            Value::Array(a) => a.iter().all(no_floats),
            Value::Object(o) => o.values().all(no_floats),
            _ => true,
        }
    }
    assert!(no_floats(&v));
}
