use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ensk::commands::ResultDocument;
use ensk::io::read_pool;
use ensk_core::EnergyModel;
use serde_json::Value;

fn ensk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ensk")).args(args).env_remove("ENSK_SEED").output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn pool_csv(n: usize) -> String {
    let mut s = String::from("id,accuracy,cost\n");
    for i in 0..n {
        let p = 0.55 + 0.4 * ((i * 37 % 23) as f64 / 23.0);
        let t = 1.0 + (i * 11 % 7) as f64;
        s.push_str(&format!("c{i},{p},{t}\n"));
    }
    s
}

fn strip_wall_time(v: &mut Value) {
    match v {
        Value::Object(map) => {
            map.retain(|k, _| !k.contains("wall_time"));
            map.values_mut().for_each(strip_wall_time);
        }
        Value::Array(items) => items.iter_mut().for_each(strip_wall_time),
        _ => {}
    }
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut v: Value = serde_json::from_slice(&out.stdout).unwrap();
    strip_wall_time(&mut v);
    v
}

#[test]
fn solve_writes_a_verifiable_document() {
    let dir = tempfile::tempdir().unwrap();
    let pool = write(dir.path(), "pool.csv", &pool_csv(14));
    let out = ensk(&["solve", pool.to_str().unwrap(), "--budget", "20", "--seed", "5", "--trace"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: ResultDocument = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc.command, "solve");
    assert_eq!(doc.seed, Some(5));
    assert!(doc.selection.total_cost <= 20.0);
    let pf = read_pool(&pool).unwrap();
    assert!(doc.verify(&pf.pool, &EnergyModel::PlainMajority).unwrap());
    let rule = doc.stop_rule.unwrap();
    assert!(rule.stop > 0.0 && rule.stop <= 1.0 && rule.maxstep >= 1);
    assert!(doc.search.unwrap().trace.is_some());
}

#[test]
fn every_strategy_runs() {
    let dir = tempfile::tempdir().unwrap();
    let pool = write(dir.path(), "pool.csv", &pool_csv(9));
    for s in ["greedy-forward", "greedy-backward", "monte-carlo", "simulated-annealing", "sherlock"] {
        for key in ["accuracy", "usefulness"] {
            let v = json(&ensk(&["solve", pool.to_str().unwrap(), "--budget", "12", "--strategy", s, "--key", key]));
            assert_eq!(v["search"]["strategy"], Value::String(s.into()), "{v}");
        }
    }
}

#[test]
fn solve_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let pool = write(dir.path(), "pool.csv", &pool_csv(16));
    let args = ["solve", pool.to_str().unwrap(), "--budget", "15", "--seed", "42", "--strategy", "simulated-annealing"];
    assert_eq!(json(&ensk(&args)), json(&ensk(&args)));
    let out = Command::new(env!("CARGO_BIN_EXE_ensk"))
        .args(&args[..4])
        .args(["--strategy", "simulated-annealing"])
        .env("ENSK_SEED", "42")
        .output()
        .unwrap();
    assert_eq!(json(&out), json(&ensk(&args)));
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let pool = write(dir.path(), "pool.csv", &pool_csv(8));
    let target = dir.path().join("doc.json");
    let out = ensk(&["oracle", pool.to_str().unwrap(), "--budget", "9", "--out", target.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let from_file: Value = serde_json::from_slice(&std::fs::read(&target).unwrap()).unwrap();
    assert_eq!(from_file, json(&ensk(&["oracle", pool.to_str().unwrap(), "--budget", "9"])));
}

#[test]
fn stochastic_search_never_beats_the_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let pool = write(dir.path(), "pool.csv", &pool_csv(11));
    let oracle = json(&ensk(&["oracle", pool.to_str().unwrap(), "--budget", "14"]));
    let best = oracle["selection"]["energy"].as_f64().unwrap();
    let solved = json(&ensk(&["solve", pool.to_str().unwrap(), "--budget", "14", "--maxstep-cap", "3000"]));
    assert!(solved["selection"]["energy"].as_f64().unwrap() <= best + 1e-12);
}

#[test]
fn constrained_model_uses_weights() {
    let dir = tempfile::tempdir().unwrap();
    let pool = write(
        dir.path(),
        "od.csv",
        "id,accuracy,cost\nod1,0.220,31\nod2,0.304,38\nod3,0.717,36\nod4,0.757,41\nod5,0.773,40\nod6,0.749,42\nod7,0.719,36\nod8,0.700,37\n",
    );
    let weights = write(dir.path(), "w.csv", "k,p\n0,0\n1,0.11\n2,0.70\n3,0.93\n4,0.99\n5,1\n6,1\n7,1\n8,1\n");
    let v = json(&ensk(&[
        "stats",
        pool.to_str().unwrap(),
        "--budget",
        "240.8",
        "--model",
        "constrained",
        "--weights",
        weights.to_str().unwrap(),
        "--ell-estimator",
        "mean-cost",
    ]));
    assert_eq!(v["stop_rule"]["derivation"]["energy"]["ell_hat"], 7);
    assert_eq!(v["ell_estimates"]["mean_cost"], 7);
    let a = v["fitted_curve"]["a"].as_f64().unwrap();
    assert!((a / -3.43 - 1.0).abs() < 0.15);

    let out = ensk(&["solve", pool.to_str().unwrap(), "--model", "constrained"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.csv", "id,accuracy,cost\na,oops,1\n");
    let out = ensk(&["solve", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("row 2"));

    let missing = dir.path().join("nope.csv");
    assert_eq!(ensk(&["stats", missing.to_str().unwrap()]).status.code(), Some(2));

    let pool = write(dir.path(), "pool.csv", &pool_csv(5));
    assert_eq!(ensk(&["solve", pool.to_str().unwrap(), "--budget", "0.5"]).status.code(), Some(3));
    assert_eq!(ensk(&["oracle", pool.to_str().unwrap(), "--budget", "0.5"]).status.code(), Some(3));
    assert_eq!(ensk(&["solve", pool.to_str().unwrap(), "--budget", "-1"]).status.code(), Some(2));

    let big = write(dir.path(), "big.csv", &pool_csv(23));
    assert_eq!(ensk(&["oracle", big.to_str().unwrap()]).status.code(), Some(4));
    assert_eq!(ensk(&["solve", big.to_str().unwrap(), "--budget", "30"]).status.code(), Some(0));
}

#[test]
fn reproduce_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let o = ensk(&["reproduce", "od", "--replicates", "6", "--seed", "9", "--trace", "--out-dir", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for name in ["od_runs.csv", "od_traces.csv"] {
        assert_eq!(std::fs::read(a.join(name)).unwrap(), std::fs::read(b.join(name)).unwrap(), "{name}");
    }
    let load = |p: PathBuf| {
        let mut v: Value = serde_json::from_slice(&std::fs::read(p).unwrap()).unwrap();
        strip_wall_time(&mut v);
        serde_json::to_string(&v).unwrap()
    };
    assert_eq!(load(a.join("od.json")), load(b.join("od.json")));
}
