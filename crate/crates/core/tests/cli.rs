use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_energylab"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("energylab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn energy_of_generated_ap() {
    let set = scratch("ap.txt");
    assert_eq!(run(&["gen", "--family", "ap", "--n", "5", "--out", s(&set)]).status.code(), Some(0));
    let out = scratch("ap.json");
    let o = run(&["energy", "--input", s(&set), "--brute", "--json-out", s(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema"], "energylab.report/v1");
    assert_eq!(v["results"]["energy"], 85);
    assert_eq!(v["pass"], true);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["energy"]).status.code(), Some(2));
    assert_eq!(run(&["energy", "--input", "/definitely/missing"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn empty_sweep_writes_header() {
    let out = scratch("empty.csv");
    let o = run(&["sweep", "--kind", "decompose", "--ladder", "", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&out).unwrap().lines().count(), 1);
}

#[test]
fn seeded_runs_replay() {
    let (s1, s2) = (scratch("r1.txt"), scratch("r2.txt"));
    for p in [&s1, &s2] {
        let o = run(&["gen", "--family", "random", "--p", "101", "--size", "20", "--seed", "7", "--out", s(p)]);
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&s1).unwrap(), std::fs::read(&s2).unwrap());

    let (j1, j2) = (scratch("b1.json"), scratch("b2.json"));
    for j in [&j1, &j2] {
        let o = run(&["bsg", "--input", s(&s1), "--k", "3", "--verify", "sampled:50", "--seed", "3", "--json-out", s(j)]);
        assert_eq!(o.status.code(), Some(0));
    }
    let (a, b) = (json(&j1), json(&j2));
    assert_eq!(a["results"], b["results"]);

    // the config echo alone reproduces the results
    let cfg = &a["config"];
    let o = run(&[
        "bsg",
        "--input",
        cfg["input"].as_str().unwrap(),
        "--k",
        &cfg["k"].to_string(),
        "--verify",
        cfg["verify"].as_str().unwrap(),
        "--seed",
        &cfg["seed"].to_string(),
    ]);
    let replay: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(replay["results"], a["results"]);
}

#[test]
fn fp_and_incidence_subcommands() {
    let o = run(&["fp", "--p", "101", "--gen", "15", "--seed", "1", "--op", "had"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["pass"], true);

    let a = scratch("x.txt");
    std::fs::write(&a, "1\n2\n3\n5\n").unwrap();
    let o = run(&["incidence", "--crosscheck", "--input", s(&a)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn verify_all_passes() {
    let o = run(&["verify-all"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
}
