use std::process::{Command, Output};

use masslab::fixtures::fixture_machine;
use masslab::oracle;
use masslab::trees::BudgetSchedule;
use serde_json::Value;

fn masslab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_masslab")).args(args).env_remove("MASSLAB_BUDGET").output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json output")
}

fn words(v: &Value) -> Vec<Vec<u64>> {
    serde_json::from_value(v.clone()).unwrap()
}

#[test]
fn frontier_of_dnr_matches_brute_force() {
    let doc = json(&masslab(&["frontier", "--expr", "dnr 2", "--depth", "3"]));
    let brute = oracle::dnr(&fixture_machine(), 2, 1, &[], BudgetSchedule::Depth(1), 3).frontier();
    assert_eq!(words(&doc["members"]), brute.members);
    assert_eq!(words(&doc["leaves"]), brute.leaves);
    assert_eq!(doc["validated"], true);
    assert_eq!(doc["expr"], "dnr 2");
}

#[test]
fn force_example_reaches_the_count() {
    let out = json(&masslab(&["force", "--learner", "echo", "--tie", "tie 9 (fixtureA, fixtureB)", "--m", "4"]));
    assert!(out["count"].as_u64().unwrap() >= 4);
    assert_eq!(out["in_tie"], true);
}

#[test]
fn force_against_a_looping_learner_reports_the_stall() {
    let out = json(&masslab(&["force", "--learner", "looping", "--tie", "tie 3 (fixtureA, fixtureB)", "--m", "2"]));
    assert_eq!(out["achieved"], false);
    assert_eq!(out["stall"]["kind"], "diverged");
}

#[test]
fn exit_codes_follow_the_failure_class() {
    let code = |args: &[&str]| masslab(args).status.code();
    assert_eq!(code(&["frontier", "--expr", "concat(dnr 2", "--depth", "3"]), Some(2));
    assert_eq!(code(&["frontier", "--expr", "foo", "--depth", "3"]), Some(2));
    assert_eq!(code(&["frontier", "--expr", "full 3", "--depth", "20"]), Some(3));
    assert_eq!(code(&["witness", "noncup", "--stream", "1,1,0,0,0,0,0,0,0,0,0,0"]), Some(4));
    assert_eq!(
        code(&["verify", "--learner", "const:1", "--source", "fixtureA", "--target", "fixtureB", "--kind", "medvedev"]),
        Some(5)
    );
    assert_eq!(code(&["check", "--suite", "nonsense"]), Some(2));
    assert_eq!(code(&["no-such-verb"]), Some(2));
}

#[test]
fn seeded_runs_are_byte_identical() {
    for args in [
        &["witness", "priority", "--seed", "11"][..],
        &["witness", "homog-collapse", "--b", "3", "--seed", "5"],
        &["witness", "hyper-learner", "--seed", "2"],
        &["check", "--suite", "homog", "--seed", "9"],
    ] {
        let (a, b) = (masslab(args), masslab(args));
        assert_eq!(a.status.code(), Some(0), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
    let a = masslab(&["witness", "homog-collapse", "--b", "3", "--seed", "5"]);
    let b = masslab(&["witness", "homog-collapse", "--b", "3", "--seed", "6"]);
    assert_ne!(a.stdout, b.stdout);
}

#[test]
fn budget_comes_from_the_environment() {
    let run = |budget: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_masslab"));
        c.args(["simulate", "--learner", "echo", "--stream", "0,1,0", "--target", "fixtureA"]);
        match budget {
            Some(b) => c.env("MASSLAB_BUDGET", b),
            None => c.env_remove("MASSLAB_BUDGET"),
        };
        json(&c.output().unwrap())
    };
    assert_eq!(run(None)["output"], serde_json::json!([0, 1, 0]));
    assert!(run(Some("0"))["output"].as_array().unwrap().is_empty());
}

#[test]
fn dot_and_table_formats() {
    let dot = masslab(&["frontier", "--expr", "fixtureC", "--depth", "3", "--format", "dot"]);
    let text = String::from_utf8(dot.stdout).unwrap();
    assert!(text.starts_with("digraph tree {"));
    assert!(text.contains("\"1.1\" [shape=box]"));
    let table = masslab(&["frontier", "--expr", "fixtureB", "--depth", "3", "--format", "table"]);
    assert!(String::from_utf8(table.stdout).unwrap().contains("leaf    0.1"));
}

#[test]
fn export_writes_the_artifact() {
    let dir = std::env::temp_dir().join(format!("masslab-export-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("b.json");
    let out = masslab(&["export", "--expr", "fixtureB", "--depth", "4", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["count"], 2);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn build_reports_layers() {
    let out = json(&masslab(&["build", "--expr", "btie 3 (fixtureA)"]));
    assert_eq!(out["kind"], "layered");
    assert_eq!(out["layers"], 3);
}
