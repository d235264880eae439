mod common;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use common::*;
use gtcheck_core::formats::{parse_gt, render_gt};
use gtcheck_core::oracle::bounded_existential;
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gtcheck"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn run_stdin(args: &[&str], input: &[u8]) -> Output {
    let mut child = bin().args(args).stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::piped()).spawn().unwrap();
    child.stdin.take().unwrap().write_all(input).unwrap();
    child.wait_with_output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn path(name: &str) -> String {
    fixture_path(name).to_string_lossy().into_owned()
}

fn scratch(label: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("gtcheck-cli-{}-{label}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn schema_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas/v1")
}

/// Runs with `--json`, validates stdout against the named schema and returns it.
fn json(schema: &str, args: &[&str], expected_code: i32) -> Value {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let o = run(&full);
    assert_eq!(code(&o), expected_code, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    let value: Value = serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{args:?}: {e}"));
    let text = std::fs::read_to_string(schema_dir().join(format!("{schema}.schema.json"))).unwrap();
    let validator = jsonschema::validator_for(&serde_json::from_str(&text).unwrap()).unwrap();
    let errors: Vec<String> = validator.iter_errors(&value).map(|e| format!("{} at {}", e, e.instance_path())).collect();
    assert!(errors.is_empty(), "{schema} {args:?}: {errors:?}");
    value
}

const LOOP: &str = "gtype loop { processes: p, q; messages: m; states: s*+; s -- p->q:m --> s; }\n";

#[test]
fn classify_reports_closure_of_g0() {
    let v = json("classify", &["classify", &path("g0")], 0);
    assert_eq!(v["commutation_closed"], true);
    assert_eq!(v["sender_driven"], false);
    let v = json("classify", &["classify", &path("gsd")], 0);
    assert_eq!(v["commutation_deterministic"], true);
    assert_eq!(v["commutation_closed"], false);
    for name in FIXTURES {
        json("classify", &["classify", &path(name)], 0);
    }
}

#[test]
fn complement_pipes_into_verification() {
    let c = run(&["complement", &path("gsd"), "--method", "renunciation"]);
    assert_eq!(code(&c), 0);
    let v = run_stdin(&["verify-complement", &path("gsd"), "-", "--max-events", "6"], &c.stdout);
    assert_eq!(code(&v), 0, "{}", String::from_utf8_lossy(&v.stdout));
    let bad = run(&["verify-complement", &path("gsd"), &path("gsd"), "--max-events", "3"]);
    assert_eq!(code(&bad), 1);
    json("verify-complement", &["verify-complement", &path("gsd"), &path("gsd"), "--max-events", "3"], 1);
}

#[test]
fn complement_json_and_files() {
    let dir = scratch("complement");
    let out = dir.join("r.gt");
    let v = json("complement", &["complement", &path("gsd"), "-o", out.to_str().unwrap()], 0);
    assert_eq!(v["method"], "renunciation");
    let r = parse_gt(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(r.state("s_acc").is_some());
    json("complement", &["complement", &path("g0")], 0);
    json("complement", &["complement", &path("real"), "--method", "cartesian"], 0);
    assert_eq!(code(&run(&["complement", &path("branch")])), 1);
    assert_eq!(code(&run(&["complement", &path("gsd"), "--method", "dual"])), 1);
}

#[test]
fn membership_in_the_renunciation() {
    let dir = scratch("member");
    let out = dir.join("r.gt");
    assert_eq!(code(&run(&["complement", &path("gsd"), "--method", "renunciation", "-o", out.to_str().unwrap()])), 0);
    let r = out.to_str().unwrap();
    assert_eq!(code(&run(&["member", r, "--msc", "p->q:m1;r->q':m3"])), 1);
    assert_eq!(code(&run(&["member", &path("gsd"), "--msc", "r->q':m3;p->q:m1"])), 0);
    let v = json("member", &["member", r, "--msc", "p->q':m2"], 1);
    assert_eq!(v["member"], false);
    json("member", &["member", &path("gsd"), "--msc", "p->q:m1;r->q':m3", "--universal"], 1);
    assert_eq!(code(&run(&["member", r, "--msc", "p->x:m1"])), 2);
}

#[test]
fn projection_writes_one_file_per_process() {
    let dir = scratch("project");
    let v = json("project", &["project", &path("gsd"), "-o", dir.to_str().unwrap()], 0);
    assert!(v.is_object());
    let mut files: Vec<String> = std::fs::read_dir(&dir).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect();
    files.sort();
    assert_eq!(files, ["p.cfsm", "q'.cfsm", "q.cfsm", "r.cfsm"]);
    let dot = run(&["dot", dir.join("p.cfsm").to_str().unwrap()]);
    assert_eq!(code(&dot), 0);
    assert!(String::from_utf8_lossy(&dot.stdout).starts_with("digraph"));
}

#[test]
fn realisability_exit_codes() {
    assert_eq!(code(&run(&["realisable", &path("real"), "--model", "synch", "--complement", "auto"])), 0);
    assert_eq!(code(&run(&["realisable", &path("real"), "--model", "p2p", "--complement", "auto"])), 0);
    let v = json("realisable-synch", &["realisable", &path("nonreal"), "--model", "synch", "--complement", "auto"], 1);
    assert_eq!(v["cc_holds"], false);
    let v = json("realisable-synch", &["realisable", &path("deadlock"), "--model", "synch", "--complement", "auto"], 1);
    assert_eq!(v["cc_holds"], true);
    assert_eq!(v["deadlock_free"], false);
    json("realisable-p2p", &["realisable", &path("cross"), "--model", "p2p", "--complement", "auto"], 1);
    json("realisable-p2p", &["realisable", &path("real"), "--model", "p2p", "--complement", "auto"], 0);

    let dir = scratch("loop");
    let lp = dir.join("loop.gt");
    std::fs::write(&lp, LOOP).unwrap();
    let lp = lp.to_str().unwrap();
    let v = json("realisable-p2p", &["realisable", lp, "--model", "p2p", "--complement", "auto"], 3);
    assert_eq!(v["verdict"], "unknown");
    let text = run(&["realisable", lp, "--model", "p2p", "--complement", "auto"]);
    assert!(String::from_utf8_lossy(&text.stdout).contains("unknown"));
    let c = run(&["complement", lp]);
    let piped = run_stdin(&["realisable", lp, "--model", "synch", "--complement", "-"], &c.stdout);
    assert_eq!(code(&piped), 0);
}

#[test]
fn simulation_reports() {
    json("simulate", &["simulate", &path("single")], 0);
    let v = json("simulate", &["simulate", &path("deadlock")], 1);
    assert!(!v["deadlocks"].as_array().unwrap().is_empty());
    let v = json("simulate", &["simulate", &path("g0")], 3);
    assert_eq!(v["bound_hit"], true);
}

#[test]
fn oracle_commands() {
    let dir = scratch("oracle");
    let out = dir.join("d.gt");
    run(&["complement", &path("g0"), "-o", out.to_str().unwrap()]);
    json("oracle-xor", &["oracle", "xor", &path("g0"), out.to_str().unwrap(), "--max-events", "4"], 0);
    json("oracle-xor", &["oracle", "xor", &path("g0"), &path("g0"), "--max-events", "2"], 1);
    let v = json("oracle-enumerate", &["oracle", "enumerate", &path("single"), "--max-events", "2"], 0);
    assert_eq!(v["mscs"].as_array().unwrap().len(), 3);
    let letters = "p->q:m1;r->s:m2;p->q:m3";
    json("oracle-count-profile", &["oracle", "count-profile", &path("branch"), "--letters", letters, "--predicate", "k1>k2"], 0);
    json("oracle-count-profile", &["oracle", "count-profile", &path("g0"), "--letters", letters, "--predicate", "k1>k2 or k2>k3"], 1);
    assert_eq!(code(&run(&["oracle", "count-profile", &path("g0"), "--letters", letters, "--predicate", "k4>1"])), 2);
}

#[test]
fn dot_of_the_renunciation() {
    let dir = scratch("dot");
    let out = dir.join("r.gt");
    run(&["complement", &path("gsd"), "--method", "renunciation", "-o", out.to_str().unwrap()]);
    let r = parse_gt(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let dot = String::from_utf8(run(&["dot", out.to_str().unwrap()]).stdout).unwrap();
    assert!(dot.contains("label=\"s_acc\""));
    let nodes = dot.lines().filter(|l| l.contains("shape=") && !l.contains("shape=point")).count();
    assert_eq!(nodes, r.num_states());
    for flag in ["--project", "--product"] {
        let o = run(&["dot", &path("gsd"), flag]);
        assert_eq!(code(&o), 0);
        assert!(String::from_utf8_lossy(&o.stdout).contains("digraph"));
    }
}

#[test]
fn render_round_trip_preserves_bounded_language() {
    for g in fixtures() {
        let again = parse_gt(&render_gt(&g)).unwrap();
        assert_eq!(bounded_existential(&again, 5).unwrap(), bounded_existential(&g, 5).unwrap(), "{}", g.name());
        assert_eq!(again.num_states(), g.num_states());
    }
}

#[test]
fn parse_and_usage_errors_exit_2() {
    let dir = scratch("errors");
    let bad = dir.join("bad.gt");
    std::fs::write(&bad, "gtype bad { processes: p; messages: m; states: s*; s -- p->p:m --> s; }").unwrap();
    let o = run(&["classify", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(!o.stderr.is_empty());
    std::fs::write(&bad, "gtype bad { processes: p, q; messages: m; states s*; }").unwrap();
    assert_eq!(code(&run(&["classify", bad.to_str().unwrap()])), 2);
    assert_eq!(code(&run(&["classify", "/nonexistent/x.gt"])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
    assert_eq!(code(&run(&["realisable", &path("real"), "--model", "tcp", "--complement", "auto"])), 2);
    assert_eq!(code(&run(&["verify-complement", &path("gsd"), &path("g0")])), 2);
}
