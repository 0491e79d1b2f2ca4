mod common;

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use templike::cli::{parse_fixture, Input};
use templike::exactcore::Ring;
use templike::fixtures::{span_category, standard_mutations};
use templike::simplicial::standard_simplex;
use templike::templicial::linear_nerve;

fn templike(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_templike")).args(args).env_remove("TEMPLIKE_SEED").output().expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn check_passes_on_a_nerve() {
    let out = templike(&["check", "@nerve-poset2"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["command"], "check");
    assert_eq!(r["status"], "pass");
    assert_eq!(r["seed"], 0);
    assert!(r["witnesses"].as_array().unwrap().is_empty());
}

#[test]
fn fill_horn_fills_every_horn() {
    let out = templike(&["fill-horn", "--n", "3", "--k", "1", "@simplex3"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let y = standard_simplex(3, 3);
    assert_eq!(r["output"]["fillers"].as_array().unwrap().len(), y.horns(3, 1).len());
}

#[test]
fn nerve_output_parses_back() {
    let out = templike(&["nerve", "--dim", "3", "@span"]);
    assert_eq!(out.status.code(), Some(0));
    let text = serde_json::to_string(&report(&out)["output"]).unwrap();
    match parse_fixture(&text, Ring::Q).unwrap() {
        Input::Templicial(x) => {
            assert!(x.check().is_ok());
            assert_eq!(x.to_fixture(), linear_nerve(&span_category(Ring::Q), 3).to_fixture());
        }
        other => panic!("parsed as {other:?}"),
    }
}

#[test]
fn corrupted_fixture_fails_with_a_witness() {
    let x = linear_nerve(&span_category(Ring::Q), 3);
    let m = standard_mutations(&x).into_iter().next().unwrap();
    let y = m.apply(&x).unwrap();
    let path = scratch("corrupt-span.json", &serde_json::to_string(&y.to_fixture()).unwrap());
    let path = path.to_str().unwrap();

    let out = templike(&["check", path]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert_eq!(r["status"], "fail");
    let w = &r["witnesses"][0];
    assert!(w["involved"].as_array().unwrap().iter().any(|v| v == &Value::from(m.cell.map_name())), "{w}");

    let out = templike(&["suite", path]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    let failing: Vec<&str> = r["witnesses"].as_array().unwrap().iter().map(|w| w["path"].as_str().unwrap()).collect();
    assert!(!failing.is_empty() && failing.iter().all(|p| p.starts_with("input/")), "{failing:?}");
}

#[test]
fn parse_problems_exit_with_two() {
    let bad = scratch("bad.json", "{ not json");
    assert_eq!(templike(&["check", bad.to_str().unwrap()]).status.code(), Some(2));
    let unknown = scratch("unknown.json", r#"{"what": 1}"#);
    assert_eq!(templike(&["check", unknown.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(templike(&["check", "@no-such-fixture"]).status.code(), Some(2));
    assert_eq!(templike(&["check", "--dim", "9", "@span"]).status.code(), Some(2));
    assert_eq!(templike(&["--ring", "F4", "check", "@span"]).status.code(), Some(2));
    assert_eq!(templike(&["frobnicate"]).status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_templike")).args(["check", "@span"]).env("TEMPLIKE_SEED", "x").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn seed_is_reported_and_changes_samples() {
    let run = |seed: &str| {
        Command::new(env!("CARGO_BIN_EXE_templike")).args(["dold-kan", "--roundtrip"]).env("TEMPLIKE_SEED", seed).output().unwrap()
    };
    let (a, b, c) = (run("5"), run("5"), run("6"));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(report(&a)["seed"], 5);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(report(&a)["output"], report(&c)["output"]);
}

#[test]
fn bridge_reports_subset_keyed_families() {
    let out = templike(&["bridge", "--n", "2", "--samples", "5", "@interval"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["cases"].as_array().unwrap().len(), 5);
    let fam = r["output"]["first_dg_simplex"]["family"].as_object().unwrap();
    assert!(fam.keys().all(|k| k.split(',').all(|v| v.parse::<usize>().is_ok())), "{:?}", fam.keys());
}

#[test]
fn out_flag_writes_the_report() {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("homotopy.json");
    let out = templike(&["homotopy-cat", "--out", path.to_str().unwrap(), "@cosk-two-triangles"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(r["output"]["morphisms"].as_array().unwrap().len(), 6);
}

#[test]
fn every_command_runs_on_a_builtin() {
    for args in [
        &["dg-nerve", "--dim", "2", "@homotopy"][..],
        &["fill-wedge", "--n", "3", "@extra-face"],
        &["homotopy-cat", "@square"],
        &["check", "@glued-naf"],
    ] {
        let out = templike(args);
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stdout));
    }
}

#[test]
fn builtin_fixtures_round_trip_through_json() {
    fn canon(x: &Input) -> Value {
        match x {
            Input::Simplicial(y) => serde_json::to_value(y.to_fixture()),
            Input::Templicial(t) => serde_json::to_value(t.to_fixture()),
            Input::NaF(z) => serde_json::to_value(z.to_fixture()),
            Input::Linear(c) => serde_json::to_value(c.to_fixture()),
            Input::Chain(c) => serde_json::to_value(c.to_fixture()),
            Input::DG(c) => serde_json::to_value(c.to_fixture()),
        }
        .unwrap()
    }
    for name in templike::cli::BUILTINS {
        let x = templike::cli::load(&format!("@{name}"), Ring::Q, 3).unwrap();
        let text = canon(&x).to_string();
        let y = parse_fixture(&text, Ring::Q).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(canon(&y), canon(&x), "{name}");
    }
}
