use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
        .display()
        .to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weavent")).args(args).output().expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("report is json")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn dot_counts(dot: &str) -> (usize, usize) {
    let edges = dot.lines().filter(|l| l.contains("->")).count();
    let nodes = dot.lines().filter(|l| l.trim_start().starts_with('"') && !l.contains("->")).count();
    (nodes, edges)
}

fn temp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("weavent-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn check_live_es_exits_zero() {
    let out = run(&["check", "--es", &fixture("e_run.es.json")]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["verb"], "check");
    assert_eq!(r["results"]["configurations"], 7);
    assert_eq!(r["results"]["live"], true);
}

#[test]
fn cyclic_domain_is_invalid_input() {
    let out = run(&["check", "--domain", &fixture("cycle.domain.json")]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "invalid_input");
    assert!(err["input"].as_str().unwrap().ends_with("cycle.domain.json"));
}

#[test]
fn missing_file_is_invalid_input() {
    let out = run(&["check", "--es", "/nonexistent/x.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn two_inputs_are_rejected() {
    let out = run(&["check", "--es", &fixture("e_run.es.json"), "--domain", &fixture("m3.domain.json")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn m3_fails_axioms_and_weak_primality() {
    let out = run(&["axioms", "--domain", &fixture("m3.domain.json")]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert_eq!(r["results"]["R"], false);
    assert!(r["witnesses"]["R"].is_string());
    let out = run(&["check", "--domain", &fixture("m3.domain.json")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(report(&out)["witnesses"]["weak_prime_algebraic"].is_object());
}

#[test]
fn reports_are_byte_identical_across_runs() {
    for args in [
        vec!["derive", "--grammar", "running.grammar.json", "--depth", "3"],
        vec!["axioms", "--domain", "interchange_triple.domain.json"],
        vec!["synth", "--es", "e1.es.json"],
        vec!["emit", "--es", "e1.es.json"],
    ] {
        let args: Vec<String> =
            args.iter().map(|a| if a.ends_with(".json") { fixture(a) } else { a.to_string() }).collect();
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let (a, b) = (run(&args), run(&args));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert!(!a.stdout.is_empty());
    }
}

#[test]
fn derive_counts_trace_classes() {
    let g = fixture("running.grammar.json");
    let r = report(&run(&["derive", "--grammar", &g, "--depth", "3"]));
    assert_eq!(r["results"]["trace_classes"], 7);
    assert_eq!(r["results"]["prime"], false);
    let r = report(&run(&["derive", "--grammar", &g, "--depth", "3", "--fusion-safe"]));
    assert_eq!(r["results"]["trace_classes"], 5);
    assert_eq!(r["results"]["prime"], true);
}

#[test]
fn roundtrips_pass_on_fixtures() {
    for (flag, file) in [
        ("--es", "e_run.es.json"),
        ("--es", "e1.es.json"),
        ("--domain", "chain.domain.json"),
        ("--epes", "e_double_prime.epes.json"),
    ] {
        let out = run(&["roundtrip", flag, &fixture(file)]);
        assert_eq!(out.status.code(), Some(0), "{file}: {}", stdout(&out));
    }
}

#[test]
fn convert_and_back_preserves_configurations() {
    let dom = temp("dom.json");
    let es = temp("es.json");
    let out = run(&["convert", "--es", &fixture("e_run.es.json"), "--output", dom.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(&["convert", "--domain", dom.to_str().unwrap(), "--output", es.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&run(&["check", "--es", es.to_str().unwrap()]));
    assert_eq!(r["results"]["configurations"], 7);
}

#[test]
fn connect_reports_change() {
    let r = report(&run(&["connect", "--es", &fixture("e_run.es.json")]));
    assert_eq!(r["results"]["already_connected"], true);
    assert!(r["results"]["output"].is_object());
}

#[test]
fn synth_round_trips_e1() {
    let out = run(&["synth", "--es", &fixture("e1.es.json")]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["results"]["rules"], 5);
    assert_eq!(r["results"]["traces_give_input"], true);
}

#[test]
fn morphism_check_accepts_merging_map() {
    let out = run(&[
        "check",
        "--es",
        &fixture("e_double_prime.es.json"),
        "--es-target",
        &fixture("e_prime.es.json"),
        "--map",
        &fixture("e_double_prime_to_e_prime.map.json"),
    ]);
    let r = report(&out);
    assert_eq!(r["results"]["es_morphism"], true, "{r}");
}

#[test]
fn async_diamond_holds() {
    let out = run(&["async", "--async", &fixture("diamond.async.json")]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert_eq!(report(&out)["results"]["path_classes"], 4);
}

#[test]
fn hasse_of_running_example_is_only_weakly_asynchronous() {
    let d = temp("run.domain.json");
    run(&["convert", "--es", &fixture("e_run.es.json"), "--output", d.to_str().unwrap()]);
    let full = run(&["async", "--domain", d.to_str().unwrap()]);
    assert_eq!(full.status.code(), Some(1));
    let weak = run(&["async", "--domain", d.to_str().unwrap(), "--weak"]);
    assert_eq!(weak.status.code(), Some(0), "{}", stdout(&weak));
}

#[test]
fn emit_dot_counts() {
    let (n, e) = dot_counts(&stdout(&run(&["emit", "--es", &fixture("e_run.es.json")])));
    assert_eq!((n, e), (7, 9));
    let empty = temp("empty.es.json");
    std::fs::write(&empty, r#"{"events":[],"conflict":[],"enabling":[]}"#).unwrap();
    let out = run(&["emit", "--es", empty.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(dot_counts(&stdout(&out)), (1, 0));
    let dot = stdout(&run(&["emit", "--grammar", &fixture("running.grammar.json")]));
    assert_eq!(dot_counts(&dot), (2, 4));
}

#[test]
fn emit_to_unwritable_path_fails() {
    let out = run(&["emit", "--es", &fixture("e_run.es.json"), "--output", "/nonexistent/dir/x.dot"]);
    assert_eq!(out.status.code(), Some(2));
}
