#[path = "../src/report.rs"]
#[allow(dead_code)]
mod report;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use pifair::satcheck::parse_dimacs;
use report::{AuditReport, CheckReport, ExplainReport};
use serde_json::Value as Json;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn model(name: &str) -> PathBuf {
    fixture(&format!("{name}.json"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pifair")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Json {
    serde_json::from_slice(&o.stdout).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn audit_exit_codes_follow_notion() {
    let adopt = model("adopt");
    let o = run(&["audit", path(&adopt), "--notion", "universal"]);
    assert_eq!(o.status.code(), Some(1));
    let r = json(&o);
    assert_eq!(r["witnesses"]["universal"]["instance"], serde_json::json!([false, false, false]));
    assert_eq!(r["witnesses"]["universal"]["explanation"], serde_json::json!(["s"]));

    let o = run(&["audit", path(&adopt), "--notion", "existential"]);
    assert_eq!(o.status.code(), Some(0));

    let o = run(&["audit", path(&model("adopt2")), "--notion", "universal"]);
    assert_eq!(o.status.code(), Some(0));

    let o = run(&["audit", path(&model("ex0bis")), "--notion", "ftu"]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["audit", path(&model("ex0bis"))]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn empty_constrained_space_warns() {
    let o = run(&["audit", path(&model("empty_space"))]);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&o);
    assert_eq!(r["space"]["constrained_size"], 0);
    assert!(r["warnings"].as_array().unwrap().iter().any(|w| w.as_str().unwrap().contains("empty")));
}

#[test]
fn explain_with_and_without_constraints() {
    let ex2 = model("ex2");
    let o = run(&["explain", path(&ex2), "--instance", "1,1,1"]);
    assert_eq!(o.status.code(), Some(1));
    let r = json(&o);
    assert_eq!(r["decision"]["status"], "UNFAIR");
    assert_eq!(r["decision"]["pi_explanations"][0]["features"], serde_json::json!(["s"]));

    let o = run(&["explain", path(&ex2), "--instance", "1,1,1", "--ignore-constraints"]);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&o);
    assert_eq!(r["decision"]["status"], "UNIVERSALLY_FAIR");
    assert_eq!(r["decision"]["pi_explanations"][0]["features"], serde_json::json!(["s1", "s2"]));
    assert_eq!(r["constraints_ignored"], true);
}

#[test]
fn explain_notion_sets_exit_code() {
    let ex5 = model("ex5");
    let o = run(&["explain", path(&ex5), "--instance", "1,1"]);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&o);
    assert_eq!(r["decision"]["status"], "EXISTENTIALLY_FAIR_ONLY");
    let pis: Vec<&Json> = r["decision"]["pi_explanations"].as_array().unwrap().iter().map(|e| &e["features"]).collect();
    assert_eq!(pis, [&serde_json::json!(["m"]), &serde_json::json!(["n"])]);

    let o = run(&["explain", path(&ex5), "--instance", "1,1", "--notion", "universal"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn instance_outside_constrained_space_is_an_error() {
    let o = run(&["explain", path(&model("ex1")), "--instance", "0,1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.starts_with("error:"), "{err}");
    assert!(err.contains("violates constraint"), "{err}");
}

#[test]
fn malformed_input_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"features\": [").unwrap();
    let o = run(&["audit", path(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["audit", path(&dir.path().join("missing.json"))]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["explain", path(&model("ex2")), "--instance", "1,1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn checks() {
    let m = model("ex_ftu_not_fair");
    let o = run(&["check", path(&m), "--what", "loose"]);
    assert_eq!(o.status.code(), Some(1));
    let r = json(&o);
    let violations = r["violations"].as_array().unwrap();
    assert!(violations.iter().any(|v| v["instance"] == serde_json::json!([true, true, true, true]) && v["feature"] == "f"));

    let o = run(&["check", path(&model("ex3")), "--what", "scope", "--format", "text"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "ONLY_P");

    let o = run(&["check", path(&model("ex2")), "--what", "scope"]);
    assert_eq!(o.status.code(), Some(1));

    let o = run(&["check", path(&model("ex0")), "--what", "decomposable"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn output_is_deterministic() {
    for args in [
        vec!["audit", "--per-decision"],
        vec!["audit", "--engine", "search"],
        vec!["check", "--what", "loose"],
        vec!["audit", "--format", "text"],
    ] {
        let m = model("ex_ftu_not_fair");
        let mut full = args.clone();
        full.insert(1, path(&m));
        let a = run(&full);
        let b = run(&full);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn timing_only_when_requested() {
    let m = model("ex0");
    assert!(json(&run(&["audit", path(&m)]))["timing_ms"].is_null());
    assert!(json(&run(&["audit", path(&m), "--timing"]))["timing_ms"].is_number());
}

#[test]
fn ignore_constraints_matches_empty_constraint_list() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["ex1", "ex2", "ex4", "ex_ftu_not_fair"] {
        let m = model(name);
        let mut doc: Json = serde_json::from_str(&std::fs::read_to_string(&m).unwrap()).unwrap();
        doc["constraints"] = serde_json::json!([]);
        let stripped = dir.path().join(format!("{name}.json"));
        std::fs::write(&stripped, serde_json::to_string(&doc).unwrap()).unwrap();

        let a = run(&["audit", path(&m), "--ignore-constraints", "--per-decision"]);
        let b = run(&["audit", path(&stripped), "--per-decision"]);
        assert_eq!(a.stdout, b.stdout, "{name}");
        assert_eq!(a.status.code(), b.status.code());
    }
}

#[test]
fn ftci_with_empty_graph_is_plain_audit() {
    let m = model("ex2");
    let a = run(&["audit", path(&m), "--per-decision"]);
    let b = run(&["ftci", path(&m), path(&fixture("graphs/empty.json")), "--per-decision"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.status.code(), b.status.code());
}

#[test]
fn ftci_protects_descendants() {
    let o = run(&["ftci", path(&model("maternity")), path(&fixture("graphs/maternity.json"))]);
    let r = json(&o);
    assert_eq!(r["newly_protected"], serde_json::json!(["maternity_leave"]));
    assert_eq!(r["space"]["protected"], serde_json::json!(["female", "maternity_leave"]));

    // a proxy reachable only through non-feature vertices
    let race = run(&["ftci", path(&model("ex2_race")), path(&fixture("graphs/race_chain.json"))]);
    let plain = run(&["audit", path(&model("ex2"))]);
    let (r, p) = (json(&race), json(&plain));
    assert_eq!(r["newly_protected"], serde_json::json!(["s"]));
    assert_eq!(r["verdicts"], p["verdicts"]);
    assert_eq!(r["witnesses"], p["witnesses"]);
    assert_eq!(race.status.code(), plain.status.code());
}

#[test]
fn export_cnf_one_hot_and_legend() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ex5.cnf");
    let o = run(&["export-cnf", path(&model("ex5")), path(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(!dir.path().join("ex5.cnf.tmp").exists());
    let f = parse_dimacs(&text).unwrap();

    let legend: Vec<String> = stdout(&o).lines().map(str::to_owned).collect();
    let expected: Vec<String> = f.comment_map.iter().map(|(v, n)| format!("{v} {n}")).collect();
    assert_eq!(legend, expected);

    for copy in ["x", "y"] {
        let vars: Vec<i32> = (0..3).map(|v| f.var_named(&format!("{copy}.n={v}")).unwrap() as i32).collect();
        let mut group: Vec<Vec<i32>> = f
            .clauses
            .iter()
            .filter(|c| c.iter().all(|l| vars.contains(&l.abs())))
            .map(|c| {
                let mut c = c.clone();
                c.sort();
                c
            })
            .collect();
        group.sort();
        let (a, b, c) = (vars[0], vars[1], vars[2]);
        let mut want = vec![vec![a, b, c], vec![-b, -a], vec![-c, -a], vec![-c, -b]];
        for w in &mut want {
            w.sort();
        }
        want.sort();
        assert_eq!(group, want, "{copy}");
    }
}

#[test]
fn reports_round_trip_through_serde() {
    let m = model("ex_ftu_not_fair");
    let o = run(&["audit", path(&m), "--per-decision", "--timing"]);
    let r: AuditReport = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(serde_json::to_string_pretty(&r).unwrap() + "\n", stdout(&o));

    let o = run(&["explain", path(&m), "--instance", "1,1,1,1"]);
    let r: ExplainReport = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(serde_json::to_string_pretty(&r).unwrap() + "\n", stdout(&o));

    let o = run(&["check", path(&m), "--what", "loose"]);
    let r: CheckReport = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(serde_json::to_string_pretty(&r).unwrap() + "\n", stdout(&o));
}

#[test]
fn audit_snapshots() {
    let dir = fixture("expected");
    let mut seen = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let snap = entry.unwrap().path();
        let file = snap.file_name().unwrap().to_str().unwrap();
        let Some(name) = file.strip_suffix(".audit.json") else { continue };
        let o = run(&["audit", path(&model(name)), "--per-decision"]);
        assert_eq!(stdout(&o), std::fs::read_to_string(&snap).unwrap(), "{name}");
        seen += 1;
    }
    assert_eq!(seen, 16);
}
