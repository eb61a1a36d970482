//! End-to-end checks of the command-line binary: output content, exit
//! codes, and emission stability.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_singgraph"))
}

fn write_temp(name: &str, content: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("singgraph-test-{}-{name}", std::process::id()));
    std::fs::write(&path, content).unwrap();
    path
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

const A1: &str =
    r#"{"vertices":[{"id":"E","self_intersection":-2,"genus":0,"loops":0}],"edges":[]}"#;

#[test]
fn classify_a1_reports_klt() {
    let path = write_temp("a1.json", A1);
    let out = bin().arg("classify").arg(&path).output().unwrap();
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("KLT, min A = 1"), "{text}");
    assert!(text.contains("A = 0 locus: (empty)"), "{text}");
}

#[test]
fn classify_quiet_prints_only_the_verdict() {
    let path = write_temp("a1-quiet.json", A1);
    let out = bin().arg("classify").arg(&path).arg("--quiet").output().unwrap();
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("KLT, min A = 1"), "{text}");
    assert!(!text.contains("vertex"), "table suppressed: {text}");
}

#[test]
fn classify_json_report() {
    let path = write_temp("a1-json.json", A1);
    let out = bin().arg("classify").arg(&path).arg("--json").output().unwrap();
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["verdict"], "KLT");
    assert_eq!(doc["min_thinness"], "1");
    assert_eq!(doc["vertices"][0]["a"], "0");
    assert_eq!(doc["vertices"][0]["b"], "1");
}

#[test]
fn classify_simple_elliptic() {
    let path = write_temp(
        "elliptic.json",
        r#"{"vertices":[{"id":"E","self_intersection":-1,"genus":1,"loops":0}],"edges":[]}"#,
    );
    let out = bin().arg("classify").arg(&path).output().unwrap();
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("LC_SIMPLE_ELLIPTIC"), "{text}");
    assert!(text.contains("-1"), "discrepancy column: {text}");
}

#[test]
fn classify_rejects_indefinite_with_exit_3() {
    let path = write_temp(
        "pos.json",
        r#"{"vertices":[{"id":"E","self_intersection":1,"genus":0,"loops":0}],"edges":[]}"#,
    );
    let out = bin().arg("classify").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    let err = stderr(&out);
    assert!(err.contains("leading principal minor 1"), "{err}");
    assert!(!err.contains("panicked"), "{err}");
}

#[test]
fn classify_parse_error_is_exit_2() {
    let path = write_temp("garbage.json", "not json");
    let out = bin().arg("classify").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let missing = bin()
        .arg("classify")
        .arg("no-such-file.json")
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn classify_dot_is_deterministic_and_sorted() {
    let path = write_temp(
        "chain.json",
        r#"{"vertices":[{"id":"B","self_intersection":-2,"genus":0,"loops":0},
                        {"id":"A","self_intersection":-2,"genus":0,"loops":0}],
            "edges":[["B","A"]]}"#,
    );
    let a = bin()
        .arg("classify")
        .arg(&path)
        .arg("--dot")
        .output()
        .unwrap();
    let b = bin()
        .arg("classify")
        .arg(&path)
        .arg("--dot")
        .output()
        .unwrap();
    assert_eq!(stdout(&a), stdout(&b));
    let text = stdout(&a);
    let pos_a = text.find("\"A\" [").unwrap();
    let pos_b = text.find("\"B\" [").unwrap();
    assert!(pos_a < pos_b, "vertices sorted by id:\n{text}");
    assert!(text.contains("\"A\" -- \"B\";"), "{text}");
}

#[test]
fn blowup_empty_script_reemits_canonical_graph() {
    let graph = write_temp("reemit.json", A1);
    let script = write_temp("empty-script.json", "[]");
    let out = bin()
        .arg("blowup")
        .arg(&graph)
        .arg(&script)
        .output()
        .unwrap();
    assert!(out.status.success());
    let emitted = stdout(&out);
    // feeding the emission back yields the identical emission
    let again_path = write_temp("reemit2.json", &emitted);
    let again = bin()
        .arg("blowup")
        .arg(&again_path)
        .arg(&script)
        .output()
        .unwrap();
    assert_eq!(emitted, stdout(&again));
}

#[test]
fn blowup_satellite_step_reports_empty_diff() {
    let graph = write_temp(
        "a2.json",
        r#"{"vertices":[{"id":"E1","self_intersection":-2,"genus":0,"loops":0},
                        {"id":"E2","self_intersection":-2,"genus":0,"loops":0}],
            "edges":[["E1","E2"]]}"#,
    );
    let script = write_temp("sat.json", r#"[{"op":"satellite","at":["E1","E2"]}]"#);
    let out = bin()
        .arg("blowup")
        .arg(&graph)
        .arg(&script)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(
        stderr(&out).contains("transport diff: (empty)"),
        "{}",
        stderr(&out)
    );
    let text = stdout(&out);
    assert!(text.contains("\"F0\""), "{text}");
    assert!(text.contains("-3"), "{text}");
}

#[test]
fn blowup_bad_step_is_exit_4_with_index() {
    let graph = write_temp("a1-for-script.json", A1);
    let script = write_temp("bad-script.json", r#"[{"op":"free","at":"missing"}]"#);
    let out = bin()
        .arg("blowup")
        .arg(&graph)
        .arg(&script)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
    assert!(stderr(&out).contains("step 0"), "{}", stderr(&out));
}

#[test]
fn cusp_paper_example() {
    let out = bin()
        .args(["cusp", "--d", "2", "--alpha", "3+1w"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("epsilon: 3+2w"), "{text}");
    assert!(text.contains("topological degree: 7"), "{text}");
    assert!(text.contains("irrational"), "{text}");
}

#[test]
fn cusp_integer_alpha_is_rational_rotation() {
    let out = bin()
        .args(["cusp", "--d", "2", "--alpha", "2"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("topological degree: 4"), "{text}");
    assert!(text.contains("rational: 0/1"), "{text}");
}

#[test]
fn cusp_rejects_non_totally_positive_with_exit_5() {
    let out = bin()
        .args(["cusp", "--d", "2", "--alpha", "1-1w"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(5));
    assert!(!stderr(&out).contains("panicked"));
}

#[test]
fn cusp_json_and_graph_emission() {
    let out = bin().args(["cusp", "--d", "7", "--json"]).output().unwrap();
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["epsilon"], "8+3w");
    assert_eq!(doc["period"], 2);
    assert_eq!(doc["cycle"][0], 6);
    assert_eq!(doc["cycle"][1], 3);

    let out = bin()
        .args(["cusp", "--d", "7", "--graph", "--quiet"])
        .output();
    // --quiet is not a cusp flag; expect clap to reject it
    assert!(out.unwrap().status.code() == Some(2));

    let out = bin()
        .args(["cusp", "--d", "7", "--graph"])
        .output()
        .unwrap();
    let text = stdout(&out);
    let json_start = text.find('{').unwrap();
    let graph = singgraph::graph::DualGraph::from_json(&text[json_start..]).unwrap();
    assert_eq!(graph.n(), 2);
}

#[test]
fn cyclic_pipes_into_classify() {
    let out = bin().args(["cyclic", "5", "3"]).output().unwrap();
    assert!(out.status.success());
    let path = write_temp("cyclic53.json", &stdout(&out));
    let out = bin().arg("classify").arg(&path).output().unwrap();
    assert!(stdout(&out).contains("KLT"), "{}", stdout(&out));
}

#[test]
fn verify_jacobian_and_theoremb_and_skew() {
    let out = bin()
        .args(["verify-jacobian", "--map", "2,0,0,3", "--weights", "1,1"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(stdout(&out).contains("equal: true"));

    let out = bin()
        .args([
            "verify-jacobian",
            "--map",
            "2,0,0,3",
            "--weights",
            "3/2,5/7",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(stdout(&out).contains("equal: true"));

    let out = bin()
        .args(["theoremb", "--group", "2,1", "--map", "3,0,0,1"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("nonempty"), "{text}");
    assert!(text.contains("KLT"), "{text}");

    let out = bin()
        .args(["skew", "--fiber", "2", "--base", "3"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(
        text.contains("e = 6") && text.contains("lambda = 3"),
        "{text}"
    );
}

#[test]
fn iteration_cap_env_var_is_honored() {
    // a graph whose fundamental cycle needs a few sweeps still works with a
    // generous cap and fails cleanly with an absurdly small one
    let graph = write_temp(
        "d4.json",
        r#"{"vertices":[{"id":"C","self_intersection":-2,"genus":0,"loops":0},
                        {"id":"L1","self_intersection":-2,"genus":0,"loops":0},
                        {"id":"L2","self_intersection":-2,"genus":0,"loops":0},
                        {"id":"L3","self_intersection":-2,"genus":0,"loops":0}],
            "edges":[["C","L1"],["C","L2"],["C","L3"]]}"#,
    );
    let ok = bin()
        .arg("classify")
        .arg(&graph)
        .env("SINGGRAPH_ITER_CAP", "1000")
        .output()
        .unwrap();
    assert!(ok.status.success(), "{}", stderr(&ok));
    let too_small = bin()
        .arg("classify")
        .arg(&graph)
        .env("SINGGRAPH_ITER_CAP", "0")
        .output()
        .unwrap();
    assert!(!too_small.status.success());
    assert!(
        stderr(&too_small).contains("iteration cap"),
        "{}",
        stderr(&too_small)
    );
}
