use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use skorokhod::EmbeddingPlan;
use tempfile::TempDir;

const SIMPLE: &str = r#"{"mu0": [[-1, 0.5], [1, 0.5]], "mu": [[0, 1]]}"#;
const SPREAD: &str = r#"{
  "mu0": [[0, 1]],
  "mu": [[-1, 0.5], [1, 0.5]],
  "simulation": {"n_paths": 20000, "seed": 3, "gammas": [2, 4]}
}"#;
const BAD_C: &str = r#"{
  "mu0": [[-1, 0.5], [1, 0.5]],
  "mu": [[0, 1]],
  "construction": {"type": "custom", "C": 2, "tangents": [
    {"slope": 0, "intercept": -2}, {"slope": 1, "intercept": -2}, {"slope": -1, "intercept": -2}
  ]}
}"#;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_skorokhod"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn file(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn build(dir: &TempDir, spec: &Path, name: &str) -> (Output, PathBuf) {
    let plan = dir.path().join(name);
    let o = run(&["build", "--spec", s(spec), "--out", s(&plan)]);
    (o, plan)
}

#[test]
fn analyze_reports_invariants() {
    let dir = TempDir::new().unwrap();
    let spec = file(&dir, "simple.json", SIMPLE);
    let o = run(&["analyze", "--spec", s(&spec)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("C        1\n"), "{text}");
    assert!(text.contains("A        {0}\n"), "{text}");

    let o = run(&["analyze", "--spec", s(&spec), "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["C"], 1.0);
    assert_eq!(v["region"]["components"], serde_json::json!([[0.0, 0.0]]));
    // Thresholds default to {1/4, 1/2, 3/4, 1} of the span (here 1); the
    // bound is 1/(2x) above 0.
    assert_eq!(v["max_law_bound"][1], serde_json::json!([0.5, 0.5]));

    let o = run(&["analyze", "--spec", s(&spec), "--format", "csv"]);
    assert!(stdout(&o).starts_with("threshold,bound\n0.25,"));
}

#[test]
fn build_then_verify_round_trip() {
    let dir = TempDir::new().unwrap();
    let spec = file(&dir, "spread.json", SPREAD);
    let (o, plan_path) = build(&dir, &spec, "plan.json");
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let written = std::fs::read_to_string(&plan_path).unwrap();
    let plan = EmbeddingPlan::from_json(&written).unwrap();
    assert_eq!(plan.c, 0.0);
    assert_eq!(plan.steps.len(), 1);

    let (_, again) = build(&dir, &spec, "again.json");
    assert_eq!(written, std::fs::read_to_string(again).unwrap());

    let args = [
        "verify",
        "--spec",
        s(&spec),
        "--plan",
        s(&plan_path),
        "--format",
        "json",
    ];
    let o = run(&args);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["report"]["C"], 0.0);
    assert_eq!(v["report"]["structural_ok"], true);
    assert_eq!(v["report"]["ui_embedding"], true);
    assert_eq!(v["law"]["samples"], 20000);
    assert_eq!(v["passed"], true);
    assert_eq!(stdout(&o), stdout(&run(&args)));

    let o = run(&[
        "verify",
        "--spec",
        s(&spec),
        "--plan",
        s(&plan_path),
        "--paths",
        "500",
        "--seed",
        "9",
    ]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).ends_with("PASSED\n"));
}

#[test]
fn verify_writes_csv_tables() {
    let dir = TempDir::new().unwrap();
    let spec = file(&dir, "spread.json", SPREAD);
    let (_, plan) = build(&dir, &spec, "plan.json");
    let out = dir.path().join("tables");
    let o = run(&[
        "verify",
        "--spec",
        s(&spec),
        "--plan",
        s(&plan),
        "--paths",
        "2000",
        "--format",
        "csv",
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let law = std::fs::read_to_string(out.join("law.csv")).unwrap();
    let tails = std::fs::read_to_string(out.join("tails.csv")).unwrap();
    assert!(law.starts_with("atom,frequency\n-1.0,"), "{law}");
    assert_eq!(law.lines().count(), 3);
    assert_eq!(
        tails,
        "gamma,side,estimate,stderr\n2.0,below,0.0,0.0\n2.0,above,0.0,0.0\n4.0,below,0.0,0.0\n4.0,above,0.0,0.0\n"
    );
}

#[test]
fn bad_plan_fails_verification() {
    let dir = TempDir::new().unwrap();
    let spec = file(&dir, "bad.json", BAD_C);
    let (o, plan) = build(&dir, &spec, "plan.json");
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = run(&[
        "verify",
        "--spec",
        s(&spec),
        "--plan",
        s(&plan),
        "--paths",
        "1000",
    ]);
    assert_eq!(code(&o), 4);
    assert!(stdout(&o).contains("structural     FAILED (step 0 crosses A)"));

    // A plan checked against a different problem.
    let other = file(&dir, "other.json", SPREAD);
    let o = run(&["verify", "--spec", s(&other), "--plan", s(&plan)]);
    assert_eq!(code(&o), 4);
    assert!(stderr(&o).contains("do not match"));
}

#[test]
fn malformed_input_exits_2() {
    let dir = TempDir::new().unwrap();
    let bad = file(
        &dir,
        "bad.json",
        "{\"mu0\": [[0, 1]],\n \"mu\": [[0, \"x\"]]}",
    );
    let o = run(&["analyze", "--spec", s(&bad)]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));

    let o = run(&["analyze", "--spec", s(&dir.path().join("missing.json"))]);
    assert_eq!(code(&o), 2);

    let plan = file(&dir, "plan.json", "{\"mu0\": [[0, 1]], \"target\": 5}");
    let spec = file(&dir, "spec.json", SIMPLE);
    let o = run(&["verify", "--spec", s(&spec), "--plan", s(&plan)]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("`target`"), "{}", stderr(&o));

    assert_eq!(code(&run(&["analyze"])), 2);
    assert_eq!(
        code(&run(&["analyze", "--spec", s(&spec), "--format", "xml"])),
        2
    );
}

#[test]
fn inadmissible_constructions_exit_3() {
    let dir = TempDir::new().unwrap();
    let small_c = file(
        &dir,
        "small.json",
        r#"{"mu0": [[-1, 0.5], [1, 0.5]], "mu": [[0, 1]],
            "construction": {"type": "custom", "C": 0.5, "tangents": []}}"#,
    );
    let (o, _) = build(&dir, &small_c, "plan.json");
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("C"), "{}", stderr(&o));

    let truncated = file(
        &dir,
        "vallois.json",
        r#"{"mu0": [[0, 1]], "mu": [[-1, 0.5], [1, 0.5]],
            "construction": {"type": "vallois", "eps": 0.25, "max_steps": 3}}"#,
    );
    let (o, plan) = build(&dir, &truncated, "plan.json");
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("truncated"));
    // The truncated plan is still written, and refused for simulation.
    assert!(EmbeddingPlan::from_json(&std::fs::read_to_string(&plan).unwrap()).is_ok());
    let o = run(&["verify", "--spec", s(&truncated), "--plan", s(&plan)]);
    assert_eq!(code(&o), 3);
}

#[test]
fn unwritable_output_exits_1() {
    let dir = TempDir::new().unwrap();
    let spec = file(&dir, "simple.json", SIMPLE);
    let out = dir.path().join("no/such/dir/out.txt");
    let o = run(&["analyze", "--spec", s(&spec), "--out", s(&out)]);
    assert_eq!(code(&o), 1);
}

#[test]
fn diagram_is_byte_stable() {
    let dir = TempDir::new().unwrap();
    let spec = file(&dir, "simple.json", SIMPLE);
    let (_, plan) = build(&dir, &spec, "plan.json");
    let (a, b) = (dir.path().join("a.svg"), dir.path().join("b.svg"));
    for out in [&a, &b] {
        let o = run(&[
            "diagram",
            "--spec",
            s(&spec),
            "--plan",
            s(&plan),
            "--out",
            s(out),
        ]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
    }
    let svg = std::fs::read(&a).unwrap();
    assert_eq!(svg, std::fs::read(&b).unwrap());
    let text = String::from_utf8(svg).unwrap();
    assert!(text.contains("<svg"));
    assert_eq!(text.matches("class=\"tangent\"").count(), 2);
}
