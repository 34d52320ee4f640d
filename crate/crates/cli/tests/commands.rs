use std::process::{Command, Output};

use serde_json::Value;

fn latkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_latkit")).args(args).env_remove("LATKIT_CAP").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn disc_of_og10_expression() {
    let o = latkit(&["disc", "U^3 + E8(-1)^2 + A2(-1)"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "3\n");

    let o = latkit(&["disc", "--json", "K3n(2)"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["disc"], 2);
    assert_eq!(v["discriminant_form"]["factors"], serde_json::json!([2]));
}

#[test]
fn a2_vector() {
    let o = latkit(&["a2", "--vector", "1,0"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("u² = 6"), "{out}");
    assert!(out.contains("branch 3v²"), "{out}");

    let o = latkit(&["a2", "--vector", "-1,2", "--json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["u_square"], "42");
    assert_eq!(v["branch"], "3v2");

    let o = latkit(&["a2", "--vector", "0,0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn a2_bound() {
    let o = latkit(&["a2", "--bound", "20"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("0 mismatches"));
}

#[test]
fn parse_errors_exit_two() {
    let o = latkit(&["disc", "U^"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("offset 2"), "{}", stderr(&o));
    assert!(stderr(&o).contains("unsigned integer"));

    let o = latkit(&["sig", "Foo"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unknown lattice name"));

    assert_eq!(latkit(&["disc", "A2(1/2)"]).status.code(), Some(2));
    assert_eq!(latkit(&[]).status.code(), Some(2));
    assert_eq!(latkit(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(latkit(&["--help"]).status.code(), Some(0));
}

#[test]
fn signature_and_genus() {
    assert_eq!(stdout(&latkit(&["sig", "I(21,2)"])), "(21,2)\n");
    assert_eq!(stdout(&latkit(&["genus-eq", "U + A2(-1)", "A2(-1) + U"])), "yes\n");
    assert_eq!(stdout(&latkit(&["genus-eq", "[2] + [-2]", "U"])), "no\n");
    let out = stdout(&latkit(&["genus-eq", "[1] + [-3]", "[-3] + [1]"]));
    assert!(out.starts_with("yes\nnote:"), "{out}");
}

#[test]
fn cap_from_environment() {
    let run = |cap: &str| {
        Command::new(env!("CARGO_BIN_EXE_latkit"))
            .args(["genus-eq", "A2(-1) + U", "U + A2(-1)"])
            .env("LATKIT_CAP", cap)
            .output()
            .unwrap()
    };
    assert_eq!(stdout(&run("2")), "too-large\n");
    assert_eq!(stdout(&run("3")), "yes\n");
    assert_eq!(run("zero").status.code(), Some(2));
}

#[test]
fn glue_obstruct_candidates() {
    let o = latkit(&["glue", "U", "--span", "1,1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("glue order 2"));

    let o = latkit(&["glue", "U", "--span", "1,0"]);
    assert_eq!(o.status.code(), Some(2));

    let o = latkit(&["glue", "OG10", "--span", "0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,1,0;0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,1", "--json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["order"], "1");

    assert_eq!(stdout(&latkit(&["obstruct", "U^2 + E8", "--scale", "2", "--ambient-rank", "22"])), "obstructed\n");
    assert_eq!(stdout(&latkit(&["obstruct", "A2", "--scale", "-2", "--ambient-rank", "24"])), "inconclusive\n");
    assert_eq!(latkit(&["obstruct", "A2", "--scale", "0", "--ambient-rank", "24"]).status.code(), Some(2));

    assert_eq!(stdout(&latkit(&["candidates", "--prime", "2", "--glue", "5"])), "{5, 10}\n");
    assert_eq!(latkit(&["candidates", "--prime", "4", "--glue", "1"]).status.code(), Some(2));
}

#[test]
fn extend_cases() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, body: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, body).unwrap();
        p
    };
    let u = write("u.json", r#"{"total": {"gram": [[0,1],[1,0]]}, "algebraic": [[1,1]], "f": "-id", "g": "id"}"#);
    let o = latkit(&["extend", "--json", "--case", u.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["result"], "extended");
    assert_eq!(v["matrix"], serde_json::json!([[0, 1], [1, 0]]));

    let i3 = write(
        "i3.json",
        r#"{"total": {"gram": [[1,0,0],[0,1,0],[0,0,1]]}, "algebraic": [[1,1,1]], "f": "-id", "g": [[1]]}"#,
    );
    let o = latkit(&["extend", "--case", i3.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("incompatible"), "{}", stdout(&o));

    let bad = write("bad.json", r#"{"total": {"gram": [[0,1],[1,0]]}, "algebraic": [[1,1]], "f": [[2]], "g": "id"}"#);
    assert_eq!(latkit(&["extend", "--case", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(latkit(&["extend", "--case", "/nonexistent/case.json"]).status.code(), Some(2));
}

#[test]
fn verify_is_deterministic() {
    let args = ["verify", "--suite", "paper", "--seed", "3", "--trials", "40", "--json"];
    let (a, b) = (latkit(&args), latkit(&args));
    assert_eq!(a.status.code(), Some(0), "{}", stdout(&a));
    assert_eq!(a.stdout, b.stdout);

    let out = stdout(&a);
    let lines: Vec<Value> = out.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 13);
    let ids: std::collections::BTreeSet<&str> =
        lines[..12].iter().map(|r| r["check_id"].as_str().unwrap()).collect();
    assert_eq!(ids.len(), 12);
    let summary = &lines[12];
    assert_eq!(summary["seed"], 3);
    assert_eq!(summary["trials"], 40);
    assert_eq!(summary["status"], "pass");
}

#[test]
fn verify_defaults_and_text() {
    let o = latkit(&["verify", "--suite", "paper", "--trials", "20"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("seed 0 trials 20"));
    assert_eq!(latkit(&["verify", "--suite", "other"]).status.code(), Some(2));
}
