use std::path::Path;
use std::process::{Command, Output};

fn cnp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cnp")).args(args).output().expect("run cnp")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const EXAMPLE: &str = "p cnf 3 7\n-2 3 0\n1 3 0\n-1 2 0\n-1 -2 0\n1 -2 0\n2 -3 0\n1 -3 0\n";

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&cnp(&[])), 1);
    assert_eq!(code(&cnp(&["solve"])), 1);
    assert_eq!(code(&cnp(&["frobnicate"])), 1);
    assert_eq!(code(&cnp(&["--help"])), 0);
}

#[test]
fn missing_input_is_an_internal_error() {
    assert_eq!(code(&cnp(&["solve", "--cnf", "/nonexistent/x.cnf"])), 2);
}

#[test]
fn solve_then_check_worked_example() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = dir.path().join("ex.cnf");
    let proof = dir.path().join("ex.drat");
    std::fs::write(&cnf, EXAMPLE).unwrap();
    let out = cnp(&["solve", "--cnf", s(&cnf), "--proof", s(&proof)]);
    assert_eq!(code(&out), 20);
    assert!(String::from_utf8_lossy(&out.stdout).contains("s UNSATISFIABLE"));

    let core = dir.path().join("core.cnf");
    let out = cnp(&["check", "--cnf", s(&cnf), "--proof", s(&proof), "--core", s(&core)]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("s VERIFIED"));
    let core_text = std::fs::read_to_string(&core).unwrap();
    let core_formula = cnp_core::cnf::dimacs::parse_dimacs(&core_text).unwrap();
    assert!(core_formula.active_count() < 7);
    assert!(core_text.contains("c id "));

    let hand = dir.path().join("hand.drat");
    std::fs::write(&hand, "-2 0\n3 0\n0\n").unwrap();
    let just = dir.path().join("j.txt");
    let out = cnp(&["check", "--cnf", s(&cnf), "--proof", s(&hand), "--justification", s(&just)]);
    assert_eq!(code(&out), 0);
    assert_eq!(std::fs::read_to_string(&just).unwrap(), "j 7 : 3 4\nj 8 : 0 1 2\nj 9 : 5 7 8\n");
}

#[test]
fn rejected_proof_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = dir.path().join("ex.cnf");
    let bad = dir.path().join("bad.drat");
    std::fs::write(&cnf, EXAMPLE).unwrap();
    std::fs::write(&bad, "0\n").unwrap();
    let out = cnp(&["check", "--cnf", s(&cnf), "--proof", s(&bad)]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stdout).contains("s NOT VERIFIED"));
}

#[test]
fn satisfiable_formula_exits_ten() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = dir.path().join("sat.cnf");
    std::fs::write(&cnf, "p cnf 2 2\n1 2 0\n-1 0\n").unwrap();
    let out = cnp(&["solve", "--cnf", s(&cnf)]);
    assert_eq!(code(&out), 10);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("s SATISFIABLE"));
    let values: Vec<&str> = stdout
        .lines()
        .filter_map(|l| l.strip_prefix("v "))
        .flat_map(str::split_whitespace)
        .collect();
    assert_eq!(values, ["-1", "2", "0"]);
}

#[test]
fn cnp_serves_as_its_own_external_solver() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = dir.path().join("ex.cnf");
    let proof = dir.path().join("ex.drat");
    std::fs::write(&cnf, EXAMPLE).unwrap();
    let template = format!("{} solve --cnf {{cnf}} --proof {{proof}}", env!("CARGO_BIN_EXE_cnp"));
    let out = cnp(&["solve", "--cnf", s(&cnf), "--external", &template, "--proof", s(&proof)]);
    assert_eq!(code(&out), 20, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(code(&cnp(&["check", "--cnf", s(&cnf), "--proof", s(&proof)])), 0);
}

#[test]
fn encode_and_shrink_moser() {
    let dir = tempfile::tempdir().unwrap();
    let udg = dir.path().join("moser.udg");
    assert_eq!(code(&cnp(&["build-graph", "--name", "moser", "-o", s(&udg)])), 0);

    let cnf = dir.path().join("moser3.cnf");
    assert_eq!(code(&cnp(&["encode", "--graph", s(&udg), "--colors", "3", "-o", s(&cnf)])), 0);
    assert!(dir.path().join("moser3.cnf.groups").exists());
    assert_eq!(code(&cnp(&["solve", "--cnf", s(&cnf), "--quiet"])), 20);

    let out_graph = dir.path().join("critical.udg");
    let report = dir.path().join("shrink.json");
    let out = cnp(&["shrink-graph", "--graph", s(&udg), "--colors", "3", "-o", s(&out_graph), "--report", s(&report)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(json["schema_version"], 1);
    assert_eq!(json["command"], "shrink-graph");
    let text = std::fs::read_to_string(&out_graph).unwrap();
    let stats = cnp(&["stats", "--graph", s(&out_graph)]);
    assert_eq!(code(&stats), 0, "{text}");
    let stats = String::from_utf8_lossy(&stats.stdout);
    assert!(stats.contains("7") && stats.contains("11"), "{stats}");
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = dir.path().join("ex.cnf");
    let conf = dir.path().join("run.conf");
    std::fs::write(&cnf, EXAMPLE).unwrap();
    std::fs::write(&conf, "seed = 3\nquiet = true\n").unwrap();
    let out = cnp(&["solve", "--cnf", s(&cnf), "--config", s(&conf)]);
    assert_eq!(code(&out), 20);
    assert!(!String::from_utf8_lossy(&out.stdout).contains("v "));
}
