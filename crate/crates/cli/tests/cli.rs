use std::path::PathBuf;
use std::process::{Command, Output};

const INSTANCE: &str = r#"{"domain":["a","b"],"relations":{"R":{"arity":1,"tuples":[["a"]]}},
    "constants":{"zero":"a","one":"b"},
    "team":{"vars":["x","y"],"rows":[{"t":["a","a"],"w":"1/4"},{"t":["a","b"],"w":"1/4"},
    {"t":["b","a"],"w":"1/4"},{"t":["b","b"],"w":"1/4"}]}}"#;

fn workdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ptl-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    std::fs::write(dir.join("inst.json"), INSTANCE).unwrap();
    dir
}

fn ptl(dir: &PathBuf, formula: &str, args: &[&str]) -> Output {
    std::fs::write(dir.join("f.txt"), formula).unwrap();
    Command::new(env!("CARGO_BIN_EXE_ptl"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn exact_check_exit_codes() {
    let dir = workdir("exact");
    let yes = ptl(&dir, "indep( ; x ; y)", &["check", "inst.json", "f.txt"]);
    assert_eq!(yes.status.code(), Some(0));
    let no = ptl(&dir, "dep(x ; y)", &["check", "inst.json", "f.txt"]);
    assert_eq!(no.status.code(), Some(1));
    let bad = ptl(&dir, "dep(x ; ", &["check", "inst.json", "f.txt"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn split_routes() {
    let dir = workdir("split");
    let f = "R(x) \\/ !R(x)";
    assert_eq!(
        ptl(&dir, f, &["check", "inst.json", "f.txt"]).status.code(),
        Some(2)
    );
    assert_eq!(
        ptl(&dir, f, &["check", "inst.json", "f.txt", "--oracle", "2"])
            .status
            .code(),
        Some(0)
    );
    assert_eq!(
        ptl(&dir, f, &["check", "inst.json", "f.txt", "--via-compile"])
            .status
            .code(),
        Some(0)
    );
}

#[test]
fn compile_writes_script_and_sidecar() {
    let dir = workdir("compile");
    let out = ptl(
        &dir,
        "R(x) \\/ indep( ; x ; y)",
        &["compile", "inst.json", "f.txt", "--smt2", "out.smt2"],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let script = std::fs::read_to_string(dir.join("out.smt2")).unwrap();
    assert!(script.contains("(check-sat)"));
    let side: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("out.smt2.json")).unwrap()).unwrap();
    assert!(side["stats"]["outer_vars"].as_u64().unwrap() >= 4);
}

#[test]
fn report_records_exit_code() {
    let dir = workdir("report");
    let out = ptl(
        &dir,
        "dep(x ; y)",
        &["--report", "rep.json", "check", "inst.json", "f.txt"],
    );
    assert_eq!(out.status.code(), Some(1));
    let rep: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("rep.json")).unwrap()).unwrap();
    assert_eq!(rep["exit_code"], 1);
    assert_eq!(rep["command"][3], "check");
}
