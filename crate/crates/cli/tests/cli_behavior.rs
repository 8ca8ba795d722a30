//! Process-level behavior of the command-line tool: exit codes, report
//! destinations, and error reporting on bad input.

use std::io::Write;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_foliation"))
}

fn session_file(dir: &tempfile::TempDir, name: &str, contents: &str) -> std::path::PathBuf {
    let path = dir.path().join(name);
    let mut file = std::fs::File::create(&path).expect("create session file");
    file.write_all(contents.as_bytes()).expect("write session file");
    path
}

const PASSING: &str = "space 2 vars x y ring Z\ndistribution theta gens \"d/dx\"\nideal I gens \"x\"\nassert-unit of=I expect=false\n";
const FAILING: &str = "space 2 vars x y ring Z\ndistribution theta gens \"d/dx\"\nideal I gens \"x\"\nassert-unit of=I\n";
const MALFORMED: &str = "space 2 vars x y ring Z\ndistribution theta gens \"d/dx\"\nideal I gens \"w + 1\"\n";
const HARD_ERROR: &str = "space 2 vars x y ring Z\ndistribution theta gens \"d/dx\"\nlinear-change map=\"x + y, x + y\" names=\"a,b\" mode=view\n";

#[test]
fn run_exits_zero_when_asserts_pass() {
    let dir = tempfile::tempdir().unwrap();
    let path = session_file(&dir, "ok.fol", PASSING);
    let out = bin().arg("run").arg(&path).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("verdict: true"));
}

#[test]
fn run_exits_nonzero_when_an_assert_fails() {
    let dir = tempfile::tempdir().unwrap();
    let path = session_file(&dir, "fail.fol", FAILING);
    let out = bin().arg("run").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("verdict: false"));
}

#[test]
fn run_exits_nonzero_on_a_hard_session_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = session_file(&dir, "hard.fol", HARD_ERROR);
    let out = bin().arg("run").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("session stopped"), "stderr was: {err}");
}

#[test]
fn parse_errors_are_positioned_and_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = session_file(&dir, "bad.fol", MALFORMED);
    for sub in ["run", "check"] {
        let out = bin().arg(sub).arg(&path).output().unwrap();
        assert_eq!(out.status.code(), Some(2), "subcommand {sub}");
        let err = String::from_utf8(out.stderr).unwrap();
        assert!(err.contains("3:"), "missing line position in: {err}");
        assert!(err.contains("unknown variable 'w'"), "stderr was: {err}");
    }
}

#[test]
fn check_validates_without_running() {
    let dir = tempfile::tempdir().unwrap();
    // The failing assert would flip the run exit code, but check only parses.
    let path = session_file(&dir, "fail.fol", FAILING);
    let out = bin().arg("check").arg(&path).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("ok: 4 statement(s)"));
}

#[test]
fn missing_file_reports_an_error() {
    let out = bin().arg("run").arg("/nonexistent/session.fol").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn json_flag_writes_the_report_file_and_silences_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = session_file(&dir, "ok.fol", PASSING);
    let json_path = dir.path().join("report.json");
    let out = bin()
        .arg("run")
        .arg(&path)
        .arg("--json")
        .arg(&json_path)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let body = std::fs::read_to_string(&json_path).unwrap();
    assert!(body.starts_with("[\n"));
    assert!(body.ends_with("\n"));
    assert!(body.contains("\"verdict\": true"));
}

#[test]
fn text_flag_prints_alongside_json() {
    let dir = tempfile::tempdir().unwrap();
    let path = session_file(&dir, "ok.fol", PASSING);
    let json_path = dir.path().join("report.json");
    let out = bin()
        .arg("run")
        .arg(&path)
        .arg("--json")
        .arg(&json_path)
        .arg("--text")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(!out.stdout.is_empty());
    assert!(json_path.exists());
}
