//! Black-box tests of the command-line interface: output grammar, exit
//! codes, and byte-for-byte determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn rummikub(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rummikub"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).unwrap()
}

fn stderr(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).unwrap()
}

#[test]
fn solve_reference_problem() {
    let path = fixture("figure.problem");
    let out = rummikub(&["solve", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(
        stdout(&out),
        "score 39\n\
         GROUP value=3 suits=1,2,3 jokers=0\n\
         RUN suit=2 start=6 len=4 jokers=\n\
         unused\n"
    );

    // Identical bytes on a second run.
    let again = rummikub(&["solve", path.to_str().unwrap()]);
    assert_eq!(out.stdout, again.stdout);
}

#[test]
fn solve_empty_hand() {
    let out = rummikub(&["solve", fixture("empty.problem").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "score 0\nunused\n");
}

#[test]
fn solve_reports_unused_tiles() {
    let dir = std::env::temp_dir().join("rummikub-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("leftover.problem");
    std::fs::write(&path, "params n=13 k=4 m=2 j=2\nhand 6:2 7:2 8:2 1:4\n").unwrap();
    let out = rummikub(&["solve", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        stdout(&out),
        "score 21\nRUN suit=2 start=6 len=3 jokers=\nunused 1:4\n"
    );
}

#[test]
fn solve_unsatisfiable_table() {
    let out = rummikub(&["solve", fixture("unsat.problem").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stdout(&out), "table constraint unsatisfiable\n");
}

#[test]
fn solve_rejects_malformed_input_with_line_number() {
    let out = rummikub(&["solve", fixture("bad.problem").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.contains("line 2"), "{err}");
    assert!(err.contains("6;1"), "{err}");
}

#[test]
fn check_verifies_reconstruction() {
    let out = rummikub(&["check", fixture("figure.problem").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(stdout(&out), "score 39\nverify ok\n");
}

#[test]
fn oracle_agrees_on_reference_problem() {
    let out = rummikub(&["oracle", fixture("figure.problem").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(stdout(&out), "solver 39\noracle 39\n");
}

#[test]
fn oracle_rejects_oversized_problems() {
    let out = rummikub(&["oracle", fixture("big.problem").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("budget"), "{}", stderr(&out));
}

#[test]
fn count_emits_totals_csv() {
    let out = rummikub(&[
        "count",
        "--params",
        "n=13,k=4,m=2,j=2",
        "--t-from",
        "14",
        "--t-to",
        "15",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(
        stdout(&out),
        "t,total,winning,ratio\n14,37418772170780,,\n15,148416376650360,,\n"
    );
}

#[test]
fn winning_emits_full_rows() {
    let out = rummikub(&[
        "winning",
        "--params",
        "n=3,k=3,m=1,j=0",
        "--t-from",
        "3",
        "--t-to",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(stdout(&out), "t,total,winning,ratio\n3,84,6,7.14e-2\n");
}

#[test]
fn winning_full_set_row() {
    let out = rummikub(&[
        "winning",
        "--params",
        "n=6,k=4,m=2,j=0",
        "--t-from",
        "48",
        "--t-to",
        "48",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(stdout(&out), "t,total,winning,ratio\n48,1,1,1.00e0\n");
}

#[test]
fn count_rejects_bad_ranges_and_params() {
    let out = rummikub(&["count", "--t-from", "10", "--t-to", "5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("range"), "{}", stderr(&out));

    let out = rummikub(&[
        "count",
        "--params",
        "n=0,k=4",
        "--t-from",
        "1",
        "--t-to",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn winning_writes_to_file() {
    let dir = std::env::temp_dir().join("rummikub-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("rows.csv");
    let out = rummikub(&[
        "winning",
        "--params",
        "n=3,k=3,m=1,j=0",
        "--t-from",
        "0",
        "--t-to",
        "9",
        "--threads",
        "1",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let csv = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 11);
    assert_eq!(lines[0], "t,total,winning,ratio");
    assert_eq!(lines[1], "0,1,1,1.00e0");
    assert_eq!(lines[2], "1,9,0,0");
    assert_eq!(lines[10], "9,1,1,1.00e0");
}
