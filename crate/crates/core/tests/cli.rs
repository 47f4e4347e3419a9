//! Exit-code and determinism contract of the command-line front end.

use std::process::{Command, Output};

fn confkernel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_confkernel"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn passing_checks_exit_zero() {
    let out = confkernel(&["check", "algebra", "--builtin", "HVS2", "--symbolic"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).contains("result: pass"));

    let out = confkernel(&["check", "module", "--builtin", "T7.3-M5", "--param", "a=1"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
}

#[test]
fn rational_flags_accept_fractions() {
    let out = confkernel(&[
        "check", "module", "--builtin", "T7.3-M1", "--param", "Delta=5/2", "--param", "a=-1/3",
        "--param", "b=2", "--param", "c=1/2",
    ]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
}

#[test]
fn failed_check_exits_one_with_residuals() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.map");
    std::fs::write(&path, "map d parity even\nimage L = (lam) * L\n").unwrap();
    let out = confkernel(&[
        "check", "map", "--file", path.to_str().unwrap(), "--algebra", "HVS",
    ]);
    assert_eq!(code(&out), 1);
    let text = stdout(&out);
    assert!(text.contains("check derivation: FAIL"));
    assert!(text.contains("result: FAIL"));
    // residual listing carries nonzero polynomials
    assert!(text.contains("lam"));
}

#[test]
fn parse_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.map");
    std::fs::write(&path, "not a map file\n").unwrap();
    let out = confkernel(&[
        "check", "map", "--file", path.to_str().unwrap(), "--algebra", "HVS",
    ]);
    assert_eq!(code(&out), 2);

    let out = confkernel(&["check", "algebra", "--builtin", "no-such-key"]);
    assert_eq!(code(&out), 2);

    let out = confkernel(&["check", "module", "--builtin", "T7.3-M5", "--param", "a=x"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn symbolic_parameters_exit_two_in_solvers() {
    let out = confkernel(&["solve", "derivations", "--algebra", "HVSab", "--parity", "even", "--bound", "3"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn solve_exits_zero_regardless_of_dimension() {
    let out = confkernel(&[
        "solve", "derivations", "--algebra", "HVS", "--alpha", "2", "--parity", "even",
        "--bound", "3",
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("outer dimension = 1"));

    let out = confkernel(&[
        "solve", "derivations", "--algebra", "HVS", "--alpha", "2", "--parity", "odd",
        "--bound", "3",
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("outer dimension = 0"));

    let out = confkernel(&["solve", "keyeq", "--a", "1", "--b", "0", "--c", "0", "--bound", "4"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("dimension = 2"));

    let out = confkernel(&[
        "solve", "biderivations", "--algebra", "HVS2", "--beta", "2", "--gamma", "0",
        "--tau", "0", "--bound", "3",
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("dimension = 2"));
}

#[test]
fn reports_are_byte_identical_across_runs_and_thread_counts() {
    let args = [
        "solve", "biderivations", "--algebra", "HVS", "--alpha", "2", "--bound", "3",
        "--format", "json",
    ];
    let first = Command::new(env!("CARGO_BIN_EXE_confkernel"))
        .args(args)
        .env("CONFKERNEL_THREADS", "1")
        .output()
        .unwrap();
    let second = Command::new(env!("CARGO_BIN_EXE_confkernel"))
        .args(args)
        .env("CONFKERNEL_THREADS", "4")
        .output()
        .unwrap();
    assert_eq!(code(&first), 0);
    assert_eq!(first.stdout, second.stdout);
    let json: serde_json::Value = serde_json::from_slice(&first.stdout).unwrap();
    assert_eq!(json["schema"], 1);
}

#[test]
fn report_subcommand_rerenders_saved_reports() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = confkernel(&[
        "check", "algebra", "--builtin", "Vir", "--format", "json", "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);

    let rendered = confkernel(&["report", "--input", path.to_str().unwrap(), "--format", "text"]);
    assert_eq!(code(&rendered), 0);
    assert!(stdout(&rendered).contains("check jacobi: pass"));

    let json = confkernel(&["report", "--input", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(json.stdout, std::fs::read(&path).unwrap());

    // schema mismatches are a parse error
    std::fs::write(&path, "{\"schema\": 99}").unwrap();
    let out = confkernel(&["report", "--input", path.to_str().unwrap(), "--format", "text"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn catalog_list_names_all_builtins() {
    let out = confkernel(&["catalog", "list"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    for key in ["Vir", "HV", "NS", "HVS", "HVS2", "rank11-R4", "prop31-R2", "T7.4-M7"] {
        assert!(text.contains(key), "missing {key}");
    }
}

#[test]
fn check_files_round_trip_through_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    let module = dir.path().join("weight.mod");
    std::fs::write(
        &module,
        "module demo over Vir\nbasis v even\naction L v = (del + 2*lam + 1) * v\n",
    )
    .unwrap();
    let out = confkernel(&["check", "module", "--file", module.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));

    // wrong weight: the compatibility check fails with exit 1
    std::fs::write(
        &module,
        "module demo over Vir\nbasis v even\naction L v = (del + 2*lam^2) * v\n",
    )
    .unwrap();
    let out = confkernel(&["check", "module", "--file", module.to_str().unwrap()]);
    assert_eq!(code(&out), 1, "{}", stdout(&out));
}
