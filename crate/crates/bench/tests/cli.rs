//! CLI contract: exit status 0 on success, 2 when more than half of the
//! runs fail, CSV written either way.

use std::process::Command;

fn bench_exe() -> &'static str {
    env!("CARGO_BIN_EXE_bench")
}

#[test]
fn successful_plan_exits_zero_and_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ok.csv");
    let output = Command::new(bench_exe())
        .args([
            "run",
            "--workload",
            "counter",
            "--args",
            r#"[["40","1"],["70","1"]]"#,
            "--reps",
            "2",
            "--timeout-ms",
            "90000",
            "--trigger-ms",
            "50",
            "--clock",
            "simulated",
            "--fencing",
            "on",
            "--out",
        ])
        .arg(&out)
        .output()
        .unwrap();
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 5, "header + 4 samples");
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("overhead ratio"), "{stdout}");
}

#[test]
fn mostly_failing_plan_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bad.csv");
    let output = Command::new(bench_exe())
        .args([
            "run",
            "--workload",
            "counter",
            "--args",
            r#"[["-1"],["-2"]]"#,
            "--reps",
            "1",
            "--trigger-ms",
            "50",
            "--out",
        ])
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(out.exists(), "samples are written even when runs fail");
}

#[test]
fn malformed_args_exit_one() {
    let output = Command::new(bench_exe())
        .args([
            "run",
            "--workload",
            "counter",
            "--args",
            "{not json",
            "--trigger-ms",
            "50",
            "--out",
            "/tmp/never.csv",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
}
