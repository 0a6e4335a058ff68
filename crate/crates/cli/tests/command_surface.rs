//! Exit-code and output contract of the binary, driven in process through
//! the library entry point where stdout does not matter, and through the
//! compiled binary where it does.

use std::process::Command;

use suq2_cli::{run_from_args, EXIT_CERT_FAIL, EXIT_PASS, EXIT_USAGE};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_suq2"))
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run_from_args(["suq2", "nonsense"]), EXIT_USAGE);
    assert_eq!(
        run_from_args(["suq2", "index", "--which", "banana"]),
        EXIT_USAGE
    );
    assert_eq!(
        run_from_args(["suq2", "index", "--which", "multiplicity:0"]),
        EXIT_USAGE
    );
    assert_eq!(
        run_from_args(["suq2", "index", "--which", "u", "--window", "4"]),
        EXIT_USAGE
    );
    assert_eq!(
        run_from_args(["suq2", "spectrum", "--lambda", ""]),
        EXIT_USAGE
    );
    assert_eq!(run_from_args(["suq2", "spectrum"]), EXIT_USAGE);
    assert_eq!(
        run_from_args(["suq2", "spectrum", "--lambda", "4", "--dirac", "polka"]),
        EXIT_USAGE
    );
    assert_eq!(run_from_args(["suq2", "algebra", "--q", "7/3"]), EXIT_USAGE);
}

#[test]
fn config_validation_names_the_offending_parameter() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.cfg");
    std::fs::write(&path, "q_num = 2\nq_den = 1\n").unwrap();
    let out = bin()
        .args(["verify", "--config"])
        .arg(&path)
        .args(["--out"])
        .arg(dir.path().join("reports"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_USAGE));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("q must lie in (0,1)"), "stderr: {stderr}");
}

#[test]
fn config_file_parameters_reach_the_suites() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.cfg");
    std::fs::write(
        &path,
        "q_num = 3\nq_den = 4\nc_num = 1\nc_den = 10\nwindows = 8,16\nsuites = algebra,sphere\n",
    )
    .unwrap();
    let out_dir = dir.path().join("reports");
    let out = bin()
        .args(["verify", "--config"])
        .arg(&path)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(EXIT_PASS),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let names: Vec<String> = {
        let mut v: Vec<String> = std::fs::read_dir(&out_dir)
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .collect();
        v.sort();
        v
    };
    assert_eq!(names, ["algebra.json", "sphere.json"]);
    let sphere = std::fs::read_to_string(out_dir.join("sphere.json")).unwrap();
    assert!(sphere.contains("\"q\": \"3/4\""), "report: {sphere}");
    assert!(sphere.contains("\"c\": \"1/10\""), "report: {sphere}");
    assert!(sphere.contains("\"passed\": true"));
}

#[test]
fn index_prints_the_two_window_certificate() {
    let out = bin()
        .args(["index", "--which", "sphere", "--window", "12"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_PASS));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("window 12:"), "stdout: {stdout}");
    assert!(stdout.contains("window 24:"), "stdout: {stdout}");
    assert!(stdout.contains("index: -1"), "stdout: {stdout}");

    let out = bin()
        .args([
            "index",
            "--which",
            "multiplicity:2",
            "--window",
            "8",
            "--json",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_PASS));
    let doc: serde_json::Value =
        serde_json::from_slice(&out.stdout).expect("index --json emits valid JSON");
    assert_eq!(doc["index"], 2);
    assert_eq!(doc["windows"][1], 16);
}

#[test]
fn spectrum_emits_csv_with_one_row_per_cutoff() {
    let out = bin()
        .args([
            "spectrum", "--lambda", "4,8", "--p", "1,3", "--search", "24",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_PASS));
    let stdout = String::from_utf8_lossy(&out.stdout);
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0], "lambda,levels,count,sum_p1,sum_p3");
    assert!(lines[1].starts_with("4/1,"));
    assert!(lines[2].starts_with("8/1,"));
    // Partial sums grow with the cutoff.
    let last = |line: &str| {
        line.rsplit(',')
            .next()
            .unwrap()
            .parse::<f64>()
            .expect("numeric csv cell")
    };
    assert!(last(lines[2]) > last(lines[1]) - 1e-12);
}

#[test]
fn single_suite_verbs_pass_at_both_parameter_pairs() {
    for (q, c) in [("1/2", "2"), ("3/4", "1/10")] {
        assert_eq!(
            run_from_args(["suq2", "sphere", "--q", q, "--c", c]),
            EXIT_PASS,
            "sphere suite at q = {q}, c = {c}"
        );
    }
    assert_eq!(run_from_args(["suq2", "algebra", "--q", "2/3"]), EXIT_PASS);
}

#[test]
fn certificate_failures_exit_one_and_name_the_identity() {
    // Near q = 1 the scan maxima of n q^{2n} peak far beyond radius 32, so
    // the finite-evidence trend cannot certify boundedness at the default
    // windows. The suite must report that failure, not paper over it.
    let out = bin()
        .args(["sphere", "--q", "99/100", "--c", "2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_CERT_FAIL));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("certificate failed: sphere: commutator ingredients stay bounded"),
        "stderr: {stderr}"
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("[FAIL] suite sphere"), "stdout: {stdout}");
}
