//! End-to-end tests of the `mfpop` binary: exit-code contract, file
//! outputs, the report round trip, and reproducibility.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mfpop_cli::schema::ReportFile;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mfpop"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("mfpop-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn mfpop")
}

#[test]
fn validate_exit_codes() {
    let ok = run(&["validate", fixture("a2_pair.json").to_str().unwrap()]);
    assert!(
        ok.status.success(),
        "{}",
        String::from_utf8_lossy(&ok.stderr)
    );
    let stdout = String::from_utf8_lossy(&ok.stdout);
    assert!(stdout.contains("rank 2"));
    assert!(stdout.contains("tau = [2, 2]"));

    let dir = temp_dir("validate");
    // Domain failure: duplicated marked points -> exit 1.
    let dup = dir.join("dup.json");
    std::fs::write(
        &dup,
        r#"{"cartan": [[2]], "symmetrizer": [1], "points": ["1", "1"], "weights": [[1], [1]]}"#,
    )
    .unwrap();
    let out = run(&["validate", dup.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("DuplicatePoints"));

    // Parse failure: zero denominator -> exit 2.
    let malformed = dir.join("malformed.json");
    std::fs::write(
        &malformed,
        r#"{"cartan": [[2]], "symmetrizer": [1], "points": ["1/0"], "weights": [[1]]}"#,
    )
    .unwrap();
    let out = run(&["validate", malformed.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    // Broken JSON and missing file -> exit 2.
    let broken = dir.join("broken.json");
    std::fs::write(&broken, "{not json").unwrap();
    assert_eq!(
        run(&["validate", broken.to_str().unwrap()]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["validate", dir.join("absent.json").to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );

    // Invalid Cartan matrix -> exit 1.
    let bad = dir.join("bad_cartan.json");
    std::fs::write(
        &bad,
        r#"{"cartan": [[2, -1], [0, 2]], "symmetrizer": [1, 1], "points": ["0"], "weights": [[1, 1]]}"#,
    )
    .unwrap();
    let out = run(&["validate", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("NotGCM"));
}

#[test]
fn explore_writes_report_and_dot() {
    let dir = temp_dir("explore");
    let report_path = dir.join("report.json");
    let dot_path = dir.join("graph.dot");
    let out = run(&[
        "explore",
        fixture("a2_pair.json").to_str().unwrap(),
        "--depth",
        "2",
        "--out",
        report_path.to_str().unwrap(),
        "--dot",
        dot_path.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let report: ReportFile =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    let population = report.population.expect("population section");
    assert_eq!(population.charge, 0);
    assert_eq!(population.mu, Some(vec!["1".to_string(), "-1".to_string()]));
    assert!(population.degree_vectors.contains(&vec![0, 0]));
    assert!(population.degree_vectors.contains(&vec![3, 0]));
    let checks = report.verification.expect("verification section");
    assert!(checks.iter().all(|c| c.status != "fail"), "{checks:?}");

    let dot = std::fs::read_to_string(&dot_path).unwrap();
    assert!(dot.starts_with("digraph population"));
    assert!(dot.contains("(3,0)"));
}

#[test]
fn report_echo_revalidates() {
    let dir = temp_dir("roundtrip");
    let report_path = dir.join("report.json");
    let out = run(&[
        "explore",
        fixture("sl2_single.json").to_str().unwrap(),
        "--depth",
        "1",
        "--out",
        report_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let report: ReportFile =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    let echo_path = dir.join("echo.json");
    std::fs::write(&echo_path, serde_json::to_string(&report.problem).unwrap()).unwrap();
    let out = run(&["validate", echo_path.to_str().unwrap()]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn affine_requires_degree_cap() {
    let out = run(&["explore", fixture("a1_affine.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("degree cap required for affine type"));

    // With an explicit cap the exploration runs; mu is unavailable
    // without a Gram matrix, so the check is inconclusive, not failing.
    let dir = temp_dir("affine");
    let report_path = dir.join("report.json");
    let out = run(&[
        "explore",
        fixture("a1_affine.json").to_str().unwrap(),
        "--depth",
        "1",
        "--max-degree",
        "6",
        "--out",
        report_path.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: ReportFile =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    let checks = report.verification.unwrap();
    let mu_check = checks.iter().find(|c| c.name == "mu_constant").unwrap();
    assert_eq!(mu_check.status, "inconclusive");
    assert!(checks
        .iter()
        .all(|c| c.status == "pass" || c.status == "inconclusive"));
}

#[test]
fn solve_is_seed_reproducible() {
    let dir = temp_dir("solve");
    let a = dir.join("a.json");
    let b = dir.join("b.json");
    for path in [&a, &b] {
        let out = run(&[
            "solve",
            fixture("a2_pair.json").to_str().unwrap(),
            "--k",
            "1,1",
            "--starts",
            "60",
            "--seed",
            "17",
            "--tol",
            "1e-12",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let bytes_a = std::fs::read(&a).unwrap();
    let bytes_b = std::fs::read(&b).unwrap();
    assert_eq!(bytes_a, bytes_b, "same seed must give identical reports");

    let report: ReportFile = serde_json::from_slice(&bytes_a).unwrap();
    assert_eq!(report.seed, Some(17));
    let solver = report.solver.unwrap();
    assert_eq!(solver.runs.len(), 1);
    assert_eq!(solver.runs[0].charge, -10);
    assert_eq!(solver.runs[0].points.len(), 2);
}

#[test]
fn solve_without_seed_records_one() {
    let dir = temp_dir("entropy");
    let path = dir.join("r.json");
    let out = run(&[
        "solve",
        fixture("sl2_single.json").to_str().unwrap(),
        "--k",
        "0",
        "--starts",
        "5",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let report: ReportFile =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(report.seed.is_some(), "entropy seed must be recorded");
    // k = 0: the single empty critical point.
    let solver = report.solver.unwrap();
    assert_eq!(solver.runs[0].points.len(), 1);
    assert!(solver.runs[0].points[0].coords.iter().all(Vec::is_empty));
}

#[test]
fn solve_rejects_bad_degree_vectors() {
    let out = run(&[
        "solve",
        fixture("a2_pair.json").to_str().unwrap(),
        "--k",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(1), "wrong rank is a domain error");
    let out = run(&[
        "solve",
        fixture("a2_pair.json").to_str().unwrap(),
        "--k",
        "x,y",
    ]);
    assert_eq!(
        out.status.code(),
        Some(2),
        "non-numeric entries are parse errors"
    );
}

#[test]
fn crosscheck_without_k_has_no_solver_output() {
    let dir = temp_dir("crossempty");
    let path = dir.join("r.json");
    let out = run(&[
        "crosscheck",
        fixture("sl2_single.json").to_str().unwrap(),
        "--depth",
        "1",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let report: ReportFile =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(report.crosscheck.is_none());
    assert!(report.population.is_some());
}

#[test]
fn start_not_fertile_is_a_domain_error() {
    // Exploration itself cannot fail from the trivial tuple, but a
    // malformed weight (negative pairing) fails validation first.
    let dir = temp_dir("fertility");
    let path = dir.join("neg.json");
    std::fs::write(
        &path,
        r#"{"cartan": [[2]], "symmetrizer": [1], "points": ["0"], "weights": [[-1]]}"#,
    )
    .unwrap();
    let out = run(&["explore", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("NonDominantWeight"));
}
