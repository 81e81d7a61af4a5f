mod common;

use common::{run, write_fixtures};

fn fixtures() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    write_fixtures(dir.path());
    dir
}

fn stdout(out: &std::process::Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn field<'a>(text: &'a str, key: &str) -> Option<&'a str> {
    text.lines()
        .find_map(|l| l.strip_prefix(key)?.strip_prefix('='))
}

#[test]
fn machine_output_is_byte_stable() {
    let dir = fixtures();
    let failures = common::determinism_failures(dir.path());
    assert!(failures.is_empty(), "unstable: {failures:?}");
}

#[test]
fn clique_tensor_then_spectral_norm() {
    let dir = fixtures();
    let gen = run(
        dir.path(),
        &[
            "gadget",
            "clique-tensor",
            "k3.graph",
            "--ell",
            "2",
            "--out",
            "a2.json",
        ],
    );
    assert_eq!(gen.status.code(), Some(0));
    let out = run(
        dir.path(),
        &["--format", "machine", "spectral", "norm", "a2.json"],
    );
    assert_eq!(out.status.code(), Some(0));
    let sigma: f64 = field(&stdout(&out), "sigma").unwrap().parse().unwrap();
    assert!((sigma - (7.0f64 / 6.0).sqrt()).abs() < 1e-6);
}

#[test]
fn motzkin_on_c5() {
    let dir = fixtures();
    let out = run(
        dir.path(),
        &["--format", "machine", "graph", "motzkin", "c5.graph"],
    );
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("=1/4\n"), "{text}");
    assert_eq!(field(&text, "omega"), Some("2"));
}

#[test]
fn hyperdet_exit_codes() {
    let dir = fixtures();
    let det = run(
        dir.path(),
        &["--format", "machine", "hyperdet", "det", "delta.json"],
    );
    assert_eq!(det.status.code(), Some(0));
    assert_eq!(field(&stdout(&det), "det"), Some("1"));
    // delta has nonzero determinant, so no witness
    let solve = run(dir.path(), &["hyperdet", "solve", "delta.json"]);
    assert_eq!(solve.status.code(), Some(1));
    let solve = run(dir.path(), &["hyperdet", "solve", "w.json"]);
    assert_eq!(solve.status.code(), Some(0));
}

#[test]
fn decision_exit_codes() {
    let dir = fixtures();
    let yes = run(dir.path(), &["gadget", "pipeline", "k3.graph"]);
    assert_eq!(yes.status.code(), Some(0));
    let no = run(dir.path(), &["gadget", "pipeline", "k4.graph"]);
    assert_eq!(no.status.code(), Some(1));
    let infeasible = run(dir.path(), &["gadget", "3qf-run", "--definite", "2"]);
    assert_eq!(infeasible.status.code(), Some(1));
    let feasible = run(dir.path(), &["gadget", "3qf-run", "--planted", "2"]);
    assert_eq!(feasible.status.code(), Some(0));
}

#[test]
fn usage_and_io_errors_exit_two() {
    let dir = fixtures();
    assert_eq!(run(dir.path(), &["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        run(dir.path(), &["tensor", "info", "missing.json"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(dir.path(), &["--help"]).status.code(), Some(0));
}

#[test]
fn parse_errors_report_line_and_column() {
    let dir = fixtures();
    std::fs::write(dir.path().join("bad.graph"), "3 2\n1 2\n2 x\n").unwrap();
    let out = run(dir.path(), &["graph", "omega", "bad.graph"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3, column 3"), "{err}");

    std::fs::write(
        dir.path().join("bad.json"),
        "{\"dims\":[1,1,1],\n\"entries\":[\"1/0\"]}",
    )
    .unwrap();
    let out = run(dir.path(), &["tensor", "info", "bad.json"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn machine_report_header() {
    let dir = fixtures();
    let out = run(
        dir.path(),
        &[
            "--seed",
            "7",
            "--format",
            "machine",
            "tensor",
            "norm",
            "float.json",
        ],
    );
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("command=tensor norm"));
    assert_eq!(
        lines.next().map(|l| l.starts_with("input_sha256=")),
        Some(true)
    );
    assert_eq!(lines.next(), Some("seed=7"));
    assert!(text.lines().all(|l| l.contains('=')));
    assert!(!text.contains("wall_time"));

    let out = run(
        dir.path(),
        &[
            "--format",
            "machine",
            "gadget",
            "clique-tensor",
            "k3.graph",
            "--ell",
            "1",
        ],
    );
    let text = stdout(&out);
    assert!(text.lines().all(|l| l.contains('=')), "{text}");
    assert!(field(&text, "tensor")
        .unwrap()
        .starts_with("{\"dims\":[3,3,7]"));
}

#[test]
fn out_flag_writes_report() {
    let dir = fixtures();
    let out = run(
        dir.path(),
        &[
            "--format",
            "machine",
            "--out",
            "report.txt",
            "graph",
            "omega",
            "k3.graph",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    let report = std::fs::read_to_string(dir.path().join("report.txt")).unwrap();
    assert!(report.starts_with("command=graph omega\n"));
}
