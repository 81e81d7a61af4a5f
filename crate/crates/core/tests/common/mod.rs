#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

pub const BIN: &str = env!("CARGO_BIN_EXE_hypermat");

pub fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(BIN)
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

/// Writes the input files used by [`command_matrix`] into `dir`.
pub fn write_fixtures(dir: &Path) {
    let files = [
        ("k3.graph", "3 3\n1 2\n2 3\n1 3\n"),
        ("k4.graph", "4 6\n1 2\n1 3\n1 4\n2 3\n2 4\n3 4\n"),
        ("c5.graph", "5 5\n1 2\n2 3\n3 4\n4 5\n5 1\n"),
        (
            "delta.json",
            r#"{"dims":[2,2,2],"entries":["1","0","0","0","0","0","0","1"]}"#,
        ),
        (
            "w.json",
            r#"{"dims":[2,2,2],"entries":["0","1","1","0","1","0","0","0"]}"#,
        ),
        (
            "float.json",
            r#"{"dims":[2,3,2],"entries":[0.5,-1.0,2.0,0.25,1.5,-0.75,1.0,0.0,-2.0,0.5,0.125,1.0]}"#,
        ),
        (
            "sym.json",
            r#"{"dims":[2,2,2],"entries":[2.0,0.5,0.5,1.0,0.5,1.0,1.0,-1.0]}"#,
        ),
        ("x.json", r#"{"dims":[2,2],"entries":["1","1","0","1"]}"#),
    ];
    for (name, body) in files {
        std::fs::write(dir.join(name), body).unwrap();
    }
}

/// One invocation per subcommand, with the arguments each needs.
pub fn command_matrix() -> Vec<Vec<&'static str>> {
    vec![
        vec!["tensor", "info", "float.json"],
        vec![
            "tensor",
            "mlmul",
            "delta.json",
            "--x",
            "x.json",
            "--y",
            "x.json",
        ],
        vec!["tensor", "norm", "float.json"],
        vec!["spectral", "norm", "float.json"],
        vec!["spectral", "rank1", "float.json"],
        vec!["spectral", "eig", "sym.json", "--variant", "l2"],
        vec!["spectral", "eig", "sym.json", "--variant", "l3"],
        vec!["gadget", "color-encode", "c5.graph"],
        vec!["gadget", "pipeline", "k3.graph", "--search"],
        vec!["gadget", "clique-tensor", "k3.graph", "--ell", "2"],
        vec!["gadget", "tqf", "k3.graph"],
        vec!["gadget", "3qf-run", "--planted", "2"],
        vec!["gadget", "3qf-run", "--definite", "2"],
        vec!["graph", "omega", "c5.graph"],
        vec!["graph", "motzkin", "c5.graph"],
        vec!["hyperdet", "det", "delta.json"],
        vec!["hyperdet", "solve", "w.json"],
        vec!["rank", "bounds", "w.json"],
        vec!["rank", "border-demo"],
        vec!["rank", "rational-demo"],
    ]
}

/// Runs every command three times with a fixed seed; returns the commands
/// whose stdout or exit status differed between runs.
pub fn determinism_failures(dir: &Path) -> Vec<String> {
    command_matrix()
        .into_iter()
        .filter_map(|cmd| {
            let mut args = vec!["--seed", "42", "--format", "machine"];
            args.extend(&cmd);
            let runs: Vec<Output> = (0..3).map(|_| run(dir, &args)).collect();
            let same = runs
                .windows(2)
                .all(|w| w[0].stdout == w[1].stdout && w[0].status == w[1].status);
            (!same || runs[0].stdout.is_empty()).then(|| cmd.join(" "))
        })
        .collect()
}
