//! Acceptance suite for the command-line contract: config round-trip, exact
//! CSV schema, exit codes, and SVG determinism. Runs the real binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use hotelling_cli::{parse_config, serialize_config};

fn hotelling(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hotelling"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn benchmark_config(dir: &Path, formats: &str) -> String {
    format!(
        r#"{{
  "scenario": {{
    "revenue": {{"kind": "price_taker", "p0": 2}},
    "cost": {{"kind": "quadratic", "c": 1, "d": 1}},
    "rho": 1,
    "stock": 0.36787944117144233
  }},
  "grid": {{"points": 101}},
  "output": {{"formats": [{formats}], "dir": {:?}}}
}}"#,
        dir.to_str().unwrap()
    )
}

#[test]
fn criterion_6_cli_contract() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();

    // Config round-trip: parse -> serialize -> parse is the identity.
    let config_text = benchmark_config(root, "\"csv\", \"json\", \"svg\"");
    let parsed = parse_config(&config_text).unwrap();
    let reparsed = parse_config(&serialize_config(&parsed)).unwrap();
    assert_eq!(parsed, reparsed, "config round-trip must be the identity");

    let config_path = root.join("benchmark.json");
    fs::write(&config_path, &config_text).unwrap();

    // Exit 0 on the happy path; outputs written.
    let out = hotelling(&["solve", "benchmark.json"], root);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));

    // Exact CSV header and shape.
    let csv = fs::read_to_string(root.join("benchmark_path.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,q,cumulative,marginal_profit,shadow_value",
        "CSV header is bit-exact"
    );
    assert_eq!(csv.lines().count(), 102, "one row per grid point plus header");

    // Exit 2 on an unknown key, named on stderr with the ERROR prefix.
    let broken = config_text.replacen("\"scenario\"", "\"scenari\"", 1);
    fs::write(root.join("broken.json"), &broken).unwrap();
    let out = hotelling(&["solve", "broken.json"], root);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.starts_with("ERROR 2:"), "stderr was: {stderr}");
    assert!(stderr.contains("scenari"));

    // Exit 2 on a validation failure (unbounded drift objective).
    let unbounded = config_text
        .replacen(
            "{\"kind\": \"price_taker\", \"p0\": 2}",
            "{\"kind\": \"drift\", \"p0\": 2, \"g\": 0.2}",
            1,
        )
        .replacen("\"rho\": 1", "\"rho\": 0.1", 1);
    fs::write(root.join("unbounded.json"), &unbounded).unwrap();
    let out = hotelling(&["solve", "unbounded.json"], root);
    assert_eq!(out.status.code(), Some(2));

    // Exit 0 on a passing oracle check, deviation printed.
    let out = hotelling(
        &["oracle-check", "benchmark.json", "--bins", "2000", "--horizon", "2"],
        root,
    );
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("sup_rate_deviation="), "stdout was: {stdout}");

    // Exit 3 on a solver-level failure (infeasible transcription horizon).
    let out = hotelling(
        &["oracle-check", "benchmark.json", "--bins", "50", "--horizon", "0.05"],
        root,
    );
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("ERROR 3:"));

    // Exit 4 when the transcription is too coarse to agree.
    let out = hotelling(
        &["oracle-check", "benchmark.json", "--bins", "2", "--horizon", "2"],
        root,
    );
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("ERROR 4:"));

    // Byte-identical SVG across repeated runs.
    let first = fs::read(root.join("benchmark_path.svg")).unwrap();
    let out = hotelling(&["solve", "benchmark.json"], root);
    assert_eq!(out.status.code(), Some(0));
    let second = fs::read(root.join("benchmark_path.svg")).unwrap();
    assert_eq!(first, second, "SVG output must be byte-identical across runs");

    println!("criterion 6: PASS — round-trip, CSV schema, exit codes 0/2/3/4, SVG determinism");
}
