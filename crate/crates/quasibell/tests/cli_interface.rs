//! Black-box tests of the command-line interface: output formats, exit
//! codes, config layering, and run-to-run determinism.

use std::path::Path;
use std::process::{Command, Output};

use quasibell::cli::SWEEP_HEADER;
use quasibell::oracle::{oracle_reduced, OracleConfig};
use quasibell::quasi_bell::{make_channel, StateIndex};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quasibell"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(output: &Output) -> &str {
    std::str::from_utf8(&output.stdout).expect("stdout is UTF-8")
}

fn json_of(output: &Output) -> serde_json::Value {
    serde_json::from_str(stdout_of(output)).expect("stdout is JSON")
}

fn code(output: &Output) -> i32 {
    output.status.code().expect("no signal")
}

#[test]
fn metrics_json_round_trips_and_orders_keys() {
    let out = run(&["metrics", "--alpha", "0.8", "--beta", "0.8"]);
    assert_eq!(code(&out), 0);
    let text = stdout_of(&out);
    let value: serde_json::Value = serde_json::from_str(text).unwrap();
    let replayed = serde_json::to_string_pretty(&value).unwrap() + "\n";
    assert_eq!(text, replayed, "JSON output must be serialization-stable");
    assert_eq!(value["gram"]["g24"], 0.0);
    assert!(value["gram"]["g13"].as_f64().unwrap() > 0.0);
}

#[test]
fn metrics_entropy_matches_the_oracle() {
    let out = run(&["metrics", "--alpha", "0.5", "--beta", "1.0"]);
    assert_eq!(code(&out), 0);
    let value = json_of(&out);
    let spec = make_channel(0.5.into(), 1.0.into());
    let config = OracleConfig::recommended(&spec);
    for state in value["states"].as_array().unwrap() {
        let index = state["index"].as_u64().unwrap() as u8;
        let printed = state["entropy_bits"].as_f64().unwrap();
        let oracle = oracle_reduced(StateIndex::from_u8(index).unwrap(), &spec, &config)
            .unwrap()
            .entropy_bits();
        assert!(
            (printed - oracle).abs() <= 1e-9,
            "entropy of state {index}: printed {printed}, oracle {oracle}"
        );
    }
}

#[test]
fn degenerate_metrics_report_per_state_errors_and_exit_two() {
    let out = run(&["metrics", "--alpha", "0", "--beta", "0"]);
    assert_eq!(code(&out), 2);
    let value = json_of(&out);
    assert_eq!(value["gram"]["g24"], serde_json::Value::Null);
    let states = value["states"].as_array().unwrap();
    for (index, expect_error) in [(1, false), (2, true), (3, false), (4, true)] {
        let state = states
            .iter()
            .find(|s| s["index"] == index)
            .expect("all four states are listed");
        assert_eq!(
            state["error"]["code"].is_string(),
            expect_error,
            "state {index}"
        );
        if expect_error {
            assert_eq!(state["error"]["code"], "degenerate_state");
        }
    }
}

#[test]
fn teleport_reports_the_half_overlap_benchmark() {
    let label = format!("{:.17}", (0.5f64 * std::f64::consts::LN_2).sqrt());
    let out = run(&["teleport", "--alpha", &label, "--beta", &label]);
    assert_eq!(code(&out), 0);
    let value = json_of(&out);
    assert!((value["fidelity"].as_f64().unwrap() - 0.85).abs() < 1e-12);
    assert!((value["masfi"].as_f64().unwrap() - 0.75).abs() < 1e-12);
    let p = value["outcomes"][0]["probability"].as_f64().unwrap();
    assert!((p - 0.35).abs() < 1e-12);
}

#[test]
fn teleport_formal_limit_reaches_the_endpoint() {
    let out = run(&[
        "teleport",
        "--formal-limit",
        "--theta",
        "0.7853981633974483",
        "--theta-prime",
        "same",
    ]);
    assert_eq!(code(&out), 0);
    let value = json_of(&out);
    assert_eq!(value["fidelity"], 1.0);
    assert_eq!(value["masfi"], 0.0);
    assert_eq!(value["formal_limit"], true);

    // without the flag the basis is refused
    let refused = run(&["teleport", "--theta", "0.7853981633974483"]);
    assert_eq!(code(&refused), 2);
    assert_eq!(json_of(&refused)["error"]["code"], "basis_undefined");
}

#[test]
fn teleport_parameterizations_are_mutually_exclusive() {
    let both = run(&["teleport", "--theta", "0.3", "--alpha", "0.5", "--beta", "0.5"]);
    assert_eq!(code(&both), 2);
    let orphan = run(&["teleport", "--theta-prime", "0.3", "--alpha", "1", "--beta", "1"]);
    assert_eq!(code(&orphan), 2);
    let neither = run(&["teleport"]);
    assert_eq!(code(&neither), 2);
}

#[test]
fn seeded_sampling_is_byte_identical_across_reruns() {
    let args = [
        "teleport", "--alpha", "3", "--beta", "3", "--shots", "100000", "--seed", "7",
    ];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(code(&first), 0);
    assert_eq!(first.stdout, second.stdout, "same seed must be byte-identical");

    let value = json_of(&first);
    let counts = &value["sampling"]["counts"];
    let mut total = 0u64;
    for key in ["phi_plus", "phi_minus", "psi_plus", "psi_minus"] {
        let n = counts[key].as_u64().unwrap();
        total += n;
        // strong labels make all four outcomes equally likely
        let sigma = (100_000f64 * 0.25 * 0.75).sqrt();
        assert!(
            (n as f64 - 25_000.0).abs() <= 3.0 * sigma,
            "{key} count {n} strays past three sigma"
        );
    }
    assert_eq!(total, 100_000);

    let reseeded = run(&[
        "teleport", "--alpha", "3", "--beta", "3", "--shots", "100000", "--seed", "8",
    ]);
    assert_ne!(first.stdout, reseeded.stdout, "a new seed must redraw");
}

#[test]
fn sweep_csv_has_the_frozen_header_and_expected_tail() {
    let out = run(&["sweep", "--start", "0.2", "--stop", "3.0", "--count", "57"]);
    assert_eq!(code(&out), 0);
    let text = stdout_of(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), SWEEP_HEADER.join(","));

    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 57);

    let col = |name: &str| SWEEP_HEADER.iter().position(|&h| h == name).unwrap();
    let fidelity_tail: f64 = rows.last().unwrap()[col("fidelity")].parse().unwrap();
    assert!((fidelity_tail - 1.0).abs() <= 1e-6);

    let masfi: Vec<f64> = rows
        .iter()
        .map(|r| r[col("masfi")].parse().unwrap())
        .collect();
    for pair in masfi.windows(2) {
        assert!(pair[1] > pair[0], "masfi must grow along the diagonal");
    }

    // diagonal sweep keeps both moduli equal
    for row in &rows {
        assert_eq!(row[col("abs_alpha")], row[col("abs_beta")]);
        assert_eq!(row[col("flag")], "");
    }
}

#[test]
fn sweep_parallel_output_is_identical_to_serial() {
    let serial = run(&["sweep", "--start", "0.3", "--stop", "2.0", "--count", "25"]);
    let parallel = run(&[
        "sweep", "--start", "0.3", "--stop", "2.0", "--count", "25", "--parallel",
    ]);
    assert_eq!(code(&serial), 0);
    assert_eq!(code(&parallel), 0);
    assert_eq!(serial.stdout, parallel.stdout);
}

#[test]
fn sweep_degenerate_rows_are_flagged_not_fatal() {
    let out = run(&["sweep", "--start", "0.0", "--stop", "1.0", "--count", "3"]);
    assert_eq!(code(&out), 0);
    let text = stdout_of(&out);
    let first_row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let col = |name: &str| SWEEP_HEADER.iter().position(|&h| h == name).unwrap();
    assert_eq!(first_row[col("flag")], "degenerate");
    assert_eq!(first_row[col("entropy_2")], "");
    let fidelity: f64 = first_row[col("fidelity")].parse().unwrap();
    assert_eq!(fidelity, 1.0);
}

#[test]
fn sweep_rejects_malformed_ranges() {
    assert_eq!(code(&run(&["sweep", "--start", "2", "--stop", "1", "--count", "5"])), 2);
    assert_eq!(code(&run(&["sweep", "--start", "0", "--stop", "1", "--count", "1"])), 2);
    assert_eq!(
        code(&run(&[
            "sweep", "--start", "0", "--stop", "1", "--count", "5", "--alpha", "0.5"
        ])),
        2
    );
}

#[test]
fn landau_reports_constants_and_rejects_the_critical_surface() {
    let out = run(&[
        "landau", "--mass", "1.4", "--e", "1.0", "--B", "0.9", "--theta-nc", "0.3333",
    ]);
    assert_eq!(code(&out), 0);
    let value = json_of(&out);
    let m_star = value["m_star"].as_f64().unwrap();
    assert!((m_star - 1.4 * (1.0 - 0.9 * 0.3333)).abs() < 1e-12);
    let spacing = value["level_spacing"].as_f64().unwrap();
    let levels = value["levels"].as_array().unwrap();
    assert_eq!(levels.len(), 6);
    let e0 = levels[0].as_f64().unwrap();
    let e1 = levels[1].as_f64().unwrap();
    assert!((e1 - e0 - spacing).abs() < 1e-12);

    let critical = run(&["landau", "--e", "1", "--B", "2", "--theta-nc", "0.5"]);
    assert_eq!(code(&critical), 2);
    let record = json_of(&critical);
    assert_eq!(record["error"]["code"], "critical_parameters");
    assert!(record["error"]["message"]
        .as_str()
        .unwrap()
        .contains("effective mass vanishes"));
}

#[test]
fn config_file_layers_under_flags() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("teleport.conf");
    let label = format!("{:.17}", (0.5f64 * std::f64::consts::LN_2).sqrt());
    std::fs::write(&path, format!("alpha={label}\nbeta=2.0\nseed=4\n")).unwrap();
    let conf = path.to_str().unwrap();

    // flag overrides the file's beta; file supplies alpha and seed
    let out = run(&["teleport", "--config", conf, "--beta", &label]);
    assert_eq!(code(&out), 0);
    let value = json_of(&out);
    assert!((value["fidelity"].as_f64().unwrap() - 0.85).abs() < 1e-12);

    // file alone gives a different channel
    let from_file = run(&["teleport", "--config", conf]);
    assert_eq!(code(&from_file), 0);
    let other = json_of(&from_file);
    assert!((other["fidelity"].as_f64().unwrap() - 0.85).abs() > 1e-3);
    assert!((other["abs_beta"].as_f64().unwrap() - 2.0).abs() < 1e-15);

    // unknown keys are refused
    let odd = dir.path().join("odd.conf");
    std::fs::write(&odd, "starts=1\n").unwrap();
    let refused = run(&["teleport", "--config", odd.to_str().unwrap()]);
    assert_eq!(code(&refused), 2);
}

#[test]
fn output_flag_writes_the_file_and_keeps_stdout_quiet() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table.csv");
    let out = run(&[
        "sweep",
        "--start",
        "0.5",
        "--stop",
        "1.5",
        "--count",
        "5",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    assert!(written.starts_with(&SWEEP_HEADER.join(",")));
    assert_eq!(written.lines().count(), 6);
}

#[test]
fn verify_passes_by_default_and_fails_at_absurd_tolerance() {
    let pass = run(&["verify"]);
    assert_eq!(code(&pass), 0);
    assert!(stdout_of(&pass).contains("verification PASSED"));

    let fail = run(&["verify", "--tolerance", "1e-20"]);
    assert_eq!(code(&fail), 1);
    assert!(stdout_of(&fail).contains("verification FAILED"));

    let truncated = run(&["verify", "--cutoff", "12", "--alpha-max", "3"]);
    assert_eq!(code(&truncated), 1);
    assert!(stdout_of(&truncated).contains("truncation insufficient"));
}

#[test]
fn verify_csv_lists_every_check() {
    let out = run(&["verify", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let text = stdout_of(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "name,max_deviation,tolerance,pass");
    let rows: Vec<&str> = lines.collect();
    assert!(rows.len() >= 20);
    for row in rows {
        assert!(row.ends_with(",true"), "row should pass: {row}");
    }
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&run(&["no-such-command"])), 2);
    assert_eq!(code(&run(&["metrics"])), 2);
    assert_eq!(code(&run(&["metrics", "--alpha", "abc", "--beta", "1"])), 2);
    assert_eq!(code(&run(&["teleport", "--alpha", "1", "--beta", "1", "--tolerance", "-1"])), 2);
}

#[test]
fn help_and_version_exit_cleanly() {
    let help = run(&["--help"]);
    assert_eq!(code(&help), 0);
    assert!(stdout_of(&help).contains("verify"));
    let version = run(&["--version"]);
    assert_eq!(code(&version), 0);
}

#[test]
fn complex_labels_are_accepted_end_to_end() {
    let out = run(&["metrics", "--alpha", "0.5+0.3i", "--beta", "1.2i"]);
    assert_eq!(code(&out), 0);
    let value = json_of(&out);
    let expected = (0.5f64 * 0.5 + 0.3 * 0.3).sqrt();
    assert!((value["abs_alpha"].as_f64().unwrap() - expected).abs() < 1e-15);
    assert!((value["abs_beta"].as_f64().unwrap() - 1.2).abs() < 1e-15);
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn json_error_records_respect_the_output_sink() {
    let dir = tempfile::tempdir().unwrap();
    let sink = dir.path().join("error.json");
    let out = run(&[
        "landau",
        "--e",
        "1",
        "--B",
        "2",
        "--theta-nc",
        "0.5",
        "--output",
        path_str(&sink),
    ]);
    assert_eq!(code(&out), 2);
    let written: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&sink).unwrap()).unwrap();
    assert_eq!(written["error"]["code"], "critical_parameters");
}
