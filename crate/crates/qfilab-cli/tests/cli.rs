//! End-to-end checks of the command-line surface: exit codes, output
//! formats, and byte-for-byte determinism.

use std::collections::BTreeMap;
use std::process::Command;

fn qfilab(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_qfilab"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn run_emits_schema_one_json_with_golden_numbers() {
    let out = qfilab(&[
        "run",
        "--scenario",
        "qubit-partial-dephasing",
        "--param",
        "p=0.3",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).expect("valid JSON");
    assert_eq!(v["schema"], 1);
    assert_eq!(v["scenario"], "qubit-partial-dephasing");
    assert!(v["paper_ref"].as_str().unwrap().contains("(1−p)²"));
    let report = &v["fisher_report"];
    let sum = report["sum_ratio"].as_f64().unwrap();
    assert!((sum - 1.0).abs() < 1e-8);
    let bob = report["f_bob_t"].as_f64().unwrap() / report["f_alice_t"].as_f64().unwrap();
    assert!((bob - 0.49).abs() < 1e-9);
    let eve = report["f_eve_eta"].as_f64().unwrap() / report["f_alice_eta"].as_f64().unwrap();
    assert!((eve - 0.51).abs() < 1e-9);
}

#[test]
fn run_ghz_erasure_golden_value() {
    let out = qfilab(&[
        "run",
        "--scenario",
        "ghz-erasure",
        "--param",
        "n=6",
        "--param",
        "p=0.25",
        "--param",
        "omega=2",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let delta = v["values"]["delta_f"].as_f64().unwrap();
    assert!((delta - 36.0).abs() < 1e-5, "ΔF = {delta}");
}

#[test]
fn run_lindblad_matches_closed_form() {
    let out = qfilab(&[
        "run",
        "--scenario",
        "lindblad-z-dephasing",
        "--param",
        "gamma=0.1",
        "--param",
        "omega=1",
        "--param",
        "t0=1",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let f_exact = v["values"]["f_exact"].as_f64().unwrap();
    let closed = v["values"]["f_exact_closed_form"].as_f64().unwrap();
    assert!((f_exact - closed).abs() < 1e-8 * closed);
}

#[test]
fn unknown_scenario_exits_2_and_lists_names() {
    let out = qfilab(&["run", "--scenario", "does-not-exist"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("qubit-partial-dephasing"));
}

#[test]
fn parameter_out_of_range_exits_2() {
    let out = qfilab(&["run", "--scenario", "ghz-erasure", "--param", "n=64"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_csv_matches_dephasing_closed_form_and_is_deterministic() {
    let args = [
        "sweep",
        "--scenario",
        "qubit-partial-dephasing",
        "--sweep",
        "p:0:1:101",
        "--format",
        "csv",
        "--seed",
        "7",
    ];
    let out = qfilab(&args);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let mut lines = text.lines();
    let headers: Vec<&str> = lines.next().unwrap().split(',').collect();
    let p_col = headers.iter().position(|h| *h == "p").unwrap();
    let bob_col = headers.iter().position(|h| *h == "f_bob_t").unwrap();
    let mut rows = 0;
    for line in lines {
        let cells: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        let p = cells[p_col];
        let f_bob = cells[bob_col];
        assert!(
            (f_bob - (1.0 - p) * (1.0 - p)).abs() < 1e-9,
            "p={p}: f_bob={f_bob}"
        );
        rows += 1;
    }
    assert_eq!(rows, 101);
    // Byte-identical on rerun with the same invocation.
    let again = qfilab(&args);
    assert_eq!(out.stdout, again.stdout);
}

#[test]
fn sweep_bitflip_repetition_slope_is_linear() {
    let out = qfilab(&[
        "sweep",
        "--scenario",
        "ad-repetition-bitflip",
        "--sweep",
        "p:1e-3:1e-1:20:log",
        "--param",
        "n=6",
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    let headers: Vec<&str> = lines.next().unwrap().split(',').collect();
    let p_col = headers.iter().position(|h| *h == "p").unwrap();
    let d_col = headers.iter().position(|h| *h == "delta_f").unwrap();
    let sweep: Vec<(f64, f64)> = lines
        .map(|line| {
            let cells: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
            (cells[p_col], cells[d_col])
        })
        .filter(|(p, _)| *p <= 1e-2)
        .collect();
    // Least-squares slope of the loss in log-log coordinates.
    let n = sweep.len() as f64;
    let mx = sweep.iter().map(|(p, _)| p.ln()).sum::<f64>() / n;
    let my = sweep.iter().map(|(_, d)| d.ln()).sum::<f64>() / n;
    let sxx: f64 = sweep.iter().map(|(p, _)| (p.ln() - mx).powi(2)).sum();
    let sxy: f64 = sweep
        .iter()
        .map(|(p, d)| (p.ln() - mx) * (d.ln() - my))
        .sum();
    let slope = sxy / sxx;
    assert!((slope - 1.0).abs() < 0.05, "slope {slope}");
}

#[test]
fn sweep_ising_code_slope_is_quadratic() {
    let out = qfilab(&[
        "sweep",
        "--scenario",
        "ising-code",
        "--sweep",
        "p:1e-3:1e-2:10:log",
        "--param",
        "n=8",
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    let headers: Vec<&str> = lines.next().unwrap().split(',').collect();
    let p_col = headers.iter().position(|h| *h == "p").unwrap();
    let d_col = headers
        .iter()
        .position(|h| *h == "delta_f_exact")
        .unwrap();
    let sweep: Vec<(f64, f64)> = lines
        .map(|line| {
            let cells: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
            (cells[p_col], cells[d_col])
        })
        .collect();
    let n = sweep.len() as f64;
    let mx = sweep.iter().map(|(p, _)| p.ln()).sum::<f64>() / n;
    let my = sweep.iter().map(|(_, d)| d.ln()).sum::<f64>() / n;
    let sxx: f64 = sweep.iter().map(|(p, _)| (p.ln() - mx).powi(2)).sum();
    let sxy: f64 = sweep
        .iter()
        .map(|(p, d)| (p.ln() - mx) * (d.ln() - my))
        .sum();
    let slope = sxy / sxx;
    assert!((slope - 2.0).abs() < 0.1, "slope {slope}");
}

#[test]
fn sweep_rejects_unknown_key() {
    let out = qfilab(&[
        "sweep",
        "--scenario",
        "qubit-partial-dephasing",
        "--sweep",
        "bogus:0:1:5",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_suites_pass_and_report_lines() {
    for suite in ["codes", "lindblad"] {
        let out = qfilab(&["verify", "--suite", suite]);
        assert!(
            out.status.success(),
            "{suite}: {}",
            String::from_utf8_lossy(&out.stdout)
        );
        let text = String::from_utf8_lossy(&out.stdout);
        assert!(text.lines().any(|l| l.starts_with("PASS")));
        assert!(!text.contains("\nFAIL"));
    }
    // JSON form carries one entry per check.
    let out = qfilab(&["verify", "--suite", "lindblad", "--json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["failed"], 0);
    assert!(v["checks"].as_array().unwrap().len() >= 3);
}

#[test]
fn json_report_includes_parameters_and_values() {
    let out = qfilab(&[
        "run",
        "--scenario",
        "four-two-two-erasure",
        "--param",
        "p=0.7",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["params"]["p"], 0.7);
    assert_eq!(v["values"]["zero_loss"], 1.0);
    let params: BTreeMap<String, f64> =
        serde_json::from_value(v["params"].clone()).expect("numeric parameter map");
    assert!(params.contains_key("sx"));
}
