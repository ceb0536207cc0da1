//! The command-line binary, end to end.

use std::process::Command;

fn nqs_overlap(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_nqs-overlap"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

const SMALL: &[&str] = &["--length", "6", "--samples", "256", "--reps", "4", "--pairs", "3"];

#[test]
fn every_subcommand_is_listed() {
    let (code, out, _) = nqs_overlap(&["--help"]);
    assert_eq!(code, 0);
    for sub in ["variance", "bounds", "scaling", "size", "plan", "exact"] {
        assert!(out.contains(sub), "{sub} missing from help");
    }
}

#[test]
fn plan_reports_the_bounds_as_json() {
    let (code, out, _) = nqs_overlap(&["plan", "--fidelity", "0.5", "--samples", "65536", "--delta", "0.32"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let eps = v["epsilon_prime"].as_f64().unwrap();
    assert!((eps - 6.9054e-3).abs() < 1e-6, "{v}");
}

#[test]
fn experiments_write_csv_and_json() {
    for sub in ["variance", "bounds"] {
        let mut args = vec![sub, "--format", "csv"];
        args.extend_from_slice(SMALL);
        let (code, out, err) = nqs_overlap(&args);
        assert_eq!(code, 0, "{err}");
        assert!(out.lines().next().unwrap().starts_with("bin_lower,"), "{out}");
    }
    let mut args = vec!["scaling", "--n-grid", "64,256"];
    args.extend_from_slice(SMALL);
    let (code, out, err) = nqs_overlap(&args);
    assert_eq!(code, 0, "{err}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["result"]["scaling"]["rows"].as_array().unwrap().len(), 2);
}

#[test]
fn size_runs_over_the_length_grid() {
    let mut args = vec!["size", "--length-grid", "4,6", "--ansatz", "arnn", "--format", "csv"];
    args.extend_from_slice(SMALL);
    let (code, out, err) = nqs_overlap(&args);
    assert_eq!(code, 0, "{err}");
    assert_eq!(out.lines().count(), 3, "{out}");
}

#[test]
fn same_seed_same_bytes() {
    let mut args = vec!["bounds", "--seed", "5", "--ansatz", "rbm"];
    args.extend_from_slice(SMALL);
    let (a, b) = (nqs_overlap(&args), nqs_overlap(&args));
    assert_eq!(a.0, 0);
    assert_eq!(a.1, b.1);
    args[2] = "6";
    assert_ne!(nqs_overlap(&args).1, a.1);
}

#[test]
fn exact_compares_one_estimate_with_the_oracle() {
    let (code, out, err) = nqs_overlap(&["exact", "--ansatz", "rbm", "--length", "6", "--samples", "2048"]);
    assert_eq!(code, 0, "{err}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(v["oracle_fidelity"].as_f64().is_some(), "{v}");
}

#[test]
fn bad_input_exits_nonzero_with_a_message() {
    let (code, _, err) = nqs_overlap(&["plan", "--fidelity", "1.5"]);
    assert_eq!(code, 1);
    assert!(err.starts_with("error:"), "{err}");
    let (code, _, _) = nqs_overlap(&["frobnicate"]);
    assert_eq!(code, 1);
    let (code, _, err) = nqs_overlap(&["plan", "--out", "/nonexistent-dir/x.json"]);
    assert_eq!(code, 2, "{err}");
}
