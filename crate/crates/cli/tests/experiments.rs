//! The bundled experiments run end to end through the library.

use resonance_cli::load_config;
use resonance_cli::pipeline::{run_experiment, RunOptions, Stage, EXIT_OK};

fn run(name: &str) -> resonance_cli::pipeline::Outcome {
    let cfg = load_config(name).unwrap();
    run_experiment(&cfg, Stage::Run, &RunOptions::default()).unwrap()
}

#[test]
fn heat_k2_ll1_is_case_i() {
    let out = run("heat_k2_ll1");
    assert_eq!(out.exit_code, EXIT_OK, "{:?}", out.report.failures);
    let c = out.report.criterion.unwrap();
    assert_eq!((c.case.as_str(), c.h_k.as_str(), c.h_0.as_str()), ("i", "Sigma^2", "Sigma^1"));
    assert_eq!(c.existence, "EXISTS");
    assert!(out.report.orbit.unwrap().orbit_witnesses >= 1);
}

#[test]
fn heat_k2_sr2_is_case_iv() {
    let out = run("heat_k2_sr2");
    assert_eq!(out.exit_code, EXIT_OK);
    let c = out.report.criterion.unwrap();
    assert_eq!((c.case.as_str(), c.h_k.as_str(), c.h_0.as_str()), ("iv", "Sigma^1", "Sigma^0"));
    assert_eq!(c.existence, "EXISTS");
    assert!(c.provenance.starts_with("SR2"));
}

#[test]
fn heat_k2_arctan_is_inconclusive() {
    let out = run("heat_k2_arctan");
    assert_eq!(out.exit_code, EXIT_OK);
    let c = out.report.criterion.unwrap();
    assert_eq!(c.existence, "INCONCLUSIVE");
    assert_eq!(c.failed_hypothesis.as_deref(), Some("lambda_l != lambda"));
}

#[test]
fn counterexample_drifts() {
    let out = run("counterexample_k2");
    assert_eq!(out.exit_code, EXIT_OK);
    let d = out.report.drift.unwrap();
    assert_eq!(d.demonstration, "NO-ORBIT");
    assert!((d.slope - 1.0).abs() <= 1e-6);
    assert_eq!(d.exited, d.n_starts);
    assert!(!out.report.hypotheses.e4_holds);
}
