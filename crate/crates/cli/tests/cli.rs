use std::path::Path;
use std::process::{Command, Output};

use resonance_cli::report::Report;

fn resonance(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_resonance"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap()
}

const HEADER: &str = "[experiment]\nname = \"t\"\n\n[operator]\nn_modes = 8\nlength = \"pi\"\nk = 2\n\n";

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("t.toml");
    std::fs::write(&path, format!("{HEADER}{body}")).unwrap();
    path.display().to_string()
}

#[test]
fn list_names_builtins_and_experiments() {
    let dir = tempfile::tempdir().unwrap();
    let a = resonance(&["list"], dir.path());
    let b = resonance(&["list"], dir.path());
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    for name in ["arctan", "strong_res", "const_kernel", "heat_k2_ll1", "counterexample_k2"] {
        assert!(text.contains(name), "{name}");
    }
}

#[test]
fn config_errors_exit_2_with_a_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[nonlinearity]\nname = \"arctan\"\n\n[constants]\nalpha = 0.2\n");
    let out = resonance(&["check", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("t.toml:13:"), "{err}");

    let cfg = write_config(dir.path(), "[nonlinearity]\nname = \"nosuch\"\n");
    let out = resonance(&["check", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("t.toml:10:"));

    let out = resonance(&["run", "does_not_exist.toml"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unbounded_source_exits_3_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[nonlinearity]\nname = \"linear\"\n");
    let out = resonance(&["run", &cfg, "--out", "o", "--no-timestamp"], dir.path());
    assert_eq!(out.status.code(), Some(3));
    let report = Report::from_toml(&std::fs::read_to_string(dir.path().join("o/report.toml")).unwrap()).unwrap();
    assert!(!report.hypotheses.e2_holds);
    assert_eq!(report.hypotheses.e2_witness.as_ref().map(Vec::len), Some(3));
    assert!(String::from_utf8(out.stdout).unwrap().contains("e2_holds = false"));
}

#[test]
fn missing_sign_condition_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[nonlinearity]\nname = \"zero\"\n\n[checks]\nradius_cap = 100.0\n");
    let out = resonance(&["check", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn tabulated_source_from_csv() {
    let dir = tempfile::tempdir().unwrap();
    let mut table = String::from("x,s,f\n");
    for x in [0.0, std::f64::consts::PI] {
        for i in -400..=400 {
            let s = i as f64 * 0.25;
            table.push_str(&format!("{x},{s},{}\n", s.atan()));
        }
    }
    std::fs::write(dir.path().join("tab.csv"), table).unwrap();
    let cfg = write_config(dir.path(), "[nonlinearity]\nname = \"tabulated\"\ntable = \"tab.csv\"\n");
    let out = resonance(&["check", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = Report::from_toml(&String::from_utf8(out.stdout).unwrap()).unwrap();
    let ll = report.verdicts.iter().find(|v| v.check == "LL").unwrap();
    assert_eq!(ll.condition, "LL1");
    assert_eq!(report.neighborhood.unwrap().condition, "G1");
}

#[test]
fn reports_are_deterministic_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for out in ["a", "b"] {
        let o = resonance(&["run", "heat_k2_sr2", "--out", out, "--no-timestamp"], dir.path());
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let a = std::fs::read(dir.path().join("a/report.toml")).unwrap();
    let b = std::fs::read(dir.path().join("b/report.toml")).unwrap();
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    let report = Report::from_toml(&text).unwrap();
    assert_eq!(report.to_toml().unwrap(), text);
    for field in ["condition", "holds", "R1", "R_P", "h_K", "h_0", "case", "existence", "orbit_witnesses"] {
        assert!(text.contains(&format!("{field} = ")), "{field}");
    }
    assert!(dir.path().join("a/plot.gp").exists());
    let csv = std::fs::read_to_string(dir.path().join("a/start_0.csv")).unwrap();
    assert!(csv.starts_with("t,c_1,"));

    let o = resonance(&["run", "heat_k2_sr2", "--out", "c", "--no-timestamp", "--seed", "99"], dir.path());
    assert!(o.status.success());
    let c = Report::from_toml(&std::fs::read_to_string(dir.path().join("c/report.toml")).unwrap()).unwrap();
    assert_eq!(c.experiment.seed, 99);

    let o = resonance(&["run", "heat_k2_sr2", "--out", "d"], dir.path());
    assert!(o.status.success());
    let d = Report::from_toml(&std::fs::read_to_string(dir.path().join("d/report.toml")).unwrap()).unwrap();
    assert!(d.experiment.timestamp.is_some());
}

#[test]
fn orbit_subcommand_skips_the_criterion() {
    let dir = tempfile::tempdir().unwrap();
    let out = resonance(&["orbit", "heat_k2_sr2"], dir.path());
    assert!(out.status.success());
    let report = Report::from_toml(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert!(report.criterion.is_none());
    assert!(report.orbit.unwrap().orbit_witnesses >= 1);
}
