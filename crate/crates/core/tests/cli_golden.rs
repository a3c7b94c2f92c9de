use std::process::Command;
use trajquad::cli::{render, run, RunConfig};

fn golden(cfg: &str, file: &str) {
    let cfg = RunConfig::from_json(cfg).unwrap();
    let got = render(&cfg, &run(&cfg).unwrap());
    let path = format!("{}/tests/golden/{file}", env!("CARGO_MANIFEST_DIR"));
    let want = std::fs::read_to_string(path).unwrap();
    assert_eq!(got, want, "{file} drifted");
}

#[test]
fn stark_golden() {
    golden(r#"{"command":"stark","order":12}"#, "stark_12.csv");
}

#[test]
fn coulomb_golden() {
    golden(r#"{"command":"coulomb","potential":"r^2","order":8}"#, "coulomb_r2_8.csv");
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_trajquad"))
}

#[test]
fn binary_matches_golden_and_is_repeatable() {
    let run = || bin().args(["--command", "stark", "--order", "12"]).output().unwrap();
    let (a, b) = (run(), run());
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let path = format!("{}/tests/golden/stark_12.csv", env!("CARGO_MANIFEST_DIR"));
    assert_eq!(String::from_utf8(a.stdout).unwrap(), std::fs::read_to_string(path).unwrap());
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| bin().args(args).output().unwrap().status.code();
    assert_eq!(code(&["--command", "stark", "--potential", "r"]), Some(1));
    assert_eq!(code(&["--no-such-flag"]), Some(1));
    assert_eq!(code(&["--command", "perturb", "--g", "0"]), Some(1));
    // Box too narrow for the ground state: the oracle refuses.
    assert_eq!(code(&["--command", "oracle", "--potential", "1/2*x^2", "--n", "400", "--domain", "-2,2"]), Some(2));
    // Too coarse to resolve S near the origin: C breaks down.
    assert_eq!(code(&["--command", "greens-check", "--n", "151", "--extent", "8"]), Some(2));
    assert_eq!(code(&["--command", "greens-check", "--n", "401", "--extent", "8"]), Some(0));
}

#[test]
fn flags_override_config_file() {
    let dir = std::env::temp_dir().join(format!("trajquad-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.json");
    std::fs::write(&cfg, r#"{"command":"coulomb","potential":"r^2","order":4,"format":"json"}"#).unwrap();
    let out = bin().args(["--config", cfg.to_str().unwrap(), "--order", "8"]).output().unwrap();
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["config"]["order"], 8);
    assert_eq!(doc["version"], trajquad::cli::VERSION);
    assert_eq!(doc["result"]["table"][8]["e_n"], "-129/4 * ε^2");
    std::fs::write(&cfg, r#"{"command":"coulomb","typo":1}"#).unwrap();
    let out = bin().args(["--config", cfg.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}
