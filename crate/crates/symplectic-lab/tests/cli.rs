//! End-to-end exit-code contract of the `symplab` binary:
//! 0 = success, 1 = stage failure, 2 = usage or config error.

use std::process::Command;

fn symplab() -> Command {
    Command::new(env!("CARGO_BIN_EXE_symplab"))
}

fn temp_dir(tag: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("symplab-cli-{}-{tag}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn exit_code_zero_on_success() {
    let dir = temp_dir("ok");
    let config = dir.join("run.cfg");
    std::fs::write(
        &config,
        "model.family = cat\nscan.grid = 8\nentropy.grid = 80\nentropy.n_max = 8\nentropy.eps_list = 0.05\n",
    )
    .unwrap();
    let out = symplab()
        .args(["compare", "--config"])
        .arg(&config)
        .arg("--out-dir")
        .arg(dir.join("runs"))
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("S_lower"));

    // Cached rerun also succeeds and says so.
    let again = symplab()
        .args(["compare", "--config"])
        .arg(&config)
        .arg("--out-dir")
        .arg(dir.join("runs"))
        .output()
        .unwrap();
    assert!(again.status.success());
    assert!(String::from_utf8_lossy(&again.stdout).contains("cache"));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn exit_code_two_on_usage_and_config_errors() {
    // Unknown subcommand: clap usage error.
    let out = symplab().arg("frobnicate").output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    // Unknown flag.
    let out = symplab().args(["models", "--bogus"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    // Config validation error: entropy fit needs at least 3 points.
    let dir = temp_dir("cfg");
    let config = dir.join("bad.cfg");
    std::fs::write(&config, "model.family = cat\nentropy.n_max = 2\n").unwrap();
    let out = symplab()
        .args(["compare", "--config"])
        .arg(&config)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    // Same contract straight from the entropy subcommand.
    let out = symplab()
        .args(["entropy", "--model", "cat", "--n-max", "2", "--grid", "40"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn exit_code_one_on_stage_failure() {
    // A torus-automorphism matrix that is integer but not symplectic makes
    // the model constructor fail inside the run.
    let out = symplab()
        .args([
            "scan",
            "--model",
            "torus",
            "--matrix",
            "2 0; 0 1",
            "--max-period",
            "1",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn mix_demo_prints_gap_table() {
    let out = symplab()
        .args(["mix-demo", "--epsilon", "0.3", "--budget", "2000"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("gap"));
    assert!(stdout.contains("reached gap"));
}

#[test]
fn snake_demo_writes_certificate() {
    let dir = temp_dir("snake");
    let cert_path = dir.join("cert.json");
    let out = symplab()
        .args([
            "snake-demo",
            "--frequencies",
            "3",
            "--estimator-grid",
            "60",
            "--out",
        ])
        .arg(&cert_path)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let cert: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&cert_path).unwrap()).unwrap();
    assert_eq!(cert["frequency"], 3);
    assert_eq!(cert["components"].as_array().unwrap().len(), 3);
    let _ = std::fs::remove_dir_all(&dir);
}
