//! End-to-end checks of the `locallaw` binary: eval subcommands, config
//! runs, error reporting, and exit codes.

use std::process::Command;

fn run(args: &[&str]) -> (String, String, Option<i32>) {
    let out = Command::new(env!("CARGO_BIN_EXE_locallaw"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        String::from_utf8_lossy(&out.stdout).to_string(),
        String::from_utf8_lossy(&out.stderr).to_string(),
        out.status.code(),
    )
}

#[test]
fn eval_mp_near_two() {
    let (stdout, _, code) = run(&["eval", "mp", "--phi", "1", "--z", "2+1e-9i"]);
    assert_eq!(code, Some(0));
    // m_1(2) = (-1 + i)/2
    assert!(stdout.contains("-4.99999999"), "{stdout}");
    assert!(stdout.contains("5.000000000"), "{stdout}");
}

#[test]
fn eval_gamma_at_the_edge() {
    let (stdout, _, code) = run(&["eval", "gamma", "--phi", "1", "--n", "10", "--alpha", "10"]);
    assert_eq!(code, Some(0));
    assert!(stdout.contains("gamma_10 = 0.000000000000000e0"), "{stdout}");
}

#[test]
fn eval_psi_matches_library() {
    let (stdout, _, code) = run(&["eval", "psi", "--phi", "1", "--n", "100", "--z", "2+1i"]);
    assert_eq!(code, Some(0));
    let aspect = locallaw::laws::AspectRatio::new(100, 100).unwrap();
    let z = locallaw::laws::SpectralPoint::new(2.0, 1.0).unwrap();
    let psi = locallaw::laws::control_psi(&z, &aspect, 100).unwrap();
    let printed: f64 = stdout
        .trim()
        .rsplit(' ')
        .next()
        .unwrap()
        .parse()
        .expect("parses the printed value");
    assert!((printed - psi).abs() < 1e-12 * psi);
}

#[test]
fn eval_domain_violation_exits_nonzero() {
    let (_, stderr, code) = run(&["eval", "mp", "--phi", "1", "--z", "2"]);
    assert_eq!(code, Some(1));
    assert!(stderr.contains("inside the spectrum"), "{stderr}");
}

#[test]
fn run_help_documents_the_config_key_flags() {
    let (stdout, _, code) = run(&["run", "--help"]);
    assert_eq!(code, Some(0));
    // every override flag names its config key
    for (flag, key) in [
        ("--config", "config"),
        ("--out", "out"),
        ("--seed", "seed"),
        ("--jobs", "jobs"),
        ("--experiment", "experiment"),
    ] {
        assert!(stdout.contains(flag), "missing {flag} in help:\n{stdout}");
        assert!(stdout.contains(key), "missing key {key} in help:\n{stdout}");
    }
    assert!(stdout.contains("LOCALLAW_JOBS"), "{stdout}");
}

#[test]
fn run_rejects_unknown_experiment_with_valid_ids() {
    let dir = std::env::temp_dir().join("locallaw-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let config = dir.join("bad.config");
    std::fs::write(&config, "experiment = nonsense\n").unwrap();
    let (_, stderr, code) = run(&["run", "--config", config.to_str().unwrap()]);
    assert_eq!(code, Some(2));
    assert!(stderr.contains("isotropic") && stderr.contains("rigidity"), "{stderr}");
}

#[test]
fn run_smoke_config_writes_reports() {
    let dir = std::env::temp_dir().join("locallaw-cli-smoke");
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    let config = dir.join("smoke.config");
    std::fs::write(
        &config,
        "experiment = stability\nn = 64\ntrials = 5\neta = 0.2\nlattice_spacing = 0.1\n",
    )
    .unwrap();
    let (stdout, _, code) = run(&[
        "run",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
        "--seed",
        "9",
    ]);
    assert_eq!(code, Some(0), "{stdout}");
    assert!(stdout.contains("PASS"), "{stdout}");
    assert!(dir.join("stability.csv").exists());
    assert!(dir.join("stability.json").exists());
}
