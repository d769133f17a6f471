use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bellcast(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bellcast"))
        .args(args)
        .env_remove("BELLCAST_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn summary(o: &Output) -> serde_json::Value {
    serde_json::from_str(stdout(o).trim()).expect("one JSON object")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn verify_observables_gate_passes() {
    let o = bellcast(&["verify-observables"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.contains("PsiMinus"));
    assert_eq!(text.matches("] = 0").count(), 6);
}

#[test]
fn identical_runs_write_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.jsonl"), dir.path().join("b.jsonl"));
    for out in [&a, &b] {
        let o = bellcast(&["run-photon", "--trials", "500", "--eta-abs", "0.9", "--eta-det", "0.7", "--output", path(out)]);
        assert!(o.status.success());
    }
    let (x, y) = (fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(x.iter().filter(|&&c| c == b'\n').count(), 500);
    assert_eq!(x, y);
}

#[test]
fn summarize_reproduces_the_run_summary() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("spin.jsonl");
    let run = bellcast(&["run-spin", "--trials", "300", "--seed", "9", "--output", path(&file)]);
    assert!(run.status.success());
    let again = bellcast(&["summarize", "--mode", "spin", path(&file)]);
    assert!(again.status.success());
    let (mut x, mut y) = (summary(&run), summary(&again));
    x["duration_secs"] = 0.into();
    y["duration_secs"] = 0.into();
    assert_eq!(x, y);
    assert_eq!(x["trials"], 300);
    assert_eq!(x["min_fidelity"], 1.0);
}

#[test]
fn env_seed_overrides_config_and_flag_overrides_env() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "mode=spin\ntrials=3\nseed=1\n").unwrap();
    let first_seed = |extra: &[&str], env: Option<&str>| {
        let out = dir.path().join("o.jsonl");
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_bellcast"));
        cmd.args(["run-spin", "--config", path(&cfg), "--output", path(&out)]).args(extra);
        match env {
            Some(v) => cmd.env("BELLCAST_SEED", v),
            None => cmd.env_remove("BELLCAST_SEED"),
        };
        assert!(cmd.output().unwrap().status.success());
        let line = fs::read_to_string(&out).unwrap();
        let rec: serde_json::Value = serde_json::from_str(line.lines().next().unwrap()).unwrap();
        rec["seed"].as_u64().unwrap()
    };
    let from_file = first_seed(&[], None);
    let from_env = first_seed(&[], Some("2"));
    let from_flag = first_seed(&["--seed", "3"], Some("2"));
    assert_eq!(from_file, bellcast::harness::trial_seed(1, 0));
    assert_eq!(from_env, bellcast::harness::trial_seed(2, 0));
    assert_eq!(from_flag, bellcast::harness::trial_seed(3, 0));
}

#[test]
fn bad_config_fails_with_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "mode=photon\neta_det=1.7\n").unwrap();
    let o = bellcast(&["run-photon", "--config", path(&cfg)]);
    assert!(!o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 2") && err.contains("eta_det"), "{err}");

    let o = bellcast(&["run-spin", "--config", path(&cfg)]);
    assert!(!o.status.success());
}

#[test]
fn mode_mismatch_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("swap.cfg");
    fs::write(&cfg, "mode=swap\n").unwrap();
    let o = bellcast(&["run-spin", "--config", path(&cfg)]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("mode"));
}

#[test]
fn sweep_and_csv_outputs() {
    let o = bellcast(&["sweep-efficiency", "--param", "eta_det", "--from", "0.5", "--to", "1.0", "--steps", "11"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 12);
    assert_eq!(lines[0], "eta_det,D1,D2,D4,D3C,D3ST,D3SL,NONE");
    assert_eq!(lines[5], "0.7,0.175,0.175,0.175,0.175,0,0,0.3");

    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("b.csv");
    let o = bellcast(&["run-baseline", "--trials", "400", "--input", "fixed:0.6,0.8", "--csv", path(&csv)]);
    assert!(o.status.success());
    let csv = fs::read_to_string(&csv).unwrap();
    assert!(csv.starts_with("outcome,count,frequency,expected\nPsiMinus,"));
    assert_eq!(csv.lines().count(), 6);
}

#[test]
fn every_run_subcommand_succeeds() {
    for sub in ["run-spin", "run-photon", "run-baseline", "run-swap"] {
        let o = bellcast(&[sub, "--trials", "200"]);
        assert!(o.status.success(), "{sub}: {}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(summary(&o)["trials"], 200);
    }
}
