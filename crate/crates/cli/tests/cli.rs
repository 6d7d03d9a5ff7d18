use std::path::Path;
use std::process::{Command, Output};

fn qedsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qedsim"))
        .args(args)
        .output()
        .unwrap()
}

fn write_config(dir: &Path, extra: &str) -> String {
    let path = dir.join("exp.cfg");
    let text = format!(
        "# small run\ngate_label = SH\nmode = both\nnum_states = 4\nreps_per_state = 5\n\
sigma2 = 2e-6\ncoeff_sigma = 0.02\nn_boot = 200\nseed = 9\nout_dir = {}\n{extra}",
        dir.join("out").display()
    );
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn run_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "");
    let out = qedsim(&["run", "--config", &cfg]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let base = dir.path().join("out");
    let csv = std::fs::read_to_string(base.join("records.csv")).unwrap();
    assert_eq!(
        csv.lines().next().unwrap(),
        "mode,gate,state_index,rep_index,syndrome,leakage,F,f,seed_stream"
    );
    assert_eq!(csv.lines().count(), 41);
    for name in ["summary.json", "dist_encoded.csv", "dist_control.csv"] {
        assert!(base.join(name).is_file(), "{name}");
    }
    let dist = std::fs::read_to_string(base.join("dist_encoded.csv")).unwrap();
    assert!(dist.starts_with('#'));
}

#[test]
fn thread_count_does_not_change_records() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "");
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for (threads, out) in [("1", &a), ("4", &b)] {
        let o = qedsim(&[
            "--threads",
            threads,
            "run",
            "--config",
            &cfg,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
    }
    let x = std::fs::read(a.join("records.csv")).unwrap();
    let y = std::fs::read(b.join("records.csv")).unwrap();
    assert_eq!(x, y);
}

#[test]
fn seed_override_changes_records() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "");
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    qedsim(&["run", "--config", &cfg, "--out", a.to_str().unwrap()]);
    qedsim(&[
        "run",
        "--config",
        &cfg,
        "--seed",
        "10",
        "--out",
        b.to_str().unwrap(),
    ]);
    assert_ne!(
        std::fs::read(a.join("records.csv")).unwrap(),
        std::fs::read(b.join("records.csv")).unwrap()
    );
}

#[test]
fn bad_inputs_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.cfg");
    assert_eq!(
        qedsim(&["run", "--config", missing.to_str().unwrap()])
            .status
            .code(),
        Some(3)
    );

    let cfg = write_config(dir.path(), "colour = blue\n");
    assert_eq!(qedsim(&["run", "--config", &cfg]).status.code(), Some(2));

    let cfg = write_config(dir.path(), "num_states = 0\n");
    assert_eq!(qedsim(&["run", "--config", &cfg]).status.code(), Some(2));

    assert_eq!(qedsim(&["frobnicate"]).status.code(), Some(2));
    let cfg = write_config(dir.path(), "");
    let o = qedsim(&[
        "sweep", "--config", &cfg, "--param", "omega", "--values", "1",
    ]);
    assert_eq!(o.status.code(), Some(2));

    let blocker = dir.path().join("blocker");
    std::fs::write(&blocker, "x").unwrap();
    let o = qedsim(&[
        "run",
        "--config",
        &cfg,
        "--out",
        blocker.join("sub").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn validate_reports_json() {
    let out = qedsim(&["validate", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["checks"].as_array().unwrap().len(), 8);
}

#[test]
fn syndrome_table_listing() {
    let out = qedsim(&["syndrome-table"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 16);
    assert!(lines[0].starts_with("0000"));
    assert!(lines
        .iter()
        .any(|l| l.starts_with("0101") && l.ends_with("X2")));
    assert!(lines
        .iter()
        .any(|l| l.starts_with("1111") && l.ends_with("Y4")));
}

#[test]
fn channel_estimate_json() {
    let out = qedsim(&[
        "channel-estimate",
        "--n-qubits",
        "1",
        "--sigma2",
        "5e-5",
        "--runs",
        "20000",
        "--seed",
        "3",
        "--json",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let predicted = v["predicted_p"].as_f64().unwrap();
    let estimated = v["estimated_p"].as_f64().unwrap();
    assert!((predicted - 0.1 / 1.1).abs() < 1e-9);
    assert!((estimated - predicted).abs() < 0.02);
    assert_eq!(v["runs"], 20000);
}

#[test]
fn sweep_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "");
    let out_dir = dir.path().join("sw");
    let o = qedsim(&[
        "sweep",
        "--config",
        &cfg,
        "--param",
        "coeff_sigma",
        "--values",
        "0.01,0.03",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("sweep.json")).unwrap())
            .unwrap();
    assert_eq!(v["values"].as_array().unwrap().len(), 2);
    assert!(out_dir.join("sweep.csv").is_file());
}
