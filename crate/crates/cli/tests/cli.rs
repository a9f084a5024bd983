//! End-to-end checks of the command-line surface: exit codes, the defaults
//! round trip, output files, and the golden verify flow.

use std::process::Command;

fn comshift() -> Command {
    Command::new(env!("CARGO_BIN_EXE_comshift"))
}

#[test]
fn defaults_round_trip_through_the_parser() {
    let out = comshift().arg("defaults").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let cfg = comshift_cli::config::RunConfig::parse(&text).unwrap();
    assert_eq!(cfg, comshift_cli::config::RunConfig::default());
}

#[test]
fn sweep_rl_defaults_to_101_rows() {
    let out = comshift()
        .args(["analyze", "sweep-rl", "--g0", "30", "--t2", "20"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 102); // header + 101 grid points
    assert!(text.starts_with("r_l,f_g,T1,f_c,feasible\n"));
}

#[test]
fn empty_grid_exits_with_usage_error() {
    let out = comshift()
        .args(["analyze", "sweep-rl", "--step", "0"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("grid"));
}

#[test]
fn unknown_scenario_exits_with_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = comshift()
        .args(["sim", "--scenario", "task9"])
        .args(["--out", dir.path().to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_config_key_is_named_in_the_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "[platform]\nmass = \"heavy\"\n").unwrap();
    let out = comshift()
        .args(["sim", "--scenario", "task1"])
        .args(["--config", path.to_str().unwrap()])
        .args(["--out", dir.path().join("out").to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("mass"), "error did not name the key: {err}");
}

#[test]
fn custom_scenario_without_waypoints_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = comshift()
        .args(["sim", "--scenario", "custom"])
        .args(["--out", dir.path().to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn custom_scenario_runs_a_hover_script() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = comshift_cli::config::RunConfig::default();
    cfg.timing.duration = 2.0;
    let mut text = cfg.to_toml();
    text.push_str(
        "\n[[waypoint]]\nt = 0.0\nx = 0.2\nz = 1.0\nphase = \"hover\"\nramp = \"step\"\n",
    );
    let path = dir.path().join("hover.toml");
    std::fs::write(&path, text).unwrap();
    let out_dir = dir.path().join("out");
    let out = comshift()
        .args(["sim", "--scenario", "custom"])
        .args(["--config", path.to_str().unwrap()])
        .args(["--out", out_dir.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let trace = std::fs::read_to_string(out_dir.join("trace.csv")).unwrap();
    assert_eq!(trace.lines().count(), 202); // header + 201 ticks
}

#[test]
fn verify_flow_pass_mismatch_and_missing() {
    // Short runs keep this test quick; the flow is what matters.
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = comshift_cli::config::RunConfig::default();
    cfg.timing.duration = 1.0;
    let cfg_path = dir.path().join("cfg.toml");
    std::fs::write(&cfg_path, cfg.to_toml()).unwrap();
    let golden = dir.path().join("golden");

    // Fresh goldens pass.
    let out = comshift()
        .args(["verify", "--golden", golden.to_str().unwrap()])
        .args(["--config", cfg_path.to_str().unwrap(), "--update"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = comshift()
        .args(["verify", "--golden", golden.to_str().unwrap()])
        .args(["--config", cfg_path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));

    // A perturbed parameter is reported with both values and exits 4.
    let mut perturbed = cfg.clone();
    perturbed.platform.mu_static = 0.51;
    perturbed.platform.mu_kinetic = 0.459;
    let p_path = dir.path().join("perturbed.toml");
    std::fs::write(&p_path, perturbed.to_toml()).unwrap();
    let out = comshift()
        .args(["verify", "--golden", golden.to_str().unwrap()])
        .args(["--config", p_path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));

    // A missing baseline is called out explicitly.
    std::fs::remove_file(golden.join("sweep_rl.csv")).unwrap();
    let out = comshift()
        .args(["verify", "--golden", golden.to_str().unwrap()])
        .args(["--config", cfg_path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("missing baseline"), "{text}");
}

#[test]
fn sim_outputs_are_decimated() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = comshift_cli::config::RunConfig::default();
    cfg.timing.duration = 2.0;
    cfg.run.decimation = 10;
    let path = dir.path().join("cfg.toml");
    std::fs::write(&path, cfg.to_toml()).unwrap();
    let out_dir = dir.path().join("out");
    let out = comshift()
        .args(["sim", "--scenario", "task1"])
        .args(["--config", path.to_str().unwrap()])
        .args(["--out", out_dir.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success());
    let trace = std::fs::read_to_string(out_dir.join("trace.csv")).unwrap();
    assert_eq!(trace.lines().count(), 22); // header + ceil(201 / 10)
}

#[test]
fn frictionless_task1_flags_the_infeasible_prediction() {
    let mut cfg = comshift_cli::config::RunConfig::default();
    cfg.platform.mu_static = 0.0;
    cfg.platform.mu_kinetic = 0.0;
    let (_, summary) = comshift_cli::runner::sim_task(&cfg).unwrap();
    assert!(summary.l_star_predicted.is_none());
    let note = summary.prediction_note.as_deref().unwrap_or("");
    assert!(note.contains("no feasible plate position"), "note: {note}");
    assert!(
        summary.alpha_steady_deg < 90.0,
        "alpha_steady = {}",
        summary.alpha_steady_deg
    );
}

#[test]
fn oversized_physics_step_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = comshift_cli::config::RunConfig::default();
    cfg.timing.physics_dt = 0.05;
    cfg.timing.control_dt = 0.05;
    let path = dir.path().join("cfg.toml");
    std::fs::write(&path, cfg.to_toml()).unwrap();
    let out = comshift()
        .args(["sim", "--scenario", "task1"])
        .args(["--config", path.to_str().unwrap()])
        .args(["--out", dir.path().join("out").to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn divergence_exits_with_code_3() {
    // A vanishing pitch inertia overflows the pitch rate at the first
    // contact friction; the run must stop with the divergence code.
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = comshift_cli::config::RunConfig::default();
    cfg.platform.inertia_body = 1e-300;
    cfg.platform.inertia_plate = 1e-300;
    let path = dir.path().join("cfg.toml");
    std::fs::write(&path, cfg.to_toml()).unwrap();
    let out = comshift()
        .args(["sim", "--scenario", "task1"])
        .args(["--config", path.to_str().unwrap()])
        .args(["--out", dir.path().join("out").to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(3),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}
