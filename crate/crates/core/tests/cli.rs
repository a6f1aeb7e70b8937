//! End-to-end tests of the `wptbeam` binary: exit codes, file round-trips,
//! and byte-level determinism of seeded commands.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn scenario_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios/hallway.json")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wptbeam"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(
        out.status.success(),
        "command {:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

#[test]
fn synth_writes_channel_with_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("h.csv");
    let scenario = scenario_path();
    run_ok(&[
        "synth",
        "--scenario",
        scenario.to_str().unwrap(),
        "--device",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "index,re,im");
    assert_eq!(lines.count(), 1000);
    assert!(out.with_file_name("h.csv.meta.json").exists());
}

#[test]
fn channel_round_trip_through_import_is_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("h.csv");
    let second = dir.path().join("h2.csv");
    let scenario = scenario_path();
    run_ok(&[
        "synth",
        "--scenario",
        scenario.to_str().unwrap(),
        "--out",
        first.to_str().unwrap(),
    ]);
    // Re-export the imported channel; bytes must match the original.
    run_ok(&[
        "synth",
        "--scenario",
        scenario.to_str().unwrap(),
        "--channel",
        first.to_str().unwrap(),
        "--out",
        second.to_str().unwrap(),
    ]);
    assert_eq!(
        std::fs::read(&first).unwrap(),
        std::fs::read(&second).unwrap()
    );
}

#[test]
fn unknown_flag_exits_2_with_usage() {
    let out = run(&["synth", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.to_lowercase().contains("usage"), "{stderr}");
}

#[test]
fn unknown_subcommand_exits_2() {
    let out = run(&["fly"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_scenario_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"schema_version\": 1}").unwrap();
    let out = run(&[
        "synth",
        "--scenario",
        bad.to_str().unwrap(),
        "--out",
        dir.path().join("h.csv").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_scenario_file_exits_1() {
    let out = run(&[
        "synth",
        "--scenario",
        "/nonexistent/scenario.json",
        "--out",
        "/tmp/never-written.csv",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn out_of_range_device_exits_2() {
    let out = run(&[
        "synth",
        "--scenario",
        scenario_path().to_str().unwrap(),
        "--device",
        "9",
        "--out",
        "/tmp/never-written.csv",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn beamform_all_strategies_report_gain() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = scenario_path();
    for bf in ["mrt", "pw", "sw-los", "sw-smc"] {
        let out_file = dir.path().join(format!("{bf}.csv"));
        let out = run_ok(&[
            "beamform",
            "--scenario",
            scenario.to_str().unwrap(),
            "--bf",
            bf,
            "--out",
            out_file.to_str().unwrap(),
        ]);
        let stdout = String::from_utf8_lossy(&out.stdout);
        assert!(stdout.contains("PG="), "{bf}: {stdout}");
        let text = std::fs::read_to_string(&out_file).unwrap();
        assert_eq!(text.lines().next().unwrap(), "index,re,im");
        assert_eq!(text.lines().count(), 1001);
    }
}

#[test]
fn budget_emits_one_row_per_component() {
    let dir = tempfile::tempdir().unwrap();
    let out_file = dir.path().join("budget.csv");
    run_ok(&[
        "budget",
        "--scenario",
        scenario_path().to_str().unwrap(),
        "--out",
        out_file.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(&out_file).unwrap();
    assert_eq!(text.lines().next().unwrap(), "k,pg,pg_db");
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn mc_reciprocity_is_byte_deterministic() {
    // Criterion: identical seeded runs produce identical CSV bytes. The
    // orchestration is single-threaded, so thread count cannot influence
    // the output either.
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let scenario = scenario_path();
    for (out, _) in [(&a, 0), (&b, 1)] {
        run_ok(&[
            "mc-reciprocity",
            "--scenario",
            scenario.to_str().unwrap(),
            "--device",
            "1",
            "--snr-db",
            "-20:10:20",
            "--realizations",
            "500",
            "--seed",
            "7",
            "--out",
            out.to_str().unwrap(),
        ]);
    }
    let bytes_a = std::fs::read(&a).unwrap();
    assert_eq!(bytes_a, std::fs::read(&b).unwrap());
    let text = String::from_utf8(bytes_a).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "snr_db,pg_analytic_db,pg_mc_db,sigma,cov1,cov2,cov3,regime"
    );
    assert_eq!(text.lines().count(), 6);
}

#[test]
fn seeded_synth_with_dm_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    // Enable the diffuse term in a scenario copy.
    let mut doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(scenario_path()).unwrap()).unwrap();
    doc["dm_variance"] = serde_json::json!(1e-13);
    let scen = dir.path().join("dm.json");
    std::fs::write(&scen, doc.to_string()).unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let c = dir.path().join("c.csv");
    for (out, seed) in [(&a, "9"), (&b, "9"), (&c, "10")] {
        run_ok(&[
            "synth",
            "--scenario",
            scen.to_str().unwrap(),
            "--seed",
            seed,
            "--out",
            out.to_str().unwrap(),
        ]);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_ne!(std::fs::read(&a).unwrap(), std::fs::read(&c).unwrap());
}

#[test]
fn sweep_pw_and_heatmap_write_expected_schemas() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = scenario_path();
    let sweep_file = dir.path().join("sweep.csv");
    run_ok(&[
        "sweep",
        "--scenario",
        scenario.to_str().unwrap(),
        "--bf",
        "pw",
        "--theta-deg",
        "95:1:110",
        "--phi-deg",
        "-10:1:10",
        "--out",
        sweep_file.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(&sweep_file).unwrap();
    assert_eq!(text.lines().next().unwrap(), "theta_deg,phi_deg,pg_db");
    assert_eq!(text.lines().count(), 1 + 16 * 21);

    let heat_file = dir.path().join("heat.csv");
    run_ok(&[
        "heatmap",
        "--scenario",
        scenario.to_str().unwrap(),
        "--bf",
        "sw-los",
        "--out",
        heat_file.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(&heat_file).unwrap();
    assert_eq!(text.lines().next().unwrap(), "x,y,z,pg_db");
    assert_eq!(text.lines().count(), 65); // default 8 x 8 grid
}

#[test]
fn sweep_sw_los_localizes_near_device() {
    let dir = tempfile::tempdir().unwrap();
    let out_file = dir.path().join("sw.csv");
    let out = run_ok(&[
        "sweep",
        "--scenario",
        scenario_path().to_str().unwrap(),
        "--bf",
        "sw-los",
        "--x",
        "3.3:0.1:3.7",
        "--y",
        "-2.2:0.1:-1.8",
        "--z",
        "0.8:0.1:1.2",
        "--out",
        out_file.to_str().unwrap(),
    ]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("argmax"), "{stdout}");
    let text = std::fs::read_to_string(&out_file).unwrap();
    assert_eq!(text.lines().next().unwrap(), "x,y,z,pg_db");
    assert_eq!(text.lines().count(), 1 + 5 * 5 * 5);
}

#[test]
fn optimize_phases_summary_and_candidates() {
    let dir = tempfile::tempdir().unwrap();
    let out_file = dir.path().join("phases.csv");
    run_ok(&[
        "optimize-phases",
        "--scenario",
        scenario_path().to_str().unwrap(),
        "--grid-step",
        "30",
        "--out",
        out_file.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(&out_file).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "row,pg,pg_db,phi_deg_1,phi_deg_2,phi_deg_3,phi_deg_4"
    );
    assert_eq!(text.lines().count(), 2); // summary only

    let traced = dir.path().join("phases-traced.csv");
    run_ok(&[
        "optimize-phases",
        "--scenario",
        scenario_path().to_str().unwrap(),
        "--grid-step",
        "90",
        "--emit-candidates",
        "--out",
        traced.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(&traced).unwrap();
    // Summary row plus 4^3 grid candidates.
    assert_eq!(text.lines().count(), 2 + 64);
    let best_line = text.lines().nth(1).unwrap();
    assert!(best_line.starts_with("best,"), "{best_line}");
}

#[test]
fn optimize_gammas_recovers_configured_walls() {
    let dir = tempfile::tempdir().unwrap();
    let out_file = dir.path().join("gammas.csv");
    let out = run_ok(&[
        "optimize-gammas",
        "--scenario",
        scenario_path().to_str().unwrap(),
        "--gamma-search",
        "joint",
        "--out",
        out_file.to_str().unwrap(),
    ]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    // Model-matched joint search: the configured coefficients sit on the
    // grid and globally maximize the objective, so they come back exactly.
    assert!(stdout.contains("0.05"), "{stdout}");
    assert!(stdout.contains("0.775"), "{stdout}");
    assert!(stdout.contains("0.575"), "{stdout}");
    let text = std::fs::read_to_string(&out_file).unwrap();
    assert!(text.starts_with("row,pg,pg_db,gamma_1,gamma_2,gamma_3,gamma_4"));
}

#[test]
fn weights_round_trip_into_heatmap() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = scenario_path();
    let weights = dir.path().join("w.csv");
    run_ok(&[
        "beamform",
        "--scenario",
        scenario.to_str().unwrap(),
        "--bf",
        "mrt",
        "--out",
        weights.to_str().unwrap(),
    ]);
    let heat = dir.path().join("heat.csv");
    run_ok(&[
        "heatmap",
        "--scenario",
        scenario.to_str().unwrap(),
        "--weights",
        weights.to_str().unwrap(),
        "--nx",
        "3",
        "--ny",
        "3",
        "--out",
        heat.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(&heat).unwrap();
    assert_eq!(text.lines().count(), 10);
}

#[test]
fn summary_csv_written_when_requested() {
    let dir = tempfile::tempdir().unwrap();
    let out_file = dir.path().join("w.csv");
    let summary = dir.path().join("summary.csv");
    run_ok(&[
        "beamform",
        "--scenario",
        scenario_path().to_str().unwrap(),
        "--bf",
        "sw-smc",
        "--optimize",
        "phases",
        "--grid-step",
        "45",
        "--out",
        out_file.to_str().unwrap(),
        "--summary",
        summary.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(&summary).unwrap();
    assert_eq!(text.lines().next().unwrap(), "pg,pg_db");
    assert_eq!(text.lines().count(), 2);
}
