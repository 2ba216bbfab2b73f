//! End-to-end tests of the `qem` binary: exit codes, file schemas, and
//! byte-level determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn qem(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qem"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn repo_path(rel: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .join(rel)
        .display()
        .to_string()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qem-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path)
        .unwrap_or_else(|e| panic!("cannot read {}: {e}", path.display()))
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn same_seed_reruns_are_byte_identical_even_across_directories() {
    let config = repo_path("configs/triplet_exact.json");
    let dir_a = scratch("identical-a");
    let dir_b = scratch("identical-b");

    for dir in [&dir_a, &dir_b] {
        let out = qem(&["run-vqe", "--config", &config, "--out", dir.to_str().unwrap()]);
        assert!(out.status.success(), "{}", stderr_of(&out));
    }
    assert_eq!(
        read(&dir_a.join("theta_opt.json")),
        read(&dir_b.join("theta_opt.json"))
    );
    assert_eq!(
        read(&dir_a.join("vqe_trace.csv")),
        read(&dir_b.join("vqe_trace.csv"))
    );

    // A different master seed must change the data.
    let dir_c = scratch("identical-c");
    let out = qem(&[
        "run-vqe", "--config", &config, "--out", dir_c.to_str().unwrap(), "--seed", "8",
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    assert_ne!(
        read(&dir_a.join("theta_opt.json")),
        read(&dir_c.join("theta_opt.json"))
    );

    for dir in [dir_a, dir_b, dir_c] {
        std::fs::remove_dir_all(dir).ok();
    }
}

#[test]
fn missing_or_malformed_model_files_exit_2_with_diagnostics() {
    let dir = scratch("badmodel");
    let config = dir.join("config.json");
    let model = dir.join("model.json");
    let write_config = || {
        std::fs::write(
            &config,
            serde_json::json!({
                "schema_version": 1,
                "model": { "kind": "pauli_file", "path": model.display().to_string() },
                "ansatz": { "n_qubits": 2, "n_entangling_layers": 1 },
                "seed": 1
            })
            .to_string(),
        )
        .unwrap()
    };

    write_config();
    let out = qem(&["run-vqe", "--config", config.to_str().unwrap(), "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("does not exist"), "{}", stderr_of(&out));

    std::fs::write(&model, "not an operator").unwrap();
    let out = qem(&["run-vqe", "--config", config.to_str().unwrap(), "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("parse"), "{}", stderr_of(&out));

    // A config that is itself broken JSON also exits 2.
    std::fs::write(&config, "{").unwrap();
    let out = qem(&["run-vqe", "--config", config.to_str().unwrap(), "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("parse"), "{}", stderr_of(&out));

    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn eigenstate_mitigation_is_flat_and_flagged_degenerate() {
    let config = repo_path("configs/triplet_exact.json");
    let dir = scratch("eigenstate");
    let theta = dir.join("theta.json");
    std::fs::write(&theta, "[0, 0, 0, 0, 0, 0, 0, 0]").unwrap();

    let out = qem(&[
        "mitigate",
        "--config", &config,
        "--out", dir.to_str().unwrap(),
        "--exact",
        "--theta", theta.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));

    let report: serde_json::Value =
        serde_json::from_str(&read(&dir.join("mitigation.json"))).unwrap();
    let estimates = report["estimates"].as_array().unwrap();
    assert_eq!(estimates.len(), 5);
    let energies: Vec<f64> = estimates.iter().map(|e| e["energy"].as_f64().unwrap()).collect();
    for e in &energies {
        assert!(
            (e - energies[0]).abs() < 1e-12,
            "estimators disagree on an eigenstate: {energies:?}"
        );
    }
    let lanczos = estimates.iter().find(|e| e["estimator"] == "lanczos").unwrap();
    assert_eq!(lanczos["degenerate"], serde_json::Value::Bool(true));

    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn sampled_mitigation_reports_the_full_schema() {
    let dir = scratch("schema");
    let config = dir.join("config.json");
    std::fs::write(
        &config,
        serde_json::json!({
            "schema_version": 1,
            "model": { "kind": "triplet_pair" },
            "ansatz": { "n_qubits": 2, "n_entangling_layers": 1 },
            "vqe": { "n_init": 2, "n_vqe": 1, "n_steps": 100, "shots": "exact",
                     "spsa": { "stability": 50.0 } },
            "mitigation": { "shots": 4096, "n_repeat": 3 },
            "seed": 42
        })
        .to_string(),
    )
    .unwrap();
    let theta = dir.join("theta.json");
    std::fs::write(&theta, "[0.3, 0.1, -0.4, 0.2, 0.5, -0.1, 0.2, 0.4]").unwrap();

    let out = qem(&[
        "mitigate",
        "--config", config.to_str().unwrap(),
        "--out", dir.to_str().unwrap(),
        "--theta", theta.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));

    let report: serde_json::Value =
        serde_json::from_str(&read(&dir.join("mitigation.json"))).unwrap();
    for key in ["schema_version", "seed", "config_hash", "n_repeat", "estimates"] {
        assert!(report.get(key).is_some(), "missing top-level {key}");
    }
    let estimates = report["estimates"].as_array().unwrap();
    for wanted in ["lanczos", "cube_root", "wls", "fixed_ratio"] {
        let record = estimates
            .iter()
            .find(|e| e["estimator"] == wanted)
            .unwrap_or_else(|| panic!("no {wanted} record"));
        for key in ["method", "energy", "stderr", "condition_value", "a0", "a1", "degenerate"] {
            assert!(record.get(key).is_some(), "{wanted} record missing {key}");
        }
        assert!(record["energy"].as_f64().unwrap().is_finite());
        assert!(record["stderr"].as_f64().unwrap() > 0.0, "{wanted} should carry a sampled error bar");
    }

    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn single_point_sweep_warns_and_leaves_the_smoothness_table_empty() {
    let config = repo_path("configs/triplet_exact.json");
    let operator = repo_path("fixtures/triplet_pair.json");
    let dir = scratch("sweep1");

    let out = qem(&[
        "sweep",
        "--config", &config,
        "--out", dir.to_str().unwrap(),
        "--files", &operator,
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    assert!(stderr_of(&out).contains("single-point"), "{}", stderr_of(&out));

    let delta = read(&dir.join("sweep_delta.csv"));
    assert_eq!(delta.lines().count(), 1, "expected only the header: {delta}");
    assert!(delta.starts_with("seed,config_hash,method,sigma_max,delta"));

    // The per-point table still has one row per estimator with the oracle
    // column filled in.
    let sweep = read(&dir.join("sweep.csv"));
    assert_eq!(sweep.lines().count(), 1 + 5);
    for line in sweep.lines().skip(1) {
        assert!(line.ends_with(",-1.0"), "oracle column should be −1: {line}");
    }

    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn coupling_sweep_tracks_the_oracle_curve() {
    let dir = scratch("sweepgrid");
    let config = dir.join("config.json");
    std::fs::write(
        &config,
        serde_json::json!({
            "schema_version": 1,
            "model": { "kind": "heisenberg_tetrahedron", "j": 1.0, "j_prime": 1.0 },
            "ansatz": { "n_qubits": 4, "n_entangling_layers": 2 },
            "vqe": { "n_init": 2, "n_vqe": 1, "n_steps": 150, "shots": "exact",
                     "spsa": { "stability": 50.0 } },
            "mitigation": { "shots": "exact", "n_repeat": 1,
                            "estimators": ["bare", "lanczos"] },
            "seed": 3
        })
        .to_string(),
    )
    .unwrap();

    let out = qem(&[
        "sweep",
        "--config", config.to_str().unwrap(),
        "--out", dir.to_str().unwrap(),
        "--from", "0.6", "--to", "1.4", "--points", "3",
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));

    let sweep = read(&dir.join("sweep.csv"));
    let mut oracle = Vec::new();
    for line in sweep.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        let ratio: f64 = fields[5].parse().unwrap();
        let energy: f64 = fields[6].parse().unwrap();
        let exact: f64 = fields[8].parse().unwrap();
        // J′/J ∈ {0.6, 1.0, 1.4} → true ground −7J + J′ below the level
        // crossing, −3J − 3J′ above: −6.4, −6, −7.2.
        let want = if ratio <= 1.0 { -7.0 + ratio } else { -3.0 - 3.0 * ratio };
        assert!((exact - want).abs() < 1e-10, "oracle column off at {ratio}: {exact}");
        assert!(energy >= exact - 1e-9, "estimate dips below the true ground at {ratio}");
        if fields[2] == "bare" {
            oracle.push((ratio, exact));
        }
    }
    assert_eq!(oracle.len(), 3);
    // The two candidate ground levels cross at J′ = J: the oracle curve has
    // its kink (local maximum along the grid) exactly there.
    assert!(oracle[1].1 > oracle[0].1 && oracle[1].1 > oracle[2].1);

    let delta = read(&dir.join("sweep_delta.csv"));
    assert!(delta.lines().count() > 1, "grid sweep should profile the caps");

    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn histogram_with_one_repetition_is_a_single_row() {
    let dir = scratch("hist1");
    let config = dir.join("config.json");
    std::fs::write(
        &config,
        serde_json::json!({
            "schema_version": 1,
            "model": { "kind": "triplet_pair" },
            "ansatz": { "n_qubits": 2, "n_entangling_layers": 1 },
            "vqe": { "n_init": 2, "n_vqe": 1, "n_steps": 100, "shots": "exact",
                     "spsa": { "stability": 50.0 } },
            "mitigation": { "shots": 2048, "n_repeat": 1, "estimators": ["lanczos"] },
            "n_repetitions": 1,
            "seed": 5
        })
        .to_string(),
    )
    .unwrap();

    let out = qem(&["histogram", "--config", config.to_str().unwrap(), "--out", dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr_of(&out));

    let hist = read(&dir.join("histogram.csv"));
    let lines: Vec<&str> = hist.lines().collect();
    assert_eq!(lines.len(), 2, "header + exactly one row: {hist}");
    assert!(lines[0].starts_with("seed,config_hash,method,rep,energy,stderr"));
    assert!(lines[1].contains("lanczos_m2"));

    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn zne_emits_points_extrapolation_and_budget() {
    let config = repo_path("configs/triplet_exact.json");
    let dir = scratch("zne");
    let theta = dir.join("theta.json");
    std::fs::write(&theta, "[0.4, 0.2, -0.3, 0.1, 0.6, -0.2, 0.3, 0.5]").unwrap();

    let out = qem(&[
        "zne",
        "--config", &config,
        "--out", dir.to_str().unwrap(),
        "--theta", theta.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));

    let points = read(&dir.join("zne_points.csv"));
    assert_eq!(points.lines().count(), 1 + 2 * 4, "2 estimators × 4 factors");

    let extrap: serde_json::Value =
        serde_json::from_str(&read(&dir.join("zne_extrapolation.json"))).unwrap();
    let records = extrap["records"].as_array().unwrap();
    assert_eq!(records.len(), 2);
    for r in records {
        assert!(r["energy"].as_f64().unwrap().is_finite());
        assert_eq!(r["degree"], 1);
    }

    let budget: serde_json::Value =
        serde_json::from_str(&read(&dir.join("zne_budget.json"))).unwrap();
    let b = &budget["comparison"]["budget"];
    let lanczos_total =
        b["lanczos_strings"].as_u64().unwrap() * b["shots_per_string"].as_u64().unwrap();
    let zne_total =
        b["zne_strings"].as_u64().unwrap() * b["zne_shots_per_string"].as_u64().unwrap();
    assert!(zne_total >= lanczos_total, "folding must never be under-budgeted");

    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn scaling_reports_counts_for_each_file_and_power() {
    let dir = scratch("scaling");
    let pair = repo_path("fixtures/triplet_pair.json");
    let chain = repo_path("fixtures/heisenberg_chain_3.json");

    let out = qem(&["scaling", &pair, &chain, "--out", dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr_of(&out));

    let table = read(&dir.join("scaling.csv"));
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines.len(), 1 + 2 * 3, "two files × powers 1..=3");
    let chain_rows: Vec<&&str> = lines.iter().filter(|l| l.contains("chain_3")).collect();
    assert_eq!(chain_rows.len(), 3);
    for row in chain_rows {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields[4], "3", "chain file is three qubits: {row}");
    }
    // The pair's powers collapse onto span{I, H}: three non-identity
    // strings at every power.
    let pair_cubed = lines
        .iter()
        .find(|l| {
            let fields: Vec<&str> = l.split(',').collect();
            fields[3].contains("triplet_pair") && fields[5] == "3"
        })
        .unwrap();
    assert_eq!(pair_cubed.split(',').nth(7), Some("3"), "{pair_cubed}");

    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn config_is_required_for_config_driven_verbs() {
    let out = qem(&["run-vqe"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("--config"), "{}", stderr_of(&out));
}
