//! The six experiment verbs.
//!
//! Each verb derives its own seed stream from the master seed, fans
//! repetitions or sweep points out over the rayon pool with pre-split seeds,
//! collects results in order, and writes files from the calling thread —
//! so a fixed master seed produces byte-identical outputs regardless of
//! thread count.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use rayon::prelude::*;
use serde::Serialize;

use qem_core::linalg::hermitian_eigen;
use qem_core::mitigation::{
    bare_estimate, constrained_select, cube_root_estimate, delta_h_profile, fixed_ratio_estimate,
    lanczos_general, measure_moments, wls_average, BootstrapCfg, MitigatedEstimate, MomentSet,
};
use qem_core::models::{load_pauli_file, ModelSpec};
use qem_core::pauli::{count_terms_report, PauliSum, DEFAULT_PRUNE_TOL};
use qem_core::seeds::split_seed;
use qem_core::sim::{run_circuit, DensityMatrix, ReadoutError, ShotCount};
use qem_core::vqe::{run_vqe as optimize, VqeRun};
use qem_core::zne::{
    budget_matched_compare, extrapolate_points, fold_and_measure, BudgetComparison, ZneEstimator,
};

use crate::config::{EstimatorKind, ExperimentConfig, MitigationSettings};
use crate::output::{ensure_dir, write_csv, write_json};

// One independent seed stream per verb, split off the master seed. The VQE
// stream is shared by every verb that optimizes internally, so `run-vqe`,
// `histogram` and `zne` agree on θ_opt for the same master seed.
const STREAM_VQE: u64 = 1;
const STREAM_MITIGATE: u64 = 2;
const STREAM_SWEEP: u64 = 3;
const STREAM_HISTOGRAM: u64 = 4;
const STREAM_ZNE: u64 = 5;

/// One estimate per configured estimator, in config order.
type EstimateSet = Vec<(EstimatorKind, MitigatedEstimate)>;

/// Persisted optimizer outcome (`theta_opt.json`).
#[derive(Serialize)]
struct ThetaRecord<'a> {
    schema_version: u32,
    seed: u64,
    config_hash: &'a str,
    method: &'a str,
    theta_opt: &'a [f64],
    energy: f64,
    stderr: f64,
    shots: ShotCount,
    best_restart: usize,
    n_restarts: usize,
}

/// One optimizer step (`vqe_trace.csv`).
#[derive(Serialize)]
struct TraceRow<'a> {
    seed: u64,
    config_hash: &'a str,
    method: &'a str,
    restart: usize,
    step: usize,
    energy: f64,
    stderr: f64,
    best_so_far: f64,
}

const TRACE_HEADER: &[&str] = &[
    "seed", "config_hash", "method", "restart", "step", "energy", "stderr", "best_so_far",
];

/// One estimator outcome with full diagnostics (`mitigation.json`).
#[derive(Serialize)]
struct EstimateRecord {
    estimator: EstimatorKind,
    method: String,
    energy: f64,
    stderr: f64,
    shots: ShotCount,
    a0: Option<f64>,
    a1: Option<f64>,
    condition_value: Option<f64>,
    degenerate: bool,
    discard: bool,
    constraint_infeasible: bool,
}

#[derive(Serialize)]
struct MitigationReport<'a> {
    schema_version: u32,
    seed: u64,
    config_hash: &'a str,
    n_repeat: usize,
    estimates: Vec<EstimateRecord>,
}

/// One ensemble draw (`histogram.csv`).
#[derive(Serialize)]
struct HistogramRow<'a> {
    seed: u64,
    config_hash: &'a str,
    method: String,
    rep: usize,
    energy: f64,
    stderr: f64,
    degenerate: bool,
    discard: bool,
}

const HISTOGRAM_HEADER: &[&str] = &[
    "seed", "config_hash", "method", "rep", "energy", "stderr", "degenerate", "discard",
];

/// One sweep-point estimate (`sweep.csv`).
#[derive(Serialize)]
struct SweepRow<'a> {
    seed: u64,
    config_hash: &'a str,
    method: String,
    point: usize,
    label: String,
    j_prime_ratio: Option<f64>,
    energy: f64,
    stderr: f64,
    exact_ground: f64,
}

const SWEEP_HEADER: &[&str] = &[
    "seed", "config_hash", "method", "point", "label", "j_prime_ratio", "energy", "stderr",
    "exact_ground",
];

/// One smoothness-profile row (`sweep_delta.csv`).
#[derive(Serialize)]
struct DeltaRow<'a> {
    seed: u64,
    config_hash: &'a str,
    method: &'a str,
    sigma_max: f64,
    delta: f64,
    n_infeasible: usize,
    recommended: bool,
}

const DELTA_HEADER: &[&str] = &[
    "seed", "config_hash", "method", "sigma_max", "delta", "n_infeasible", "recommended",
];

/// One folded measurement (`zne_points.csv`).
#[derive(Serialize)]
struct ZneRow<'a> {
    seed: u64,
    config_hash: &'a str,
    method: String,
    factor: usize,
    energy: f64,
    stderr: f64,
    degenerate: bool,
}

const ZNE_HEADER: &[&str] =
    &["seed", "config_hash", "method", "factor", "energy", "stderr", "degenerate"];

/// One zero-noise intercept (`zne_extrapolation.json`).
#[derive(Serialize)]
struct ExtrapolationRecord {
    method: String,
    degree: usize,
    fold_factors: Vec<usize>,
    energy: f64,
    stderr: f64,
}

#[derive(Serialize)]
struct ZneReport<'a> {
    schema_version: u32,
    seed: u64,
    config_hash: &'a str,
    records: Vec<ExtrapolationRecord>,
}

#[derive(Serialize)]
struct BudgetReport<'a> {
    schema_version: u32,
    seed: u64,
    config_hash: &'a str,
    comparison: BudgetComparison,
}

/// One term-count row (`scaling.csv`).
#[derive(Serialize)]
struct ScalingRow<'a> {
    seed: u64,
    config_hash: &'a str,
    method: &'a str,
    file: String,
    n_qubits: usize,
    power: u32,
    n_terms: usize,
    n_non_identity: usize,
    exponent: Option<f64>,
}

const SCALING_HEADER: &[&str] = &[
    "seed", "config_hash", "method", "file", "n_qubits", "power", "n_terms", "n_non_identity",
    "exponent",
];

/// Optimize the ansatz and persist θ_opt plus the optimizer trace.
pub fn run_vqe(cfg: &ExperimentConfig) -> Result<()> {
    let h = cfg.model.build()?;
    let hash = cfg.hash();
    ensure_dir(&cfg.output_dir)?;

    let run = optimize_seeded(cfg, &h)?;
    let theta_path = cfg.output_dir.join("theta_opt.json");
    write_json(
        &theta_path,
        &ThetaRecord {
            schema_version: crate::config::SCHEMA_VERSION,
            seed: cfg.seed,
            config_hash: &hash,
            method: "vqe_spsa",
            theta_opt: &run.theta_opt,
            energy: run.energy.value,
            stderr: run.energy.stderr,
            shots: run.energy.shots,
            best_restart: run.best_restart,
            n_restarts: run.restarts.len(),
        },
    )?;

    let mut rows = Vec::new();
    for (restart, sr) in run.restarts.iter().enumerate() {
        for t in &sr.trace {
            rows.push(TraceRow {
                seed: cfg.seed,
                config_hash: &hash,
                method: "vqe_spsa",
                restart,
                step: t.step,
                energy: t.energy,
                stderr: t.stderr,
                best_so_far: t.best_so_far,
            });
        }
    }
    write_csv(&cfg.output_dir.join("vqe_trace.csv"), TRACE_HEADER, &rows)?;

    println!(
        "vqe: energy {:+.6} ± {:.6} (best of {} restarts) → {}",
        run.energy.value,
        run.energy.stderr,
        run.restarts.len(),
        theta_path.display()
    );
    Ok(())
}

/// Apply every configured estimator to a stored optimal circuit.
pub fn mitigate(cfg: &ExperimentConfig, theta_path: &Path) -> Result<()> {
    let h = cfg.model.build()?;
    let hash = cfg.hash();
    ensure_dir(&cfg.output_dir)?;

    let theta = load_theta(theta_path)?;
    let rho = prepare_state(cfg, &theta)?;
    let suite = estimate_suite(
        &rho,
        &h,
        &cfg.mitigation,
        cfg.readout(),
        split_seed(cfg.seed, STREAM_MITIGATE),
    )?;

    let estimates: Vec<EstimateRecord> = suite
        .iter()
        .map(|(kind, est)| EstimateRecord {
            estimator: *kind,
            method: kind.tag(cfg.mitigation.order),
            energy: est.energy.value,
            stderr: est.energy.stderr,
            shots: est.energy.shots,
            a0: est.a0,
            a1: est.a1,
            condition_value: est.condition_value,
            degenerate: est.degenerate,
            discard: est.discard,
            constraint_infeasible: est.constraint_infeasible,
        })
        .collect();

    let path = cfg.output_dir.join("mitigation.json");
    write_json(
        &path,
        &MitigationReport {
            schema_version: crate::config::SCHEMA_VERSION,
            seed: cfg.seed,
            config_hash: &hash,
            n_repeat: cfg.mitigation.n_repeat,
            estimates,
        },
    )?;

    for (kind, est) in &suite {
        println!(
            "mitigate: {:12} {:+.6} ± {:.6}",
            kind.tag(cfg.mitigation.order),
            est.energy.value,
            est.energy.stderr
        );
    }
    println!("mitigate: report → {}", path.display());
    Ok(())
}

/// What a sweep iterates over: a J′/J coupling grid or a list of operator
/// files.
pub enum SweepGrid {
    Ratio { from: f64, to: f64, points: usize },
    Files(Vec<PathBuf>),
}

/// Re-optimize and estimate at every grid point; profile the constrained
/// estimator's smoothness across the sweep.
pub fn sweep(cfg: &ExperimentConfig, grid: &SweepGrid) -> Result<()> {
    let hash = cfg.hash();
    ensure_dir(&cfg.output_dir)?;

    // (label, ratio column, model) per point.
    let points: Vec<(String, Option<f64>, ModelSpec)> = match grid {
        SweepGrid::Ratio { from, to, points } => {
            if *points == 0 {
                bail!("sweep needs at least one grid point");
            }
            if *points > 1 && !(to > from) {
                bail!("sweep grid needs --to greater than --from, got {from}..{to}");
            }
            (0..*points)
                .map(|i| {
                    let ratio = if *points == 1 {
                        *from
                    } else {
                        from + (to - from) * i as f64 / (*points - 1) as f64
                    };
                    let model = cfg.model.with_j_prime_ratio(ratio)?;
                    Ok((format!("{ratio:.4}"), Some(ratio), model))
                })
                .collect::<qem_core::Result<_>>()?
        }
        SweepGrid::Files(files) => files
            .iter()
            .map(|f| {
                let label = f
                    .file_stem()
                    .map_or_else(|| f.display().to_string(), |s| s.to_string_lossy().into_owned());
                (label, None, ModelSpec::PauliFile { path: f.display().to_string() })
            })
            .collect(),
    };

    let stream = split_seed(cfg.seed, STREAM_SWEEP);
    let per_point: Vec<(EstimateSet, MomentSet, f64)> = points
        .par_iter()
        .enumerate()
        .map(|(i, (_, _, model))| {
            let point_seed = split_seed(stream, i as u64);
            let h = model.build()?;
            let (evals, _) = hermitian_eigen(&h.to_matrix())?;
            let exact_ground = evals[0];

            let mut vqe_cfg = cfg.vqe.clone();
            vqe_cfg.seed = split_seed(point_seed, 0);
            let run = optimize(&h, cfg.ansatz, &vqe_cfg, cfg.noise.as_ref())?;
            let rho = prepare_state(cfg, &run.theta_opt)?;
            let suite = estimate_suite(
                &rho,
                &h,
                &cfg.mitigation,
                cfg.readout(),
                split_seed(point_seed, 1),
            )?;
            // An extra moment set reserved for the smoothness profile, so
            // the profile's bootstrap never shares a stream with the suite.
            let profile_ms = measure_moments(
                &rho,
                &h,
                cfg.mitigation.max_power(),
                cfg.mitigation.shots,
                cfg.readout(),
                split_seed(point_seed, 2),
            )?;
            Ok((suite, profile_ms, exact_ground))
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::new();
    for (i, ((label, ratio, _), (suite, _, exact_ground))) in
        points.iter().zip(&per_point).enumerate()
    {
        for (kind, est) in suite {
            rows.push(SweepRow {
                seed: cfg.seed,
                config_hash: &hash,
                method: kind.tag(cfg.mitigation.order),
                point: i,
                label: label.clone(),
                j_prime_ratio: *ratio,
                energy: est.energy.value,
                stderr: est.energy.stderr,
                exact_ground: *exact_ground,
            });
        }
    }
    write_csv(&cfg.output_dir.join("sweep.csv"), SWEEP_HEADER, &rows)?;

    let profile_sets: Vec<(f64, MomentSet)> = per_point
        .iter()
        .enumerate()
        .map(|(i, (_, ms, _))| {
            (points[i].1.unwrap_or(i as f64), ms.clone())
        })
        .collect();
    if profile_sets.len() < 2 {
        eprintln!("warning: single-point sweep — smoothness table left empty");
    }
    let boot = BootstrapCfg::new(split_seed(stream, u64::MAX))
        .with_resamples(cfg.mitigation.bootstrap_resamples);
    let profile = delta_h_profile(&profile_sets, &cfg.mitigation.sigma_grid, &boot)?;
    let delta_rows: Vec<DeltaRow> = profile
        .rows
        .iter()
        .map(|r| DeltaRow {
            seed: cfg.seed,
            config_hash: &hash,
            method: "constrained",
            sigma_max: r.sigma_max,
            delta: r.delta,
            n_infeasible: r.n_infeasible,
            recommended: Some(r.sigma_max) == profile.recommended_sigma_max,
        })
        .collect();
    write_csv(&cfg.output_dir.join("sweep_delta.csv"), DELTA_HEADER, &delta_rows)?;

    println!(
        "sweep: {} points × {} estimators → {}",
        points.len(),
        cfg.mitigation.estimators.len(),
        cfg.output_dir.join("sweep.csv").display()
    );
    if let Some(cap) = profile.recommended_sigma_max {
        println!("sweep: recommended sigma_max {cap}");
    }
    Ok(())
}

/// Repeat measurement and mitigation of one optimal circuit.
pub fn histogram(cfg: &ExperimentConfig, theta_path: Option<&Path>) -> Result<()> {
    let h = cfg.model.build()?;
    let hash = cfg.hash();
    ensure_dir(&cfg.output_dir)?;

    let theta = stored_or_optimized_theta(cfg, &h, theta_path)?;
    let rho = prepare_state(cfg, &theta)?;
    let stream = split_seed(cfg.seed, STREAM_HISTOGRAM);

    let suites: Vec<EstimateSet> = (0..cfg.n_repetitions)
        .into_par_iter()
        .map(|rep| {
            estimate_suite(
                &rho,
                &h,
                &cfg.mitigation,
                cfg.readout(),
                split_seed(stream, rep as u64),
            )
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::new();
    for (rep, suite) in suites.iter().enumerate() {
        for (kind, est) in suite {
            rows.push(HistogramRow {
                seed: cfg.seed,
                config_hash: &hash,
                method: kind.tag(cfg.mitigation.order),
                rep,
                energy: est.energy.value,
                stderr: est.energy.stderr,
                degenerate: est.degenerate,
                discard: est.discard,
            });
        }
    }
    write_csv(&cfg.output_dir.join("histogram.csv"), HISTOGRAM_HEADER, &rows)?;

    for kind in &cfg.mitigation.estimators {
        let tag = kind.tag(cfg.mitigation.order);
        let vals: Vec<f64> = suites
            .iter()
            .flat_map(|s| s.iter().filter(|(k, _)| k == kind).map(|(_, e)| e.energy.value))
            .collect();
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        let std = if vals.len() > 1 {
            (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (vals.len() - 1) as f64).sqrt()
        } else {
            0.0
        };
        println!("histogram: {tag:12} mean {mean:+.6}, std {std:.6} over {} reps", vals.len());
    }
    Ok(())
}

/// Fold CZ layers, extrapolate to the zero-noise limit, and compare
/// measurement budgets against the moment pipeline.
pub fn zne(cfg: &ExperimentConfig, theta_path: Option<&Path>) -> Result<()> {
    let h = cfg.model.build()?;
    let hash = cfg.hash();
    ensure_dir(&cfg.output_dir)?;

    let theta = stored_or_optimized_theta(cfg, &h, theta_path)?;
    let circuit = cfg.ansatz.build_ansatz(&theta)?;
    let stream = split_seed(cfg.seed, STREAM_ZNE);

    let estimators =
        [ZneEstimator::Bare, ZneEstimator::Lanczos { order: cfg.mitigation.order }];
    let mut rows = Vec::new();
    let mut records = Vec::new();
    for (j, estimator) in estimators.into_iter().enumerate() {
        let points =
            fold_and_measure(&circuit, &h, cfg.noise.as_ref(), &cfg.zne, estimator, split_seed(stream, j as u64))?;
        for p in &points {
            rows.push(ZneRow {
                seed: cfg.seed,
                config_hash: &hash,
                method: p.estimate.method.tag(),
                factor: p.factor,
                energy: p.estimate.energy.value,
                stderr: p.estimate.energy.stderr,
                degenerate: p.estimate.degenerate,
            });
        }
        let fit = extrapolate_points(&points, cfg.zne.degree)?;
        records.push(ExtrapolationRecord {
            method: points[0].estimate.method.tag(),
            degree: cfg.zne.degree,
            fold_factors: cfg.zne.fold_factors.clone(),
            energy: fit.value,
            stderr: fit.stderr,
        });
    }
    write_csv(&cfg.output_dir.join("zne_points.csv"), ZNE_HEADER, &rows)?;
    write_json(
        &cfg.output_dir.join("zne_extrapolation.json"),
        &ZneReport {
            schema_version: crate::config::SCHEMA_VERSION,
            seed: cfg.seed,
            config_hash: &hash,
            records,
        },
    )?;

    let comparison = budget_matched_compare(
        &circuit,
        &h,
        cfg.noise.as_ref(),
        &cfg.zne,
        cfg.n_repetitions,
        split_seed(stream, u64::MAX),
    )?;
    println!(
        "zne: moment side {:+.6} ± {:.6}, folded side {:+.6} ± {:.6} over {} reps",
        comparison.lanczos_mean,
        comparison.lanczos_std,
        comparison.zne_mean,
        comparison.zne_std,
        comparison.n_reps
    );
    write_json(
        &cfg.output_dir.join("zne_budget.json"),
        &BudgetReport {
            schema_version: crate::config::SCHEMA_VERSION,
            seed: cfg.seed,
            config_hash: &hash,
            comparison,
        },
    )?;
    Ok(())
}

/// Term-count scaling report over a list of operator files.
pub fn scaling(files: &[PathBuf], max_power: u32, seed: u64, out: &Path) -> Result<()> {
    if max_power < 1 {
        bail!("--max-power must be at least 1");
    }
    ensure_dir(out)?;
    let hash = input_digest(files)?;
    let powers: Vec<u32> = (1..=max_power).collect();

    let mut rows = Vec::new();
    for file in files {
        let h = load_pauli_file(file)?;
        let report = count_terms_report(&h, &powers, DEFAULT_PRUNE_TOL)?;
        for row in report {
            rows.push(ScalingRow {
                seed,
                config_hash: &hash,
                method: "term_count",
                file: file.display().to_string(),
                n_qubits: h.n_qubits(),
                power: row.power,
                n_terms: row.n_terms,
                n_non_identity: row.n_non_identity,
                exponent: row.exponent,
            });
        }
    }
    let path = out.join("scaling.csv");
    write_csv(&path, SCALING_HEADER, &rows)?;
    println!("scaling: {} files × powers 1..={max_power} → {}", files.len(), path.display());
    Ok(())
}

/// Run the library optimizer with the VQE stream split off the master seed.
///
/// The `seed` field inside the `vqe` sub-config is deliberately overwritten:
/// the master seed is the single source of randomness.
fn optimize_seeded(cfg: &ExperimentConfig, h: &PauliSum) -> Result<VqeRun> {
    let mut vqe_cfg = cfg.vqe.clone();
    vqe_cfg.seed = split_seed(cfg.seed, STREAM_VQE);
    Ok(optimize(h, cfg.ansatz, &vqe_cfg, cfg.noise.as_ref())?)
}

/// θ from `--theta` when given, otherwise a fresh optimization on the VQE
/// stream (identical to what `run-vqe` would persist).
fn stored_or_optimized_theta(
    cfg: &ExperimentConfig,
    h: &PauliSum,
    theta_path: Option<&Path>,
) -> Result<Vec<f64>> {
    match theta_path {
        Some(path) => load_theta(path),
        None => Ok(optimize_seeded(cfg, h)?.theta_opt),
    }
}

/// Read a parameter vector from a `theta_opt.json` record or a bare JSON
/// array.
fn load_theta(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read theta file {}", path.display()))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .with_context(|| format!("cannot parse theta file {}", path.display()))?;
    let array = match &value {
        serde_json::Value::Array(_) => &value,
        serde_json::Value::Object(map) => map
            .get("theta_opt")
            .ok_or_else(|| anyhow!("{}: no theta_opt field", path.display()))?,
        _ => bail!("{}: expected a JSON array or a theta_opt record", path.display()),
    };
    let theta: Vec<f64> = serde_json::from_value(array.clone())
        .with_context(|| format!("{}: theta_opt is not an array of numbers", path.display()))?;
    if theta.is_empty() {
        bail!("{}: empty parameter vector", path.display());
    }
    Ok(theta)
}

/// Simulate the ansatz at θ under the configured noise.
fn prepare_state(cfg: &ExperimentConfig, theta: &[f64]) -> Result<DensityMatrix> {
    let circuit = cfg.ansatz.build_ansatz(theta)?;
    Ok(run_circuit(&circuit, cfg.noise.as_ref())?)
}

/// Measure `n_repeat` independent moment sets and evaluate every configured
/// estimator.
///
/// Estimators other than the weighted average use the first set; the
/// weighted average combines order-m estimates from all of them. Seed
/// layout: stream 0 feeds the bootstrap, streams 1.. feed the moment sets.
fn estimate_suite(
    rho: &DensityMatrix,
    h: &PauliSum,
    settings: &MitigationSettings,
    readout: &[ReadoutError],
    seed: u64,
) -> Result<EstimateSet> {
    let sets: Vec<MomentSet> = (0..settings.n_repeat)
        .map(|i| {
            measure_moments(
                rho,
                h,
                settings.max_power(),
                settings.shots,
                readout,
                split_seed(seed, 1 + i as u64),
            )
        })
        .collect::<qem_core::Result<_>>()?;
    let first = &sets[0];
    let boot =
        BootstrapCfg::new(split_seed(seed, 0)).with_resamples(settings.bootstrap_resamples);

    let mut out = Vec::with_capacity(settings.estimators.len());
    for (k, kind) in settings.estimators.iter().enumerate() {
        let sub = boot.substream(k as u64);
        let est = match kind {
            EstimatorKind::Bare => bare_estimate(first),
            EstimatorKind::Lanczos => lanczos_general(first, settings.order, &sub)?,
            EstimatorKind::CubeRoot => cube_root_estimate(first, &sub)?,
            EstimatorKind::Wls => {
                let parts: Vec<MitigatedEstimate> = sets
                    .iter()
                    .enumerate()
                    .map(|(i, ms)| lanczos_general(ms, settings.order, &sub.substream(i as u64)))
                    .collect::<qem_core::Result<_>>()?;
                wls_average(&parts)?
            }
            EstimatorKind::FixedRatio => {
                let ratio = resolve_ratio(settings, first, &sub)?;
                fixed_ratio_estimate(first, ratio, &sub)?
            }
            EstimatorKind::Constrained => {
                let cap = settings
                    .sigma_max
                    .ok_or_else(|| anyhow!("the constrained estimator needs mitigation.sigma_max"))?;
                constrained_select(first, cap, &sub)?
            }
        };
        out.push((*kind, est));
    }
    Ok(out)
}

/// The fixed-ratio filter ratio: configured value, else the measured
/// order-2 ratio ā0/ā1, else ⟨H⟩ + 1 when the moments are degenerate.
fn resolve_ratio(
    settings: &MitigationSettings,
    ms: &MomentSet,
    boot: &BootstrapCfg,
) -> Result<f64> {
    if let Some(r) = settings.fixed_ratio {
        return Ok(r);
    }
    let lan = lanczos_general(ms, 2, &boot.substream(u64::MAX))?;
    match (lan.degenerate, lan.a0, lan.a1) {
        (false, Some(a0), Some(a1)) if a1 != 0.0 => Ok(a0 / a1),
        _ => Ok(ms.mean(1) + 1.0),
    }
}

/// 12-hex digest over the scaling inputs (paths and contents), standing in
/// for the config hash on the config-free verb.
fn input_digest(files: &[PathBuf]) -> Result<String> {
    use sha2::{Digest, Sha256};
    let mut hasher = Sha256::new();
    for file in files {
        hasher.update(file.display().to_string().as_bytes());
        hasher.update([0]);
        let bytes = std::fs::read(file)
            .with_context(|| format!("cannot read operator file {}", file.display()))?;
        hasher.update(&bytes);
    }
    Ok(hex::encode(&hasher.finalize()[..6]))
}
