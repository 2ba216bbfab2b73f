//! Experiment configuration: one JSON document drives every verb.
//!
//! The document carries an explicit `schema_version` so stored configs stay
//! readable as the tool evolves, and the effective configuration (after
//! command-line overrides) is hashed into every output row for provenance.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use qem_core::mitigation::Method;
use qem_core::models::ModelSpec;
use qem_core::sim::{NoiseModel, ShotCount};
use qem_core::vqe::{AnsatzSpec, VqeConfig};
use qem_core::zne::ZneConfig;

/// Config contract version understood by this binary.
pub const SCHEMA_VERSION: u32 = 1;

/// Estimators the `mitigate`, `sweep` and `histogram` verbs can evaluate.
///
/// Parameters shared by a family (Krylov order, precision cap, filter ratio)
/// live in [`MitigationSettings`] so the list stays a plain list of names.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    /// The unmitigated sample mean ⟨H⟩.
    Bare,
    /// Krylov ground-energy estimate of the configured order.
    Lanczos,
    /// ⟨H³⟩^(1/3).
    CubeRoot,
    /// Error-weighted average of order-2 estimates over all repeats.
    Wls,
    /// Filtered estimate at a fixed ratio r = a0/a1.
    FixedRatio,
    /// Lowest feasible energy under the `sigma_max` precision cap.
    Constrained,
}

impl EstimatorKind {
    /// Method-column tag; matches [`Method::tag`] where a counterpart exists.
    pub fn tag(&self, order: usize) -> String {
        match self {
            EstimatorKind::Bare => Method::Bare.tag(),
            EstimatorKind::Lanczos => Method::Lanczos { order }.tag(),
            EstimatorKind::CubeRoot => Method::CubeRoot.tag(),
            EstimatorKind::Wls => Method::Wls.tag(),
            EstimatorKind::FixedRatio => Method::FixedRatio { ratio: 0.0 }.tag(),
            EstimatorKind::Constrained => "constrained".into(),
        }
    }
}

/// Moment-measurement and estimator parameters shared by the mitigation
/// verbs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MitigationSettings {
    /// Krylov order m; moments up to H^(2m−1) are measured (at least H³).
    pub order: usize,
    /// Precision cap for the constrained estimator.
    pub sigma_max: Option<f64>,
    /// Independent moment sets measured per estimation; the weighted
    /// average runs over all of them, every other estimator uses the first.
    pub n_repeat: usize,
    /// Estimators evaluated per run, in output order.
    pub estimators: Vec<EstimatorKind>,
    /// Shots per measured Pauli string.
    pub shots: ShotCount,
    /// Filter ratio r for the fixed-ratio estimator; omitted → reuse the
    /// measured order-2 ratio ā0/ā1, falling back to ⟨H⟩ + 1 when the
    /// moments are degenerate.
    pub fixed_ratio: Option<f64>,
    /// Bootstrap resamples behind every sampled error bar.
    pub bootstrap_resamples: usize,
    /// Precision caps profiled by the sweep smoothness table.
    pub sigma_grid: Vec<f64>,
}

impl Default for MitigationSettings {
    fn default() -> Self {
        MitigationSettings {
            order: 2,
            sigma_max: None,
            n_repeat: 5,
            estimators: vec![
                EstimatorKind::Bare,
                EstimatorKind::Lanczos,
                EstimatorKind::CubeRoot,
                EstimatorKind::Wls,
                EstimatorKind::FixedRatio,
            ],
            shots: ShotCount::Finite(8192),
            fixed_ratio: None,
            bootstrap_resamples: 2000,
            sigma_grid: vec![0.001, 0.003, 0.01, 0.03, 0.1, 0.3, 1.0],
        }
    }
}

impl MitigationSettings {
    /// Highest moment power the configured estimators consume.
    pub fn max_power(&self) -> usize {
        (2 * self.order - 1).max(3)
    }

    fn validate(&self) -> Result<()> {
        if self.order < 1 {
            bail!("mitigation.order must be at least 1");
        }
        if self.n_repeat < 1 {
            bail!("mitigation.n_repeat must be at least 1");
        }
        if self.estimators.is_empty() {
            bail!("mitigation.estimators must name at least one estimator");
        }
        if self.estimators.contains(&EstimatorKind::Constrained) && self.sigma_max.is_none() {
            bail!("the constrained estimator needs mitigation.sigma_max");
        }
        if let Some(cap) = self.sigma_max {
            if !(cap > 0.0) || !cap.is_finite() {
                bail!("mitigation.sigma_max must be positive and finite, got {cap}");
            }
        }
        if self.bootstrap_resamples < 2 {
            bail!("mitigation.bootstrap_resamples must be at least 2");
        }
        if self.sigma_grid.iter().any(|&s| !(s > 0.0) || !s.is_finite()) {
            bail!("mitigation.sigma_grid entries must be positive and finite");
        }
        Ok(())
    }
}

/// The whole experiment: model, ansatz, optimizer, noise, estimators and
/// provenance in one document.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub model: ModelSpec,
    pub ansatz: AnsatzSpec,
    #[serde(default)]
    pub vqe: VqeConfig,
    /// Absent or `null` runs the ideal, noiseless device.
    #[serde(default)]
    pub noise: Option<NoiseModel>,
    #[serde(default)]
    pub mitigation: MitigationSettings,
    #[serde(default)]
    pub zne: ZneConfig,
    /// Ensemble size for `histogram` and the folding budget comparison.
    #[serde(default = "default_repetitions")]
    pub n_repetitions: usize,
    /// Master seed; every stream any verb consumes is split from it.
    pub seed: u64,
    /// Output directory, created on demand.
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

fn default_repetitions() -> usize {
    200
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

impl ExperimentConfig {
    /// Parse a configuration file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let cfg: ExperimentConfig = serde_json::from_str(&text)
            .with_context(|| format!("cannot parse config {}", path.display()))?;
        Ok(cfg)
    }

    /// Fold command-line overrides into the document. `--exact` switches
    /// every shot budget to the infinite-shot limit.
    pub fn apply_overrides(
        &mut self,
        seed: Option<u64>,
        out: Option<PathBuf>,
        exact: bool,
    ) {
        if let Some(s) = seed {
            self.seed = s;
        }
        if let Some(dir) = out {
            self.output_dir = dir;
        }
        if exact {
            self.vqe.shots = ShotCount::Exact;
            self.mitigation.shots = ShotCount::Exact;
            self.zne.shots = ShotCount::Exact;
        }
    }

    /// Check the fields the library will not see until much later.
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            bail!(
                "config schema_version {} is not supported (this binary understands {})",
                self.schema_version,
                SCHEMA_VERSION
            );
        }
        if self.n_repetitions < 1 {
            bail!("n_repetitions must be at least 1");
        }
        if let ModelSpec::PauliFile { path } = &self.model {
            if !Path::new(path).exists() {
                bail!("model file {path} does not exist");
            }
        }
        self.mitigation.validate()?;
        self.zne.validate().context("zne configuration")?;
        Ok(())
    }

    /// First 12 hex characters of the SHA-256 of the effective config.
    ///
    /// Hashed after overrides, so rows always name the configuration that
    /// actually produced them. The output directory is excluded: moving
    /// the data must not change its provenance.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.output_dir = PathBuf::new();
        let bytes = serde_json::to_vec(&canonical).expect("config serialises");
        hex::encode(&Sha256::digest(&bytes)[..6])
    }

    /// Per-qubit readout flips of the active noise model (empty = ideal).
    pub fn readout(&self) -> &[qem_core::sim::ReadoutError] {
        self.noise.as_ref().map_or(&[], |n| n.readout.as_slice())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_json() -> serde_json::Value {
        serde_json::json!({
            "schema_version": 1,
            "model": { "kind": "triplet_pair" },
            "ansatz": { "n_qubits": 2, "n_entangling_layers": 1 },
            "seed": 7
        })
    }

    #[test]
    fn minimal_config_parses_with_defaults() {
        let cfg: ExperimentConfig = serde_json::from_value(minimal_json()).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.n_repetitions, 200);
        assert_eq!(cfg.mitigation.order, 2);
        assert_eq!(cfg.mitigation.max_power(), 3);
        assert_eq!(cfg.output_dir, PathBuf::from("out"));
        assert!(cfg.noise.is_none());
        assert!(cfg.readout().is_empty());
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let mut doc = minimal_json();
        doc["surprise"] = serde_json::json!(1);
        assert!(serde_json::from_value::<ExperimentConfig>(doc).is_err());
    }

    #[test]
    fn validation_catches_bad_settings() {
        let mut cfg: ExperimentConfig = serde_json::from_value(minimal_json()).unwrap();
        cfg.schema_version = 2;
        assert!(cfg.validate().is_err());

        let mut cfg: ExperimentConfig = serde_json::from_value(minimal_json()).unwrap();
        cfg.mitigation.estimators = vec![EstimatorKind::Constrained];
        assert!(cfg.validate().unwrap_err().to_string().contains("sigma_max"));
        cfg.mitigation.sigma_max = Some(0.1);
        cfg.validate().unwrap();

        let mut cfg: ExperimentConfig = serde_json::from_value(minimal_json()).unwrap();
        cfg.model = ModelSpec::PauliFile { path: "definitely/not/here.json".into() };
        assert!(cfg.validate().unwrap_err().to_string().contains("does not exist"));
    }

    #[test]
    fn overrides_change_the_hash_and_the_budgets() {
        let mut cfg: ExperimentConfig = serde_json::from_value(minimal_json()).unwrap();
        let before = cfg.hash();
        assert_eq!(before.len(), 12);
        assert_eq!(before, cfg.hash(), "hashing is deterministic");

        cfg.apply_overrides(None, Some(PathBuf::from("elsewhere")), false);
        assert_eq!(cfg.output_dir, PathBuf::from("elsewhere"));
        assert_eq!(before, cfg.hash(), "moving the output does not change provenance");

        cfg.apply_overrides(Some(8), None, true);
        assert_eq!(cfg.seed, 8);
        assert!(cfg.vqe.shots.is_exact());
        assert!(cfg.mitigation.shots.is_exact());
        assert!(cfg.zne.shots.is_exact());
        assert_ne!(before, cfg.hash());
    }

    #[test]
    fn estimator_tags_match_the_library() {
        assert_eq!(EstimatorKind::Bare.tag(2), "bare");
        assert_eq!(EstimatorKind::Lanczos.tag(3), "lanczos_m3");
        assert_eq!(EstimatorKind::CubeRoot.tag(2), "cube_root");
        assert_eq!(EstimatorKind::Wls.tag(2), "wls");
        assert_eq!(EstimatorKind::FixedRatio.tag(2), "fixed_ratio");
        assert_eq!(EstimatorKind::Constrained.tag(2), "constrained");
    }
}
