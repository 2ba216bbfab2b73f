//! Ground-energy estimators built from the power moments ⟨H^l⟩.
//!
//! Measuring H, H², H³, … on a noisy state and solving the small Krylov
//! eigenproblem they define yields an energy estimate far below the bare
//! ⟨H⟩, because the implied filter polynomial suppresses the spectral weight
//! that noise pushed into excited states. This module implements that
//! estimator at order 2 in closed form ([`lanczos_order2`]), at general
//! order via Hankel matrices ([`lanczos_general`]), plus the cheaper
//! cube-root and fixed-ratio variants, a precision-constrained selector
//! that trades bias against statistical error, and the diagnostics
//! (overlap-improvement condition, spectral weights, sweep smoothness) used
//! to decide whether to trust the result.
//!
//! All estimators propagate moment errors with a seeded parametric
//! bootstrap (see [`bootstrap`]); exact moment sets short-circuit to zero
//! standard error.

pub mod bootstrap;

pub use bootstrap::{propagate_uncertainty, BootstrapCfg, PropagationMode};

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::pauli::{PauliSum, DEFAULT_PRUNE_TOL};
use crate::sim::{sampled_expectation, DensityMatrix, ReadoutError, ShotCount, ShotEstimate};

/// β₂² below this (relative to max(1, ⟨H²⟩)) collapses the order-2 Krylov
/// space: the state is numerically an eigenstate.
pub const DEGENERACY_TOL: f64 = 1e-10;

/// Hankel eigenvalues below `RANK_TOL · trace/m` are truncated in the
/// general-order solver.
pub const RANK_TOL: f64 = 1e-10;

/// The measured moments μ_l = ⟨H^l⟩ for l = 0, …, max_power (μ₀ ≡ 1).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentSet {
    moments: Vec<ShotEstimate>,
}

impl MomentSet {
    /// Wrap per-power estimates; entry 0 must be the exact 1.
    pub fn from_estimates(moments: Vec<ShotEstimate>) -> Result<Self> {
        if moments.len() < 2 {
            return Err(Error::InvalidParameter(
                "a moment set needs at least μ₀ and μ₁".into(),
            ));
        }
        if (moments[0].value - 1.0).abs() > 1e-12 || moments[0].stderr != 0.0 {
            return Err(Error::InvalidParameter(format!(
                "μ₀ must be exactly 1 (got {} ± {})",
                moments[0].value, moments[0].stderr
            )));
        }
        for (l, m) in moments.iter().enumerate() {
            if !m.value.is_finite() || !m.stderr.is_finite() || m.stderr < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "moment {l} is not finite: {} ± {}",
                    m.value, m.stderr
                )));
            }
        }
        Ok(MomentSet { moments })
    }

    /// Exact moments from plain values (index = power; entry 0 must be 1).
    pub fn exact(values: &[f64]) -> Result<Self> {
        MomentSet::from_estimates(values.iter().map(|&v| ShotEstimate::exact(v)).collect())
    }

    /// Highest measured power.
    pub fn max_power(&self) -> usize {
        self.moments.len() - 1
    }

    /// Largest Krylov order supported: order m needs moments up to 2m−1.
    pub fn krylov_order(&self) -> usize {
        self.max_power().div_ceil(2)
    }

    pub fn mean(&self, power: usize) -> f64 {
        self.moments[power].value
    }

    pub fn stderr(&self, power: usize) -> f64 {
        self.moments[power].stderr
    }

    pub fn estimate(&self, power: usize) -> ShotEstimate {
        self.moments[power]
    }

    /// True when every moment has zero statistical error.
    pub fn is_exact(&self) -> bool {
        self.moments.iter().all(|m| m.stderr == 0.0)
    }

    fn require_power(&self, power: usize, what: &str) -> Result<()> {
        if self.max_power() < power {
            return Err(Error::InvalidParameter(format!(
                "{what} needs moments up to power {power}, measured only {}",
                self.max_power()
            )));
        }
        Ok(())
    }
}

/// Measure the moment set of `h` on a state: μ_l for l = 0, …, `max_power`.
///
/// Each power is expanded into Pauli strings and measured independently
/// (fresh shots, a fresh derived seed per power). A Krylov order-m estimate
/// needs `max_power = 2m − 1`.
pub fn measure_moments(
    rho: &DensityMatrix,
    h: &PauliSum,
    max_power: usize,
    shots: ShotCount,
    readout: &[ReadoutError],
    seed: u64,
) -> Result<MomentSet> {
    if max_power < 1 {
        return Err(Error::InvalidParameter(
            "max_power must be at least 1".into(),
        ));
    }
    let powers = h.powers_up_to(max_power as u32, DEFAULT_PRUNE_TOL)?;
    let mut moments = vec![ShotEstimate::exact(1.0)];
    for (l, hl) in powers.iter().enumerate().skip(1) {
        let mut rng = crate::seeds::rng_for(seed, l as u64);
        moments.push(sampled_expectation(rho, hl, shots, readout, &mut rng)?);
    }
    MomentSet::from_estimates(moments)
}

/// Which estimator produced a [`MitigatedEstimate`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Method {
    Bare,
    Lanczos { order: usize },
    CubeRoot,
    Wls,
    FixedRatio { ratio: f64 },
}

impl Method {
    /// Short tag for data files.
    pub fn tag(&self) -> String {
        match self {
            Method::Bare => "bare".into(),
            Method::Lanczos { order } => format!("lanczos_m{order}"),
            Method::CubeRoot => "cube_root".into(),
            Method::Wls => "wls".into(),
            Method::FixedRatio { .. } => "fixed_ratio".into(),
        }
    }
}

/// A ground-energy estimate with its provenance and diagnostics.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MitigatedEstimate {
    pub energy: ShotEstimate,
    pub method: Method,
    /// Filter polynomial f(x) = a0 − a1·x of the order-2 ground vector
    /// (absent for estimators that do not define one).
    pub a0: Option<f64>,
    pub a1: Option<f64>,
    /// Left side of the overlap-improvement condition (order ≤ 2 only).
    pub condition_value: Option<f64>,
    /// The Krylov space collapsed (eigenstate input) and the bare mean was
    /// returned.
    pub degenerate: bool,
    /// Cube-root result landed above the bare mean — suggest discarding.
    pub discard: bool,
    /// Constrained selection found no candidate within the precision cap
    /// and fell back to the bare estimate.
    pub constraint_infeasible: bool,
}

impl MitigatedEstimate {
    fn new(energy: ShotEstimate, method: Method) -> Self {
        MitigatedEstimate {
            energy,
            method,
            a0: None,
            a1: None,
            condition_value: None,
            degenerate: false,
            discard: false,
            constraint_infeasible: false,
        }
    }
}

/// The unmitigated estimate: μ₁ as measured.
pub fn bare_estimate(ms: &MomentSet) -> MitigatedEstimate {
    MitigatedEstimate {
        a0: Some(1.0),
        a1: Some(0.0),
        condition_value: Some(1.0),
        ..MitigatedEstimate::new(ms.estimate(1), Method::Bare)
    }
}

// Closed-form order-2 solution on plain moment values.
// Returns (energy, a0, a1, degenerate).
fn lanczos2_point(mu: &[f64]) -> (f64, f64, f64, bool) {
    let (m1, m2, m3) = (mu[1], mu[2], mu[3]);
    let beta2_sq = m2 - m1 * m1;
    if beta2_sq < DEGENERACY_TOL * m2.abs().max(1.0) {
        return (m1, 1.0, 0.0, true);
    }
    let alpha1 = m1;
    let alpha2 = (m3 - 2.0 * m2 * m1 + m1 * m1 * m1) / beta2_sq;
    let beta2 = beta2_sq.sqrt();
    let half_diff = 0.5 * (alpha1 - alpha2);
    let energy = 0.5 * (alpha1 + alpha2) - (half_diff * half_diff + beta2_sq).sqrt();
    // Ground vector of the 2×2 tridiagonal matrix, turned into the filter
    // polynomial coefficients f(x) = a0 − a1·x.
    let (c1, c2) = (beta2, energy - alpha1);
    let norm = (c1 * c1 + c2 * c2).sqrt();
    let (c1, c2) = (c1 / norm, c2 / norm);
    let a0 = c1 - c2 * alpha1 / beta2;
    let a1 = -c2 / beta2;
    (energy, a0, a1, false)
}

fn energy_estimate(ms: &MomentSet, point: impl Fn(&[f64]) -> f64, boot: &BootstrapCfg) -> ShotEstimate {
    let means: Vec<f64> = (0..=ms.max_power()).map(|l| ms.mean(l)).collect();
    ShotEstimate {
        value: point(&means),
        stderr: propagate_uncertainty(ms, &point, PropagationMode::Bootstrap(boot)),
        shots: ms.estimate(1).shots,
    }
}

/// Order-2 Krylov estimate in closed form, with the ground-vector filter
/// coefficients and the overlap-improvement condition value.
///
/// Needs moments up to power 3. When the state is (numerically) an
/// eigenstate the Krylov space collapses; the bare mean is returned with
/// `degenerate` set.
pub fn lanczos_order2(ms: &MomentSet, boot: &BootstrapCfg) -> Result<MitigatedEstimate> {
    ms.require_power(3, "the order-2 estimator")?;
    let energy = energy_estimate(ms, |mu| lanczos2_point(mu).0, boot);
    let means: Vec<f64> = (0..=ms.max_power()).map(|l| ms.mean(l)).collect();
    let (_, a0, a1, degenerate) = lanczos2_point(&means);
    let mut est = MitigatedEstimate::new(energy, Method::Lanczos { order: 2 });
    est.a0 = Some(a0);
    est.a1 = Some(a1);
    est.degenerate = degenerate;
    est.condition_value = Some(condition_point(&means, energy.value, a0, a1, degenerate));
    Ok(est)
}

// General-order solution on plain moment values: build the Hankel pair,
// whiten by the overlap matrix with rank truncation, take the lowest Ritz
// value. Returns (energy, retained rank).
fn lanczos_general_point(mu: &[f64], m: usize) -> (f64, usize) {
    let mut s = Array2::<f64>::zeros((m, m));
    let mut hk = Array2::<f64>::zeros((m, m));
    for i in 0..m {
        for j in 0..m {
            s[[i, j]] = mu[i + j];
            hk[[i, j]] = mu[i + j + 1];
        }
    }
    let (s_vals, s_vecs) = match linalg::symmetric_eigen(&s) {
        Ok(x) => x,
        Err(_) => return (mu[1], 0),
    };
    let trace: f64 = s_vals.iter().sum();
    let cutoff = RANK_TOL * trace.abs().max(f64::MIN_POSITIVE) / m as f64;
    let kept: Vec<usize> = (0..m).filter(|&i| s_vals[i] > cutoff).collect();
    if kept.is_empty() {
        return (mu[1], 0);
    }
    let r = kept.len();
    // Whitening map W; columns are kept eigenvectors scaled by λ^{-1/2}.
    let mut w = Array2::<f64>::zeros((m, r));
    for (col, &i) in kept.iter().enumerate() {
        let scale = 1.0 / s_vals[i].sqrt();
        for row in 0..m {
            w[[row, col]] = s_vecs[[row, i]] * scale;
        }
    }
    let mut b = w.t().dot(&hk).dot(&w);
    // Symmetrise against roundoff before the eigensolve.
    for i in 0..r {
        for j in (i + 1)..r {
            let avg = 0.5 * (b[[i, j]] + b[[j, i]]);
            b[[i, j]] = avg;
            b[[j, i]] = avg;
        }
    }
    match linalg::symmetric_eigen(&b) {
        Ok((vals, _)) => (vals[0], r),
        Err(_) => (mu[1], 0),
    }
}

/// Krylov estimate of arbitrary order `m ≥ 1` (order 1 is the bare mean).
///
/// Needs moments up to power 2m−1. Solves the generalized eigenproblem on
/// the moment Hankel matrices with spectral rank truncation, so saturated
/// orders (m beyond the number of distinct populated levels) return the
/// exact lowest populated energy instead of failing.
pub fn lanczos_general(ms: &MomentSet, m: usize, boot: &BootstrapCfg) -> Result<MitigatedEstimate> {
    if m < 1 {
        return Err(Error::InvalidParameter("Krylov order must be ≥ 1".into()));
    }
    ms.require_power(2 * m - 1, &format!("the order-{m} estimator"))?;
    if m == 1 {
        let mut est = bare_estimate(ms);
        est.method = Method::Lanczos { order: 1 };
        return Ok(est);
    }
    let energy = energy_estimate(ms, |mu| lanczos_general_point(mu, m).0, boot);
    let means: Vec<f64> = (0..=ms.max_power()).map(|l| ms.mean(l)).collect();
    let (_, rank) = lanczos_general_point(&means, m);
    let mut est = MitigatedEstimate::new(energy, Method::Lanczos { order: m });
    est.degenerate = rank <= 1;
    if m == 2 {
        let (_, a0, a1, deg2) = lanczos2_point(&means);
        est.a0 = Some(a0);
        est.a1 = Some(a1);
        est.degenerate = est.degenerate || deg2;
        est.condition_value = Some(condition_point(
            &means,
            energy.value,
            a0,
            a1,
            est.degenerate,
        ));
    }
    Ok(est)
}

/// Cube-root estimate: ∛⟨H³⟩, the cheapest odd-power filter.
///
/// Needs moments up to power 3. The standard error uses first-order
/// propagation where it is stable and falls back to the bootstrap when
/// ⟨H³⟩ is too close to zero; `discard` is set when the result does not
/// undercut the bare mean.
pub fn cube_root_estimate(ms: &MomentSet, boot: &BootstrapCfg) -> Result<MitigatedEstimate> {
    ms.require_power(3, "the cube-root estimator")?;
    let m3 = ms.mean(3);
    let value = m3.cbrt();
    let scale = ms.mean(2).abs().max(1.0).powf(1.5);
    let stderr = if ms.is_exact() {
        0.0
    } else if m3.abs() >= 1e-9 * scale {
        ms.stderr(3) / (3.0 * value * value)
    } else {
        propagate_uncertainty(ms, &|mu: &[f64]| mu[3].cbrt(), PropagationMode::Bootstrap(boot))
    };
    let mut est = MitigatedEstimate::new(
        ShotEstimate {
            value,
            stderr,
            shots: ms.estimate(1).shots,
        },
        Method::CubeRoot,
    );
    est.discard = value > ms.mean(1);
    Ok(est)
}

/// Inverse-variance weighted average of repeated estimates.
///
/// Any zero-error (exact) inputs dominate: the result is then the plain
/// mean of the exact subset with zero error.
pub fn wls_average(estimates: &[MitigatedEstimate]) -> Result<MitigatedEstimate> {
    if estimates.is_empty() {
        return Err(Error::InvalidParameter(
            "weighted average needs at least one estimate".into(),
        ));
    }
    for e in estimates {
        if !e.energy.value.is_finite() || !e.energy.stderr.is_finite() || e.energy.stderr < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "weighted average input is not finite: {} ± {}",
                e.energy.value, e.energy.stderr
            )));
        }
    }
    let shots = estimates[0].energy.shots;
    let exact: Vec<&MitigatedEstimate> =
        estimates.iter().filter(|e| e.energy.stderr == 0.0).collect();
    let energy = if !exact.is_empty() {
        let mean = exact.iter().map(|e| e.energy.value).sum::<f64>() / exact.len() as f64;
        ShotEstimate {
            value: mean,
            stderr: 0.0,
            shots,
        }
    } else {
        let mut wsum = 0.0;
        let mut acc = 0.0;
        for e in estimates {
            let w = 1.0 / (e.energy.stderr * e.energy.stderr);
            wsum += w;
            acc += w * e.energy.value;
        }
        ShotEstimate {
            value: acc / wsum,
            stderr: (1.0 / wsum).sqrt(),
            shots,
        }
    };
    Ok(MitigatedEstimate::new(energy, Method::Wls))
}

// Fixed-ratio energy on plain moment values; degenerate denominators fall
// back to the bare mean (important inside the bootstrap: those resamples
// must be counted, blowing up the spread, rather than dropped).
fn fixed_ratio_point(mu: &[f64], r: f64) -> f64 {
    let den = r * r - 2.0 * r * mu[1] + mu[2];
    if den <= 0.0 || !den.is_finite() {
        return mu[1];
    }
    (r * r * mu[1] - 2.0 * r * mu[2] + mu[3]) / den
}

/// Order-2 estimate with the filter-ratio a0/a1 pinned to `ratio` instead
/// of optimised: E(r) = (r²μ₁ − 2rμ₂ + μ₃)/(r² − 2rμ₁ + μ₂).
///
/// An infinite ratio is the bare mean. Errors when the denominator
/// ⟨(r−H)²⟩ vanishes, which happens exactly when the state is an
/// eigenstate with energy `ratio`.
pub fn fixed_ratio_estimate(
    ms: &MomentSet,
    ratio: f64,
    boot: &BootstrapCfg,
) -> Result<MitigatedEstimate> {
    ms.require_power(3, "the fixed-ratio estimator")?;
    if ratio.is_nan() {
        return Err(Error::InvalidParameter("ratio must not be NaN".into()));
    }
    if ratio.is_infinite() {
        return Ok(bare_estimate(ms));
    }
    let (m1, m2) = (ms.mean(1), ms.mean(2));
    let den = ratio * ratio - 2.0 * ratio * m1 + m2;
    let den_scale = (ratio * ratio).max(m2.abs()).max(1.0);
    if den <= 1e-12 * den_scale {
        return Err(Error::Numerical(format!(
            "fixed-ratio denominator ⟨(r−H)²⟩ = {den:.3e} vanishes at r = {ratio}; \
             the ratio sits on a populated energy level"
        )));
    }
    let energy = energy_estimate(ms, |mu| fixed_ratio_point(mu, ratio), boot);
    let means: Vec<f64> = (0..=ms.max_power()).map(|l| ms.mean(l)).collect();
    let mut est = MitigatedEstimate::new(energy, Method::FixedRatio { ratio });
    est.a0 = Some(ratio);
    est.a1 = Some(1.0);
    est.condition_value = Some(condition_point(&means, energy.value, ratio, 1.0, false));
    Ok(est)
}

/// Pick the lowest-energy estimate whose bootstrap error fits under
/// `sigma_max`.
///
/// If the free order-2 estimate already satisfies the cap it wins. Otherwise
/// the filter ratio is scanned on log-spaced offsets around the optimal
/// a0/a1 (plus the bare estimate as the r → ∞ endpoint), and the lowest
/// feasible energy is returned. With no feasible candidate at all the bare
/// estimate comes back flagged `constraint_infeasible`.
pub fn constrained_select(
    ms: &MomentSet,
    sigma_max: f64,
    boot: &BootstrapCfg,
) -> Result<MitigatedEstimate> {
    if !(sigma_max > 0.0) || !sigma_max.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "sigma_max must be positive and finite, got {sigma_max}"
        )));
    }
    let lan = lanczos_order2(ms, &boot.substream(0))?;
    if lan.energy.stderr <= sigma_max {
        return Ok(lan);
    }
    let bare = bare_estimate(ms);
    let mut best: Option<MitigatedEstimate> = None;
    let mut consider = |cand: &MitigatedEstimate| {
        if cand.energy.stderr <= sigma_max
            && best
                .as_ref()
                .is_none_or(|b| cand.energy.value < b.energy.value)
        {
            best = Some(*cand);
        }
    };
    consider(&bare);
    if !lan.degenerate {
        let r_opt = lan.a0.unwrap() / lan.a1.unwrap();
        let scale = r_opt.abs().max(ms.mean(2).abs().sqrt()).max(1.0);
        let n_per_side = 200usize;
        for k in 0..n_per_side {
            // Offsets from 1e−3·scale to 1e4·scale, log-spaced.
            let offset = scale * 10f64.powf(-3.0 + 7.0 * k as f64 / (n_per_side - 1) as f64);
            for r in [r_opt + offset, r_opt - offset] {
                if let Ok(cand) = fixed_ratio_estimate(ms, r, &boot.substream(1 + k as u64)) {
                    consider(&cand);
                }
            }
        }
    }
    Ok(best.unwrap_or_else(|| {
        let mut fallback = bare;
        fallback.constraint_infeasible = true;
        fallback
    }))
}

/// One row of a sweep-smoothness profile.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DeltaHRow {
    pub sigma_max: f64,
    /// Total variation Σ|E_{h+1} − E_h| of the constrained estimate along
    /// the sweep.
    pub delta: f64,
    /// Sweep points where no candidate met the cap.
    pub n_infeasible: usize,
}

/// Smoothness of the constrained estimate across a parameter sweep, per
/// precision cap.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DeltaHProfile {
    pub rows: Vec<DeltaHRow>,
    /// Cap with the smallest total variation (largest cap wins ties);
    /// `None` when the sweep has fewer than two points.
    pub recommended_sigma_max: Option<f64>,
}

/// Profile the constrained estimator's sweep smoothness over a grid of
/// precision caps. A sweep with fewer than two points yields an empty
/// profile (nothing to difference).
pub fn delta_h_profile(
    sweep: &[(f64, MomentSet)],
    sigma_grid: &[f64],
    boot: &BootstrapCfg,
) -> Result<DeltaHProfile> {
    if sweep.len() < 2 {
        return Ok(DeltaHProfile {
            rows: Vec::new(),
            recommended_sigma_max: None,
        });
    }
    let mut rows = Vec::with_capacity(sigma_grid.len());
    for (si, &sigma_max) in sigma_grid.iter().enumerate() {
        let mut energies = Vec::with_capacity(sweep.len());
        let mut n_infeasible = 0;
        for (hi, (_, ms)) in sweep.iter().enumerate() {
            let est = constrained_select(
                ms,
                sigma_max,
                &boot.substream((si * sweep.len() + hi) as u64),
            )?;
            if est.constraint_infeasible {
                n_infeasible += 1;
            }
            energies.push(est.energy.value);
        }
        let delta: f64 = energies.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
        rows.push(DeltaHRow {
            sigma_max,
            delta,
            n_infeasible,
        });
    }
    let recommended = rows
        .iter()
        .fold(None::<&DeltaHRow>, |best, row| match best {
            None => Some(row),
            Some(b) if row.delta < b.delta - 1e-15 => Some(row),
            Some(b) if (row.delta - b.delta).abs() <= 1e-15 && row.sigma_max > b.sigma_max => {
                Some(row)
            }
            Some(b) => Some(b),
        })
        .map(|r| r.sigma_max);
    Ok(DeltaHProfile {
        rows,
        recommended_sigma_max: recommended,
    })
}

fn condition_point(mu: &[f64], energy: f64, a0: f64, a1: f64, degenerate: bool) -> f64 {
    if degenerate {
        return 1.0;
    }
    let num = (a0 - a1 * energy).powi(2);
    let den = a0 * a0 - 2.0 * a0 * a1 * mu[1] + a1 * a1 * mu[2];
    num / den
}

/// Report of the overlap-improvement condition for an order-2 estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    /// (a0 − a1·E)² / ⟨f(H)²⟩ — values above 1 certify that filtering
    /// increased the ground-state weight.
    pub value: f64,
    /// Whether the filter root a0/a1 lies above the estimated energy
    /// (`None` when a1 = 0).
    pub ratio_exceeds_energy: Option<bool>,
    /// Collapsed Krylov space: the condition degenerates to exactly 1.
    pub degenerate: bool,
}

/// Evaluate the overlap-improvement condition for an estimate carrying
/// order-2 filter coefficients.
pub fn overlap_condition(ms: &MomentSet, est: &MitigatedEstimate) -> Result<ConditionReport> {
    ms.require_power(2, "the overlap condition")?;
    if est.degenerate {
        return Ok(ConditionReport {
            value: 1.0,
            ratio_exceeds_energy: None,
            degenerate: true,
        });
    }
    let (a0, a1) = match (est.a0, est.a1) {
        (Some(a0), Some(a1)) => (a0, a1),
        _ => {
            return Err(Error::InvalidParameter(format!(
                "the overlap condition needs order-2 filter coefficients; {} has none",
                est.method.tag()
            )))
        }
    };
    let means: Vec<f64> = (0..=ms.max_power()).map(|l| ms.mean(l)).collect();
    let value = condition_point(&means, est.energy.value, a0, a1, false);
    let ratio_exceeds_energy = (a1 != 0.0).then(|| a0 / a1 > est.energy.value);
    Ok(ConditionReport {
        value,
        ratio_exceeds_energy,
        degenerate: false,
    })
}

/// Spectral weight of a state on one energy level, before and after the
/// order-2 filter.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SpectralWeight {
    pub energy: f64,
    /// ⟨E|ρ|E⟩ summed over the level's eigenspace.
    pub weight: f64,
    /// Weight after applying f(H) = a0 − a1·H, renormalised.
    pub filtered_weight: f64,
}

/// Decompose a state over the eigenlevels of `h` and show how the order-2
/// filter rebalances the weights. Levels closer than 1e−8 (relative to the
/// spectral spread) are merged.
pub fn spectral_weights(
    rho: &DensityMatrix,
    h: &PauliSum,
    a0: f64,
    a1: f64,
) -> Result<Vec<SpectralWeight>> {
    if rho.n_qubits() != h.n_qubits() {
        return Err(Error::DimensionMismatch {
            left: rho.n_qubits(),
            right: h.n_qubits(),
        });
    }
    let (evals, evecs) = linalg::hermitian_eigen(&h.to_matrix())?;
    let dim = rho.dim();
    let spread = (evals[dim - 1] - evals[0]).abs().max(1.0);
    let mut merged: Vec<(f64, f64)> = Vec::new(); // (energy, weight)
    for (k, &ek) in evals.iter().enumerate() {
        let vk = evecs.column(k);
        let mut w = 0.0;
        for r in 0..dim {
            for c in 0..dim {
                w += (vk[r].conj() * rho.data()[[r, c]] * vk[c]).re;
            }
        }
        match merged.last_mut() {
            Some((e, acc)) if (ek - *e).abs() <= 1e-8 * spread => *acc += w,
            _ => merged.push((ek, w)),
        }
    }
    let filtered_total: f64 = merged
        .iter()
        .map(|&(e, w)| w * (a0 - a1 * e).powi(2))
        .sum();
    if filtered_total <= 0.0 {
        return Err(Error::Numerical(
            "the filter annihilates the entire state; weights are undefined".into(),
        ));
    }
    Ok(merged
        .into_iter()
        .map(|(energy, weight)| SpectralWeight {
            energy,
            weight,
            filtered_weight: weight * (a0 - a1 * energy).powi(2) / filtered_total,
        })
        .collect())
}
