//! Simultaneous perturbation stochastic approximation.
//!
//! Each step estimates the full gradient from two objective evaluations at
//! θ ± c_k·Δ with a Rademacher direction Δ, then descends with gain a_k.
//! Gains follow the standard schedules a_k = a/(k+1+A)^α, c_k = c/(k+1)^γ.
//! Because the final iterate of a noisy run is unreliable, the returned
//! optimum re-evaluates the most recent iterates at boosted shots and keeps
//! the lowest.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seeds::rng_for;
use crate::sim::ShotEstimate;
use rand::Rng;

/// How many trailing iterates the final re-evaluation considers.
const FINAL_CANDIDATES: usize = 10;

/// Shot multiplier for the final re-evaluation pass.
const FINAL_SHOT_BOOST: u64 = 5;

/// SPSA gain-sequence parameters.
///
/// `a_gain` and `stability` default to problem-adapted values: the
/// stability constant A becomes 0.1·n_steps, and `a` is calibrated from ten
/// probe gradients so the first step moves a parameter by about
/// `first_step_target` radians. The target defaults to a tenth of a full
/// turn (2π/10), the customary choice for angle-valued parameters; smaller
/// targets make the decaying gain schedule too timid to cross unit-scale
/// distances in a few hundred steps.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpsaParams {
    pub a_gain: Option<f64>,
    pub c_gain: f64,
    pub stability: Option<f64>,
    pub alpha: f64,
    pub gamma: f64,
    pub first_step_target: f64,
}

impl Default for SpsaParams {
    fn default() -> Self {
        SpsaParams {
            a_gain: None,
            c_gain: 0.1,
            stability: None,
            alpha: 0.602,
            gamma: 0.101,
            first_step_target: std::f64::consts::TAU / 10.0,
        }
    }
}

impl SpsaParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("c_gain", self.c_gain),
            ("alpha", self.alpha),
            ("gamma", self.gamma),
            ("first_step_target", self.first_step_target),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "SPSA {name} must be positive and finite, got {v}"
                )));
            }
        }
        for (name, v) in [("a_gain", self.a_gain), ("stability", self.stability)] {
            if let Some(v) = v {
                if !(v >= 0.0) || !v.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "SPSA {name} must be non-negative and finite, got {v}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// One optimizer step in the emitted trace.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SpsaTraceRow {
    pub step: usize,
    /// Mean of the two perturbed evaluations — a cheap on-trajectory
    /// energy estimate.
    pub energy: f64,
    pub stderr: f64,
    /// Running minimum of `energy`; non-increasing by construction.
    pub best_so_far: f64,
}

/// Result of one SPSA run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpsaRun {
    pub theta_opt: Vec<f64>,
    /// Objective at `theta_opt` from the boosted-shot re-evaluation.
    pub energy: ShotEstimate,
    pub trace: Vec<SpsaTraceRow>,
}

/// Minimize a noisy objective with SPSA.
///
/// The objective receives the parameter vector and a shot multiplier
/// (1 during the search, larger for the final re-evaluation). Zero steps
/// returns the initial point after measuring it once.
pub fn spsa_minimize<F>(
    mut objective: F,
    theta0: &[f64],
    params: &SpsaParams,
    n_steps: usize,
    seed: u64,
) -> Result<SpsaRun>
where
    F: FnMut(&[f64], u64) -> Result<ShotEstimate>,
{
    params.validate()?;
    if theta0.is_empty() {
        return Err(Error::InvalidParameter(
            "SPSA needs at least one parameter".into(),
        ));
    }
    let d = theta0.len();
    let big_a = params.stability.unwrap_or(0.1 * n_steps as f64);
    let mut rng = rng_for(seed, 0);
    let c0 = params.c_gain;
    let a = match params.a_gain {
        Some(a) => a,
        None => {
            // Probe the gradient magnitude at the start point to size the
            // first step near the requested target.
            let mut total = 0.0;
            let mut count = 0;
            for _ in 0..10 {
                let delta: Vec<f64> =
                    (0..d).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect();
                let plus: Vec<f64> =
                    theta0.iter().zip(&delta).map(|(t, s)| t + c0 * s).collect();
                let minus: Vec<f64> =
                    theta0.iter().zip(&delta).map(|(t, s)| t - c0 * s).collect();
                let ep = objective(&plus, 1)?;
                let em = objective(&minus, 1)?;
                total += ((ep.value - em.value) / (2.0 * c0)).abs();
                count += 1;
            }
            let mean_grad = total / count as f64;
            if mean_grad > 1e-12 {
                params.first_step_target * (1.0 + big_a).powf(params.alpha) / mean_grad
            } else {
                params.first_step_target * (1.0 + big_a).powf(params.alpha)
            }
        }
    };

    let mut theta = theta0.to_vec();
    let mut trace = Vec::with_capacity(n_steps);
    let mut recent: Vec<Vec<f64>> = vec![theta.clone()];
    let mut best_so_far = f64::INFINITY;
    for k in 0..n_steps {
        let ak = a / ((k as f64 + 1.0 + big_a).powf(params.alpha));
        let ck = c0 / ((k as f64 + 1.0).powf(params.gamma));
        let delta: Vec<f64> =
            (0..d).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect();
        let plus: Vec<f64> = theta.iter().zip(&delta).map(|(t, s)| t + ck * s).collect();
        let minus: Vec<f64> = theta.iter().zip(&delta).map(|(t, s)| t - ck * s).collect();
        let ep = objective(&plus, 1)?;
        let em = objective(&minus, 1)?;
        let diff = ep.value - em.value;
        for (t, s) in theta.iter_mut().zip(&delta) {
            *t -= ak * diff / (2.0 * ck * s);
        }
        let energy = 0.5 * (ep.value + em.value);
        let stderr = 0.5 * (ep.stderr * ep.stderr + em.stderr * em.stderr).sqrt();
        best_so_far = best_so_far.min(energy);
        trace.push(SpsaTraceRow {
            step: k,
            energy,
            stderr,
            best_so_far,
        });
        recent.push(theta.clone());
        if recent.len() > FINAL_CANDIDATES {
            recent.remove(0);
        }
    }

    // Choose the reported optimum among the trailing iterates with a
    // higher-precision measurement.
    let mut best: Option<(usize, ShotEstimate)> = None;
    for (i, cand) in recent.iter().enumerate() {
        let e = objective(cand, FINAL_SHOT_BOOST)?;
        if best.as_ref().is_none_or(|(_, b)| e.value < b.value) {
            best = Some((i, e));
        }
    }
    let (idx, energy) = best.expect("at least the start point is a candidate");
    Ok(SpsaRun {
        theta_opt: recent.swap_remove(idx),
        energy,
        trace,
    })
}
