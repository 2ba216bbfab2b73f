//! Hardware-efficient RyRz ansatz and the multistart VQE driver.
//!
//! The ansatz is an initial RY+RZ rotation pair on every qubit followed by
//! entangling layers, each a nearest-neighbour CZ chain plus another RY+RZ
//! pair per qubit. Optimization is SPSA (see [`spsa`]) with the protocol:
//! per restart, sample `n_init` uniform parameter sets, start SPSA from the
//! lowest-energy one, and keep the best restart.

pub mod spsa;

pub use spsa::{spsa_minimize, SpsaParams, SpsaRun, SpsaTraceRow};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::PauliSum;
use crate::seeds::{rng_for, split_seed};
use crate::sim::{
    run_circuit, sampled_expectation, Circuit, NoiseModel, ShotCount, ShotEstimate,
    MAX_SIM_QUBITS,
};
use rand::Rng;

/// Shape of the RyRz ansatz.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnsatzSpec {
    pub n_qubits: usize,
    pub n_entangling_layers: usize,
}

impl AnsatzSpec {
    pub fn new(n_qubits: usize, n_entangling_layers: usize) -> Result<Self> {
        let spec = AnsatzSpec {
            n_qubits,
            n_entangling_layers,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_qubits == 0 || self.n_qubits > MAX_SIM_QUBITS {
            return Err(Error::InvalidParameter(format!(
                "ansatz needs 1..={MAX_SIM_QUBITS} qubits, got {}",
                self.n_qubits
            )));
        }
        Ok(())
    }

    /// Total parameter count: one RY and one RZ per qubit in the initial
    /// layer and after every entangling layer.
    pub fn n_params(&self) -> usize {
        2 * self.n_qubits * (self.n_entangling_layers + 1)
    }

    /// Build the circuit for a parameter vector.
    ///
    /// Parameter order: qubit-major RY,RZ pairs for the initial layer, then
    /// the same pattern after each entangling CZ chain.
    pub fn build_ansatz(&self, theta: &[f64]) -> Result<Circuit> {
        self.validate()?;
        if theta.len() != self.n_params() {
            return Err(Error::InvalidParameter(format!(
                "ansatz wants {} parameters, got {}",
                self.n_params(),
                theta.len()
            )));
        }
        let mut circuit = Circuit::new(self.n_qubits)?;
        let mut next = 0;
        let rotation_layer = |c: &mut Circuit, next: &mut usize| -> Result<()> {
            for q in 0..self.n_qubits {
                c.ry(q, theta[*next])?;
                c.rz(q, theta[*next + 1])?;
                *next += 2;
            }
            Ok(())
        };
        rotation_layer(&mut circuit, &mut next)?;
        for _ in 0..self.n_entangling_layers {
            for q in 0..self.n_qubits.saturating_sub(1) {
                circuit.cz(q, q + 1)?;
            }
            rotation_layer(&mut circuit, &mut next)?;
        }
        Ok(circuit)
    }
}

/// Multistart VQE protocol parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VqeConfig {
    /// Uniform parameter sets sampled per restart; the lowest-energy one
    /// seeds the optimizer.
    pub n_init: usize,
    /// Independent restarts; the best final energy wins.
    pub n_vqe: usize,
    /// SPSA iterations per restart.
    pub n_steps: usize,
    pub shots: ShotCount,
    pub spsa: SpsaParams,
    pub seed: u64,
}

impl Default for VqeConfig {
    fn default() -> Self {
        VqeConfig {
            n_init: 5,
            n_vqe: 1,
            n_steps: 200,
            shots: ShotCount::Exact,
            spsa: SpsaParams::default(),
            seed: 0,
        }
    }
}

impl VqeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_init == 0 || self.n_vqe == 0 {
            return Err(Error::InvalidParameter(
                "n_init and n_vqe must be at least 1".into(),
            ));
        }
        self.spsa.validate()
    }
}

/// Outcome of a full multistart run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VqeRun {
    pub theta_opt: Vec<f64>,
    pub energy: ShotEstimate,
    /// Per-restart optimizer runs, in restart order.
    pub restarts: Vec<SpsaRun>,
    pub best_restart: usize,
}

/// The measured VQE objective: simulate the ansatz under noise and sample
/// ⟨H⟩ with a fresh derived seed per evaluation.
pub struct EnergyObjective<'a> {
    h: &'a PauliSum,
    spec: AnsatzSpec,
    noise: Option<&'a NoiseModel>,
    shots: ShotCount,
    seed: u64,
    n_evals: u64,
}

impl<'a> EnergyObjective<'a> {
    pub fn new(
        h: &'a PauliSum,
        spec: AnsatzSpec,
        noise: Option<&'a NoiseModel>,
        shots: ShotCount,
        seed: u64,
    ) -> Result<Self> {
        if h.n_qubits() != spec.n_qubits {
            return Err(Error::DimensionMismatch {
                left: h.n_qubits(),
                right: spec.n_qubits,
            });
        }
        Ok(EnergyObjective {
            h,
            spec,
            noise,
            shots,
            seed,
            n_evals: 0,
        })
    }

    /// Evaluations consumed so far (each draws an independent seed).
    pub fn n_evals(&self) -> u64 {
        self.n_evals
    }

    /// Evaluate ⟨H⟩ at `theta` with the configured shots times `shot_multiplier`.
    pub fn eval(&mut self, theta: &[f64], shot_multiplier: u64) -> Result<ShotEstimate> {
        let circuit = self.spec.build_ansatz(theta)?;
        let rho = run_circuit(&circuit, self.noise)?;
        let readout = self.noise.map_or(&[][..], |n| n.readout.as_slice());
        let mut rng = rng_for(self.seed, self.n_evals);
        self.n_evals += 1;
        sampled_expectation(
            &rho,
            self.h,
            self.shots.scaled(shot_multiplier),
            readout,
            &mut rng,
        )
    }
}

/// Run the full multistart VQE protocol.
pub fn run_vqe(
    h: &PauliSum,
    spec: AnsatzSpec,
    config: &VqeConfig,
    noise: Option<&NoiseModel>,
) -> Result<VqeRun> {
    config.validate()?;
    spec.validate()?;
    let d = spec.n_params();
    let mut restarts = Vec::with_capacity(config.n_vqe);
    for r in 0..config.n_vqe {
        let restart_seed = split_seed(config.seed, r as u64);
        let mut objective = EnergyObjective::new(
            h,
            spec,
            noise,
            config.shots,
            split_seed(restart_seed, 0),
        )?;
        // Uniform candidate starts; lowest measured energy wins.
        let mut init_rng = rng_for(restart_seed, 1);
        let mut best_start: Option<(Vec<f64>, f64)> = None;
        for _ in 0..config.n_init {
            let theta: Vec<f64> = (0..d)
                .map(|_| init_rng.random_range(0.0..std::f64::consts::TAU))
                .collect();
            let e = objective.eval(&theta, 1)?;
            if best_start.as_ref().is_none_or(|(_, b)| e.value < *b) {
                best_start = Some((theta, e.value));
            }
        }
        let (theta0, _) = best_start.expect("n_init >= 1");
        let run = spsa_minimize(
            |theta, mult| objective.eval(theta, mult),
            &theta0,
            &config.spsa,
            config.n_steps,
            split_seed(restart_seed, 2),
        )?;
        restarts.push(run);
    }
    let best_restart = restarts
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| a.energy.value.total_cmp(&b.energy.value))
        .map(|(i, _)| i)
        .expect("n_vqe >= 1");
    Ok(VqeRun {
        theta_opt: restarts[best_restart].theta_opt.clone(),
        energy: restarts[best_restart].energy,
        restarts,
        best_restart,
    })
}
