//! Per-gate noise channels and the readout error model.
//!
//! After every gate the simulator applies, to each qubit the gate touched,
//! three one-qubit channels in order:
//!
//! 1. depolarizing with probability `p_depol_1q` (or `p_depol_2q` after a
//!    CZ);
//! 2. phase flip with probability `(1 − e^{−t/tau1})/2`, where `t` is the
//!    gate duration — pure dephasing with time constant `tau1`;
//! 3. generalized amplitude damping with strength `1 − e^{−t/tau2}` toward a
//!    thermal state with excited-state population `thermal_population`.
//!
//! A time constant of zero disables the corresponding decay channel (the
//! infinite-lifetime limit, chosen so that the disabled state serialises to
//! plain JSON numbers).
//!
//! Readout error is classical: qubit `j` reports a flipped bit with
//! probability `p_flip_0to1` (true 0 read as 1) or `p_flip_1to0`. When the
//! two rates are equal the error is also expressible as a quantum channel,
//! `ε(ρ) = (1−2p)·ρ + p·(ρ + XρX + YρY + ZρZ)/2`; see
//! [`apply_readout_channel`]. The asymmetric case has no such form and is
//! handled during sampling instead.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{DensityMatrix, Mat2};
use crate::error::{Error, Result};

fn z(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Classical bit-flip probabilities of one qubit's readout.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ReadoutError {
    /// Probability that a true 0 is reported as 1.
    pub p_flip_0to1: f64,
    /// Probability that a true 1 is reported as 0.
    pub p_flip_1to0: f64,
}

impl ReadoutError {
    pub fn symmetric(p: f64) -> Self {
        ReadoutError {
            p_flip_0to1: p,
            p_flip_1to0: p,
        }
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (self.p_flip_0to1 - self.p_flip_1to0).abs() <= tol
    }

    fn validate(&self) -> Result<()> {
        for p in [self.p_flip_0to1, self.p_flip_1to0] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidParameter(format!(
                    "readout flip probability {p} outside [0, 1]"
                )));
            }
        }
        Ok(())
    }
}

/// Device-style noise parameters applied after every gate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseModel {
    /// Depolarizing probability attached to one-qubit gates.
    pub p_depol_1q: f64,
    /// Depolarizing probability attached to each qubit of a CZ.
    pub p_depol_2q: f64,
    /// Dephasing time constant (0 = disabled).
    pub tau1: f64,
    /// Thermal relaxation time constant (0 = disabled).
    pub tau2: f64,
    /// Duration of a one-qubit gate.
    pub gate_time_1q: f64,
    /// Duration of a CZ gate.
    pub gate_time_2q: f64,
    /// Equilibrium excited-state population of the relaxation channel.
    pub thermal_population: f64,
    /// Per-qubit readout flips; empty means ideal readout.
    #[serde(default)]
    pub readout: Vec<ReadoutError>,
}

impl Default for NoiseModel {
    fn default() -> Self {
        NoiseModel::ideal()
    }
}

impl NoiseModel {
    /// A model in which every channel is switched off.
    pub fn ideal() -> Self {
        NoiseModel {
            p_depol_1q: 0.0,
            p_depol_2q: 0.0,
            tau1: 0.0,
            tau2: 0.0,
            gate_time_1q: 0.0,
            gate_time_2q: 0.0,
            thermal_population: 0.0,
            readout: Vec::new(),
        }
    }

    /// Purely depolarizing model, often enough for qualitative studies.
    pub fn depolarizing(p_1q: f64, p_2q: f64) -> Self {
        NoiseModel {
            p_depol_1q: p_1q,
            p_depol_2q: p_2q,
            ..NoiseModel::ideal()
        }
    }

    pub fn with_symmetric_readout(mut self, n_qubits: usize, p: f64) -> Self {
        self.readout = vec![ReadoutError::symmetric(p); n_qubits];
        self
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        for (name, p) in [
            ("p_depol_1q", self.p_depol_1q),
            ("p_depol_2q", self.p_depol_2q),
            ("thermal_population", self.thermal_population),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidParameter(format!(
                    "{name} = {p} outside [0, 1]"
                )));
            }
        }
        for (name, t) in [
            ("tau1", self.tau1),
            ("tau2", self.tau2),
            ("gate_time_1q", self.gate_time_1q),
            ("gate_time_2q", self.gate_time_2q),
        ] {
            if !t.is_finite() || t < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "{name} = {t} must be finite and non-negative"
                )));
            }
        }
        if !self.readout.is_empty() && self.readout.len() != n_qubits {
            return Err(Error::InvalidParameter(format!(
                "readout table has {} entries for {n_qubits} qubits",
                self.readout.len()
            )));
        }
        for r in &self.readout {
            r.validate()?;
        }
        Ok(())
    }

    /// Readout flips of qubit `q` (ideal if no table is configured).
    pub fn readout_for(&self, q: usize) -> ReadoutError {
        self.readout.get(q).copied().unwrap_or_default()
    }

    /// True if any readout flip probability is non-zero.
    pub fn has_readout_error(&self) -> bool {
        self.readout
            .iter()
            .any(|r| r.p_flip_0to1 != 0.0 || r.p_flip_1to0 != 0.0)
    }

    /// Apply the after-gate channel stack to each listed qubit in order.
    pub(crate) fn apply_gate_noise(
        &self,
        rho: &mut DensityMatrix,
        qubits: &[usize],
        two_qubit: bool,
    ) {
        let (p_depol, t) = if two_qubit {
            (self.p_depol_2q, self.gate_time_2q)
        } else {
            (self.p_depol_1q, self.gate_time_1q)
        };
        let p_phase = decay_probability(t, self.tau1);
        let gamma_relax = decay_probability(t, self.tau2);
        for &q in qubits {
            if p_depol > 0.0 {
                rho.apply_one_qubit_kraus(q, &depolarizing_kraus(p_depol));
            }
            if p_phase > 0.0 {
                rho.apply_one_qubit_kraus(q, &phase_flip_kraus(p_phase));
            }
            if gamma_relax > 0.0 {
                rho.apply_one_qubit_kraus(
                    q,
                    &amplitude_damping_kraus(gamma_relax, self.thermal_population),
                );
            }
        }
    }
}

/// `1 − e^{−t/tau}`, with `tau = 0` meaning the channel is off.
pub fn decay_probability(t: f64, tau: f64) -> f64 {
    if tau <= 0.0 || t <= 0.0 {
        0.0
    } else {
        1.0 - (-t / tau).exp()
    }
}

/// Kraus operators of the one-qubit depolarizing channel with probability γ:
/// identity with weight 1 − 3γ/4, each Pauli with weight γ/4.
pub fn depolarizing_kraus(gamma: f64) -> [Mat2; 4] {
    let k0 = (1.0 - 0.75 * gamma).sqrt();
    let kp = (0.25 * gamma).sqrt();
    let o = Complex64::default();
    let i = Complex64::new(0.0, 1.0);
    [
        [[z(k0), o], [o, z(k0)]],
        [[o, z(kp)], [z(kp), o]],
        [[o, -i * kp], [i * kp, o]],
        [[z(kp), o], [o, z(-kp)]],
    ]
}

/// Phase flip: Z with probability p/2.
pub fn phase_flip_kraus(p: f64) -> [Mat2; 2] {
    let k0 = (1.0 - 0.5 * p).sqrt();
    let k1 = (0.5 * p).sqrt();
    let o = Complex64::default();
    [[[z(k0), o], [o, z(k0)]], [[z(k1), o], [o, z(-k1)]]]
}

/// Generalized amplitude damping with strength γ toward a thermal state
/// with excited-state population `n_th`.
pub fn amplitude_damping_kraus(gamma: f64, n_th: f64) -> [Mat2; 4] {
    let p_down = (1.0 - n_th).sqrt(); // relaxation toward |0⟩
    let p_up = n_th.sqrt(); // excitation toward |1⟩
    let sg = gamma.sqrt();
    let sk = (1.0 - gamma).sqrt();
    let o = Complex64::default();
    [
        [[z(p_down), o], [o, z(p_down * sk)]],
        [[o, z(p_down * sg)], [o, o]],
        [[z(p_up * sk), o], [o, z(p_up)]],
        [[o, o], [z(p_up * sg), o]],
    ]
}

/// Apply the *symmetric* readout error as a quantum channel on every qubit:
/// `ε_j(ρ) = (1−2p_j)·ρ + p_j·(ρ + X_jρX_j + Y_jρY_j + Z_jρZ_j)/2`.
///
/// Asymmetric tables are rejected — the biased flip is not expressible as a
/// channel independent of the measured operator, and must be folded into
/// sampling (see [`super::measure::sampled_expectation`]).
pub fn apply_readout_channel(
    rho: &DensityMatrix,
    flips: &[ReadoutError],
) -> Result<DensityMatrix> {
    if flips.len() != rho.n_qubits() {
        return Err(Error::InvalidParameter(format!(
            "readout table has {} entries for {} qubits",
            flips.len(),
            rho.n_qubits()
        )));
    }
    let mut out = rho.clone();
    for (q, r) in flips.iter().enumerate() {
        r.validate()?;
        if !r.is_symmetric(1e-12) {
            return Err(Error::InvalidParameter(format!(
                "readout on qubit {q} is asymmetric ({} vs {}); no channel form exists — \
                 use sampled_expectation, which models the bias classically",
                r.p_flip_0to1, r.p_flip_1to0
            )));
        }
        let p = r.p_flip_0to1;
        if p == 0.0 {
            continue;
        }
        // Block-wise: B → (1−2p)·B + p·tr(B)·I₂ on the qubit's 2×2 blocks,
        // which is the channel above written compactly.
        let m = super::qubit_mask(out.n_qubits(), q);
        let dim = out.dim();
        let data = &mut out.data;
        for r0 in 0..dim {
            if r0 & m != 0 {
                continue;
            }
            let r1 = r0 | m;
            for c0 in 0..dim {
                if c0 & m != 0 {
                    continue;
                }
                let c1 = c0 | m;
                let trace = data[[r0, c0]] + data[[r1, c1]];
                data[[r0, c0]] = (1.0 - 2.0 * p) * data[[r0, c0]] + p * trace;
                data[[r1, c1]] = (1.0 - 2.0 * p) * data[[r1, c1]] + p * trace;
                data[[r0, c1]] *= 1.0 - 2.0 * p;
                data[[r1, c0]] *= 1.0 - 2.0 * p;
            }
        }
    }
    Ok(out)
}
