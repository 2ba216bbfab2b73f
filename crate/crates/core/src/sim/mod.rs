//! Dense density-matrix simulation of RY/RZ/CZ circuits.
//!
//! States are full 2ⁿ×2ⁿ density matrices (n ≤ 8), so arbitrary mixed states
//! and non-unital noise are represented exactly. Basis states are indexed
//! big-endian: qubit 0 is the most significant bit of the index, matching
//! the leftmost site of a Pauli label.
//!
//! Gate noise is applied per gate through [`noise::NoiseModel`]; measurement
//! (exact, or shot-sampled with readout error) lives in [`measure`].

pub mod measure;
pub mod noise;

pub use measure::{exact_expectation, sampled_expectation, ShotCount, ShotEstimate};
pub use noise::{NoiseModel, ReadoutError};

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};

/// Largest simulable register (dense 256×256 matrices).
pub const MAX_SIM_QUBITS: usize = 8;

/// Mask selecting the index bit of qubit `q` (qubit 0 most significant).
#[inline]
pub(crate) fn qubit_mask(n_qubits: usize, q: usize) -> usize {
    1usize << (n_qubits - 1 - q)
}

/// Row-major 2×2 complex matrix, the element type of one-qubit channels.
pub type Mat2 = [[Complex64; 2]; 2];

/// A density matrix on `n_qubits` qubits.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    n_qubits: usize,
    data: CMat,
}

fn check_sim_qubits(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 || n_qubits > MAX_SIM_QUBITS {
        return Err(Error::InvalidParameter(format!(
            "simulator supports 1..={MAX_SIM_QUBITS} qubits, got {n_qubits}"
        )));
    }
    Ok(())
}

impl DensityMatrix {
    /// The all-zeros computational basis state |0…0⟩⟨0…0|.
    pub fn zero_state(n_qubits: usize) -> Result<Self> {
        check_sim_qubits(n_qubits)?;
        let dim = 1usize << n_qubits;
        let mut data = Array2::zeros((dim, dim));
        data[[0, 0]] = Complex64::new(1.0, 0.0);
        Ok(DensityMatrix { n_qubits, data })
    }

    /// The maximally mixed state `I / 2ⁿ`.
    pub fn maximally_mixed(n_qubits: usize) -> Result<Self> {
        check_sim_qubits(n_qubits)?;
        let dim = 1usize << n_qubits;
        let data = Array2::from_diag_elem(dim, Complex64::new(1.0 / dim as f64, 0.0));
        Ok(DensityMatrix { n_qubits, data })
    }

    /// Projector onto a (normalised internally) pure state vector.
    pub fn from_pure(n_qubits: usize, amplitudes: &[Complex64]) -> Result<Self> {
        check_sim_qubits(n_qubits)?;
        let dim = 1usize << n_qubits;
        if amplitudes.len() != dim {
            return Err(Error::InvalidParameter(format!(
                "state vector length {} does not match dimension {dim}",
                amplitudes.len()
            )));
        }
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if norm_sq < 1e-300 {
            return Err(Error::InvalidParameter("zero state vector".into()));
        }
        let mut data = Array2::zeros((dim, dim));
        for r in 0..dim {
            for c in 0..dim {
                data[[r, c]] = amplitudes[r] * amplitudes[c].conj() / norm_sq;
            }
        }
        Ok(DensityMatrix { n_qubits, data })
    }

    /// Wrap an explicit matrix; must be Hermitian with unit trace.
    pub fn from_matrix(n_qubits: usize, data: CMat) -> Result<Self> {
        check_sim_qubits(n_qubits)?;
        let dim = 1usize << n_qubits;
        if data.dim() != (dim, dim) {
            return Err(Error::InvalidParameter(format!(
                "matrix shape {:?} does not match {dim}x{dim}",
                data.dim()
            )));
        }
        if !linalg::is_hermitian(&data, 1e-9) {
            return Err(Error::NotHermitian("density matrix".into()));
        }
        let tr = data.diag().sum();
        if (tr - Complex64::new(1.0, 0.0)).norm() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "density matrix trace {tr} is not 1"
            )));
        }
        Ok(DensityMatrix { n_qubits, data })
    }

    /// A random full-rank mixed state (normalised Wishart draw).
    pub fn random_mixed<R: rand::Rng>(n_qubits: usize, rng: &mut R) -> Result<Self> {
        check_sim_qubits(n_qubits)?;
        let dim = 1usize << n_qubits;
        let mut g: CMat = Array2::zeros((dim, dim));
        for z in g.iter_mut() {
            *z = Complex64::new(
                rng.sample(rand_distr::StandardNormal),
                rng.sample(rand_distr::StandardNormal),
            );
        }
        let mut w = g.dot(&linalg::dagger(&g));
        let tr: Complex64 = w.diag().sum();
        w.mapv_inplace(|z| z / tr);
        Ok(DensityMatrix { n_qubits, data: w })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1usize << self.n_qubits
    }

    pub fn data(&self) -> &CMat {
        &self.data
    }

    pub fn trace(&self) -> Complex64 {
        self.data.diag().sum()
    }

    /// Tr[ρ²], equal to 1 exactly for pure states.
    pub fn purity(&self) -> f64 {
        self.data
            .iter()
            .map(|z| z.norm_sqr())
            .sum()
    }

    /// Full physicality check: Hermitian, unit trace, positive semidefinite.
    pub fn validate(&self, tol: f64) -> Result<()> {
        if !linalg::is_hermitian(&self.data, tol) {
            return Err(Error::NotHermitian("density matrix".into()));
        }
        if (self.trace() - Complex64::new(1.0, 0.0)).norm() > tol {
            return Err(Error::Numerical(format!("trace drifted to {}", self.trace())));
        }
        let (evals, _) = linalg::hermitian_eigen(&self.data)?;
        if evals[0] < -tol {
            return Err(Error::Numerical(format!(
                "negative eigenvalue {} in density matrix",
                evals[0]
            )));
        }
        Ok(())
    }

    /// Apply a 2×2 unitary on qubit `q`: ρ → UρU†.
    pub(crate) fn apply_one_qubit_unitary(&mut self, q: usize, u: &Mat2) {
        self.apply_one_qubit_kraus(q, std::slice::from_ref(u));
    }

    /// Apply a one-qubit channel given by Kraus operators: ρ → Σ KρK†.
    ///
    /// Works block-wise on the 2×2 sub-blocks selected by the qubit's index
    /// bit, so the full matrix is traversed once.
    pub fn apply_one_qubit_kraus(&mut self, q: usize, ops: &[Mat2]) {
        let m = qubit_mask(self.n_qubits, q);
        let dim = self.dim();
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
                let b = [
                    [self.data[[r0, c0]], self.data[[r0, c1]]],
                    [self.data[[r1, c0]], self.data[[r1, c1]]],
                ];
                let mut out = [[Complex64::default(); 2]; 2];
                for k in ops {
                    // k · b · k†
                    for i in 0..2 {
                        for j in 0..2 {
                            let mut acc = Complex64::default();
                            for s in 0..2 {
                                for t in 0..2 {
                                    acc += k[i][s] * b[s][t] * k[j][t].conj();
                                }
                            }
                            out[i][j] += acc;
                        }
                    }
                }
                self.data[[r0, c0]] = out[0][0];
                self.data[[r0, c1]] = out[0][1];
                self.data[[r1, c0]] = out[1][0];
                self.data[[r1, c1]] = out[1][1];
            }
        }
    }

    /// Apply a controlled-Z between two qubits (diagonal sign flips).
    pub(crate) fn apply_cz(&mut self, a: usize, b: usize) {
        let ma = qubit_mask(self.n_qubits, a);
        let mb = qubit_mask(self.n_qubits, b);
        let dim = self.dim();
        let both = |idx: usize| idx & ma != 0 && idx & mb != 0;
        for r in 0..dim {
            for c in 0..dim {
                if both(r) != both(c) {
                    self.data[[r, c]] = -self.data[[r, c]];
                }
            }
        }
    }
}

/// One circuit element.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gate {
    Ry { qubit: usize, theta: f64 },
    Rz { qubit: usize, theta: f64 },
    Cz { a: usize, b: usize },
}

impl Gate {
    fn validate(&self, n_qubits: usize) -> Result<()> {
        let check = |q: usize| {
            if q >= n_qubits {
                Err(Error::InvalidParameter(format!(
                    "gate qubit {q} out of range for {n_qubits} qubits"
                )))
            } else {
                Ok(())
            }
        };
        match *self {
            Gate::Ry { qubit, .. } | Gate::Rz { qubit, .. } => check(qubit),
            Gate::Cz { a, b } => {
                check(a)?;
                check(b)?;
                if a == b {
                    return Err(Error::InvalidParameter(
                        "controlled-Z needs two distinct qubits".into(),
                    ));
                }
                Ok(())
            }
        }
    }
}

/// An ordered list of gates with a CZ fold factor.
///
/// The fold factor amplifies two-qubit noise for extrapolation runs: each CZ
/// is executed `cz_fold` times consecutively (odd, so the unitary part is
/// unchanged while the attached noise acts repeatedly).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CircuitWire", into = "CircuitWire")]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
    cz_fold: usize,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Result<Self> {
        check_sim_qubits(n_qubits)?;
        Ok(Circuit {
            n_qubits,
            gates: Vec::new(),
            cz_fold: 1,
        })
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.n_qubits)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn ry(&mut self, qubit: usize, theta: f64) -> Result<()> {
        self.push(Gate::Ry { qubit, theta })
    }

    pub fn rz(&mut self, qubit: usize, theta: f64) -> Result<()> {
        self.push(Gate::Rz { qubit, theta })
    }

    pub fn cz(&mut self, a: usize, b: usize) -> Result<()> {
        self.push(Gate::Cz { a, b })
    }

    /// Copy of the circuit with a new (odd) fold factor.
    pub fn with_cz_fold(&self, cz_fold: usize) -> Result<Self> {
        if cz_fold == 0 || cz_fold.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "fold factor must be odd and positive, got {cz_fold}"
            )));
        }
        Ok(Circuit {
            cz_fold,
            ..self.clone()
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn cz_fold(&self) -> usize {
        self.cz_fold
    }

    /// Number of CZ gates as written (before folding).
    pub fn n_cz(&self) -> usize {
        self.gates
            .iter()
            .filter(|g| matches!(g, Gate::Cz { .. }))
            .count()
    }
}

// --- wire form -------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct GateWire {
    g: String,
    q: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    theta: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct CircuitWire {
    n_qubits: usize,
    gates: Vec<GateWire>,
    cz_fold: usize,
}

impl From<Circuit> for CircuitWire {
    fn from(c: Circuit) -> Self {
        let gates = c
            .gates
            .iter()
            .map(|g| match *g {
                Gate::Ry { qubit, theta } => GateWire {
                    g: "ry".into(),
                    q: vec![qubit],
                    theta: Some(theta),
                },
                Gate::Rz { qubit, theta } => GateWire {
                    g: "rz".into(),
                    q: vec![qubit],
                    theta: Some(theta),
                },
                Gate::Cz { a, b } => GateWire {
                    g: "cz".into(),
                    q: vec![a, b],
                    theta: None,
                },
            })
            .collect();
        CircuitWire {
            n_qubits: c.n_qubits,
            gates,
            cz_fold: c.cz_fold,
        }
    }
}

impl TryFrom<CircuitWire> for Circuit {
    type Error = Error;

    fn try_from(w: CircuitWire) -> Result<Self> {
        let mut c = Circuit::new(w.n_qubits)?;
        for (i, gw) in w.gates.iter().enumerate() {
            let bad = |msg: &str| Error::Parse(format!("gate {i}: {msg}"));
            let gate = match gw.g.as_str() {
                "ry" | "rz" => {
                    if gw.q.len() != 1 {
                        return Err(bad("rotation takes exactly one qubit"));
                    }
                    let theta = gw.theta.ok_or_else(|| bad("rotation needs theta"))?;
                    if gw.g == "ry" {
                        Gate::Ry {
                            qubit: gw.q[0],
                            theta,
                        }
                    } else {
                        Gate::Rz {
                            qubit: gw.q[0],
                            theta,
                        }
                    }
                }
                "cz" => {
                    if gw.q.len() != 2 {
                        return Err(bad("cz takes exactly two qubits"));
                    }
                    if gw.theta.is_some() {
                        return Err(bad("cz takes no angle"));
                    }
                    Gate::Cz {
                        a: gw.q[0],
                        b: gw.q[1],
                    }
                }
                other => return Err(bad(&format!("unknown gate {other:?}"))),
            };
            c.push(gate)?;
        }
        c = c.with_cz_fold(w.cz_fold)?;
        Ok(c)
    }
}

// --- evolution -------------------------------------------------------------

fn ry_matrix(theta: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    let z = |x: f64| Complex64::new(x, 0.0);
    [[z(c), z(-s)], [z(s), z(c)]]
}

fn rz_matrix(theta: f64) -> Mat2 {
    let o = Complex64::default();
    [
        [Complex64::from_polar(1.0, -theta / 2.0), o],
        [o, Complex64::from_polar(1.0, theta / 2.0)],
    ]
}

/// Apply one gate (a single CZ instance, ignoring the fold factor) followed
/// by the noise channels attached to every qubit the gate touches.
pub fn apply_gate(rho: &mut DensityMatrix, gate: &Gate, noise: Option<&NoiseModel>) -> Result<()> {
    gate.validate(rho.n_qubits())?;
    match *gate {
        Gate::Ry { qubit, theta } => {
            rho.apply_one_qubit_unitary(qubit, &ry_matrix(theta));
            if let Some(nm) = noise {
                nm.apply_gate_noise(rho, &[qubit], false);
            }
        }
        Gate::Rz { qubit, theta } => {
            rho.apply_one_qubit_unitary(qubit, &rz_matrix(theta));
            if let Some(nm) = noise {
                nm.apply_gate_noise(rho, &[qubit], false);
            }
        }
        Gate::Cz { a, b } => {
            rho.apply_cz(a, b);
            if let Some(nm) = noise {
                nm.apply_gate_noise(rho, &[a, b], true);
            }
        }
    }
    let drift = (rho.trace() - Complex64::new(1.0, 0.0)).norm();
    if drift > 1e-8 {
        return Err(Error::Numerical(format!(
            "trace drifted by {drift:.3e} after {gate:?}"
        )));
    }
    Ok(())
}

/// Run a circuit from |0…0⟩, honouring the CZ fold factor.
///
/// Readout error is *not* applied here; it belongs to measurement.
pub fn run_circuit(circuit: &Circuit, noise: Option<&NoiseModel>) -> Result<DensityMatrix> {
    if let Some(nm) = noise {
        nm.validate(circuit.n_qubits())?;
    }
    let mut rho = DensityMatrix::zero_state(circuit.n_qubits())?;
    for gate in circuit.gates() {
        let reps = if matches!(gate, Gate::Cz { .. }) {
            circuit.cz_fold()
        } else {
            1
        };
        for _ in 0..reps {
            apply_gate(&mut rho, gate, noise)?;
        }
    }
    Ok(rho)
}
