//! Expectation values: exact traces and simulated shot sampling.
//!
//! Sampling follows the hardware protocol string by string: the state is
//! rotated into the measurement basis of each Pauli string, the joint
//! outcome distribution over the string's support is pushed through the
//! per-qubit readout confusion matrices, and a binomial draw of the parity
//! turns the distribution into a finite-shot estimate. Identity sites are
//! not measured and therefore pick up no readout error.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use super::noise::ReadoutError;
use super::DensityMatrix;
use crate::error::{Error, Result};
use crate::pauli::{PauliSum, PauliTerm};

/// Shot budget of a measurement: a finite count or the infinite-shot limit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ShotCountWire", into = "ShotCountWire")]
pub enum ShotCount {
    /// Infinite-shot limit: expectation values are exact (post-readout) and
    /// standard errors are zero.
    Exact,
    Finite(u64),
}

impl ShotCount {
    pub fn is_exact(&self) -> bool {
        matches!(self, ShotCount::Exact)
    }

    /// Scale a finite budget (exact stays exact).
    pub fn scaled(&self, factor: u64) -> ShotCount {
        match *self {
            ShotCount::Exact => ShotCount::Exact,
            ShotCount::Finite(n) => ShotCount::Finite(n * factor),
        }
    }

    fn validate(&self) -> Result<()> {
        if let ShotCount::Finite(0) = self {
            return Err(Error::InvalidParameter(
                "shot count must be positive (use \"exact\" for the infinite-shot limit)".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ShotCountWire {
    N(u64),
    S(String),
}

impl From<ShotCount> for ShotCountWire {
    fn from(s: ShotCount) -> Self {
        match s {
            ShotCount::Exact => ShotCountWire::S("exact".into()),
            ShotCount::Finite(n) => ShotCountWire::N(n),
        }
    }
}

impl TryFrom<ShotCountWire> for ShotCount {
    type Error = Error;

    fn try_from(w: ShotCountWire) -> Result<Self> {
        match w {
            ShotCountWire::N(n) => {
                let s = ShotCount::Finite(n);
                s.validate()?;
                Ok(s)
            }
            ShotCountWire::S(s) if s == "exact" => Ok(ShotCount::Exact),
            ShotCountWire::S(s) => Err(Error::Parse(format!(
                "shot count must be a positive integer or \"exact\", got {s:?}"
            ))),
        }
    }
}

/// A measured value with its statistical uncertainty.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShotEstimate {
    pub value: f64,
    pub stderr: f64,
    pub shots: ShotCount,
}

impl ShotEstimate {
    pub fn exact(value: f64) -> Self {
        ShotEstimate {
            value,
            stderr: 0.0,
            shots: ShotCount::Exact,
        }
    }
}

/// Tr[ρ·P] for a single string (letter convention: the Y sites carry their
/// own phase). O(2ⁿ) — one matrix element per basis state.
fn trace_with_term(rho: &DensityMatrix, term: &PauliTerm) -> Complex64 {
    let x = term.x_mask() as usize;
    let z = term.z_mask() as usize;
    let w = (term.x_mask() & term.z_mask()).count_ones();
    let phase = match w % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    };
    let dim = rho.dim();
    let mut acc = Complex64::default();
    for a in 0..dim {
        let sign = if ((z & a).count_ones()).is_multiple_of(2) {
            1.0
        } else {
            -1.0
        };
        acc += sign * rho.data()[[a, a ^ x]];
    }
    term.coeff() * phase * acc
}

/// Exact expectation value ⟨O⟩ = Tr[ρO] of a Hermitian sum.
pub fn exact_expectation(rho: &DensityMatrix, observable: &PauliSum) -> Result<f64> {
    if rho.n_qubits() != observable.n_qubits() {
        return Err(Error::DimensionMismatch {
            left: rho.n_qubits(),
            right: observable.n_qubits(),
        });
    }
    if !observable.is_hermitian(1e-9) {
        return Err(Error::NotHermitian(format!(
            "observable has imaginary coefficient residue {:.3e}",
            observable.max_im()
        )));
    }
    let mut acc = Complex64::default();
    for t in observable.terms() {
        acc += trace_with_term(rho, &t);
    }
    Ok(acc.re)
}

// Measurement-basis rotations (map the string's eigenbasis to the Z basis).
fn basis_rotation(p: crate::pauli::Pauli) -> Option<[[Complex64; 2]; 2]> {
    let h = 1.0 / 2.0_f64.sqrt();
    let z = |re: f64, im: f64| Complex64::new(re, im);
    match p {
        crate::pauli::Pauli::X => Some([[z(h, 0.0), z(h, 0.0)], [z(h, 0.0), z(-h, 0.0)]]),
        // H·S†: sends the Y eigenbasis to the computational basis.
        crate::pauli::Pauli::Y => Some([[z(h, 0.0), z(0.0, -h)], [z(h, 0.0), z(0.0, h)]]),
        crate::pauli::Pauli::Z => None, // already diagonal
        crate::pauli::Pauli::I => None,
    }
}

/// Joint outcome distribution of one string over its support qubits,
/// after readout confusion. `support` lists qubits in ascending order; bit
/// `j` (LSB = last support qubit) of a pattern index is the reported bit.
fn outcome_distribution(
    rho: &DensityMatrix,
    term: &PauliTerm,
    support: &[usize],
    readout: &[ReadoutError],
) -> Vec<f64> {
    // Rotate a copy into the measurement basis, then read the diagonal.
    let mut rot = rho.clone();
    for &q in support {
        if let Some(u) = basis_rotation(term.pauli_at(q)) {
            rot.apply_one_qubit_unitary(q, &u);
        }
    }
    let k = support.len();
    let n = rho.n_qubits();
    let mut probs = vec![0.0f64; 1 << k];
    for a in 0..rho.dim() {
        let mut pattern = 0usize;
        for (j, &q) in support.iter().enumerate() {
            if a & super::qubit_mask(n, q) != 0 {
                pattern |= 1 << (k - 1 - j);
            }
        }
        probs[pattern] += rot.data()[[a, a]].re;
    }
    // Fold in the classical confusion matrix of each measured qubit.
    for (j, &q) in support.iter().enumerate() {
        let r = readout.get(q).copied().unwrap_or_default();
        if r.p_flip_0to1 == 0.0 && r.p_flip_1to0 == 0.0 {
            continue;
        }
        let bit = 1 << (k - 1 - j);
        for pat0 in 0..probs.len() {
            if pat0 & bit != 0 {
                continue;
            }
            let pat1 = pat0 | bit;
            let (p0, p1) = (probs[pat0], probs[pat1]);
            probs[pat0] = (1.0 - r.p_flip_0to1) * p0 + r.p_flip_1to0 * p1;
            probs[pat1] = r.p_flip_0to1 * p0 + (1.0 - r.p_flip_1to0) * p1;
        }
    }
    probs
}

/// Simulate measuring ⟨O⟩ with a finite shot budget per Pauli string.
///
/// Each non-identity string is measured independently with `shots` shots:
/// outcome bit 0 maps to +1, the string value is the parity product over its
/// support, and `readout` flips reported bits classically (asymmetric
/// tables are fine here). [`ShotCount::Exact`] skips the binomial draw and
/// returns the post-readout mean with zero standard error.
pub fn sampled_expectation<R: Rng>(
    rho: &DensityMatrix,
    observable: &PauliSum,
    shots: ShotCount,
    readout: &[ReadoutError],
    rng: &mut R,
) -> Result<ShotEstimate> {
    if rho.n_qubits() != observable.n_qubits() {
        return Err(Error::DimensionMismatch {
            left: rho.n_qubits(),
            right: observable.n_qubits(),
        });
    }
    if !observable.is_hermitian(1e-9) {
        return Err(Error::NotHermitian(format!(
            "observable has imaginary coefficient residue {:.3e}",
            observable.max_im()
        )));
    }
    shots.validate()?;
    if !readout.is_empty() && readout.len() != rho.n_qubits() {
        return Err(Error::InvalidParameter(format!(
            "readout table has {} entries for {} qubits",
            readout.len(),
            rho.n_qubits()
        )));
    }
    let mut value = 0.0;
    let mut variance = 0.0;
    for term in observable.terms() {
        let coeff = term.coeff().re;
        if term.is_identity() {
            value += coeff; // measured without shots: a constant offset
            continue;
        }
        let support: Vec<usize> = (0..rho.n_qubits())
            .filter(|&q| term.support_mask() & crate::pauli::bit_for_qubit(rho.n_qubits(), q) != 0)
            .collect();
        let probs = outcome_distribution(rho, &term, &support, readout);
        let p_plus: f64 = probs
            .iter()
            .enumerate()
            .filter(|(pat, _)| pat.count_ones() % 2 == 0)
            .map(|(_, p)| p)
            .sum();
        let p_plus = p_plus.clamp(0.0, 1.0);
        let (est, se) = match shots {
            ShotCount::Exact => (2.0 * p_plus - 1.0, 0.0),
            ShotCount::Finite(n) => {
                let k = Binomial::new(n, p_plus)
                    .map_err(|e| Error::Numerical(format!("binomial draw: {e}")))?
                    .sample(rng);
                let est = 2.0 * (k as f64) / (n as f64) - 1.0;
                let se = ((1.0 - est * est).max(0.0) / n as f64).sqrt();
                (est, se)
            }
        };
        value += coeff * est;
        variance += (coeff * se).powi(2);
    }
    Ok(ShotEstimate {
        value,
        stderr: variance.sqrt(),
        shots,
    })
}
