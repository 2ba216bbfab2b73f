//! Sparse operator algebra over tensor products of Pauli matrices.
//!
//! A term is stored as a pair of bit masks `(x_mask, z_mask)` over at most 64
//! qubits — site `q` of the string is `I`, `X`, `Y`, `Z` for bit patterns
//! `(0,0)`, `(1,0)`, `(1,1)`, `(0,1)` — together with a complex coefficient.
//! The coefficient multiplies the *letter* string (the `Y` site carries its
//! own `i`), so Hermitian operators have purely real coefficients.
//!
//! Sums keep their terms in a map keyed by `(z_mask, x_mask)`, which fixes a
//! canonical ordering: iteration, serialisation and grouping are all
//! deterministic without any extra sorting.
//!
//! Qubit `0` is the leftmost character of a label and the most significant
//! bit of a mask, matching the basis-state convention in the simulator.

pub mod io;

use std::collections::BTreeMap;

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::CMat;

/// Widest string representable with one mask pair.
pub const MAX_QUBITS: usize = 64;

/// Coefficients with magnitude below this are dropped when sums are combined.
pub const DEFAULT_PRUNE_TOL: f64 = 1e-12;

/// Single-site Pauli letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    /// Letter for an `(x, z)` bit pair.
    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Result<Self> {
        match c {
            'I' => Ok(Pauli::I),
            'X' => Ok(Pauli::X),
            'Y' => Ok(Pauli::Y),
            'Z' => Ok(Pauli::Z),
            other => Err(Error::Parse(format!(
                "invalid Pauli letter {other:?} (expected one of I, X, Y, Z)"
            ))),
        }
    }

    /// 2×2 matrix of the letter.
    pub fn matrix(self) -> CMat {
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        match self {
            Pauli::I => ndarray::array![[l, o], [o, l]],
            Pauli::X => ndarray::array![[o, l], [l, o]],
            Pauli::Y => ndarray::array![[o, -i], [i, o]],
            Pauli::Z => ndarray::array![[l, o], [o, -l]],
        }
    }
}

/// One Pauli string with a complex coefficient.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PauliTerm {
    n_qubits: usize,
    x_mask: u64,
    z_mask: u64,
    coeff: Complex64,
}

/// Mask bit position of qubit `q` (qubit 0 is most significant).
#[inline]
pub fn bit_for_qubit(n_qubits: usize, q: usize) -> u64 {
    1u64 << (n_qubits - 1 - q)
}

fn check_n_qubits(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS {
        return Err(Error::InvalidParameter(format!(
            "qubit count must be in 1..={MAX_QUBITS}, got {n_qubits}"
        )));
    }
    Ok(())
}

impl PauliTerm {
    /// The identity string with coefficient 1.
    pub fn identity(n_qubits: usize) -> Self {
        PauliTerm {
            n_qubits,
            x_mask: 0,
            z_mask: 0,
            coeff: Complex64::new(1.0, 0.0),
        }
    }

    /// Build from raw masks; masks must fit within `n_qubits` bits.
    pub fn from_masks(n_qubits: usize, x_mask: u64, z_mask: u64, coeff: Complex64) -> Result<Self> {
        check_n_qubits(n_qubits)?;
        let valid = if n_qubits == 64 {
            u64::MAX
        } else {
            (1u64 << n_qubits) - 1
        };
        if x_mask & !valid != 0 || z_mask & !valid != 0 {
            return Err(Error::InvalidParameter(format!(
                "mask exceeds {n_qubits} qubits"
            )));
        }
        Ok(PauliTerm {
            n_qubits,
            x_mask,
            z_mask,
            coeff,
        })
    }

    /// Build from a letter string such as `"XIZY"` (site 0 leftmost).
    pub fn from_label(label: &str, coeff: Complex64) -> Result<Self> {
        let n_qubits = label.chars().count();
        check_n_qubits(n_qubits)?;
        let mut x_mask = 0u64;
        let mut z_mask = 0u64;
        for (q, c) in label.chars().enumerate() {
            let bit = bit_for_qubit(n_qubits, q);
            match Pauli::from_char(c)? {
                Pauli::I => {}
                Pauli::X => x_mask |= bit,
                Pauli::Y => {
                    x_mask |= bit;
                    z_mask |= bit;
                }
                Pauli::Z => z_mask |= bit,
            }
        }
        Ok(PauliTerm {
            n_qubits,
            x_mask,
            z_mask,
            coeff,
        })
    }

    /// A single non-identity letter on qubit `q`, identity elsewhere.
    pub fn single(n_qubits: usize, q: usize, p: Pauli, coeff: Complex64) -> Result<Self> {
        check_n_qubits(n_qubits)?;
        if q >= n_qubits {
            return Err(Error::InvalidParameter(format!(
                "qubit {q} out of range for {n_qubits} qubits"
            )));
        }
        let bit = bit_for_qubit(n_qubits, q);
        let (x, z) = match p {
            Pauli::I => (0, 0),
            Pauli::X => (bit, 0),
            Pauli::Y => (bit, bit),
            Pauli::Z => (0, bit),
        };
        Ok(PauliTerm {
            n_qubits,
            x_mask: x,
            z_mask: z,
            coeff,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn x_mask(&self) -> u64 {
        self.x_mask
    }

    pub fn z_mask(&self) -> u64 {
        self.z_mask
    }

    pub fn coeff(&self) -> Complex64 {
        self.coeff
    }

    pub fn with_coeff(&self, coeff: Complex64) -> Self {
        PauliTerm { coeff, ..*self }
    }

    /// The letter on qubit `q`.
    pub fn pauli_at(&self, q: usize) -> Pauli {
        let bit = bit_for_qubit(self.n_qubits, q);
        Pauli::from_bits(self.x_mask & bit != 0, self.z_mask & bit != 0)
    }

    /// Mask of sites carrying a non-identity letter.
    pub fn support_mask(&self) -> u64 {
        self.x_mask | self.z_mask
    }

    /// Number of non-identity sites.
    pub fn weight(&self) -> usize {
        self.support_mask().count_ones() as usize
    }

    pub fn is_identity(&self) -> bool {
        self.support_mask() == 0
    }

    /// Letter string (site 0 leftmost).
    pub fn label(&self) -> String {
        (0..self.n_qubits).map(|q| self.pauli_at(q).to_char()).collect()
    }

    /// Product of two strings, with the accumulated phase folded into the
    /// coefficient of the resulting letter string.
    pub fn multiply(&self, other: &PauliTerm) -> Result<PauliTerm> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        let x3 = self.x_mask ^ other.x_mask;
        let z3 = self.z_mask ^ other.z_mask;
        // Phase bookkeeping: each Y letter hides an i (Y = i·X·Z), and
        // commuting the Z part of the left factor through the X part of the
        // right one costs a sign per overlapping site.
        let w1 = (self.x_mask & self.z_mask).count_ones() as i32;
        let w2 = (other.x_mask & other.z_mask).count_ones() as i32;
        let w3 = (x3 & z3).count_ones() as i32;
        let antisym = (self.z_mask & other.x_mask).count_ones() as i32;
        let k = (w1 + w2 + 2 * antisym - w3).rem_euclid(4);
        let phase = match k {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        Ok(PauliTerm {
            n_qubits: self.n_qubits,
            x_mask: x3,
            z_mask: z3,
            coeff: self.coeff * other.coeff * phase,
        })
    }

    /// True if the two strings commute as operators.
    pub fn commutes_with(&self, other: &PauliTerm) -> bool {
        let s1 = (self.x_mask & other.z_mask).count_ones();
        let s2 = (self.z_mask & other.x_mask).count_ones();
        (s1 + s2).is_multiple_of(2)
    }

    /// True if the strings agree site by site wherever both are non-identity.
    pub fn qubitwise_commutes(&self, other: &PauliTerm) -> bool {
        let both = self.support_mask() & other.support_mask();
        ((self.x_mask ^ other.x_mask) | (self.z_mask ^ other.z_mask)) & both == 0
    }

    /// Dense matrix representation (site 0 is the first tensor factor).
    pub fn to_matrix(&self) -> CMat {
        let mut m = Array2::from_elem((1, 1), self.coeff);
        for q in 0..self.n_qubits {
            m = crate::linalg::kron(&m, &self.pauli_at(q).matrix());
        }
        m
    }
}

/// A linear combination of Pauli strings on a fixed qubit count.
///
/// Terms are kept combined and pruned: no two entries share a mask pair and
/// no stored coefficient is smaller in magnitude than [`DEFAULT_PRUNE_TOL`]
/// (or the tolerance passed to the producing operation).
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: BTreeMap<(u64, u64), Complex64>,
}

impl PauliSum {
    /// The zero operator.
    pub fn new(n_qubits: usize) -> Result<Self> {
        check_n_qubits(n_qubits)?;
        Ok(PauliSum {
            n_qubits,
            terms: BTreeMap::new(),
        })
    }

    /// The identity operator with coefficient 1.
    pub fn identity(n_qubits: usize) -> Result<Self> {
        let mut s = PauliSum::new(n_qubits)?;
        s.terms.insert((0, 0), Complex64::new(1.0, 0.0));
        Ok(s)
    }

    /// Combine a list of terms (duplicates are summed).
    pub fn from_terms<I>(n_qubits: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = PauliTerm>,
    {
        let mut s = PauliSum::new(n_qubits)?;
        for t in terms {
            s.add_term(&t)?;
        }
        Ok(s)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Number of stored terms (identity included if present).
    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    /// Number of stored non-identity terms.
    pub fn n_non_identity_terms(&self) -> usize {
        self.terms.len() - usize::from(self.terms.contains_key(&(0, 0)))
    }

    /// Coefficient of the mask pair, zero if absent.
    pub fn coeff_of(&self, x_mask: u64, z_mask: u64) -> Complex64 {
        self.terms
            .get(&(z_mask, x_mask))
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Accumulate one term, combining with any existing entry.
    pub fn add_term(&mut self, term: &PauliTerm) -> Result<()> {
        if term.n_qubits != self.n_qubits {
            return Err(Error::DimensionMismatch {
                left: self.n_qubits,
                right: term.n_qubits,
            });
        }
        let key = (term.z_mask, term.x_mask);
        let c = self.terms.get(&key).copied().unwrap_or_default() + term.coeff;
        if c.norm() < DEFAULT_PRUNE_TOL {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, c);
        }
        Ok(())
    }

    /// Terms in canonical `(z_mask, x_mask)` order.
    pub fn terms(&self) -> impl Iterator<Item = PauliTerm> + '_ {
        self.terms.iter().map(|(&(z, x), &c)| PauliTerm {
            n_qubits: self.n_qubits,
            x_mask: x,
            z_mask: z,
            coeff: c,
        })
    }

    pub fn scaled(&self, f: Complex64) -> Self {
        let mut out = self.clone();
        out.terms.retain(|_, c| {
            *c *= f;
            c.norm() >= DEFAULT_PRUNE_TOL
        });
        out
    }

    pub fn add(&self, other: &PauliSum) -> Result<Self> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        let mut out = self.clone();
        for t in other.terms() {
            out.add_term(&t)?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &PauliSum) -> Result<Self> {
        self.add(&other.scaled(Complex64::new(-1.0, 0.0)))
    }

    /// Distribute the product of two sums, combining like terms and dropping
    /// results below `prune_tol`.
    pub fn multiply(&self, other: &PauliSum, prune_tol: f64) -> Result<Self> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        let mut acc: BTreeMap<(u64, u64), Complex64> = BTreeMap::new();
        for a in self.terms() {
            for b in other.terms() {
                let p = a.multiply(&b)?;
                *acc.entry((p.z_mask, p.x_mask)).or_default() += p.coeff;
            }
        }
        acc.retain(|_, c| c.norm() >= prune_tol);
        Ok(PauliSum {
            n_qubits: self.n_qubits,
            terms: acc,
        })
    }

    /// `self` raised to a non-negative integer power (`k = 0` gives identity).
    pub fn power(&self, k: u32, prune_tol: f64) -> Result<Self> {
        let mut out = PauliSum::identity(self.n_qubits)?;
        for _ in 0..k {
            out = out.multiply(self, prune_tol)?;
        }
        Ok(out)
    }

    /// All powers `[I, self, self², …, self^k_max]` in one pass.
    pub fn powers_up_to(&self, k_max: u32, prune_tol: f64) -> Result<Vec<Self>> {
        let mut out = vec![PauliSum::identity(self.n_qubits)?];
        for k in 1..=k_max {
            let next = out[(k - 1) as usize].multiply(self, prune_tol)?;
            out.push(next);
        }
        Ok(out)
    }

    /// Drop all terms with coefficient magnitude below `tol`.
    pub fn prune(&mut self, tol: f64) {
        self.terms.retain(|_, c| c.norm() >= tol);
    }

    /// Hermitian conjugate (conjugates every coefficient).
    pub fn adjoint(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.conj();
        }
        out
    }

    /// Largest imaginary part over stored coefficients.
    pub fn max_im(&self) -> f64 {
        self.terms
            .values()
            .map(|c| c.im.abs())
            .fold(0.0, f64::max)
    }

    /// True when all coefficients are real to within `tol`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_im() <= tol
    }

    /// Dense matrix representation.
    pub fn to_matrix(&self) -> CMat {
        let dim = 1usize << self.n_qubits;
        let mut m = Array2::zeros((dim, dim));
        for t in self.terms() {
            m = m + t.to_matrix();
        }
        m
    }

    /// Greedy partition into groups whose members pairwise agree site by
    /// site wherever both are non-identity (first-fit in canonical order).
    pub fn group_qubitwise_commuting(&self) -> Vec<Vec<PauliTerm>> {
        let mut groups: Vec<Vec<PauliTerm>> = Vec::new();
        for t in self.terms() {
            match groups
                .iter_mut()
                .find(|g| g.iter().all(|m| m.qubitwise_commutes(&t)))
            {
                Some(g) => g.push(t),
                None => groups.push(vec![t]),
            }
        }
        groups
    }
}

/// One row of a term-count scaling report.
#[derive(Clone, Debug, serde::Serialize)]
pub struct TermCountRow {
    pub power: u32,
    pub n_terms: usize,
    pub n_non_identity: usize,
    /// `ln(n_terms) / ln(n_qubits)`, the empirical scaling exponent; absent
    /// on a single qubit or for an empty power.
    pub exponent: Option<f64>,
}

/// Term counts of `h^k` for each requested power, with scaling exponents.
pub fn count_terms_report(h: &PauliSum, powers: &[u32], prune_tol: f64) -> Result<Vec<TermCountRow>> {
    let k_max = powers.iter().copied().max().unwrap_or(0);
    let all = h.powers_up_to(k_max, prune_tol)?;
    Ok(powers
        .iter()
        .map(|&k| {
            let hk = &all[k as usize];
            let n_terms = hk.n_terms();
            let exponent = if h.n_qubits() >= 2 && n_terms >= 1 {
                Some((n_terms as f64).ln() / (h.n_qubits() as f64).ln())
            } else {
                None
            };
            TermCountRow {
                power: k,
                n_terms,
                n_non_identity: hk.n_non_identity_terms(),
                exponent,
            }
        })
        .collect())
}
