//! JSON serialisation of Pauli sums.
//!
//! The on-disk form is a flat array of `{label, coeff_re, coeff_im}` records,
//! site 0 leftmost in the label. Writing always emits terms in canonical
//! `(z_mask, x_mask)` order so that equal operators serialise to identical
//! bytes; reading accepts any order and sums duplicate labels.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{PauliSum, PauliTerm};
use crate::error::{Error, Result};

/// Wire form of a single term.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PauliRecord {
    pub label: String,
    pub coeff_re: f64,
    pub coeff_im: f64,
}

/// Canonical record list for a sum.
pub fn to_records(sum: &PauliSum) -> Vec<PauliRecord> {
    sum.terms()
        .map(|t| PauliRecord {
            label: t.label(),
            coeff_re: t.coeff().re,
            coeff_im: t.coeff().im,
        })
        .collect()
}

/// Rebuild a sum from records; labels must all have the same length.
pub fn from_records(records: &[PauliRecord]) -> Result<PauliSum> {
    let first = records
        .first()
        .ok_or_else(|| Error::Parse("empty operator: no terms".into()))?;
    let n_qubits = first.label.chars().count();
    let mut sum = PauliSum::new(n_qubits)?;
    for (i, r) in records.iter().enumerate() {
        if r.label.chars().count() != n_qubits {
            return Err(Error::Parse(format!(
                "term {i}: label {:?} has {} sites, expected {n_qubits}",
                r.label,
                r.label.chars().count()
            )));
        }
        let term = PauliTerm::from_label(&r.label, Complex64::new(r.coeff_re, r.coeff_im))
            .map_err(|e| Error::Parse(format!("term {i}: {e}")))?;
        sum.add_term(&term)?;
    }
    Ok(sum)
}

/// Serialise to pretty JSON.
pub fn to_json_string(sum: &PauliSum) -> Result<String> {
    Ok(serde_json::to_string_pretty(&to_records(sum))?)
}

/// Parse from a JSON record array.
pub fn from_json_str(s: &str) -> Result<PauliSum> {
    let records: Vec<PauliRecord> =
        serde_json::from_str(s).map_err(|e| Error::Parse(format!("operator JSON: {e}")))?;
    from_records(&records)
}

/// Write a sum to a file as JSON records.
pub fn write_json_file(sum: &PauliSum, path: &std::path::Path) -> Result<()> {
    std::fs::write(path, to_json_string(sum)?)?;
    Ok(())
}

/// Read a sum from a JSON record file.
pub fn read_json_file(path: &std::path::Path) -> Result<PauliSum> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    from_json_str(&text)
}
