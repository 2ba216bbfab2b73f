//! Built-in spin models and ingestion of operator files.
//!
//! The workhorse is the fully connected four-spin exchange cluster
//! (a tetrahedron): six bonds of `J·(XX+YY+ZZ)` with the coupling on the
//! (0,1) bond replaced by `J′`. Its spectrum is known in closed form from
//! the pair spins, which makes it a sharp oracle: at `J′ = J` the ground
//! level is `−6J` and two-fold degenerate, and tuning `J′` through `J`
//! produces a ground-state level crossing.
//!
//! [`load_pauli_file`] ingests any Hermitian operator from the JSON record
//! format of [`crate::pauli::io`]; nothing here generates chemistry data.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{io, Pauli, PauliSum, PauliTerm};

/// The fully connected four-spin exchange cluster.
///
/// `H = Σ_bonds J_b (X_aX_b + Y_aY_b + Z_aZ_b)` over all six pairs of four
/// qubits, with `J_b = j_prime` on the (0,1) bond and `j` elsewhere.
pub fn build_tetrahedron(j: f64, j_prime: f64) -> Result<PauliSum> {
    let n = 4;
    let mut h = PauliSum::new(n)?;
    for a in 0..n {
        for b in (a + 1)..n {
            let coupling = if (a, b) == (0, 1) { j_prime } else { j };
            for p in [Pauli::X, Pauli::Y, Pauli::Z] {
                let ta = PauliTerm::single(n, a, p, Complex64::new(coupling, 0.0))?;
                let tb = PauliTerm::single(n, b, p, Complex64::new(1.0, 0.0))?;
                h.add_term(&ta.multiply(&tb)?)?;
            }
        }
    }
    Ok(h)
}

/// Two-spin exchange with a flipped sign: `−(XX + YY + ZZ)`.
///
/// The triplet is the three-fold degenerate ground level at −1 and the
/// singlet sits at +3; the maximally mixed state over this spectrum makes a
/// compact worked example for the moment estimators (`H³ = 6·I + 7·H`).
pub fn build_triplet_pair() -> PauliSum {
    PauliSum::from_terms(
        2,
        ["XX", "YY", "ZZ"]
            .map(|l| PauliTerm::from_label(l, Complex64::new(-1.0, 0.0)).unwrap()),
    )
    .unwrap()
}

/// Closed-form spectrum of [`build_tetrahedron`] as `(energy, degeneracy)`
/// pairs, unsorted. Energies follow from the two pair spins and the total
/// spin: `E = J(2S(S+1) − 6) + (J′−J)(2S01(S01+1) − 3)`.
pub fn tetrahedron_levels(j: f64, j_prime: f64) -> Vec<(f64, usize)> {
    vec![
        (-3.0 * j - 3.0 * j_prime, 1), // (S01,S23,S) = (0,0,0)
        (-7.0 * j + j_prime, 1),       // (1,1,0)
        (j - 3.0 * j_prime, 3),        // (0,1,1)
        (-3.0 * j + j_prime, 6),       // (1,0,1) and (1,1,1)
        (5.0 * j + j_prime, 5),        // (1,1,2)
    ]
}

/// Lowest energy of the cluster, exact.
pub fn tetrahedron_ground_energy(j: f64, j_prime: f64) -> f64 {
    tetrahedron_levels(j, j_prime)
        .iter()
        .map(|&(e, _)| e)
        .fold(f64::INFINITY, f64::min)
}

/// Read a Hermitian operator from a JSON record file.
///
/// Rejects operators with imaginary coefficient residue above 1e−10 — the
/// file format stores letter-string coefficients, so Hermiticity is exactly
/// "all coefficients real".
pub fn load_pauli_file(path: &Path) -> Result<PauliSum> {
    let sum = io::read_json_file(path)?;
    if !sum.is_hermitian(1e-10) {
        return Err(Error::NotHermitian(format!(
            "{}: imaginary coefficient residue {:.3e}",
            path.display(),
            sum.max_im()
        )));
    }
    Ok(sum)
}

/// Declarative model choice used by configuration files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    /// Four-spin exchange cluster with a tunable (0,1) bond.
    HeisenbergTetrahedron { j: f64, j_prime: f64 },
    /// Two-spin exchange pair with flipped sign.
    TripletPair,
    /// Operator ingested from a JSON record file.
    PauliFile { path: String },
}

impl ModelSpec {
    pub fn build(&self) -> Result<PauliSum> {
        match self {
            ModelSpec::HeisenbergTetrahedron { j, j_prime } => build_tetrahedron(*j, *j_prime),
            ModelSpec::TripletPair => Ok(build_triplet_pair()),
            ModelSpec::PauliFile { path } => load_pauli_file(Path::new(path)),
        }
    }

    /// A copy with the (0,1) bond rescaled; errors for file-backed models.
    pub fn with_j_prime_ratio(&self, ratio: f64) -> Result<ModelSpec> {
        match self {
            ModelSpec::HeisenbergTetrahedron { j, .. } => Ok(ModelSpec::HeisenbergTetrahedron {
                j: *j,
                j_prime: ratio * *j,
            }),
            other => Err(Error::InvalidParameter(format!(
                "parameter sweep needs the tetrahedron model, got {other:?}"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermitian_eigen, max_abs_diff};
    use crate::pauli::DEFAULT_PRUNE_TOL;

    #[test]
    fn tetrahedron_term_structure() {
        let h = build_tetrahedron(1.0, 0.8).unwrap();
        assert_eq!(h.n_terms(), 18);
        assert!(h.is_hermitian(0.0));
        // Bond (0,1) carries J′, bond (2,3) carries J.
        assert_eq!(h.coeff_of(0, 0b1100), Complex64::new(0.8, 0.0)); // ZZII
        assert_eq!(h.coeff_of(0, 0b0011), Complex64::new(1.0, 0.0)); // IIZZ
        // Dropping the J′ bond removes three terms.
        assert_eq!(build_tetrahedron(1.0, 0.0).unwrap().n_terms(), 15);
        // Couplings scale linearly.
        let doubled = build_tetrahedron(2.0, 1.6).unwrap();
        assert_eq!(doubled, h.scaled(Complex64::new(2.0, 0.0)));
    }

    #[test]
    fn tetrahedron_spectrum_matches_closed_form() {
        for (j, jp) in [(1.0, 1.0), (1.0, 0.5), (1.0, 2.0), (0.7, 0.7)] {
            let h = build_tetrahedron(j, jp).unwrap();
            let (evals, _) = hermitian_eigen(&h.to_matrix()).unwrap();
            let mut expect: Vec<f64> = tetrahedron_levels(j, jp)
                .iter()
                .flat_map(|&(e, d)| std::iter::repeat_n(e, d))
                .collect();
            expect.sort_by(f64::total_cmp);
            for (got, want) in evals.iter().zip(&expect) {
                assert!((got - want).abs() < 1e-10, "{got} vs {want}");
            }
            assert!((evals[0] - tetrahedron_ground_energy(j, jp)).abs() < 1e-10);
        }
    }

    #[test]
    fn symmetric_point_has_twofold_ground_level() {
        let h = build_tetrahedron(1.0, 1.0).unwrap();
        let (evals, _) = hermitian_eigen(&h.to_matrix()).unwrap();
        assert!((evals[0] + 6.0).abs() < 1e-10);
        assert!((evals[1] + 6.0).abs() < 1e-10);
        assert!(evals[2] > -6.0 + 1e-6);
        // Level crossing: at J′ = J the two candidate ground levels meet.
        assert!(
            (tetrahedron_ground_energy(1.0, 1.0 - 1e-9)
                - tetrahedron_ground_energy(1.0, 1.0 + 1e-9))
            .abs()
                < 1e-8
        );
    }

    #[test]
    fn triplet_pair_spectrum_and_cube() {
        let h = build_triplet_pair();
        let (evals, _) = hermitian_eigen(&h.to_matrix()).unwrap();
        for (got, want) in evals.iter().zip([-1.0, -1.0, -1.0, 3.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        // H³ = 6·I + 7·H.
        let h3 = h.power(3, DEFAULT_PRUNE_TOL).unwrap();
        let expect = PauliSum::identity(2)
            .unwrap()
            .scaled(Complex64::new(6.0, 0.0))
            .add(&h.scaled(Complex64::new(7.0, 0.0)))
            .unwrap();
        assert_eq!(h3, expect);
        assert!(max_abs_diff(&h3.to_matrix(), &expect.to_matrix()) < 1e-12);
    }

    #[test]
    fn pauli_file_roundtrip_and_validation() {
        let dir = std::env::temp_dir().join(format!("qem-models-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();

        let h = build_tetrahedron(1.0, 0.9).unwrap();
        let good = dir.join("good.json");
        io::write_json_file(&h, &good).unwrap();
        assert_eq!(load_pauli_file(&good).unwrap(), h);

        let bad_herm = dir.join("bad_herm.json");
        std::fs::write(
            &bad_herm,
            r#"[{"label": "XY", "coeff_re": 1.0, "coeff_im": 0.5}]"#,
        )
        .unwrap();
        assert!(matches!(
            load_pauli_file(&bad_herm),
            Err(Error::NotHermitian(_))
        ));

        let bad_syntax = dir.join("bad_syntax.json");
        std::fs::write(&bad_syntax, "not json at all").unwrap();
        assert!(matches!(load_pauli_file(&bad_syntax), Err(Error::Parse(_))));

        assert!(load_pauli_file(&dir.join("missing.json")).is_err());
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn model_spec_builds_and_serialises() {
        let spec = ModelSpec::HeisenbergTetrahedron { j: 1.0, j_prime: 0.8 };
        let text = serde_json::to_string(&spec).unwrap();
        assert!(text.contains("heisenberg_tetrahedron"));
        assert_eq!(serde_json::from_str::<ModelSpec>(&text).unwrap(), spec);
        assert_eq!(spec.build().unwrap().n_terms(), 18);
        assert_eq!(
            spec.with_j_prime_ratio(2.0).unwrap(),
            ModelSpec::HeisenbergTetrahedron { j: 1.0, j_prime: 2.0 }
        );
        assert!(ModelSpec::TripletPair.with_j_prime_ratio(1.0).is_err());
    }
}
