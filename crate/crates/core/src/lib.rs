//! Density-matrix simulation of small noisy quantum circuits together with the
//! moment-based estimators used to mitigate the resulting energy bias.
//!
//! The crate is organised as a pipeline:
//!
//! * [`pauli`] — sparse Pauli-string operator algebra (products, powers, term
//!   counting, qubit-wise commuting grouping, JSON serialisation);
//! * [`sim`] — dense density-matrix evolution of RY/RZ/CZ circuits under a
//!   per-gate noise model (depolarizing, dephasing, thermal relaxation) with
//!   exact and shot-sampled expectation values including readout error;
//! * [`models`] — built-in spin Hamiltonians and ingestion of operator files;
//! * [`vqe`] — hardware-style variational ground-state search (SPSA);
//! * [`mitigation`] — estimators that post-process the power moments
//!   ⟨H⟩, ⟨H²⟩, …: Krylov (Lanczos-type) ground-energy estimates, cube-root
//!   and fixed-ratio variants, precision-constrained selection, and the
//!   diagnostics that come with them;
//! * [`zne`] — noise amplification by CZ folding and extrapolation to the
//!   zero-noise limit, plus a budget-matched comparison against the moment
//!   pipeline.
//!
//! Everything downstream of a seed is deterministic: the same master seed
//! produces bit-identical estimates, traces and serialised outputs.

pub mod error;
pub mod linalg;
pub mod mitigation;
pub mod models;
pub mod pauli;
pub mod seeds;
pub mod sim;
pub mod vqe;
pub mod zne;

pub use error::{Error, Result};
