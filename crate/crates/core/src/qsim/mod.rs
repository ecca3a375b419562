//! Minimal dense statevector engine.
//!
//! Qubits are addressed by label. The first-listed label is the most
//! significant bit of the amplitude index, so `|q0 q1 ... q(n-1)>` lives at
//! index `q0 * 2^(n-1) + ... + q(n-1)`.

mod basis;
mod gate;
mod pauli;
mod state;

pub use basis::{Measurement, OrthonormalBasis};
pub use gate::UnitaryGate;
pub use pauli::{Pauli, PauliString};
pub use state::StateVector;

use num_complex::Complex64;
use thiserror::Error;

/// Tolerance used for normalization, unitarity and orthonormality checks.
pub const INVARIANT_TOL: f64 = 1e-10;

/// Outcomes whose probability falls below this cutoff cannot be forced.
pub const ZERO_PROBABILITY: f64 = 1e-12;

/// Largest register the dense engine will allocate.
pub const MAX_QUBITS: usize = 14;

pub(crate) const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub(crate) fn r(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QsimError {
    #[error("a state needs at least one qubit label")]
    NoLabels,
    #[error("duplicate qubit label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown qubit label `{0}`")]
    UnknownLabel(String),
    #[error("label sets overlap on `{0}`")]
    OverlappingLabels(String),
    #[error("label lists differ: {left:?} vs {right:?}")]
    LabelMismatch { left: Vec<String>, right: Vec<String> },
    #[error("reference labels {0:?} are not a strict subset of the state labels")]
    NotStrictSubset(Vec<String>),
    #[error("{0} qubits exceeds the dense engine limit of {MAX_QUBITS}")]
    TooManyQubits(usize),
    #[error("expected {expected} amplitudes, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("state norm squared {0} is not 1")]
    NotNormalized(f64),
    #[error("cannot normalize a zero vector")]
    ZeroVector,
    #[error("matrix is not unitary (deviation {0:e})")]
    NotUnitary(f64),
    #[error("gate dimension {0} is not supported (use 2 or 4)")]
    UnsupportedGateDimension(usize),
    #[error("basis is not orthonormal: {0}")]
    NotOrthonormal(String),
    #[error("basis has no outcome named `{0}`")]
    UnknownOutcome(String),
    #[error("outcome `{outcome}` has probability {probability:e}, below the forcing cutoff")]
    ZeroProbability { outcome: String, probability: f64 },
    #[error("Pauli string must contain at least one non-identity letter")]
    IdentityPauli,
    #[error("invalid Pauli letter `{0}`")]
    InvalidPauliLetter(char),
}

/// Bit offsets of the given qubit positions for every assignment of those
/// qubits, MSB first. Adding one entry from a target table and one from the
/// table of the complementary positions yields a full amplitude index.
pub(crate) fn offset_table(num_qubits: usize, positions: &[usize]) -> Vec<usize> {
    let k = positions.len();
    (0..1usize << k)
        .map(|value| {
            positions
                .iter()
                .enumerate()
                .filter(|(j, _)| value >> (k - 1 - j) & 1 == 1)
                .map(|(_, &p)| 1usize << (num_qubits - 1 - p))
                .sum()
        })
        .collect()
}

pub(crate) fn complement(num_qubits: usize, positions: &[usize]) -> Vec<usize> {
    (0..num_qubits).filter(|p| !positions.contains(p)).collect()
}
