//! Minimal pure-state simulator.
//!
//! Gates are limited to Paulis, Hadamard and CNOT; measurements are projective
//! in the Z, X or Bell basis. Sampling takes an externally supplied uniform
//! draw, so the simulator owns no random source.

mod labels;
mod measure;
mod state;

pub use labels::{BellLabel, PauliLabel};
pub use measure::{outcome_distribution, select_outcome, Basis, MeasurementRecord, Outcome, PlanStep};
pub use state::{init_product, QubitPrep, StateVector};

use thiserror::Error;

pub(crate) const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Largest register the simulator will allocate.
pub const MAX_QUBITS: usize = 20;

/// Measurements refuse states whose squared norm is further than this from 1.
pub const NORM_TOLERANCE: f64 = 1e-6;

/// Outcome probabilities at or below this are treated as impossible.
pub const ZERO_PROBABILITY: f64 = 1e-14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QsimError {
    #[error("empty qubit specification")]
    EmptySpec,
    #[error("qubit {qubit} out of range for a {n_qubits}-qubit state")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },
    #[error("qubit {0} given more than once")]
    DuplicateQubit(usize),
    #[error("state norm deviates from 1 by {0:e}")]
    NotNormalized(f64),
    #[error("amplitude vector length {0} is not a power of two >= 2")]
    BadLength(usize),
    #[error("non-finite amplitude at index {0}")]
    NonFinite(usize),
    #[error("{0} qubits exceeds the supported maximum of {MAX_QUBITS}")]
    TooManyQubits(usize),
    #[error("qubit counts differ: {0} vs {1}")]
    QubitCountMismatch(usize, usize),
    #[error("uniform draw {0} outside [0, 1)")]
    InvalidRandomness(f64),
    #[error("qubit {0} is not in |0>")]
    NotZero(usize),
    #[error("measurement plan touches qubit {0} more than once")]
    OverlappingPlan(usize),
    #[error("{basis:?} measurement takes {expected} qubit(s), got {got}")]
    Arity {
        basis: Basis,
        expected: usize,
        got: usize,
    },
    #[error("outcome {0} has zero probability")]
    ZeroProbability(usize),
}
