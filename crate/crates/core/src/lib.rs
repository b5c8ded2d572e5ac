//! Simulation and analysis of controlled mutual quantum entity authentication
//! (CMQEA) built on GHZ-like states and entanglement swapping, together with
//! the controller's pre-measurement eavesdropping attack.
//!
//! * [`qsim`] is a small state-vector simulator.
//! * [`branch`] supplies randomness to the protocol, either seeded sampling or
//!   exhaustive enumeration of every measurement branch.
//! * [`protocol`] runs the phases P1 → E3 as a per-round state machine.
//! * [`adversary`] holds the strategies Charlie can plug in at transmission.
//! * [`oracle`] computes brute-force ground truth and summary statistics.

pub mod adversary;
pub mod branch;
pub mod oracle;
pub mod protocol;
pub mod qsim;

pub use adversary::{EveState, StrategyId};
pub use branch::{enumerate_branches, Branch, BranchSource, SeededSource};
pub use oracle::{Distribution, RateReport};
pub use protocol::{
    CharlieBits, Decision, ProtocolConfig, ProtocolError, Role, RoundKey, RoundRecord, RunOutcome,
    Transcript,
};
pub use qsim::{BellLabel, PauliLabel, StateVector};
