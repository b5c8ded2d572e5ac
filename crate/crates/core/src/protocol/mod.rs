//! The CMQEA round as a phase state machine.
//!
//! Charlie prepares two GHZ-like states per round (P1), distributes the A and
//! B qubits to Alice and Bob inside decoy-padded sequences (P2), the decoys
//! are checked (S1/S2), the authenticated party applies the Pauli named by the
//! round key to its first qubit (E1), everyone measures (E2), and the
//! announcements are verified (E3).
//!
//! Protocol qubits live in one 6-qubit [`StateVector`] ordered
//! `C1 A1 B1 C2 A2 B2`. Decoys are never entangled with anything, so each is
//! kept as its own single-qubit factor of the register.

mod phases;
mod sampling;

pub use phases::{
    decoy_announcements, e1_encode, e2_measure, e3_verify, encode_on, p1_prepare, p2_transmit,
    recover_key, run_protocol, run_round, run_round_with, s_check, DEFAULT_E2_ORDER,
};
pub use sampling::{draw_keys, run_sampled, run_seed};

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::adversary::{EveState, HookStep, StrategyId, DEFAULT_HOOK_ORDER};
use crate::qsim::{BellLabel, PauliLabel, QsimError, QubitPrep, StateVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    Charlie,
    Alice,
    Bob,
}

impl Role {
    pub fn name(self) -> &'static str {
        match self {
            Role::Charlie => "Charlie",
            Role::Alice => "Alice",
            Role::Bob => "Bob",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Role {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "charlie" => Ok(Role::Charlie),
            "alice" => Ok(Role::Alice),
            "bob" => Ok(Role::Bob),
            _ => Err(format!("unknown role `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PhaseId {
    P1,
    P2,
    S1,
    S2,
    E1,
    E2,
    E3,
}

/// A 2-bit round key; the key names the Pauli the authenticated party applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RoundKey(PauliLabel);

impl RoundKey {
    pub const ALL: [RoundKey; 4] = [
        RoundKey(PauliLabel::I),
        RoundKey(PauliLabel::X),
        RoundKey(PauliLabel::Z),
        RoundKey(PauliLabel::IY),
    ];

    pub fn from_bits(phase: u8, parity: u8) -> Self {
        RoundKey(PauliLabel::from_bits(phase, parity))
    }

    pub fn from_index(index: usize) -> Self {
        RoundKey(PauliLabel::from_index(index))
    }

    pub fn pauli(self) -> PauliLabel {
        self.0
    }

    pub fn bits(self) -> (u8, u8) {
        (self.0.phase_bit(), self.0.parity_bit())
    }

    pub fn index(self) -> usize {
        self.0.index()
    }
}

impl From<PauliLabel> for RoundKey {
    fn from(p: PauliLabel) -> Self {
        RoundKey(p)
    }
}

impl fmt::Display for RoundKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Charlie's two σz outcomes `c_{2i-1} c_{2i}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CharlieBits {
    pub c1: u8,
    pub c2: u8,
}

impl CharlieBits {
    pub const ALL: [CharlieBits; 4] = [
        CharlieBits { c1: 0, c2: 0 },
        CharlieBits { c1: 0, c2: 1 },
        CharlieBits { c1: 1, c2: 0 },
        CharlieBits { c1: 1, c2: 1 },
    ];

    pub fn new(c1: u8, c2: u8) -> Self {
        Self { c1: c1 & 1, c2: c2 & 1 }
    }

    /// The Bell label `(0, c1 ⊕ c2)` that relates Alice's and Bob's swap outcomes.
    pub fn correction(self) -> BellLabel {
        BellLabel::from_bits(0, self.c1 ^ self.c2)
    }
}

impl fmt::Display for CharlieBits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.c1, self.c2)
    }
}

/// Positions of the six protocol qubits in the register state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ProtocolQubit {
    C1,
    A1,
    B1,
    C2,
    A2,
    B2,
}

impl ProtocolQubit {
    pub fn index(self) -> usize {
        self as usize
    }
}

pub const PROTOCOL_QUBITS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DecoyBasis {
    Z,
    X,
}

impl DecoyBasis {
    pub fn basis(self) -> crate::qsim::Basis {
        match self {
            DecoyBasis::Z => crate::qsim::Basis::Z,
            DecoyBasis::X => crate::qsim::Basis::X,
        }
    }

    pub fn prep(self, bit: u8) -> QubitPrep {
        match (self, bit & 1) {
            (DecoyBasis::Z, 0) => QubitPrep::Zero,
            (DecoyBasis::Z, _) => QubitPrep::One,
            (DecoyBasis::X, 0) => QubitPrep::Plus,
            (DecoyBasis::X, _) => QubitPrep::Minus,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DecoyRecord {
    /// Whose sequence carries the decoy.
    pub owner: Role,
    /// Index within the owner's transmitted sequence.
    pub position: usize,
    pub basis: DecoyBasis,
    pub prepared: u8,
    /// Set by the decoy check.
    pub measured: Option<u8>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecoyQubit {
    pub record: DecoyRecord,
    pub state: StateVector,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Slot {
    Protocol(ProtocolQubit),
    /// Index into the register's decoy list.
    Decoy(usize),
}

/// The order in which one party receives its qubits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sequence {
    pub owner: Role,
    pub slots: Vec<Slot>,
}

/// Everything Charlie prepares for one round.
#[derive(Debug, Clone)]
pub struct RoundRegister {
    round: usize,
    state: StateVector,
    decoys: Vec<DecoyQubit>,
    sequences: [Sequence; 2],
    completed: PhaseId,
    aborted: bool,
}

impl RoundRegister {
    pub fn round(&self) -> usize {
        self.round
    }

    /// The 6 protocol qubits `C1 A1 B1 C2 A2 B2`.
    pub fn state(&self) -> &StateVector {
        &self.state
    }

    pub fn state_mut(&mut self) -> &mut StateVector {
        &mut self.state
    }

    pub fn decoys(&self) -> &[DecoyQubit] {
        &self.decoys
    }

    pub fn decoys_mut(&mut self) -> &mut [DecoyQubit] {
        &mut self.decoys
    }

    pub fn decoy_records(&self) -> Vec<DecoyRecord> {
        self.decoys.iter().map(|d| d.record.clone()).collect()
    }

    pub fn sequences(&self) -> &[Sequence; 2] {
        &self.sequences
    }

    /// Protocol plus decoy qubits.
    pub fn n_qubits(&self) -> usize {
        PROTOCOL_QUBITS + self.decoys.len()
    }

    pub fn completed_phase(&self) -> PhaseId {
        self.completed
    }

    pub fn is_aborted(&self) -> bool {
        self.aborted
    }

    pub(crate) fn expect_phase(&self, expected: PhaseId) -> Result<(), ProtocolError> {
        if self.completed != expected {
            return Err(ProtocolError::PhaseOrder {
                expected,
                found: self.completed,
            });
        }
        Ok(())
    }
}

/// What Charlie announces before the decoy check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecoyAnnouncement {
    pub owner: Role,
    pub position: usize,
    pub basis: DecoyBasis,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoyCheck {
    pub checked: usize,
    pub mismatches: usize,
    pub error_rate: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Decision {
    Accept,
    Reject,
    Abort,
}

impl Decision {
    pub fn name(self) -> &'static str {
        match self {
            Decision::Accept => "Accept",
            Decision::Reject => "Reject",
            Decision::Abort => "Abort",
        }
    }
}

/// Public E-phase announcements.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Announcements {
    pub a: Option<BellLabel>,
    pub b: Option<BellLabel>,
    pub c: Option<CharlieBits>,
}

/// Public record of one round. Keys never appear here.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundTranscript {
    pub round: usize,
    pub c: Option<CharlieBits>,
    pub a: Option<BellLabel>,
    pub b: Option<BellLabel>,
    pub decoys: Vec<DecoyRecord>,
    pub decoy_error_rate: f64,
    pub decision: Decision,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transcript {
    pub rounds: Vec<RoundTranscript>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolConfig {
    pub rounds: usize,
    pub decoys_per_sequence: usize,
    pub decoy_error_threshold: f64,
    /// The party Charlie chooses to authenticate.
    pub direction: Role,
    pub seed: u64,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        Self {
            rounds: 16,
            decoys_per_sequence: 4,
            decoy_error_threshold: 0.0,
            direction: Role::Alice,
            seed: 0,
        }
    }
}

impl ProtocolConfig {
    pub fn validate(&self) -> Result<(), ProtocolError> {
        if self.rounds == 0 {
            return Err(ProtocolError::InvalidConfig("rounds must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.decoy_error_threshold) {
            return Err(ProtocolError::InvalidConfig(format!(
                "decoy_error_threshold {} outside [0, 1]",
                self.decoy_error_threshold
            )));
        }
        if self.direction == Role::Charlie {
            return Err(ProtocolError::InvalidDirection(Role::Charlie));
        }
        Ok(())
    }
}

/// Knobs for the commutation and relabeling properties; defaults reproduce
/// the standard round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundOptions {
    pub hook_order: [HookStep; 3],
    pub e2_order: [Role; 3],
    /// Overrides the qubit the key Pauli is applied to.
    pub encode_qubit: Option<ProtocolQubit>,
}

impl Default for RoundOptions {
    fn default() -> Self {
        Self {
            hook_order: DEFAULT_HOOK_ORDER,
            e2_order: DEFAULT_E2_ORDER,
            encode_qubit: None,
        }
    }
}

/// Full record of one round: public transcript plus the secrets needed to
/// score it.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    pub transcript: RoundTranscript,
    pub key: RoundKey,
    pub strategy: StrategyId,
    pub eve: Option<EveState>,
}

impl RoundRecord {
    pub fn decision(&self) -> Decision {
        self.transcript.decision
    }

    pub fn detected(&self) -> bool {
        self.transcript.decision == Decision::Abort
    }

    pub fn inferred_key(&self) -> Option<RoundKey> {
        self.eve.as_ref().and_then(|e| e.inferred_key)
    }

    /// `Some(hit)` when the adversary attempted key inference this round.
    pub fn key_recovered(&self) -> Option<bool> {
        self.inferred_key().map(|k| k == self.key)
    }
}

/// What the adversary learned over a run.
#[derive(Debug, Clone, PartialEq)]
pub struct AdversaryReport {
    pub strategy: StrategyId,
    pub rounds: Vec<Option<EveState>>,
}

impl AdversaryReport {
    pub fn recovered_keys(&self) -> Vec<Option<RoundKey>> {
        self.rounds
            .iter()
            .map(|e| e.as_ref().and_then(|e| e.inferred_key))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub records: Vec<RoundRecord>,
    pub decision: Decision,
}

impl RunOutcome {
    pub fn transcript(&self) -> Transcript {
        Transcript {
            rounds: self.records.iter().map(|r| r.transcript.clone()).collect(),
        }
    }

    pub fn adversary_report(&self) -> AdversaryReport {
        AdversaryReport {
            strategy: self.records.first().map_or(StrategyId::Honest, |r| r.strategy),
            rounds: self.records.iter().map(|r| r.eve.clone()).collect(),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProtocolError {
    #[error(transparent)]
    Qsim(#[from] QsimError),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("expected {expected} keys, got {got}")]
    KeyLengthMismatch { expected: usize, got: usize },
    #[error("phase order violated: expected {expected:?} completed, found {found:?}")]
    PhaseOrder { expected: PhaseId, found: PhaseId },
    #[error("round was aborted by the decoy check")]
    Aborted,
    #[error("{0} cannot be the authenticated party")]
    InvalidDirection(Role),
    #[error("no decoy metadata for {owner} position {position}")]
    MissingDecoy { owner: Role, position: usize },
    #[error("missing announcement `{0}`")]
    MissingAnnouncement(&'static str),
    #[error("E2 order must name each role exactly once")]
    BadMeasurementOrder,
    #[error("adversary state has not been populated by the pre-measurement hook")]
    EveNotPopulated,
}
