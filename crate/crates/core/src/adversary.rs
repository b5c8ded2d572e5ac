//! Strategies Charlie can run at the P2 transmission hook.
//!
//! `PreMeasure` is the controller's attack: before sending anything, Charlie
//! measures C1 and C2 in the σz basis and Bell-measures (A1, A2) and
//! (B1, B2). Entanglement swapping is thereby done by Charlie himself, the
//! decoys are never touched, and once the authenticated party announces its
//! Bell outcome the applied Pauli (the key) is `announced ⊕ m_pre`. Charlie
//! then replays his early σz outcomes as `c`.
//!
//! `InterceptResend` is a textbook detectable baseline that measures every
//! transmitted qubit in a random Z/X basis.

use std::fmt;
use std::str::FromStr;

use crate::branch::{measure_with, BranchSource};
use crate::protocol::{CharlieBits, ProtocolError, ProtocolQubit, Role, RoundKey, RoundRegister, Sequence, Slot};
use crate::qsim::{Basis, BellLabel, StateVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StrategyId {
    Honest,
    PreMeasure,
    InterceptResend,
}

impl StrategyId {
    pub const ALL: [StrategyId; 3] = [StrategyId::Honest, StrategyId::PreMeasure, StrategyId::InterceptResend];

    pub fn name(self) -> &'static str {
        match self {
            StrategyId::Honest => "Honest",
            StrategyId::PreMeasure => "PreMeasure",
            StrategyId::InterceptResend => "InterceptResend",
        }
    }
}

impl fmt::Display for StrategyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StrategyId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        StrategyId::ALL
            .into_iter()
            .find(|id| id.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown strategy `{s}` (expected Honest, PreMeasure or InterceptResend)"))
    }
}

/// Charlie's early outcomes from the pre-measurement hook.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PreMeasurement {
    pub c_pre: CharlieBits,
    /// Bell outcome on (A1, A2).
    pub m_pre: BellLabel,
    /// Bell outcome on (B1, B2).
    pub b_pre: BellLabel,
}

impl PreMeasurement {
    /// `m_pre ⊕ b_pre = (0, c1 ⊕ c2)`.
    pub fn satisfies_swap_constraint(&self) -> bool {
        self.m_pre ^ self.b_pre == self.c_pre.correction()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EveState {
    pub observed: Option<PreMeasurement>,
    /// Set once the authenticated party's announcement has been seen.
    pub inferred_key: Option<RoundKey>,
}

/// Measurement groups of the pre-measurement hook.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HookStep {
    CharlieQubits,
    AlicePair,
    BobPair,
}

pub const DEFAULT_HOOK_ORDER: [HookStep; 3] = [HookStep::CharlieQubits, HookStep::AlicePair, HookStep::BobPair];

pub fn hook_premeasure<S: BranchSource + ?Sized>(
    register: &mut RoundRegister,
    src: &mut S,
) -> Result<EveState, ProtocolError> {
    hook_premeasure_ordered(register, DEFAULT_HOOK_ORDER, src)
}

/// σz on C1 and C2, Bell on (A1, A2) and (B1, B2), in the given group order.
/// Decoys are not touched.
pub fn hook_premeasure_ordered<S: BranchSource + ?Sized>(
    register: &mut RoundRegister,
    order: [HookStep; 3],
    src: &mut S,
) -> Result<EveState, ProtocolError> {
    use ProtocolQubit::*;
    register.expect_phase(crate::protocol::PhaseId::P1)?;
    let state = register.state_mut();
    let (mut c_pre, mut m_pre, mut b_pre) = (None, None, None);
    for step in order {
        match step {
            HookStep::CharlieQubits => c_pre = Some(measure_charlie(state, src)?),
            HookStep::AlicePair => m_pre = Some(bell(state, A1, A2, src)?),
            HookStep::BobPair => b_pre = Some(bell(state, B1, B2, src)?),
        }
    }
    match (c_pre, m_pre, b_pre) {
        (Some(c_pre), Some(m_pre), Some(b_pre)) => Ok(EveState {
            observed: Some(PreMeasurement { c_pre, m_pre, b_pre }),
            inferred_key: None,
        }),
        _ => Err(ProtocolError::InvalidConfig("hook order must contain every step".into())),
    }
}

fn bell<S: BranchSource + ?Sized>(
    state: &mut StateVector,
    first: ProtocolQubit,
    second: ProtocolQubit,
    src: &mut S,
) -> Result<BellLabel, ProtocolError> {
    let rec = measure_with(state, &[first.index(), second.index()], Basis::Bell, src)?;
    Ok(BellLabel::from_index(rec.outcome.index()))
}

fn measure_charlie<S: BranchSource + ?Sized>(state: &mut StateVector, src: &mut S) -> Result<CharlieBits, ProtocolError> {
    let c1 = measure_with(state, &[ProtocolQubit::C1.index()], Basis::Z, src)?;
    let c2 = measure_with(state, &[ProtocolQubit::C2.index()], Basis::Z, src)?;
    Ok(CharlieBits::new(c1.outcome.index() as u8, c2.outcome.index() as u8))
}

/// The key is the Pauli taking Charlie's early Bell outcome to the announced
/// one. For Alice the relevant pair is (A1, A2), for Bob (B1, B2).
pub fn infer_key(eve: &mut EveState, direction: Role, announced: BellLabel) -> Result<RoundKey, ProtocolError> {
    let pre = eve.observed.ok_or(ProtocolError::EveNotPopulated)?;
    let before = match direction {
        Role::Alice => pre.m_pre,
        Role::Bob => pre.b_pre,
        Role::Charlie => return Err(ProtocolError::InvalidDirection(direction)),
    };
    let key = RoundKey::from(before.pauli_to(announced));
    eve.inferred_key = Some(key);
    Ok(key)
}

/// Replays the early σz outcomes.
pub fn forge_c(eve: &EveState) -> Result<CharlieBits, ProtocolError> {
    eve.observed.map(|p| p.c_pre).ok_or(ProtocolError::EveNotPopulated)
}

/// Measures every qubit of both sequences in a uniformly random Z/X basis and
/// forwards the resulting eigenstate.
pub fn hook_intercept_resend<S: BranchSource + ?Sized>(
    register: &mut RoundRegister,
    sequences: &[Sequence; 2],
    src: &mut S,
) -> Result<(), ProtocolError> {
    for seq in sequences {
        for slot in &seq.slots {
            let basis = [Basis::Z, Basis::X][src.pick_uniform(2)];
            match *slot {
                Slot::Protocol(q) => {
                    measure_with(register.state_mut(), &[q.index()], basis, src)?;
                }
                Slot::Decoy(i) => {
                    let decoy = register
                        .decoys_mut()
                        .get_mut(i)
                        .ok_or(ProtocolError::MissingDecoy { owner: seq.owner, position: i })?;
                    measure_with(&mut decoy.state, &[0], basis, src)?;
                }
            }
        }
    }
    Ok(())
}

/// Charlie for one round: his hook, his `c` announcement, and what he learns.
#[derive(Debug, Clone)]
pub struct Adversary {
    strategy: StrategyId,
    hook_order: [HookStep; 3],
    eve: Option<EveState>,
}

impl Adversary {
    pub fn new(strategy: StrategyId) -> Self {
        Self {
            strategy,
            hook_order: DEFAULT_HOOK_ORDER,
            eve: None,
        }
    }

    pub fn with_hook_order(mut self, order: [HookStep; 3]) -> Self {
        self.hook_order = order;
        self
    }

    pub fn strategy(&self) -> StrategyId {
        self.strategy
    }

    pub fn on_transmit<S: BranchSource + ?Sized>(
        &mut self,
        register: &mut RoundRegister,
        sequences: &[Sequence; 2],
        src: &mut S,
    ) -> Result<(), ProtocolError> {
        match self.strategy {
            StrategyId::Honest => Ok(()),
            StrategyId::PreMeasure => {
                self.eve = Some(hook_premeasure_ordered(register, self.hook_order, src)?);
                Ok(())
            }
            StrategyId::InterceptResend => hook_intercept_resend(register, sequences, src),
        }
    }

    /// Honest Charlie measures C1 and C2; the pre-measuring Charlie replays.
    pub fn announce_c<S: BranchSource + ?Sized>(
        &mut self,
        state: &mut StateVector,
        src: &mut S,
    ) -> Result<CharlieBits, ProtocolError> {
        match self.strategy {
            StrategyId::PreMeasure => forge_c(self.eve.as_ref().ok_or(ProtocolError::EveNotPopulated)?),
            _ => measure_charlie(state, src),
        }
    }

    pub fn observe_announcement(&mut self, direction: Role, announced: BellLabel) -> Result<Option<RoundKey>, ProtocolError> {
        match (self.strategy, self.eve.as_mut()) {
            (StrategyId::PreMeasure, Some(eve)) => infer_key(eve, direction, announced).map(Some),
            (StrategyId::PreMeasure, None) => Err(ProtocolError::EveNotPopulated),
            _ => Ok(None),
        }
    }

    pub fn eve(&self) -> Option<&EveState> {
        self.eve.as_ref()
    }

    pub fn into_eve(self) -> Option<EveState> {
        self.eve
    }
}
