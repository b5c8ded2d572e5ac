use crate::adversary::{Adversary, StrategyId};
use crate::branch::{measure_with, BranchSource, SeededSource};
use crate::qsim::{init_product, Basis, BellLabel, StateVector};

use super::{
    Announcements, DecoyAnnouncement, DecoyBasis, DecoyCheck, DecoyQubit, DecoyRecord, Decision,
    PhaseId, ProtocolConfig, ProtocolError, ProtocolQubit, Role, RoundKey, RoundOptions,
    RoundRecord, RoundRegister, RoundTranscript, RunOutcome, Sequence, Slot,
};

/// Alice, then Bob, then Charlie.
pub const DEFAULT_E2_ORDER: [Role; 3] = [Role::Alice, Role::Bob, Role::Charlie];

/// P1: two GHZ-like states plus `decoys_per_sequence` decoys in each of
/// Alice's and Bob's sequences, with basis, bit and position drawn uniformly.
pub fn p1_prepare<S: BranchSource + ?Sized>(
    config: &ProtocolConfig,
    round: usize,
    src: &mut S,
) -> Result<RoundRegister, ProtocolError> {
    use ProtocolQubit::*;

    let mut state = StateVector::zeros(super::PROTOCOL_QUBITS)?;
    state.prepare_ghz_like(C1.index(), A1.index(), B1.index())?;
    state.prepare_ghz_like(C2.index(), A2.index(), B2.index())?;

    let mut decoys: Vec<DecoyQubit> = Vec::with_capacity(2 * config.decoys_per_sequence);
    let mut build = |owner: Role, first: ProtocolQubit, second: ProtocolQubit| {
        let mut slots = vec![Slot::Protocol(first), Slot::Protocol(second)];
        for _ in 0..config.decoys_per_sequence {
            let basis = [DecoyBasis::Z, DecoyBasis::X][src.pick_uniform(2)];
            let prepared = src.pick_uniform(2) as u8;
            let at = src.pick_uniform(slots.len() + 1);
            slots.insert(at, Slot::Decoy(decoys.len()));
            decoys.push(DecoyQubit {
                record: DecoyRecord {
                    owner,
                    position: 0,
                    basis,
                    prepared,
                    measured: None,
                },
                state: init_product(&[basis.prep(prepared)])?,
            });
        }
        for (position, slot) in slots.iter().enumerate() {
            if let Slot::Decoy(i) = slot {
                decoys[*i].record.position = position;
            }
        }
        Ok::<_, ProtocolError>(Sequence { owner, slots })
    };
    let alice = build(Role::Alice, A1, A2)?;
    let bob = build(Role::Bob, B1, B2)?;

    Ok(RoundRegister {
        round,
        state,
        decoys,
        sequences: [alice, bob],
        completed: PhaseId::P1,
        aborted: false,
    })
}

/// P2: runs `hook` exactly once with the whole register (Charlie still holds
/// every qubit), then hands the sequences over an ideal channel.
pub fn p2_transmit<F>(register: &mut RoundRegister, hook: F) -> Result<[Sequence; 2], ProtocolError>
where
    F: FnOnce(&mut RoundRegister, &[Sequence; 2]) -> Result<(), ProtocolError>,
{
    register.expect_phase(PhaseId::P1)?;
    let sequences = register.sequences.clone();
    hook(register, &sequences)?;
    register.completed = PhaseId::P2;
    Ok(sequences)
}

/// Charlie's public announcement of every decoy position and basis.
pub fn decoy_announcements(register: &RoundRegister) -> Vec<DecoyAnnouncement> {
    let mut out: Vec<_> = register
        .decoys
        .iter()
        .map(|d| DecoyAnnouncement {
            owner: d.record.owner,
            position: d.record.position,
            basis: d.record.basis,
        })
        .collect();
    out.sort_by_key(|a| (a.owner, a.position));
    out
}

/// S1/S2: receivers measure each announced decoy in the announced basis and
/// the results are compared with the prepared bits. A failing check aborts
/// the round before E1.
pub fn s_check<S: BranchSource + ?Sized>(
    register: &mut RoundRegister,
    announcements: &[DecoyAnnouncement],
    threshold: f64,
    src: &mut S,
) -> Result<DecoyCheck, ProtocolError> {
    register.expect_phase(PhaseId::P2)?;
    if !(0.0..=1.0).contains(&threshold) {
        return Err(ProtocolError::InvalidConfig(format!(
            "decoy_error_threshold {threshold} outside [0, 1]"
        )));
    }
    let mut mismatches = 0;
    for ann in announcements {
        let decoy = register
            .decoys
            .iter_mut()
            .find(|d| d.record.owner == ann.owner && d.record.position == ann.position)
            .ok_or(ProtocolError::MissingDecoy {
                owner: ann.owner,
                position: ann.position,
            })?;
        let rec = measure_with(&mut decoy.state, &[0], ann.basis.basis(), src)?;
        let bit = rec.outcome.index() as u8;
        decoy.record.measured = Some(bit);
        if bit != decoy.record.prepared {
            mismatches += 1;
        }
    }
    let checked = announcements.len();
    let error_rate = if checked == 0 {
        0.0
    } else {
        mismatches as f64 / checked as f64
    };
    let pass = error_rate <= threshold;
    register.completed = PhaseId::S2;
    register.aborted = !pass;
    Ok(DecoyCheck {
        checked,
        mismatches,
        error_rate,
        pass,
    })
}

/// E1: the authenticated party applies the key's Pauli to its first qubit
/// (A1 for Alice, B1 for Bob).
pub fn e1_encode(register: &mut RoundRegister, key: RoundKey, direction: Role) -> Result<(), ProtocolError> {
    let qubit = match direction {
        Role::Alice => ProtocolQubit::A1,
        Role::Bob => ProtocolQubit::B1,
        Role::Charlie => return Err(ProtocolError::InvalidDirection(direction)),
    };
    encode_on(register, key, qubit)
}

/// E1 with an explicit target qubit.
pub fn encode_on(register: &mut RoundRegister, key: RoundKey, qubit: ProtocolQubit) -> Result<(), ProtocolError> {
    register.expect_phase(PhaseId::S2)?;
    if register.aborted {
        return Err(ProtocolError::Aborted);
    }
    register.state.apply_pauli(qubit.index(), key.pauli())?;
    register.completed = PhaseId::E1;
    Ok(())
}

/// E2: Alice Bell-measures (A1, A2), Bob Bell-measures (B1, B2), and Charlie
/// produces `c`, by measuring C1 and C2 or however his strategy dictates.
pub fn e2_measure<S: BranchSource + ?Sized>(
    register: &mut RoundRegister,
    charlie: &mut Adversary,
    order: &[Role; 3],
    src: &mut S,
) -> Result<Announcements, ProtocolError> {
    register.expect_phase(PhaseId::E1)?;
    let mut sorted = *order;
    sorted.sort();
    if sorted != [Role::Charlie, Role::Alice, Role::Bob] {
        return Err(ProtocolError::BadMeasurementOrder);
    }
    let mut ann = Announcements::default();
    for role in order {
        match role {
            Role::Alice => ann.a = Some(measure_pair(register, ProtocolQubit::A1, ProtocolQubit::A2, src)?),
            Role::Bob => ann.b = Some(measure_pair(register, ProtocolQubit::B1, ProtocolQubit::B2, src)?),
            Role::Charlie => ann.c = Some(charlie.announce_c(&mut register.state, src)?),
        }
    }
    register.completed = PhaseId::E2;
    Ok(ann)
}

fn measure_pair<S: BranchSource + ?Sized>(
    register: &mut RoundRegister,
    first: ProtocolQubit,
    second: ProtocolQubit,
    src: &mut S,
) -> Result<BellLabel, ProtocolError> {
    let rec = measure_with(&mut register.state, &[first.index(), second.index()], Basis::Bell, src)?;
    Ok(BellLabel::from_index(rec.outcome.index()))
}

/// The key implied by the announcements: `a ⊕ b ⊕ (0, c1 ⊕ c2)`.
pub fn recover_key(ann: &Announcements) -> Result<RoundKey, ProtocolError> {
    let a = ann.a.ok_or(ProtocolError::MissingAnnouncement("a"))?;
    let b = ann.b.ok_or(ProtocolError::MissingAnnouncement("b"))?;
    let c = ann.c.ok_or(ProtocolError::MissingAnnouncement("c"))?;
    Ok(RoundKey::from_index((a ^ b ^ c.correction()).index()))
}

/// E3: accept iff the announcements reproduce the shared round key.
pub fn e3_verify(ann: &Announcements, key: RoundKey) -> Result<Decision, ProtocolError> {
    Ok(if recover_key(ann)? == key {
        Decision::Accept
    } else {
        Decision::Reject
    })
}

pub fn run_round<S: BranchSource + ?Sized>(
    config: &ProtocolConfig,
    round: usize,
    key: RoundKey,
    strategy: StrategyId,
    src: &mut S,
) -> Result<RoundRecord, ProtocolError> {
    run_round_with(config, round, key, strategy, &RoundOptions::default(), src)
}

/// One full round P1 → E3.
pub fn run_round_with<S: BranchSource + ?Sized>(
    config: &ProtocolConfig,
    round: usize,
    key: RoundKey,
    strategy: StrategyId,
    options: &RoundOptions,
    src: &mut S,
) -> Result<RoundRecord, ProtocolError> {
    config.validate()?;
    let mut register = p1_prepare(config, round, src)?;
    let mut charlie = Adversary::new(strategy).with_hook_order(options.hook_order);

    p2_transmit(&mut register, |reg, seqs| charlie.on_transmit(reg, seqs, src))?;

    let announced = decoy_announcements(&register);
    let check = s_check(&mut register, &announced, config.decoy_error_threshold, src)?;
    let mut transcript = RoundTranscript {
        round,
        c: None,
        a: None,
        b: None,
        decoys: register.decoy_records(),
        decoy_error_rate: check.error_rate,
        decision: Decision::Abort,
    };
    if !check.pass {
        return Ok(RoundRecord {
            transcript,
            key,
            strategy,
            eve: charlie.into_eve(),
        });
    }

    match options.encode_qubit {
        Some(q) => encode_on(&mut register, key, q)?,
        None => e1_encode(&mut register, key, config.direction)?,
    }
    let ann = e2_measure(&mut register, &mut charlie, &options.e2_order, src)?;

    // E3: the authenticated party announces first; Charlie sees it before revealing c.
    let first = match config.direction {
        Role::Alice => ann.a,
        _ => ann.b,
    }
    .ok_or(ProtocolError::MissingAnnouncement("authenticated party"))?;
    charlie.observe_announcement(config.direction, first)?;
    let decision = e3_verify(&ann, key)?;

    transcript.a = ann.a;
    transcript.b = ann.b;
    transcript.c = ann.c;
    transcript.decision = decision;
    Ok(RoundRecord {
        transcript,
        key,
        strategy,
        eve: charlie.into_eve(),
    })
}

/// Runs every round with its own stream `(config.seed, round)`. The run is
/// aborted if any decoy check fails and accepted only if every round accepts.
pub fn run_protocol(
    config: &ProtocolConfig,
    keys: &[RoundKey],
    strategy: StrategyId,
) -> Result<RunOutcome, ProtocolError> {
    config.validate()?;
    if keys.len() != config.rounds {
        return Err(ProtocolError::KeyLengthMismatch {
            expected: config.rounds,
            got: keys.len(),
        });
    }
    let records = keys
        .iter()
        .enumerate()
        .map(|(round, &key)| {
            let mut src = SeededSource::for_stream(config.seed, round as u64);
            run_round(config, round, key, strategy, &mut src)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let decision = if records.iter().any(|r| r.decision() == Decision::Abort) {
        Decision::Abort
    } else if records.iter().all(|r| r.decision() == Decision::Accept) {
        Decision::Accept
    } else {
        Decision::Reject
    };
    Ok(RunOutcome { records, decision })
}
