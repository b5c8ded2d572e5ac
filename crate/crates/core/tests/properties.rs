//! Protocol-level invariants checked by exact enumeration, with sampled
//! cross-checks where the state space is too large to enumerate.

use std::collections::BTreeMap;

use cmqea_core::adversary::{hook_intercept_resend, HookStep};
use cmqea_core::branch::enumerate_branches;
use cmqea_core::oracle::{
    exact_round_branches, exact_transcript_distribution, exact_transcript_distribution_with, tv_distance,
};
use cmqea_core::protocol::{
    decoy_announcements, e3_verify, p1_prepare, p2_transmit, run_protocol, run_sampled, s_check, Announcements,
    Decision, ProtocolConfig, ProtocolQubit, Role, RoundKey, RoundOptions, Sequence, Slot,
};
use cmqea_core::qsim::{init_product, outcome_distribution, Basis, Outcome, PlanStep, QubitPrep};
use cmqea_core::StrategyId;

const TOL: f64 = 1e-12;

#[test]
fn honest_runs_accept_and_wrong_keys_reject_on_every_branch() {
    for direction in [Role::Alice, Role::Bob] {
        for key in RoundKey::ALL {
            let branches = exact_round_branches(StrategyId::Honest, key, direction, 0, &RoundOptions::default()).unwrap();
            let accepted: f64 = branches
                .iter()
                .filter(|b| b.value.decision() == Decision::Accept)
                .map(|b| b.probability)
                .sum();
            assert!((accepted - 1.0).abs() < TOL);
            for b in &branches {
                let t = &b.value.transcript;
                let ann = Announcements { a: t.a, b: t.b, c: t.c };
                for wrong in RoundKey::ALL.into_iter().filter(|k| *k != key) {
                    assert_eq!(e3_verify(&ann, wrong), Ok(Decision::Reject));
                }
            }
        }
    }
}

#[test]
fn transcript_equality_includes_decoy_records() {
    // one decoy per sequence: (c, a, b, decoy records) jointly, exact
    let joint = |strategy| {
        let mut d: BTreeMap<_, f64> = BTreeMap::new();
        for b in exact_round_branches(strategy, RoundKey::from_index(2), Role::Alice, 1, &RoundOptions::default()).unwrap() {
            let t = b.value.transcript;
            *d.entry((t.c, t.a, t.b, t.decoys, t.decision)).or_default() += b.probability;
        }
        d
    };
    let honest = joint(StrategyId::Honest);
    let attack = joint(StrategyId::PreMeasure);
    assert_eq!(honest.keys().collect::<Vec<_>>(), attack.keys().collect::<Vec<_>>());
    let tv: f64 = 0.5 * honest.iter().map(|(k, p)| (p - attack[k]).abs()).sum::<f64>();
    assert!(tv <= TOL, "tv = {tv}");
}

#[test]
fn transcript_distribution_is_order_invariant() {
    use HookStep::*;
    let orders = [
        ([CharlieQubits, AlicePair, BobPair], [Role::Alice, Role::Bob, Role::Charlie]),
        ([BobPair, AlicePair, CharlieQubits], [Role::Charlie, Role::Bob, Role::Alice]),
        ([AlicePair, CharlieQubits, BobPair], [Role::Bob, Role::Charlie, Role::Alice]),
    ];
    for strategy in [StrategyId::Honest, StrategyId::PreMeasure] {
        for key in RoundKey::ALL {
            let reference = exact_transcript_distribution(strategy, key, Role::Alice).unwrap();
            for (hook_order, e2_order) in orders {
                let options = RoundOptions {
                    hook_order,
                    e2_order,
                    encode_qubit: None,
                };
                let d = exact_transcript_distribution_with(strategy, key, Role::Alice, &options).unwrap();
                assert!(tv_distance(&reference, &d).unwrap() <= TOL);
            }
        }
    }
}

#[test]
fn encoding_on_the_second_qubit_is_equivalent() {
    for strategy in [StrategyId::Honest, StrategyId::PreMeasure] {
        for key in RoundKey::ALL {
            let first = exact_transcript_distribution(strategy, key, Role::Alice).unwrap();
            let options = RoundOptions {
                encode_qubit: Some(ProtocolQubit::A2),
                ..RoundOptions::default()
            };
            let second = exact_transcript_distribution_with(strategy, key, Role::Alice, &options).unwrap();
            assert!(tv_distance(&first, &second).unwrap() <= TOL);
            for b in exact_round_branches(strategy, key, Role::Alice, 0, &options).unwrap() {
                assert_eq!(b.value.decision(), Decision::Accept);
                if strategy == StrategyId::PreMeasure {
                    assert_eq!(b.value.inferred_key(), Some(key));
                }
            }
        }
    }
}

#[test]
fn premeasure_recovers_every_key_in_both_directions() {
    for direction in [Role::Alice, Role::Bob] {
        for key in RoundKey::ALL {
            let branches = exact_round_branches(StrategyId::PreMeasure, key, direction, 0, &RoundOptions::default()).unwrap();
            assert_eq!(branches.len(), 16);
            for b in branches {
                assert_eq!(b.value.inferred_key(), Some(key));
                assert_eq!(b.value.decision(), Decision::Accept);
                let eve = b.value.eve.unwrap().observed.unwrap();
                assert!(eve.satisfies_swap_constraint());
                // under the attack Bob's result is exactly Charlie's early B-pair label
                if direction == Role::Alice {
                    assert_eq!(b.value.transcript.b, Some(eve.b_pre));
                    assert_eq!(b.value.transcript.c, Some(eve.c_pre));
                }
            }
        }
    }
}

#[test]
fn premeasure_run_reports_the_key_list() {
    let cfg = ProtocolConfig {
        rounds: 12,
        decoys_per_sequence: 3,
        seed: 99,
        ..ProtocolConfig::default()
    };
    let keys: Vec<_> = (0..12).map(|i| RoundKey::from_index(i % 4)).collect();
    let out = run_protocol(&cfg, &keys, StrategyId::PreMeasure).unwrap();
    assert_eq!(out.decision, Decision::Accept);
    let stolen: Vec<_> = out.adversary_report().recovered_keys().into_iter().map(Option::unwrap).collect();
    assert_eq!(stolen, keys);
    assert!(out.transcript().rounds.iter().all(|r| r.decoy_error_rate == 0.0));
}

#[test]
fn per_decoy_mismatch_under_intercept_resend_is_one_quarter() {
    // oracle: 4 decoy states × 2 interceptor bases, everything via outcome_distribution
    let mut total = 0.0;
    for (prep, check_basis, prepared) in [
        (QubitPrep::Zero, Basis::Z, 0u8),
        (QubitPrep::One, Basis::Z, 1),
        (QubitPrep::Plus, Basis::X, 0),
        (QubitPrep::Minus, Basis::X, 1),
    ] {
        for intercept in [Basis::Z, Basis::X] {
            let state = init_product(&[prep]).unwrap();
            let step = PlanStep { qubits: vec![0], basis: intercept };
            for (outcome, p) in outcome_distribution(&state, &[step]).unwrap() {
                if p <= TOL {
                    continue;
                }
                let mut collapsed = state.clone();
                collapsed.project(&[0], intercept, outcome[0].index()).unwrap();
                let check = PlanStep { qubits: vec![0], basis: check_basis };
                let d = outcome_distribution(&collapsed, &[check]).unwrap();
                total += p * d[&vec![Outcome::Bit(prepared ^ 1)]] / 8.0;
            }
        }
    }
    assert!((total - 0.25).abs() < TOL);
}

fn decoy_only(seqs: &[Sequence; 2]) -> [Sequence; 2] {
    seqs.clone().map(|mut s| {
        s.slots.retain(|slot| matches!(slot, Slot::Decoy(_)));
        s
    })
}

#[test]
fn intercepting_the_decoys_passes_with_probability_three_quarters_per_decoy() {
    // exact, through the protocol's own P1/P2/S code
    let cfg = ProtocolConfig {
        rounds: 1,
        decoys_per_sequence: 1,
        ..ProtocolConfig::default()
    };
    let branches = enumerate_branches(|src| {
        let mut reg = p1_prepare(&cfg, 0, src).unwrap();
        p2_transmit(&mut reg, |r, seqs| hook_intercept_resend(r, &decoy_only(seqs), src)).unwrap();
        let ann = decoy_announcements(&reg);
        s_check(&mut reg, &ann, 0.0, src).unwrap().pass
    });
    let pass: f64 = branches.iter().filter(|b| b.value).map(|b| b.probability).sum();
    assert!((pass - 0.5625).abs() < TOL, "{pass}");
}

#[test]
fn intercept_resend_pass_probability_is_geometric() {
    // oracle: n independent decoys, enumerate preparation × interceptor basis ×
    // intercept outcome × check outcome
    for n in 1..=3usize {
        let pass: f64 = enumerate_branches(|src| {
            (0..n).all(|_| {
                let basis = [Basis::Z, Basis::X][src.pick_uniform(2)];
                let bit = src.pick_uniform(2);
                let prep = [[QubitPrep::Zero, QubitPrep::One], [QubitPrep::Plus, QubitPrep::Minus]][usize::from(basis == Basis::X)][bit];
                let mut q = init_product(&[prep]).unwrap();
                let intercept = [Basis::Z, Basis::X][src.pick_uniform(2)];
                let probs = q.outcome_probabilities(&[0], intercept).unwrap();
                q.project(&[0], intercept, src.pick(&probs)).unwrap();
                let probs = q.outcome_probabilities(&[0], basis).unwrap();
                src.pick(&probs) == bit
            })
        })
        .iter()
        .filter(|b| b.value)
        .map(|b| b.probability)
        .sum();
        assert!((pass - 0.75f64.powi(n as i32)).abs() < TOL, "n = {n}: {pass}");
    }

    // protocol sampling: d decoys per sequence means 2d checked decoys
    for d in 1..=3usize {
        let cfg = ProtocolConfig {
            rounds: 1,
            decoys_per_sequence: d,
            seed: 1000 + d as u64,
            ..ProtocolConfig::default()
        };
        let runs = 20_000;
        let passed = run_sampled(&cfg, StrategyId::InterceptResend, runs)
            .unwrap()
            .iter()
            .filter(|r| r.decision != Decision::Abort)
            .count() as f64;
        let want = 0.75f64.powi(2 * d as i32);
        let se = (want * (1.0 - want) / runs as f64).sqrt();
        assert!((passed / runs as f64 - want).abs() < 5.0 * se, "d = {d}");
    }
}

#[test]
fn zero_decoys_are_never_detected() {
    let cfg = ProtocolConfig {
        rounds: 8,
        decoys_per_sequence: 0,
        ..ProtocolConfig::default()
    };
    for out in run_sampled(&cfg, StrategyId::InterceptResend, 200).unwrap() {
        assert_ne!(out.decision, Decision::Abort);
    }
}

#[test]
fn identical_inputs_give_identical_transcripts() {
    let cfg = ProtocolConfig {
        rounds: 6,
        seed: 7,
        ..ProtocolConfig::default()
    };
    let keys: Vec<_> = (0..6).map(|i| RoundKey::from_index((i * 3) % 4)).collect();
    for strategy in StrategyId::ALL {
        let a = run_protocol(&cfg, &keys, strategy).unwrap();
        let b = run_protocol(&cfg, &keys, strategy).unwrap();
        assert_eq!(a.transcript(), b.transcript());
        assert_eq!(a.decision, b.decision);
    }
    let other = ProtocolConfig { seed: 8, ..cfg.clone() };
    assert_ne!(
        run_protocol(&cfg, &keys, StrategyId::Honest).unwrap().transcript(),
        run_protocol(&other, &keys, StrategyId::Honest).unwrap().transcript()
    );
}

#[test]
fn sampled_honest_statistics_match_the_exact_distribution() {
    let key = RoundKey::from_index(1);
    let exact = exact_transcript_distribution(StrategyId::Honest, key, Role::Alice).unwrap();
    let n = 100_000usize;
    let cfg = ProtocolConfig {
        rounds: n,
        decoys_per_sequence: 0,
        seed: 4242,
        ..ProtocolConfig::default()
    };
    let out = run_protocol(&cfg, &vec![key; n], StrategyId::Honest).unwrap();
    let mut counts: BTreeMap<_, usize> = BTreeMap::new();
    for r in &out.records {
        let t = &r.transcript;
        *counts.entry((t.c.unwrap(), t.a.unwrap(), t.b.unwrap())).or_default() += 1;
    }
    for (cell, &p) in exact.entries() {
        let got = counts.get(cell).copied().unwrap_or(0) as f64 / n as f64;
        let se = (p * (1.0 - p) / n as f64).sqrt();
        if p == 0.0 {
            assert_eq!(got, 0.0, "{cell:?}");
        } else {
            assert!((got - p).abs() <= 5.0 * se, "{cell:?}: {got} vs {p}");
        }
    }
}

#[test]
fn intercept_resend_disturbs_the_protocol_too() {
    // with no decoys the attack goes unnoticed by the check but breaks verification
    let cfg = ProtocolConfig {
        rounds: 2000,
        decoys_per_sequence: 0,
        seed: 5,
        ..ProtocolConfig::default()
    };
    let keys = vec![RoundKey::from_index(0); 2000];
    let out = run_protocol(&cfg, &keys, StrategyId::InterceptResend).unwrap();
    let rejected = out.records.iter().filter(|r| r.decision() == Decision::Reject).count();
    assert!(rejected > 0);
}
