//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use cmqea_core::branch::SeededSource;
use cmqea_core::oracle::{
    exact_round_branches, exact_transcript_distribution, pauli_bell_map, sampled_rates, swap_table, tv_distance,
};
use cmqea_core::protocol::{
    e3_verify, run_protocol, run_sampled, Announcements, Decision, ProtocolConfig, Role, RoundKey, RoundOptions,
    RoundRecord,
};
use cmqea_core::qsim::{outcome_distribution, BellLabel, PauliLabel, PlanStep, StateVector};
use cmqea_core::StrategyId;

const DIRECTIONS: [Role; 2] = [Role::Alice, Role::Bob];

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

/// 1. Exact honest and pre-measure transcript distributions coincide.
fn undetectability() -> Verdict {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for direction in DIRECTIONS {
        for key in RoundKey::ALL {
            let honest = exact_transcript_distribution(StrategyId::Honest, key, direction).unwrap();
            let attack = exact_transcript_distribution(StrategyId::PreMeasure, key, direction).unwrap();
            worst = worst.max(tv_distance(&honest, &attack).unwrap());
        }
    }
    let elapsed = start.elapsed();
    verdict(
        worst <= 1e-12 && elapsed < Duration::from_secs(1),
        format!("max TV = {worst:e} (<= 1e-12), {:.3} s (< 1 s)", elapsed.as_secs_f64()),
    )
}

/// 2. Charlie infers the key on every branch and in every sampled round.
fn key_theft() -> Verdict {
    let mut branches = 0;
    let mut hits = 0;
    for direction in DIRECTIONS {
        for key in RoundKey::ALL {
            for b in exact_round_branches(StrategyId::PreMeasure, key, direction, 0, &RoundOptions::default()).unwrap() {
                branches += 1;
                hits += usize::from(b.value.inferred_key() == Some(key));
            }
        }
    }
    let cfg = ProtocolConfig {
        rounds: 10_000,
        decoys_per_sequence: 4,
        seed: 0xC0FFEE,
        ..ProtocolConfig::default()
    };
    let keys = cmqea_core::protocol::draw_keys(cfg.seed, cfg.rounds);
    let out = run_protocol(&cfg, &keys, StrategyId::PreMeasure).unwrap();
    let rates = sampled_rates(&out.records).unwrap();
    let recovery = rates.key_recovery.map_or(0.0, |r| r.value);
    verdict(
        hits == branches && recovery == 1.0 && rates.rounds == 10_000,
        format!("exact {hits}/{branches} branches, sampled key_recovery_rate = {recovery} over {} rounds", rates.rounds),
    )
}

/// 3. The pre-measure attack never trips the decoy check.
fn decoy_evasion() -> Verdict {
    let mut rounds = 0;
    let mut worst: f64 = 0.0;
    for d in 0..=8 {
        let cfg = ProtocolConfig {
            rounds: 10_000,
            decoys_per_sequence: d,
            seed: 300 + d as u64,
            ..ProtocolConfig::default()
        };
        let keys = cmqea_core::protocol::draw_keys(cfg.seed, cfg.rounds);
        let out = run_protocol(&cfg, &keys, StrategyId::PreMeasure).unwrap();
        for r in out.transcript().rounds {
            rounds += 1;
            worst = worst.max(r.decoy_error_rate);
        }
    }
    verdict(worst == 0.0, format!("max decoy error rate = {worst} over {rounds} rounds, d = 0..=8"))
}

/// 4. Honest runs accept with probability 1; wrong keys are always rejected.
fn honest_completeness() -> Verdict {
    let mut min_accept: f64 = 1.0;
    let mut wrong_accepts = 0;
    for direction in DIRECTIONS {
        for key in RoundKey::ALL {
            let branches = exact_round_branches(StrategyId::Honest, key, direction, 0, &RoundOptions::default()).unwrap();
            let accept: f64 = branches
                .iter()
                .filter(|b| b.value.decision() == Decision::Accept)
                .map(|b| b.probability)
                .sum();
            min_accept = min_accept.min(accept);
            wrong_accepts += branches
                .iter()
                .flat_map(|b| {
                    let t = &b.value.transcript;
                    let ann = Announcements { a: t.a, b: t.b, c: t.c };
                    RoundKey::ALL
                        .into_iter()
                        .filter(move |k| *k != key)
                        .map(move |k| e3_verify(&ann, k).unwrap())
                })
                .filter(|d| *d != Decision::Reject)
                .count();
        }
    }
    verdict(
        (min_accept - 1.0).abs() <= 1e-12 && wrong_accepts == 0,
        format!("min exact acceptance = {min_accept}, wrong-key accepts = {wrong_accepts}"),
    )
}

/// 5. Swap tables and the Pauli-Bell map against simulator brute force.
fn swap_oracle() -> Verdict {
    let mut bad_tables = 0;
    for m in BellLabel::ALL {
        for n in BellLabel::ALL {
            let t = swap_table(m, n);
            let support: Vec<_> = t.joint.support(1e-12).collect();
            let ok = support.len() == 4
                && support
                    .iter()
                    .all(|((p, q), prob)| (prob - 0.25).abs() <= 1e-12 && *p ^ *q == m ^ n);
            bad_tables += usize::from(!ok);
        }
    }
    let mut bad_map = 0;
    for p in PauliLabel::ALL {
        for m in BellLabel::ALL {
            for qubit in [0, 1] {
                let mut s = StateVector::from_amplitudes(m.amplitudes().to_vec()).unwrap();
                s.apply_pauli(qubit, p).unwrap();
                let d = outcome_distribution(&s, &[PlanStep::bell(0, 1)]).unwrap();
                let hit = d
                    .iter()
                    .find(|(_, &prob)| (prob - 1.0).abs() <= 1e-12)
                    .and_then(|(o, _)| o[0].bell());
                bad_map += usize::from(hit != Some(pauli_bell_map(p, m)));
            }
        }
    }
    verdict(
        bad_tables == 0 && bad_map == 0,
        format!("{} / 16 swap tables ok, {} / 32 Pauli-Bell checks ok", 16 - bad_tables, 32 - bad_map),
    )
}

/// 6. Intercept-resend with one decoy per sequence is detected at 1 − (3/4)².
fn baseline_contrast() -> Verdict {
    let start = Instant::now();
    let cfg = ProtocolConfig {
        rounds: 1,
        decoys_per_sequence: 1,
        seed: 6,
        ..ProtocolConfig::default()
    };
    let runs = run_sampled(&cfg, StrategyId::InterceptResend, 100_000).unwrap();
    let records: Vec<RoundRecord> = runs.into_iter().flat_map(|r| r.records).collect();
    let rate = sampled_rates(&records).unwrap().detection;
    let elapsed = start.elapsed();
    verdict(
        rate.contains(0.4375) && elapsed < Duration::from_secs(30),
        format!(
            "detection = {:.5} [{:.5}, {:.5}] over {} runs, expected 0.4375, {:.2} s (< 30 s)",
            rate.value,
            rate.low,
            rate.high,
            rate.trials,
            elapsed.as_secs_f64()
        ),
    )
}

/// 7. Random gate/measurement sequences keep the norm and complete distributions.
fn numerical_hygiene() -> Verdict {
    let mut src = SeededSource::new(7);
    let mut worst_norm: f64 = 0.0;
    let mut worst_mass: f64 = 0.0;
    let sequences = 1_000;
    for _ in 0..sequences {
        let n = 2 + (src.uniform() * 9.0) as usize; // 2..=10
        let mut s = StateVector::zeros(n).unwrap();
        let pick = |src: &mut SeededSource, k: usize| ((src.uniform() * k as f64) as usize).min(k - 1);
        for _ in 0..40 {
            let q = pick(&mut src, n);
            let q2 = (q + 1 + pick(&mut src, n - 1)) % n;
            match pick(&mut src, 6) {
                0 => s.apply_pauli(q, PauliLabel::from_index(pick(&mut src, 4))).unwrap(),
                1 => s.apply_hadamard(q).unwrap(),
                2 => s.apply_cnot(q, q2).unwrap(),
                3 => drop(s.measure_z(q, src.uniform()).unwrap()),
                4 => drop(s.measure_x(q, src.uniform()).unwrap()),
                _ => drop(s.measure_bell(q, q2, src.uniform()).unwrap()),
            }
            worst_norm = worst_norm.max(s.norm_deviation());
        }
        // plan over a random disjoint subset: a Bell pair then singles
        let mut plan = vec![PlanStep::bell(0, 1)];
        for q in 2..n {
            match pick(&mut src, 3) {
                0 => plan.push(PlanStep::z(q)),
                1 => plan.push(PlanStep::x(q)),
                _ => {}
            }
        }
        let mass: f64 = outcome_distribution(&s, &plan).unwrap().values().sum();
        worst_mass = worst_mass.max((mass - 1.0).abs());
    }
    verdict(
        worst_norm <= 1e-10 && worst_mass <= 1e-10,
        format!("{sequences} sequences: max norm deviation {worst_norm:e}, max mass deviation {worst_mass:e}"),
    )
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("1 undetectability", undetectability),
        ("2 key theft", key_theft),
        ("3 decoy evasion", decoy_evasion),
        ("4 honest completeness", honest_completeness),
        ("5 swap-table oracle", swap_oracle),
        ("6 baseline contrast", baseline_contrast),
        ("7 numerical hygiene", numerical_hygiene),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let v = check();
        println!("[{}] {name}: {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
        failed += usize::from(!v.pass);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
