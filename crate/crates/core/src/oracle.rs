//! Brute-force ground truth and statistics.
//!
//! Tables here are computed from the simulator by enumeration, never from the
//! label-XOR identities they are meant to confirm. Exact transcript
//! distributions reuse the protocol code with the randomness replaced by
//! [`enumerate_branches`].

use std::collections::BTreeMap;

use thiserror::Error;

use crate::adversary::StrategyId;
use crate::branch::{enumerate_branches, Branch};
use crate::protocol::{
    run_round_with, CharlieBits, Decision, ProtocolConfig, ProtocolError, Role, RoundKey, RoundOptions,
    RoundRecord,
};
use crate::qsim::{outcome_distribution, BellLabel, PauliLabel, PlanStep, StateVector};

/// Tolerance on the total mass of a [`Distribution`].
pub const MASS_TOLERANCE: f64 = 1e-10;

/// Two-sided 95% normal quantile used for Wilson intervals.
pub const WILSON_Z_95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error("no exact enumeration for strategy {0}")]
    Unsupported(StrategyId),
    #[error("distributions are over different outcome spaces")]
    OutcomeSpaceMismatch,
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("no results to summarize")]
    EmptyInput,
}

/// Probability table over a finite, explicitly listed outcome space.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution<K: Ord> {
    entries: BTreeMap<K, f64>,
}

impl<K: Ord> Distribution<K> {
    pub fn new(entries: BTreeMap<K, f64>) -> Result<Self, OracleError> {
        if entries.values().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(OracleError::InvalidDistribution("negative or non-finite entry".into()));
        }
        let total: f64 = entries.values().sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(OracleError::InvalidDistribution(format!("total mass {total}")));
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &BTreeMap<K, f64> {
        &self.entries
    }

    /// Probability of `k`; zero when `k` is outside the outcome space.
    pub fn get(&self, k: &K) -> f64 {
        self.entries.get(k).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Outcomes with probability above `tol`.
    pub fn support(&self, tol: f64) -> impl Iterator<Item = (&K, f64)> {
        self.entries.iter().filter(move |(_, p)| **p > tol).map(|(k, p)| (k, *p))
    }
}

/// `½ Σ |p − q|` over a shared outcome space.
pub fn tv_distance<K: Ord>(d1: &Distribution<K>, d2: &Distribution<K>) -> Result<f64, OracleError> {
    if d1.entries.len() != d2.entries.len() || d1.entries.keys().zip(d2.entries.keys()).any(|(a, b)| a != b) {
        return Err(OracleError::OutcomeSpaceMismatch);
    }
    Ok(0.5
        * d1
            .entries
            .values()
            .zip(d2.entries.values())
            .map(|(p, q)| (p - q).abs())
            .sum::<f64>())
}

/// Joint Bell outcomes `(P on A1A2, Q on B1B2)` when `M` sits on A1B1 and `N`
/// on A2B2.
#[derive(Debug, Clone, PartialEq)]
pub struct SwapTable {
    pub input: (BellLabel, BellLabel),
    pub joint: Distribution<(BellLabel, BellLabel)>,
}

pub fn swap_table(m: BellLabel, n: BellLabel) -> SwapTable {
    // qubit order A1 B1 A2 B2
    let pair = |l: BellLabel| StateVector::from_amplitudes(l.amplitudes().to_vec()).expect("Bell state is normalized");
    let state = pair(m).tensor(&pair(n)).expect("4 qubits");
    let raw = outcome_distribution(&state, &[PlanStep::bell(0, 2), PlanStep::bell(1, 3)])
        .expect("disjoint plan on a normalized state");
    let entries = raw
        .into_iter()
        .map(|(outcome, p)| {
            let p_label = outcome[0].bell().expect("Bell outcome");
            let q_label = outcome[1].bell().expect("Bell outcome");
            ((p_label, q_label), p)
        })
        .collect();
    SwapTable {
        input: (m, n),
        joint: Distribution::new(entries).expect("outcome_distribution is complete"),
    }
}

/// The Bell state reached by applying `p` to one half of Bell state `m`.
pub fn pauli_bell_map(p: PauliLabel, m: BellLabel) -> BellLabel {
    m ^ p
}

/// `(c, a, b)`.
pub type TranscriptCell = (CharlieBits, BellLabel, BellLabel);

/// The 64 cells of the public E-phase outcome space in canonical order.
pub fn transcript_space() -> impl Iterator<Item = TranscriptCell> {
    CharlieBits::ALL.into_iter().flat_map(|c| {
        BellLabel::ALL
            .into_iter()
            .flat_map(move |a| BellLabel::ALL.into_iter().map(move |b| (c, a, b)))
    })
}

/// Every branch of one round, with its exact probability.
pub fn exact_round_branches(
    strategy: StrategyId,
    key: RoundKey,
    direction: Role,
    decoys_per_sequence: usize,
    options: &RoundOptions,
) -> Result<Vec<Branch<RoundRecord>>, OracleError> {
    if strategy == StrategyId::InterceptResend {
        return Err(OracleError::Unsupported(strategy));
    }
    let config = ProtocolConfig {
        rounds: 1,
        decoys_per_sequence,
        decoy_error_threshold: 0.0,
        direction,
        seed: 0,
    };
    config.validate()?;
    enumerate_branches(|src| run_round_with(&config, 0, key, strategy, options, src))
        .into_iter()
        .map(|b| {
            Ok(Branch {
                value: b.value?,
                probability: b.probability,
            })
        })
        .collect()
}

pub fn exact_transcript_distribution(
    strategy: StrategyId,
    key: RoundKey,
    direction: Role,
) -> Result<Distribution<TranscriptCell>, OracleError> {
    exact_transcript_distribution_with(strategy, key, direction, &RoundOptions::default())
}

/// Exact distribution of `(c, a, b)` over the full 64-cell space. Decoys are
/// left out; they are independent of the protocol qubits and checked separately.
pub fn exact_transcript_distribution_with(
    strategy: StrategyId,
    key: RoundKey,
    direction: Role,
    options: &RoundOptions,
) -> Result<Distribution<TranscriptCell>, OracleError> {
    let mut entries: BTreeMap<TranscriptCell, f64> = transcript_space().map(|cell| (cell, 0.0)).collect();
    for branch in exact_round_branches(strategy, key, direction, 0, options)? {
        let t = &branch.value.transcript;
        let cell = match (t.c, t.a, t.b) {
            (Some(c), Some(a), Some(b)) => (c, a, b),
            _ => return Err(ProtocolError::MissingAnnouncement("c/a/b").into()),
        };
        *entries.get_mut(&cell).expect("cell in space") += branch.probability;
    }
    Distribution::new(entries)
}

/// Exact per-round probabilities for one strategy and key.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactSummary {
    pub accept_probability: f64,
    pub abort_probability: f64,
    /// `None` for strategies that do not attempt key inference.
    pub key_recovery_probability: Option<f64>,
}

pub fn exact_summary(strategy: StrategyId, key: RoundKey, direction: Role) -> Result<ExactSummary, OracleError> {
    let branches = exact_round_branches(strategy, key, direction, 0, &RoundOptions::default())?;
    let mass = |pred: &dyn Fn(&RoundRecord) -> bool| -> f64 {
        branches.iter().filter(|b| pred(&b.value)).map(|b| b.probability).fold(0.0, |acc, p| acc + p)
    };
    let attempted = branches.iter().any(|b| b.value.key_recovered().is_some());
    Ok(ExactSummary {
        accept_probability: mass(&|r| r.decision() == Decision::Accept),
        abort_probability: mass(&|r| r.decision() == Decision::Abort),
        key_recovery_probability: attempted.then(|| mass(&|r| r.key_recovered() == Some(true))),
    })
}

/// Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // the bounds are exactly 0 and 1 at the extremes
    let low = if successes == 0 { 0.0 } else { (center - half).max(0.0) };
    let high = if successes == trials { 1.0 } else { (center + half).min(1.0) };
    (low, high)
}

/// Empirical rate with its 95% Wilson interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rate {
    pub successes: u64,
    pub trials: u64,
    pub value: f64,
    pub low: f64,
    pub high: f64,
}

impl Rate {
    pub fn new(successes: u64, trials: u64) -> Self {
        let (low, high) = wilson_interval(successes, trials, WILSON_Z_95);
        let value = if trials == 0 { 0.0 } else { successes as f64 / trials as f64 };
        Self {
            successes,
            trials,
            value,
            low,
            high,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.low <= x && x <= self.high
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateReport {
    pub rounds: u64,
    pub accept: Rate,
    /// Rounds aborted by the decoy check.
    pub detection: Rate,
    /// Over rounds in which the adversary attempted key inference.
    pub key_recovery: Option<Rate>,
}

/// Per-round rates over sampled records.
pub fn sampled_rates(records: &[RoundRecord]) -> Result<RateReport, OracleError> {
    if records.is_empty() {
        return Err(OracleError::EmptyInput);
    }
    let n = records.len() as u64;
    let count = |pred: &dyn Fn(&RoundRecord) -> bool| records.iter().filter(|r| pred(r)).count() as u64;
    let accepted = count(&|r| r.decision() == Decision::Accept);
    let detected = count(&|r| r.detected());
    let attempted = count(&|r| r.key_recovered().is_some());
    let recovered = count(&|r| r.key_recovered() == Some(true));
    Ok(RateReport {
        rounds: n,
        accept: Rate::new(accepted, n),
        detection: Rate::new(detected, n),
        key_recovery: (attempted > 0).then(|| Rate::new(recovered, attempted)),
    })
}
