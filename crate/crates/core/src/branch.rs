//! Sources of randomness for protocol code.
//!
//! Every random choice in a round (decoy preparation, measurement outcomes,
//! interceptor bases) goes through [`BranchSource::pick`]. Plugging in a
//! [`SeededSource`] samples one run; [`enumerate_branches`] instead replays
//! the same code once per branch and attaches the exact branch probability,
//! so the sampled and exact paths cannot drift apart.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::qsim::{select_outcome, Basis, MeasurementRecord, QsimError, StateVector, ZERO_PROBABILITY};

pub trait BranchSource {
    /// Returns an index chosen with probability proportional to `weights[i]`.
    /// Indices whose weight is negligible are never returned.
    fn pick(&mut self, weights: &[f64]) -> usize;

    fn pick_uniform(&mut self, n: usize) -> usize {
        self.pick(&vec![1.0; n])
    }
}

impl<S: BranchSource + ?Sized> BranchSource for &mut S {
    fn pick(&mut self, weights: &[f64]) -> usize {
        (**self).pick(weights)
    }
}

/// Seeded sampling source (ChaCha8).
#[derive(Debug, Clone)]
pub struct SeededSource {
    rng: ChaCha8Rng,
}

impl SeededSource {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Independent stream `stream` under `seed`; used for per-round streams.
    pub fn for_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { rng }
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }
}

impl BranchSource for SeededSource {
    fn pick(&mut self, weights: &[f64]) -> usize {
        let r = self.uniform();
        select_outcome(weights, r)
    }
}

/// Measures `qubits` in `basis`, drawing the outcome from `src`.
pub fn measure_with<S: BranchSource + ?Sized>(
    state: &mut StateVector,
    qubits: &[usize],
    basis: Basis,
    src: &mut S,
) -> Result<MeasurementRecord, QsimError> {
    let probs = state.outcome_probabilities(qubits, basis)?;
    let index = src.pick(&probs);
    state.project_outcome(qubits, basis, index)
}

/// One leaf of the branch tree.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch<T> {
    pub value: T,
    pub probability: f64,
}

#[derive(Debug)]
struct Choice {
    taken: usize,
    probs: Vec<f64>,
}

struct Replay {
    prefix: Vec<usize>,
    trail: Vec<Choice>,
    weight: f64,
}

fn first_possible(probs: &[f64], from: usize) -> Option<usize> {
    (from..probs.len()).find(|&i| probs[i] > ZERO_PROBABILITY)
}

impl BranchSource for Replay {
    fn pick(&mut self, weights: &[f64]) -> usize {
        let total: f64 = weights.iter().sum();
        let probs: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let depth = self.trail.len();
        let taken = match self.prefix.get(depth) {
            Some(&t) => t,
            None => first_possible(&probs, 0).expect("no outcome with positive weight"),
        };
        debug_assert!(probs[taken] > ZERO_PROBABILITY, "replay diverged at depth {depth}");
        self.weight *= probs[taken];
        self.trail.push(Choice { taken, probs });
        taken
    }
}

/// Runs `f` once for every branch of its random choices, depth first, and
/// returns each result with the probability of the branch that produced it.
///
/// `f` must be deterministic given the sequence of picks.
pub fn enumerate_branches<T, F>(mut f: F) -> Vec<Branch<T>>
where
    F: FnMut(&mut dyn BranchSource) -> T,
{
    let mut out = Vec::new();
    let mut prefix = Vec::new();
    loop {
        let mut replay = Replay {
            prefix: std::mem::take(&mut prefix),
            trail: Vec::new(),
            weight: 1.0,
        };
        let value = f(&mut replay);
        out.push(Branch {
            value,
            probability: replay.weight,
        });

        // advance to the next unexplored sibling, deepest first
        let mut trail = replay.trail;
        let next = loop {
            let Some(choice) = trail.pop() else { break None };
            if let Some(sibling) = first_possible(&choice.probs, choice.taken + 1) {
                break Some(sibling);
            }
        };
        match next {
            Some(sibling) => {
                prefix = trail.iter().map(|c| c.taken).collect();
                prefix.push(sibling);
            }
            None => return out,
        }
    }
}
