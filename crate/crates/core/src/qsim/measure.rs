use std::collections::BTreeMap;

use num_complex::Complex64;

use super::{BellLabel, QsimError, StateVector, NORM_TOLERANCE, ZERO_PROBABILITY};

/// Projective measurement basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Basis {
    Z,
    X,
    Bell,
}

impl Basis {
    pub fn arity(self) -> usize {
        match self {
            Basis::Z | Basis::X => 1,
            Basis::Bell => 2,
        }
    }

    pub fn outcome_count(self) -> usize {
        match self {
            Basis::Z | Basis::X => 2,
            Basis::Bell => 4,
        }
    }

    fn outcome(self, index: usize) -> Outcome {
        match self {
            Basis::Z | Basis::X => Outcome::Bit(index as u8),
            Basis::Bell => Outcome::Bell(BellLabel::from_index(index)),
        }
    }
}

/// Result of one measurement: a bit for Z/X, a Bell label for Bell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Outcome {
    Bit(u8),
    Bell(BellLabel),
}

impl Outcome {
    pub fn bit(self) -> Option<u8> {
        match self {
            Outcome::Bit(b) => Some(b),
            Outcome::Bell(_) => None,
        }
    }

    pub fn bell(self) -> Option<BellLabel> {
        match self {
            Outcome::Bell(l) => Some(l),
            Outcome::Bit(_) => None,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Outcome::Bit(b) => usize::from(b),
            Outcome::Bell(l) => l.index(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementRecord {
    pub qubits: Vec<usize>,
    pub basis: Basis,
    pub outcome: Outcome,
    /// Born-rule probability of `outcome` just before the measurement.
    pub probability: f64,
}

/// One entry of a measurement plan for [`outcome_distribution`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanStep {
    pub qubits: Vec<usize>,
    pub basis: Basis,
}

impl PlanStep {
    pub fn z(qubit: usize) -> Self {
        Self {
            qubits: vec![qubit],
            basis: Basis::Z,
        }
    }

    pub fn x(qubit: usize) -> Self {
        Self {
            qubits: vec![qubit],
            basis: Basis::X,
        }
    }

    pub fn bell(q1: usize, q2: usize) -> Self {
        Self {
            qubits: vec![q1, q2],
            basis: Basis::Bell,
        }
    }
}

/// Index of the outcome selected by a uniform draw `r ∈ [0, 1)` against
/// (not necessarily normalized) `weights`. Outcomes with negligible weight are
/// never selected.
pub fn select_outcome(weights: &[f64], r: f64) -> usize {
    let total: f64 = weights.iter().sum();
    let target = r * total;
    let mut cumulative = 0.0;
    let mut last_possible = None;
    for (i, &w) in weights.iter().enumerate() {
        if w <= ZERO_PROBABILITY * total {
            continue;
        }
        cumulative += w;
        last_possible = Some(i);
        if target < cumulative {
            return i;
        }
    }
    last_possible.expect("at least one outcome must have positive weight")
}

impl StateVector {
    fn check_step(&self, qubits: &[usize], basis: Basis) -> Result<(), QsimError> {
        if qubits.len() != basis.arity() {
            return Err(QsimError::Arity {
                basis,
                expected: basis.arity(),
                got: qubits.len(),
            });
        }
        match qubits {
            [q] => self.check_qubit(*q),
            [q1, q2] => self.check_pair(*q1, *q2),
            _ => unreachable!(),
        }
    }

    fn check_normalized(&self) -> Result<(), QsimError> {
        let dev = self.norm_deviation();
        if dev > NORM_TOLERANCE {
            return Err(QsimError::NotNormalized(dev));
        }
        Ok(())
    }

    pub fn z_probabilities(&self, qubit: usize) -> Result<[f64; 2], QsimError> {
        let p1 = self.probability_one(qubit)?;
        let total = self.norm_sqr();
        Ok([total - p1, p1])
    }

    pub fn bell_probabilities(&self, q1: usize, q2: usize) -> Result<[f64; 4], QsimError> {
        self.check_pair(q1, q2)?;
        let mut probs = [0.0; 4];
        for_each_pair_block(self, q1, q2, |block| {
            for label in BellLabel::ALL {
                probs[label.index()] += bell_overlap(label, block).norm_sqr();
            }
        });
        Ok(probs)
    }

    /// Probabilities of every outcome of measuring `qubits` in `basis`, in
    /// outcome-index order.
    pub fn outcome_probabilities(
        &self,
        qubits: &[usize],
        basis: Basis,
    ) -> Result<Vec<f64>, QsimError> {
        self.check_step(qubits, basis)?;
        match basis {
            Basis::Z => Ok(self.z_probabilities(qubits[0])?.to_vec()),
            Basis::X => {
                let mut rotated = self.clone();
                rotated.apply_hadamard(qubits[0])?;
                Ok(rotated.z_probabilities(qubits[0])?.to_vec())
            }
            Basis::Bell => Ok(self.bell_probabilities(qubits[0], qubits[1])?.to_vec()),
        }
    }

    /// Projects onto Z outcome `bit` and renormalizes; returns the outcome probability.
    pub fn project_z(&mut self, qubit: usize, bit: u8) -> Result<f64, QsimError> {
        let probs = self.z_probabilities(qubit)?;
        let p = probs[usize::from(bit & 1)];
        if p <= ZERO_PROBABILITY {
            return Err(QsimError::ZeroProbability(usize::from(bit)));
        }
        let mask = self.mask(qubit);
        let keep_set = bit & 1 == 1;
        let scale = 1.0 / p.sqrt();
        for (i, a) in self.amps_mut().iter_mut().enumerate() {
            if (i & mask != 0) == keep_set {
                *a *= scale;
            } else {
                *a = Complex64::new(0.0, 0.0);
            }
        }
        Ok(p)
    }

    /// Projects onto the Bell state `label` of `(q1, q2)` and renormalizes;
    /// returns the outcome probability.
    pub fn project_bell(&mut self, q1: usize, q2: usize, label: BellLabel) -> Result<f64, QsimError> {
        let p = self.bell_probabilities(q1, q2)?[label.index()];
        if p <= ZERO_PROBABILITY {
            return Err(QsimError::ZeroProbability(label.index()));
        }
        let scale = 1.0 / p.sqrt();
        let v = label.amplitudes();
        let m1 = self.mask(q1);
        let m2 = self.mask(q2);
        let amps = self.amps_mut();
        for base in 0..amps.len() {
            if base & (m1 | m2) != 0 {
                continue;
            }
            let idx = [base, base | m2, base | m1, base | m1 | m2];
            let block = idx.map(|i| amps[i]);
            let overlap = bell_overlap(label, &block) * scale;
            for (k, &i) in idx.iter().enumerate() {
                amps[i] = v[k] * overlap;
            }
        }
        Ok(p)
    }

    /// Projects onto outcome `index` of the given measurement; returns its probability.
    pub fn project(&mut self, qubits: &[usize], basis: Basis, index: usize) -> Result<f64, QsimError> {
        self.check_step(qubits, basis)?;
        if index >= basis.outcome_count() {
            return Err(QsimError::ZeroProbability(index));
        }
        match basis {
            Basis::Z => self.project_z(qubits[0], index as u8),
            Basis::X => {
                self.apply_hadamard(qubits[0])?;
                let p = self.project_z(qubits[0], index as u8);
                self.apply_hadamard(qubits[0])?;
                p
            }
            Basis::Bell => self.project_bell(qubits[0], qubits[1], BellLabel::from_index(index)),
        }
    }

    /// Samples a measurement with the uniform draw `r ∈ [0, 1)` and collapses the state.
    pub fn measure(
        &mut self,
        qubits: &[usize],
        basis: Basis,
        r: f64,
    ) -> Result<MeasurementRecord, QsimError> {
        if !(0.0..1.0).contains(&r) {
            return Err(QsimError::InvalidRandomness(r));
        }
        self.check_normalized()?;
        let probs = self.outcome_probabilities(qubits, basis)?;
        let index = select_outcome(&probs, r);
        self.project_outcome(qubits, basis, index)
    }

    /// Collapses onto a chosen outcome and returns the record for it.
    pub fn project_outcome(
        &mut self,
        qubits: &[usize],
        basis: Basis,
        index: usize,
    ) -> Result<MeasurementRecord, QsimError> {
        let probability = self.project(qubits, basis, index)?;
        Ok(MeasurementRecord {
            qubits: qubits.to_vec(),
            basis,
            outcome: basis.outcome(index),
            probability,
        })
    }

    pub fn measure_z(&mut self, qubit: usize, r: f64) -> Result<(u8, MeasurementRecord), QsimError> {
        let record = self.measure(&[qubit], Basis::Z, r)?;
        Ok((record.outcome.index() as u8, record))
    }

    pub fn measure_x(&mut self, qubit: usize, r: f64) -> Result<(u8, MeasurementRecord), QsimError> {
        let record = self.measure(&[qubit], Basis::X, r)?;
        Ok((record.outcome.index() as u8, record))
    }

    pub fn measure_bell(
        &mut self,
        q1: usize,
        q2: usize,
        r: f64,
    ) -> Result<(BellLabel, MeasurementRecord), QsimError> {
        let record = self.measure(&[q1, q2], Basis::Bell, r)?;
        Ok((BellLabel::from_index(record.outcome.index()), record))
    }
}

/// ⟨label| restricted to one 4-amplitude block (q1 most significant).
fn bell_overlap(label: BellLabel, block: &[Complex64; 4]) -> Complex64 {
    label
        .amplitudes()
        .iter()
        .zip(block)
        .map(|(v, a)| v.conj() * a)
        .sum()
}

fn for_each_pair_block(state: &StateVector, q1: usize, q2: usize, mut f: impl FnMut(&[Complex64; 4])) {
    let m1 = state.mask(q1);
    let m2 = state.mask(q2);
    let amps = state.amplitudes();
    for base in 0..amps.len() {
        if base & (m1 | m2) == 0 {
            f(&[amps[base], amps[base | m2], amps[base | m1], amps[base | m1 | m2]]);
        }
    }
}

/// Exact joint distribution of a measurement plan by exhaustive branch
/// enumeration. Every outcome tuple of the plan appears as a key, including
/// impossible ones (probability 0).
pub fn outcome_distribution(
    state: &StateVector,
    plan: &[PlanStep],
) -> Result<BTreeMap<Vec<Outcome>, f64>, QsimError> {
    let mut seen = vec![false; state.n_qubits()];
    for step in plan {
        state.check_step(&step.qubits, step.basis)?;
        for &q in &step.qubits {
            if std::mem::replace(&mut seen[q], true) {
                return Err(QsimError::OverlappingPlan(q));
            }
        }
    }
    state.check_normalized()?;

    let mut out = BTreeMap::new();
    let mut prefix = Vec::with_capacity(plan.len());
    enumerate(state, plan, 1.0, &mut prefix, &mut out)?;
    Ok(out)
}

fn enumerate(
    state: &StateVector,
    plan: &[PlanStep],
    weight: f64,
    prefix: &mut Vec<Outcome>,
    out: &mut BTreeMap<Vec<Outcome>, f64>,
) -> Result<(), QsimError> {
    let Some((step, rest)) = plan.split_first() else {
        out.insert(prefix.clone(), weight);
        return Ok(());
    };
    let probs = if weight > 0.0 {
        state.outcome_probabilities(&step.qubits, step.basis)?
    } else {
        vec![0.0; step.basis.outcome_count()]
    };
    for (index, &p) in probs.iter().enumerate() {
        prefix.push(step.basis.outcome(index));
        if p > ZERO_PROBABILITY {
            let mut branch = state.clone();
            branch.project(&step.qubits, step.basis, index)?;
            enumerate(&branch, rest, weight * p, prefix, out)?;
        } else {
            // impossible branch: keep the outcome space complete with zeros
            enumerate(state, rest, 0.0, prefix, out)?;
        }
        prefix.pop();
    }
    Ok(())
}
