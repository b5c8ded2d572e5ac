use num_complex::Complex64;

use super::{PauliLabel, QsimError, FRAC_1_SQRT_2, MAX_QUBITS, ZERO_PROBABILITY};

/// Single-qubit preparation tags accepted by [`init_product`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QubitPrep {
    Zero,
    One,
    Plus,
    Minus,
}

impl QubitPrep {
    fn amplitudes(self) -> [Complex64; 2] {
        let r = |x: f64| Complex64::new(x, 0.0);
        match self {
            QubitPrep::Zero => [r(1.0), r(0.0)],
            QubitPrep::One => [r(0.0), r(1.0)],
            QubitPrep::Plus => [r(FRAC_1_SQRT_2), r(FRAC_1_SQRT_2)],
            QubitPrep::Minus => [r(FRAC_1_SQRT_2), r(-FRAC_1_SQRT_2)],
        }
    }
}

/// Pure state of `n` qubits as `2^n` complex amplitudes.
///
/// Index bit `n - 1 - q` holds qubit `q`, so qubit 0 is the most significant
/// character of the basis string.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

/// Tensor product of the listed single-qubit states, qubit 0 first.
pub fn init_product(specs: &[QubitPrep]) -> Result<StateVector, QsimError> {
    let (first, rest) = specs.split_first().ok_or(QsimError::EmptySpec)?;
    if specs.len() > MAX_QUBITS {
        return Err(QsimError::TooManyQubits(specs.len()));
    }
    let mut state = StateVector {
        n_qubits: 1,
        amps: first.amplitudes().to_vec(),
    };
    for spec in rest {
        let single = StateVector {
            n_qubits: 1,
            amps: spec.amplitudes().to_vec(),
        };
        state = state.tensor(&single)?;
    }
    Ok(state)
}

impl StateVector {
    /// `|0…0⟩` on `n_qubits` qubits.
    pub fn zeros(n_qubits: usize) -> Result<Self, QsimError> {
        if n_qubits == 0 {
            return Err(QsimError::EmptySpec);
        }
        if n_qubits > MAX_QUBITS {
            return Err(QsimError::TooManyQubits(n_qubits));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    /// Wraps raw amplitudes. They must be finite, of power-of-two length and
    /// normalized within `1e-10`; no renormalization is done here.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self, QsimError> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(QsimError::BadLength(len));
        }
        let n_qubits = len.trailing_zeros() as usize;
        if n_qubits > MAX_QUBITS {
            return Err(QsimError::TooManyQubits(n_qubits));
        }
        if let Some(i) = amps.iter().position(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(QsimError::NonFinite(i));
        }
        let state = Self { n_qubits, amps };
        let dev = state.norm_deviation();
        if dev > 1e-10 {
            return Err(QsimError::NotNormalized(dev));
        }
        Ok(state)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `|‖ψ‖² − 1|`.
    pub fn norm_deviation(&self) -> f64 {
        (self.norm_sqr() - 1.0).abs()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64, QsimError> {
        if self.n_qubits != other.n_qubits {
            return Err(QsimError::QubitCountMismatch(self.n_qubits, other.n_qubits));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// True when the states agree up to a global phase, i.e. `|⟨self|other⟩| ≥ 1 − tol`.
    pub fn same_ray(&self, other: &StateVector, tol: f64) -> bool {
        match self.inner(other) {
            Ok(overlap) => (overlap.norm() - 1.0).abs() <= tol,
            Err(_) => false,
        }
    }

    /// Largest per-amplitude difference; used where states must be literally identical.
    pub fn max_abs_diff(&self, other: &StateVector) -> Option<f64> {
        if self.n_qubits != other.n_qubits {
            return None;
        }
        Some(
            self.amps
                .iter()
                .zip(&other.amps)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max),
        )
    }

    /// `self ⊗ other`; the qubits of `other` follow those of `self`.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector, QsimError> {
        let n_qubits = self.n_qubits + other.n_qubits;
        if n_qubits > MAX_QUBITS {
            return Err(QsimError::TooManyQubits(n_qubits));
        }
        let mut amps = Vec::with_capacity(1 << n_qubits);
        for a in &self.amps {
            amps.extend(other.amps.iter().map(|b| a * b));
        }
        Ok(StateVector { n_qubits, amps })
    }

    pub(crate) fn mask(&self, qubit: usize) -> usize {
        1 << (self.n_qubits - 1 - qubit)
    }

    pub(crate) fn check_qubit(&self, qubit: usize) -> Result<(), QsimError> {
        if qubit >= self.n_qubits {
            return Err(QsimError::QubitOutOfRange {
                qubit,
                n_qubits: self.n_qubits,
            });
        }
        Ok(())
    }

    pub(crate) fn check_pair(&self, q1: usize, q2: usize) -> Result<(), QsimError> {
        self.check_qubit(q1)?;
        self.check_qubit(q2)?;
        if q1 == q2 {
            return Err(QsimError::DuplicateQubit(q1));
        }
        Ok(())
    }

    pub(crate) fn amps_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    /// Applies a real 2×2 matrix to `qubit`.
    fn apply_real_1q(&mut self, qubit: usize, m: [[f64; 2]; 2]) -> Result<(), QsimError> {
        self.check_qubit(qubit)?;
        let mask = self.mask(qubit);
        for i in 0..self.amps.len() {
            if i & mask == 0 {
                let a0 = self.amps[i];
                let a1 = self.amps[i | mask];
                self.amps[i] = a0 * m[0][0] + a1 * m[0][1];
                self.amps[i | mask] = a0 * m[1][0] + a1 * m[1][1];
            }
        }
        Ok(())
    }

    pub fn apply_pauli(&mut self, qubit: usize, pauli: PauliLabel) -> Result<(), QsimError> {
        if pauli == PauliLabel::I {
            return self.check_qubit(qubit);
        }
        self.apply_real_1q(qubit, pauli.matrix())
    }

    pub fn apply_hadamard(&mut self, qubit: usize) -> Result<(), QsimError> {
        let h = FRAC_1_SQRT_2;
        self.apply_real_1q(qubit, [[h, h], [h, -h]])
    }

    pub fn apply_cnot(&mut self, control: usize, target: usize) -> Result<(), QsimError> {
        self.check_pair(control, target)?;
        let cm = self.mask(control);
        let tm = self.mask(target);
        for i in 0..self.amps.len() {
            if i & cm != 0 && i & tm == 0 {
                self.amps.swap(i, i | tm);
            }
        }
        Ok(())
    }

    /// Probability that a Z measurement of `qubit` yields 1.
    pub fn probability_one(&self, qubit: usize) -> Result<f64, QsimError> {
        self.check_qubit(qubit)?;
        let mask = self.mask(qubit);
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Turns three `|0⟩` qubits into the GHZ-like state
    /// `(|001⟩ + |010⟩ + |100⟩ + |111⟩)/2 = (|0⟩|Ψ+⟩ + |1⟩|Φ+⟩)/√2` on `(c, a, b)`.
    pub fn prepare_ghz_like(&mut self, c: usize, a: usize, b: usize) -> Result<(), QsimError> {
        self.check_pair(c, a)?;
        self.check_pair(c, b)?;
        self.check_pair(a, b)?;
        for q in [c, a, b] {
            // P(q = 1) = 0 means q is |0⟩ and unentangled with the rest.
            if self.probability_one(q)? > ZERO_PROBABILITY {
                return Err(QsimError::NotZero(q));
            }
        }
        self.apply_hadamard(c)?;
        self.apply_hadamard(a)?;
        self.apply_cnot(a, b)?;
        self.apply_pauli(b, PauliLabel::X)?;
        self.apply_cnot(c, b)
    }
}
