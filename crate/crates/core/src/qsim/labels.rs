//! Two-bit labels for Bell states and Pauli operators.
//!
//! Both use a (phase bit, parity bit) encoding so that acting with a Pauli on
//! one half of a Bell pair, and combining Bell outcomes under entanglement
//! swapping, reduce to XOR on the labels.

use std::fmt;
use std::ops::BitXor;

use num_complex::Complex64;

use super::FRAC_1_SQRT_2;

/// One of the four Bell states.
///
/// `Φ± = (|00⟩ ± |11⟩)/√2`, `Ψ± = (|01⟩ ± |10⟩)/√2`. Variant order is the
/// canonical order used everywhere (index = `phase << 1 | parity`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BellLabel {
    PhiPlus,
    PsiPlus,
    PhiMinus,
    PsiMinus,
}

impl BellLabel {
    pub const ALL: [BellLabel; 4] = [
        BellLabel::PhiPlus,
        BellLabel::PsiPlus,
        BellLabel::PhiMinus,
        BellLabel::PsiMinus,
    ];

    pub fn from_bits(phase: u8, parity: u8) -> Self {
        Self::from_index(usize::from(((phase & 1) << 1) | (parity & 1)))
    }

    /// Panics if `index > 3`.
    pub fn from_index(index: usize) -> Self {
        Self::ALL[index]
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn phase_bit(self) -> u8 {
        (self.index() >> 1) as u8
    }

    pub fn parity_bit(self) -> u8 {
        (self.index() & 1) as u8
    }

    /// Amplitudes over `|00⟩, |01⟩, |10⟩, |11⟩` (first qubit most significant).
    pub fn amplitudes(self) -> [Complex64; 4] {
        let mut out = [Complex64::new(0.0, 0.0); 4];
        let parity = usize::from(self.parity_bit());
        let sign = if self.phase_bit() == 0 { 1.0 } else { -1.0 };
        // |0, parity⟩ + (-1)^phase |1, 1-parity⟩
        out[parity] = Complex64::new(FRAC_1_SQRT_2, 0.0);
        out[0b10 | (parity ^ 1)] = Complex64::new(sign * FRAC_1_SQRT_2, 0.0);
        out
    }

    /// The Pauli label `p` such that `self ^ p == other`.
    pub fn pauli_to(self, other: BellLabel) -> PauliLabel {
        PauliLabel::from_index(self.index() ^ other.index())
    }

    pub fn name(self) -> &'static str {
        match self {
            BellLabel::PhiPlus => "Phi+",
            BellLabel::PsiPlus => "Psi+",
            BellLabel::PhiMinus => "Phi-",
            BellLabel::PsiMinus => "Psi-",
        }
    }
}

impl fmt::Display for BellLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl BitXor for BellLabel {
    type Output = BellLabel;

    fn bitxor(self, rhs: BellLabel) -> BellLabel {
        BellLabel::from_index(self.index() ^ rhs.index())
    }
}

impl BitXor<PauliLabel> for BellLabel {
    type Output = BellLabel;

    fn bitxor(self, rhs: PauliLabel) -> BellLabel {
        BellLabel::from_index(self.index() ^ rhs.index())
    }
}

/// Single-qubit Pauli operator `I`, `X`, `Z` or `iY = Z·X`.
///
/// All four are real matrices; `iY` sends `|0⟩ → −|1⟩` and `|1⟩ → |0⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PauliLabel {
    I,
    X,
    Z,
    IY,
}

impl PauliLabel {
    pub const ALL: [PauliLabel; 4] = [PauliLabel::I, PauliLabel::X, PauliLabel::Z, PauliLabel::IY];

    pub fn from_bits(phase: u8, parity: u8) -> Self {
        Self::from_index(usize::from(((phase & 1) << 1) | (parity & 1)))
    }

    /// Panics if `index > 3`.
    pub fn from_index(index: usize) -> Self {
        Self::ALL[index]
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn phase_bit(self) -> u8 {
        (self.index() >> 1) as u8
    }

    pub fn parity_bit(self) -> u8 {
        (self.index() & 1) as u8
    }

    /// Row-major real matrix.
    pub fn matrix(self) -> [[f64; 2]; 2] {
        match self {
            PauliLabel::I => [[1.0, 0.0], [0.0, 1.0]],
            PauliLabel::X => [[0.0, 1.0], [1.0, 0.0]],
            PauliLabel::Z => [[1.0, 0.0], [0.0, -1.0]],
            PauliLabel::IY => [[0.0, 1.0], [-1.0, 0.0]],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PauliLabel::I => "I",
            PauliLabel::X => "X",
            PauliLabel::Z => "Z",
            PauliLabel::IY => "iY",
        }
    }
}

impl fmt::Display for PauliLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl BitXor for PauliLabel {
    type Output = PauliLabel;

    fn bitxor(self, rhs: PauliLabel) -> PauliLabel {
        PauliLabel::from_index(self.index() ^ rhs.index())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bit_encodings() {
        assert_eq!(BellLabel::from_bits(0, 0), BellLabel::PhiPlus);
        assert_eq!(BellLabel::from_bits(0, 1), BellLabel::PsiPlus);
        assert_eq!(BellLabel::from_bits(1, 0), BellLabel::PhiMinus);
        assert_eq!(BellLabel::from_bits(1, 1), BellLabel::PsiMinus);
        assert_eq!(PauliLabel::from_bits(0, 1), PauliLabel::X);
        assert_eq!(PauliLabel::from_bits(1, 0), PauliLabel::Z);
        assert_eq!(PauliLabel::from_bits(1, 1), PauliLabel::IY);
    }

    #[test]
    fn iy_is_z_times_x() {
        let z = PauliLabel::Z.matrix();
        let x = PauliLabel::X.matrix();
        let mut zx = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                zx[i][j] = (0..2).map(|k| z[i][k] * x[k][j]).sum();
            }
        }
        assert_eq!(zx, PauliLabel::IY.matrix());
    }

    #[test]
    fn xor_closure_and_pauli_to() {
        for m in BellLabel::ALL {
            for n in BellLabel::ALL {
                let p = m.pauli_to(n);
                assert_eq!(m ^ p, n);
                assert!(BellLabel::ALL.contains(&(m ^ n)));
            }
        }
    }

    #[test]
    fn bell_amplitudes_are_normalized() {
        for m in BellLabel::ALL {
            let norm: f64 = m.amplitudes().iter().map(|a| a.norm_sqr()).sum();
            assert!((norm - 1.0).abs() < 1e-15);
        }
        let psi_minus = BellLabel::PsiMinus.amplitudes();
        assert!(psi_minus[1].re > 0.0 && psi_minus[2].re < 0.0);
    }
}
