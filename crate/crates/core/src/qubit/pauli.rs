//! Pauli letters and phased Pauli words.

use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use num_complex::Complex64;

use super::operator::{pauli_matrix, Operator};
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    pub const NON_IDENTITY: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    /// Index in the sigma_0..sigma_3 ordering (I, X, Y, Z).
    pub fn index(self) -> usize {
        match self {
            Pauli::I => 0,
            Pauli::X => 1,
            Pauli::Y => 2,
            Pauli::Z => 3,
        }
    }

    pub fn from_index(index: usize) -> Result<Self> {
        Self::ALL
            .get(index)
            .copied()
            .ok_or_else(|| invalid(format!("Pauli index {index} out of range 0..3")))
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn matrix(self) -> Operator {
        pauli_matrix(self.index()).expect("index in range")
    }

    /// Single-letter product `self * rhs = i^k * letter`, returned as `(letter, k)`.
    pub fn product(self, rhs: Pauli) -> (Pauli, u8) {
        use Pauli::*;
        match (self, rhs) {
            (I, p) | (p, I) => (p, 0),
            (a, b) if a == b => (I, 0),
            (X, Y) => (Z, 1),
            (Y, Z) => (X, 1),
            (Z, X) => (Y, 1),
            (Y, X) => (Z, 3),
            (Z, Y) => (X, 3),
            (X, Z) => (Y, 3),
            _ => unreachable!(),
        }
    }

    pub fn commutes_with(self, rhs: Pauli) -> bool {
        self == Pauli::I || rhs == Pauli::I || self == rhs
    }
}

/// Global phase `i^k` of a Pauli word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Phase(u8);

impl Phase {
    pub const PLUS_ONE: Phase = Phase(0);
    pub const PLUS_I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_power(k: u8) -> Self {
        Phase(k % 4)
    }

    pub fn power(self) -> u8 {
        self.0
    }

    pub fn to_complex(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }
}

impl Mul for Phase {
    type Output = Phase;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: Phase) -> Phase {
        Phase::from_power(self.0 + rhs.0)
    }
}

/// An n-qubit Pauli word with a phase in {+1, -1, +i, -i}.
///
/// `letters[q]` acts on qubit `q` (qubit 0 is the least significant bit of
/// a basis index). The text form writes the highest qubit first, so `"XI"`
/// is X on qubit 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    letters: Vec<Pauli>,
    phase: Phase,
}

impl PauliString {
    pub fn new(letters: Vec<Pauli>, phase: Phase) -> Self {
        Self { letters, phase }
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self::new(vec![Pauli::I; n_qubits], Phase::PLUS_ONE)
    }

    /// A single letter on `qubit`, identity elsewhere.
    pub fn single(n_qubits: usize, qubit: usize, letter: Pauli) -> Result<Self> {
        Self::from_sparse(n_qubits, &[(qubit, letter)])
    }

    pub fn from_sparse(n_qubits: usize, terms: &[(usize, Pauli)]) -> Result<Self> {
        let mut letters = vec![Pauli::I; n_qubits];
        for &(q, p) in terms {
            if q >= n_qubits {
                return Err(invalid(format!(
                    "qubit {q} out of range for {n_qubits} qubits"
                )));
            }
            if letters[q] != Pauli::I {
                return Err(invalid(format!("qubit {q} listed twice")));
            }
            letters[q] = p;
        }
        Ok(Self::new(letters, Phase::PLUS_ONE))
    }

    pub fn n_qubits(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn letter(&self, qubit: usize) -> Pauli {
        self.letters[qubit]
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn with_phase(mut self, phase: Phase) -> Self {
        self.phase = phase;
        self
    }

    pub fn weight(&self) -> usize {
        self.letters.iter().filter(|&&p| p != Pauli::I).count()
    }

    pub fn is_identity(&self) -> bool {
        self.weight() == 0
    }

    /// Support as `(qubit, letter)` pairs in ascending qubit order.
    pub fn support(&self) -> Vec<(usize, Pauli)> {
        self.letters
            .iter()
            .enumerate()
            .filter(|(_, &p)| p != Pauli::I)
            .map(|(q, &p)| (q, p))
            .collect()
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        assert_eq!(self.n_qubits(), other.n_qubits());
        let anti = self
            .letters
            .iter()
            .zip(&other.letters)
            .filter(|(a, b)| !a.commutes_with(**b))
            .count();
        anti % 2 == 0
    }

    pub fn checked_mul(&self, rhs: &PauliString) -> Result<PauliString> {
        if self.n_qubits() != rhs.n_qubits() {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits(),
                actual: rhs.n_qubits(),
            });
        }
        let mut power = self.phase.power() + rhs.phase.power();
        let letters = self
            .letters
            .iter()
            .zip(&rhs.letters)
            .map(|(&a, &b)| {
                let (p, k) = a.product(b);
                power += k;
                p
            })
            .collect();
        Ok(PauliString::new(letters, Phase::from_power(power)))
    }

    /// Dense `phase * sigma_{n-1} (x) ... (x) sigma_0`.
    pub fn to_operator(&self) -> Operator {
        let dim = 1usize << self.n_qubits();
        let mut m = nalgebra::DMatrix::<Complex64>::zeros(dim, dim);
        let phase = self.phase.to_complex();
        for col in 0..dim {
            let (row, amp) = self.apply_to_basis(col);
            m[(row, col)] = phase * amp;
        }
        Operator::from_matrix_unchecked(m)
    }

    /// Image of basis state `|col>` under the letters (phase excluded):
    /// returns `(row, amplitude)`.
    pub(crate) fn apply_to_basis(&self, col: usize) -> (usize, Complex64) {
        let mut row = col;
        let mut amp = Complex64::new(1.0, 0.0);
        for (q, &p) in self.letters.iter().enumerate() {
            let bit = (col >> q) & 1;
            match p {
                Pauli::I => {}
                Pauli::X => row ^= 1 << q,
                Pauli::Y => {
                    row ^= 1 << q;
                    // Y|0> = i|1>, Y|1> = -i|0>
                    amp *= if bit == 0 {
                        Complex64::new(0.0, 1.0)
                    } else {
                        Complex64::new(0.0, -1.0)
                    };
                }
                Pauli::Z => {
                    if bit == 1 {
                        amp = -amp;
                    }
                }
            }
        }
        (row, amp)
    }

    /// Applies the word (with phase) to an amplitude vector.
    pub fn apply(&self, amps: &[Complex64]) -> Vec<Complex64> {
        let phase = self.phase.to_complex();
        let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
        for (col, &a) in amps.iter().enumerate() {
            let (row, amp) = self.apply_to_basis(col);
            out[row] = phase * amp * a;
        }
        out
    }
}

impl Mul for &PauliString {
    type Output = PauliString;
    fn mul(self, rhs: &PauliString) -> PauliString {
        self.checked_mul(rhs).expect("Pauli words of equal length")
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.phase.power() {
            0 => "",
            1 => "i",
            2 => "-",
            _ => "-i",
        };
        f.write_str(prefix)?;
        for p in self.letters.iter().rev() {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (phase, body) = if let Some(rest) = s.strip_prefix("-i") {
            (Phase::MINUS_I, rest)
        } else if let Some(rest) = s.strip_prefix("+i") {
            (Phase::PLUS_I, rest)
        } else if let Some(rest) = s.strip_prefix('i') {
            (Phase::PLUS_I, rest)
        } else if let Some(rest) = s.strip_prefix('-') {
            (Phase::MINUS_ONE, rest)
        } else if let Some(rest) = s.strip_prefix('+') {
            (Phase::PLUS_ONE, rest)
        } else {
            (Phase::PLUS_ONE, s)
        };
        let letters = body
            .chars()
            .rev()
            .map(|c| match c {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(invalid(format!("bad Pauli letter {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        if letters.is_empty() {
            return Err(invalid("empty Pauli word"));
        }
        Ok(PauliString::new(letters, phase))
    }
}
