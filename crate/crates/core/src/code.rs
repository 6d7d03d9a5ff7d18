//! The five-qubit perfect code: generators, codewords, syndrome extraction,
//! lookup correction and decoding.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::qubit::{
    inner_product_raw, measure_qubit, CMatrix, Operator, Pauli, PauliString, PureState,
    StateVector, DEGENERATE_NORM,
};

pub const N_DATA: usize = 5;
pub const N_GENERATORS: usize = 4;

/// Generators in text form, highest qubit first:
/// `M0 = Z1 X2 X3 Z4`, `M1 = Z0 Z2 X3 X4`, `M2 = X0 Z1 Z3 X4`, `M3 = X0 X1 Z2 Z4`.
const GENERATOR_WORDS: [&str; N_GENERATORS] = ["ZXXZI", "XXZIZ", "XZIZX", "ZIZXX"];

/// Syndrome `m0 m1 m2 m3` to correction, in syndrome order 0000..1111.
const CORRECTION_TABLE: [(Pauli, usize); 16] = [
    (Pauli::I, 0),
    (Pauli::Z, 1),
    (Pauli::X, 3),
    (Pauli::Z, 0),
    (Pauli::X, 0),
    (Pauli::X, 2),
    (Pauli::Z, 4),
    (Pauli::Y, 0),
    (Pauli::Z, 2),
    (Pauli::X, 4),
    (Pauli::X, 1),
    (Pauli::Y, 1),
    (Pauli::Z, 3),
    (Pauli::Y, 2),
    (Pauli::Y, 3),
    (Pauli::Y, 4),
];

/// Outcome of measuring the four generators. Bit `i` set means the `-1`
/// eigenvalue of `M_i` was observed. Rendered `m0 m1 m2 m3`, leftmost `M_0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Syndrome(u8);

impl Syndrome {
    pub const TRIVIAL: Syndrome = Syndrome(0);

    pub fn from_bits(bits: [bool; N_GENERATORS]) -> Self {
        let mut s = Syndrome(0);
        for (i, b) in bits.into_iter().enumerate() {
            s.set(i, b);
        }
        s
    }

    /// `value` read as the binary number `m0 m1 m2 m3`.
    pub fn from_value(value: u8) -> Result<Self> {
        if value >= 16 {
            return Err(invalid(format!(
                "syndrome value {value} out of range 0..16"
            )));
        }
        Ok(Syndrome(value))
    }

    pub fn value(self) -> u8 {
        self.0
    }

    pub fn bit(self, generator: usize) -> bool {
        (self.0 >> (N_GENERATORS - 1 - generator)) & 1 == 1
    }

    fn set(&mut self, generator: usize, on: bool) {
        let mask = 1u8 << (N_GENERATORS - 1 - generator);
        if on {
            self.0 |= mask;
        } else {
            self.0 &= !mask;
        }
    }

    pub fn is_trivial(self) -> bool {
        self.0 == 0
    }

    pub fn all() -> impl Iterator<Item = Syndrome> {
        (0..16u8).map(Syndrome)
    }
}

impl fmt::Display for Syndrome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04b}", self.0)
    }
}

impl FromStr for Syndrome {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s.len() != 4 || !s.chars().all(|c| c == '0' || c == '1') {
            return Err(invalid(format!("syndrome must be four bits, got {s:?}")));
        }
        Ok(Syndrome(u8::from_str_radix(s, 2).expect("checked binary")))
    }
}

/// Syndrome-to-correction lookup.
#[derive(Debug, Clone, PartialEq)]
pub struct SyndromeTable {
    entries: Vec<PauliString>,
}

impl SyndromeTable {
    pub fn standard() -> Self {
        let entries = CORRECTION_TABLE
            .iter()
            .map(|&(p, q)| {
                if p == Pauli::I {
                    PauliString::identity(N_DATA)
                } else {
                    PauliString::single(N_DATA, q, p).expect("qubit < 5")
                }
            })
            .collect();
        Self { entries }
    }

    pub fn correction(&self, s: Syndrome) -> &PauliString {
        &self.entries[s.value() as usize]
    }

    /// Replaces one row; used to inject faults when testing the validator.
    pub fn with_entry(mut self, s: Syndrome, correction: PauliString) -> Result<Self> {
        if correction.n_qubits() != N_DATA {
            return Err(Error::DimensionMismatch {
                expected: N_DATA,
                actual: correction.n_qubits(),
            });
        }
        self.entries[s.value() as usize] = correction;
        Ok(self)
    }

    pub fn rows(&self) -> impl Iterator<Item = (Syndrome, &PauliString)> {
        Syndrome::all().zip(self.entries.iter())
    }
}

/// Human-readable correction name such as `X0`, `Y4` or `I`.
pub fn correction_label(p: &PauliString) -> String {
    let support = p.support();
    if support.is_empty() {
        return "I".to_string();
    }
    support
        .iter()
        .map(|(q, l)| format!("{}{}", l.as_char(), q))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Generators, codewords and projectors of the code. Built once.
#[derive(Debug)]
pub struct FiveQubitCode {
    generators: [PauliString; N_GENERATORS],
    zero: PureState,
    one: PureState,
    table: SyndromeTable,
}

impl FiveQubitCode {
    pub fn get() -> &'static FiveQubitCode {
        static CODE: OnceLock<FiveQubitCode> = OnceLock::new();
        CODE.get_or_init(FiveQubitCode::build)
    }

    fn build() -> Self {
        let generators = GENERATOR_WORDS.map(|w| w.parse::<PauliString>().expect("valid word"));
        let zero = project_onto_stabilizer(&generators, 0);
        let one = project_onto_stabilizer(&generators, (1 << N_DATA) - 1);
        Self {
            generators,
            zero,
            one,
            table: SyndromeTable::standard(),
        }
    }

    pub fn generators(&self) -> &[PauliString; N_GENERATORS] {
        &self.generators
    }

    pub fn generator_operator(&self, i: usize) -> Operator {
        self.generators[i].to_operator()
    }

    /// `(I - M_i) / 2` when `minus`, else `(I + M_i) / 2`.
    pub fn generator_projector(&self, i: usize, minus: bool) -> Operator {
        let m = self.generator_operator(i);
        let sign = if minus { -0.5 } else { 0.5 };
        Operator::identity(1 << N_DATA)
            .scale(Complex64::new(0.5, 0.0))
            .add(&m.scale(Complex64::new(sign, 0.0)))
            .expect("same dimension")
    }

    pub fn codewords(&self) -> (&PureState, &PureState) {
        (&self.zero, &self.one)
    }

    pub fn isometry(&self) -> EncodingIsometry {
        EncodingIsometry {
            zero: self.zero.clone(),
            one: self.one.clone(),
        }
    }

    pub fn table(&self) -> &SyndromeTable {
        &self.table
    }

    /// Syndrome that `error` produces on any codeword: bit `i` is set when
    /// `error` anticommutes with `M_i`.
    pub fn syndrome_of(&self, error: &PauliString) -> Syndrome {
        let mut bits = [false; N_GENERATORS];
        for (b, g) in bits.iter_mut().zip(&self.generators) {
            *b = !g.commutes_with(error);
        }
        Syndrome::from_bits(bits)
    }
}

fn project_onto_stabilizer(generators: &[PauliString; N_GENERATORS], basis: usize) -> PureState {
    let mut amps = PureState::basis(N_DATA, basis)
        .expect("in range")
        .into_amplitudes();
    // apply (I + M_3), then (I + M_2), ... then (I + M_0)
    for g in generators.iter().rev() {
        let moved = g.apply(&amps);
        for (a, m) in amps.iter_mut().zip(moved) {
            *a += m;
        }
    }
    let amps: Vec<Complex64> = amps.into_iter().map(|a| a / 4.0).collect();
    PureState::new(N_DATA, amps).expect("codeword has unit norm")
}

/// The 32x2 isometry with columns `|0L>` and `|1L>`.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodingIsometry {
    zero: PureState,
    one: PureState,
}

impl EncodingIsometry {
    pub fn columns(&self) -> [&PureState; 2] {
        [&self.zero, &self.one]
    }

    pub fn matrix(&self) -> CMatrix {
        let mut m = CMatrix::zeros(1 << N_DATA, 2);
        for (c, col) in self.columns().into_iter().enumerate() {
            for (r, a) in col.amplitudes().iter().enumerate() {
                m[(r, c)] = *a;
            }
        }
        m
    }

    /// `V V^dagger`.
    pub fn codespace_projector(&self) -> Operator {
        let v = self.matrix();
        Operator::new(&v * v.adjoint()).expect("32x32")
    }

    /// `(<0L|v>, <1L|v>)` for a raw 32-vector.
    pub fn logical_amplitudes(&self, amps: &[Complex64]) -> Result<[Complex64; 2]> {
        Ok([
            inner_product_raw(self.zero.amplitudes(), amps)?,
            inner_product_raw(self.one.amplitudes(), amps)?,
        ])
    }
}

/// The codewords `(1/4) prod_i (I + M_i) |00000>` and `... |11111>`.
pub fn build_codewords() -> EncodingIsometry {
    FiveQubitCode::get().isometry()
}

/// `alpha |0L> + beta |1L>`.
pub fn encode(logical: &PureState) -> Result<PureState> {
    if logical.n_qubits() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            actual: logical.n_qubits(),
        });
    }
    let code = FiveQubitCode::get();
    let (a, b) = (logical.amplitude(0), logical.amplitude(1));
    let amps = code
        .zero
        .amplitudes()
        .iter()
        .zip(code.one.amplitudes())
        .map(|(z, o)| a * z + b * o)
        .collect();
    PureState::from_unnormalized(N_DATA, amps)
}

/// Logical state from the codespace component, plus the weight outside the
/// codespace.
pub fn decode(state: &PureState) -> Result<(PureState, f64)> {
    if state.n_qubits() != N_DATA {
        return Err(Error::DimensionMismatch {
            expected: N_DATA,
            actual: state.n_qubits(),
        });
    }
    let [a, b] = FiveQubitCode::get()
        .isometry()
        .logical_amplitudes(state.amplitudes())?;
    let weight = a.norm_sqr() + b.norm_sqr();
    if weight < DEGENERATE_NORM {
        return Err(Error::DegenerateDecode { weight });
    }
    let leakage = (1.0 - weight).max(0.0);
    Ok((PureState::from_unnormalized(1, vec![a, b])?, leakage))
}

/// Projects `amps` onto the `sign` eigenspace of the Pauli word `m`:
/// returns `(I + sign*M)/2 |v>`.
fn pauli_eigenprojection(m: &PauliString, amps: &[Complex64], minus: bool) -> Vec<Complex64> {
    let moved = m.apply(amps);
    amps.iter()
        .zip(moved)
        .map(|(a, b)| if minus { (a - b) * 0.5 } else { (a + b) * 0.5 })
        .collect()
}

/// Sequential Born-rule measurement of `M_0..M_3` through the projectors
/// `(I -+ M_i)/2`.
pub fn measure_syndrome<R: Rng + ?Sized>(
    state: &PureState,
    rng: &mut R,
) -> Result<(Syndrome, PureState)> {
    if state.n_qubits() != N_DATA {
        return Err(Error::DimensionMismatch {
            expected: N_DATA,
            actual: state.n_qubits(),
        });
    }
    let code = FiveQubitCode::get();
    let mut amps = state.amplitudes().to_vec();
    let mut bits = [false; N_GENERATORS];
    for (i, g) in code.generators.iter().enumerate() {
        let minus = pauli_eigenprojection(g, &amps, true);
        let p1 = crate::qubit::norm_sqr(&minus).clamp(0.0, 1.0);
        let outcome = rng.random::<f64>() < p1;
        let (branch, prob) = if outcome {
            (minus, p1)
        } else {
            (pauli_eigenprojection(g, &amps, false), 1.0 - p1)
        };
        if prob < DEGENERATE_NORM {
            return Err(Error::DegenerateMeasurement { probability: prob });
        }
        bits[i] = outcome;
        amps = StateVector::new(N_DATA, branch)?
            .normalize()?
            .into_amplitudes();
    }
    Ok((Syndrome::from_bits(bits), PureState::new(N_DATA, amps)?))
}

/// Ancilla-based syndrome extraction on 9 qubits: for each generator,
/// Hadamard on its ancilla, ancilla-controlled `M_i`, Hadamard, then a
/// computational-basis measurement of the ancilla.
pub fn measure_syndrome_circuit<R: Rng + ?Sized>(
    state: &PureState,
    rng: &mut R,
) -> Result<(Syndrome, PureState)> {
    if state.n_qubits() != N_DATA {
        return Err(Error::DimensionMismatch {
            expected: N_DATA,
            actual: state.n_qubits(),
        });
    }
    let code = FiveQubitCode::get();
    let total = N_DATA + N_GENERATORS;
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << total];
    amps[..1 << N_DATA].copy_from_slice(state.amplitudes());
    let mut full = PureState::new(total, amps)?;
    let h = hadamard();
    let data_targets: Vec<usize> = (0..N_DATA).collect();
    let mut bits = [false; N_GENERATORS];
    for (i, g) in code.generators.iter().enumerate() {
        let ancilla = N_DATA + i;
        let controlled = controlled(&g.to_operator());
        let mut targets = data_targets.clone();
        targets.push(ancilla);
        full = full.apply_unitary(&h, &[ancilla])?;
        full = full.apply_unitary(&controlled, &targets)?;
        full = full.apply_unitary(&h, &[ancilla])?;
        let (bit, post, _) = measure_qubit(&full, ancilla, rng)?;
        bits[i] = bit;
        full = post;
    }
    let syndrome = Syndrome::from_bits(bits);
    // ancilla i holds bit i of the syndrome (ancilla 0 = M_0)
    let offset: usize = (0..N_GENERATORS)
        .filter(|&i| bits[i])
        .map(|i| 1usize << (N_DATA + i))
        .sum();
    let data = full.amplitudes()[offset..offset + (1 << N_DATA)].to_vec();
    Ok((syndrome, PureState::from_unnormalized(N_DATA, data)?))
}

fn hadamard() -> Operator {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Operator::from_rows(
        2,
        &[
            Complex64::new(s, 0.0),
            Complex64::new(s, 0.0),
            Complex64::new(s, 0.0),
            Complex64::new(-s, 0.0),
        ],
    )
    .expect("2x2")
}

/// `|0><0| (x) I + |1><1| (x) U` with the control as the high-order factor.
fn controlled(u: &Operator) -> Operator {
    let d = u.dim();
    let mut m = CMatrix::identity(2 * d, 2 * d);
    m.view_mut((d, d), (d, d)).copy_from(u.matrix());
    Operator::new(m).expect("power of two")
}

/// Correction the standard lookup table assigns to `s`.
pub fn lookup_correction(s: Syndrome) -> PauliString {
    FiveQubitCode::get().table.correction(s).clone()
}

/// Applies the lookup correction for `s`.
pub fn correct(state: &PureState, s: Syndrome) -> Result<PureState> {
    correct_with(state, s, FiveQubitCode::get().table())
}

pub fn correct_with(state: &PureState, s: Syndrome, table: &SyndromeTable) -> Result<PureState> {
    if state.n_qubits() != N_DATA {
        return Err(Error::DimensionMismatch {
            expected: N_DATA,
            actual: state.n_qubits(),
        });
    }
    let fix = table.correction(s);
    if fix.is_identity() {
        return Ok(state.clone());
    }
    PureState::new(N_DATA, fix.apply(state.amplitudes()))
}

/// Applies a Pauli word (an error or a correction) to a 5-qubit state.
pub fn apply_pauli(state: &PureState, p: &PauliString) -> Result<PureState> {
    if p.n_qubits() != state.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: state.n_qubits(),
            actual: p.n_qubits(),
        });
    }
    PureState::new(state.n_qubits(), p.apply(state.amplitudes()))
}

/// Every single-qubit Pauli error on the data block (15 words).
pub fn single_qubit_errors() -> Vec<PauliString> {
    (0..N_DATA)
        .flat_map(|q| {
            Pauli::NON_IDENTITY
                .into_iter()
                .map(move |p| PauliString::single(N_DATA, q, p).expect("q < 5"))
        })
        .collect()
}
