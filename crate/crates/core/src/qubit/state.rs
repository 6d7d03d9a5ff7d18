//! Pure states, qubit-local operator application and projective measurement.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::operator::Operator;
use crate::error::{invalid, Error, Result};

/// Squared-norm tolerance for a normalized state.
pub const NORM_TOL: f64 = 1e-9;
/// Below this norm a vector cannot be normalized.
pub const DEGENERATE_NORM: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

pub(crate) fn norm_sqr(amps: &[Complex64]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum()
}

/// Unnormalized amplitude vector over `2^n_qubits` basis states.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn new(n_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != 1usize << n_qubits {
            return Err(Error::DimensionMismatch {
                expected: 1 << n_qubits,
                actual: amps.len(),
            });
        }
        Ok(Self { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amps)
    }

    pub fn normalize(self) -> Result<PureState> {
        let norm = self.norm_sqr().sqrt();
        if norm < DEGENERATE_NORM {
            return Err(invalid(format!("cannot normalize vector of norm {norm:e}")));
        }
        let amps = self.amps.into_iter().map(|a| a / norm).collect();
        Ok(PureState {
            n_qubits: self.n_qubits,
            amps,
        })
    }

    pub fn apply_to_qubits(&self, op: &Operator, targets: &[usize]) -> Result<StateVector> {
        let amps = apply_kernel(op, &self.amps, self.n_qubits, targets)?;
        Ok(StateVector {
            n_qubits: self.n_qubits,
            amps,
        })
    }
}

impl From<PureState> for StateVector {
    fn from(s: PureState) -> Self {
        StateVector {
            n_qubits: s.n_qubits,
            amps: s.amps,
        }
    }
}

/// A normalized pure state on `n_qubits` qubits, little-endian basis order.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl PureState {
    /// Wraps amplitudes that are already normalized (within [`NORM_TOL`]).
    pub fn new(n_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        let v = StateVector::new(n_qubits, amps)?;
        let n2 = v.norm_sqr();
        if (n2 - 1.0).abs() > NORM_TOL {
            return Err(invalid(format!("state has squared norm {n2}, expected 1")));
        }
        Ok(Self {
            n_qubits,
            amps: v.amps,
        })
    }

    /// Normalizes arbitrary (nonzero) amplitudes.
    pub fn from_unnormalized(n_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        StateVector::new(n_qubits, amps)?.normalize()
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(invalid(format!(
                "basis index {index} out of range for {n_qubits} qubits"
            )));
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amps)
    }

    /// Applies `op` to `targets` without renormalizing.
    pub fn apply_to_qubits(&self, op: &Operator, targets: &[usize]) -> Result<StateVector> {
        apply_to_qubits(op, self, targets)
    }

    /// Applies a unitary on `targets`; the norm is preserved so the result
    /// stays a `PureState`.
    pub fn apply_unitary(&self, op: &Operator, targets: &[usize]) -> Result<PureState> {
        let v = apply_to_qubits(op, self, targets)?;
        let n2 = v.norm_sqr();
        if (n2 - 1.0).abs() > NORM_TOL {
            return Err(invalid(format!(
                "operator is not unitary on this state (norm^2 {n2})"
            )));
        }
        Ok(PureState {
            n_qubits: self.n_qubits,
            amps: v.amps,
        })
    }

    /// Applies a full-width operator (dim = 2^n_qubits), no renormalization.
    pub fn apply_full(&self, op: &Operator) -> Result<StateVector> {
        StateVector::new(self.n_qubits, op.apply(&self.amps)?)
    }

    pub fn scaled(&self, c: Complex64) -> StateVector {
        StateVector {
            n_qubits: self.n_qubits,
            amps: self.amps.iter().map(|a| a * c).collect(),
        }
    }
}

/// `op` acts on `targets` (targets[j] is bit j of the operator's index),
/// identity elsewhere.
pub fn apply_to_qubits(op: &Operator, state: &PureState, targets: &[usize]) -> Result<StateVector> {
    let amps = apply_kernel(op, &state.amps, state.n_qubits, targets)?;
    Ok(StateVector {
        n_qubits: state.n_qubits,
        amps,
    })
}

pub(crate) fn apply_kernel(
    op: &Operator,
    amps: &[Complex64],
    n_qubits: usize,
    targets: &[usize],
) -> Result<Vec<Complex64>> {
    let k = targets.len();
    if op.dim() != 1usize << k {
        return Err(Error::DimensionMismatch {
            expected: 1 << k,
            actual: op.dim(),
        });
    }
    let mut mask = 0usize;
    for &t in targets {
        if t >= n_qubits {
            return Err(invalid(format!(
                "target qubit {t} out of range for {n_qubits} qubits"
            )));
        }
        if mask & (1 << t) != 0 {
            return Err(invalid(format!("duplicate target qubit {t}")));
        }
        mask |= 1 << t;
    }
    let sub = 1usize << k;
    // offsets[j] = basis offset contributed by operator index j
    let offsets: Vec<usize> = (0..sub)
        .map(|j| {
            targets
                .iter()
                .enumerate()
                .filter(|(bit, _)| (j >> bit) & 1 == 1)
                .map(|(_, &t)| 1usize << t)
                .sum()
        })
        .collect();
    let m = op.matrix();
    let mut out = vec![ZERO; amps.len()];
    let mut gathered = vec![ZERO; sub];
    for base in (0..amps.len()).filter(|b| b & mask == 0) {
        for (g, off) in gathered.iter_mut().zip(&offsets) {
            *g = amps[base + off];
        }
        for (r, off) in offsets.iter().enumerate() {
            out[base + off] = (0..sub).map(|c| m[(r, c)] * gathered[c]).sum();
        }
    }
    Ok(out)
}

/// `<a|b>`, conjugate-linear in `a`.
pub fn inner_product(a: &PureState, b: &PureState) -> Result<Complex64> {
    inner_product_raw(&a.amps, &b.amps)
}

pub(crate) fn inner_product_raw(a: &[Complex64], b: &[Complex64]) -> Result<Complex64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    Ok(a.iter().zip(b).map(|(x, y)| x.conj() * y).sum())
}

/// Haar-random pure state from a normalized vector of i.i.d. standard
/// complex Gaussians.
pub fn haar_random_state<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Result<PureState> {
    if n_qubits == 0 {
        return Err(invalid("haar_random_state needs at least one qubit"));
    }
    loop {
        let amps: Vec<Complex64> = (0..1usize << n_qubits)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        if norm_sqr(&amps) > DEGENERATE_NORM {
            return StateVector::new(n_qubits, amps)?.normalize();
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    pub outcome: bool,
    pub post_state: PureState,
    /// Probability of the realized outcome.
    pub probability: f64,
}

/// Born-rule measurement of the two-outcome projective measurement {P, I - P}.
/// `outcome == true` means the state was projected by `P`.
pub fn measure_projector<R: Rng + ?Sized>(
    state: &PureState,
    projector: &Operator,
    rng: &mut R,
) -> Result<Measurement> {
    if projector.dim() != state.dim() {
        return Err(Error::DimensionMismatch {
            expected: state.dim(),
            actual: projector.dim(),
        });
    }
    if !projector.is_projector(1e-10) {
        return Err(invalid(
            "measurement operator is not an orthogonal projector",
        ));
    }
    let projected = projector.apply(&state.amps)?;
    let p1 = inner_product_raw(&state.amps, &projected)?
        .re
        .clamp(0.0, 1.0);
    let outcome = rng.random::<f64>() < p1;
    let (branch, probability) = if outcome {
        (projected, p1)
    } else {
        let rest = state
            .amps
            .iter()
            .zip(&projected)
            .map(|(a, p)| a - p)
            .collect();
        (rest, 1.0 - p1)
    };
    if probability < DEGENERATE_NORM {
        return Err(Error::DegenerateMeasurement { probability });
    }
    let post_state = StateVector::new(state.n_qubits, branch)?.normalize()?;
    Ok(Measurement {
        outcome,
        post_state,
        probability,
    })
}

/// Computational-basis measurement of `qubit`. Returns the observed bit, the
/// collapsed state and the probability of that bit.
pub fn measure_qubit<R: Rng + ?Sized>(
    state: &PureState,
    qubit: usize,
    rng: &mut R,
) -> Result<(bool, PureState, f64)> {
    if qubit >= state.n_qubits {
        return Err(invalid(format!(
            "qubit {qubit} out of range for {} qubits",
            state.n_qubits
        )));
    }
    let bit = 1usize << qubit;
    let p1: f64 = state
        .amps
        .iter()
        .enumerate()
        .filter(|(i, _)| i & bit != 0)
        .map(|(_, a)| a.norm_sqr())
        .sum::<f64>()
        .clamp(0.0, 1.0);
    let outcome = rng.random::<f64>() < p1;
    let probability = if outcome { p1 } else { 1.0 - p1 };
    if probability < DEGENERATE_NORM {
        return Err(Error::DegenerateMeasurement { probability });
    }
    let amps = state
        .amps
        .iter()
        .enumerate()
        .map(|(i, &a)| if (i & bit != 0) == outcome { a } else { ZERO })
        .collect();
    let post = StateVector::new(state.n_qubits, amps)?.normalize()?;
    Ok((outcome, post, probability))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubit::{pauli_matrix, PauliString};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn x_on_qubit_zero_flips_low_bit() {
        let s = PureState::basis(5, 0).unwrap();
        let out = s.apply_unitary(&pauli_matrix(1).unwrap(), &[0]).unwrap();
        assert_eq!(out, PureState::basis(5, 1).unwrap());
    }

    #[test]
    fn little_endian_bit_k() {
        let x = pauli_matrix(1).unwrap();
        for k in 0..5 {
            let out = PureState::basis(5, 0)
                .unwrap()
                .apply_unitary(&x, &[k])
                .unwrap();
            assert_eq!(out, PureState::basis(5, 1 << k).unwrap());
        }
    }

    #[test]
    fn xi_acts_on_qubit_one() {
        // |01> (index 1) -> |11> (index 3)
        let p: PauliString = "XI".parse().unwrap();
        let out = p
            .to_operator()
            .apply(PureState::basis(2, 1).unwrap().amplitudes())
            .unwrap();
        assert_eq!(out[3], c(1.0, 0.0));
        assert_eq!(out.iter().filter(|a| a.norm() > 0.0).count(), 1);
    }

    #[test]
    fn identity_op_is_noop() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = haar_random_state(4, &mut rng).unwrap();
        let out = s.apply_to_qubits(&Operator::identity(4), &[3, 1]).unwrap();
        assert_eq!(out.amplitudes(), s.amplitudes());
    }

    #[test]
    fn apply_errors() {
        let s = PureState::basis(3, 0).unwrap();
        let x = pauli_matrix(1).unwrap();
        assert!(matches!(
            s.apply_to_qubits(&x, &[0, 1]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(s.apply_to_qubits(&Operator::identity(4), &[1, 1]).is_err());
        assert!(s.apply_to_qubits(&x, &[3]).is_err());
    }

    #[test]
    fn inner_products() {
        let a = PureState::basis(2, 0).unwrap();
        let b = PureState::basis(2, 3).unwrap();
        assert_eq!(inner_product(&a, &b).unwrap(), c(0.0, 0.0));
        assert!(inner_product(&a, &PureState::basis(1, 0).unwrap()).is_err());
    }

    #[test]
    fn state_constructors_validate() {
        assert!(PureState::new(1, vec![c(1.0, 0.0), c(1.0, 0.0)]).is_err());
        assert!(PureState::new(1, vec![c(1.0, 0.0)]).is_err());
        assert!(PureState::from_unnormalized(1, vec![c(0.0, 0.0); 2]).is_err());
        let s = PureState::from_unnormalized(1, vec![c(3.0, 0.0), c(0.0, 4.0)]).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-15);
        assert!(haar_random_state(0, &mut ChaCha8Rng::seed_from_u64(0)).is_err());
    }

    #[test]
    fn measurement_in_range_is_certain() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let zero = PureState::basis(1, 0).unwrap();
        let p0 =
            Operator::from_rows(2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        let m = measure_projector(&zero, &p0, &mut rng).unwrap();
        assert!(m.outcome);
        assert_eq!(m.probability, 1.0);
        assert_eq!(m.post_state, zero);

        let plus = PureState::from_unnormalized(1, vec![c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        let m = measure_projector(&plus, &p0, &mut rng).unwrap();
        assert!((m.probability - 0.5).abs() < 1e-12);
        let again = measure_projector(&m.post_state, &p0, &mut rng).unwrap();
        assert_eq!(again.outcome, m.outcome);
        assert!((again.probability - 1.0).abs() < 1e-12);

        assert!(measure_projector(&plus, &pauli_matrix(1).unwrap(), &mut rng).is_err());
    }
}
