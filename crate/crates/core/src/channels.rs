//! Operator-sum channels, the depolarizing channel, Pauli-basis
//! decomposition and the depolarizing channel induced by white noise on the
//! tonal representation.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::par::{map_indices, Execution};
use crate::qubit::{
    max_abs_diff, CMatrix, DensityOperator, Operator, Pauli, PauliString, Phase, PureState,
    StateVector,
};
use crate::rng::{substream, SimRng};
use crate::signal::{add_awgn_in_place, ToneBank};

pub const TP_TOL: f64 = 1e-9;

/// A trace-preserving channel given by its Kraus operators.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    dim: usize,
    ops: Vec<Operator>,
}

impl KrausChannel {
    pub fn new(ops: Vec<Operator>) -> Result<Self> {
        let dim = ops
            .first()
            .map(Operator::dim)
            .ok_or_else(|| invalid("empty Kraus set"))?;
        if let Some(bad) = ops.iter().find(|o| o.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: bad.dim(),
            });
        }
        let sum = ops.iter().fold(CMatrix::zeros(dim, dim), |acc, e| {
            acc + e.matrix().adjoint() * e.matrix()
        });
        let dev = max_abs_diff(&sum, &CMatrix::identity(dim, dim));
        if dev > TP_TOL {
            return Err(invalid(format!(
                "Kraus set is not trace preserving (deviation {dev:e})"
            )));
        }
        Ok(Self { dim, ops })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            ops: vec![Operator::identity(dim)],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kraus_ops(&self) -> &[Operator] {
        &self.ops
    }
}

/// `sum_k E_k rho E_k^dagger`.
pub fn apply_channel(channel: &KrausChannel, rho: &DensityOperator) -> Result<DensityOperator> {
    if channel.dim != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: channel.dim,
            actual: rho.dim(),
        });
    }
    let out = channel
        .ops
        .iter()
        .fold(CMatrix::zeros(channel.dim, channel.dim), |acc, e| {
            acc + e.matrix() * rho.matrix() * e.matrix().adjoint()
        });
    Ok(DensityOperator::from_matrix_unchecked(out))
}

/// All `4^n` phase-free Pauli words in lexicographic order (qubit 0 fastest).
pub fn all_pauli_words(n_qubits: usize) -> impl Iterator<Item = PauliString> {
    (0..1usize << (2 * n_qubits)).map(move |code| {
        let letters = (0..n_qubits)
            .map(|q| Pauli::ALL[(code >> (2 * q)) & 3])
            .collect();
        PauliString::new(letters, Phase::PLUS_ONE)
    })
}

/// Closed form `(1 - p) rho + (p / N) I`.
pub fn depolarize(rho: &DensityOperator, p: f64) -> DensityOperator {
    let n = rho.dim();
    let m = rho.matrix() * Complex64::new(1.0 - p, 0.0)
        + CMatrix::identity(n, n) * Complex64::new(p / n as f64, 0.0);
    DensityOperator::from_matrix_unchecked(m)
}

/// Depolarizing channel written over every Pauli word: the identity carries
/// weight `(1 - p) + p / 4^n`, each other word `p / 4^n`.
pub fn depolarizing_channel(n_qubits: usize, p: f64) -> Result<KrausChannel> {
    let spec = PauliChannelSpec::depolarizing(n_qubits, p)?;
    spec.to_kraus()
}

/// Probabilistic mixture of Pauli words.
#[derive(Debug, Clone)]
pub struct PauliChannelSpec {
    n_qubits: usize,
    probabilities: Vec<(PauliString, f64)>,
}

impl PauliChannelSpec {
    pub fn new(n_qubits: usize, probabilities: Vec<(PauliString, f64)>) -> Result<Self> {
        let mut total = 0.0;
        for (word, w) in &probabilities {
            if word.n_qubits() != n_qubits {
                return Err(Error::DimensionMismatch {
                    expected: n_qubits,
                    actual: word.n_qubits(),
                });
            }
            if word.phase() != Phase::PLUS_ONE {
                return Err(invalid(format!(
                    "Pauli channel word {word} must have phase +1"
                )));
            }
            if w.is_nan() || *w < 0.0 {
                return Err(invalid(format!("negative weight {w} on {word}")));
            }
            total += w;
        }
        if (total - 1.0).abs() > 1e-9 {
            return Err(invalid(format!(
                "Pauli channel weights sum to {total}, expected 1"
            )));
        }
        Ok(Self {
            n_qubits,
            probabilities,
        })
    }

    pub fn depolarizing(n_qubits: usize, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(invalid(format!(
                "depolarizing probability {p} outside [0, 1]"
            )));
        }
        let uniform = p / (1u64 << (2 * n_qubits)) as f64;
        let probabilities = all_pauli_words(n_qubits)
            .map(|w| {
                let weight = if w.is_identity() {
                    1.0 - p + uniform
                } else {
                    uniform
                };
                (w, weight)
            })
            .collect();
        Self::new(n_qubits, probabilities)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn probabilities(&self) -> &[(PauliString, f64)] {
        &self.probabilities
    }

    pub fn weight_of(&self, word: &PauliString) -> f64 {
        self.probabilities
            .iter()
            .filter(|(w, _)| w == word)
            .map(|(_, p)| p)
            .sum()
    }

    pub fn to_kraus(&self) -> Result<KrausChannel> {
        let ops = self
            .probabilities
            .iter()
            .filter(|(_, w)| *w > 0.0)
            .map(|(word, w)| word.to_operator().scale(Complex64::new(w.sqrt(), 0.0)))
            .collect();
        KrausChannel::new(ops)
    }
}

/// Pauli-basis coefficients `c_P = Tr(P^dagger op) / 2^n` over all words.
pub fn pauli_decompose(op: &Operator) -> Vec<(PauliString, Complex64)> {
    let dim = op.dim();
    let n = op.n_qubits();
    let m = op.matrix();
    all_pauli_words(n)
        .map(|w| {
            let tr: Complex64 = (0..dim)
                .map(|col| {
                    let (row, amp) = w.apply_to_basis(col);
                    amp.conj() * m[(row, col)]
                })
                .sum();
            (w, tr / dim as f64)
        })
        .collect()
}

/// Inverse of [`pauli_decompose`].
pub fn pauli_recompose(n_qubits: usize, coeffs: &[(PauliString, Complex64)]) -> Operator {
    let dim = 1usize << n_qubits;
    let m = coeffs.iter().fold(CMatrix::zeros(dim, dim), |acc, (w, c)| {
        acc + w.to_operator().matrix() * *c
    });
    Operator::from_matrix_unchecked(m)
}

/// Depolarizing probability equivalent to white noise of spectral density
/// `sigma2` over a window `T` on an `N = 2^n` tone register:
/// `p = N r / (1 + N r)` with `r = sigma2 / T`.
pub fn awgn_equivalent_p(sigma2: f64, duration: f64, n_qubits: usize) -> Result<f64> {
    if sigma2.is_nan() || sigma2 < 0.0 {
        return Err(invalid(format!(
            "sigma2 must be non-negative, got {sigma2}"
        )));
    }
    if duration.is_nan() || duration <= 0.0 {
        return Err(invalid(format!(
            "duration must be positive, got {duration}"
        )));
    }
    let nr = (1u64 << n_qubits) as f64 * sigma2 / duration;
    Ok(if nr.is_infinite() {
        1.0
    } else {
        nr / (1.0 + nr)
    })
}

/// Inverse of [`awgn_equivalent_p`]: the `sigma2` that gives depolarizing
/// probability `p`.
pub fn sigma2_for_p(p: f64, duration: f64, n_qubits: usize) -> Result<f64> {
    if !(0.0..1.0).contains(&p) {
        return Err(invalid(format!("p must be in [0, 1), got {p}")));
    }
    Ok(p / (1.0 - p) * duration / (1u64 << n_qubits) as f64)
}

pub fn awgn_equivalent_channel(
    sigma2: f64,
    duration: f64,
    n_qubits: usize,
) -> Result<(KrausChannel, f64)> {
    let p = awgn_equivalent_p(sigma2, duration, n_qubits)?;
    Ok((depolarizing_channel(n_qubits, p)?, p))
}

/// Trajectories per RNG block in [`estimate_channel_mc`]; fixes the
/// stream layout so the estimate does not depend on thread count.
const MC_BLOCK: usize = 1024;

/// Averages unnormalized outer products `|v><v|` of the vectors produced by
/// `source`, then normalizes by the trace.
pub fn estimate_channel_mc<F>(
    source: F,
    runs: usize,
    seed: u64,
    exec: Execution,
) -> Result<DensityOperator>
where
    F: Fn(&mut SimRng) -> Result<StateVector> + Sync + Send,
{
    if runs == 0 {
        return Err(invalid("channel estimation needs at least one run"));
    }
    let blocks = runs.div_ceil(MC_BLOCK);
    let partials = map_indices(blocks, exec, |b| -> Result<CMatrix> {
        let mut rng = substream(seed, &[b as u64]);
        let count = MC_BLOCK.min(runs - b * MC_BLOCK);
        let mut acc: Option<CMatrix> = None;
        for _ in 0..count {
            let v = source(&mut rng)?;
            let col = nalgebra::DVector::from_column_slice(v.amplitudes());
            let outer = &col * col.adjoint();
            acc = Some(match acc {
                Some(a) => a + outer,
                None => outer,
            });
        }
        Ok(acc.expect("block is nonempty"))
    });
    let mut total: Option<CMatrix> = None;
    for part in partials {
        let part = part?;
        total = Some(match total {
            Some(t) => t + part,
            None => part,
        });
    }
    let total = total.expect("at least one block");
    let tr = total.trace();
    if tr.norm() < 1e-300 {
        return Err(invalid("channel estimate has zero trace"));
    }
    Ok(DensityOperator::from_matrix_unchecked(total / tr))
}

/// Least-squares depolarizing parameter fitting
/// `rho_out - I/N = (1 - p)(rho_in - I/N)`.
pub fn fit_depolarizing_p(rho_in: &DensityOperator, rho_out: &DensityOperator) -> Result<f64> {
    if rho_in.dim() != rho_out.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho_in.dim(),
            actual: rho_out.dim(),
        });
    }
    let mixed = DensityOperator::maximally_mixed(rho_in.dim());
    let b = rho_in.matrix() - mixed.matrix();
    let a = rho_out.matrix() - mixed.matrix();
    let bb: f64 = b.iter().map(|z| z.norm_sqr()).sum();
    if bb < 1e-24 {
        return Err(invalid(
            "input is maximally mixed; depolarizing parameter is unidentifiable",
        ));
    }
    let ab: f64 = b.iter().zip(a.iter()).map(|(x, y)| (x.conj() * y).re).sum();
    Ok(1.0 - ab / bb)
}

/// One pass of the white-noise pipeline for a fixed input: synthesize, add
/// noise, project. Returns the unnormalized projected amplitudes.
pub fn awgn_projected_vector(
    bank: &ToneBank,
    psi: &PureState,
    sigma2: f64,
    rng: &mut SimRng,
) -> Result<StateVector> {
    let mut signal = bank.synthesize(psi)?;
    add_awgn_in_place(&mut signal, sigma2, rng)?;
    let proj = bank.project(&signal)?;
    StateVector::new(psi.n_qubits(), proj.amplitudes)
}

/// Summary emitted by the `channel-estimate` command.
#[derive(Debug, Clone, Serialize)]
pub struct ChannelEstimate {
    pub n_qubits: usize,
    pub sigma2: f64,
    pub duration_s: f64,
    pub ratio: f64,
    pub predicted_p: f64,
    pub estimated_p: f64,
    pub trace_distance: f64,
    pub runs: usize,
    pub seed: u64,
}

/// Runs the white-noise pipeline on a seeded Haar-random input and compares
/// the averaged output with the predicted depolarizing channel.
pub fn estimate_awgn_channel(
    bank: &ToneBank,
    sigma2: f64,
    runs: usize,
    seed: u64,
    exec: Execution,
) -> Result<ChannelEstimate> {
    let cfg = *bank.config();
    let n = cfg.n_qubits();
    let psi = crate::qubit::haar_random_state(n, &mut substream(seed, &[u64::MAX]))?;
    let rho = DensityOperator::from_pure(&psi);
    let estimate = estimate_channel_mc(
        |rng| awgn_projected_vector(bank, &psi, sigma2, rng),
        runs,
        seed,
        exec,
    )?;
    let predicted_p = awgn_equivalent_p(sigma2, cfg.duration(), n)?;
    let predicted = depolarize(&rho, predicted_p);
    Ok(ChannelEstimate {
        n_qubits: n,
        sigma2,
        duration_s: cfg.duration(),
        ratio: sigma2 / cfg.duration(),
        predicted_p,
        estimated_p: fit_depolarizing_p(&rho, &estimate)?,
        trace_distance: estimate.trace_distance(&predicted)?,
        runs,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubit::{haar_random_state, pauli_matrix};
    use crate::rng::rng_from_seed;

    fn random_density(n: usize, seed: u64) -> DensityOperator {
        // convex mixture of three Haar states
        let mut rng = rng_from_seed(seed);
        let dim = 1 << n;
        let mut m = CMatrix::zeros(dim, dim);
        for w in [0.5, 0.3, 0.2] {
            let s = haar_random_state(n, &mut rng).unwrap();
            m += DensityOperator::from_pure(&s).matrix() * Complex64::new(w, 0.0);
        }
        DensityOperator::new(m).unwrap()
    }

    #[test]
    fn identity_channel_is_noop() {
        let rho = random_density(2, 1);
        let out = apply_channel(&KrausChannel::identity(4), &rho).unwrap();
        assert!(out.max_abs_diff(&rho) < 1e-15);
        assert!(apply_channel(&KrausChannel::identity(2), &rho).is_err());
    }

    #[test]
    fn non_tp_kraus_rejected() {
        let half = Operator::identity(2).scale(Complex64::new(0.5, 0.0));
        assert!(KrausChannel::new(vec![half]).is_err());
        assert!(KrausChannel::new(vec![]).is_err());
    }

    #[test]
    fn single_qubit_depolarizing_weights() {
        let p = 0.3;
        let spec = PauliChannelSpec::depolarizing(1, p).unwrap();
        let p_prime = 3.0 * p / 4.0;
        for l in Pauli::NON_IDENTITY {
            let w = PauliString::new(vec![l], Phase::PLUS_ONE);
            assert!((spec.weight_of(&w) - p_prime / 3.0).abs() < 1e-15);
        }
        assert!((spec.weight_of(&PauliString::identity(1)) - (1.0 - p_prime)).abs() < 1e-15);
        assert!(depolarizing_channel(1, 1.5).is_err());
        assert!(depolarizing_channel(1, -0.1).is_err());
    }

    #[test]
    fn full_depolarizing_maps_zero_to_mixed() {
        let ch = depolarizing_channel(1, 1.0).unwrap();
        let rho = DensityOperator::from_pure(&PureState::basis(1, 0).unwrap());
        let out = apply_channel(&ch, &rho).unwrap();
        assert!(out.max_abs_diff(&DensityOperator::maximally_mixed(2)) < 1e-9);
    }

    #[test]
    fn depolarizing_p_zero_is_identity() {
        let ch = depolarizing_channel(2, 0.0).unwrap();
        assert_eq!(ch.kraus_ops().len(), 1);
        let rho = random_density(2, 5);
        assert!(apply_channel(&ch, &rho).unwrap().max_abs_diff(&rho) < 1e-15);
    }

    #[test]
    fn decompose_examples() {
        let x = pauli_decompose(&pauli_matrix(1).unwrap());
        for (w, c) in &x {
            let want = if w.to_string() == "X" { 1.0 } else { 0.0 };
            assert!((c - Complex64::new(want, 0.0)).norm() < 1e-15);
        }
        let proj0 = Operator::from_rows(
            2,
            &[
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
            ],
        )
        .unwrap();
        for (w, c) in pauli_decompose(&proj0) {
            let want = match w.to_string().as_str() {
                "I" | "Z" => 0.5,
                _ => 0.0,
            };
            assert!((c - Complex64::new(want, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn awgn_p_examples() {
        assert_eq!(awgn_equivalent_p(0.0, 1e-3, 3).unwrap(), 0.0);
        // N r = 1 -> 1/2
        assert!((awgn_equivalent_p(0.25e-3, 1e-3, 2).unwrap() - 0.5).abs() < 1e-12);
        // N = 2, r = 0.05 -> 0.1 / 1.1
        assert!((awgn_equivalent_p(0.05e-3, 1e-3, 1).unwrap() - 0.1 / 1.1).abs() < 1e-12);
        assert!(awgn_equivalent_p(-1.0, 1e-3, 1).is_err());
        assert!(awgn_equivalent_p(1.0, 0.0, 1).is_err());
        let (ch, p) = awgn_equivalent_channel(0.0, 1e-3, 1).unwrap();
        assert_eq!(p, 0.0);
        assert_eq!(ch.kraus_ops().len(), 1);
        let s2 = sigma2_for_p(0.2, 1e-3, 3).unwrap();
        assert!((awgn_equivalent_p(s2, 1e-3, 3).unwrap() - 0.2).abs() < 1e-12);
    }

    #[test]
    fn deterministic_source_gives_its_projector() {
        let psi = haar_random_state(2, &mut rng_from_seed(4)).unwrap();
        let est =
            estimate_channel_mc(|_| Ok(psi.clone().into()), 10, 0, Execution::Sequential).unwrap();
        assert!(est.max_abs_diff(&DensityOperator::from_pure(&psi)) < 1e-14);
        assert!(
            estimate_channel_mc(|_| Ok(psi.clone().into()), 0, 0, Execution::Sequential).is_err()
        );
    }

    #[test]
    fn fitted_p_recovers_closed_form() {
        let rho = random_density(2, 9);
        let out = depolarize(&rho, 0.137);
        assert!((fit_depolarizing_p(&rho, &out).unwrap() - 0.137).abs() < 1e-12);
        assert!(fit_depolarizing_p(&DensityOperator::maximally_mixed(2), &out).is_err());
    }
}
