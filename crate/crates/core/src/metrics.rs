//! Fidelity, log-fidelity ("number of nines"), medians and percentile
//! bootstrap intervals.

use std::io::Write;

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::par::{map_indices, Execution};
use crate::qubit::{inner_product, DensityOperator, Operator, PureState};
use crate::rng::substream;
use rand::Rng;

/// Log-fidelity reported for `F >= 1 - 1e-15`.
pub const LOG_FIDELITY_CAP: f64 = 15.0;
const CAP_THRESHOLD: f64 = 1e-15;

pub const DEFAULT_N_BOOT: usize = 10_000;
pub const DEFAULT_CI_LEVEL: f64 = 0.95;

/// `|<ideal|actual>|`; insensitive to global phase.
pub fn state_fidelity(ideal: &PureState, actual: &PureState) -> Result<f64> {
    if ideal.n_qubits() != actual.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: ideal.n_qubits(),
            actual: actual.n_qubits(),
        });
    }
    Ok(inner_product(ideal, actual)?.norm().clamp(0.0, 1.0))
}

/// `sqrt(<psi| U^dagger E(rho) U |psi>)` for `rho = |psi><psi|`.
pub fn channel_gate_fidelity(
    ideal_gate: &Operator,
    rho: &DensityOperator,
    channel_output: &DensityOperator,
    psi: &PureState,
) -> Result<f64> {
    let dim = psi.dim();
    for d in [ideal_gate.dim(), rho.dim(), channel_output.dim()] {
        if d != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: d,
            });
        }
    }
    if rho.max_abs_diff(&DensityOperator::from_pure(psi)) > 1e-9 {
        return Err(invalid("rho must equal |psi><psi|"));
    }
    let target = PureState::new(psi.n_qubits(), ideal_gate.apply(psi.amplitudes())?)?;
    let overlap = channel_output.expectation(&target)?;
    Ok(overlap.clamp(0.0, 1.0).sqrt())
}

/// `-log10(1 - F)`, capped at [`LOG_FIDELITY_CAP`].
pub fn log_fidelity(fidelity: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&fidelity) {
        return Err(invalid(format!("fidelity {fidelity} outside [0, 1]")));
    }
    if fidelity >= 1.0 - CAP_THRESHOLD {
        return Ok(LOG_FIDELITY_CAP);
    }
    Ok(-(1.0 - fidelity).log10())
}

pub fn is_capped(fidelity: f64) -> bool {
    fidelity >= 1.0 - CAP_THRESHOLD
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FidelitySample {
    #[serde(rename = "F")]
    pub fidelity: f64,
    #[serde(rename = "f")]
    pub log_fidelity: f64,
    pub capped: bool,
}

impl FidelitySample {
    pub fn new(fidelity: f64) -> Result<Self> {
        Ok(Self {
            fidelity,
            log_fidelity: log_fidelity(fidelity)?,
            capped: is_capped(fidelity),
        })
    }
}

/// Sample median; the midpoint of the central pair for even counts.
pub fn median(samples: &[f64]) -> Result<f64> {
    if samples.is_empty() {
        return Err(invalid("median of empty sample"));
    }
    let mut v = samples.to_vec();
    Ok(median_in_place(&mut v))
}

pub(crate) fn median_in_place(v: &mut [f64]) -> f64 {
    let n = v.len();
    let mid = n / 2;
    let (_, hi, _) = v.select_nth_unstable_by(mid, f64::total_cmp);
    let hi = *hi;
    if n % 2 == 1 {
        hi
    } else {
        let lo = v[..mid].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (lo + hi)
    }
}

pub fn mean(samples: &[f64]) -> Result<f64> {
    if samples.is_empty() {
        return Err(invalid("mean of empty sample"));
    }
    Ok(samples.iter().sum::<f64>() / samples.len() as f64)
}

/// Linear-interpolation quantile of sorted data.
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

/// Percentile bootstrap interval for `statistic`. Replicate `b` draws from
/// its own stream, so the result depends only on `seed`.
pub fn bootstrap_ci<S>(
    samples: &[f64],
    statistic: S,
    n_boot: usize,
    level: f64,
    seed: u64,
    exec: Execution,
) -> Result<(f64, f64)>
where
    S: Fn(&mut [f64]) -> f64 + Sync + Send,
{
    if samples.is_empty() {
        return Err(invalid("bootstrap of empty sample"));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(invalid(format!("confidence level {level} outside (0, 1)")));
    }
    if n_boot < 100 {
        return Err(invalid(format!(
            "n_boot must be at least 100, got {n_boot}"
        )));
    }
    let n = samples.len();
    let mut stats = map_indices(n_boot, exec, |b| {
        let mut rng = substream(seed, &[b as u64]);
        let mut resample: Vec<f64> = (0..n).map(|_| samples[rng.random_range(0..n)]).collect();
        statistic(&mut resample)
    });
    stats.sort_by(f64::total_cmp);
    Ok((
        quantile_sorted(&stats, (1.0 - level) / 2.0),
        quantile_sorted(&stats, (1.0 + level) / 2.0),
    ))
}

pub fn bootstrap_median_ci(
    samples: &[f64],
    n_boot: usize,
    level: f64,
    seed: u64,
    exec: Execution,
) -> Result<(f64, f64)> {
    bootstrap_ci(samples, median_in_place, n_boot, level, seed, exec)
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct SummaryStats {
    #[serde(rename = "median_F")]
    pub median_fidelity: f64,
    #[serde(rename = "ci_F_lo")]
    pub ci_fidelity_lo: f64,
    #[serde(rename = "ci_F_hi")]
    pub ci_fidelity_hi: f64,
    pub median_f: f64,
    pub ci_f_lo: f64,
    pub ci_f_hi: f64,
    #[serde(rename = "n")]
    pub n_samples: usize,
    pub n_boot: usize,
    pub level: f64,
}

/// Median and bootstrap interval of `F`; the log-fidelity figures are the
/// monotone image of the fidelity figures, so `median_f = -log10(1 -
/// median_F)` holds exactly for every sample size.
pub fn summarize(
    fidelities: &[f64],
    n_boot: usize,
    level: f64,
    seed: u64,
    exec: Execution,
) -> Result<SummaryStats> {
    let med = median(fidelities)?;
    let (lo, hi) = bootstrap_median_ci(fidelities, n_boot, level, seed, exec)?;
    // the percentile interval can miss the point estimate on very discrete data
    let (lo, hi) = (lo.min(med), hi.max(med));
    Ok(SummaryStats {
        median_fidelity: med,
        ci_fidelity_lo: lo,
        ci_fidelity_hi: hi,
        median_f: log_fidelity(med)?,
        ci_f_lo: log_fidelity(lo)?,
        ci_f_hi: log_fidelity(hi)?,
        n_samples: fidelities.len(),
        n_boot,
        level,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HistogramBin {
    pub left: f64,
    pub right: f64,
    pub density: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution {
    /// `(x, rank / n)` over the sorted sample.
    pub cdf: Vec<(f64, f64)>,
    pub histogram: Vec<HistogramBin>,
}

impl EmpiricalDistribution {
    /// Gnuplot-friendly dump: two data blocks separated by blank lines,
    /// headers as `#` comments.
    pub fn write_csv<W: Write>(&self, mut out: W, title: &str) -> Result<()> {
        writeln!(out, "# {title}")?;
        writeln!(out, "# f_value,cdf")?;
        for (x, p) in &self.cdf {
            writeln!(out, "{x},{p}")?;
        }
        writeln!(out)?;
        writeln!(out)?;
        writeln!(out, "# bin_left,bin_right,pdf_density")?;
        for b in &self.histogram {
            writeln!(out, "{},{},{}", b.left, b.right, b.density)?;
        }
        Ok(())
    }
}

pub fn empirical_distribution(samples: &[f64], n_bins: usize) -> Result<EmpiricalDistribution> {
    if samples.is_empty() {
        return Err(invalid("distribution of empty sample"));
    }
    if n_bins == 0 {
        return Err(invalid("need at least one histogram bin"));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let cdf = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| (x, (i + 1) as f64 / n))
        .collect();
    let (mut lo, mut hi) = (sorted[0], sorted[sorted.len() - 1]);
    if hi <= lo {
        lo -= 0.5;
        hi += 0.5;
    }
    let width = (hi - lo) / n_bins as f64;
    let mut counts = vec![0usize; n_bins];
    for &x in &sorted {
        let k = (((x - lo) / width) as usize).min(n_bins - 1);
        counts[k] += 1;
    }
    let histogram = counts
        .iter()
        .enumerate()
        .map(|(k, &c)| HistogramBin {
            left: lo + k as f64 * width,
            right: lo + (k + 1) as f64 * width,
            density: c as f64 / (n * width),
        })
        .collect();
    Ok(EmpiricalDistribution { cdf, histogram })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubit::pauli_matrix;
    use num_complex::Complex64;

    #[test]
    fn fidelity_examples() {
        let zero = PureState::basis(1, 0).unwrap();
        let one = PureState::basis(1, 1).unwrap();
        let plus = PureState::from_unnormalized(1, vec![Complex64::new(1.0, 0.0); 2]).unwrap();
        assert_eq!(state_fidelity(&zero, &zero).unwrap(), 1.0);
        assert_eq!(state_fidelity(&zero, &one).unwrap(), 0.0);
        assert!(
            (state_fidelity(&zero, &plus).unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15
        );
        assert!(state_fidelity(&zero, &PureState::basis(2, 0).unwrap()).is_err());
    }

    #[test]
    fn channel_fidelity_examples() {
        let psi = PureState::basis(1, 0).unwrap();
        let rho = DensityOperator::from_pure(&psi);
        let x = pauli_matrix(1).unwrap();
        let ideal_out = DensityOperator::from_pure(&PureState::basis(1, 1).unwrap());
        assert!((channel_gate_fidelity(&x, &rho, &ideal_out, &psi).unwrap() - 1.0).abs() < 1e-15);
        let mixed = DensityOperator::maximally_mixed(2);
        let f = channel_gate_fidelity(&x, &rho, &mixed, &psi).unwrap();
        assert!((f - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        let other = DensityOperator::from_pure(&PureState::basis(1, 1).unwrap());
        assert!(channel_gate_fidelity(&x, &other, &mixed, &psi).is_err());
    }

    #[test]
    fn log_fidelity_values() {
        assert!((log_fidelity(0.999).unwrap() - 3.0).abs() < 1e-9);
        assert_eq!(log_fidelity(1.0).unwrap(), LOG_FIDELITY_CAP);
        assert!(log_fidelity(1.1).is_err());
        assert!(log_fidelity(-0.1).is_err());
        assert_eq!(log_fidelity(0.0).unwrap(), 0.0);
        let s = FidelitySample::new(1.0).unwrap();
        assert!(s.capped);
    }

    #[test]
    fn median_values() {
        assert_eq!(median(&[1.0, 2.0, 3.0]).unwrap(), 2.0);
        assert_eq!(median(&[4.0, 1.0, 3.0, 2.0]).unwrap(), 2.5);
        assert!(median(&[]).is_err());
    }

    #[test]
    fn bootstrap_constant_and_errors() {
        let c = vec![0.7; 50];
        assert_eq!(
            bootstrap_median_ci(&c, 200, 0.95, 1, Execution::Sequential).unwrap(),
            (0.7, 0.7)
        );
        assert!(bootstrap_median_ci(&c, 200, 1.0, 1, Execution::Sequential).is_err());
        assert!(bootstrap_median_ci(&c, 50, 0.9, 1, Execution::Sequential).is_err());
        assert!(bootstrap_median_ci(&[], 200, 0.9, 1, Execution::Sequential).is_err());
    }

    #[test]
    fn bootstrap_is_schedule_independent() {
        let data: Vec<f64> = (0..301).map(|i| ((i * 37) % 101) as f64).collect();
        let a = bootstrap_median_ci(&data, 500, 0.9, 7, Execution::Sequential).unwrap();
        let b = bootstrap_median_ci(&data, 500, 0.9, 7, Execution::ParallelWith { threads: 3 })
            .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn distribution_single_sample_and_mass() {
        let d = empirical_distribution(&[2.5], 4).unwrap();
        assert_eq!(d.cdf, vec![(2.5, 1.0)]);
        let mass: f64 = d
            .histogram
            .iter()
            .map(|b| b.density * (b.right - b.left))
            .sum();
        assert!((mass - 1.0).abs() < 1e-12);
        let d = empirical_distribution(&[0.1, 0.4, 0.4, 0.9, 3.0], 7).unwrap();
        let mass: f64 = d
            .histogram
            .iter()
            .map(|b| b.density * (b.right - b.left))
            .sum();
        assert!((mass - 1.0).abs() < 1e-12);
        assert!(empirical_distribution(&[1.0], 0).is_err());
    }

    #[test]
    fn summary_transform_identity_on_even_counts() {
        let f: Vec<f64> = (0..1000)
            .map(|i| 1.0 - 1e-3 * (1.0 + (i % 97) as f64 / 10.0))
            .collect();
        let s = summarize(&f, 200, 0.95, 3, Execution::Sequential).unwrap();
        assert!((s.median_f - log_fidelity(s.median_fidelity).unwrap()).abs() < 1e-12);
        assert!(s.ci_fidelity_lo <= s.median_fidelity && s.median_fidelity <= s.ci_fidelity_hi);
        assert!(s.ci_f_lo <= s.median_f && s.median_f <= s.ci_f_hi);
    }
}
