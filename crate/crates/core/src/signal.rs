//! Tonal signal embedding of qubit states.
//!
//! Basis state `|x>` of an n-qubit register is carried by the complex tone
//! `phi_x(t) = exp(i * sum_k s_k * omega_k * t)` with `omega_k = 2^k * omega0`
//! and `s_k = +1` when bit `k` of `x` is 0, `-1` otherwise. A state is the
//! amplitude-weighted sum of its tones. Projection back onto the tones is the
//! time average of `phi_x^* s` over the window `T`, evaluated with the
//! rectangle rule, which is exact for on-grid tones over whole periods.

use std::f64::consts::TAU;
use std::io::Write;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Error, Result};
use crate::qubit::{norm_sqr, PureState, StateVector, DEGENERATE_NORM};

/// Default oversampling relative to the highest tone frequency.
pub const DEFAULT_SAMPLE_RATE_FACTOR: f64 = 16.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalConfig {
    n_qubits: usize,
    omega0: f64,
    duration: f64,
    sample_rate: f64,
}

impl SignalConfig {
    pub fn new(n_qubits: usize, omega0: f64, duration: f64, sample_rate: f64) -> Result<Self> {
        if n_qubits == 0 || n_qubits > 10 {
            return Err(invalid(format!(
                "n_qubits must be in 1..=10, got {n_qubits}"
            )));
        }
        if !(omega0 > 0.0 && omega0.is_finite()) {
            return Err(invalid(format!("omega0 must be positive, got {omega0}")));
        }
        if !(duration > 0.0 && duration.is_finite()) {
            return Err(invalid(format!(
                "duration must be positive, got {duration}"
            )));
        }
        let periods = duration * omega0 / TAU;
        if (periods - periods.round()).abs() > 1e-9 || periods.round() < 1.0 {
            return Err(invalid(format!(
                "duration must be a whole number of base periods, got {periods} periods"
            )));
        }
        let f0 = omega0 / TAU;
        let highest = ((1usize << n_qubits) - 1) as f64 * f0;
        if sample_rate.is_nan() || sample_rate <= 4.0 * highest * (1.0 + 1e-9) {
            return Err(invalid(format!(
                "sample rate {sample_rate} must exceed {}",
                4.0 * highest
            )));
        }
        Ok(Self {
            n_qubits,
            omega0,
            duration,
            sample_rate,
        })
    }

    /// `periods` base periods, sampled at `rate_factor` times the highest
    /// tone frequency.
    pub fn from_hz(n_qubits: usize, f0_hz: f64, periods: usize, rate_factor: f64) -> Result<Self> {
        let highest = ((1usize << n_qubits) - 1) as f64 * f0_hz;
        Self::new(
            n_qubits,
            TAU * f0_hz,
            periods as f64 / f0_hz,
            rate_factor * highest,
        )
    }

    /// One base period at the default oversampling.
    pub fn with_defaults(n_qubits: usize, f0_hz: f64) -> Result<Self> {
        Self::from_hz(n_qubits, f0_hz, 1, DEFAULT_SAMPLE_RATE_FACTOR)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    /// Window length `T` in seconds.
    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn n_samples(&self) -> usize {
        (self.duration * self.sample_rate).round() as usize
    }

    pub fn sample_time(&self, j: usize) -> f64 {
        j as f64 / self.sample_rate
    }

    /// Signed multiple of `omega0` carried by basis state `x`.
    pub fn tone_multiple(&self, x: usize) -> i64 {
        (0..self.n_qubits)
            .map(|k| {
                let w = 1i64 << k;
                if (x >> k) & 1 == 0 {
                    w
                } else {
                    -w
                }
            })
            .sum()
    }

    pub fn tone_frequency_hz(&self, x: usize) -> f64 {
        self.tone_multiple(x) as f64 * self.omega0 / TAU
    }
}

/// A sampled complex baseband waveform.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    samples: Vec<Complex64>,
    config: SignalConfig,
}

impl Signal {
    pub fn new(samples: Vec<Complex64>, config: SignalConfig) -> Result<Self> {
        if samples.len() != config.n_samples() {
            return Err(Error::DimensionMismatch {
                expected: config.n_samples(),
                actual: samples.len(),
            });
        }
        Ok(Self { samples, config })
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn config(&self) -> &SignalConfig {
        &self.config
    }

    pub fn mean_power(&self) -> f64 {
        norm_sqr(&self.samples) / self.samples.len() as f64
    }

    /// Writes `t_seconds,re,im` rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "t_seconds,re,im")?;
        for (j, s) in self.samples.iter().enumerate() {
            // + 0.0 turns -0 into 0
            writeln!(
                out,
                "{},{},{}",
                self.config.sample_time(j),
                s.re + 0.0,
                s.im + 0.0
            )?;
        }
        Ok(())
    }
}

/// Result of projecting a signal onto the tonal basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub amplitudes: Vec<Complex64>,
    /// Mean power not captured by the tones.
    pub residual_power: f64,
}

/// Precomputed tone table for one configuration; reused across trajectories.
#[derive(Debug, Clone)]
pub struct ToneBank {
    config: SignalConfig,
    // tones[x * n_samples + j] = phi_x(t_j)
    tones: Vec<Complex64>,
}

impl ToneBank {
    pub fn new(config: SignalConfig) -> Self {
        let m = config.n_samples();
        let step = config.omega0 / config.sample_rate;
        let mut tones = Vec::with_capacity(config.dim() * m);
        for x in 0..config.dim() {
            let mult = config.tone_multiple(x) as f64;
            tones.extend((0..m).map(|j| Complex64::from_polar(1.0, mult * step * j as f64)));
        }
        Self { config, tones }
    }

    pub fn config(&self) -> &SignalConfig {
        &self.config
    }

    fn tone(&self, x: usize) -> &[Complex64] {
        let m = self.config.n_samples();
        &self.tones[x * m..(x + 1) * m]
    }

    pub fn basis_tone(&self, x: usize) -> Result<Signal> {
        if x >= self.config.dim() {
            return Err(invalid(format!(
                "basis index {x} out of range 0..{}",
                self.config.dim()
            )));
        }
        Signal::new(self.tone(x).to_vec(), self.config)
    }

    /// `sum_x amps[x] * phi_x(t)`; the amplitudes need not be normalized.
    pub fn synthesize_amplitudes(&self, amps: &[Complex64]) -> Result<Signal> {
        if amps.len() != self.config.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.config.dim(),
                actual: amps.len(),
            });
        }
        let m = self.config.n_samples();
        let mut samples = vec![Complex64::new(0.0, 0.0); m];
        for (x, &a) in amps.iter().enumerate() {
            if a == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (s, t) in samples.iter_mut().zip(self.tone(x)) {
                *s += a * t;
            }
        }
        Signal::new(samples, self.config)
    }

    pub fn synthesize(&self, state: &PureState) -> Result<Signal> {
        if state.n_qubits() != self.config.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.config.n_qubits,
                actual: state.n_qubits(),
            });
        }
        self.synthesize_amplitudes(state.amplitudes())
    }

    pub fn project(&self, signal: &Signal) -> Result<Projection> {
        if signal.config != self.config {
            return Err(invalid("signal was sampled with a different configuration"));
        }
        let m = signal.samples.len() as f64;
        let amplitudes: Vec<Complex64> = (0..self.config.dim())
            .map(|x| {
                self.tone(x)
                    .iter()
                    .zip(&signal.samples)
                    .map(|(t, s)| t.conj() * s)
                    .sum::<Complex64>()
                    / m
            })
            .collect();
        let residual_power = signal.mean_power() - norm_sqr(&amplitudes);
        Ok(Projection {
            amplitudes,
            residual_power,
        })
    }

    /// Projects and normalizes; returns the state and the fraction of signal
    /// power that fell outside the tonal subspace.
    pub fn state_from_noisy_signal(&self, signal: &Signal) -> Result<(PureState, f64)> {
        let proj = self.project(signal)?;
        let inside = norm_sqr(&proj.amplitudes);
        if inside.sqrt() < DEGENERATE_NORM {
            return Err(Error::DegenerateSignal {
                norm: inside.sqrt(),
            });
        }
        let residual = proj.residual_power.max(0.0);
        let leakage = residual / (residual + inside);
        let state = StateVector::new(self.config.n_qubits, proj.amplitudes)?.normalize()?;
        Ok((state, leakage))
    }
}

/// Sample variance of the projection `<x|w>` of pure white noise onto tone
/// `x`, over `draws` independent noise realizations.
pub fn projected_noise_variance<R: Rng + ?Sized>(
    bank: &ToneBank,
    x: usize,
    sigma2: f64,
    draws: usize,
    rng: &mut R,
) -> Result<f64> {
    if x >= bank.config.dim() {
        return Err(invalid(format!(
            "basis index {x} out of range 0..{}",
            bank.config.dim()
        )));
    }
    if draws < 2 {
        return Err(invalid("need at least two draws"));
    }
    let m = bank.config.n_samples();
    let zero = Signal::new(vec![Complex64::new(0.0, 0.0); m], bank.config)?;
    let tone = bank.tone(x);
    let mut values = Vec::with_capacity(draws);
    for _ in 0..draws {
        let noise = add_awgn(&zero, sigma2, rng)?;
        let v: Complex64 = tone
            .iter()
            .zip(&noise.samples)
            .map(|(t, s)| t.conj() * s)
            .sum::<Complex64>()
            / m as f64;
        values.push(v);
    }
    let mean = values.iter().sum::<Complex64>() / draws as f64;
    Ok(values.iter().map(|v| (v - mean).norm_sqr()).sum::<f64>() / (draws - 1) as f64)
}

pub fn basis_tone(x: usize, config: &SignalConfig) -> Result<Signal> {
    if x >= config.dim() {
        return Err(invalid(format!(
            "basis index {x} out of range 0..{}",
            config.dim()
        )));
    }
    ToneBank::new(*config).basis_tone(x)
}

pub fn synthesize(state: &PureState, config: &SignalConfig) -> Result<Signal> {
    ToneBank::new(*config).synthesize(state)
}

pub fn project(signal: &Signal) -> Projection {
    ToneBank::new(signal.config)
        .project(signal)
        .expect("bank built from the signal's own configuration")
}

pub fn state_from_noisy_signal(signal: &Signal) -> Result<(PureState, f64)> {
    ToneBank::new(signal.config).state_from_noisy_signal(signal)
}

/// Adds complex white Gaussian noise of spectral density `sigma2`: each
/// sample receives variance `sigma2 * sample_rate`, split evenly between the
/// real and imaginary parts.
pub fn add_awgn<R: Rng + ?Sized>(signal: &Signal, sigma2: f64, rng: &mut R) -> Result<Signal> {
    let mut out = signal.clone();
    add_awgn_in_place(&mut out, sigma2, rng)?;
    Ok(out)
}

pub fn add_awgn_in_place<R: Rng + ?Sized>(
    signal: &mut Signal,
    sigma2: f64,
    rng: &mut R,
) -> Result<()> {
    if !sigma2.is_finite() || sigma2 < 0.0 {
        return Err(invalid(format!(
            "sigma2 must be a finite non-negative number, got {sigma2}"
        )));
    }
    if sigma2 == 0.0 {
        return Ok(());
    }
    let sd = (sigma2 * signal.config.sample_rate / 2.0).sqrt();
    for s in signal.samples.iter_mut() {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        *s += Complex64::new(sd * re, sd * im);
    }
    Ok(())
}

/// Noise parameters of the signal path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AwgnParams {
    pub sigma2: f64,
    pub injection_points: usize,
}

impl AwgnParams {
    pub fn new(sigma2: f64, injection_points: usize) -> Result<Self> {
        if sigma2.is_nan() || sigma2 < 0.0 {
            return Err(invalid(format!(
                "sigma2 must be non-negative, got {sigma2}"
            )));
        }
        Ok(Self {
            sigma2,
            injection_points,
        })
    }

    /// Per-coordinate noise variance `sigma2 / T` after projection.
    pub fn ratio(&self, config: &SignalConfig) -> f64 {
        self.sigma2 / config.duration()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubit::haar_random_state;
    use crate::rng::rng_from_seed;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn two_qubit_tones_at_one_and_three_khz() {
        let cfg = SignalConfig::with_defaults(2, 1000.0).unwrap();
        let mut f: Vec<f64> = (0..4).map(|x| cfg.tone_frequency_hz(x)).collect();
        f.sort_by(f64::total_cmp);
        for (got, want) in f.iter().zip([-3000.0, -1000.0, 1000.0, 3000.0]) {
            assert!((got - want).abs() < 1e-9);
        }
        assert!((cfg.tone_frequency_hz(0) - 3000.0).abs() < 1e-9);
    }

    #[test]
    fn tones_have_unit_modulus() {
        let cfg = SignalConfig::with_defaults(3, 1000.0).unwrap();
        for x in 0..8 {
            let s = basis_tone(x, &cfg).unwrap();
            assert!(s.samples().iter().all(|v| (v.norm() - 1.0).abs() < 1e-12));
        }
        assert!(basis_tone(8, &cfg).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(SignalConfig::new(2, TAU * 1000.0, 1.5e-3, 64000.0).is_err());
        assert!(SignalConfig::new(2, TAU * 1000.0, 1e-3, 12000.0).is_err());
        assert!(SignalConfig::new(2, -1.0, 1e-3, 64000.0).is_err());
        assert!(SignalConfig::new(2, TAU * 1000.0, 2e-3, 48000.0).is_ok());
        let cfg = SignalConfig::with_defaults(5, 1000.0).unwrap();
        assert_eq!(cfg.n_samples(), 496);
    }

    #[test]
    fn round_trip_and_basis_projection() {
        let cfg = SignalConfig::with_defaults(3, 1000.0).unwrap();
        let bank = ToneBank::new(cfg);
        let psi = haar_random_state(3, &mut rng_from_seed(11)).unwrap();
        let proj = bank.project(&bank.synthesize(&psi).unwrap()).unwrap();
        for (a, b) in proj.amplitudes.iter().zip(psi.amplitudes()) {
            assert!((a - b).norm() < 1e-9);
        }
        assert!(proj.residual_power.abs() < 1e-9);

        let p = bank.project(&bank.basis_tone(5).unwrap()).unwrap();
        for (x, a) in p.amplitudes.iter().enumerate() {
            let want = if x == 5 { 1.0 } else { 0.0 };
            assert!((a - c(want, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn all_zero_state_tone() {
        let cfg = SignalConfig::with_defaults(2, 1000.0).unwrap();
        let s = synthesize(&PureState::basis(2, 0).unwrap(), &cfg).unwrap();
        assert_eq!(s, basis_tone(0, &cfg).unwrap());
    }

    #[test]
    fn awgn_zero_and_negative() {
        let cfg = SignalConfig::with_defaults(1, 1000.0).unwrap();
        let s = basis_tone(0, &cfg).unwrap();
        let mut rng = rng_from_seed(0);
        assert_eq!(add_awgn(&s, 0.0, &mut rng).unwrap(), s);
        assert!(add_awgn(&s, -1.0, &mut rng).is_err());
        let a = add_awgn(&s, 1e-4, &mut rng_from_seed(5)).unwrap();
        let b = add_awgn(&s, 1e-4, &mut rng_from_seed(5)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn noiseless_state_recovery() {
        let cfg = SignalConfig::with_defaults(2, 1000.0).unwrap();
        let psi = haar_random_state(2, &mut rng_from_seed(2)).unwrap();
        let (back, leak) = state_from_noisy_signal(&synthesize(&psi, &cfg).unwrap()).unwrap();
        assert!(leak <= 1e-9);
        for (a, b) in back.amplitudes().iter().zip(psi.amplitudes()) {
            assert!((a - b).norm() < 1e-9);
        }
        let zero = Signal::new(vec![c(0.0, 0.0); cfg.n_samples()], cfg).unwrap();
        assert!(matches!(
            state_from_noisy_signal(&zero),
            Err(Error::DegenerateSignal { .. })
        ));
    }

    #[test]
    fn csv_dump_has_header() {
        let cfg = SignalConfig::with_defaults(1, 1000.0).unwrap();
        let mut buf = Vec::new();
        basis_tone(1, &cfg).unwrap().write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t_seconds,re,im\n0,1,0\n"));
        assert_eq!(text.lines().count(), 1 + cfg.n_samples());
    }
}
