//! Experiment configuration and its flat `key = value` file format.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gates::GateLabel;
use crate::metrics::{DEFAULT_CI_LEVEL, DEFAULT_N_BOOT};
use crate::signal::{SignalConfig, DEFAULT_SAMPLE_RATE_FACTOR};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Encoded,
    Control,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Encoded => "encoded",
            Mode::Control => "control",
        }
    }

    pub(crate) fn tag(self) -> u64 {
        match self {
            Mode::Encoded => 1,
            Mode::Control => 2,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeSelection {
    Encoded,
    Control,
    Both,
}

impl ModeSelection {
    pub fn modes(self) -> Vec<Mode> {
        match self {
            ModeSelection::Encoded => vec![Mode::Encoded],
            ModeSelection::Control => vec![Mode::Control],
            ModeSelection::Both => vec![Mode::Encoded, Mode::Control],
        }
    }
}

impl FromStr for ModeSelection {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "encoded" => Ok(ModeSelection::Encoded),
            "control" => Ok(ModeSelection::Control),
            "both" => Ok(ModeSelection::Both),
            other => Err(Error::Config(format!(
                "mode must be encoded, control or both, got {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SyndromeMethod {
    Projective,
    Circuit,
}

impl FromStr for SyndromeMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "projective" => Ok(SyndromeMethod::Projective),
            "circuit" => Ok(SyndromeMethod::Circuit),
            other => Err(Error::Config(format!(
                "syndrome_method must be projective or circuit, got {other:?}"
            ))),
        }
    }
}

/// Number of white-noise injections on each side of the gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct NoiseInjection {
    pub pre_gate: usize,
    pub post_gate: usize,
}

impl Default for NoiseInjection {
    fn default() -> Self {
        Self {
            pre_gate: 1,
            post_gate: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    #[serde(serialize_with = "serialize_display")]
    pub gate_label: GateLabel,
    pub mode: ModeSelection,
    pub num_states: usize,
    pub reps_per_state: usize,
    pub sigma2: f64,
    pub coeff_sigma: f64,
    pub gate_noise_multipliers: BTreeMap<String, f64>,
    pub noise_injection: NoiseInjection,
    pub syndrome_method: SyndromeMethod,
    pub omega0_hz: f64,
    pub duration_periods: usize,
    pub sample_rate_factor: f64,
    pub n_boot: usize,
    pub ci_level: f64,
    pub seed: u64,
    pub out_dir: PathBuf,
}

fn serialize_display<S: serde::Serializer, T: fmt::Display>(
    v: &T,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            gate_label: GateLabel::Z,
            mode: ModeSelection::Both,
            num_states: 100,
            reps_per_state: 10,
            sigma2: 0.0,
            coeff_sigma: 0.0,
            gate_noise_multipliers: BTreeMap::new(),
            noise_injection: NoiseInjection::default(),
            syndrome_method: SyndromeMethod::Projective,
            omega0_hz: 1000.0,
            duration_periods: 1,
            sample_rate_factor: DEFAULT_SAMPLE_RATE_FACTOR,
            n_boot: DEFAULT_N_BOOT,
            ci_level: DEFAULT_CI_LEVEL,
            seed: 0,
            out_dir: PathBuf::from("out"),
        }
    }
}

const KEYS: [&str; 16] = [
    "gate_label",
    "mode",
    "num_states",
    "reps_per_state",
    "sigma2",
    "coeff_sigma",
    "gate_noise_multipliers",
    "noise_injection",
    "syndrome_method",
    "omega0_hz",
    "duration_periods",
    "sample_rate_factor",
    "n_boot",
    "ci_level",
    "seed",
    "out_dir",
];

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse {value:?}")))
}

impl ExperimentConfig {
    pub fn total_runs(&self) -> usize {
        self.num_states * self.reps_per_state
    }

    /// Parses `key = value` lines. Blank lines and lines starting with `#`
    /// are skipped; unknown keys are errors.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            cfg.set(key.trim(), value.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "gate_label" => {
                self.gate_label = value
                    .parse()
                    .map_err(|e: Error| Error::Config(e.to_string()))?
            }
            "mode" => self.mode = value.parse()?,
            "num_states" => self.num_states = parse_num(key, value)?,
            "reps_per_state" => self.reps_per_state = parse_num(key, value)?,
            "sigma2" => self.sigma2 = parse_num(key, value)?,
            "coeff_sigma" => self.coeff_sigma = parse_num(key, value)?,
            "gate_noise_multipliers" => {
                self.gate_noise_multipliers = BTreeMap::new();
                for item in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    let (label, mult) = item.split_once(':').ok_or_else(|| {
                        Error::Config(format!("{key}: expected label:multiplier, got {item:?}"))
                    })?;
                    let label: GateLabel = label
                        .trim()
                        .parse()
                        .map_err(|e: Error| Error::Config(e.to_string()))?;
                    self.gate_noise_multipliers
                        .insert(label.to_string(), parse_num(key, mult.trim())?);
                }
            }
            "noise_injection" => {
                let mut inj = NoiseInjection::default();
                for item in value.split(',').map(str::trim) {
                    let (side, count) = item.split_once(':').ok_or_else(|| {
                        Error::Config(format!("{key}: expected pre_gate:N,post_gate:M"))
                    })?;
                    match side.trim() {
                        "pre_gate" => inj.pre_gate = parse_num(key, count.trim())?,
                        "post_gate" => inj.post_gate = parse_num(key, count.trim())?,
                        other => {
                            return Err(Error::Config(format!("{key}: unknown side {other:?}")))
                        }
                    }
                }
                self.noise_injection = inj;
            }
            "syndrome_method" => self.syndrome_method = value.parse()?,
            "omega0_hz" => self.omega0_hz = parse_num(key, value)?,
            "duration_periods" => self.duration_periods = parse_num(key, value)?,
            "sample_rate_factor" => self.sample_rate_factor = parse_num(key, value)?,
            "n_boot" => self.n_boot = parse_num(key, value)?,
            "ci_level" => self.ci_level = parse_num(key, value)?,
            "seed" => self.seed = parse_num(key, value)?,
            "out_dir" => self.out_dir = PathBuf::from(value),
            other => {
                return Err(Error::Config(format!(
                    "unknown key {other:?} (expected one of {})",
                    KEYS.join(", ")
                )))
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.num_states < 1 {
            return fail("num_states must be at least 1".into());
        }
        if self.reps_per_state < 1 {
            return fail("reps_per_state must be at least 1".into());
        }
        if !(self.sigma2 >= 0.0 && self.sigma2.is_finite()) {
            return fail(format!(
                "sigma2 must be finite and non-negative, got {}",
                self.sigma2
            ));
        }
        if !(self.coeff_sigma >= 0.0 && self.coeff_sigma.is_finite()) {
            return fail(format!(
                "coeff_sigma must be finite and non-negative, got {}",
                self.coeff_sigma
            ));
        }
        if let Some((label, m)) = self
            .gate_noise_multipliers
            .iter()
            .find(|(_, m)| m.is_nan() || **m < 0.0)
        {
            return fail(format!(
                "noise multiplier for {label} must be non-negative, got {m}"
            ));
        }
        if matches!(self.gate_label, GateLabel::Custom(_)) {
            return fail("gate_label must name a built-in gate".into());
        }
        if !(self.ci_level > 0.0 && self.ci_level < 1.0) {
            return fail(format!("ci_level must be in (0, 1), got {}", self.ci_level));
        }
        if self.n_boot < 100 {
            return fail(format!("n_boot must be at least 100, got {}", self.n_boot));
        }
        if self.duration_periods < 1 {
            return fail("duration_periods must be at least 1".into());
        }
        for n in [1, crate::code::N_DATA] {
            self.signal_config(n)
                .map_err(|e| Error::Config(format!("signal parameters: {e}")))?;
        }
        Ok(())
    }

    pub fn signal_config(&self, n_qubits: usize) -> Result<SignalConfig> {
        SignalConfig::from_hz(
            n_qubits,
            self.omega0_hz,
            self.duration_periods,
            self.sample_rate_factor,
        )
    }

    /// Gate-coefficient noise after the per-gate multiplier.
    pub fn effective_coeff_sigma(&self) -> f64 {
        let mult = self
            .gate_noise_multipliers
            .get(&self.gate_label.to_string())
            .copied()
            .unwrap_or(1.0);
        self.coeff_sigma * mult
    }

    /// Window length `T` in seconds.
    pub fn duration(&self) -> f64 {
        self.duration_periods as f64 / self.omega0_hz
    }

    /// Renders the config in the file format accepted by [`parse`](Self::parse).
    pub fn to_config_text(&self) -> String {
        let mults = self
            .gate_noise_multipliers
            .iter()
            .map(|(k, v)| format!("{k}:{v}"))
            .collect::<Vec<_>>()
            .join(",");
        let mode = match self.mode {
            ModeSelection::Encoded => "encoded",
            ModeSelection::Control => "control",
            ModeSelection::Both => "both",
        };
        let method = match self.syndrome_method {
            SyndromeMethod::Projective => "projective",
            SyndromeMethod::Circuit => "circuit",
        };
        format!(
            "gate_label = {}\nmode = {mode}\nnum_states = {}\nreps_per_state = {}\nsigma2 = {}\ncoeff_sigma = {}\n\
             gate_noise_multipliers = {mults}\nnoise_injection = pre_gate:{},post_gate:{}\nsyndrome_method = {method}\n\
             omega0_hz = {}\nduration_periods = {}\nsample_rate_factor = {}\nn_boot = {}\nci_level = {}\nseed = {}\nout_dir = {}\n",
            self.gate_label,
            self.num_states,
            self.reps_per_state,
            self.sigma2,
            self.coeff_sigma,
            self.noise_injection.pre_gate,
            self.noise_injection.post_gate,
            self.omega0_hz,
            self.duration_periods,
            self.sample_rate_factor,
            self.n_boot,
            self.ci_level,
            self.seed,
            self.out_dir.display(),
        )
    }
}
