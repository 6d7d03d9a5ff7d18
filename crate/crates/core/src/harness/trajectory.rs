//! Single Monte Carlo trajectories through the signal pipeline.

use serde::{Serialize, Serializer};

use super::config::{ExperimentConfig, Mode, SyndromeMethod};
use crate::code::{self, FiveQubitCode, Syndrome, N_DATA};
use crate::error::{Error, Result};
use crate::gates::{
    apply_noisy_gate, logical_action, transversal_operator, LogicalAction, NoisyGateModel,
    OneQubitGate,
};
use crate::metrics::{log_fidelity, state_fidelity};
use crate::qubit::{PauliString, PureState};
use crate::rng::SimRng;
use crate::signal::{add_awgn_in_place, ToneBank};

/// One trajectory's outcome; a row of `records.csv`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub mode: Mode,
    pub gate: String,
    pub state_index: usize,
    pub rep_index: usize,
    #[serde(serialize_with = "serialize_syndrome")]
    pub syndrome: Option<Syndrome>,
    pub leakage: f64,
    #[serde(rename = "F")]
    pub fidelity: f64,
    #[serde(rename = "f")]
    pub log_fidelity: f64,
    pub seed_stream: u64,
}

fn serialize_syndrome<S: Serializer>(
    s: &Option<Syndrome>,
    ser: S,
) -> std::result::Result<S::Ok, S::Error> {
    match s {
        Some(s) => ser.collect_str(s),
        None => ser.serialize_str("-"),
    }
}

/// Fidelity, leakage and syndrome of one pass, before bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryOutcome {
    pub syndrome: Option<Syndrome>,
    pub leakage: f64,
    pub fidelity: f64,
}

/// Everything a trajectory needs that does not change between runs.
#[derive(Debug, Clone)]
pub struct TrajectoryEngine {
    sigma2: f64,
    pre_gate: usize,
    post_gate: usize,
    method: SyndromeMethod,
    encoded_bank: ToneBank,
    control_bank: ToneBank,
    gate: OneQubitGate,
    logical: LogicalAction,
    model: NoisyGateModel,
    fault: Option<PauliString>,
}

impl TrajectoryEngine {
    pub fn new(config: &ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let gate = OneQubitGate::from_label(&config.gate_label)?;
        let logical = logical_action(
            &transversal_operator(&gate),
            &FiveQubitCode::get().isometry(),
        )?;
        Ok(Self {
            sigma2: config.sigma2,
            pre_gate: config.noise_injection.pre_gate,
            post_gate: config.noise_injection.post_gate,
            method: config.syndrome_method,
            encoded_bank: ToneBank::new(config.signal_config(N_DATA)?),
            control_bank: ToneBank::new(config.signal_config(1)?),
            gate,
            logical,
            model: NoisyGateModel::new(config.effective_coeff_sigma())?,
            fault: None,
        })
    }

    /// Test hook: a Pauli fault applied to the five data qubits right after
    /// the transversal gate.
    pub fn with_fault(mut self, fault: PauliString) -> Result<Self> {
        if fault.n_qubits() != N_DATA {
            return Err(Error::DimensionMismatch {
                expected: N_DATA,
                actual: fault.n_qubits(),
            });
        }
        self.fault = Some(fault);
        Ok(self)
    }

    pub fn gate(&self) -> &OneQubitGate {
        &self.gate
    }

    /// The logical gate the ideal transversal operator realizes.
    pub fn logical(&self) -> &LogicalAction {
        &self.logical
    }

    /// synthesize -> noise x count -> project and normalize
    fn noisy_channel(
        &self,
        bank: &ToneBank,
        state: &PureState,
        count: usize,
        rng: &mut SimRng,
    ) -> Result<PureState> {
        let mut signal = bank.synthesize(state)?;
        for _ in 0..count {
            add_awgn_in_place(&mut signal, self.sigma2, rng)?;
        }
        Ok(bank.state_from_noisy_signal(&signal)?.0)
    }

    pub fn run_encoded(&self, psi: &PureState, rng: &mut SimRng) -> Result<TrajectoryOutcome> {
        let encoded = code::encode(psi)?;
        let state = self.noisy_channel(&self.encoded_bank, &encoded, self.pre_gate, rng)?;
        let targets: Vec<usize> = (0..N_DATA).collect();
        let mut state = apply_noisy_gate(&state, &self.gate, &self.model, &targets, rng)?;
        if let Some(fault) = &self.fault {
            state = code::apply_pauli(&state, fault)?;
        }
        let state = self.noisy_channel(&self.encoded_bank, &state, self.post_gate, rng)?;
        let (syndrome, post) = match self.method {
            SyndromeMethod::Projective => code::measure_syndrome(&state, rng)?,
            SyndromeMethod::Circuit => code::measure_syndrome_circuit(&state, rng)?,
        };
        let corrected = code::correct(&post, syndrome)?;
        let (logical_out, leakage) = code::decode(&corrected)?;
        let ideal = self.logical.apply(psi)?;
        Ok(TrajectoryOutcome {
            syndrome: Some(syndrome),
            leakage,
            fidelity: state_fidelity(&ideal, &logical_out)?,
        })
    }

    pub fn run_control(&self, psi: &PureState, rng: &mut SimRng) -> Result<TrajectoryOutcome> {
        let state = self.noisy_channel(&self.control_bank, psi, self.pre_gate, rng)?;
        let state = apply_noisy_gate(&state, &self.gate, &self.model, &[0], rng)?;
        let state = self.noisy_channel(&self.control_bank, &state, self.post_gate, rng)?;
        let ideal = psi.apply_unitary(self.gate.matrix(), &[0])?;
        Ok(TrajectoryOutcome {
            syndrome: None,
            leakage: 0.0,
            fidelity: state_fidelity(&ideal, &state)?,
        })
    }

    pub fn run(&self, mode: Mode, psi: &PureState, rng: &mut SimRng) -> Result<TrajectoryOutcome> {
        match mode {
            Mode::Encoded => self.run_encoded(psi, rng),
            Mode::Control => self.run_control(psi, rng),
        }
    }

    pub fn record(
        &self,
        mode: Mode,
        psi: &PureState,
        state_index: usize,
        rep_index: usize,
        seed_stream: u64,
    ) -> Result<RunRecord> {
        let mut rng = crate::rng::rng_from_seed(seed_stream);
        let out = self.run(mode, psi, &mut rng)?;
        Ok(RunRecord {
            mode,
            gate: self.gate.label().to_string(),
            state_index,
            rep_index,
            syndrome: out.syndrome,
            leakage: out.leakage,
            fidelity: out.fidelity,
            log_fidelity: log_fidelity(out.fidelity)?,
            seed_stream,
        })
    }
}

/// Encode, noisy transversal gate, syndrome, correct, decode.
pub fn run_encoded_trajectory(
    psi: &PureState,
    config: &ExperimentConfig,
    rng: &mut SimRng,
) -> Result<TrajectoryOutcome> {
    TrajectoryEngine::new(config)?.run_encoded(psi, rng)
}

/// The same noisy gate on the bare one-qubit signal.
pub fn run_control_trajectory(
    psi: &PureState,
    config: &ExperimentConfig,
    rng: &mut SimRng,
) -> Result<TrajectoryOutcome> {
    TrajectoryEngine::new(config)?.run_control(psi, rng)
}
