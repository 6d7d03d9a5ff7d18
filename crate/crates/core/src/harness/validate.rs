//! Self-check of every module's invariants, reported as pass/fail per check.

use serde::Serialize;
use serde_json::{json, Value};

use crate::channels::estimate_awgn_channel;
use crate::code::{
    self, correct_with, correction_label, encode, measure_syndrome, measure_syndrome_circuit,
    FiveQubitCode, SyndromeTable, N_DATA,
};
use crate::error::Result;
use crate::gates::{logical_action, transversal_operator, GateLabel, OneQubitGate};
use crate::metrics::{log_fidelity, state_fidelity};
use crate::par::Execution;
use crate::qubit::{haar_random_state, inner_product, PureState};
use crate::rng::{rng_from_seed, substream};
use crate::signal::{projected_noise_variance, SignalConfig, ToneBank};
use crate::Complex64;

const SEED: u64 = 0x7661_6C69;
const CHANNEL_RUNS: usize = 20_000;
const VARIANCE_DRAWS: usize = 20_000;

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failed(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

fn result(name: &str, outcome: Result<(bool, Value)>) -> CheckResult {
    match outcome {
        Ok((passed, detail)) => CheckResult {
            name: name.to_string(),
            passed,
            detail,
        },
        Err(e) => CheckResult {
            name: name.to_string(),
            passed: false,
            detail: json!({ "error": e.to_string() }),
        },
    }
}

pub fn validate() -> ValidationReport {
    validate_with_table(FiveQubitCode::get().table())
}

/// Runs all checks, with `table` standing in for the correction lookup.
pub fn validate_with_table(table: &SyndromeTable) -> ValidationReport {
    let checks = vec![
        result("syndrome_table", check_syndrome_table(table)),
        result("codewords", check_codewords()),
        result("generators", check_generators()),
        result("transversality", check_transversality()),
        result("awgn_depolarizing", check_awgn_channel()),
        result("noise_projection_variance", check_noise_variance()),
        result("syndrome_circuit", check_circuit_agreement()),
        result("log_fidelity", check_log_fidelity()),
    ];
    ValidationReport {
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}

fn check_syndrome_table(table: &SyndromeTable) -> Result<(bool, Value)> {
    let code = FiveQubitCode::get();
    let mut rows = Vec::new();
    let mut ok = true;
    for (s, fix) in table.rows() {
        let row_ok = code.syndrome_of(fix) == s && fix.weight() <= 1;
        ok &= row_ok;
        rows.push(
            json!({ "syndrome": s.to_string(), "correction": correction_label(fix), "ok": row_ok }),
        );
    }
    let mut rng = substream(SEED, &[1]);
    let mut worst = 1.0f64;
    for error in code::single_qubit_errors() {
        for _ in 0..4 {
            let psi = haar_random_state(1, &mut rng)?;
            let hit = code::apply_pauli(&encode(&psi)?, &error)?;
            let (s, post) = measure_syndrome(&hit, &mut rng)?;
            let (back, _) = code::decode(&correct_with(&post, s, table)?)?;
            worst = worst.min(state_fidelity(&psi, &back)?);
        }
    }
    ok &= worst >= 1.0 - 1e-9;
    Ok((
        ok,
        json!({ "rows": rows, "worst_recovery_fidelity": worst }),
    ))
}

fn check_codewords() -> Result<(bool, Value)> {
    let code = FiveQubitCode::get();
    let (zero, one) = code.codewords();
    let overlap = inner_product(zero, one)?.norm();
    let norms = [(zero.norm_sqr() - 1.0).abs(), (one.norm_sqr() - 1.0).abs()];
    let mut eig = 0.0f64;
    for g in code.generators() {
        for w in [zero, one] {
            let moved = g.apply(w.amplitudes());
            let d = moved
                .iter()
                .zip(w.amplitudes())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            eig = eig.max(d);
        }
    }
    let a0 = zero.amplitude(0);
    let a0_err = (a0 - Complex64::new(0.25, 0.0)).norm();
    let ok =
        overlap <= 1e-10 && norms.iter().all(|&n| n <= 1e-10) && eig <= 1e-10 && a0_err <= 1e-12;
    Ok((
        ok,
        json!({
            "overlap": overlap,
            "norm_error": norms[0].max(norms[1]),
            "max_eigen_residual": eig,
            "zero_amplitude_00000": [a0.re, a0.im],
        }),
    ))
}

fn check_generators() -> Result<(bool, Value)> {
    let code = FiveQubitCode::get();
    let gens = code.generators();
    let commute = gens.iter().all(|a| gens.iter().all(|b| a.commutes_with(b)));
    let weights: Vec<usize> = gens.iter().map(|g| g.weight()).collect();
    let hermitian = (0..gens.len()).all(|i| {
        let m = code.generator_operator(i);
        m.is_hermitian(1e-12) && m.is_unitary(1e-12)
    });
    let text: Vec<String> = gens.iter().map(|g| g.to_string()).collect();
    Ok((
        commute && hermitian && weights.iter().all(|&w| w == 4),
        json!({ "generators": text, "weights": weights, "commuting": commute, "hermitian_unitary": hermitian }),
    ))
}

fn matrix_json(m: &crate::qubit::CMatrix) -> Value {
    let rows: Vec<Vec<[f64; 2]>> = (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| [m[(i, j)].re, m[(i, j)].im])
                .collect()
        })
        .collect();
    json!(rows)
}

fn check_transversality() -> Result<(bool, Value)> {
    let v = FiveQubitCode::get().isometry();
    let mut labels = vec![GateLabel::X, GateLabel::Z, GateLabel::SH];
    labels.extend(GateLabel::k_family());
    let mut rng = substream(SEED, &[2]);
    let mut ok = true;
    let mut gates = Vec::new();
    for label in labels {
        let g = OneQubitGate::from_label(&label)?;
        let phys = transversal_operator(&g);
        let l = logical_action(&phys, &v)?;
        let mut worst = 1.0f64;
        for _ in 0..10 {
            let psi = haar_random_state(1, &mut rng)?;
            let want = encode(&l.apply(&psi)?)?;
            let got =
                PureState::from_unnormalized(N_DATA, phys.apply(encode(&psi)?.amplitudes())?)?;
            worst = worst.min(state_fidelity(&want, &got)?);
        }
        let overlap = l.projective_overlap(g.matrix());
        let gate_ok = l.codespace_leak <= 1e-10 && worst >= 1.0 - 1e-9;
        ok &= gate_ok;
        gates.push(json!({
            "gate": label.to_string(),
            "codespace_leak": l.codespace_leak,
            "worst_fidelity": worst,
            "logical_action": matrix_json(&l.matrix),
            "overlap_with_gate": overlap,
            "matches_gate": (overlap - 1.0).abs() < 1e-9,
        }));
    }
    Ok((ok, json!({ "gates": gates })))
}

fn check_awgn_channel() -> Result<(bool, Value)> {
    let mut ok = true;
    let mut cases = Vec::new();
    for n in [1, 2] {
        let cfg = SignalConfig::with_defaults(n, 1000.0)?;
        let bank = ToneBank::new(cfg);
        for ratio in [0.01, 0.05] {
            let est = estimate_awgn_channel(
                &bank,
                ratio * cfg.duration(),
                CHANNEL_RUNS,
                SEED + n as u64,
                Execution::Parallel,
            )?;
            let case_ok =
                est.trace_distance <= 0.02 && (est.estimated_p - est.predicted_p).abs() <= 0.01;
            ok &= case_ok;
            cases.push(json!(est));
        }
    }
    Ok((ok, json!({ "runs": CHANNEL_RUNS, "cases": cases })))
}

fn check_noise_variance() -> Result<(bool, Value)> {
    let cfg = SignalConfig::with_defaults(2, 1000.0)?;
    let bank = ToneBank::new(cfg);
    let sigma2 = 0.02 * cfg.duration();
    let want = sigma2 / cfg.duration();
    let mut rng = substream(SEED, &[3]);
    let mut ok = true;
    let mut rows = Vec::new();
    for x in [0, 1, 3] {
        let var = projected_noise_variance(&bank, x, sigma2, VARIANCE_DRAWS, &mut rng)?;
        let rel = (var / want - 1.0).abs();
        ok &= rel <= 0.05;
        rows.push(
            json!({ "basis_index": x, "variance": var, "expected": want, "relative_error": rel }),
        );
    }
    Ok((ok, json!({ "draws": VARIANCE_DRAWS, "indices": rows })))
}

fn check_circuit_agreement() -> Result<(bool, Value)> {
    let mut rng = substream(SEED, &[4]);
    let mut agree = 0;
    let mut total = 0;
    for error in code::single_qubit_errors() {
        let psi = haar_random_state(1, &mut rng)?;
        let hit = code::apply_pauli(&encode(&psi)?, &error)?;
        let seed = total as u64;
        let (a, _) = measure_syndrome(&hit, &mut rng_from_seed(seed))?;
        let (b, _) = measure_syndrome_circuit(&hit, &mut rng_from_seed(seed))?;
        agree += usize::from(a == b && a == FiveQubitCode::get().syndrome_of(&error));
        total += 1;
    }
    Ok((agree == total, json!({ "agreeing": agree, "total": total })))
}

fn check_log_fidelity() -> Result<(bool, Value)> {
    let a = log_fidelity(0.99463)?;
    let b = log_fidelity(0.9999764)?;
    let ok = (a - 2.270).abs() <= 0.001 && (b - 4.627).abs() <= 0.002 && log_fidelity(1.0)? == 15.0;
    Ok((ok, json!({ "f(0.99463)": a, "f(0.9999764)": b })))
}
