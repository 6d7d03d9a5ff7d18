//! Full experiments: Haar-random inputs, repeated trajectories per mode,
//! summary statistics and output files.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use serde::Serialize;

use super::config::{ExperimentConfig, Mode};
use super::trajectory::{RunRecord, TrajectoryEngine};
use crate::channels::awgn_equivalent_p;
use crate::code::{Syndrome, N_DATA};
use crate::error::Result;
use crate::gates::coeff_equivalent_p;
use crate::metrics::{empirical_distribution, is_capped, summarize, SummaryStats};
use crate::par::{map_indices, Execution};
use crate::qubit::{haar_random_state, PureState};
use crate::rng::{derive_seed, substream};

const STATE_TAG: u64 = 0x5354_4154;
const BOOT_TAG: u64 = 0x424F_4F54;
const HIST_BINS: usize = 40;

#[derive(Debug, Clone, Serialize)]
pub struct ModeSummary {
    #[serde(flatten)]
    pub stats: Option<SummaryStats>,
    pub tail_fraction_f_lt_1: f64,
    pub cap_count: usize,
    pub failed_runs: usize,
    /// Depolarizing probability of one white-noise injection on this mode's register.
    pub awgn_p_per_injection: f64,
    pub coeff_p: f64,
    pub mean_infidelity: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub modes: BTreeMap<Mode, ModeSummary>,
    /// Encoded-mode counts for all 16 syndromes, keyed `m0m1m2m3`.
    pub syndrome_frequencies: BTreeMap<String, usize>,
    pub wall_time_s: f64,
}

impl ExperimentReport {
    pub fn mode(&self, mode: Mode) -> Option<&ModeSummary> {
        self.modes.get(&mode)
    }
}

/// Haar-random logical inputs; shared by both modes.
pub fn input_states(config: &ExperimentConfig) -> Result<Vec<PureState>> {
    (0..config.num_states)
        .map(|i| haar_random_state(1, &mut substream(config.seed, &[STATE_TAG, i as u64])))
        .collect()
}

/// Seed of the trajectory at `(mode, state, rep)`.
pub fn trajectory_seed(master: u64, mode: Mode, state_index: usize, rep_index: usize) -> u64 {
    derive_seed(master, &[mode.tag(), state_index as u64, rep_index as u64])
}

/// Runs every trajectory and aggregates, without touching the file system.
/// Records come back sorted by mode, state and rep; degenerate trajectories
/// are dropped and counted in the report.
pub fn simulate(
    config: &ExperimentConfig,
    exec: Execution,
) -> Result<(Vec<RunRecord>, ExperimentReport)> {
    let start = Instant::now();
    let engine = TrajectoryEngine::new(config)?;
    let states = input_states(config)?;
    let reps = config.reps_per_state;
    let mut records = Vec::new();
    let mut modes = BTreeMap::new();
    for mode in config.mode.modes() {
        let outcomes = map_indices(config.total_runs(), exec, |k| {
            let (s, r) = (k / reps, k % reps);
            engine.record(
                mode,
                &states[s],
                s,
                r,
                trajectory_seed(config.seed, mode, s, r),
            )
        });
        let mut failed = 0;
        let mut mode_records = Vec::with_capacity(outcomes.len());
        for out in outcomes {
            match out {
                Ok(rec) => mode_records.push(rec),
                Err(e) if e.is_degenerate() => failed += 1,
                Err(e) => return Err(e),
            }
        }
        modes.insert(
            mode,
            summarize_mode(config, mode, &mode_records, failed, exec)?,
        );
        records.extend(mode_records);
    }
    let mut syndrome_frequencies: BTreeMap<String, usize> =
        Syndrome::all().map(|s| (s.to_string(), 0)).collect();
    for rec in &records {
        if let Some(s) = rec.syndrome {
            *syndrome_frequencies.entry(s.to_string()).or_default() += 1;
        }
    }
    let report = ExperimentReport {
        config: config.clone(),
        modes,
        syndrome_frequencies,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    Ok((records, report))
}

fn summarize_mode(
    config: &ExperimentConfig,
    mode: Mode,
    records: &[RunRecord],
    failed_runs: usize,
    exec: Execution,
) -> Result<ModeSummary> {
    let n_qubits = match mode {
        Mode::Encoded => N_DATA,
        Mode::Control => 1,
    };
    let fids: Vec<f64> = records.iter().map(|r| r.fidelity).collect();
    let n = fids.len();
    let stats = if n == 0 {
        None
    } else {
        let seed = derive_seed(config.seed, &[BOOT_TAG, mode.tag()]);
        Some(summarize(
            &fids,
            config.n_boot,
            config.ci_level,
            seed,
            exec,
        )?)
    };
    let tail = records.iter().filter(|r| r.log_fidelity < 1.0).count();
    Ok(ModeSummary {
        stats,
        tail_fraction_f_lt_1: if n == 0 { 0.0 } else { tail as f64 / n as f64 },
        cap_count: fids.iter().filter(|&&f| is_capped(f)).count(),
        failed_runs,
        awgn_p_per_injection: awgn_equivalent_p(config.sigma2, config.duration(), n_qubits)?,
        coeff_p: coeff_equivalent_p(config.effective_coeff_sigma()),
        mean_infidelity: (n > 0).then(|| fids.iter().map(|f| 1.0 - f).sum::<f64>() / n as f64),
    })
}

/// Creates `dir` and checks it accepts files.
pub fn prepare_out_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    let probe = dir.join(".qedsim-write-probe");
    File::create(&probe)?;
    fs::remove_file(&probe)?;
    Ok(())
}

pub fn write_records<W: Write>(records: &[RunRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for rec in records {
        w.serialize(rec)?;
    }
    if records.is_empty() {
        w.write_record([
            "mode",
            "gate",
            "state_index",
            "rep_index",
            "syndrome",
            "leakage",
            "F",
            "f",
            "seed_stream",
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `records.csv`, `summary.json` and one `dist_<mode>.csv` per mode.
pub fn write_outputs(dir: &Path, records: &[RunRecord], report: &ExperimentReport) -> Result<()> {
    write_records(
        records,
        BufWriter::new(File::create(dir.join("records.csv"))?),
    )?;
    let mut summary = BufWriter::new(File::create(dir.join("summary.json"))?);
    serde_json::to_writer_pretty(&mut summary, report)?;
    writeln!(summary)?;
    summary.flush()?;
    for mode in report.modes.keys() {
        let f: Vec<f64> = records
            .iter()
            .filter(|r| r.mode == *mode)
            .map(|r| r.log_fidelity)
            .collect();
        if f.is_empty() {
            continue;
        }
        let dist = empirical_distribution(&f, HIST_BINS)?;
        let mut out = BufWriter::new(File::create(dir.join(format!("dist_{mode}.csv")))?);
        dist.write_csv(
            &mut out,
            &format!("{mode} log-fidelity, gate {}", report.config.gate_label),
        )?;
        out.flush()?;
    }
    Ok(())
}

/// Checks `config.out_dir`, simulates, and writes the output files.
pub fn run_experiment(
    config: &ExperimentConfig,
    exec: Execution,
) -> Result<(Vec<RunRecord>, ExperimentReport)> {
    config.validate()?;
    prepare_out_dir(&config.out_dir)?;
    let (records, report) = simulate(config, exec)?;
    write_outputs(&config.out_dir, &records, &report)?;
    Ok((records, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::ModeSelection;

    fn small() -> ExperimentConfig {
        ExperimentConfig {
            num_states: 2,
            reps_per_state: 3,
            n_boot: 200,
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn counts_records_per_mode() {
        let (records, report) = simulate(&small(), Execution::Sequential).unwrap();
        assert_eq!(records.len(), 12);
        assert_eq!(
            records.iter().filter(|r| r.mode == Mode::Encoded).count(),
            6
        );
        assert_eq!(report.syndrome_frequencies.len(), 16);
        assert_eq!(report.syndrome_frequencies.values().sum::<usize>(), 6);
    }

    #[test]
    fn zero_noise_is_perfect() {
        let (_, report) = simulate(&small(), Execution::Sequential).unwrap();
        for m in report.modes.values() {
            let s = m.stats.as_ref().unwrap();
            assert!((s.median_fidelity - 1.0).abs() < 1e-9);
            assert_eq!(m.tail_fraction_f_lt_1, 0.0);
            assert_eq!(m.failed_runs, 0);
        }
    }

    #[test]
    fn single_mode_selection() {
        let cfg = ExperimentConfig {
            mode: ModeSelection::Control,
            ..small()
        };
        let (records, report) = simulate(&cfg, Execution::Sequential).unwrap();
        assert_eq!(records.len(), 6);
        assert!(report.mode(Mode::Encoded).is_none());
        assert_eq!(report.syndrome_frequencies.values().sum::<usize>(), 0);
    }

    #[test]
    fn csv_header_matches() {
        let (records, _) = simulate(&small(), Execution::Sequential).unwrap();
        let mut buf = Vec::new();
        write_records(&records, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(
            "mode,gate,state_index,rep_index,syndrome,leakage,F,f,seed_stream\nencoded,Z,0,0,0000,"
        ));
        assert!(text.contains("\ncontrol,Z,1,2,-,0.0,"));
    }
}
