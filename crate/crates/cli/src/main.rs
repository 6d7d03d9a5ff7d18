use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qedsim::channels::estimate_awgn_channel;
use qedsim::code::{correction_label, FiveQubitCode};
use qedsim::harness::experiment::run_experiment;
use qedsim::harness::sweep::{run_sweep_to_dir, SweepParam};
use qedsim::harness::{validate, ExperimentConfig};
use qedsim::par::Execution;
use qedsim::signal::{SignalConfig, ToneBank};
use qedsim::Error;

/// Five-qubit code experiments on a simulated analog qubit emulator.
#[derive(Parser)]
#[command(name = "qedsim", version)]
struct Cli {
    /// Worker threads; 1 runs sequentially. Defaults to all cores.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write records.csv, summary.json and dist_<mode>.csv.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Repeat an experiment over values of one noise knob.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// sigma2 or coeff_sigma
        #[arg(long)]
        param: String,
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        values: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the invariants of every module.
    Validate {
        #[arg(long)]
        json: bool,
    },
    /// Compare the Monte Carlo white-noise channel with its depolarizing prediction.
    ChannelEstimate {
        #[arg(long)]
        n_qubits: usize,
        #[arg(long)]
        sigma2: f64,
        #[arg(long)]
        runs: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Print the syndrome lookup table and check it against the generators.
    SyndromeTable,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) | Error::Csv(_) | Error::Json(_) => 3,
        Error::Config(_) | Error::InvalidArgument(_) | Error::DimensionMismatch { .. } => 2,
        _ => 1,
    }
}

fn load_config(
    path: &PathBuf,
    seed: Option<u64>,
    out: Option<PathBuf>,
) -> qedsim::Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)?;
    let mut cfg = ExperimentConfig::parse(&text)?;
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    if let Some(out) = out {
        cfg.out_dir = out;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> qedsim::Result<u8> {
    let exec = Execution::from_threads(cli.threads);
    match cli.command {
        Command::Run { config, seed, out } => {
            let cfg = load_config(&config, seed, out)?;
            let (records, report) = run_experiment(&cfg, exec)?;
            println!(
                "{} records written to {}",
                records.len(),
                cfg.out_dir.display()
            );
            for (mode, m) in &report.modes {
                match &m.stats {
                    Some(s) => println!(
                        "{mode}: median F {:.6} [{:.6}, {:.6}], median f {:.3} [{:.3}, {:.3}], tail f<1 {:.4}, failed {}",
                        s.median_fidelity, s.ci_fidelity_lo, s.ci_fidelity_hi, s.median_f, s.ci_f_lo, s.ci_f_hi, m.tail_fraction_f_lt_1, m.failed_runs
                    ),
                    None => println!("{mode}: no successful runs, failed {}", m.failed_runs),
                }
            }
            Ok(0)
        }
        Command::Sweep {
            config,
            param,
            values,
            out,
        } => {
            let param: SweepParam = param.parse()?;
            let cfg = load_config(&config, None, out)?;
            let report = run_sweep_to_dir(&cfg, param, &values, exec)?;
            for p in &report.points {
                println!(
                    "{}={} {}: p_eq {:.3e}, median f {}, mean infidelity {}",
                    param,
                    p.value,
                    p.mode,
                    p.equivalent_p,
                    p.median_f.map_or("-".into(), |v| format!("{v:.3}")),
                    p.mean_infidelity.map_or("-".into(), |v| format!("{v:.3e}"))
                );
            }
            for (mode, slope) in &report.slopes {
                match slope {
                    Some(s) => println!("{mode} log-log slope {s:.3}"),
                    None => println!("{mode} log-log slope undefined"),
                }
            }
            Ok(0)
        }
        Command::Validate { json } => {
            let report = validate();
            if json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                for c in &report.checks {
                    println!("{} {}", if c.passed { "ok  " } else { "FAIL" }, c.name);
                }
            }
            Ok(if report.passed { 0 } else { 1 })
        }
        Command::ChannelEstimate {
            n_qubits,
            sigma2,
            runs,
            seed,
            json,
        } => {
            let bank = ToneBank::new(SignalConfig::with_defaults(n_qubits, 1000.0)?);
            let est = estimate_awgn_channel(&bank, sigma2, runs, seed, exec)?;
            if json {
                println!("{}", serde_json::to_string(&est)?);
            } else {
                println!("predicted p     {:.6}", est.predicted_p);
                println!("estimated p     {:.6}", est.estimated_p);
                println!("trace distance  {:.6}", est.trace_distance);
                println!("runs {} seed {}", est.runs, est.seed);
            }
            Ok(0)
        }
        Command::SyndromeTable => {
            let code = FiveQubitCode::get();
            let mut bad = 0;
            for (s, fix) in code.table().rows() {
                let ok = code.syndrome_of(fix) == s;
                bad += usize::from(!ok);
                println!(
                    "{s}  {}{}",
                    correction_label(fix),
                    if ok { "" } else { "  MISMATCH" }
                );
            }
            Ok(if bad == 0 { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
