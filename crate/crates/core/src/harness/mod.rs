//! Experiment orchestration: configs, trajectories, runs, sweeps, validation.

pub mod config;
pub mod experiment;
pub mod sweep;
pub mod trajectory;
pub mod validate;

pub use config::{ExperimentConfig, Mode, ModeSelection, NoiseInjection, SyndromeMethod};
pub use experiment::{run_experiment, simulate, ExperimentReport, ModeSummary};
pub use sweep::{run_sweep, SweepParam, SweepReport};
pub use trajectory::{
    run_control_trajectory, run_encoded_trajectory, RunRecord, TrajectoryEngine, TrajectoryOutcome,
};
pub use validate::{validate, validate_with_table, ValidationReport};
