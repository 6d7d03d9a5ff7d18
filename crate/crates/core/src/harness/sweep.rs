//! One-parameter sweeps and log-log error-scaling fits.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use super::config::{ExperimentConfig, Mode};
use super::experiment::{prepare_out_dir, simulate, ModeSummary};
use crate::error::{Error, Result};
use crate::par::Execution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    Sigma2,
    CoeffSigma,
}

impl SweepParam {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepParam::Sigma2 => "sigma2",
            SweepParam::CoeffSigma => "coeff_sigma",
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sigma2" => Ok(SweepParam::Sigma2),
            "coeff_sigma" => Ok(SweepParam::CoeffSigma),
            other => Err(Error::Config(format!(
                "sweep parameter must be sigma2 or coeff_sigma, got {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepPoint {
    pub value: f64,
    pub mode: Mode,
    /// Equivalent depolarizing probability of the swept knob for this mode.
    pub equivalent_p: f64,
    pub median_f: Option<f64>,
    #[serde(rename = "median_F")]
    pub median_fidelity: Option<f64>,
    pub ci_f_lo: Option<f64>,
    pub ci_f_hi: Option<f64>,
    pub mean_infidelity: Option<f64>,
    pub n: usize,
    pub failed_runs: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub param: SweepParam,
    pub values: Vec<f64>,
    pub points: Vec<SweepPoint>,
    /// Least-squares slope of log mean infidelity against log equivalent p;
    /// `None` when fewer than two points have positive p and infidelity.
    pub slopes: Vec<(Mode, Option<f64>)>,
}

impl SweepReport {
    pub fn slope(&self, mode: Mode) -> Option<f64> {
        self.slopes
            .iter()
            .find(|(m, _)| *m == mode)
            .and_then(|(_, s)| *s)
    }

    pub fn points_for(&self, mode: Mode) -> impl Iterator<Item = &SweepPoint> {
        self.points.iter().filter(move |p| p.mode == mode)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for p in &self.points {
            w.serialize(p)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Slope of the least-squares line through `(ln x, ln y)` over the
/// points where both are positive.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if logs.len() < 2 {
        return None;
    }
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx <= 1e-300 {
        return None;
    }
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

fn equivalent_p(param: SweepParam, summary: &ModeSummary) -> f64 {
    match param {
        SweepParam::Sigma2 => summary.awgn_p_per_injection,
        SweepParam::CoeffSigma => summary.coeff_p,
    }
}

/// Runs one experiment per value (in memory) and fits the error scaling.
pub fn run_sweep(
    config: &ExperimentConfig,
    param: SweepParam,
    values: &[f64],
    exec: Execution,
) -> Result<SweepReport> {
    if values.is_empty() {
        return Err(Error::Config("sweep needs at least one value".into()));
    }
    let mut points = Vec::new();
    for &value in values {
        let mut cfg = config.clone();
        match param {
            SweepParam::Sigma2 => cfg.sigma2 = value,
            SweepParam::CoeffSigma => cfg.coeff_sigma = value,
        }
        cfg.validate()?;
        let (_, report) = simulate(&cfg, exec)?;
        for (mode, summary) in &report.modes {
            let stats = summary.stats.as_ref();
            points.push(SweepPoint {
                value,
                mode: *mode,
                equivalent_p: equivalent_p(param, summary),
                median_f: stats.map(|s| s.median_f),
                median_fidelity: stats.map(|s| s.median_fidelity),
                ci_f_lo: stats.map(|s| s.ci_f_lo),
                ci_f_hi: stats.map(|s| s.ci_f_hi),
                mean_infidelity: summary.mean_infidelity,
                n: stats.map_or(0, |s| s.n_samples),
                failed_runs: summary.failed_runs,
            });
        }
    }
    let slopes = config
        .mode
        .modes()
        .into_iter()
        .map(|mode| {
            let xy: Vec<(f64, f64)> = points
                .iter()
                .filter(|p| p.mode == mode)
                .filter_map(|p| p.mean_infidelity.map(|m| (p.equivalent_p, m)))
                .collect();
            (mode, loglog_slope(&xy))
        })
        .collect();
    Ok(SweepReport {
        param,
        values: values.to_vec(),
        points,
        slopes,
    })
}

/// Writes `sweep.json` and `sweep.csv` into `dir`.
pub fn write_sweep(dir: &Path, report: &SweepReport) -> Result<()> {
    let mut json = BufWriter::new(File::create(dir.join("sweep.json"))?);
    serde_json::to_writer_pretty(&mut json, report)?;
    writeln!(json)?;
    json.flush()?;
    report.write_csv(BufWriter::new(File::create(dir.join("sweep.csv"))?))
}

/// Checks the output directory first, then sweeps and writes the report.
pub fn run_sweep_to_dir(
    config: &ExperimentConfig,
    param: SweepParam,
    values: &[f64],
    exec: Execution,
) -> Result<SweepReport> {
    config.validate()?;
    prepare_out_dir(&config.out_dir)?;
    let report = run_sweep(config, param, values, exec)?;
    write_sweep(&config.out_dir, &report)?;
    Ok(report)
}
