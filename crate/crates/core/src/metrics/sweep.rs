//! Grid sweeps of the Bell-state preparation.
//!
//! Cells run on a rayon pool and are gathered by index, so the output order
//! and every number in it are independent of the worker count.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::analytic_fidelity;
use crate::constants::TWO_PI;
use crate::error::{Error, Result};
use crate::evolve::Backend;
use crate::model::PhysicalParams;
use crate::protocol::{bell_prep_with, cz_schedule};
use crate::qops::{fock_cutoff, HilbertSpace};

pub const CSV_HEADER: &str = "g_over_2pi_hz,q_factor,temp_k,f_bell,f_analytic,f_gamma";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepKind {
    Gq,
    Temperature,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepAxis {
    pub name: String,
    pub values: Vec<f64>,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SweepOptions {
    /// Worker threads; `None` uses rayon's default.
    pub workers: Option<usize>,
    pub ideal_pulses: bool,
    pub backend: Backend,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self { workers: None, ideal_pulses: true, backend: Backend::Auto }
    }
}

/// One simulated grid point. `params` is everything needed to rerun it.
#[derive(Clone, Debug, Serialize)]
pub struct SweepCell {
    pub index: usize,
    pub g_over_2pi_hz: f64,
    pub q_factor: f64,
    pub temp_k: f64,
    pub f_bell: Option<f64>,
    pub f_analytic: Option<f64>,
    pub f_gamma: Option<f64>,
    pub nmax: usize,
    pub wall_time_s: f64,
    pub error: Option<String>,
    pub params: PhysicalParams,
}

/// Simulate a single parameter set. Failures are recorded, not returned.
pub fn evaluate_cell(index: usize, params: &PhysicalParams, opts: &SweepOptions) -> SweepCell {
    let start = Instant::now();
    let outcome = bell_prep_with(params, opts.ideal_pulses, opts.backend);
    let (f_bell, f_gamma, error) = match outcome {
        Ok(res) => (Some(res.fidelity), Some(res.cavity_prep_fidelity), None),
        Err(e) => (None, None, Some(e.to_string())),
    };
    SweepCell {
        index,
        g_over_2pi_hz: params.g / TWO_PI,
        q_factor: params.q_factor,
        temp_k: params.temperature,
        f_bell,
        f_analytic: analytic_fidelity(params).ok(),
        f_gamma,
        nmax: fock_cutoff(params.nbar()),
        wall_time_s: start.elapsed().as_secs_f64(),
        error,
        params: params.clone(),
    }
}

impl SweepCell {
    pub fn rerun(&self, opts: &SweepOptions) -> SweepCell {
        evaluate_cell(self.index, &self.params, opts)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepResult {
    pub kind: SweepKind,
    /// Row-major: the last axis varies fastest.
    pub axes: Vec<SweepAxis>,
    pub cells: Vec<SweepCell>,
    pub base: PhysicalParams,
    pub options: SweepOptions,
    pub schedule: Vec<String>,
    pub timestamp_unix_s: u64,
    pub total_wall_time_s: f64,
}

fn csv_field(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_finite() => format!("{x:.11e}"),
        Some(x) if x.is_infinite() => if x > 0.0 { "inf" } else { "-inf" }.to_string(),
        _ => "nan".to_string(),
    }
}

impl SweepResult {
    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.values.len()).collect()
    }

    pub fn failures(&self) -> impl Iterator<Item = &SweepCell> {
        self.cells.iter().filter(|c| c.error.is_some())
    }

    /// One row per cell in index order; wall time is kept out so reruns are
    /// byte-identical.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for c in &self.cells {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                csv_field(Some(c.g_over_2pi_hz)),
                csv_field(Some(c.q_factor)),
                csv_field(Some(c.temp_k)),
                csv_field(c.f_bell),
                csv_field(c.f_analytic),
                csv_field(c.f_gamma),
            );
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Numerical(format!("serializing sweep: {e}")))
    }

    /// Write `<stem>.csv` and `<stem>.json` into `dir`, creating it if needed.
    pub fn write(&self, dir: &Path, stem: &str) -> Result<(PathBuf, PathBuf)> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let csv = dir.join(format!("{stem}.csv"));
        let json = dir.join(format!("{stem}.json"));
        fs::write(&csv, self.to_csv()).map_err(|e| Error::io(&csv, e))?;
        fs::write(&json, self.to_json()?).map_err(|e| Error::io(&json, e))?;
        Ok((csv, json))
    }
}

/// `n` points logarithmically spaced from `lo` to `hi` inclusive.
pub fn log_axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

/// `lo, lo + step, …` up to `hi` inclusive (within a hair of round-off).
pub fn linear_axis(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    (0..n).map(|i| lo + step * i as f64).collect()
}

/// Default g/2π (Hz) and Q axes: 13 log points over 0.5–20 MHz and 10⁴–10⁷.
pub fn gq_axes() -> (Vec<f64>, Vec<f64>) {
    (log_axis(0.5e6, 20e6, 13), log_axis(1e4, 1e7, 13))
}

fn check_axis(name: &'static str, values: &[f64], allow_zero: bool) -> Result<()> {
    if values.is_empty() {
        return Err(Error::param(name, "axis is empty"));
    }
    for &v in values {
        let ok = if allow_zero { v >= 0.0 } else { v > 0.0 };
        if !ok || v.is_nan() {
            return Err(Error::param(name, format!("invalid axis value {v}")));
        }
    }
    Ok(())
}

fn run_cells(params: Vec<PhysicalParams>, opts: &SweepOptions) -> Result<Vec<SweepCell>> {
    let work = || params.par_iter().enumerate().map(|(i, p)| evaluate_cell(i, p, opts)).collect::<Vec<_>>();
    match opts.workers {
        None => Ok(work()),
        Some(0) => Err(Error::param("workers", "must be at least 1")),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Numerical(format!("building worker pool: {e}")))?;
            Ok(pool.install(work))
        }
    }
}

fn finish(
    kind: SweepKind,
    axes: Vec<SweepAxis>,
    params: Vec<PhysicalParams>,
    base: &PhysicalParams,
    opts: &SweepOptions,
) -> Result<SweepResult> {
    let start = Instant::now();
    let space = HilbertSpace::atom_cavity(fock_cutoff(base.nbar()))?;
    let schedule = {
        let mut s = vec!["cavity_load".to_string(), "hadamard".to_string()];
        s.extend(cz_schedule(base, opts.ideal_pulses, &space)?.describe());
        s.push("hadamard_return".to_string());
        s
    };
    let cells = run_cells(params, opts)?;
    Ok(SweepResult {
        kind,
        axes,
        cells,
        base: base.clone(),
        options: *opts,
        schedule,
        timestamp_unix_s: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
        total_wall_time_s: start.elapsed().as_secs_f64(),
    })
}

/// Bell-preparation fidelity over a g × Q grid at zero temperature.
/// `g_axis` holds g/2π in Hz.
pub fn sweep_gq(base: &PhysicalParams, g_axis: &[f64], q_axis: &[f64], opts: &SweepOptions) -> Result<SweepResult> {
    check_axis("g_axis", g_axis, false)?;
    check_axis("q_axis", q_axis, false)?;
    let base = PhysicalParams { temperature: 0.0, ..base.clone() };
    base.validate()?;
    let params = g_axis
        .iter()
        .flat_map(|&g| q_axis.iter().map(move |&q| (g, q)))
        .map(|(g, q)| PhysicalParams { g: TWO_PI * g, q_factor: q, ..base.clone() })
        .collect();
    let axes = vec![
        SweepAxis { name: "g_over_2pi_hz".into(), values: g_axis.to_vec() },
        SweepAxis { name: "q_factor".into(), values: q_axis.to_vec() },
    ];
    finish(SweepKind::Gq, axes, params, &base, opts)
}

/// Bell-preparation and cavity-loading fidelity versus temperature (K).
pub fn sweep_temperature(base: &PhysicalParams, t_axis: &[f64], opts: &SweepOptions) -> Result<SweepResult> {
    check_axis("t_axis", t_axis, true)?;
    base.validate()?;
    let params = t_axis.iter().map(|&t| PhysicalParams { temperature: t, ..base.clone() }).collect();
    let axes = vec![SweepAxis { name: "temp_k".into(), values: t_axis.to_vec() }];
    finish(SweepKind::Temperature, axes, params, base, opts)
}
