//! Command-line front end: configuration files, overrides and scenario runners.
//!
//! Frequencies in configuration files are written as `value/2π` in Hz and
//! converted to rad/s internally; decay rates are plain 1/s.
//!
//! ```toml
//! [params]
//! g_over_2pi_hz = 2.0e6
//! q_factor = 2.0e5          # or "inf"
//! temperature_k = 0.04
//!
//! [run]
//! ideal_pulses = true
//! backend = "auto"
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::constants::TWO_PI;
use crate::cpwfield::{self, CpwGeometry};
use crate::error::{Error, Result};
use crate::evolve::Backend;
use crate::metrics::{self, linear_axis, log_axis, SweepOptions};
use crate::model::{maybe_infinite, PhysicalParams};
use crate::protocol::{self, TRUTH_TABLE_LABELS};
use crate::qops::{fock_cutoff, HilbertSpace};

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "HYBRIDGATE_OUT";
const DEFAULT_OUT: &str = "out";

pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    Bell,
    TruthTable,
    Rabi,
    SweepGq,
    SweepTemp,
    Field,
}

/// Physical parameters as written in a configuration file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ParamsConfig {
    pub g_over_2pi_hz: f64,
    pub omega_c_over_2pi_hz: f64,
    pub omega_rr_over_2pi_hz: f64,
    #[serde(with = "maybe_infinite")]
    pub q_factor: f64,
    pub gamma_r: f64,
    pub gamma_rp: f64,
    pub rabi_over_2pi_hz: f64,
    pub temperature_k: f64,
    pub g_sc_over_2pi_hz: f64,
    pub gamma_sc: f64,
    pub gamma_phi: f64,
    pub dipole_c_m: f64,
}

impl From<&PhysicalParams> for ParamsConfig {
    fn from(p: &PhysicalParams) -> Self {
        Self {
            g_over_2pi_hz: p.g / TWO_PI,
            omega_c_over_2pi_hz: p.omega_c / TWO_PI,
            omega_rr_over_2pi_hz: p.omega_rr / TWO_PI,
            q_factor: p.q_factor,
            gamma_r: p.gamma_r,
            gamma_rp: p.gamma_rp,
            rabi_over_2pi_hz: p.rabi / TWO_PI,
            temperature_k: p.temperature,
            g_sc_over_2pi_hz: p.g_sc / TWO_PI,
            gamma_sc: p.gamma_sc,
            gamma_phi: p.gamma_phi,
            dipole_c_m: p.dipole_rr,
        }
    }
}

impl Default for ParamsConfig {
    fn default() -> Self {
        Self::from(&PhysicalParams::default())
    }
}

/// Configuration key of a [`PhysicalParams`] field.
fn param_key(name: &str) -> String {
    let key = match name {
        "g" => "g_over_2pi_hz",
        "omega_c" => "omega_c_over_2pi_hz",
        "omega_rr" => "omega_rr_over_2pi_hz",
        "rabi" => "rabi_over_2pi_hz",
        "temperature" => "temperature_k",
        "g_sc" => "g_sc_over_2pi_hz",
        "dipole_rr" => "dipole_c_m",
        other => other,
    };
    format!("params.{key}")
}

impl ParamsConfig {
    pub fn to_params(&self) -> Result<PhysicalParams> {
        // report angular quantities in the units they were given
        for (key, v) in [
            ("params.g_over_2pi_hz", self.g_over_2pi_hz),
            ("params.omega_c_over_2pi_hz", self.omega_c_over_2pi_hz),
            ("params.omega_rr_over_2pi_hz", self.omega_rr_over_2pi_hz),
            ("params.rabi_over_2pi_hz", self.rabi_over_2pi_hz),
            ("params.g_sc_over_2pi_hz", self.g_sc_over_2pi_hz),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(config_err(key, format!("must be finite and ≥ 0, got {v}")));
            }
        }
        let p = PhysicalParams {
            g: TWO_PI * self.g_over_2pi_hz,
            omega_c: TWO_PI * self.omega_c_over_2pi_hz,
            omega_rr: TWO_PI * self.omega_rr_over_2pi_hz,
            q_factor: self.q_factor,
            gamma_r: self.gamma_r,
            gamma_rp: self.gamma_rp,
            rabi: TWO_PI * self.rabi_over_2pi_hz,
            temperature: self.temperature_k,
            g_sc: TWO_PI * self.g_sc_over_2pi_hz,
            gamma_sc: self.gamma_sc,
            gamma_phi: self.gamma_phi,
            dipole_rr: self.dipole_c_m,
        };
        match p.validate() {
            Ok(()) => Ok(p),
            Err(Error::InvalidParameter { name, reason }) => Err(Error::Config { key: param_key(name), reason }),
            Err(e) => Err(e),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    pub ideal_pulses: bool,
    pub backend: Backend,
    pub workers: Option<usize>,
}

impl Default for RunSection {
    fn default() -> Self {
        Self { ideal_pulses: true, backend: Backend::Auto, workers: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GqSection {
    pub g_min_hz: f64,
    pub g_max_hz: f64,
    pub g_points: usize,
    pub q_min: f64,
    pub q_max: f64,
    pub q_points: usize,
}

impl Default for GqSection {
    fn default() -> Self {
        Self { g_min_hz: 0.5e6, g_max_hz: 20e6, g_points: 13, q_min: 1e4, q_max: 1e7, q_points: 13 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TempSection {
    pub t_min_k: f64,
    pub t_max_k: f64,
    pub t_step_k: f64,
}

impl Default for TempSection {
    fn default() -> Self {
        Self { t_min_k: 0.0, t_max_k: 0.3, t_step_k: 0.005 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RabiSection {
    pub points: usize,
}

impl Default for RabiSection {
    fn default() -> Self {
        Self { points: 201 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FieldSection {
    pub s_m: f64,
    pub w_m: f64,
    pub eps_r: f64,
    pub half_width_m: f64,
    pub height_m: f64,
    pub depth_m: f64,
    pub spacing_m: f64,
    /// Defaults to the half-wave length at the cavity frequency.
    pub resonator_length_m: Option<f64>,
    /// Write every `stride`-th node of the map.
    pub stride: usize,
}

impl Default for FieldSection {
    fn default() -> Self {
        let g = CpwGeometry::default();
        Self {
            s_m: g.s,
            w_m: g.w,
            eps_r: g.eps_r,
            half_width_m: g.half_width,
            height_m: g.height,
            depth_m: g.depth,
            spacing_m: g.spacing,
            resonator_length_m: None,
            stride: 4,
        }
    }
}

/// Everything a run needs; serialized into every metadata sidecar.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub scenario: Option<Scenario>,
    pub output_dir: Option<PathBuf>,
    /// Only used by randomized checks.
    pub seed: u64,
    pub params: ParamsConfig,
    pub run: RunSection,
    pub sweep_gq: GqSection,
    pub sweep_temp: TempSection,
    pub rabi: RabiSection,
    pub field: FieldSection,
}

fn config_err(key: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::Config { key: key.into(), reason: reason.into() }
}

/// Parse a `--set` value as a TOML value, falling back to a bare string.
fn parse_value(raw: &str) -> toml::Value {
    toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

/// Apply a `key.path=value` override to a TOML table.
pub fn apply_override(table: &mut toml::Table, assignment: &str) -> Result<()> {
    let (key, raw) =
        assignment.split_once('=').ok_or_else(|| config_err(assignment, "overrides take the form key=value"))?;
    let key = key.trim();
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(config_err(key, "empty key segment"));
    }
    let mut node = table;
    for (depth, part) in parts[..parts.len() - 1].iter().enumerate() {
        let entry = node.entry(part.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        node = entry
            .as_table_mut()
            .ok_or_else(|| config_err(parts[..=depth].join("."), "is a value, not a section"))?;
    }
    node.insert(parts[parts.len() - 1].to_string(), parse_value(raw.trim()));
    Ok(())
}

/// Build a [`RunConfig`] from an optional TOML file and overrides, checking
/// every value.
pub fn load_config(path: Option<&Path>, overrides: &[String]) -> Result<RunConfig> {
    let mut table = match path {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| config_err("--config", format!("{}: {e}", p.display())))?;
            toml::from_str::<toml::Table>(&text).map_err(|e| config_err(p.display().to_string(), e.to_string()))?
        }
        None => toml::Table::new(),
    };
    for o in overrides {
        apply_override(&mut table, o)?;
    }
    let cfg: RunConfig = serde_path_to_error::deserialize(toml::Value::Table(table)).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        let msg = inner.to_string();
        let key = match msg.split('`').nth(1).filter(|_| msg.starts_with("unknown field")) {
            Some(field) if path == "." => field.to_string(),
            _ => path,
        };
        config_err(key, msg.trim().to_string())
    })?;
    cfg.check()?;
    Ok(cfg)
}

impl RunConfig {
    pub fn physical_params(&self) -> Result<PhysicalParams> {
        self.params.to_params()
    }

    fn check(&self) -> Result<()> {
        self.physical_params()?;
        if self.run.workers == Some(0) {
            return Err(config_err("run.workers", "must be at least 1"));
        }
        let s = &self.sweep_gq;
        for (key, v) in [
            ("sweep_gq.g_min_hz", s.g_min_hz),
            ("sweep_gq.g_max_hz", s.g_max_hz),
            ("sweep_gq.q_min", s.q_min),
            ("sweep_gq.q_max", s.q_max),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(config_err(key, format!("must be positive and finite, got {v}")));
            }
        }
        if s.g_points == 0 {
            return Err(config_err("sweep_gq.g_points", "must be at least 1"));
        }
        if s.q_points == 0 {
            return Err(config_err("sweep_gq.q_points", "must be at least 1"));
        }
        let t = &self.sweep_temp;
        if !(t.t_min_k >= 0.0) {
            return Err(config_err("sweep_temp.t_min_k", "must be non-negative"));
        }
        if !(t.t_max_k >= t.t_min_k) {
            return Err(config_err("sweep_temp.t_max_k", "must be at least t_min_k"));
        }
        if !(t.t_step_k > 0.0) {
            return Err(config_err("sweep_temp.t_step_k", "must be positive"));
        }
        if self.rabi.points < 2 {
            return Err(config_err("rabi.points", "need at least two time points"));
        }
        if self.field.stride == 0 {
            return Err(config_err("field.stride", "must be at least 1"));
        }
        if let Some(l) = self.field.resonator_length_m {
            if !(l > 0.0) {
                return Err(config_err("field.resonator_length_m", "must be positive"));
            }
        }
        match self.geometry()?.validate() {
            Err(Error::InvalidParameter { name, reason }) => Err(config_err(format!("field.{name}"), reason)),
            other => other,
        }
    }

    pub fn geometry(&self) -> Result<CpwGeometry> {
        let f = &self.field;
        let omega_c = TWO_PI * self.params.omega_c_over_2pi_hz;
        Ok(CpwGeometry {
            s: f.s_m,
            w: f.w_m,
            eps_r: f.eps_r,
            half_width: f.half_width_m,
            height: f.height_m,
            depth: f.depth_m,
            spacing: f.spacing_m,
            resonator_length: f.resonator_length_m.unwrap_or_else(|| cpwfield::half_wave_length(omega_c, f.eps_r)),
            omega_c,
        })
    }

    pub fn sweep_options(&self) -> SweepOptions {
        SweepOptions { workers: self.run.workers, ideal_pulses: self.run.ideal_pulses, backend: self.run.backend }
    }

    pub fn gq_axes(&self) -> (Vec<f64>, Vec<f64>) {
        let s = &self.sweep_gq;
        (log_axis(s.g_min_hz, s.g_max_hz, s.g_points), log_axis(s.q_min, s.q_max, s.q_points))
    }

    pub fn temperature_axis(&self) -> Vec<f64> {
        let t = &self.sweep_temp;
        linear_axis(t.t_min_k, t.t_max_k, t.t_step_k)
    }
}

#[derive(Debug, Parser)]
#[command(name = "hybridgate", version, about = "Atom–photon conditional phase gate simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory (default: config `output_dir`, then $HYBRIDGATE_OUT, then ./out).
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Sweep worker threads.
    #[arg(long, global = true, value_name = "N")]
    pub workers: Option<usize>,
    /// Override a configuration key, e.g. `--set params.q_factor=1e6`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Bell-state preparation fidelity.
    Bell,
    /// Cz phases on the computational basis (losses switched off).
    TruthTable,
    /// Vacuum Rabi oscillation over one period.
    Rabi,
    /// Fidelity over a g × Q grid.
    SweepGq,
    /// Fidelity versus waveguide temperature.
    SweepTemp,
    /// CPW zero-point field and coupling map.
    Field,
    /// Print derived quantities without running any dynamics.
    Validate,
}

impl Command {
    pub fn scenario(self) -> Option<Scenario> {
        match self {
            Command::Bell => Some(Scenario::Bell),
            Command::TruthTable => Some(Scenario::TruthTable),
            Command::Rabi => Some(Scenario::Rabi),
            Command::SweepGq => Some(Scenario::SweepGq),
            Command::SweepTemp => Some(Scenario::SweepTemp),
            Command::Field => Some(Scenario::Field),
            Command::Validate => None,
        }
    }
}

/// Process exit status for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config { .. } | Error::InvalidParameter { .. } => EXIT_CONFIG,
        Error::Io { .. } => EXIT_IO,
        _ => EXIT_NUMERICAL,
    }
}

fn output_dir(cli: &Cli, cfg: &RunConfig) -> PathBuf {
    cli.out
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Numerical(format!("serializing: {e}")))?;
    write(path, &text)
}

#[derive(Serialize)]
struct Sidecar<'a, T: Serialize> {
    scenario: Scenario,
    config: &'a RunConfig,
    result: T,
    wall_time_s: f64,
}

/// Outcome of a scenario: the one-line summary and the files written.
#[derive(Clone, Debug)]
pub struct Report {
    pub summary: String,
    pub files: Vec<PathBuf>,
}

/// Run a scenario, writing its artifacts into `out`.
pub fn run(scenario: Scenario, cfg: &RunConfig, out: &Path) -> Result<Report> {
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let start = Instant::now();
    let p = cfg.physical_params()?;
    let mut cfg = cfg.clone();
    cfg.scenario = Some(scenario);
    let cfg = &cfg;
    let elapsed = || start.elapsed().as_secs_f64();
    match scenario {
        Scenario::Bell => {
            let res = protocol::bell_prep_with(&p, cfg.run.ideal_pulses, cfg.run.backend)?;
            let analytic = metrics::analytic_fidelity(&p)?;
            #[derive(Serialize)]
            struct Bell {
                fidelity: f64,
                analytic_fidelity: f64,
                cavity_prep_fidelity: f64,
                nmax: usize,
                timings: Vec<(String, f64)>,
                schedule: Vec<String>,
            }
            let path = out.join("bell.json");
            let wall = elapsed();
            let result = Bell {
                fidelity: res.fidelity,
                analytic_fidelity: analytic,
                cavity_prep_fidelity: res.cavity_prep_fidelity,
                nmax: res.nmax,
                timings: res.timings,
                schedule: res.schedule,
            };
            write_json(&path, &Sidecar { scenario, config: cfg, result, wall_time_s: wall })?;
            Ok(Report {
                summary: format!(
                    "bell: F = {:.6} (analytic {analytic:.6}, F_gamma {:.6}) in {wall:.2} s",
                    res.fidelity, res.cavity_prep_fidelity
                ),
                files: vec![path],
            })
        }
        Scenario::TruthTable => {
            let lossless = p.lossless();
            let table = protocol::cz_truth_table(&lossless, cfg.run.ideal_pulses)?;
            let mut csv = String::from("basis,phase_re,phase_im,population\n");
            for ((label, z), pop) in TRUTH_TABLE_LABELS.iter().zip(table.phases).zip(table.populations) {
                let _ = writeln!(csv, "{label},{:.11e},{:.11e},{pop:.11e}", z.re, z.im);
            }
            let csv_path = out.join("truth_table.csv");
            let json_path = out.join("truth_table.json");
            write(&csv_path, &csv)?;
            let wall = elapsed();
            write_json(&json_path, &Sidecar { scenario, config: cfg, result: &table, wall_time_s: wall })?;
            let phases: Vec<String> = table.phases.iter().map(|z| format!("{:+.6}", z.re)).collect();
            Ok(Report {
                summary: format!("truth-table: phases ({}) in {wall:.2} s", phases.join(", ")),
                files: vec![csv_path, json_path],
            })
        }
        Scenario::Rabi => {
            let n = cfg.rabi.points;
            let period = std::f64::consts::PI / p.g;
            let times: Vec<f64> = (0..n).map(|k| period * k as f64 / (n - 1) as f64).collect();
            let pops = protocol::vacuum_rabi(&p, &times, cfg.run.backend)?;
            let mut csv = String::from("t_s,p_rp0,sin2_gt\n");
            let mut worst = 0.0f64;
            for (t, pop) in times.iter().zip(&pops) {
                let ideal = (p.g * t).sin().powi(2);
                worst = worst.max((pop - ideal).abs());
                let _ = writeln!(csv, "{t:.11e},{pop:.11e},{ideal:.11e}");
            }
            let csv_path = out.join("rabi.csv");
            let json_path = out.join("rabi.json");
            write(&csv_path, &csv)?;
            let wall = elapsed();
            #[derive(Serialize)]
            struct Rabi {
                period_s: f64,
                points: usize,
                max_deviation_from_sin2: f64,
            }
            let result = Rabi { period_s: period, points: n, max_deviation_from_sin2: worst };
            write_json(&json_path, &Sidecar { scenario, config: cfg, result, wall_time_s: wall })?;
            Ok(Report {
                summary: format!("rabi: max |P - sin^2(gt)| = {worst:.3e} over {n} points in {wall:.2} s"),
                files: vec![csv_path, json_path],
            })
        }
        Scenario::SweepGq => {
            let (g_axis, q_axis) = cfg.gq_axes();
            let res = metrics::sweep_gq(&p, &g_axis, &q_axis, &cfg.sweep_options())?;
            let (csv, json) = res.write(out, "sweep_gq")?;
            let best = res.cells.iter().filter_map(|c| c.f_bell).fold(f64::NAN, f64::max);
            Ok(Report {
                summary: format!(
                    "sweep-gq: {} cells, best F = {best:.6}, {} failed, in {:.2} s",
                    res.cells.len(),
                    res.failures().count(),
                    elapsed()
                ),
                files: vec![csv, json],
            })
        }
        Scenario::SweepTemp => {
            let res = metrics::sweep_temperature(&p, &cfg.temperature_axis(), &cfg.sweep_options())?;
            let (csv, json) = res.write(out, "sweep_temp")?;
            let first = res.cells.first().and_then(|c| c.f_bell).unwrap_or(f64::NAN);
            let last = res.cells.last().and_then(|c| c.f_bell).unwrap_or(f64::NAN);
            Ok(Report {
                summary: format!(
                    "sweep-temp: {} temperatures, F = {first:.6} -> {last:.6}, {} failed, in {:.2} s",
                    res.cells.len(),
                    res.failures().count(),
                    elapsed()
                ),
                files: vec![csv, json],
            })
        }
        Scenario::Field => {
            let geom = cfg.geometry()?;
            let grid = cpwfield::normalize_zero_point(cpwfield::solve_potential(&geom)?)?;
            let files = cpwfield::write_outputs(&grid, p.dipole_rr, cfg.field.stride, out, "cpw_field")?;
            let s = cpwfield::summarize(&grid, p.dipole_rr)?;
            let meta = out.join("cpw_field_run.json");
            let wall = elapsed();
            write_json(&meta, &Sidecar { scenario, config: cfg, result: &s, wall_time_s: wall })?;
            let mut files = files;
            files.push(meta);
            Ok(Report {
                summary: format!(
                    "field: g/2pi = {:.3} MHz at the surface, {:.3} MHz at 10 um, decay length {:.2} um, in {wall:.2} s",
                    s.g_surface_over_2pi_hz / 1e6,
                    s.g_10um_over_2pi_hz / 1e6,
                    s.decay_length_m * 1e6
                ),
                files,
            })
        }
    }
}

/// Derived quantities of a configuration, one `key = value` per line.
pub fn validate_report(cfg: &RunConfig) -> Result<String> {
    let p = cfg.physical_params()?;
    let nbar = p.nbar();
    let nmax = fock_cutoff(nbar);
    let dim = HilbertSpace::atom_cavity(nmax)?.dim();
    let mut out = String::new();
    let mut line = |k: &str, v: String| {
        let _ = writeln!(out, "{k} = {v}");
    };
    if let Some(s) = cfg.scenario {
        line("scenario", format!("{s:?}"));
    }
    line("kappa_over_2pi_hz", format!("{:.3}", p.kappa() / TWO_PI));
    line("photon_lifetime_s", format!("{:.6e}", 1.0 / p.kappa()));
    line("nbar_th", format!("{nbar:.6e}"));
    line("detuning_over_2pi_hz", format!("{:.3}", p.detuning() / TWO_PI));
    let pi = std::f64::consts::PI;
    line("tau_load_s", format!("{:.6e}", protocol::loading_time(&p)));
    line("tau_pi_pulse_s", format!("{:.6e}", pi / p.rabi));
    line("tau_rotation_s", format!("{:.6e}", pi / p.g));
    line("tau_gate_s", format!("{:.6e}", metrics::gate_duration(p.rabi, p.g)?));
    line("pi_pulse_error", format!("{:.6e}", metrics::pi_pulse_error(p.rabi, p.gamma_r)?));
    line("analytic_fidelity", format!("{:.6}", metrics::analytic_fidelity(&p)?));
    line("nmax", nmax.to_string());
    line("atom_cavity_dim", dim.to_string());
    let geom = cfg.geometry()?;
    line("resonator_length_m", format!("{:.6e}", geom.resonator_length));
    line("eps_eff", format!("{:.4}", geom.eps_eff()));
    Ok(out)
}

fn dispatch(cli: &Cli) -> Result<String> {
    let mut cfg = load_config(cli.config.as_deref(), &cli.overrides)?;
    if let Some(w) = cli.workers {
        if w == 0 {
            return Err(config_err("--workers", "must be at least 1"));
        }
        cfg.run.workers = Some(w);
    }
    match cli.command.scenario() {
        None => validate_report(&cfg),
        Some(s) => {
            let report = run(s, &cfg, &output_dir(cli, &cfg))?;
            let mut text = report.summary;
            for f in &report.files {
                let _ = write!(text, "\n  wrote {}", f.display());
            }
            Ok(text)
        }
    }
}

/// Parse arguments, run, print, and return the process exit status.
pub fn main_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { 0 };
        }
    };
    match dispatch(&cli) {
        Ok(text) => {
            println!("{text}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sets(items: &[&str]) -> Vec<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn defaults_roundtrip_to_params() {
        let cfg = load_config(None, &[]).unwrap();
        let p = cfg.physical_params().unwrap();
        let d = PhysicalParams::default();
        assert!((p.g - d.g).abs() < 1e-6 && (p.omega_c - d.omega_c).abs() < 1e-3);
        assert_eq!(p.q_factor, d.q_factor);
    }

    #[test]
    fn overrides_reach_nested_keys() {
        let cfg = load_config(
            None,
            &sets(&["params.q_factor=inf", "params.temperature_k=0.04", "run.backend=\"taylor\"", "run.workers=2"]),
        )
        .unwrap();
        assert!(cfg.params.q_factor.is_infinite());
        assert_eq!(cfg.params.temperature_k, 0.04);
        assert_eq!(cfg.run.backend, Backend::Taylor);
        assert_eq!(cfg.run.workers, Some(2));
        // bare words are accepted as strings
        let cfg = load_config(None, &sets(&["run.backend=rk4", "scenario=sweep-gq"])).unwrap();
        assert_eq!(cfg.run.backend, Backend::Rk4);
        assert_eq!(cfg.scenario, Some(Scenario::SweepGq));
    }

    fn key_of(e: Error) -> String {
        match e {
            Error::Config { key, .. } => key,
            other => panic!("expected a config error, got {other:?}"),
        }
    }

    #[test]
    fn errors_name_the_key() {
        assert_eq!(key_of(load_config(None, &sets(&["params.g_over_2pi_hz=-1"])).unwrap_err()), "params.g_over_2pi_hz");
        assert_eq!(key_of(load_config(None, &sets(&["params.bogus=1"])).unwrap_err()), "params.bogus");
        assert_eq!(key_of(load_config(None, &sets(&["nonsense=1"])).unwrap_err()), "nonsense");
        assert_eq!(key_of(load_config(None, &sets(&["params.q_factor=\"x\""])).unwrap_err()), "params.q_factor");
        assert_eq!(key_of(load_config(None, &sets(&["field.spacing_m=3e-6"])).unwrap_err()), "field.spacing");
        assert_eq!(key_of(load_config(None, &sets(&["sweep_gq.g_points=0"])).unwrap_err()), "sweep_gq.g_points");
        assert_eq!(key_of(load_config(None, &sets(&["params.temperature_k.x=1"])).unwrap_err()), "params.temperature_k");
        assert!(load_config(None, &sets(&["novalue"])).is_err());
    }

    #[test]
    fn validate_reports_derived_values() {
        let report = validate_report(&load_config(None, &[]).unwrap()).unwrap();
        assert!(report.contains("kappa_over_2pi_hz = 25185.000"), "{report}");
        assert!(report.contains("tau_gate_s = 3.500000e-7"), "{report}");
        assert!(report.contains("nmax = 3"));
        let hot = validate_report(&load_config(None, &sets(&["params.temperature_k=0.04"])).unwrap()).unwrap();
        let nbar: f64 = hot.lines().find_map(|l| l.strip_prefix("nbar_th = ")).unwrap().parse().unwrap();
        assert!((nbar - 2.38e-3).abs() < 0.02 * 2.38e-3, "{nbar}");
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&config_err("k", "r")), EXIT_CONFIG);
        assert_eq!(exit_code(&Error::Numerical("x".into())), EXIT_NUMERICAL);
        assert_eq!(exit_code(&Error::NonConvergence { iterations: 1, residual: 1.0 }), EXIT_NUMERICAL);
    }
}
