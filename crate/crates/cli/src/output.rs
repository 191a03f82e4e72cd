//! CSV data files and their JSON metadata sidecars.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use cqtraj_core::{
    IntegratorConfig, ModelSpec, OrbitAnalysis, Termination, Trajectory, Units, Wavefunction, C64,
};
use serde::Serialize;

use crate::error::CliError;

/// 12 significant digits.
pub fn num(v: f64) -> String {
    format!("{v:.11e}")
}

pub fn write_trajectory_csv(path: &Path, tr: &Trajectory) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["t", "x_re", "x_im", "v_re", "v_im"])?;
    for p in &tr.points {
        w.write_record([
            num(p.t),
            num(p.x.re),
            num(p.x.im),
            num(p.xdot.re),
            num(p.xdot.im),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `(Re x, Im x, value)`.
pub type GridRow = (f64, f64, f64);

pub fn write_grid_csv(path: &Path, rows: &[GridRow]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["x_re", "x_im", "value"])?;
    for &(re, im, v) in rows {
        w.write_record([num(re), num(im), num(v)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_table_csv(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|&v| num(v)))?;
    }
    w.flush()?;
    Ok(())
}

/// `<stem>.csv` and `<stem>.json` inside `dir`.
pub fn paths(dir: &Path, stem: &str) -> (PathBuf, PathBuf) {
    (
        dir.join(format!("{stem}.csv")),
        dir.join(format!("{stem}.json")),
    )
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let mut f = fs::File::create(path)?;
    serde_json::to_writer_pretty(&mut f, value)?;
    f.write_all(b"\n")?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct Derived {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reflection: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transmission: Option<f64>,
    pub planck_h: f64,
    pub length_scale: f64,
}

impl Derived {
    pub fn of(wf: &Wavefunction) -> Self {
        let u = wf.units();
        let (k, q) = wf.step_wavenumbers().unzip();
        let (reflection, transmission) = wf.step_amplitudes().unzip();
        // ω_k = ħk²/m sets the time scale for the step.
        let omega = wf.omega().or(k.map(|k| u.hbar * k * k / u.mass));
        Derived {
            omega,
            energy: wf.energy(),
            k,
            q,
            reflection,
            transmission,
            planck_h: u.planck(),
            length_scale: wf.length_scale(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Tolerances {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// `None` when unbounded.
    pub max_step: Option<f64>,
    pub psi_floor: f64,
    pub max_steps: usize,
    pub close_eps: f64,
    pub stop_at_step_boundary: bool,
}

impl From<&IntegratorConfig> for Tolerances {
    fn from(c: &IntegratorConfig) -> Self {
        Tolerances {
            rel_tol: c.rel_tol,
            abs_tol: c.abs_tol,
            max_step: c.max_step.is_finite().then_some(c.max_step),
            psi_floor: c.psi_floor,
            max_steps: c.max_steps,
            close_eps: c.close_eps,
            stop_at_step_boundary: c.stop_at_step_boundary,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TrajectoryMeta {
    pub x0: [f64; 2],
    pub t_span: [f64; 2],
    pub termination: Termination,
    pub points: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub boundary_crossings: Vec<f64>,
}

impl TrajectoryMeta {
    pub fn of(x0: C64, t_span: (f64, f64), tr: &Trajectory) -> Self {
        TrajectoryMeta {
            x0: [x0.re, x0.im],
            t_span: [t_span.0, t_span.1],
            termination: tr.termination,
            points: tr.points.len(),
            boundary_crossings: tr.boundary_crossings.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OrbitMeta {
    pub period: f64,
    pub action: f64,
    pub action_over_h: f64,
    pub action_imag_residual: f64,
    pub action_tol: f64,
    pub winding: i64,
    pub enclosed_zero_count: usize,
    pub is_larger_nest: bool,
}

impl OrbitMeta {
    pub fn of(a: &OrbitAnalysis, action_tol: f64) -> Self {
        OrbitMeta {
            period: a.period,
            action: a.action,
            action_over_h: a.action_over_h,
            action_imag_residual: a.action_imag_residual,
            action_tol,
            winding: a.winding,
            enclosed_zero_count: a.enclosed_zero_count,
            is_larger_nest: a.is_larger_nest,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GridMeta {
    pub quantity: &'static str,
    pub t: f64,
    pub nx: usize,
    pub ny: usize,
    pub x_re_range: [f64; 2],
    pub x_im_range: [f64; 2],
    /// Samples where the field is undefined (nodes); written as NaN.
    pub singular_samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<&'static str>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExpectMeta {
    pub quad_tol: f64,
    pub truncation_l: Option<f64>,
    pub max_imag_residual: f64,
}

/// Sidecar for exactly one data file.
#[derive(Debug, Clone, Serialize)]
pub struct RunMetadata {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub data_file: String,
    pub model: ModelSpec,
    pub units: Units,
    pub derived: Derived,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub integrator: Option<Tolerances>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<TrajectoryMeta>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orbit: Option<OrbitMeta>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridMeta>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expectation: Option<ExpectMeta>,
    /// Set when the computation stopped early; the data file holds what was computed.
    pub incomplete: bool,
}

impl RunMetadata {
    pub fn new(command: &'static str, data_file: &Path, wf: &Wavefunction) -> Self {
        RunMetadata {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            data_file: data_file
                .file_name()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default(),
            model: *wf.model(),
            units: wf.units(),
            derived: Derived::of(wf),
            integrator: None,
            trajectory: None,
            orbit: None,
            grid: None,
            expectation: None,
            incomplete: false,
        }
    }
}
