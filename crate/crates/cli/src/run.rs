//! The `traj`, `field`, `action` and `expect` verbs.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use cqtraj_core::action::action_of_orbit;
use cqtraj_core::closed_form::step_contour_level;
use cqtraj_core::observables::{expectation_report, QuadratureConfig};
use cqtraj_core::{
    detect_period, integrate, Error as CoreError, IntegratorConfig, ModelSpec, Orbit,
    OrbitAnalysis, Termination, Trajectory, VelocityField, Wavefunction, C64,
};
use rayon::prelude::*;

use crate::args::{Common, ExpectArgs, FieldArgs, Quantity};
use crate::config::{Scenario, ScenarioConfig};
use crate::error::CliError;
use crate::output::{
    paths, write_grid_csv, write_json, write_table_csv, write_trajectory_csv, ExpectMeta, GridMeta,
    GridRow, OrbitMeta, RunMetadata, TrajectoryMeta,
};

/// Contour-quadrature tolerance for `J`, in units of `h`.
pub const ACTION_TOL: f64 = 1e-9;

/// Whether a verb finished everything it was asked to do.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Complete,
    Aborted,
}

impl Status {
    pub fn and(self, other: Status) -> Status {
        if self == Status::Aborted || other == Status::Aborted {
            Status::Aborted
        } else {
            Status::Complete
        }
    }
}

/// Errors that mean the request itself was wrong, as opposed to a numerical abort.
fn is_config_error(e: &CoreError) -> bool {
    matches!(
        e,
        CoreError::InvalidModel(_)
            | CoreError::InvalidConfig(_)
            | CoreError::NonNormalizable
            | CoreError::NotStationary
            | CoreError::UnsupportedModel(_)
    )
}

fn time_unit(wf: &Wavefunction) -> f64 {
    let u = wf.units();
    match (wf.omega(), wf.step_wavenumbers()) {
        (Some(omega), _) => 1.0 / omega,
        (None, Some((k, _))) => u.mass / (u.hbar * k * k),
        _ => 1.0,
    }
}

/// One period for the oscillator, `20/ω_k` for the step, else 2 time units.
pub fn default_t1(wf: &Wavefunction) -> f64 {
    match wf.model() {
        ModelSpec::HarmonicOscillator { .. } => 2.0 * PI * time_unit(wf),
        ModelSpec::PotentialStep { .. } => 20.0 * time_unit(wf),
        _ => 2.0,
    }
}

/// Horizon for closed-orbit searches.
pub fn default_horizon(wf: &Wavefunction) -> f64 {
    100.0 * PI * time_unit(wf)
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir)?;
    Ok(())
}

/// Where and how a verb writes its trajectory files.
pub struct Sink<'a> {
    pub dir: &'a Path,
    pub command: &'static str,
    pub wf: &'a Wavefunction,
    pub cfg: &'a IntegratorConfig,
}

impl Sink<'_> {
    fn metadata(&self, csv: &Path) -> RunMetadata {
        let mut meta = RunMetadata::new(self.command, csv, self.wf);
        meta.integrator = Some(self.cfg.into());
        meta
    }

    /// Writes one trajectory with its sidecar; returns whether it ended early.
    pub fn trajectory(
        &self,
        stem: &str,
        x0: C64,
        span: (f64, f64),
        tr: &Trajectory,
    ) -> Result<Status, CliError> {
        let (csv, json) = paths(self.dir, stem);
        write_trajectory_csv(&csv, tr)?;
        let mut meta = self.metadata(&csv);
        meta.trajectory = Some(TrajectoryMeta::of(x0, span, tr));
        let aborted = matches!(
            tr.termination,
            Termination::Singularity | Termination::MaxSteps
        );
        meta.incomplete = aborted;
        write_json(&json, &meta)?;
        println!("{}", csv.display());
        Ok(if aborted {
            Status::Aborted
        } else {
            Status::Complete
        })
    }

    pub fn orbit(
        &self,
        stem: &str,
        x0: C64,
        orbit: &Orbit,
        analysis: &OrbitAnalysis,
    ) -> Result<(), CliError> {
        let (csv, json) = paths(self.dir, stem);
        write_trajectory_csv(&csv, &orbit.trajectory)?;
        let mut meta = self.metadata(&csv);
        meta.trajectory = Some(TrajectoryMeta::of(
            x0,
            (0.0, orbit.period),
            &orbit.trajectory,
        ));
        meta.orbit = Some(OrbitMeta::of(analysis, ACTION_TOL));
        write_json(&json, &meta)?;
        println!(
            "{}: x0 = {}{:+}i, period = {:.9}, J/h = {:.9}, winding = {}, larger nest = {}",
            csv.display(),
            x0.re,
            x0.im,
            analysis.period,
            analysis.action_over_h,
            analysis.winding,
            analysis.is_larger_nest
        );
        Ok(())
    }
}

pub fn closed_orbit(
    wf: &Wavefunction,
    x0: C64,
    cfg: &IntegratorConfig,
    horizon: f64,
) -> Result<(Orbit, OrbitAnalysis), CoreError> {
    let orbit = detect_period(wf, x0, cfg, horizon)?;
    let analysis = action_of_orbit(wf, &orbit.trajectory, ACTION_TOL)?;
    Ok((orbit, analysis))
}

/// Splits job results into successes and reports numerical failures;
/// configuration-class failures abort the whole verb.
pub fn triage<T>(
    results: Vec<Result<T, CoreError>>,
    labels: &[String],
) -> Result<Vec<Option<T>>, CliError> {
    if let Some(e) = results
        .iter()
        .find_map(|r| r.as_ref().err().filter(|e| is_config_error(e)))
    {
        return Err(CliError::Core(e.clone()));
    }
    Ok(results
        .into_iter()
        .zip(labels)
        .map(|(r, label)| match r {
            Ok(v) => Some(v),
            Err(e) => {
                eprintln!("{label}: {e}");
                None
            }
        })
        .collect())
}

fn scenario(common: &Common) -> Result<(ScenarioConfig, Scenario), CliError> {
    let cfg = ScenarioConfig::from_common(common)?;
    let sc = Scenario::try_from(&cfg)?;
    Ok((cfg, sc))
}

fn labels(x0: &[C64]) -> Vec<String> {
    x0.iter()
        .map(|x| format!("x0 = {}{:+}i", x.re, x.im))
        .collect()
}

pub fn traj(common: &Common) -> Result<Status, CliError> {
    let (_, sc) = scenario(common)?;
    if sc.x0.is_empty() {
        return Err(CliError::Config("traj needs at least one --x0".into()));
    }
    let wf = &sc.wavefunction;
    let span = (sc.t0, sc.t1.unwrap_or(sc.t0 + default_t1(wf)));
    let results: Vec<_> = sc
        .x0
        .par_iter()
        .map(|&x0| integrate(wf, x0, span, &sc.integrator))
        .collect();
    let results = triage(results, &labels(&sc.x0))?;
    ensure_dir(&sc.out)?;
    let sink = Sink {
        dir: &sc.out,
        command: "traj",
        wf,
        cfg: &sc.integrator,
    };
    let mut status = Status::Complete;
    for (i, (r, &x0)) in results.iter().zip(&sc.x0).enumerate() {
        status = status.and(match r {
            Some(tr) => sink.trajectory(&format!("traj_{i:03}"), x0, span, tr)?,
            None => Status::Aborted,
        });
    }
    Ok(status)
}

pub fn action(common: &Common) -> Result<Status, CliError> {
    let (_, sc) = scenario(common)?;
    if sc.x0.is_empty() {
        return Err(CliError::Config("action needs at least one --x0".into()));
    }
    let wf = &sc.wavefunction;
    if !wf.is_stationary() {
        return Err(CoreError::NotStationary.into());
    }
    let horizon = sc
        .t1
        .map(|t| t - sc.t0)
        .unwrap_or_else(|| default_horizon(wf));
    let results: Vec<_> = sc
        .x0
        .par_iter()
        .map(|&x0| closed_orbit(wf, x0, &sc.integrator, horizon))
        .collect();
    let results = triage(results, &labels(&sc.x0))?;
    ensure_dir(&sc.out)?;
    let sink = Sink {
        dir: &sc.out,
        command: "action",
        wf,
        cfg: &sc.integrator,
    };
    let mut status = Status::Complete;
    for (i, (r, &x0)) in results.iter().zip(&sc.x0).enumerate() {
        match r {
            Some((orbit, a)) => sink.orbit(&format!("orbit_{i:03}"), x0, orbit, a)?,
            None => status = Status::Aborted,
        }
    }
    Ok(status)
}

/// Rectangle `[-2π/k, 2π/k] × [-1/k, 1/k]` for the step, `[-4ℓ, 4ℓ] × [-2ℓ, 2ℓ]` otherwise.
fn default_window(wf: &Wavefunction) -> ([f64; 2], [f64; 2]) {
    match wf.step_wavenumbers() {
        Some((k, _)) => ([-2.0 * PI / k, 2.0 * PI / k], [-1.0 / k, 1.0 / k]),
        None => {
            let l = wf.length_scale();
            ([-4.0 * l, 4.0 * l], [-2.0 * l, 2.0 * l])
        }
    }
}

fn linspace(range: [f64; 2], n: usize, j: usize) -> f64 {
    if n == 1 {
        0.5 * (range[0] + range[1])
    } else {
        range[0] + (range[1] - range[0]) * j as f64 / (n - 1) as f64
    }
}

/// Samples `quantity` on an `nx × ny` grid, rows ordered by `Im x` then `Re x`.
pub fn sample_grid(
    wf: &Wavefunction,
    quantity: Quantity,
    t: f64,
    nx: usize,
    ny: usize,
) -> Result<(Vec<GridRow>, GridMeta), CliError> {
    if nx == 0 || ny == 0 {
        return Err(CliError::Config("grid needs nx, ny >= 1".into()));
    }
    if quantity == Quantity::C && !wf.is_step() {
        return Err(CliError::Config(
            "the contour level c is defined for the step only".into(),
        ));
    }
    let (xr, xi) = default_window(wf);
    let field = VelocityField::new(wf);
    let rows: Vec<GridRow> = (0..ny)
        .into_par_iter()
        .flat_map_iter(|j| {
            let im = linspace(xi, ny, j);
            (0..nx).map(move |i| {
                let re = linspace(xr, nx, i);
                let v = match quantity {
                    Quantity::C => step_contour_level(wf, C64::new(re, im)).unwrap_or(f64::NAN),
                    Quantity::Velocity => field.physical_velocity(re, im, t).unwrap_or(f64::NAN),
                };
                (re, im, v)
            })
        })
        .collect();
    let singular_samples = rows.iter().filter(|r| r.2.is_nan()).count();
    let meta = GridMeta {
        quantity: match quantity {
            Quantity::C => "c",
            Quantity::Velocity => "velocity",
        },
        t,
        nx,
        ny,
        x_re_range: xr,
        x_im_range: xi,
        singular_samples,
        note: (quantity == Quantity::C)
            .then_some("incident-side expression, also evaluated for Re x >= 0"),
    };
    Ok((rows, meta))
}

pub fn field(args: &FieldArgs) -> Result<Status, CliError> {
    let (cfg, sc) = scenario(&args.common)?;
    let wf = &sc.wavefunction;
    let quantity = args.quantity.or(cfg.quantity).unwrap_or(if wf.is_step() {
        Quantity::C
    } else {
        Quantity::Velocity
    });
    let nx = args.nx.or(cfg.nx).unwrap_or(400);
    let ny = args.ny.or(cfg.ny).unwrap_or(200);
    let (rows, grid) = sample_grid(wf, quantity, sc.t0, nx, ny)?;
    ensure_dir(&sc.out)?;
    let (csv, json) = paths(&sc.out, "field");
    write_grid_csv(&csv, &rows)?;
    let mut meta = RunMetadata::new("field", &csv, wf);
    meta.grid = Some(grid);
    write_json(&json, &meta)?;
    println!("{}", csv.display());
    Ok(Status::Complete)
}

pub fn expect(args: &ExpectArgs) -> Result<Status, CliError> {
    let (cfg, sc) = scenario(&args.common)?;
    let wf = &sc.wavefunction;
    let quad = QuadratureConfig {
        rel_tol: args.quad_tol.or(cfg.quad_tol).unwrap_or(1e-10),
        truncation_l: args.half_width.or(cfg.half_width),
    };
    let times = if !args.times.is_empty() {
        args.times.clone()
    } else if !cfg.t.is_empty() {
        cfg.t.clone()
    } else {
        vec![sc.t0]
    };
    let reports = times
        .par_iter()
        .map(|&t| expectation_report(wf, t, &quad))
        .collect::<Result<Vec<_>, _>>()?;
    ensure_dir(&sc.out)?;
    let (csv, json) = paths(&sc.out, "expect");
    let rows: Vec<Vec<f64>> = reports
        .iter()
        .map(|r| {
            vec![
                r.t,
                r.norm,
                r.mean_x,
                r.mean_p,
                r.mean_e,
                r.imag_residual,
                r.truncation_l,
            ]
        })
        .collect();
    write_table_csv(
        &csv,
        &[
            "t",
            "norm",
            "mean_x",
            "mean_p",
            "mean_e",
            "imag_residual",
            "truncation_l",
        ],
        &rows,
    )?;
    let mut meta = RunMetadata::new("expect", &csv, wf);
    meta.expectation = Some(ExpectMeta {
        quad_tol: quad.rel_tol,
        truncation_l: quad.truncation_l,
        max_imag_residual: reports.iter().map(|r| r.imag_residual).fold(0.0, f64::max),
    });
    write_json(&json, &meta)?;
    println!("{}", csv.display());
    Ok(Status::Complete)
}
