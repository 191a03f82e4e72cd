//! Reference datasets: oscillator orbits for n = 0, 1, 2 and the step's
//! contour field with trajectories seeded on fixed levels.

use std::f64::consts::{PI, SQRT_2};
use std::path::Path;

use cqtraj_core::closed_form::step_contour_level;
use cqtraj_core::{integrate, IntegratorConfig, ModelSpec, Units, Wavefunction, C64};
use rayon::prelude::*;

use crate::args::{FigureArgs, Quantity, Which};
use crate::error::CliError;
use crate::output::{paths, write_grid_csv, write_json, RunMetadata};
use crate::run::{
    closed_orbit, default_horizon, default_t1, ensure_dir, sample_grid, triage, Sink, Status,
};

const SHM0: [(&str, f64); 4] = [("1", 1.0), ("2", 2.0), ("3", 3.0), ("4", 4.0)];
const SHM1: [(&str, f64); 4] = [("1.2", 1.2), ("1.35", 1.35), ("1.45", 1.45), ("1.55", 1.55)];
const SHM2: [(&str, f64); 4] = [("1.8", 1.8), ("1.9", 1.9), ("2.0", 2.0), ("2.1", 2.1)];
const STEP_LEVELS: [(&str, f64); 5] = [
    ("-4", -4.0),
    ("-3", -3.0),
    ("-2", -2.0),
    ("-1", -1.0),
    ("0", 0.0),
];

/// Step used for the contour dataset: `E = 1/2`, `V0 = 1/4`, `R = 1/√2`.
pub fn step_model() -> ModelSpec {
    ModelSpec::PotentialStep {
        energy: 0.5,
        v0: 0.25,
        reflection: Some(1.0 / SQRT_2),
    }
}

/// Point on level `c` at `Re x = -π/k`, on the branch with larger `Im x`
/// (the smaller root `ρ = e^{-2k Im x}` of `ρ² - (2R - c)ρ + R² = 0`).
/// Level 0 is the stagnation point there.
pub fn step_seed(k: f64, r: f64, c: f64) -> C64 {
    let b = 2.0 * r - c;
    let rho = 0.5 * (b - (b * b - 4.0 * r * r).max(0.0).sqrt());
    C64::new(-PI / k, -rho.ln() / (2.0 * k))
}

fn oscillator_set(
    dir: &Path,
    name: &str,
    n: u32,
    starts: &[(&str, f64)],
    cfg: &IntegratorConfig,
) -> Result<Status, CliError> {
    let wf = Wavefunction::new(ModelSpec::oscillator(n), Units::default())?;
    let horizon = default_horizon(&wf);
    let results: Vec<_> = starts
        .par_iter()
        .map(|&(_, x)| closed_orbit(&wf, C64::new(x, 0.0), cfg, horizon))
        .collect();
    let labels: Vec<String> = starts
        .iter()
        .map(|(l, _)| format!("{name} X(0) = {l}"))
        .collect();
    let sink = Sink {
        dir,
        command: "figures",
        wf: &wf,
        cfg,
    };
    let mut status = Status::Complete;
    for (r, &(label, x)) in triage(results, &labels)?.iter().zip(starts) {
        match r {
            Some((orbit, a)) => {
                sink.orbit(&format!("{name}_x{label}"), C64::new(x, 0.0), orbit, a)?
            }
            None => status = Status::Aborted,
        }
    }
    Ok(status)
}

fn step_set(dir: &Path, cfg: &IntegratorConfig) -> Result<Status, CliError> {
    let wf = Wavefunction::new(step_model(), Units::default())?;
    let (k, _) = wf.step_wavenumbers().expect("step");
    let (r, _) = wf.step_amplitudes().expect("step");

    let (rows, grid) = sample_grid(&wf, Quantity::C, 0.0, 400, 200)?;
    let (csv, json) = paths(dir, "step_field");
    write_grid_csv(&csv, &rows)?;
    let mut meta = RunMetadata::new("figures", &csv, &wf);
    meta.grid = Some(grid);
    write_json(&json, &meta)?;
    println!("{}", csv.display());

    let span = (0.0, default_t1(&wf));
    let seeds: Vec<C64> = STEP_LEVELS
        .iter()
        .map(|&(_, c)| step_seed(k, r, c))
        .collect();
    for (&(_, c), &x0) in STEP_LEVELS.iter().zip(&seeds) {
        debug_assert!((step_contour_level(&wf, x0).unwrap_or(f64::NAN) - c).abs() < 1e-9);
    }
    let results: Vec<_> = seeds
        .par_iter()
        .map(|&x0| integrate(&wf, x0, span, cfg))
        .collect();
    let labels: Vec<String> = STEP_LEVELS
        .iter()
        .map(|(l, _)| format!("step c = {l}"))
        .collect();
    let sink = Sink {
        dir,
        command: "figures",
        wf: &wf,
        cfg,
    };
    let mut status = Status::Complete;
    for ((r, &(label, _)), &x0) in triage(results, &labels)?
        .iter()
        .zip(&STEP_LEVELS)
        .zip(&seeds)
    {
        status = status.and(match r {
            Some(tr) => sink.trajectory(&format!("step_c{label}"), x0, span, tr)?,
            None => Status::Aborted,
        });
    }
    Ok(status)
}

pub fn figures(args: &FigureArgs) -> Result<Status, CliError> {
    let mut cfg = IntegratorConfig::default().with_tolerances(1e-11, 1e-13);
    if let Some(v) = args.rtol {
        cfg.rel_tol = v;
    }
    if let Some(v) = args.atol {
        cfg.abs_tol = v;
    }
    cfg.validate()?;
    let dir = args.out.clone().unwrap_or_else(|| ".".into());
    ensure_dir(&dir)?;
    let wanted = |w: Which| args.which == w || args.which == Which::All;
    let mut status = Status::Complete;
    if wanted(Which::Shm0) {
        status = status.and(oscillator_set(&dir, "shm0", 0, &SHM0, &cfg)?);
    }
    if wanted(Which::Shm1) {
        status = status.and(oscillator_set(&dir, "shm1", 1, &SHM1, &cfg)?);
    }
    if wanted(Which::Shm2) {
        status = status.and(oscillator_set(&dir, "shm2", 2, &SHM2, &cfg)?);
    }
    if wanted(Which::Step) {
        status = status.and(step_set(&dir, &cfg)?);
    }
    Ok(status)
}
