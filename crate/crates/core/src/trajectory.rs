//! Complex trajectories `x(t)` of the velocity field, and closed-orbit detection.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::{DormandPrince, IntegratorConfig, Step};
use crate::velocity::VelocityField;
use crate::wavefunction::{ModelSpec, Region, Wavefunction};

/// Bisection budget for event location.
const EVENT_ITERATIONS: usize = 200;
/// Crossings of `Re x = 0` are located to this accuracy in time.
const CROSSING_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub x: C64,
    pub xdot: C64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    TimeReached,
    ClosedOrbit,
    Singularity,
    StepBoundaryCrossed,
    MaxSteps,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub model: ModelSpec,
    /// Accepted states, monotone in `t`. The physical path is `Re x`.
    pub points: Vec<TrajectoryPoint>,
    pub termination: Termination,
    /// Times at which the path crossed the step at `Re x = 0` and switched field.
    pub boundary_crossings: Vec<f64>,
}

impl Trajectory {
    pub fn last(&self) -> &TrajectoryPoint {
        self.points
            .last()
            .expect("trajectory has at least its initial point")
    }

    /// Physical path `(t, Re x)`.
    pub fn physical_path(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.points.iter().map(|p| (p.t, p.x.re))
    }
}

/// A detected closed orbit.
#[derive(Debug, Clone, PartialEq)]
pub struct Orbit {
    pub period: f64,
    pub trajectory: Trajectory,
}

/// `max(|x0|, ℓ)`, the scale used for closure and drift tolerances.
pub fn orbit_scale(wf: &Wavefunction, x0: C64) -> f64 {
    x0.norm().max(wf.length_scale())
}

fn field_in(field: VelocityField<'_>, region: Region) -> impl FnMut(f64, C64) -> Result<C64> + '_ {
    move |t, x| field.complex_velocity_in(region, x, t).map(|s| s.xdot)
}

fn point(t: f64, x: C64, xdot: C64) -> TrajectoryPoint {
    TrajectoryPoint { t, x, xdot }
}

/// Integrates `ẋ = (ħ/im) Ψ'/Ψ` from `x0` over `t_span`.
///
/// Running into a node, or exhausting the step budget, ends the trajectory
/// with the corresponding [`Termination`] and keeps the partial path. For the
/// potential step, a sign change of `Re x` is located by bisection and the
/// integration continues with the other side's field (or stops, see
/// [`IntegratorConfig::stop_at_step_boundary`]).
pub fn integrate(
    wf: &Wavefunction,
    x0: C64,
    t_span: (f64, f64),
    config: &IntegratorConfig,
) -> Result<Trajectory> {
    config.validate()?;
    let field = VelocityField::new(wf).with_psi_floor(config.psi_floor);
    let (t0, t1) = t_span;
    if !(t0.is_finite() && t1.is_finite()) || !(x0.re.is_finite() && x0.im.is_finite()) {
        return Err(Error::InvalidConfig(
            "non-finite initial condition or time span".into(),
        ));
    }
    let v0 = field.complex_velocity(x0, t0)?.xdot;

    let mut traj = Trajectory {
        model: *wf.model(),
        points: vec![point(t0, x0, v0)],
        termination: Termination::TimeReached,
        boundary_crossings: Vec::new(),
    };
    if t0 == t1 {
        return Ok(traj);
    }

    let mut region = wf.region_of(x0);
    let mut start = (t0, x0);
    let mut steps_used = 0usize;
    'segments: loop {
        let mut seg_config = *config;
        seg_config.max_steps = config.max_steps.saturating_sub(steps_used).max(1);
        let mut dp =
            DormandPrince::new(field_in(field, region), start.0, start.1, t1, &seg_config)?;
        loop {
            let step = match dp.step() {
                Ok(Some(step)) => step,
                Ok(None) => break 'segments,
                Err(Error::MaxSteps(_)) => {
                    traj.termination = Termination::MaxSteps;
                    break 'segments;
                }
                Err(Error::StepUnderflow { .. }) | Err(Error::NodeSingularity { .. }) => {
                    traj.termination = Termination::Singularity;
                    break 'segments;
                }
                Err(e) => return Err(e),
            };
            steps_used += 1;

            if wf.is_step() && wf.region_of(step.x1) != region {
                let (tc, xc) = locate_crossing(&mut dp, &step, region)?;
                let new_region = wf.region_of(xc);
                let vc = match field.complex_velocity_in(new_region, xc, tc) {
                    Ok(s) => s.xdot,
                    Err(_) => {
                        traj.termination = Termination::Singularity;
                        break 'segments;
                    }
                };
                traj.points.push(point(tc, xc, vc));
                traj.boundary_crossings.push(tc);
                if config.stop_at_step_boundary {
                    traj.termination = Termination::StepBoundaryCrossed;
                    break 'segments;
                }
                region = new_region;
                start = (tc, xc);
                if tc == t1 {
                    break 'segments;
                }
                continue 'segments;
            }
            traj.points.push(point(step.t1, step.x1, step.v1));
        }
    }
    Ok(traj)
}

/// Bisects `Re x(t)` inside `step` for the first sample on the far side of
/// `Re x = 0`. Returns that (post-crossing) time and position.
fn locate_crossing<F>(dp: &mut DormandPrince<F>, step: &Step, region: Region) -> Result<(f64, C64)>
where
    F: FnMut(f64, C64) -> Result<C64>,
{
    let on_start_side = |x: C64| match region {
        Region::Incident => x.re < 0.0,
        Region::Transmitted => x.re >= 0.0,
    };
    let (mut lo, mut hi) = (step.t0, step.t1);
    let mut x_hi = step.x1;
    for _ in 0..EVENT_ITERATIONS {
        if (hi - lo).abs() <= CROSSING_TOL * hi.abs().max(1.0) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let (x_mid, _) = dp.resample(step, mid)?;
        if on_start_side(x_mid) {
            lo = mid;
        } else {
            hi = mid;
            x_hi = x_mid;
        }
    }
    Ok((hi, x_hi))
}

/// Integrates from `x0` at `t = 0` until the path returns to `x0`.
///
/// The path must first leave the ball of radius `0.1 · scale` about `x0`.
/// Afterwards every accepted step on which `d/dt |x - x0|²` changes sign from
/// negative to non-negative is searched (by bisection on re-stepped states)
/// for the distance minimum; a minimum closer than `close_eps · scale` ends
/// the orbit. The returned trajectory ends exactly at the return time.
pub fn detect_period(
    wf: &Wavefunction,
    x0: C64,
    config: &IntegratorConfig,
    t_max: f64,
) -> Result<Orbit> {
    config.validate()?;
    if !wf.is_stationary() {
        return Err(Error::NotStationary);
    }
    if t_max.is_nan() || t_max <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "t_max must be > 0, got {t_max}"
        )));
    }
    let field = VelocityField::new(wf).with_psi_floor(config.psi_floor);
    let region = wf.region_of(x0);
    let v0 = field.complex_velocity(x0, 0.0)?.xdot;
    let scale = orbit_scale(wf, x0);
    let ball = 0.1 * scale;
    let close = config.close_eps * scale;

    let mut points = vec![point(0.0, x0, v0)];
    let mut dp = DormandPrince::new(field_in(field, region), 0.0, x0, t_max, config)?;
    let approach = |x: C64, v: C64| ((x - x0).conj() * v).re;
    let mut left_ball = false;

    loop {
        let step = match dp.step() {
            Ok(Some(step)) => step,
            Ok(None) => {
                return Err(Error::NotClosed(format!(
                    "no return to x0 before t = {t_max}"
                )))
            }
            Err(Error::MaxSteps(n)) => {
                return Err(Error::NotClosed(format!(
                    "no return to x0 within {n} steps"
                )))
            }
            Err(e) => return Err(e),
        };
        if wf.is_step() && wf.region_of(step.x1) != region {
            return Err(Error::NotClosed("path crossed the potential step".into()));
        }
        if !left_ball && (step.x1 - x0).norm() > ball {
            left_ball = true;
        }
        let near = (step.x0 - x0).norm().min((step.x1 - x0).norm()) < ball;
        if left_ball
            && near
            && approach(step.x0, step.v0) < 0.0
            && approach(step.x1, step.v1) >= 0.0
        {
            let (mut lo, mut hi) = (step.t0, step.t1);
            let mut best = (step.t1, step.x1, step.v1);
            for _ in 0..EVENT_ITERATIONS {
                if hi - lo <= 4.0 * f64::EPSILON * hi {
                    break;
                }
                let mid = 0.5 * (lo + hi);
                let (x, v) = dp.resample(&step, mid)?;
                if approach(x, v) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                    best = (mid, x, v);
                }
            }
            let (t_ret, x_ret, v_ret) = best;
            if (x_ret - x0).norm() < close {
                points.push(point(t_ret, x_ret, v_ret));
                return Ok(Orbit {
                    period: t_ret,
                    trajectory: Trajectory {
                        model: *wf.model(),
                        points,
                        termination: Termination::ClosedOrbit,
                        boundary_crossings: Vec::new(),
                    },
                });
            }
        }
        points.push(point(step.t1, step.x1, step.v1));
    }
}
