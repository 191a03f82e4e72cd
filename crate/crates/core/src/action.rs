//! Action variable `J = ∮ m ẋ dx` over closed orbits, the argument-principle
//! winding number of the wavefunction along the same orbit, and the
//! `∂J/∂E` period comparison for the oscillator.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::closed_form::invariant_value;
use crate::error::{Error, Result};
use crate::integrator::dp_step;
use crate::trajectory::{Termination, Trajectory};
use crate::velocity::VelocityField;
use crate::wavefunction::{ModelSpec, Units, Wavefunction};

/// Refinement levels before the contour quadrature gives up.
const MAX_REFINEMENTS: u32 = 16;
/// Largest polyline the quadrature will build.
const MAX_VERTICES: usize = 1 << 23;
/// Recursion limit for phase-increment splitting.
const MAX_PHASE_DEPTH: u32 = 60;
/// How far the accumulated phase may sit from a multiple of 2π.
const INTEGER_SNAP: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitAnalysis {
    pub period: f64,
    /// `Re ∮ m ẋ dx`.
    pub action: f64,
    /// `|Im ∮ m ẋ dx|`; zero for an exact closed orbit.
    pub action_imag_residual: f64,
    /// `action / h`.
    pub action_over_h: f64,
    pub winding: i64,
    pub enclosed_zero_count: usize,
    pub is_larger_nest: bool,
    /// Midpoint refinements performed by the contour quadrature.
    pub refinements: u32,
    pub vertices: usize,
}

/// Trapezoid rule `Σ ½(f_k + f_{k+1})(x_{k+1} - x_k)` over the closed polyline
/// through `xs` (the last vertex joins back to the first).
pub fn closed_polyline_integral(xs: &[C64], fs: &[C64]) -> C64 {
    assert_eq!(xs.len(), fs.len());
    let n = xs.len();
    (0..n)
        .map(|k| {
            let j = (k + 1) % n;
            0.5 * (fs[k] + fs[j]) * (xs[j] - xs[k])
        })
        .sum()
}

/// Computes `J`, the winding number and the nest classification for a closed orbit.
///
/// `J` comes from the trapezoid rule over the integrated orbit. Each
/// refinement inserts the midpoint (in time) of every segment, obtained by a
/// Dormand-Prince sub-step from the segment start, until successive
/// estimates agree to `tol · h`.
pub fn action_of_orbit(wf: &Wavefunction, orbit: &Trajectory, tol: f64) -> Result<OrbitAnalysis> {
    if orbit.termination != Termination::ClosedOrbit || orbit.points.len() < 3 {
        return Err(Error::NotClosed("trajectory is not a closed orbit".into()));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidConfig(format!("tol must be > 0, got {tol}")));
    }
    let Units { mass, .. } = wf.units();
    let h_planck = wf.units().planck();
    let field = VelocityField::new(wf);
    let region = wf.region_of(orbit.points[0].x);
    let mut rhs = |t: f64, x: C64| field.complex_velocity_in(region, x, t).map(|s| s.xdot);

    // Drop the return point: it coincides with the first vertex up to the
    // closure tolerance, and the polyline closes itself.
    let mut ts: Vec<f64> = orbit.points.iter().map(|p| p.t).collect();
    let mut xs: Vec<C64> = orbit.points.iter().map(|p| p.x).collect();
    let mut vs: Vec<C64> = orbit.points.iter().map(|p| p.xdot).collect();
    let period = ts[ts.len() - 1] - ts[0];
    ts.pop();
    xs.pop();
    vs.pop();

    let momentum = |vs: &[C64]| vs.iter().map(|v| mass * v).collect::<Vec<_>>();
    let mut estimate = closed_polyline_integral(&xs, &momentum(&vs));
    let mut refinements = 0;
    loop {
        if refinements >= MAX_REFINEMENTS || 2 * xs.len() > MAX_VERTICES {
            return Err(Error::QuadratureDiverged(format!(
                "no agreement to {tol}·h after {refinements} refinements (J/h = {})",
                estimate.re / h_planck
            )));
        }
        let n = xs.len();
        let mut nts = Vec::with_capacity(2 * n);
        let mut nxs = Vec::with_capacity(2 * n);
        let mut nvs = Vec::with_capacity(2 * n);
        for k in 0..n {
            let t_next = if k + 1 < n { ts[k + 1] } else { ts[0] + period };
            let half = 0.5 * (t_next - ts[k]);
            let mid = dp_step(&mut rhs, ts[k], xs[k], vs[k], half)?;
            nts.extend([ts[k], ts[k] + half]);
            nxs.extend([xs[k], mid.x]);
            nvs.extend([vs[k], mid.v]);
        }
        ts = nts;
        xs = nxs;
        vs = nvs;
        refinements += 1;
        let refined = closed_polyline_integral(&xs, &momentum(&vs));
        let delta = (refined - estimate).norm();
        estimate = refined;
        if delta < tol * h_planck {
            break;
        }
    }

    let residual = estimate.im.abs();
    if residual >= tol * h_planck {
        return Err(Error::QuadratureDiverged(format!(
            "imaginary part {residual:e} of the action exceeds {tol}·h"
        )));
    }

    let winding = winding_number(wf, orbit)?;
    let enclosed_zero_count = enclosed_zeros(wf, orbit);
    let is_larger_nest = match *wf.model() {
        ModelSpec::HarmonicOscillator { n: 1, .. } => {
            invariant_value(wf, orbit.points[0].x)?.value > 1.0
        }
        ModelSpec::HarmonicOscillator { n, .. } => winding == n as i64,
        _ => false,
    };

    Ok(OrbitAnalysis {
        period,
        action: estimate.re,
        action_imag_residual: residual,
        action_over_h: estimate.re / h_planck,
        winding,
        enclosed_zero_count,
        is_larger_nest,
        refinements,
        vertices: xs.len(),
    })
}

/// Net change of `arg ψ(x)` around the closed orbit, divided by 2π.
///
/// Only evaluates the stationary spatial wavefunction along the orbit's
/// polyline; it shares nothing with the integrator. An edge whose phase
/// increment is `>= π/2` in magnitude is split at its midpoint until every
/// increment is resolved.
pub fn winding_number(wf: &Wavefunction, orbit: &Trajectory) -> Result<i64> {
    if !wf.is_stationary() {
        return Err(Error::NotStationary);
    }
    let pts = &orbit.points;
    if pts.len() < 3 {
        return Err(Error::NotClosed(
            "too few points for a closed contour".into(),
        ));
    }
    let region = wf.region_of(pts[0].x);
    let psi = |x: C64| wf.evaluate_in(region, x, 0.0).psi;

    let mut total = 0.0;
    let n = pts.len();
    for k in 0..n {
        let a = pts[k].x;
        let b = pts[(k + 1) % n].x;
        total += phase_increment(&psi, a, psi(a), b, psi(b), 0)?;
    }
    let turns = total / (2.0 * PI);
    let snapped = turns.round();
    if (turns - snapped).abs() > INTEGER_SNAP {
        return Err(Error::PhaseAmbiguity { x: pts[0].x });
    }
    Ok(snapped as i64)
}

fn phase_increment<F>(psi: &F, a: C64, pa: C64, b: C64, pb: C64, depth: u32) -> Result<f64>
where
    F: Fn(C64) -> C64,
{
    if pa == C64::new(0.0, 0.0) || pb == C64::new(0.0, 0.0) {
        return Err(Error::PhaseAmbiguity {
            x: if pa.norm() == 0.0 { a } else { b },
        });
    }
    let d = (pb / pa).arg();
    if d.abs() < 0.5 * PI {
        return Ok(d);
    }
    if depth >= MAX_PHASE_DEPTH {
        return Err(Error::PhaseAmbiguity { x: a });
    }
    let m = 0.5 * (a + b);
    let pm = psi(m);
    Ok(phase_increment(psi, a, pa, m, pm, depth + 1)?
        + phase_increment(psi, m, pm, b, pb, depth + 1)?)
}

/// Number of known zeros of the spatial wavefunction inside the orbit polygon,
/// by the geometric (angle-sum) winding number of the polygon about each zero.
pub fn enclosed_zeros(wf: &Wavefunction, orbit: &Trajectory) -> usize {
    let xs: Vec<C64> = orbit.points.iter().map(|p| p.x).collect();
    let (mut lo, mut hi) = (xs[0], xs[0]);
    for x in &xs {
        lo = C64::new(lo.re.min(x.re), lo.im.min(x.im));
        hi = C64::new(hi.re.max(x.re), hi.im.max(x.im));
    }
    wf.spatial_zeros_within(lo, hi)
        .into_iter()
        .filter(|&z| polygon_winding(&xs, z) != 0)
        .count()
}

/// Winding number of the closed polygon `xs` about `z`.
pub fn polygon_winding(xs: &[C64], z: C64) -> i64 {
    let n = xs.len();
    let total: f64 = (0..n)
        .map(|k| ((xs[(k + 1) % n] - z) / (xs[k] - z)).arg())
        .sum();
    (total / (2.0 * PI)).round() as i64
}

/// `(J_high - J_low) / (E_high - E_low)` for consecutive oscillator levels,
/// with `E_n = (n + ½)ħω` and `ω = ħα²/m`. Equals the orbital period when
/// `J` grows by `h` per level.
pub fn dj_de_ratio(
    units: Units,
    alpha: f64,
    n_low: u32,
    n_high: u32,
    low: &OrbitAnalysis,
    high: &OrbitAnalysis,
) -> Result<f64> {
    units.validate()?;
    if n_high != n_low + 1 {
        return Err(Error::InvalidConfig(format!(
            "need n_high = n_low + 1, got {n_low} -> {n_high}"
        )));
    }
    if alpha.is_nan() || alpha <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "alpha must be > 0, got {alpha}"
        )));
    }
    if !(low.is_larger_nest && high.is_larger_nest) {
        return Err(Error::InvalidConfig(
            "both orbits must be larger nests".into(),
        ));
    }
    let omega = units.hbar * alpha * alpha / units.mass;
    let energy = |n: u32| (n as f64 + 0.5) * units.hbar * omega;
    Ok((high.action - low.action) / (energy(n_high) - energy(n_low)))
}
