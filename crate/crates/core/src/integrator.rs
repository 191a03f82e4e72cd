//! Embedded Dormand-Prince 5(4) integrator for a scalar complex ODE
//! `dx/dt = f(t, x)`, with PI step-size control and cubic Hermite dense output.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    /// Node threshold handed to the velocity field.
    pub psi_floor: f64,
    pub max_steps: usize,
    /// Closure tolerance for orbit detection, relative to the orbit scale.
    pub close_eps: f64,
    /// End the trajectory (instead of switching field) when it crosses `Re x = 0`
    /// of a potential step.
    pub stop_at_step_boundary: bool,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            max_step: f64::INFINITY,
            psi_floor: crate::velocity::DEFAULT_PSI_FLOOR,
            max_steps: 1_000_000,
            close_eps: 1e-6,
            stop_at_step_boundary: false,
        }
    }
}

impl IntegratorConfig {
    pub fn with_tolerances(mut self, rel_tol: f64, abs_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self.abs_tol = abs_tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v > 0.0 && !v.is_nan();
        if !(positive(self.rel_tol) && positive(self.abs_tol)) {
            return Err(Error::InvalidConfig(format!(
                "tolerances must be > 0 (rtol = {}, atol = {})",
                self.rel_tol, self.abs_tol
            )));
        }
        if !positive(self.max_step) || !positive(self.psi_floor) || !positive(self.close_eps) {
            return Err(Error::InvalidConfig(
                "max_step, psi_floor and close_eps must be > 0".into(),
            ));
        }
        if self.max_steps == 0 {
            return Err(Error::InvalidConfig("max_steps must be > 0".into()));
        }
        Ok(())
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
// 5th-order weights (also the last row of A, FSAL)
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// 5th minus 4th order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 10.0;

/// Result of one Dormand-Prince step of size `h` from `(t, x)` with `v = f(t, x)`.
#[derive(Debug, Clone, Copy)]
pub struct RawStep {
    pub x: C64,
    /// `f(t + h, x)`, free thanks to FSAL.
    pub v: C64,
    /// Local error estimate (5th minus embedded 4th order solution).
    pub error: C64,
}

/// A single step of the 5(4) pair. Also used to re-evaluate the solution at
/// intermediate times from an accepted point, which is as accurate as the
/// accepted step itself.
pub fn dp_step<F>(f: &mut F, t: f64, x: C64, v: C64, h: f64) -> Result<RawStep>
where
    F: FnMut(f64, C64) -> Result<C64>,
{
    let k1 = v;
    let k2 = f(t + C2 * h, x + h * (A21 * k1))?;
    let k3 = f(t + C3 * h, x + h * (A31 * k1 + A32 * k2))?;
    let k4 = f(t + C4 * h, x + h * (A41 * k1 + A42 * k2 + A43 * k3))?;
    let k5 = f(
        t + C5 * h,
        x + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4),
    )?;
    let k6 = f(
        t + h,
        x + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5),
    )?;
    let x_new = x + h * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6);
    let k7 = f(t + h, x_new)?;
    let error = h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7);
    Ok(RawStep {
        x: x_new,
        v: k7,
        error,
    })
}

/// An accepted step, with both end states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub t0: f64,
    pub x0: C64,
    pub v0: C64,
    pub t1: f64,
    pub x1: C64,
    pub v1: C64,
}

impl Step {
    pub fn h(&self) -> f64 {
        self.t1 - self.t0
    }

    /// Cubic Hermite interpolant through both end states.
    pub fn interpolate(&self, t: f64) -> C64 {
        let h = self.h();
        let s = (t - self.t0) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.x0 + h10 * h * self.v0 + h01 * self.x1 + h11 * h * self.v1
    }
}

/// Adaptive driver. Each call to [`DormandPrince::step`] returns one accepted step.
pub struct DormandPrince<F> {
    f: F,
    t: f64,
    x: C64,
    v: C64,
    t_end: f64,
    dir: f64,
    h: f64,
    err_prev: f64,
    rel_tol: f64,
    abs_tol: f64,
    max_step: f64,
    max_steps: usize,
    steps: usize,
    rejected: usize,
}

impl<F> DormandPrince<F>
where
    F: FnMut(f64, C64) -> Result<C64>,
{
    pub fn new(mut f: F, t0: f64, x0: C64, t_end: f64, config: &IntegratorConfig) -> Result<Self> {
        config.validate()?;
        let v = f(t0, x0)?;
        let dir = if t_end >= t0 { 1.0 } else { -1.0 };
        let span = (t_end - t0).abs();
        // 1% of the time needed to move by the local scale of x
        let tol_scale = config.abs_tol + config.rel_tol * x0.norm();
        let h0 = if v.norm() > 0.0 {
            let d0 = x0.norm().max(tol_scale / config.rel_tol);
            0.01 * d0 / v.norm()
        } else {
            1e-3
        };
        let h0 = h0.min(config.max_step).min(span.max(f64::MIN_POSITIVE));
        Ok(Self {
            f,
            t: t0,
            x: x0,
            v,
            t_end,
            dir,
            h: h0,
            err_prev: 1e-4,
            rel_tol: config.rel_tol,
            abs_tol: config.abs_tol,
            max_step: config.max_step,
            max_steps: config.max_steps,
            steps: 0,
            rejected: 0,
        })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn x(&self) -> C64 {
        self.x
    }

    pub fn v(&self) -> C64 {
        self.v
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn rejected(&self) -> usize {
        self.rejected
    }

    pub fn finished(&self) -> bool {
        self.t == self.t_end
    }

    /// Moves the end time, e.g. to keep integrating an orbit until it closes.
    pub fn set_end(&mut self, t_end: f64) {
        self.t_end = t_end;
    }

    /// Evaluates the right-hand side.
    pub fn rhs(&mut self, t: f64, x: C64) -> Result<C64> {
        (self.f)(t, x)
    }

    /// Solution at `t` inside `step`, by re-stepping from its start.
    pub fn resample(&mut self, step: &Step, t: f64) -> Result<(C64, C64)> {
        if t == step.t0 {
            return Ok((step.x0, step.v0));
        }
        let raw = dp_step(&mut self.f, step.t0, step.x0, step.v0, t - step.t0)?;
        Ok((raw.x, raw.v))
    }

    /// Advances by one accepted step; `None` once `t_end` has been reached.
    pub fn step(&mut self) -> Result<Option<Step>> {
        if self.finished() {
            return Ok(None);
        }
        let mut last_failure_rejected = false;
        loop {
            if self.steps + self.rejected >= self.max_steps {
                return Err(Error::MaxSteps(self.max_steps));
            }
            let remaining = (self.t_end - self.t).abs();
            let mut h = self.h.min(self.max_step);
            let hits_end = h >= remaining;
            if hits_end {
                h = remaining;
            }
            let h_min = 16.0 * f64::EPSILON * self.t.abs().max(1.0);
            if h < h_min && !hits_end {
                return Err(Error::StepUnderflow {
                    t: self.t,
                    x: self.x,
                });
            }
            let signed = self.dir * h;

            let raw = match dp_step(&mut self.f, self.t, self.x, self.v, signed) {
                Ok(raw) => raw,
                // A stage landed on a node: shrink and retry.
                Err(Error::NodeSingularity { .. }) => {
                    self.rejected += 1;
                    self.h = 0.25 * h;
                    last_failure_rejected = true;
                    continue;
                }
                Err(e) => return Err(e),
            };

            let scale = self.abs_tol + self.rel_tol * self.x.norm().max(raw.x.norm());
            let err = raw.error.norm() / scale;
            if !err.is_finite() {
                self.rejected += 1;
                self.h = 0.25 * h;
                last_failure_rejected = true;
                continue;
            }

            let expo = 0.2 - 0.75 * BETA;
            let fac11 = err.powf(expo);
            if err <= 1.0 {
                let mut fac = fac11 / self.err_prev.powf(BETA);
                fac = (fac / SAFETY).clamp(1.0 / MAX_FACTOR, 1.0 / MIN_FACTOR);
                let mut h_new = h / fac;
                if last_failure_rejected {
                    h_new = h_new.min(h);
                }
                self.err_prev = err.max(1e-4);
                let step = Step {
                    t0: self.t,
                    x0: self.x,
                    v0: self.v,
                    t1: if hits_end {
                        self.t_end
                    } else {
                        self.t + signed
                    },
                    x1: raw.x,
                    v1: raw.v,
                };
                self.t = step.t1;
                self.x = raw.x;
                self.v = raw.v;
                if !hits_end || h_new > self.h {
                    self.h = h_new;
                }
                self.steps += 1;
                return Ok(Some(step));
            }
            self.rejected += 1;
            last_failure_rejected = true;
            self.h = h / (1.0 / MIN_FACTOR).min(fac11 / SAFETY);
        }
    }

    /// Restarts from a new state, keeping the current step-size estimate.
    pub fn restart(&mut self, t: f64, x: C64) -> Result<()> {
        self.v = (self.f)(t, x)?;
        self.t = t;
        self.x = x;
        Ok(())
    }
}
