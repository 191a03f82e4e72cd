//! Real-axis expectation values `∫ Ψ* Ô Ψ dx` of position, momentum and energy.
//!
//! The integrands are used as written, without dividing by the norm, so the
//! reported norm doubles as a check on the normalization constant.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::adaptive_simpson;
use crate::wavefunction::Wavefunction;

/// `|Ψ(±L)|²` must fall below this fraction of the sampled peak density.
const TAIL_FRACTION: f64 = 1e-16;
const TAIL_SAMPLES: usize = 2001;
const MAX_DOUBLINGS: u32 = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    Norm,
    X,
    P,
    E,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Expectation {
    pub value: f64,
    /// `|Im ∫ Ψ* Ô Ψ dx|`; nonzero only through quadrature and truncation error.
    pub imag_residual: f64,
    pub error_estimate: f64,
    pub truncation_l: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpectationReport {
    pub t: f64,
    pub norm: f64,
    pub mean_x: f64,
    pub mean_p: f64,
    pub mean_e: f64,
    pub truncation_l: f64,
    pub quad_tol: f64,
    /// Largest imaginary residual over the four integrals.
    pub imag_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    /// Fixed half-width of the integration window; chosen from the tails when `None`.
    pub truncation_l: Option<f64>,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            truncation_l: None,
        }
    }
}

fn density(wf: &Wavefunction, x: f64, t: f64) -> f64 {
    wf.evaluate(C64::new(x, 0.0), t).psi.norm_sqr()
}

/// Smallest `L = 8ℓ · 2^j` with `|Ψ(±L)|²` below `1e-16` of the peak density
/// sampled on `[-L, L]`.
pub fn truncation_half_width(wf: &Wavefunction, t: f64) -> Result<f64> {
    let mut l = 8.0 * wf.length_scale();
    for _ in 0..MAX_DOUBLINGS {
        let peak = (0..TAIL_SAMPLES)
            .map(|j| density(wf, -l + 2.0 * l * j as f64 / (TAIL_SAMPLES - 1) as f64, t))
            .fold(0.0, f64::max);
        let tail = density(wf, -l, t).max(density(wf, l, t));
        if peak > 0.0 && tail < TAIL_FRACTION * peak {
            return Ok(l);
        }
        l *= 2.0;
    }
    Err(Error::QuadratureDiverged(format!(
        "tails of |psi|^2 never fell below {TAIL_FRACTION} of the peak"
    )))
}

fn check(wf: &Wavefunction, quad: &QuadratureConfig) -> Result<()> {
    if wf.normalization_constant().is_err() {
        return Err(Error::NonNormalizable);
    }
    if quad.rel_tol.is_nan() || quad.rel_tol <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "quadrature tolerance must be > 0, got {}",
            quad.rel_tol
        )));
    }
    if let Some(l) = quad.truncation_l {
        if !(l > 0.0 && l.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "truncation half-width must be > 0, got {l}"
            )));
        }
    }
    Ok(())
}

fn integrate_at(
    wf: &Wavefunction,
    t: f64,
    which: Observable,
    l: f64,
    rel_tol: f64,
) -> Result<Expectation> {
    let u = wf.units();
    let integrand = |x: f64| {
        let z = C64::new(x, 0.0);
        let w = wf.evaluate(z, t);
        let op = match which {
            Observable::Norm => w.psi,
            Observable::X => z * w.psi,
            Observable::P => C64::new(0.0, -u.hbar) * w.dpsi_dx,
            Observable::E => {
                -u.hbar * u.hbar / (2.0 * u.mass) * w.d2psi_dx2 + wf.potential(z) * w.psi
            }
        };
        w.psi.conj() * op
    };
    let q = adaptive_simpson(integrand, -l, l, rel_tol);
    if !q.value.re.is_finite() || !q.value.im.is_finite() {
        return Err(Error::QuadratureDiverged(format!(
            "{which:?} integral is not finite"
        )));
    }
    if q.depth_limited {
        return Err(Error::QuadratureDiverged(format!(
            "{which:?} integral hit the refinement limit"
        )));
    }
    Ok(Expectation {
        value: q.value.re,
        imag_residual: q.value.im.abs(),
        error_estimate: q.error_estimate,
        truncation_l: l,
    })
}

/// `∫_{-L}^{L} Ψ* Ô Ψ dx` at time `t`.
pub fn expectation(
    wf: &Wavefunction,
    t: f64,
    which: Observable,
    quad: &QuadratureConfig,
) -> Result<Expectation> {
    check(wf, quad)?;
    let l = match quad.truncation_l {
        Some(l) => l,
        None => truncation_half_width(wf, t)?,
    };
    integrate_at(wf, t, which, l, quad.rel_tol)
}

/// Norm, `⟨x⟩`, `⟨p⟩` and `⟨E⟩` on a shared window.
pub fn expectation_report(
    wf: &Wavefunction,
    t: f64,
    quad: &QuadratureConfig,
) -> Result<ExpectationReport> {
    check(wf, quad)?;
    let l = match quad.truncation_l {
        Some(l) => l,
        None => truncation_half_width(wf, t)?,
    };
    let [norm, x, p, e] = [
        Observable::Norm,
        Observable::X,
        Observable::P,
        Observable::E,
    ]
    .map(|o| integrate_at(wf, t, o, l, quad.rel_tol));
    let (norm, x, p, e) = (norm?, x?, p?, e?);
    Ok(ExpectationReport {
        t,
        norm: norm.value,
        mean_x: x.value,
        mean_p: p.value,
        mean_e: e.value,
        truncation_l: l,
        quad_tol: quad.rel_tol,
        imag_residual: [norm, x, p, e]
            .iter()
            .map(|q| q.imag_residual)
            .fold(0.0, f64::max),
    })
}
