//! Closed-form wavefunctions continued to complex position.
//!
//! Every model is the standard real-axis solution with `x` replaced by
//! `x_r + i x_i`. Derivatives are analytic, never differenced.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::hermite::{hermite_with_derivatives, hermite_zeros};
use crate::quadrature::adaptive_simpson;

const I: C64 = C64 { re: 0.0, im: 1.0 };
const MAX_OSCILLATOR_N: u32 = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Units {
    pub hbar: f64,
    pub mass: f64,
}

impl Default for Units {
    fn default() -> Self {
        Self {
            hbar: 1.0,
            mass: 1.0,
        }
    }
}

impl Units {
    pub fn validate(&self) -> Result<()> {
        if !(self.hbar.is_finite() && self.hbar > 0.0) {
            return Err(Error::InvalidModel(format!(
                "hbar must be > 0, got {}",
                self.hbar
            )));
        }
        if !(self.mass.is_finite() && self.mass > 0.0) {
            return Err(Error::InvalidModel(format!(
                "mass must be > 0, got {}",
                self.mass
            )));
        }
        Ok(())
    }

    /// Planck's constant `h = 2πħ`.
    pub fn planck(&self) -> f64 {
        2.0 * PI * self.hbar
    }
}

/// One analytic wavefunction family with its physical parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ModelSpec {
    /// Oscillator eigenstate `N e^{-α²x²/2} H_n(αx) e^{-iE_n t/ħ}`.
    HarmonicOscillator { n: u32, alpha: f64 },
    /// `e^{ikx} e^{-iEt/ħ}` with unit amplitude.
    PlaneWave { k: f64 },
    /// Stationary scattering state at energy `energy` over a step of height `v0`.
    /// `reflection` defaults to the matching value `(k - q)/(k + q)`.
    PotentialStep {
        energy: f64,
        v0: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        reflection: Option<f64>,
    },
    /// Free spreading packet with width `sigma` about mean wavenumber `k_bar`.
    GaussianPacket { sigma: f64, k_bar: f64 },
}

impl ModelSpec {
    pub fn oscillator(n: u32) -> Self {
        ModelSpec::HarmonicOscillator { n, alpha: 1.0 }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ModelSpec::HarmonicOscillator { .. } => "harmonic_oscillator",
            ModelSpec::PlaneWave { .. } => "plane_wave",
            ModelSpec::PotentialStep { .. } => "potential_step",
            ModelSpec::GaussianPacket { .. } => "gaussian_packet",
        }
    }
}

/// Ψ and its analytic derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveValue {
    pub psi: C64,
    pub dpsi_dx: C64,
    pub d2psi_dx2: C64,
    pub dpsi_dt: C64,
}

/// Side of the potential step; models without a step live entirely in `Incident`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    Incident,
    Transmitted,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Prepared {
    Oscillator {
        n: u32,
        alpha: f64,
        omega: f64,
        energy: f64,
        norm: f64,
    },
    PlaneWave {
        k: f64,
        energy: f64,
    },
    Step {
        energy: f64,
        v0: f64,
        k: f64,
        q: f64,
        r: f64,
        t: f64,
    },
    // `amp` multiplies (2πσ/a)^{1/2} exp(-(x - iσ²k̄)²/2a); the constant
    // exp(-(σ² + k̄²)/2) is folded into it.
    Packet {
        sigma: f64,
        k_bar: f64,
        amp: f64,
    },
}

/// A validated model with its derived constants precomputed.
#[derive(Debug, Clone, PartialEq)]
pub struct Wavefunction {
    model: ModelSpec,
    units: Units,
    prepared: Prepared,
}

impl Wavefunction {
    pub fn new(model: ModelSpec, units: Units) -> Result<Self> {
        units.validate()?;
        let Units { hbar, mass } = units;
        let prepared = match model {
            ModelSpec::HarmonicOscillator { n, alpha } => {
                if !(alpha.is_finite() && alpha > 0.0) {
                    return Err(Error::InvalidModel(format!(
                        "alpha must be > 0, got {alpha}"
                    )));
                }
                if n > MAX_OSCILLATOR_N {
                    return Err(Error::InvalidModel(format!(
                        "oscillator n must be <= {MAX_OSCILLATOR_N}, got {n}"
                    )));
                }
                let omega = hbar * alpha * alpha / mass;
                let energy = (n as f64 + 0.5) * hbar * omega;
                let log_fact: f64 = (1..=n).map(|j| (j as f64).ln()).sum();
                let log_norm = 0.5 * (alpha.ln() - 0.5 * PI.ln() - n as f64 * 2f64.ln() - log_fact);
                Prepared::Oscillator {
                    n,
                    alpha,
                    omega,
                    energy,
                    norm: log_norm.exp(),
                }
            }
            ModelSpec::PlaneWave { k } => {
                if !k.is_finite() {
                    return Err(Error::InvalidModel(format!("k must be finite, got {k}")));
                }
                Prepared::PlaneWave {
                    k,
                    energy: hbar * hbar * k * k / (2.0 * mass),
                }
            }
            ModelSpec::PotentialStep {
                energy,
                v0,
                reflection,
            } => {
                if !(v0.is_finite() && v0 > 0.0) {
                    return Err(Error::InvalidModel(format!(
                        "step height must be > 0, got {v0}"
                    )));
                }
                if !(energy.is_finite() && energy > v0) {
                    return Err(Error::InvalidModel(format!(
                        "step requires E > V0, got E = {energy}, V0 = {v0}"
                    )));
                }
                let k = (2.0 * mass * energy).sqrt() / hbar;
                let q = (2.0 * mass * (energy - v0)).sqrt() / hbar;
                let r = reflection.unwrap_or((k - q) / (k + q));
                if !(r.is_finite() && (0.0..1.0).contains(&r)) {
                    return Err(Error::InvalidModel(format!(
                        "reflection amplitude must lie in [0, 1), got {r}"
                    )));
                }
                Prepared::Step {
                    energy,
                    v0,
                    k,
                    q,
                    r,
                    t: 1.0 + r,
                }
            }
            ModelSpec::GaussianPacket { sigma, k_bar } => {
                if !(sigma.is_finite() && sigma > 0.0) {
                    return Err(Error::InvalidModel(format!(
                        "sigma must be > 0, got {sigma}"
                    )));
                }
                if !k_bar.is_finite() {
                    return Err(Error::InvalidModel(format!(
                        "k_bar must be finite, got {k_bar}"
                    )));
                }
                let unnormalized = Prepared::Packet {
                    sigma,
                    k_bar,
                    amp: 1.0,
                };
                let half_width = 12.0 * sigma;
                let q = adaptive_simpson(
                    |x| {
                        C64::new(
                            packet_value(unnormalized, units, C64::new(x, 0.0), 0.0)
                                .psi
                                .norm_sqr(),
                            0.0,
                        )
                    },
                    -half_width,
                    half_width,
                    1e-13,
                );
                Prepared::Packet {
                    sigma,
                    k_bar,
                    amp: 1.0 / q.value.re.sqrt(),
                }
            }
        };
        Ok(Self {
            model,
            units,
            prepared,
        })
    }

    pub fn model(&self) -> &ModelSpec {
        &self.model
    }

    pub fn units(&self) -> Units {
        self.units
    }

    pub fn is_stationary(&self) -> bool {
        !matches!(self.prepared, Prepared::Packet { .. })
    }

    pub fn is_step(&self) -> bool {
        matches!(self.prepared, Prepared::Step { .. })
    }

    /// Energy eigenvalue of a stationary model.
    pub fn energy(&self) -> Option<f64> {
        match self.prepared {
            Prepared::Oscillator { energy, .. }
            | Prepared::PlaneWave { energy, .. }
            | Prepared::Step { energy, .. } => Some(energy),
            Prepared::Packet { .. } => None,
        }
    }

    /// Oscillator angular frequency `ħα²/m`.
    pub fn omega(&self) -> Option<f64> {
        match self.prepared {
            Prepared::Oscillator { omega, .. } => Some(omega),
            _ => None,
        }
    }

    /// Wavenumbers `(k, q)` on either side of the step.
    pub fn step_wavenumbers(&self) -> Option<(f64, f64)> {
        match self.prepared {
            Prepared::Step { k, q, .. } => Some((k, q)),
            _ => None,
        }
    }

    /// Reflection and transmission amplitudes of the step.
    pub fn step_amplitudes(&self) -> Option<(f64, f64)> {
        match self.prepared {
            Prepared::Step { r, t, .. } => Some((r, t)),
            _ => None,
        }
    }

    /// Characteristic length: `1/α`, `1/|k|`, `1/k` or `σ`.
    pub fn length_scale(&self) -> f64 {
        match self.prepared {
            Prepared::Oscillator { alpha, .. } => 1.0 / alpha,
            Prepared::PlaneWave { k, .. } => {
                if k == 0.0 {
                    1.0
                } else {
                    1.0 / k.abs()
                }
            }
            Prepared::Step { k, .. } => 1.0 / k,
            Prepared::Packet { sigma, .. } => sigma,
        }
    }

    /// Amplitude `N` in `Ψ = N e^{iŜ/ħ}`: the normalization constant where it
    /// exists, otherwise the unit amplitude of the plane wave or step.
    pub fn reference_amplitude(&self) -> f64 {
        self.normalization_constant().unwrap_or(1.0)
    }

    /// `N` such that `∫|Ψ(x, 0)|² dx = 1` on the real axis.
    pub fn normalization_constant(&self) -> Result<f64> {
        match self.prepared {
            Prepared::Oscillator { norm, .. } => Ok(norm),
            Prepared::Packet { sigma, k_bar, amp } => {
                Ok(amp * (0.5 * (sigma * sigma + k_bar * k_bar)).exp())
            }
            _ => Err(Error::NonNormalizable),
        }
    }

    pub fn region_of(&self, x: C64) -> Region {
        if self.is_step() && x.re >= 0.0 {
            Region::Transmitted
        } else {
            Region::Incident
        }
    }

    pub fn evaluate(&self, x: C64, t: f64) -> WaveValue {
        self.evaluate_in(self.region_of(x), x, t)
    }

    /// Evaluates the analytic form belonging to `region`, regardless of which
    /// side of the step `x` lies on. Used to finish an integration step with
    /// the field it started in.
    pub fn evaluate_in(&self, region: Region, x: C64, t: f64) -> WaveValue {
        let hbar = self.units.hbar;
        match self.prepared {
            Prepared::Oscillator {
                n,
                alpha,
                energy,
                norm,
                ..
            } => {
                let z = alpha * x;
                let gauss = (-0.5 * z * z).exp();
                let (h, dh, d2h) = hermite_with_derivatives(n, z);
                let phase = (-I * energy * t / hbar).exp();
                let base = norm * gauss * phase;
                let psi = base * h;
                WaveValue {
                    psi,
                    dpsi_dx: base * alpha * (dh - z * h),
                    d2psi_dx2: base * alpha * alpha * (d2h - 2.0 * z * dh + (z * z - 1.0) * h),
                    dpsi_dt: -I * energy / hbar * psi,
                }
            }
            Prepared::PlaneWave { k, energy } => {
                let psi = (I * k * x).exp() * (-I * energy * t / hbar).exp();
                WaveValue {
                    psi,
                    dpsi_dx: I * k * psi,
                    d2psi_dx2: -k * k * psi,
                    dpsi_dt: -I * energy / hbar * psi,
                }
            }
            Prepared::Step {
                energy,
                k,
                q,
                r,
                t: trans,
                ..
            } => {
                let phase = (-I * energy * t / hbar).exp();
                match region {
                    Region::Incident => {
                        let fwd = (I * k * x).exp();
                        let back = r * (-I * k * x).exp();
                        let psi = (fwd + back) * phase;
                        WaveValue {
                            psi,
                            dpsi_dx: I * k * (fwd - back) * phase,
                            d2psi_dx2: -k * k * psi,
                            dpsi_dt: -I * energy / hbar * psi,
                        }
                    }
                    Region::Transmitted => {
                        let psi = trans * (I * q * x).exp() * phase;
                        WaveValue {
                            psi,
                            dpsi_dx: I * q * psi,
                            d2psi_dx2: -q * q * psi,
                            dpsi_dt: -I * energy / hbar * psi,
                        }
                    }
                }
            }
            Prepared::Packet { .. } => packet_value(self.prepared, self.units, x, t),
        }
    }

    pub fn potential(&self, x: C64) -> C64 {
        self.potential_in(self.region_of(x), x)
    }

    pub fn potential_in(&self, region: Region, x: C64) -> C64 {
        match self.prepared {
            Prepared::Oscillator { omega, .. } => 0.5 * self.units.mass * omega * omega * x * x,
            Prepared::Step { v0, .. } if region == Region::Transmitted => C64::new(v0, 0.0),
            _ => C64::new(0.0, 0.0),
        }
    }

    /// `(iħ ∂Ψ/∂t + (ħ²/2m) ∂²Ψ/∂x² - VΨ) / max(|Ψ|, floor)`.
    pub fn schrodinger_residual(&self, x: C64, t: f64) -> C64 {
        let Units { hbar, mass } = self.units;
        let region = self.region_of(x);
        let w = self.evaluate_in(region, x, t);
        let v = self.potential_in(region, x);
        let lhs = I * hbar * w.dpsi_dt;
        let rhs = -hbar * hbar / (2.0 * mass) * w.d2psi_dx2 + v * w.psi;
        (lhs - rhs) / w.psi.norm().max(f64::MIN_POSITIVE)
    }

    /// Zeros of the spatial wavefunction inside the box spanned by `lo` and `hi`.
    pub fn spatial_zeros_within(&self, lo: C64, hi: C64) -> Vec<C64> {
        let inside = |z: C64| z.re >= lo.re && z.re <= hi.re && z.im >= lo.im && z.im <= hi.im;
        match self.prepared {
            Prepared::Oscillator { n, alpha, .. } => hermite_zeros(n)
                .into_iter()
                .map(|z| C64::new(z / alpha, 0.0))
                .filter(|&z| inside(z))
                .collect(),
            // e^{2ikx} = -R, restricted to the incident side.
            Prepared::Step { k, r, .. } if r > 0.0 => {
                let im = -r.ln() / (2.0 * k);
                let spacing = PI / k;
                let first = ((lo.re * k / PI - 1.0) / 2.0).floor() as i64;
                let last = ((hi.re * k / PI - 1.0) / 2.0).ceil() as i64;
                (first..=last)
                    .map(|j| C64::new((2 * j + 1) as f64 * spacing / 2.0, im))
                    .filter(|&z| z.re < 0.0 && inside(z))
                    .collect()
            }
            _ => Vec::new(),
        }
    }
}

fn packet_value(prepared: Prepared, units: Units, x: C64, t: f64) -> WaveValue {
    let Prepared::Packet { sigma, k_bar, amp } = prepared else {
        unreachable!("packet_value called for a non-packet model")
    };
    let Units { hbar, mass } = units;
    let width = C64::new(sigma * sigma, hbar * t / mass);
    let dwidth_dt = C64::new(0.0, hbar / mass);
    let centre = C64::new(0.0, sigma * sigma * k_bar);
    let shifted = x - centre;
    let prefactor = (2.0 * PI * sigma / width).sqrt();
    let psi = amp * prefactor * (-shifted * shifted / (2.0 * width)).exp();
    let log_deriv = -shifted / width;
    WaveValue {
        psi,
        dpsi_dx: log_deriv * psi,
        d2psi_dx2: (log_deriv * log_deriv - 1.0 / width) * psi,
        dpsi_dt: dwidth_dt * (-0.5 / width + shifted * shifted / (2.0 * width * width)) * psi,
    }
}
