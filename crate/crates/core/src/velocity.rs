//! Complex velocity `ẋ = (ħ/im) Ψ'/Ψ`, its real part, the standard real-axis
//! guidance velocity, the stationary energy functional and the complex
//! Hamilton-Jacobi function `Ŝ = (ħ/i) ln(Ψ/N)`.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::wavefunction::{Region, WaveValue, Wavefunction};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Default node-proximity threshold, see [`VelocityField::with_psi_floor`].
pub const DEFAULT_PSI_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocitySample {
    pub xdot: C64,
    /// Always exactly `xdot.re`.
    pub xdot_r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergySample {
    pub energy: C64,
    /// `(ħ/2i) ∂ẋ/∂x`.
    pub quantum_term: C64,
}

#[derive(Debug, Clone, Copy)]
pub struct VelocityField<'a> {
    wf: &'a Wavefunction,
    psi_floor: f64,
}

impl<'a> VelocityField<'a> {
    pub fn new(wf: &'a Wavefunction) -> Self {
        Self {
            wf,
            psi_floor: DEFAULT_PSI_FLOOR,
        }
    }

    /// Sets the node threshold. A point is treated as a node when
    /// `|Ψ| <= floor (|Ψ| + ℓ|Ψ'|)` with `ℓ` the model length scale, i.e. when
    /// it lies within roughly `floor · ℓ` of a simple zero. Scaling by the
    /// local derivative keeps Gaussian tails, where `Ψ` is tiny but smooth,
    /// from being flagged.
    pub fn with_psi_floor(mut self, psi_floor: f64) -> Self {
        self.psi_floor = psi_floor;
        self
    }

    pub fn wavefunction(&self) -> &'a Wavefunction {
        self.wf
    }

    pub fn psi_floor(&self) -> f64 {
        self.psi_floor
    }

    fn checked(&self, x: C64, w: WaveValue) -> Result<WaveValue> {
        let mag = w.psi.norm();
        let local = mag + self.wf.length_scale() * w.dpsi_dx.norm();
        if !mag.is_finite() || !w.dpsi_dx.norm().is_finite() || mag <= self.psi_floor * local {
            return Err(Error::NodeSingularity { x });
        }
        Ok(w)
    }

    fn prefactor(&self) -> C64 {
        let u = self.wf.units();
        u.hbar / (I * u.mass)
    }

    pub fn complex_velocity(&self, x: C64, t: f64) -> Result<VelocitySample> {
        self.complex_velocity_in(self.wf.region_of(x), x, t)
    }

    /// Velocity from the analytic form of `region`; see [`Wavefunction::evaluate_in`].
    pub fn complex_velocity_in(&self, region: Region, x: C64, t: f64) -> Result<VelocitySample> {
        let w = self.checked(x, self.wf.evaluate_in(region, x, t))?;
        let xdot = self.prefactor() * w.dpsi_dx / w.psi;
        Ok(VelocitySample {
            xdot,
            xdot_r: xdot.re,
        })
    }

    /// Physical velocity `Re ẋ` at `x_r + i x_i`.
    pub fn physical_velocity(&self, x_r: f64, x_i: f64, t: f64) -> Result<f64> {
        Ok(self.complex_velocity(C64::new(x_r, x_i), t)?.xdot_r)
    }

    /// Standard guidance velocity `(ħ/2im)(Ψ*Ψ' - Ψ'*Ψ)/(Ψ*Ψ)` on the real axis.
    pub fn dbb_velocity(&self, x_r: f64, t: f64) -> Result<f64> {
        let x = C64::new(x_r, 0.0);
        let w = self.checked(x, self.wf.evaluate(x, t))?;
        let u = self.wf.units();
        let num = w.psi.conj() * w.dpsi_dx - w.dpsi_dx.conj() * w.psi;
        let den = w.psi.conj() * w.psi;
        let v = u.hbar / (2.0 * I * u.mass) * num / den;
        Ok(v.re)
    }

    /// `E = ½mẋ² + V + (ħ/2i)∂ẋ/∂x` with `∂ẋ/∂x = (ħ/im)(Ψ''/Ψ - (Ψ'/Ψ)²)`.
    pub fn energy(&self, x: C64, t: f64) -> Result<EnergySample> {
        if !self.wf.is_stationary() {
            return Err(Error::NotStationary);
        }
        let region = self.wf.region_of(x);
        let w = self.checked(x, self.wf.evaluate_in(region, x, t))?;
        let u = self.wf.units();
        let log_d = w.dpsi_dx / w.psi;
        let xdot = self.prefactor() * log_d;
        let dxdot_dx = self.prefactor() * (w.d2psi_dx2 / w.psi - log_d * log_d);
        let quantum_term = u.hbar / (2.0 * I) * dxdot_dx;
        let energy = 0.5 * u.mass * xdot * xdot + self.wf.potential_in(region, x) + quantum_term;
        Ok(EnergySample {
            energy,
            quantum_term,
        })
    }

    /// Principal branch of `(ħ/i) ln(Ψ/N)`; defined up to multiples of `2πħ`.
    pub fn hj_function(&self, x: C64, t: f64) -> Result<C64> {
        let w = self.checked(x, self.wf.evaluate(x, t))?;
        let ratio = w.psi / self.wf.reference_amplitude();
        Ok(self.wf.units().hbar / I * ratio.ln())
    }
}
