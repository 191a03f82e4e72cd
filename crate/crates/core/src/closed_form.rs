//! Exact solutions and conserved quantities for the models that have them.
//! Used as oracles for the integrator.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::wavefunction::{ModelSpec, Region, Wavefunction};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Exact `x(t)` for an orbit through `x0` at `t = 0`.
///
/// * oscillator `n = 0`: `x = x0 e^{iωt}`
/// * oscillator `n = 1`: `(αx)² = 1 + A e^{2iωt}`, `A = (αx0)² - 1`; the square
///   root follows the continuous branch from `t = 0`
/// * plane wave: `x = x0 + ħkt/m`
/// * packet: `x = x0 + ħk̄t/m + i (ħ/m)(x0/σ²) t`
pub fn closed_form_position(wf: &Wavefunction, x0: C64, t: f64) -> Result<C64> {
    let u = wf.units();
    match *wf.model() {
        ModelSpec::HarmonicOscillator { n: 0, .. } => {
            let omega = wf.omega().expect("oscillator");
            Ok(x0 * (I * omega * t).exp())
        }
        ModelSpec::HarmonicOscillator { n: 1, alpha } => {
            let omega = wf.omega().expect("oscillator");
            let z0 = alpha * x0;
            let a = z0 * z0 - 1.0;
            let w = |s: f64| 1.0 + a * (2.0 * I * omega * s).exp();
            // Track arg(w) continuously so that sqrt stays on one branch.
            let w0 = w(0.0);
            let mut phase = w0.arg();
            if (w0.norm().sqrt() * (I * 0.5 * phase).exp() - z0).norm()
                > (z0.norm() * 1e-8).max(1e-12)
            {
                phase += 2.0 * PI;
            }
            let samples = ((2.0 * omega * t).abs() / (PI / 16.0)).ceil().max(1.0) as usize;
            let mut prev = w0;
            for j in 1..=samples {
                let cur = w(t * j as f64 / samples as f64);
                phase += (cur / prev).arg();
                prev = cur;
            }
            Ok(prev.norm().sqrt() * (I * 0.5 * phase).exp() / alpha)
        }
        ModelSpec::PlaneWave { k } => Ok(x0 + u.hbar * k * t / u.mass),
        ModelSpec::GaussianPacket { sigma, k_bar } => {
            let rate = u.hbar / u.mass;
            Ok(x0 + rate * k_bar * t + I * rate * x0 / (sigma * sigma) * t)
        }
        ModelSpec::HarmonicOscillator { .. } => Err(Error::UnsupportedModel(
            "no usable closed-form position for oscillator n >= 2",
        )),
        ModelSpec::PotentialStep { .. } => Err(Error::UnsupportedModel(
            "no closed-form position for the potential step",
        )),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InvariantKind {
    /// `|αx|`, oscillator `n = 0`.
    Radius,
    /// `|(αx)² - 1|`, oscillator `n = 1`.
    NestValueN1,
    /// `|4αx((αx)² - 5/2)²|`, oscillator `n = 2`.
    NestValueN2,
    /// Step contour level `c`.
    StepContour,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvariantProbe {
    pub kind: InvariantKind,
    pub value: f64,
}

/// Level `c = 2R cos(2k x_r) - e^{-2k x_i} - R² e^{2k x_i}` of the incident-side
/// flow. This is `-|u - 2R + R²/u|` with `u = e^{2ikx}`, so `c <= 0` and it is
/// zero only at the stagnation points `e^{2ikx} = R`. For `R² = 1/2` it is
/// `√2 cos 2kx_r - e^{-2kx_i} - ½ e^{2kx_i}`.
///
/// Evaluated without regard to the side of the step; see [`invariant_value`]
/// for the checked version.
pub fn step_contour_level(wf: &Wavefunction, x: C64) -> Result<f64> {
    let (Some((k, _)), Some((r, _))) = (wf.step_wavenumbers(), wf.step_amplitudes()) else {
        return Err(Error::UnsupportedModel(
            "contour level is defined for the potential step",
        ));
    };
    let grow = (2.0 * k * x.im).exp();
    Ok(2.0 * r * (2.0 * k * x.re).cos() - 1.0 / grow - r * r * grow)
}

/// Quantity conserved along exact trajectories of the model.
pub fn invariant_value(wf: &Wavefunction, x: C64) -> Result<InvariantProbe> {
    match *wf.model() {
        ModelSpec::HarmonicOscillator { n, alpha } => {
            let z = alpha * x;
            let (kind, value) = match n {
                0 => (InvariantKind::Radius, z.norm()),
                1 => (InvariantKind::NestValueN1, (z * z - 1.0).norm()),
                2 => (
                    InvariantKind::NestValueN2,
                    (4.0 * z * (z * z - 2.5).powi(2)).norm(),
                ),
                _ => {
                    return Err(Error::UnsupportedModel(
                        "invariant known for oscillator n <= 2",
                    ))
                }
            };
            Ok(InvariantProbe { kind, value })
        }
        ModelSpec::PotentialStep { .. } => {
            if wf.region_of(x) != Region::Incident {
                return Err(Error::UnsupportedModel(
                    "step contour level is defined for Re x < 0",
                ));
            }
            Ok(InvariantProbe {
                kind: InvariantKind::StepContour,
                value: step_contour_level(wf, x)?,
            })
        }
        _ => Err(Error::UnsupportedModel("no invariant for this model")),
    }
}

/// Stagnation point `x = i ln(1/R)/(2k)` of the incident-side field nearest
/// the step (`e^{2ikx} = R`).
pub fn step_stagnation_point(wf: &Wavefunction) -> Result<C64> {
    let (Some((k, _)), Some((r, _))) = (wf.step_wavenumbers(), wf.step_amplitudes()) else {
        return Err(Error::UnsupportedModel(
            "stagnation point is defined for the potential step",
        ));
    };
    if r <= 0.0 {
        return Err(Error::UnsupportedModel(
            "no stagnation point without reflection",
        ));
    }
    Ok(C64::new(0.0, -r.ln() / (2.0 * k)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::velocity::VelocityField;
    use crate::wavefunction::Units;

    fn wf(model: ModelSpec) -> Wavefunction {
        Wavefunction::new(model, Units::default()).unwrap()
    }

    fn half_reflection() -> Wavefunction {
        wf(ModelSpec::PotentialStep {
            energy: 0.5,
            v0: 0.25,
            reflection: Some(0.5f64.sqrt()),
        })
    }

    #[test]
    fn ground_state_real_part_is_classical() {
        let w = wf(ModelSpec::oscillator(0));
        for t in [0.0, 0.4, 1.7, 5.0] {
            let x = closed_form_position(&w, C64::new(1.5, 0.0), t).unwrap();
            assert!((x.re - 1.5 * t.cos()).abs() < 1e-14);
        }
    }

    #[test]
    fn first_excited_initial_point_and_constant() {
        let w = wf(ModelSpec::oscillator(1));
        let x0 = C64::new(1.55, 0.0);
        assert!((closed_form_position(&w, x0, 0.0).unwrap() - x0).norm() < 1e-14);
        assert!((x0 * x0 - 1.0 - C64::new(1.4025, 0.0)).norm() < 1e-14);
        // Larger nest: the branch flips after π/ω, so x(π) = -x0 and x(2π) = x0.
        let half = closed_form_position(&w, x0, PI).unwrap();
        assert!((half + x0).norm() < 1e-12, "{half}");
        let full = closed_form_position(&w, x0, 2.0 * PI).unwrap();
        assert!((full - x0).norm() < 1e-12, "{full}");
        // Subnest: back after π/ω.
        let sub = C64::new(0.5, 0.0);
        assert!((closed_form_position(&w, sub, PI).unwrap() - sub).norm() < 1e-12);
    }

    #[test]
    fn first_excited_closed_form_solves_the_ode() {
        // Oracle by differencing the closed form against the field.
        let w = wf(ModelSpec::oscillator(1));
        let f = VelocityField::new(&w);
        let x0 = C64::new(1.2, 0.3);
        for t in [0.3, 1.1, 2.9, 4.4] {
            let h = 1e-5;
            let fd = (closed_form_position(&w, x0, t + h).unwrap()
                - closed_form_position(&w, x0, t - h).unwrap())
                / (2.0 * h);
            let x = closed_form_position(&w, x0, t).unwrap();
            let v = f.complex_velocity(x, t).unwrap().xdot;
            assert!((fd - v).norm() < 1e-7 * (1.0 + v.norm()), "t = {t}");
        }
    }

    #[test]
    fn packet_centre_stays_real() {
        let w = wf(ModelSpec::GaussianPacket {
            sigma: 1.0,
            k_bar: 1.3,
        });
        let x = closed_form_position(&w, C64::new(0.0, 0.0), 2.0).unwrap();
        assert_eq!(x, C64::new(2.6, 0.0));
    }

    #[test]
    fn unsupported_models() {
        let w = wf(ModelSpec::oscillator(2));
        assert!(matches!(
            closed_form_position(&w, C64::new(1.0, 0.0), 1.0),
            Err(Error::UnsupportedModel(_))
        ));
        assert!(matches!(
            closed_form_position(&half_reflection(), C64::new(-1.0, 0.0), 1.0),
            Err(Error::UnsupportedModel(_))
        ));
        let w = wf(ModelSpec::oscillator(3));
        assert!(invariant_value(&w, C64::new(1.0, 0.0)).is_err());
        assert!(invariant_value(&half_reflection(), C64::new(0.5, 0.0)).is_err());
    }

    #[test]
    fn radius_invariant() {
        let w = wf(ModelSpec::oscillator(0));
        for theta in [0.0, 1.0, 2.5, -2.0] {
            let p = invariant_value(&w, 2.0 * (I * theta).exp()).unwrap();
            assert_eq!(p.kind, InvariantKind::Radius);
            assert!((p.value - 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn step_stagnation_point_has_zero_level_and_velocity() {
        let w = half_reflection();
        let x = step_stagnation_point(&w).unwrap();
        assert!((x - C64::new(0.0, 2f64.ln() / 4.0)).norm() < 1e-15);
        // Shift infinitesimally into the incident side.
        let xs = C64::new(-1e-300, x.im);
        assert!(invariant_value(&w, xs).unwrap().value.abs() < 1e-15);
        let v = VelocityField::new(&w).complex_velocity(xs, 0.0).unwrap();
        assert!(v.xdot.norm() < 1e-15);
    }

    #[test]
    fn step_level_matches_half_reflection_formula() {
        let w = half_reflection();
        for x in [
            C64::new(-1.0, 0.3),
            C64::new(-4.0, -0.7),
            C64::new(-0.2, 0.9),
        ] {
            let written_out =
                2f64.sqrt() * (2.0 * x.re).cos() - (-2.0 * x.im).exp() - 0.5 * (2.0 * x.im).exp();
            assert!((step_contour_level(&w, x).unwrap() - written_out).abs() < 1e-14);
        }
    }
}
