//! Complex quantum trajectories.
//!
//! Stationary and time-dependent wavefunctions are continued to complex `x`
//! and define a velocity field `ẋ = (ħ/im) Ψ'/Ψ`. This crate integrates that
//! field, finds closed orbits, measures their action `∮ m ẋ dx`, and computes
//! ordinary expectation values on the real axis for comparison.

pub mod action;
pub mod closed_form;
pub mod error;
pub mod hermite;
pub mod integrator;
pub mod observables;
pub mod quadrature;
pub mod trajectory;
pub mod velocity;
pub mod wavefunction;

pub use num_complex::Complex64 as C64;

pub use action::{action_of_orbit, dj_de_ratio, winding_number, OrbitAnalysis};
pub use closed_form::{closed_form_position, invariant_value, InvariantKind, InvariantProbe};
pub use error::{Error, Result};
pub use integrator::IntegratorConfig;
pub use observables::{
    expectation, expectation_report, Expectation, ExpectationReport, Observable, QuadratureConfig,
};
pub use trajectory::{detect_period, integrate, Orbit, Termination, Trajectory, TrajectoryPoint};
pub use velocity::{EnergySample, VelocityField, VelocitySample, DEFAULT_PSI_FLOOR};
pub use wavefunction::{ModelSpec, Region, Units, WaveValue, Wavefunction};
