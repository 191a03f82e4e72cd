//! Shared fixtures for the benchmarks.

use cqtraj_core::{IntegratorConfig, ModelSpec, Units, Wavefunction};

pub fn oscillator(n: u32) -> Wavefunction {
    Wavefunction::new(ModelSpec::oscillator(n), Units::default()).expect("valid oscillator")
}

pub fn packet() -> Wavefunction {
    Wavefunction::new(
        ModelSpec::GaussianPacket {
            sigma: 1.0,
            k_bar: 1.0,
        },
        Units::default(),
    )
    .expect("valid packet")
}

pub fn step() -> Wavefunction {
    let model = ModelSpec::PotentialStep {
        energy: 0.5,
        v0: 0.25,
        reflection: Some(0.5f64.sqrt()),
    };
    Wavefunction::new(model, Units::default()).expect("valid step")
}

pub fn tight() -> IntegratorConfig {
    IntegratorConfig::default().with_tolerances(1e-11, 1e-13)
}
