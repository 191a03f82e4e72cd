//! Scenario configuration: flags merged over an optional JSON file, then
//! validated into core types before anything runs.

use std::fs;
use std::path::{Path, PathBuf};

use cqtraj_core::{IntegratorConfig, ModelSpec, Units, Wavefunction, C64};
use serde::Deserialize;

use crate::args::{Common, Quantity};
use crate::error::CliError;

/// JSON form of a scenario. Keys mirror the command-line flags.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub model: Option<String>,
    pub n: Option<u32>,
    pub alpha: Option<f64>,
    pub k: Option<f64>,
    pub e: Option<f64>,
    pub v0: Option<f64>,
    pub r: Option<f64>,
    pub sigma: Option<f64>,
    pub kbar: Option<f64>,
    #[serde(default)]
    pub x0: Vec<String>,
    pub t0: Option<f64>,
    pub t1: Option<f64>,
    pub rtol: Option<f64>,
    pub atol: Option<f64>,
    pub out: Option<PathBuf>,
    pub hbar: Option<f64>,
    pub mass: Option<f64>,
    pub max_step: Option<f64>,
    pub psi_floor: Option<f64>,
    pub max_steps: Option<usize>,
    pub close_eps: Option<f64>,
    pub stop_at_step_boundary: Option<bool>,
    // field
    pub quantity: Option<Quantity>,
    pub nx: Option<usize>,
    pub ny: Option<usize>,
    // expect
    #[serde(default)]
    pub t: Vec<f64>,
    pub quad_tol: Option<f64>,
    pub half_width: Option<f64>,
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Flags win over file values.
    pub fn merge_flags(mut self, c: &Common) -> Self {
        macro_rules! over {
            ($($dst:ident <- $src:ident),*) => { $( if c.$src.is_some() { self.$dst = c.$src.clone(); } )* };
        }
        over!(model <- model, n <- n, alpha <- alpha, k <- k, e <- energy, v0 <- v0, r <- reflection,
              sigma <- sigma, kbar <- kbar, t0 <- t0, t1 <- t1, rtol <- rtol, atol <- atol, out <- out);
        if !c.x0.is_empty() {
            self.x0 = c.x0.clone();
        }
        self
    }

    pub fn from_common(c: &Common) -> Result<Self, CliError> {
        let base = match &c.json_config {
            Some(p) => Self::load(p)?,
            None => Self::default(),
        };
        Ok(base.merge_flags(c))
    }
}

/// A validated scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub wavefunction: Wavefunction,
    pub x0: Vec<C64>,
    pub t0: f64,
    pub t1: Option<f64>,
    pub integrator: IntegratorConfig,
    pub out: PathBuf,
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

pub fn parse_x0(s: &str) -> Result<C64, CliError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |p: &str| {
        p.parse::<f64>()
            .map_err(|_| bad(format!("bad --x0 component {p:?} in {s:?}")))
    };
    let x = match parts.as_slice() {
        [re] => C64::new(num(re)?, 0.0),
        [re, im] => C64::new(num(re)?, num(im)?),
        _ => return Err(bad(format!("--x0 expects \"re,im\", got {s:?}"))),
    };
    if !(x.re.is_finite() && x.im.is_finite()) {
        return Err(bad(format!("--x0 must be finite, got {s:?}")));
    }
    Ok(x)
}

fn model_from(c: &ScenarioConfig) -> Result<ModelSpec, CliError> {
    let name = c
        .model
        .as_deref()
        .ok_or_else(|| bad("--model is required"))?;
    let unused = |keys: &[(&str, bool)]| -> Result<(), CliError> {
        match keys.iter().find(|(_, set)| *set) {
            Some((k, _)) => Err(bad(format!("--{k} does not apply to model {name:?}"))),
            None => Ok(()),
        }
    };
    let model = match name {
        "ho" | "oscillator" | "harmonic_oscillator" => {
            unused(&[
                ("k", c.k.is_some()),
                ("e", c.e.is_some()),
                ("v0", c.v0.is_some()),
                ("r", c.r.is_some()),
                ("sigma", c.sigma.is_some()),
                ("kbar", c.kbar.is_some()),
            ])?;
            ModelSpec::HarmonicOscillator {
                n: c.n.unwrap_or(0),
                alpha: c.alpha.unwrap_or(1.0),
            }
        }
        "plane" | "plane_wave" => {
            unused(&[
                ("n", c.n.is_some()),
                ("alpha", c.alpha.is_some()),
                ("e", c.e.is_some()),
                ("v0", c.v0.is_some()),
                ("r", c.r.is_some()),
                ("sigma", c.sigma.is_some()),
                ("kbar", c.kbar.is_some()),
            ])?;
            ModelSpec::PlaneWave {
                k: c.k.unwrap_or(1.0),
            }
        }
        "step" | "potential_step" => {
            unused(&[
                ("n", c.n.is_some()),
                ("alpha", c.alpha.is_some()),
                ("k", c.k.is_some()),
                ("sigma", c.sigma.is_some()),
                ("kbar", c.kbar.is_some()),
            ])?;
            ModelSpec::PotentialStep {
                energy: c.e.ok_or_else(|| bad("--e is required for the step"))?,
                v0: c.v0.ok_or_else(|| bad("--v0 is required for the step"))?,
                reflection: c.r,
            }
        }
        "packet" | "gaussian_packet" => {
            unused(&[
                ("n", c.n.is_some()),
                ("alpha", c.alpha.is_some()),
                ("k", c.k.is_some()),
                ("e", c.e.is_some()),
                ("v0", c.v0.is_some()),
                ("r", c.r.is_some()),
            ])?;
            ModelSpec::GaussianPacket {
                sigma: c.sigma.unwrap_or(1.0),
                k_bar: c.kbar.unwrap_or(1.0),
            }
        }
        other => {
            return Err(bad(format!(
                "unknown model {other:?} (expected ho, plane, step or packet)"
            )))
        }
    };
    Ok(model)
}

pub fn integrator_from(c: &ScenarioConfig) -> Result<IntegratorConfig, CliError> {
    let mut cfg = IntegratorConfig::default();
    if let Some(v) = c.rtol {
        cfg.rel_tol = v;
    }
    if let Some(v) = c.atol {
        cfg.abs_tol = v;
    }
    if let Some(v) = c.max_step {
        cfg.max_step = v;
    }
    if let Some(v) = c.psi_floor {
        cfg.psi_floor = v;
    }
    if let Some(v) = c.max_steps {
        cfg.max_steps = v;
    }
    if let Some(v) = c.close_eps {
        cfg.close_eps = v;
    }
    if let Some(v) = c.stop_at_step_boundary {
        cfg.stop_at_step_boundary = v;
    }
    cfg.validate()?;
    Ok(cfg)
}

impl TryFrom<&ScenarioConfig> for Scenario {
    type Error = CliError;

    fn try_from(c: &ScenarioConfig) -> Result<Self, CliError> {
        let units = Units {
            hbar: c.hbar.unwrap_or(1.0),
            mass: c.mass.unwrap_or(1.0),
        };
        let wavefunction = Wavefunction::new(model_from(c)?, units)?;
        let x0 =
            c.x0.iter()
                .map(|s| parse_x0(s))
                .collect::<Result<Vec<_>, _>>()?;
        let t0 = c.t0.unwrap_or(0.0);
        if !t0.is_finite() || c.t1.is_some_and(|t| !t.is_finite()) {
            return Err(bad("times must be finite"));
        }
        Ok(Scenario {
            wavefunction,
            x0,
            t0,
            t1: c.t1,
            integrator: integrator_from(c)?,
            out: c.out.clone().unwrap_or_else(|| PathBuf::from(".")),
        })
    }
}
