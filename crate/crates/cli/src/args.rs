use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "cqtraj",
    version,
    about = "Complex quantum trajectories: orbits, action and real-axis averages"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Integrate trajectories from each --x0 over [t0, t1].
    Traj(Common),
    /// Sample a scalar field on a rectangular grid of complex x.
    Field(FieldArgs),
    /// Find the closed orbit through each --x0 and measure its action.
    Action(Common),
    /// Norm, <x>, <p> and <E> on the real axis.
    Expect(ExpectArgs),
    /// Regenerate the reference datasets.
    Figures(FigureArgs),
}

#[derive(Args, Debug, Clone, Default)]
pub struct Common {
    /// ho | plane | step | packet
    #[arg(long)]
    pub model: Option<String>,
    /// Oscillator level.
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    /// Plane-wave wavenumber.
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<f64>,
    /// Step: particle energy.
    #[arg(long = "e", allow_hyphen_values = true)]
    pub energy: Option<f64>,
    /// Step: barrier height.
    #[arg(long, allow_hyphen_values = true)]
    pub v0: Option<f64>,
    /// Step: reflection amplitude (defaults to the matching value).
    #[arg(long = "r", allow_hyphen_values = true)]
    pub reflection: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub sigma: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub kbar: Option<f64>,
    /// Initial point as "re,im"; repeatable.
    #[arg(long = "x0", allow_hyphen_values = true)]
    pub x0: Vec<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub t0: Option<f64>,
    /// End time (trajectories) or search horizon (orbits).
    #[arg(long, allow_hyphen_values = true)]
    pub t1: Option<f64>,
    #[arg(long)]
    pub rtol: Option<f64>,
    #[arg(long)]
    pub atol: Option<f64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON file with the same keys as the flags; flags take precedence.
    #[arg(long = "json-config")]
    pub json_config: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    /// Contour level c of the step's incident-side flow.
    C,
    /// Physical velocity Re ẋ.
    Velocity,
}

#[derive(Args, Debug, Clone)]
pub struct FieldArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum)]
    pub quantity: Option<Quantity>,
    /// Grid samples along Re x.
    #[arg(long)]
    pub nx: Option<usize>,
    /// Grid samples along Im x.
    #[arg(long)]
    pub ny: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct ExpectArgs {
    #[command(flatten)]
    pub common: Common,
    /// Evaluation time; repeatable. Defaults to t0.
    #[arg(long = "t", allow_hyphen_values = true)]
    pub times: Vec<f64>,
    #[arg(long = "quad-tol")]
    pub quad_tol: Option<f64>,
    /// Fixed integration half-width instead of the automatic one.
    #[arg(long = "half-width")]
    pub half_width: Option<f64>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Which {
    Shm0,
    Shm1,
    Shm2,
    Step,
    All,
}

#[derive(Args, Debug, Clone)]
pub struct FigureArgs {
    #[arg(long, value_enum, default_value = "all")]
    pub which: Which,
    #[arg(long)]
    pub rtol: Option<f64>,
    #[arg(long)]
    pub atol: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
