use std::fmt;
use std::path::PathBuf;

use lg_core::noise::{invasive_o2, NoiseModel};
use lg_core::protocols::{ExperimentPlan, GatesetMode};
use lg_core::{DEFAULT_REPETITIONS, DEFAULT_SHOTS, DEVICE_THETA};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Table,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Device gateset when theta is -3π/4, ideal rotations otherwise.
    Auto,
    Device,
    Ideal,
}

/// The JSON config document. Every field is optional; flags override it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub theta: f64,
    pub shots: usize,
    pub repetitions: usize,
    pub seed: u64,
    pub mode: Mode,
    pub p1: f64,
    pub p2: f64,
    pub eps_ro: f64,
    pub gamma: f64,
    /// Invasive rotation after the O2 measurement, in radians.
    pub kick: Option<f64>,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            theta: DEVICE_THETA,
            shots: DEFAULT_SHOTS,
            repetitions: DEFAULT_REPETITIONS,
            seed: 0,
            mode: Mode::Auto,
            p1: 0.0,
            p2: 0.0,
            eps_ro: 0.0,
            gamma: 0.0,
            kick: None,
            format: Format::Table,
            out: None,
        }
    }
}

impl RunConfig {
    pub fn gateset(&self) -> GatesetMode {
        match self.mode {
            Mode::Device => GatesetMode::Device,
            Mode::Ideal => GatesetMode::Ideal,
            Mode::Auto if (self.theta - DEVICE_THETA).abs() <= 1e-12 => GatesetMode::Device,
            Mode::Auto => GatesetMode::Ideal,
        }
    }

    pub fn plan(&self) -> ExperimentPlan {
        let noise = NoiseModel {
            p1: self.p1,
            p2: self.p2,
            eps_ro: self.eps_ro,
            gamma_idle: self.gamma,
            kick: None,
        };
        ExperimentPlan {
            theta: self.theta,
            shots: self.shots,
            repetitions: self.repetitions,
            base_seed: self.seed,
            noise: match self.kick {
                Some(k) => invasive_o2(&noise, k),
                None => noise,
            },
            mode: self.gateset(),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Table => "table",
            Format::Json => "json",
            Format::Csv => "csv",
        })
    }
}
