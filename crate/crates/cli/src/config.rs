use std::path::{Path, PathBuf};

use huygens::dynamics::DampingModel;
use huygens::regions::GridSpec;
use huygens::{PhysicalParams, SystemState};
use serde::Deserialize;

use crate::CliError;

/// Fixed `eta` and `mu` for a quadrant sweep.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Quadrant {
    pub eta: f64,
    pub mu: f64,
}

/// Everything a run reads from its JSON config.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub params: PhysicalParams,
    #[serde(default)]
    pub damping: DampingModel,
    /// `(x, sigma, delta, xdot, sigmadot, deltadot)`
    #[serde(default)]
    pub initial_state: [f64; 6],
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    pub grid: Option<GridSpec>,
    /// Overrides the quadrant point implied by `params`.
    pub quadrant: Option<Quadrant>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_draws")]
    pub draws: usize,
    pub out: Option<PathBuf>,
}

fn default_t_end() -> f64 {
    60.0
}

fn default_samples() -> usize {
    1001
}

fn default_seed() -> u64 {
    huygens::verify::VerifyOptions::default().seed
}

fn default_draws() -> usize {
    huygens::verify::VerifyOptions::default().draws
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn state(&self) -> SystemState {
        let s = self.initial_state;
        SystemState::y([s[0], s[1], s[2]], [s[3], s[4], s[5]])
    }
}
