//! JSON run configuration.
//!
//! ```json
//! {
//!   "omega0": 1.2, "omega": 1.0, "lambda": 0.1,
//!   "n_max": 8, "n_state": 1,
//!   "l_grid": { "min": 0.0125, "max": 625.0, "count": 60, "spacing": "log" },
//!   "t_grid": { "min": 0.0, "max": 30.0, "count": 31, "spacing": "linear" },
//!   "tolerances": { "rel": 1e-12, "abs": 1e-14, "check": 1e-8 },
//!   "format": "csv",
//!   "output": "out.csv",
//!   "force_diagonal": false
//! }
//! ```
//!
//! Only the physical parameters, `n_max` and `n_state` are required. The
//! default flow grid is log-spaced from `1e-3/Ω₀²` to `50/Ω₀²`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::flow;
use crate::jc::{self, FockTruncation, JCParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Log,
    Linear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    #[serde(default = "default_spacing")]
    pub spacing: Spacing,
}

fn default_spacing() -> Spacing {
    Spacing::Log
}

impl GridSpec {
    fn validate(&self, what: &str) -> Result<(), CliError> {
        if self.count < 2 {
            return Err(CliError::Config(format!("{what}: count must be >= 2, got {}", self.count)));
        }
        if !self.min.is_finite() || !self.max.is_finite() || !(self.max > self.min) {
            return Err(CliError::Config(format!("{what}: need finite min < max, got [{}, {}]", self.min, self.max)));
        }
        if self.spacing == Spacing::Log && !(self.min > 0.0) {
            return Err(CliError::Config(format!("{what}: log spacing needs min > 0")));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        match self.spacing {
            Spacing::Log => flow::log_grid(self.min, self.max, self.count)[1..].to_vec(),
            Spacing::Linear => flow::linear_grid(self.min, self.max, self.count),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Integrator relative tolerance.
    #[serde(default = "default_rel")]
    pub rel: f64,
    /// Integrator absolute tolerance.
    #[serde(default = "default_abs")]
    pub abs: f64,
    /// Pass/fail threshold for numeric-vs-analytic residuals.
    #[serde(default = "default_check")]
    pub check: f64,
}

fn default_rel() -> f64 {
    1e-12
}

fn default_abs() -> f64 {
    1e-14
}

fn default_check() -> f64 {
    1e-8
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { rel: default_rel(), abs: default_abs(), check: default_check() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub omega0: f64,
    pub omega: f64,
    pub lambda: f64,
    pub n_max: usize,
    pub n_state: usize,
    #[serde(default)]
    pub l_grid: Option<GridSpec>,
    #[serde(default)]
    pub t_grid: Option<GridSpec>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub format: Option<Format>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// Verification mode for `flow`: start every block with `C = 0`.
    #[serde(default)]
    pub force_diagonal: bool,
}

/// A loaded and validated configuration.
#[derive(Debug, Clone)]
pub struct Run {
    pub cfg: RunConfig,
    pub params: JCParams,
    pub trunc: FockTruncation,
    /// Flow grid, starting at `l = 0`.
    pub l_grid: Vec<f64>,
    pub t_grid: Option<Vec<f64>>,
}

impl Run {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let cfg: RunConfig =
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_config(cfg)
    }

    pub fn from_config(cfg: RunConfig) -> Result<Self, CliError> {
        let params = JCParams::new(cfg.omega0, cfg.omega, cfg.lambda)?;
        let trunc = FockTruncation::new(cfg.n_max)?;
        let tol = &cfg.tolerances;
        for (name, v) in [("rel", tol.rel), ("abs", tol.abs), ("check", tol.check)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(CliError::Config(format!("tolerance {name} must lie in (0, 1), got {v}")));
            }
        }

        let o2 = jc::rabi_frequency(&params, 0).powi(2);
        let spec =
            cfg.l_grid.clone().unwrap_or(GridSpec { min: 1e-3 / o2, max: 50.0 / o2, count: 60, spacing: Spacing::Log });
        spec.validate("l_grid")?;
        if spec.min < 0.0 {
            return Err(CliError::Config("l_grid: flow parameter must be >= 0".into()));
        }
        let mut l_grid = vec![0.0];
        l_grid.extend(spec.points().into_iter().filter(|&l| l > 0.0));

        let t_grid = match &cfg.t_grid {
            Some(spec) => {
                spec.validate("t_grid")?;
                Some(spec.points())
            }
            None => None,
        };
        Ok(Self { cfg, params, trunc, l_grid, t_grid })
    }

    pub fn l_max(&self) -> f64 {
        *self.l_grid.last().expect("grid holds at least two points")
    }
}
