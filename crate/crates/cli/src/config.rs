//! Experiment configuration as accepted from JSON files and command-line flags.

use std::path::Path;

use fdssk_core::{EstimationErrorMode, SystemParams};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Sim,
    Exact,
    Gcq,
    Upper,
    Asymptotic,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Sim => "sim",
            Method::Exact => "exact",
            Method::Gcq => "gcq",
            Method::Upper => "upper",
            Method::Asymptotic => "asymptotic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ErrorModeKind {
    Perfect,
    Fixed,
    Variable,
}

/// What a curve measures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Metric {
    Abep,
    Outage { rate_bps: f64 },
    Throughput,
}

impl Metric {
    pub fn supports(&self, method: Method) -> bool {
        match self {
            Metric::Abep | Metric::Throughput => true,
            Metric::Outage { .. } => matches!(method, Method::Sim | Method::Exact | Method::Asymptotic),
        }
    }
}

/// Partial `SystemParams`; set fields replace those of the preset or defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamOverrides {
    pub n_elements: Option<usize>,
    pub n_tx: Option<usize>,
    pub li_level: Option<f64>,
    pub err_mode: Option<ErrorModeKind>,
    pub sigma_e2: Option<f64>,
    pub pilots: Option<u32>,
    pub noise_power: Option<f64>,
}

impl ParamOverrides {
    /// Fields of `other` that are set win.
    pub fn merged(&self, other: &ParamOverrides) -> ParamOverrides {
        ParamOverrides {
            n_elements: other.n_elements.or(self.n_elements),
            n_tx: other.n_tx.or(self.n_tx),
            li_level: other.li_level.or(self.li_level),
            err_mode: other.err_mode.or(self.err_mode),
            sigma_e2: other.sigma_e2.or(self.sigma_e2),
            pilots: other.pilots.or(self.pilots),
            noise_power: other.noise_power.or(self.noise_power),
        }
    }

    pub fn is_empty(&self) -> bool {
        *self == ParamOverrides::default()
    }

    /// The estimation-error mode these fields pin down, if any.
    pub fn error_mode(&self) -> Result<Option<EstimationErrorMode>> {
        let kind = match (self.err_mode, self.sigma_e2, self.pilots) {
            (None, None, None) => return Ok(None),
            (Some(kind), _, _) => kind,
            (None, Some(_), None) => ErrorModeKind::Fixed,
            (None, None, Some(_)) => ErrorModeKind::Variable,
            (None, Some(_), Some(_)) => {
                return Err(CliError::config("sigma_e2 and pilots are mutually exclusive"));
            }
        };
        let mode = match (kind, self.sigma_e2, self.pilots) {
            (ErrorModeKind::Perfect, None, None) => EstimationErrorMode::Perfect,
            (ErrorModeKind::Fixed, Some(sigma_e2), None) => EstimationErrorMode::Fixed { sigma_e2 },
            (ErrorModeKind::Variable, None, Some(pilots)) => EstimationErrorMode::Variable { pilots },
            (ErrorModeKind::Fixed, None, _) => return Err(CliError::config("fixed error mode needs sigma_e2")),
            (ErrorModeKind::Variable, _, None) => {
                return Err(CliError::config("variable error mode needs the pilot count T"));
            }
            (kind, _, _) => {
                return Err(CliError::config(format!(
                    "{kind:?} error mode is inconsistent with the given sigma_e2/pilots"
                )));
            }
        };
        Ok(Some(mode))
    }

    pub fn apply(&self, base: SystemParams) -> Result<SystemParams> {
        let mut p = base;
        if let Some(n) = self.n_elements {
            p.n_elements = n;
        }
        if let Some(n) = self.n_tx {
            p.n_tx = n;
        }
        if let Some(k2) = self.li_level {
            p.li_level = k2;
        }
        if let Some(np) = self.noise_power {
            p.noise_power = np;
        }
        if let Some(mode) = self.error_mode()? {
            p.err_mode = mode;
        }
        Ok(p)
    }

    /// Full parameters for a free-form sweep; N, k² and the error mode must be given.
    pub fn to_params(&self) -> Result<SystemParams> {
        let n = self.n_elements.ok_or_else(|| CliError::config("n_elements is required without a preset"))?;
        let k2 = self.li_level.ok_or_else(|| CliError::config("li_level is required without a preset"))?;
        let mode = self
            .error_mode()?
            .ok_or_else(|| CliError::config("an estimation error mode is required without a preset"))?;
        let mut p = SystemParams::new(n, self.n_tx.unwrap_or(2)).with_li_level(k2).with_err_mode(mode);
        if let Some(np) = self.noise_power {
            p = p.with_noise_power(np);
        }
        Ok(p)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub preset: Option<String>,
    #[serde(default)]
    pub overrides: ParamOverrides,
    /// Quantity for free-form sweeps; presets fix their own.
    pub metric: Option<Metric>,
    pub snr_grid_db: Option<Vec<f64>>,
    /// Channel realizations per simulated point.
    pub trials: Option<u64>,
    pub master_seed: Option<u64>,
    pub methods: Option<Vec<Method>>,
    pub gcq_order: Option<usize>,
    /// Series label for free-form sweeps.
    pub label: Option<String>,
}

impl ExperimentConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Field-level checks that do not need the preset table.
    pub fn validate(&self) -> Result<()> {
        if let Some(grid) = &self.snr_grid_db {
            validate_grid(grid)?;
        }
        if let Some(methods) = &self.methods {
            if methods.is_empty() {
                return Err(CliError::config("methods set is empty; nothing to compute"));
            }
        }
        if self.trials == Some(0) {
            return Err(CliError::config("trials must be at least 1"));
        }
        if self.gcq_order == Some(0) {
            return Err(CliError::config("gcq_order must be at least 1"));
        }
        if let Some(Metric::Outage { rate_bps }) = self.metric {
            if !(rate_bps.is_finite() && rate_bps > 0.0) {
                return Err(CliError::config(format!("rate must be positive, got {rate_bps}")));
            }
        }
        self.overrides.error_mode()?;
        Ok(())
    }
}

pub fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(CliError::config("SNR grid is empty"));
    }
    if grid.iter().any(|s| !s.is_finite()) {
        return Err(CliError::config("SNR grid has a non-finite entry"));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::config("SNR grid must be strictly increasing"));
    }
    Ok(())
}

/// `start, start+step, …` up to and including `stop` (within rounding).
pub fn grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    (0..=n).map(|k| start + k as f64 * step).collect()
}
