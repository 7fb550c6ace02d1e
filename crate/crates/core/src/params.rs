use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the channel-estimation error variance σe² is set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum EstimationErrorMode {
    Perfect,
    /// σe² held constant across SNR.
    Fixed { sigma_e2: f64 },
    /// σe² = 1 / (ρ·T) with `T` pilot symbols.
    Variable { pilots: u32 },
}

impl EstimationErrorMode {
    pub fn sigma_e2(&self, rho: f64) -> f64 {
        match *self {
            EstimationErrorMode::Perfect => 0.0,
            EstimationErrorMode::Fixed { sigma_e2 } => sigma_e2,
            EstimationErrorMode::Variable { pilots } => 1.0 / (rho * pilots as f64),
        }
    }

    /// σe² in the limit ρ → ∞.
    pub fn sigma_e2_limit(&self) -> f64 {
        match *self {
            EstimationErrorMode::Fixed { sigma_e2 } => sigma_e2,
            EstimationErrorMode::Perfect | EstimationErrorMode::Variable { .. } => 0.0,
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            EstimationErrorMode::Fixed { sigma_e2 } if !(sigma_e2 >= 0.0 && sigma_e2.is_finite()) => {
                Err(Error::InvalidParams(format!("fixed sigma_e2 must be >= 0, got {sigma_e2}")))
            }
            EstimationErrorMode::Variable { pilots: 0 } => {
                Err(Error::InvalidParams("variable estimation error needs at least one pilot".into()))
            }
            _ => Ok(()),
        }
    }
}

/// Every scalar knob of the link seen from the receiving user.
///
/// Powers are normalized so that the noise power is `noise_power` (1 by
/// default) and the transmit power is `ρ·noise_power`. The other user's
/// receive side is the same model with its own `li_level`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Reflecting elements per RIS.
    pub n_elements: usize,
    /// Transmit antennas; a power of two, at least 2.
    pub n_tx: usize,
    pub snr_db: f64,
    /// Residual loop-interference level k².
    pub li_level: f64,
    pub err_mode: EstimationErrorMode,
    #[serde(default = "unit")]
    pub noise_power: f64,
}

fn unit() -> f64 {
    1.0
}

impl SystemParams {
    pub fn new(n_elements: usize, n_tx: usize) -> Self {
        Self {
            n_elements,
            n_tx,
            snr_db: 0.0,
            li_level: 0.0,
            err_mode: EstimationErrorMode::Perfect,
            noise_power: 1.0,
        }
    }

    pub fn with_snr_db(mut self, snr_db: f64) -> Self {
        self.snr_db = snr_db;
        self
    }

    pub fn with_li_level(mut self, li_level: f64) -> Self {
        self.li_level = li_level;
        self
    }

    pub fn with_err_mode(mut self, err_mode: EstimationErrorMode) -> Self {
        self.err_mode = err_mode;
        self
    }

    pub fn with_fixed_error(self, sigma_e2: f64) -> Self {
        self.with_err_mode(EstimationErrorMode::Fixed { sigma_e2 })
    }

    pub fn with_noise_power(mut self, noise_power: f64) -> Self {
        self.noise_power = noise_power;
        self
    }

    /// Linear SNR ρ = P / N₀.
    pub fn rho(&self) -> f64 {
        10f64.powf(self.snr_db / 10.0)
    }

    pub fn tx_power(&self) -> f64 {
        self.rho() * self.noise_power
    }

    pub fn sigma_e2(&self) -> f64 {
        self.err_mode.sigma_e2(self.rho())
    }

    /// ξ² = 1 / (1 + σe²).
    pub fn xi2(&self) -> f64 {
        1.0 / (1.0 + self.sigma_e2())
    }

    /// Correlation between the true and the estimated channel.
    pub fn xi(&self) -> f64 {
        self.xi2().sqrt()
    }

    pub fn bits_per_symbol(&self) -> u32 {
        self.n_tx.trailing_zeros()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_elements == 0 {
            return Err(Error::InvalidParams("n_elements must be positive".into()));
        }
        if self.n_tx < 2 || !self.n_tx.is_power_of_two() {
            return Err(Error::InvalidParams(format!(
                "n_tx must be a power of two >= 2, got {}",
                self.n_tx
            )));
        }
        if !self.snr_db.is_finite() {
            return Err(Error::InvalidParams(format!("snr_db must be finite, got {}", self.snr_db)));
        }
        if !(self.li_level >= 0.0 && self.li_level.is_finite()) {
            return Err(Error::InvalidParams(format!("li_level must be >= 0, got {}", self.li_level)));
        }
        if !(self.noise_power > 0.0 && self.noise_power.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "noise_power must be > 0, got {}",
                self.noise_power
            )));
        }
        self.err_mode.validate()
    }
}
