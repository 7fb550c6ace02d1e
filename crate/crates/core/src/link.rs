//! Receiver side of the link: received-sample synthesis, SINR and the
//! maximum-likelihood antenna-index detector.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::channel::{CascadeGains, ChannelRealization};
use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::specfun::q_func;

/// The three impairments summed into the received sample.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NoiseParts {
    /// √(P(1−ξ²))·Σ_n Δh_n·b_{n,l}·e^{jψ_n}
    pub estimation: Complex64,
    /// Residual loop interference I_A.
    pub loop_interference: Complex64,
    /// Thermal noise n_A.
    pub thermal: Complex64,
}

impl NoiseParts {
    pub fn total(&self) -> Complex64 {
        self.estimation + self.loop_interference + self.thermal
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RxSample {
    pub y: Complex64,
    /// Noise-free part √(Pξ²)·χ_l.
    pub signal: f64,
    pub w_parts: NoiseParts,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionOutcome {
    pub detected: usize,
    pub metrics: Vec<f64>,
}

fn scaled_complex_normal<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let s = (0.5 * variance).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * s, im * s)
}

/// Residual loop interference, CN(0, k²·P). Exactly zero (and no draw) when k² = 0.
pub fn residual_li_sample<R: Rng + ?Sized>(params: &SystemParams, rng: &mut R) -> Complex64 {
    if params.li_level == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    scaled_complex_normal(rng, params.li_level * params.tx_power())
}

/// Σ_n Δh_n·b_{n,l}·e^{jψ_n}, the un-scaled estimation-error interference.
pub fn estimation_error_sum(real: &ChannelRealization, l: usize) -> Complex64 {
    real.err
        .iter()
        .zip(real.b_row(l))
        .zip(&real.psi)
        .map(|((e, b), psi)| e * psi * *b)
        .sum()
}

/// Assembles the received sample from explicit loop-interference and thermal-noise draws.
pub fn build_rx_with(
    real: &ChannelRealization,
    gains: &CascadeGains,
    l: usize,
    params: &SystemParams,
    loop_interference: Complex64,
    thermal: Complex64,
) -> Result<RxSample> {
    if l >= gains.n_tx() {
        return Err(Error::IndexOutOfRange { index: l, n_tx: gains.n_tx() });
    }
    let p = params.tx_power();
    let xi2 = params.xi2();
    let signal = (p * xi2).sqrt() * gains.chi[l];
    let estimation = if params.sigma_e2() > 0.0 {
        estimation_error_sum(real, l) * (p * (1.0 - xi2)).sqrt()
    } else {
        Complex64::new(0.0, 0.0)
    };
    let w_parts = NoiseParts {
        estimation,
        loop_interference,
        thermal,
    };
    Ok(RxSample {
        y: w_parts.total() + signal,
        signal,
        w_parts,
    })
}

/// Received sample at the user for transmit antenna `l` with freshly drawn
/// loop interference and thermal noise CN(0, N₀).
pub fn build_rx<R: Rng + ?Sized>(
    real: &ChannelRealization,
    gains: &CascadeGains,
    l: usize,
    params: &SystemParams,
    rng: &mut R,
) -> Result<RxSample> {
    let li = residual_li_sample(params, rng);
    let thermal = scaled_complex_normal(rng, params.noise_power);
    build_rx_with(real, gains, l, params, li, thermal)
}

/// ML metric `|y − √(Pξ²)·m(l, l̂)|²` for every hypothesis l̂ of the aligned row.
pub fn ml_metrics<'a>(y: Complex64, gains: &'a CascadeGains, params: &SystemParams) -> impl Iterator<Item = f64> + 'a {
    let scale = (params.tx_power() * params.xi2()).sqrt();
    gains.candidates().iter().map(move |m| (y - m * scale).norm_sqr())
}

/// Maximum-likelihood antenna-index decision; ties go to the lowest index.
pub fn ml_detect(y: Complex64, gains: &CascadeGains, params: &SystemParams) -> DetectionOutcome {
    let metrics: Vec<f64> = ml_metrics(y, gains, params).collect();
    let detected = argmin(&metrics);
    DetectionOutcome { detected, metrics }
}

/// Allocation-free [`ml_detect`] returning only the decision.
pub fn ml_decide(y: Complex64, gains: &CascadeGains, params: &SystemParams) -> usize {
    let mut best = 0;
    let mut best_metric = f64::INFINITY;
    for (k, metric) in ml_metrics(y, gains, params).enumerate() {
        if metric < best_metric {
            best = k;
            best_metric = metric;
        }
    }
    best
}

fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (k, &v) in values.iter().enumerate() {
        if v < values[best] {
            best = k;
        }
    }
    best
}

/// Interference-plus-noise power with the estimation-error term replaced by its mean N·σe².
pub fn average_impairment_power(params: &SystemParams) -> f64 {
    let p = params.tx_power();
    p * (1.0 - params.xi2()) * params.n_elements as f64 * params.sigma_e2()
        + p * params.li_level
        + params.noise_power
}

/// SINR of the active antenna, ρξ²χ² / (ρ(1−ξ²)Nσe² + ρk² + 1) in normalized units.
pub fn sinr(gains: &CascadeGains, params: &SystemParams) -> f64 {
    sinr_from_chi(gains.chi_active(), params)
}

pub fn sinr_from_chi(chi: f64, params: &SystemParams) -> f64 {
    params.tx_power() * params.xi2() * chi * chi / average_impairment_power(params)
}

/// Conditional PEP `Q(√(Pξ²|u|² / (2(P(1−ξ²)·E + Pk² + N₀))))` for deciding
/// `l_hat` instead of the active antenna, where `E` stands in for
/// `|Σ_n Δh_n b_{n,l} e^{jψ_n}|²`.
pub fn conditional_pep(gains: &CascadeGains, l_hat: usize, params: &SystemParams, est_error_power: f64) -> Result<f64> {
    if l_hat >= gains.n_tx() {
        return Err(Error::IndexOutOfRange { index: l_hat, n_tx: gains.n_tx() });
    }
    let l = gains.active();
    let u = gains.mismatch(l, l) - gains.mismatch(l, l_hat);
    let p = params.tx_power();
    let xi2 = params.xi2();
    let denom = 2.0 * (p * (1.0 - xi2) * est_error_power + p * params.li_level + params.noise_power);
    Ok(q_func((p * xi2 * u.norm_sqr() / denom).sqrt()))
}

/// Decision statistic `F = −|d|² − 2·Re{d·w*}` with `d = √(Pξ²)·(χ_l − m(l, l̂))`;
/// the detector prefers `l_hat` exactly when `F > 0`.
pub fn pairwise_statistic(gains: &CascadeGains, l_hat: usize, params: &SystemParams, w: Complex64) -> f64 {
    let l = gains.active();
    let d = (gains.mismatch(l, l) - gains.mismatch(l, l_hat)) * (params.tx_power() * params.xi2()).sqrt();
    -d.norm_sqr() - 2.0 * (d * w.conj()).re
}
