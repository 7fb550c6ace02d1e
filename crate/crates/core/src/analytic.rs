//! Closed-form performance chain: unconditional PEP (adaptive quadrature,
//! Gauss-Chebyshev, upper bound, high-SNR limit), ABEP, outage probability
//! and throughput.
//!
//! The aligned-gain difference `u` is modelled as Gaussian with mean `πN/4`
//! and variance `(32 − π²)N/16`, so `X = u²` has the density [`pdf_x`].
//! Averaging the conditional PEP `Q(√(ςX/4))` over `X` through Craig's form
//! of `Q` leaves a single integral over `θ ∈ [0, π/2]`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::link::average_impairment_power;
use crate::montecarlo::{gamma_threshold, SLOT_SECONDS};
use crate::params::SystemParams;
use crate::specfun::{adaptive_quad_with, marcum_q_half_complement, GcqRule, QuadOptions};

/// `32 − π²`.
const C0: f64 = 32.0 - PI * PI;

/// Below this many elements the Gaussian model of the cascaded gain is poor.
pub const CLT_MIN_ELEMENTS: usize = 25;

/// Relative tolerance of [`pep_exact`].
pub const EXACT_REL_TOL: f64 = 1e-10;

/// `ln τ` with `τ = √(2/((32−π²)Nπ))·exp(−π²N/(64−2π²))`.
pub fn log_tau(n_elements: usize) -> f64 {
    let n = n_elements as f64;
    0.5 * (2.0 / (C0 * n * PI)).ln() - PI * PI * n / (2.0 * C0)
}

pub fn tau(n_elements: usize) -> f64 {
    log_tau(n_elements).exp()
}

/// Moments of the aligned gain χ_l under the CLT.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CombinedChannelStats {
    pub mu_chi: f64,
    pub var_chi: f64,
    /// Non-centrality `μ_χ²`.
    pub lambda: f64,
}

impl CombinedChannelStats {
    pub fn new(n_elements: usize) -> Self {
        let n = n_elements as f64;
        let mu_chi = n * PI / 4.0;
        Self {
            mu_chi,
            var_chi: n * (16.0 - PI * PI) / 16.0,
            lambda: mu_chi * mu_chi,
        }
    }
}

/// Density of `X = u²`.
pub fn pdf_x(x: f64, n_elements: usize) -> Result<f64> {
    if !(x >= 0.0) || n_elements == 0 {
        return Err(Error::domain(
            "pdf_x",
            format!("need x >= 0 and N >= 1, got x = {x}, N = {n_elements}"),
        ));
    }
    if x == 0.0 {
        return Ok(f64::INFINITY);
    }
    let n = n_elements as f64;
    let t = x.sqrt();
    let shift = 4.0 * PI * t / C0;
    let log_main = log_tau(n_elements) - 0.5 * x.ln() - 8.0 * x / (C0 * n) + shift;
    Ok(log_main.exp() * (1.0 + (-2.0 * shift).exp()))
}

/// Which exponent the Craig-form integrand carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PepConvention {
    /// `exp(−ςx/(8 sin²θ))`, the Craig form of the conditional PEP `Q(√(ςx/4))`.
    #[default]
    Consistent,
    /// `exp(−ςx/(4 sin²θ))`: the integrand with ς in place of ς/2. Kept for
    /// comparison with curves produced that way; it is not the average of
    /// the conditional PEP.
    DoubledExponent,
}

impl PepConvention {
    fn scale(self) -> f64 {
        match self {
            PepConvention::Consistent => 0.5,
            PepConvention::DoubledExponent => 1.0,
        }
    }
}

/// Everything the averaged PEP depends on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PepInputs {
    pub n_elements: usize,
    /// `ς = 2Pξ² / (P(1−ξ²)Nσe² + Pk² + N₀)`; may be `+∞`.
    pub varsigma: f64,
    pub tau: f64,
    #[serde(default)]
    pub convention: PepConvention,
}

impl PepInputs {
    pub fn new(n_elements: usize, varsigma: f64) -> Result<Self> {
        if n_elements == 0 || !(varsigma >= 0.0) {
            return Err(Error::domain(
                "PepInputs::new",
                format!("need N >= 1 and varsigma >= 0, got N = {n_elements}, varsigma = {varsigma}"),
            ));
        }
        Ok(Self {
            n_elements,
            varsigma,
            tau: tau(n_elements),
            convention: PepConvention::default(),
        })
    }

    pub fn from_params(params: &SystemParams) -> Result<Self> {
        params.validate()?;
        Self::new(params.n_elements, varsigma(params))
    }

    /// Inputs at the high-SNR limit; `varsigma` is infinite when neither
    /// estimation error nor loop interference survives.
    pub fn limit(params: &SystemParams) -> Result<Self> {
        params.validate()?;
        Self::new(params.n_elements, varsigma_limit(params))
    }

    pub fn with_convention(mut self, convention: PepConvention) -> Self {
        self.convention = convention;
        self
    }

    /// Craig-form integrand `g(θ)` with `P̄e = (2/√π)∫₀^{π/2} g dθ`.
    fn integrand(&self, theta: f64) -> f64 {
        let n = self.n_elements as f64;
        let s = theta.sin().powi(2);
        if s == 0.0 {
            return 0.0;
        }
        let vs = self.varsigma * self.convention.scale();
        if vs.is_infinite() {
            return 0.0;
        }
        let d = 32.0 * s + n * vs * C0;
        let log_g = 0.5 * (4.0 * n * C0 * s / d).ln() + log_tau(self.n_elements) + 16.0 * n * PI * PI * s / (d * C0);
        log_g.exp()
    }
}

pub fn varsigma(params: &SystemParams) -> f64 {
    2.0 * params.tx_power() * params.xi2() / average_impairment_power(params)
}

/// `ς∞ = 2ξ²/((1−ξ²)Nσe² + k²)` with σe² at its high-SNR value.
pub fn varsigma_limit(params: &SystemParams) -> f64 {
    let se2 = params.err_mode.sigma_e2_limit();
    let xi2 = 1.0 / (1.0 + se2);
    let denom = (1.0 - xi2) * params.n_elements as f64 * se2 + params.li_level;
    if denom == 0.0 {
        f64::INFINITY
    } else {
        2.0 * xi2 / denom
    }
}

/// Averaged PEP by adaptive quadrature of the Craig-form integral.
pub fn pep_exact(params: &SystemParams) -> Result<f64> {
    pep_exact_inputs(&PepInputs::from_params(params)?)
}

pub fn pep_exact_inputs(inputs: &PepInputs) -> Result<f64> {
    if inputs.varsigma.is_infinite() {
        return Ok(0.0);
    }
    let opts = QuadOptions::relative(EXACT_REL_TOL).with_panels(4);
    let res = adaptive_quad_with(|t| inputs.integrand(t), 0.0, FRAC_PI_2, opts)?;
    Ok(2.0 / PI.sqrt() * res.value)
}

/// Averaged PEP by the Gauss-Chebyshev rule of the given order after the
/// substitution `θ = (π/4)ω + π/4`.
pub fn pep_gcq(params: &SystemParams, order: usize) -> Result<f64> {
    pep_gcq_inputs(&PepInputs::from_params(params)?, &GcqRule::new(order)?)
}

pub fn pep_gcq_inputs(inputs: &PepInputs, rule: &GcqRule) -> Result<f64> {
    let scale = PI.sqrt() / 2.0;
    rule.integrate(|w| scale * inputs.integrand(FRAC_PI_4 * w + FRAC_PI_4))
}

/// Upper bound from `Q(x) ≤ e^{−x²/2}/12 + e^{−2x²/3}/4`.
pub fn pep_upper(params: &SystemParams) -> Result<f64> {
    Ok(pep_upper_inputs(&PepInputs::from_params(params)?))
}

pub fn pep_upper_inputs(inputs: &PepInputs) -> f64 {
    let vs = inputs.varsigma;
    if vs.is_infinite() {
        return 0.0;
    }
    let n = inputs.n_elements as f64;
    let lt = log_tau(inputs.n_elements);
    let d1 = 64.0 + vs * n * C0;
    let d2 = 48.0 + vs * n * C0;
    let t1 = lt - 3f64.ln() + 0.5 * (2.0 * PI * n * C0 / d1).ln() + 32.0 * n * PI * PI / (64.0 * C0 + vs * n * C0 * C0);
    let t2 = lt + 0.5 * (3.0 * PI * n * C0 / (2.0 * d2)).ln() + 48.0 * n * PI * PI / (96.0 * C0 + 2.0 * vs * n * C0 * C0);
    t1.exp() + t2.exp()
}

/// Why a closed-form value was pinned rather than evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Degenerate {
    /// No estimation error or loop interference survives at high SNR.
    NoErrorFloor,
    /// The SINR threshold is not positive, so outage is impossible.
    NonPositiveThreshold,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Flagged {
    pub value: f64,
    pub flag: Option<Degenerate>,
}

impl Flagged {
    fn plain(value: f64) -> Self {
        Self { value, flag: None }
    }

    fn pinned(value: f64, flag: Degenerate) -> Self {
        Self { value, flag: Some(flag) }
    }
}

/// The averaged PEP at `ς = ς∞`, i.e. the SNR-independent error floor.
pub fn pep_asymptotic(params: &SystemParams) -> Result<Flagged> {
    let inputs = PepInputs::limit(params)?;
    if inputs.varsigma.is_infinite() {
        return Ok(Flagged::pinned(0.0, Degenerate::NoErrorFloor));
    }
    pep_exact_inputs(&inputs).map(Flagged::plain)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PepBreakdown {
    pub exact: f64,
    pub gcq: f64,
    pub upper: f64,
    pub asymptotic: f64,
    pub gcq_order: usize,
}

pub fn pep_breakdown(params: &SystemParams, gcq_order: usize) -> Result<PepBreakdown> {
    let inputs = PepInputs::from_params(params)?;
    Ok(PepBreakdown {
        exact: pep_exact_inputs(&inputs)?,
        gcq: pep_gcq_inputs(&inputs, &GcqRule::new(gcq_order)?)?,
        upper: pep_upper_inputs(&inputs),
        asymptotic: pep_asymptotic(params)?.value,
        gcq_order,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum PepMethod {
    Exact,
    Gcq { order: usize },
    Upper,
    Asymptotic,
}

impl PepMethod {
    pub fn name(&self) -> &'static str {
        match self {
            PepMethod::Exact => "exact",
            PepMethod::Gcq { .. } => "gcq",
            PepMethod::Upper => "upper",
            PepMethod::Asymptotic => "asymptotic",
        }
    }
}

pub fn pep(params: &SystemParams, method: PepMethod) -> Result<f64> {
    match method {
        PepMethod::Exact => pep_exact(params),
        PepMethod::Gcq { order } => pep_gcq(params, order),
        PepMethod::Upper => pep_upper(params),
        PepMethod::Asymptotic => pep_asymptotic(params).map(|f| f.value),
    }
}

/// Sum of Hamming distances over ordered pairs of distinct natural-binary labels.
pub fn hamming_weight_sum(n_tx: usize) -> u64 {
    let mut total = 0;
    for l in 0..n_tx {
        for lp in 0..n_tx {
            if l != lp {
                total += (l ^ lp).count_ones() as u64;
            }
        }
    }
    total
}

/// Scaling of the Hamming-weighted union sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AbepScaling {
    /// Divided by `N_t·log₂N_t`: a bit error probability, exact for `N_t = 2`.
    #[default]
    PerBit,
    /// The bare union sum.
    Raw,
}

/// ABEP union bound with identical pairwise PEPs.
pub fn abep(params: &SystemParams, method: PepMethod) -> Result<f64> {
    abep_scaled(params, method, AbepScaling::PerBit)
}

pub fn abep_scaled(params: &SystemParams, method: PepMethod, scaling: AbepScaling) -> Result<f64> {
    Ok(pep(params, method)? * abep_factor(params.n_tx, scaling))
}

pub fn abep_factor(n_tx: usize, scaling: AbepScaling) -> f64 {
    let sum = hamming_weight_sum(n_tx) as f64;
    match scaling {
        AbepScaling::PerBit => sum / (n_tx as f64 * (n_tx as f64).log2()),
        AbepScaling::Raw => sum,
    }
}

/// Marcum arguments `(a, b)` of the outage expression for a normalized threshold `z`.
fn outage_args(n_elements: usize, z: f64) -> (f64, f64) {
    let stats = CombinedChannelStats::new(n_elements);
    ((stats.lambda / stats.var_chi).sqrt(), (z / stats.var_chi).sqrt())
}

/// Outage probability `1 − Q_{1/2}(√(λ/σχ²), √(z/σχ²))`.
pub fn outage_closed(params: &SystemParams, rate_bps: f64) -> Result<Flagged> {
    params.validate()?;
    let gamma_th = gamma_threshold(rate_bps, params.n_tx);
    if !(gamma_th > 0.0) {
        return Ok(Flagged::pinned(0.0, Degenerate::NonPositiveThreshold));
    }
    let z = average_impairment_power(params) * gamma_th / (params.tx_power() * params.xi2());
    let (a, b) = outage_args(params.n_elements, z);
    marcum_q_half_complement(a, b).map(Flagged::plain)
}

/// High-SNR limit of [`outage_closed`]; zero when no impairment survives.
pub fn outage_asymptotic(params: &SystemParams, rate_bps: f64) -> Result<Flagged> {
    params.validate()?;
    let gamma_th = gamma_threshold(rate_bps, params.n_tx);
    if !(gamma_th > 0.0) {
        return Ok(Flagged::pinned(0.0, Degenerate::NonPositiveThreshold));
    }
    let se2 = params.err_mode.sigma_e2_limit();
    let z = (se2 * se2 * params.n_elements as f64 + (1.0 + se2) * params.li_level) * gamma_th;
    if z == 0.0 {
        return Ok(Flagged::pinned(0.0, Degenerate::NoErrorFloor));
    }
    let (a, b) = outage_args(params.n_elements, z);
    marcum_q_half_complement(a, b).map(Flagged::plain)
}

/// Correctly detected bits per slot, `(1 − ABEP)·log₂N_t / T_s`.
pub fn throughput_closed(params: &SystemParams, method: PepMethod) -> Result<f64> {
    let ber = abep(params, method)?.clamp(0.0, 1.0);
    Ok((1.0 - ber) * (params.n_tx as f64).log2() / SLOT_SECONDS)
}
