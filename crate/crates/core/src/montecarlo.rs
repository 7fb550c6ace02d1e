//! Deterministic, parallel trial engine for BER, outage and throughput
//! estimates.
//!
//! Every trial owns a ChaCha8 stream selected by its index under the plan's
//! master seed, and trials are tallied in fixed-size chunks merged in index
//! order. Results therefore depend only on `(params, plan)`, never on the
//! number of worker threads.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{align_phases_into, CascadeGains, ChannelRealization};
use crate::error::{Error, Result};
use crate::link::{build_rx, ml_decide, sinr_from_chi};
use crate::params::SystemParams;

/// Trials per chunk; the unit of work distribution and of early stopping.
const CHUNK: u64 = 1024;
/// Chunks evaluated per parallel wave.
const WAVE: u64 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialPlan {
    pub master_seed: u64,
    pub n_trials: u64,
    /// Stop after the first chunk at which this many events have been seen; 0 runs the full plan.
    #[serde(default)]
    pub min_events: u64,
}

impl TrialPlan {
    pub fn new(master_seed: u64, n_trials: u64) -> Self {
        Self {
            master_seed,
            n_trials,
            min_events: 0,
        }
    }

    pub fn with_min_events(mut self, min_events: u64) -> Self {
        self.min_events = min_events;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.n_trials == 0 {
            return Err(Error::InvalidPlan("n_trials must be at least 1".into()));
        }
        Ok(())
    }
}

/// Monte Carlo tally with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    pub trials: u64,
    pub events: u64,
    pub estimate: f64,
    pub std_error: f64,
    pub seed: u64,
}

impl EstimateResult {
    pub fn from_counts(trials: u64, events: u64, seed: u64) -> Self {
        let estimate = events as f64 / trials as f64;
        Self {
            trials,
            events,
            estimate,
            std_error: (estimate * (1.0 - estimate) / trials as f64).sqrt(),
            seed,
        }
    }

    /// Standard error of a binomial proportion `p` over this many trials.
    pub fn std_error_at(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }
}

/// Random stream for one trial: `(master_seed, trial_index)` → ChaCha8 stream.
pub fn trial_rng(master_seed: u64, trial_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial_index);
    rng
}

#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    trials: u64,
    events: u64,
}

/// Runs `trial` over the plan, returning (trials executed, events).
///
/// `init` builds per-worker scratch state; `trial` gets that state and the
/// trial's own rng, and returns the number of events it produced.
fn run_trials<S, I, T>(plan: &TrialPlan, init: I, trial: T) -> Tally
where
    I: Fn() -> S + Sync + Send,
    T: Fn(&mut S, &mut ChaCha8Rng) -> u64 + Sync + Send,
{
    let n_chunks = plan.n_trials.div_ceil(CHUNK);
    let base = ChaCha8Rng::seed_from_u64(plan.master_seed);
    let mut total = Tally::default();
    let mut wave_start = 0;
    while wave_start < n_chunks {
        let wave_end = (wave_start + WAVE).min(n_chunks);
        let chunks: Vec<Tally> = (wave_start..wave_end)
            .into_par_iter()
            .map_init(&init, |state, chunk| {
                let first = chunk * CHUNK;
                let last = (first + CHUNK).min(plan.n_trials);
                let mut tally = Tally::default();
                for index in first..last {
                    let mut rng = base.clone();
                    rng.set_stream(index);
                    tally.events += trial(state, &mut rng);
                    tally.trials += 1;
                }
                tally
            })
            .collect();
        for chunk in chunks {
            total.trials += chunk.trials;
            total.events += chunk.events;
            if plan.min_events > 0 && total.events >= plan.min_events {
                return total;
            }
        }
        wave_start = wave_end;
    }
    total
}

struct BerScratch {
    real: ChannelRealization,
    gains: CascadeGains,
}

/// Bit error rate of the ML detector.
///
/// Per trial: uniform transmit antenna, fresh channel, RIS aligned to that
/// antenna, received sample, ML decision; bit errors are the Hamming distance
/// between the natural-binary labels. `trials` in the result counts bits.
pub fn run_ber(params: &SystemParams, plan: &TrialPlan) -> Result<EstimateResult> {
    params.validate()?;
    plan.validate()?;
    let n_tx = params.n_tx;
    let bits = params.bits_per_symbol() as u64;
    let tally = run_trials(
        plan,
        || {
            let real = ChannelRealization::zeros(params.n_elements, n_tx);
            let gains = crate::channel::align_phases(&real, 0).expect("antenna 0 always exists");
            BerScratch { real, gains }
        },
        |s, rng| {
            let l = rng.random_range(0..n_tx);
            s.real.resample(params, rng);
            align_phases_into(&mut s.gains, &s.real, l).expect("index drawn in range");
            let rx = build_rx(&s.real, &s.gains, l, params, rng).expect("index drawn in range");
            let detected = ml_decide(rx.y, &s.gains, params);
            (l ^ detected).count_ones() as u64
        },
    );
    Ok(EstimateResult::from_counts(tally.trials * bits, tally.events, plan.master_seed))
}

/// SINR threshold γth = 2^(R − log₂N_t) − 1 for a target rate of `rate_bps`.
pub fn gamma_threshold(rate_bps: f64, n_tx: usize) -> f64 {
    2f64.powf(rate_bps - (n_tx as f64).log2()) - 1.0
}

/// Outage frequency `P(SINR ≤ γth)`.
///
/// Only the aligned gain χ_l enters the SINR, so each trial draws just the
/// element amplitudes a_n and b_{n,l} (as square roots of unit exponentials).
pub fn run_outage(params: &SystemParams, rate_bps: f64, plan: &TrialPlan) -> Result<EstimateResult> {
    params.validate()?;
    plan.validate()?;
    if !rate_bps.is_finite() {
        return Err(Error::InvalidParams(format!("rate must be finite, got {rate_bps}")));
    }
    let gamma_th = gamma_threshold(rate_bps, params.n_tx);
    let n = params.n_elements;
    let tally = run_trials(
        plan,
        || (),
        |_, rng| {
            let chi: f64 = (0..n)
                .map(|_| {
                    let ea: f64 = rng.sample(Exp1);
                    let eb: f64 = rng.sample(Exp1);
                    (ea * eb).sqrt()
                })
                .sum();
            u64::from(sinr_from_chi(chi, params) <= gamma_th)
        },
    );
    Ok(EstimateResult::from_counts(tally.trials, tally.events, plan.master_seed))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThroughputEstimate {
    /// Correctly detected bits per slot.
    pub value: f64,
    pub std_error: f64,
    pub ber: EstimateResult,
}

/// Slot duration in seconds.
pub const SLOT_SECONDS: f64 = 1.0;

/// Throughput `(1 − BER)·log₂N_t / T_s` from a BER run.
pub fn run_throughput(params: &SystemParams, plan: &TrialPlan) -> Result<ThroughputEstimate> {
    let ber = run_ber(params, plan)?;
    Ok(throughput_from_ber(ber, params.n_tx))
}

pub fn throughput_from_ber(ber: EstimateResult, n_tx: usize) -> ThroughputEstimate {
    let bits = (n_tx as f64).log2();
    ThroughputEstimate {
        value: (1.0 - ber.estimate) * bits / SLOT_SECONDS,
        std_error: ber.std_error * bits / SLOT_SECONDS,
        ber,
    }
}

/// Empirical against theoretical first two moments of one quantity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentCheck {
    pub empirical_mean: f64,
    pub theory_mean: f64,
    pub empirical_var: f64,
    pub theory_var: f64,
}

impl MomentCheck {
    /// Relative error of the mean; absolute when the theoretical mean is zero.
    pub fn mean_error(&self) -> f64 {
        let diff = (self.empirical_mean - self.theory_mean).abs();
        if self.theory_mean == 0.0 {
            diff
        } else {
            diff / self.theory_mean.abs()
        }
    }

    pub fn var_error(&self) -> f64 {
        (self.empirical_var - self.theory_var).abs() / self.theory_var
    }
}

/// Largest Kolmogorov-Smirnov distance between the standardized χ sample
/// and N(0, 1) for which the Gaussian (CLT) model is considered adequate.
pub const CLT_KS_THRESHOLD: f64 = 0.02;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentAudit {
    pub n_elements: usize,
    pub samples: u64,
    /// χ_l = Σ a_n b_{n,l}.
    pub chi: MomentCheck,
    /// u = χ_l − m(l, l̂); variance is the complex variance E|u − E u|².
    pub u: MomentCheck,
    /// |E[u]| imaginary part (theory: 0).
    pub u_mean_imag: f64,
    /// Per-element a_n·b_{n,l}.
    pub product: MomentCheck,
    /// Per-element b_{n,l̂}·e^{j(ϑ_{n,l} − ϑ_{n,l̂})}; mean is |E[·]|.
    pub phase_residual: MomentCheck,
    /// Per-element a_n·b_{n,l̂}·e^{j(ϑ_{n,l} − ϑ_{n,l̂})}; mean is |E[·]|.
    pub cross_term: MomentCheck,
    /// Skewness of the χ sample (0 for a Gaussian).
    pub chi_skewness: f64,
    /// KS distance between the standardized χ sample and N(0, 1).
    pub gaussian_fit_error: f64,
    /// False when `gaussian_fit_error` exceeds [`CLT_KS_THRESHOLD`].
    pub clt_adequate: bool,
}

#[derive(Debug, Clone, Copy, Default)]
struct Accum {
    n: u64,
    sum: Complex64,
    sum_sq: f64,
}

impl Accum {
    fn push(&mut self, z: Complex64) {
        self.n += 1;
        self.sum += z;
        self.sum_sq += z.norm_sqr();
    }

    fn merge(mut self, other: Accum) -> Accum {
        self.n += other.n;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
        self
    }

    fn mean(&self) -> Complex64 {
        self.sum / self.n as f64
    }

    /// E|z − E z|², unbiased.
    fn var(&self) -> f64 {
        let n = self.n as f64;
        (self.sum_sq - self.sum.norm_sqr() / n) / (n - 1.0)
    }
}

/// Compares empirical moments of the cascaded channel with their CLT values.
pub fn moment_audit(n_elements: usize, samples: u64, seed: u64) -> Result<MomentAudit> {
    use std::f64::consts::PI;
    if samples < 10_000 {
        return Err(Error::InvalidPlan(format!("moment audit needs at least 10^4 samples, got {samples}")));
    }
    let params = SystemParams::new(n_elements, 2);
    params.validate()?;

    #[derive(Default, Clone, Copy)]
    struct Stats {
        chi: Accum,
        u: Accum,
        product: Accum,
        residual: Accum,
        cross: Accum,
    }
    impl Stats {
        fn merge(self, o: Stats) -> Stats {
            Stats {
                chi: self.chi.merge(o.chi),
                u: self.u.merge(o.u),
                product: self.product.merge(o.product),
                residual: self.residual.merge(o.residual),
                cross: self.cross.merge(o.cross),
            }
        }
    }

    let n_chunks = samples.div_ceil(CHUNK);
    let base = ChaCha8Rng::seed_from_u64(seed);
    let (stats, chis): (Stats, Vec<f64>) = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut real = ChannelRealization::zeros(n_elements, 2);
            let mut gains = crate::channel::align_phases(&real, 0).expect("antenna 0 exists");
            let mut stats = Stats::default();
            let first = chunk * CHUNK;
            let last = (first + CHUNK).min(samples);
            let mut chis = Vec::with_capacity((last - first) as usize);
            for index in first..last {
                let mut rng = base.clone();
                rng.set_stream(index);
                real.resample(&params, &mut rng);
                align_phases_into(&mut gains, &real, 0).expect("antenna 0 exists");
                let chi = gains.chi[0];
                chis.push(chi);
                stats.chi.push(Complex64::new(chi, 0.0));
                stats.u.push(gains.mismatch(0, 0) - gains.mismatch(0, 1));
                for n in 0..n_elements {
                    let a = real.a[n];
                    let rotation = real.theta_g[n] * real.theta_g[n_elements + n].conj();
                    let residual = rotation * real.b[n_elements + n];
                    stats.product.push(Complex64::new(a * real.b[n], 0.0));
                    stats.residual.push(residual);
                    stats.cross.push(residual * a);
                }
            }
            (stats, chis)
        })
        .reduce(
            || (Stats::default(), Vec::new()),
            |(sa, mut ca), (sb, cb)| {
                ca.extend(cb);
                (sa.merge(sb), ca)
            },
        );

    let n = n_elements as f64;
    let mu_chi = n * PI / 4.0;
    let var_chi = n * (16.0 - PI * PI) / 16.0;
    let chi = MomentCheck {
        empirical_mean: stats.chi.mean().re,
        theory_mean: mu_chi,
        empirical_var: stats.chi.var(),
        theory_var: var_chi,
    };
    let u_mean = stats.u.mean();
    let u = MomentCheck {
        empirical_mean: u_mean.re,
        theory_mean: mu_chi,
        empirical_var: stats.u.var(),
        theory_var: n * (32.0 - PI * PI) / 16.0,
    };
    let product = MomentCheck {
        empirical_mean: stats.product.mean().re,
        theory_mean: PI / 4.0,
        empirical_var: stats.product.var(),
        theory_var: (16.0 - PI * PI) / 16.0,
    };
    let phase_residual = MomentCheck {
        empirical_mean: stats.residual.mean().norm(),
        theory_mean: 0.0,
        empirical_var: stats.residual.var(),
        theory_var: 1.0,
    };
    let cross_term = MomentCheck {
        empirical_mean: stats.cross.mean().norm(),
        theory_mean: 0.0,
        empirical_var: stats.cross.var(),
        theory_var: 1.0,
    };

    let (chi_skewness, gaussian_fit_error) = gaussian_fit(chis);
    Ok(MomentAudit {
        n_elements,
        samples,
        chi,
        u,
        u_mean_imag: u_mean.im.abs(),
        product,
        phase_residual,
        cross_term,
        chi_skewness,
        gaussian_fit_error,
        clt_adequate: gaussian_fit_error <= CLT_KS_THRESHOLD,
    })
}

/// Skewness and KS distance to N(0, 1) of a standardized sample.
fn gaussian_fit(mut xs: Vec<f64>) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let sd = var.sqrt();
    let skew = xs.iter().map(|x| ((x - mean) / sd).powi(3)).sum::<f64>() / n;
    xs.sort_by(f64::total_cmp);
    let ks = xs
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let cdf = 1.0 - crate::specfun::q_func((x - mean) / sd);
            let lo = i as f64 / n;
            let hi = (i + 1) as f64 / n;
            (cdf - lo).abs().max((hi - cdf).abs())
        })
        .fold(0.0, f64::max);
    (skew, ks)
}
