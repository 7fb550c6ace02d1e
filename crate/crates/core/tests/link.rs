mod common;

use fdssk_core::channel::{align_phases, sample_realization, ChannelRealization};
use fdssk_core::link::{
    build_rx, conditional_pep, estimation_error_sum, ml_decide, pairwise_statistic, residual_li_sample,
};
use fdssk_core::montecarlo::trial_rng;
use fdssk_core::{run_ber, EstimationErrorMode, SystemParams, TrialPlan};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

fn li_variance(params: &SystemParams, draws: usize, seed: u64) -> f64 {
    let mut rng = trial_rng(seed, 0);
    let samples: Vec<Complex64> = (0..draws).map(|_| residual_li_sample(params, &mut rng)).collect();
    let mean = samples.iter().sum::<Complex64>() / draws as f64;
    assert!(mean.norm() < 0.01);
    samples.iter().map(|z| (z - mean).norm_sqr()).sum::<f64>() / (draws as f64 - 1.0)
}

#[test]
fn loop_interference_variance() {
    let unit = SystemParams::new(1, 2).with_li_level(0.3);
    assert!((li_variance(&unit, 1_000_000, 31) - 0.3).abs() < 0.003);
    let strong = SystemParams::new(1, 2).with_li_level(0.1).with_snr_db(10.0);
    assert!((strong.tx_power() - 10.0).abs() < 1e-12);
    assert!((li_variance(&strong, 1_000_000, 32) - 1.0).abs() < 0.01);
}

#[test]
fn estimation_error_term_power() {
    let params = SystemParams::new(8, 2).with_fixed_error(0.6).with_snr_db(4.0);
    let mut rng = trial_rng(33, 0);
    let mut real = ChannelRealization::zeros(8, 2);
    let draws = 1_000_000;
    let mut power = 0.0;
    for _ in 0..draws {
        real.resample(&params, &mut rng);
        let gains = align_phases(&real, 0).unwrap();
        let rx = build_rx(&real, &gains, 0, &params, &mut rng).unwrap();
        power += rx.w_parts.estimation.norm_sqr();
    }
    let expected = params.tx_power() * (1.0 - params.xi2()) * 8.0 * 0.6;
    assert!((power / draws as f64 / expected - 1.0).abs() < 0.01);
}

#[test]
fn noise_dominated_detection_is_a_coin_flip() {
    let params = SystemParams::new(4, 2).with_snr_db(-60.0);
    let r = run_ber(&params, &TrialPlan::new(34, 1_000_000)).unwrap();
    assert!((r.estimate - 0.5).abs() < 0.01);
}

#[test]
fn pairwise_event_matches_detector_errors() {
    let params = SystemParams::new(16, 2).with_snr_db(-12.0).with_li_level(0.1).with_fixed_error(0.2);
    let mut rng = trial_rng(35, 0);
    let mut real = ChannelRealization::zeros(16, 2);
    let trials = 1_000_000u64;
    let (mut detector, mut event) = (0u64, 0u64);
    for _ in 0..trials {
        real.resample(&params, &mut rng);
        let gains = align_phases(&real, 0).unwrap();
        let rx = build_rx(&real, &gains, 0, &params, &mut rng).unwrap();
        detector += u64::from(ml_decide(rx.y, &gains, &params) != 0);
        event += u64::from(pairwise_statistic(&gains, 1, &params, rx.w_parts.total()) > 0.0);
    }
    let p = detector as f64 / trials as f64;
    let se = (p * (1.0 - p) / trials as f64).sqrt();
    assert!(detector > 1000);
    assert!((detector as f64 - event as f64).abs() / trials as f64 <= 3.0 * se);
}

#[test]
fn conditional_pep_over_noise_draws() {
    // Channel amplitudes and phases fixed, estimation error and noises redrawn:
    // the interference is then exactly CN(0, P(1−ξ²)σe²Σb² + Pk² + N₀).
    let params = SystemParams::new(16, 2).with_snr_db(-13.0).with_li_level(0.2).with_fixed_error(0.3);
    let sigma_e2 = 0.3;
    let p = params.tx_power();
    let est_scale = (p * (1.0 - params.xi2())).sqrt();
    let draws = 100_000u64;
    let mut checked = 0;
    for r in 0..20 {
        let mut real = sample_realization(&params, &mut trial_rng(36, r));
        let gains = align_phases(&real, 0).unwrap();
        let b_power: f64 = real.b_row(0).iter().map(|b| b * b).sum();
        let pep = conditional_pep(&gains, 1, &params, sigma_e2 * b_power).unwrap();
        let mut rng = trial_rng(37, r);
        let mut errors = 0u64;
        let signal = Complex64::new((p * params.xi2()).sqrt() * gains.chi[0], 0.0);
        for _ in 0..draws {
            for e in real.err.iter_mut() {
                *e = cn(&mut rng, sigma_e2);
            }
            let w = estimation_error_sum(&real, 0) * est_scale
                + residual_li_sample(&params, &mut rng)
                + cn(&mut rng, params.noise_power);
            errors += u64::from(ml_decide(signal + w, &gains, &params) != 0);
        }
        let se = (pep * (1.0 - pep) / draws as f64).sqrt();
        let rate = errors as f64 / draws as f64;
        assert!((rate - pep).abs() <= 3.0 * se + 1e-12, "realization {r}: rate {rate}, pep {pep}");
        if pep > 1e-3 {
            checked += 1;
        }
    }
    assert!(checked >= 10, "only {checked} realizations had a measurable PEP");
}

fn cn<R: Rng>(rng: &mut R, variance: f64) -> Complex64 {
    let s = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * s, im * s)
}

#[test]
fn deep_tail_point_shows_no_errors() {
    // analytic ABEP ≈ 5e-12 here; 1e7 trials expect 5e-5 errors
    let params = SystemParams::new(256, 2).with_li_level(0.1).with_fixed_error(1.0);
    let r = run_ber(&params, &TrialPlan::new(38, 10_000_000)).unwrap();
    assert_eq!(r.events, 0);
}

#[test]
fn variable_error_shrinks_with_snr() {
    let mode = EstimationErrorMode::Variable { pilots: 4 };
    let lo = SystemParams::new(8, 2).with_err_mode(mode).with_snr_db(0.0);
    let hi = lo.with_snr_db(20.0);
    assert!((lo.sigma_e2() - 0.25).abs() < 1e-15);
    assert!((hi.sigma_e2() - 0.0025).abs() < 1e-15);
}
