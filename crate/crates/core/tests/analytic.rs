mod common;

use std::f64::consts::PI;

use fdssk_core::analytic::*;
use fdssk_core::montecarlo::gamma_threshold;
use fdssk_core::specfun::{adaptive_quad_with, q_func, QuadOptions};
use fdssk_core::{EstimationErrorMode, SystemParams};
use proptest::prelude::*;

fn params(n: usize, se2: f64, k2: f64, snr_db: f64) -> SystemParams {
    SystemParams::new(n, 2).with_fixed_error(se2).with_li_level(k2).with_snr_db(snr_db)
}

/// E[Q(√(ς/4)·|u|)] with u ~ N(πN/4, (32−π²)N/16), integrated over u directly.
fn pep_oracle(n: usize, varsigma: f64) -> f64 {
    let nf = n as f64;
    let mu = PI * nf / 4.0;
    let sd = ((32.0 - PI * PI) * nf / 16.0).sqrt();
    let c = (varsigma / 4.0).sqrt();
    let f = |u: f64| common::normal_pdf((u - mu) / sd) / sd * q_func(c * u.abs());
    let lo = mu - 40.0 * sd;
    let hi = mu + 40.0 * sd;
    adaptive_quad_with(f, lo, hi, QuadOptions::relative(1e-13).with_panels(64)).unwrap().value
}

#[test]
fn averaged_pep_matches_direct_expectation() {
    for n in [16usize, 64, 100, 256] {
        for vs in [1e-4, 1e-3, 0.01, 0.1, 1.0] {
            let inputs = PepInputs::new(n, vs).unwrap();
            let exact = pep_exact_inputs(&inputs).unwrap();
            let oracle = pep_oracle(n, vs);
            assert!((exact / oracle - 1.0).abs() < 1e-6, "N={n} vs={vs}: {exact:e} vs {oracle:e}");
        }
    }
}

#[test]
fn varsigma_definition() {
    let p = params(100, 0.4, 0.2, 7.0);
    let rho = 10f64.powf(0.7);
    let xi2 = 1.0 / 1.4;
    let expected = 2.0 * rho * xi2 / (rho * (1.0 - xi2) * 100.0 * 0.4 + rho * 0.2 + 1.0);
    let inputs = PepInputs::from_params(&p).unwrap();
    assert!((inputs.varsigma / expected - 1.0).abs() < 1e-12);
    assert!(inputs.tau > 0.0);
    assert!((inputs.tau - tau(100)).abs() == 0.0);
}

fn x_integral(n: usize, power: i32) -> f64 {
    // x = t², dx = 2t dt removes the 1/√x singularity
    let nf = n as f64;
    let hi = (PI * nf / 4.0) + 40.0 * ((32.0 - PI * PI) * nf / 16.0).sqrt();
    adaptive_quad_with(
        |t| pdf_x(t * t, n).unwrap() * 2.0 * t * (t * t).powi(power),
        0.0,
        hi,
        QuadOptions::relative(1e-12).with_panels(32),
    )
    .unwrap()
    .value
}

#[test]
fn density_of_x_normalizes() {
    for n in [1usize, 10, 64, 256] {
        assert!((x_integral(n, 0) - 1.0).abs() < 1e-6, "N = {n}");
        let nf = n as f64;
        let second = (PI * nf / 4.0).powi(2) + (32.0 - PI * PI) * nf / 16.0;
        assert!((x_integral(n, 1) / second - 1.0).abs() < 1e-4, "N = {n}");
    }
}

#[test]
fn density_of_x_concentrates() {
    // mode of u² for u ~ N(μ, σ²): √x solves t² − μt + σ² = 0
    let (mu, var) = (64.0 * PI, (32.0 - PI * PI) * 16.0);
    let mode = (0.5 * (mu + (mu * mu - 4.0 * var).sqrt())).powi(2);
    let target = (64.0 * PI).powi(2);
    let (mut best_x, mut best) = (0.0, 0.0);
    for k in 1..=20_000 {
        let x = 30_000.0 + k as f64;
        let v = pdf_x(x, 256).unwrap();
        if v > best {
            best = v;
            best_x = x;
        }
    }
    assert!((best_x - mode).abs() <= 1.0, "mode at {best_x}, expected {mode}");
    assert!((best_x / target - 1.0).abs() < 0.02);
    assert!(pdf_x(-1e-9, 256).is_err());
}

#[test]
fn pep_vanishes_as_varsigma_grows() {
    // the Gaussian model keeps mass near u = 0, so the decay is only ς^(−1/2)
    let at = |vs: f64| pep_exact_inputs(&PepInputs::new(64, vs).unwrap()).unwrap();
    let mut prev = at(1e3);
    for vs in [1e6, 1e9, 1e12] {
        let v = at(vs);
        assert!(((prev / v) / 1000f64.sqrt() - 1.0).abs() < 0.01);
        prev = v;
    }
    assert!(prev < 1e-13);
    let p = SystemParams::new(64, 2).with_snr_db(120.0);
    assert!(pep_exact(&p).unwrap() < 1e-13);
    assert!(pep_upper(&p).unwrap() < 1e-13);
}

#[test]
fn gcq_tracks_exact_at_fig3_point() {
    let p = params(100, 0.1, 0.1, -21.0);
    assert!((pep_exact(&p).unwrap() - pep_gcq(&p, 20).unwrap()).abs() < 1e-6);
}

#[test]
fn gcq_low_orders_stabilize() {
    for snr in [-25.0, -23.0, -21.0] {
        let p = params(100, 0.1, 0.1, snr);
        let g = |q| pep_gcq(&p, q).unwrap();
        assert!((g(3) - g(20)).abs() < 1e-3);
        assert!((g(6) - g(7)).abs() < (g(2) - g(3)).abs());
    }
}

fn grid() -> Vec<SystemParams> {
    let mut out = Vec::new();
    for n in [25usize, 64, 100, 256, 400] {
        for se2 in [0.1, 1.0] {
            for k2 in [0.0, 0.1] {
                for snr in [-30.0, -20.0, -10.0, 0.0, 20.0] {
                    out.push(params(n, se2, k2, snr));
                }
            }
        }
    }
    out
}

// Relative error of the √(1−ω²)-compensated rule; the order-20 value is
// within 1% and the error falls ~16x from order 20 to order 80.
#[test]
fn gcq_converges_on_grid() {
    let grid = grid();
    assert_eq!(grid.len(), 100);
    for p in &grid {
        let exact = pep_exact(p).unwrap();
        if exact < 1e-250 {
            continue;
        }
        let e20 = (pep_gcq(p, 20).unwrap() - exact).abs();
        let e80 = (pep_gcq(p, 80).unwrap() - exact).abs();
        assert!(e20 <= 1e-2 * exact, "{p:?}: {e20:e} vs {exact:e}");
        assert!(e80 <= e20 / 8.0 || e80 <= 1e-9 * exact, "{p:?}: {e20:e} -> {e80:e}");
    }
}

#[test]
fn upper_bound_dominates_on_snr_grid() {
    for n in [100usize, 256] {
        for k in 0..50 {
            let snr = -30.0 + 60.0 * k as f64 / 49.0;
            let p = params(n, 2.0, 0.1, snr);
            let (e, u) = (pep_exact(&p).unwrap(), pep_upper(&p).unwrap());
            assert!(u >= e - 1e-9, "N={n} snr={snr}: {u:e} < {e:e}");
            assert!(u >= e, "N={n} snr={snr}");
        }
    }
}

// Q(x) ≤ e^{−x²/2}/12 + e^{−2x²/3}/4 fails for small x (1/3 < 1/2 at 0),
// so the averaged bound can fall below the exact value.
#[test]
fn upper_bound_fails_where_small_arguments_dominate() {
    let zero = PepInputs::new(100, 0.0).unwrap();
    assert!(pep_upper_inputs(&zero) < pep_exact_inputs(&zero).unwrap());
    let p = params(100, 0.1, 0.1, 30.0);
    let ratio = pep_upper(&p).unwrap() / pep_exact(&p).unwrap();
    assert!(ratio < 1.0 && ratio > 0.95, "ratio = {ratio}");
}

#[test]
fn upper_bound_is_tight_for_fig4b() {
    for snr in (-10..=10).map(f64::from) {
        let p = params(256, 2.0, 0.1, snr);
        let ratio = pep_upper(&p).unwrap() / pep_exact(&p).unwrap();
        assert!((1.0..10.0).contains(&ratio), "snr={snr}: {ratio}");
    }
}

#[test]
fn asymptote_matches_high_snr() {
    let p = params(256, 2.0, 0.1, 60.0);
    let floor = pep_asymptotic(&p).unwrap();
    assert!(floor.flag.is_none());
    assert!((pep_exact(&p).unwrap() / floor.value - 1.0).abs() < 1e-4);
    let ideal = SystemParams::new(256, 2);
    let none = pep_asymptotic(&ideal).unwrap();
    assert_eq!(none.value, 0.0);
    assert_eq!(none.flag, Some(Degenerate::NoErrorFloor));
}

#[test]
fn floors_order_by_error_variance() {
    let f = |se2| pep_asymptotic(&params(256, se2, 0.1, 0.0)).unwrap().value;
    assert!(f(1.0) < f(2.0) && f(2.0) < f(3.0));
}

#[test]
fn exact_decreases_to_its_floor() {
    for (n, se2, k2) in [(64usize, 0.1, 0.1), (256, 2.0, 0.1), (100, 1.0, 0.0), (400, 0.01, 0.3)] {
        let mut prev = f64::INFINITY;
        for k in 0..=36 {
            let snr = -40.0 + 5.0 * k as f64;
            let v = pep_exact(&params(n, se2, k2, snr)).unwrap();
            assert!(v <= prev * (1.0 + 1e-9), "N={n} se2={se2} snr={snr}");
            prev = v;
        }
        let floor = pep_asymptotic(&params(n, se2, k2, 0.0)).unwrap().value;
        let far = pep_exact(&params(n, se2, k2, 150.0)).unwrap();
        assert!(far >= floor * (1.0 - 1e-9));
        assert!((far / floor - 1.0).abs() < 1e-6);
    }
}

#[test]
fn abep_union_sum() {
    let p2 = params(64, 0.5, 0.1, -10.0);
    let pe = pep_exact(&p2).unwrap();
    assert_eq!(abep(&p2, PepMethod::Exact).unwrap(), pe);
    let p4 = SystemParams { n_tx: 4, ..p2 };
    assert_eq!(abep(&p4, PepMethod::Exact).unwrap(), 2.0 * pe);
    // explicit enumeration over ordered pairs of 2-bit labels
    let mut sum = 0;
    for l in 0u32..4 {
        for lp in 0u32..4 {
            if l != lp {
                sum += (l ^ lp).count_ones();
            }
        }
    }
    assert_eq!(sum, 16);
    assert_eq!(abep_scaled(&p4, PepMethod::Exact, AbepScaling::Raw).unwrap(), 16.0 * pe);
    for n_tx in [2usize, 4, 8, 16] {
        let bits = (n_tx as f64).log2();
        assert_eq!(hamming_weight_sum(n_tx) as f64, n_tx as f64 * n_tx as f64 * bits / 2.0);
    }
}

fn outage_identity(p: &SystemParams, rate: f64) -> f64 {
    let stats = CombinedChannelStats::new(p.n_elements);
    let rho = 10f64.powf(p.snr_db / 10.0);
    let se2 = p.sigma_e2();
    let xi2 = 1.0 / (1.0 + se2);
    let g = gamma_threshold(rate, p.n_tx);
    let z = (rho * (1.0 - xi2) * se2 * p.n_elements as f64 + rho * p.li_level + 1.0) * g / (rho * xi2);
    let a = (stats.lambda / stats.var_chi).sqrt();
    let b = (z / stats.var_chi).sqrt();
    1.0 - (q_func(b - a) + q_func(b + a))
}

#[test]
fn outage_matches_marcum_identity() {
    let mut count = 0;
    for n in [10usize, 50, 100, 200, 400] {
        for rate in [2.0, 3.0, 5.0, 8.0] {
            for snr in [-20.0, -10.0, 0.0, 10.0, 30.0] {
                let p = params(n, 0.1, 0.1, snr);
                let closed = outage_closed(&p, rate).unwrap().value;
                assert!((closed - outage_identity(&p, rate)).abs() < 1e-12);
                count += 1;
            }
        }
    }
    assert_eq!(count, 100);
}

#[test]
fn outage_shifts_with_n_and_rate() {
    for snr in (-20..=10).map(f64::from) {
        let small = outage_closed(&params(50, 0.1, 0.1, snr), 3.0).unwrap().value;
        let large = outage_closed(&params(100, 0.1, 0.1, snr), 3.0).unwrap().value;
        let fast = outage_closed(&params(50, 0.1, 0.1, snr), 5.0).unwrap().value;
        assert!(large <= small);
        assert!(fast >= small);
    }
    let p = params(50, 0.1, 0.1, -20.0);
    assert!(outage_closed(&p, 5.0).unwrap().value > outage_closed(&p, 3.0).unwrap().value);
}

#[test]
fn outage_at_zero_threshold() {
    let p = params(50, 0.1, 0.1, 0.0);
    assert_eq!(outage_closed(&p, 1.0).unwrap().value, 0.0);
    assert_eq!(outage_asymptotic(&p, 1.0).unwrap().flag, Some(Degenerate::NonPositiveThreshold));
}

#[test]
fn outage_reaches_its_limit() {
    let p = params(200, 0.1, 0.1, 0.0);
    let a60 = outage_closed(&p.with_snr_db(60.0), 3.0).unwrap().value;
    let a80 = outage_closed(&p.with_snr_db(80.0), 3.0).unwrap().value;
    let lim = outage_asymptotic(&p, 3.0).unwrap().value;
    assert!((a60 - a80).abs() < 1e-4 && (a60 - lim).abs() < 1e-4 && (a80 - lim).abs() < 1e-4);
    // a regime where the floor is not negligible
    let q = params(10, 0.5, 0.3, 0.0);
    let lim = outage_asymptotic(&q, 4.0).unwrap().value;
    assert!(lim > 1e-3);
    assert!((outage_closed(&q.with_snr_db(80.0), 4.0).unwrap().value / lim - 1.0).abs() < 1e-6);
    let ideal = SystemParams::new(200, 2);
    let none = outage_asymptotic(&ideal, 3.0).unwrap();
    assert_eq!(none.value, 0.0);
    let var = SystemParams::new(10, 2)
        .with_li_level(0.3)
        .with_err_mode(EstimationErrorMode::Variable { pilots: 1 });
    let li_only = SystemParams::new(10, 2).with_li_level(0.3);
    assert_eq!(outage_asymptotic(&var, 4.0).unwrap(), outage_asymptotic(&li_only, 4.0).unwrap());
}

#[test]
fn throughput_ceilings_and_ordering() {
    for n_tx in [2usize, 4] {
        let p = SystemParams { n_tx, ..params(100, 1.0, 0.1, 30.0) };
        let t = throughput_closed(&p, PepMethod::Exact).unwrap();
        let ceiling = (n_tx as f64).log2();
        assert!(t < ceiling && ceiling - t < 1e-4 * ceiling);
    }
    let t = |n: usize, snr: f64| throughput_closed(&params(n, 1.0, 0.0, snr), PepMethod::Exact).unwrap();
    let mid = -20.0;
    assert!(t(49, mid) < t(100, mid) && t(100, mid) < t(196, mid));
    for n in [49usize, 100, 196] {
        assert!((t(n, 20.0) - 1.0).abs() < 2e-3);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pep_values_are_probabilities(n in 1usize..600, se2 in 0.0f64..4.0, k2 in 0.0f64..1.0, snr in -50.0f64..60.0) {
        let p = params(n, se2, k2, snr);
        let e = pep_exact(&p).unwrap();
        let g = pep_gcq(&p, 20).unwrap();
        let u = pep_upper(&p).unwrap();
        prop_assert!((0.0..=0.5 + 1e-9).contains(&e));
        prop_assert!((0.0..=0.5 + 1e-2).contains(&g));
        prop_assert!(u >= 0.0 && u <= 1.0 / 3.0 + 1e-12);
    }

    #[test]
    fn outage_is_monotone_in_threshold(n in 1usize..400, snr in -30.0f64..30.0, r in 1.05f64..10.0, dr in 0.01f64..3.0, se2 in 0.0f64..2.0) {
        let p = params(n, se2, 0.1, snr);
        let lo = outage_closed(&p, r).unwrap().value;
        let hi = outage_closed(&p, r + dr).unwrap().value;
        prop_assert!((0.0..=1.0).contains(&lo));
        prop_assert!(hi >= lo);
    }

    #[test]
    fn outage_is_monotone_in_elements(n in 1usize..400, dn in 1usize..100, snr in -30.0f64..30.0, r in 1.05f64..8.0) {
        let lo = outage_closed(&params(n, 0.1, 0.1, snr), r).unwrap().value;
        let hi = outage_closed(&params(n + dn, 0.1, 0.1, snr), r).unwrap().value;
        prop_assert!(hi <= lo + 1e-15);
    }

    #[test]
    fn outage_floor_grows_with_error(se2 in 0.0f64..3.0, d in 0.01f64..1.0, n in 1usize..100) {
        let a = outage_asymptotic(&params(n, se2, 0.1, 0.0), 4.0).unwrap().value;
        let b = outage_asymptotic(&params(n, se2 + d, 0.1, 0.0), 4.0).unwrap().value;
        prop_assert!(b >= a);
    }

    #[test]
    fn throughput_within_ceiling(n in 1usize..300, tx_pow in 1u32..4, snr in -40.0f64..40.0, se2 in 0.0f64..2.0) {
        let p = SystemParams { n_tx: 1 << tx_pow, ..params(n, se2, 0.1, snr) };
        let t = throughput_closed(&p, PepMethod::Exact).unwrap();
        prop_assert!(t >= 0.0 && t <= tx_pow as f64);
    }
}
