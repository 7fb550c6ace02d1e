#![allow(dead_code)]

use std::f64::consts::PI;

use fdssk_core::specfun::{adaptive_quad, adaptive_quad_with, QuadOptions};

pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Upper normal tail by direct integration of the density.
pub fn normal_tail(x: f64) -> f64 {
    adaptive_quad(normal_pdf, x, 40.0, 1e-14).unwrap().value
}

/// P(|X| > b) for X ~ N(a, 1), from the density of X.
pub fn folded_tail(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        return 1.0;
    }
    let inside = adaptive_quad(|x| normal_pdf(x - a), -b, b, 1e-14).unwrap().value;
    1.0 - inside
}

/// K₀(x) = ∫₀^∞ exp(−x·cosh t) dt.
pub fn bessel_k0(x: f64) -> f64 {
    let t_max = (60.0 / x + 1.0).acosh();
    adaptive_quad_with(|t| (-x * t.cosh()).exp(), 0.0, t_max, QuadOptions::relative(1e-13))
        .unwrap()
        .value
}

/// Upper tail of the χ² distribution with `dof` degrees of freedom.
pub fn chi2_tail(stat: f64, dof: usize) -> f64 {
    let k = dof as f64 / 2.0;
    let log_norm = -k * 2f64.ln() - ln_gamma(k);
    let density = |x: f64| {
        if x <= 0.0 {
            0.0
        } else {
            (log_norm + (k - 1.0) * x.ln() - x / 2.0).exp()
        }
    };
    let hi = stat.max(dof as f64) + 40.0 * (2.0 * dof as f64).sqrt() + 200.0;
    adaptive_quad_with(density, stat, hi, QuadOptions::absolute(1e-12)).unwrap().value
}

/// ln Γ(k) for k a positive multiple of 1/2.
fn ln_gamma(k: f64) -> f64 {
    let mut acc = if (k.fract() - 0.5).abs() < 1e-12 { 0.5 * PI.ln() } else { 0.0 };
    let mut z = if (k.fract() - 0.5).abs() < 1e-12 { 0.5 } else { 1.0 };
    while z < k - 1e-9 {
        acc += z.ln();
        z += 1.0;
    }
    acc
}

pub struct Moments {
    pub mean: f64,
    pub var: f64,
}

pub fn moments(xs: &[f64]) -> Moments {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Moments { mean, var }
}

pub fn correlation(xs: &[f64], ys: &[f64]) -> f64 {
    let mx = moments(xs);
    let my = moments(ys);
    let n = xs.len() as f64;
    let cov = xs.iter().zip(ys).map(|(x, y)| (x - mx.mean) * (y - my.mean)).sum::<f64>() / (n - 1.0);
    cov / (mx.var * my.var).sqrt()
}
