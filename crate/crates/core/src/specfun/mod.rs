//! Numerical kernels: Gaussian tail function, error function, Marcum Q of
//! order one half, Gauss-Chebyshev quadrature and an adaptive reference
//! integrator.

mod gcq;
mod quad;

pub use gcq::{gcq_integrate, GcqRule};
pub use quad::{adaptive_quad, adaptive_quad_semi_infinite, adaptive_quad_with, QuadOptions, QuadResult};

use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};

/// Gaussian tail probability `Q(x) = P(Z > x)`, `Z ~ N(0, 1)`.
pub fn q_func(x: f64) -> f64 {
    0.5 * libm::erfc(x / SQRT_2)
}

pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

fn check_marcum_args(a: f64, b: f64) -> Result<()> {
    if a >= 0.0 && b >= 0.0 && a.is_finite() && !b.is_nan() {
        Ok(())
    } else {
        Err(Error::domain(
            "marcum_q_half",
            format!("arguments must be non-negative, got a = {a}, b = {b}"),
        ))
    }
}

/// Marcum Q function of order ½: `Q(b - a) + Q(b + a)`.
///
/// Equals `P(|X| > b)` for `X ~ N(a, 1)`.
pub fn marcum_q_half(a: f64, b: f64) -> Result<f64> {
    check_marcum_args(a, b)?;
    Ok(q_func(b - a) + q_func(b + a))
}

/// `1 - Q_{1/2}(a, b) = Q(a - b) - Q(a + b)`, evaluated without cancellation
/// when the Marcum function is close to one.
pub fn marcum_q_half_complement(a: f64, b: f64) -> Result<f64> {
    check_marcum_args(a, b)?;
    Ok((q_func(a - b) - q_func(a + b)).max(0.0))
}
