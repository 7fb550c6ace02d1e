use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Gauss-Chebyshev (first kind) rule of a given order.
///
/// Nodes are `cos((2q - 1)π / (2·order))`, `q = 1..=order`, in decreasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct GcqRule {
    order: usize,
    nodes: Vec<f64>,
}

impl GcqRule {
    pub const DEFAULT_ORDER: usize = 20;

    pub fn new(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::domain("GcqRule::new", "order must be at least 1"));
        }
        let nodes = (1..=order)
            .map(|q| ((2 * q - 1) as f64 * PI / (2 * order) as f64).cos())
            .collect();
        Ok(Self { order, nodes })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Uniform weight `π / order`.
    pub fn weight(&self) -> f64 {
        PI / self.order as f64
    }

    /// Approximates `∫_{-1}^{1} f(x) dx` as `(π/order)·Σ √(1 - ω_q²)·f(ω_q)`.
    ///
    /// The remainder is not estimated; it decays as `order⁻²` for smooth `f`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> Result<f64> {
        let mut sum = 0.0;
        for (index, &node) in self.nodes.iter().enumerate() {
            let value = f(node);
            if !value.is_finite() {
                return Err(Error::NonFinite { index, node, value });
            }
            sum += (1.0 - node * node).sqrt() * value;
        }
        Ok(self.weight() * sum)
    }

    /// Approximates `∫_{-1}^{1} f(x) / √(1 - x²) dx`; exact for polynomials of degree `< 2·order`.
    pub fn integrate_weighted<F: FnMut(f64) -> f64>(&self, mut f: F) -> Result<f64> {
        let mut sum = 0.0;
        for (index, &node) in self.nodes.iter().enumerate() {
            let value = f(node);
            if !value.is_finite() {
                return Err(Error::NonFinite { index, node, value });
            }
            sum += value;
        }
        Ok(self.weight() * sum)
    }
}

/// Free-function form of [`GcqRule::integrate`].
pub fn gcq_integrate<F: FnMut(f64) -> f64>(f: F, rule: &GcqRule) -> Result<f64> {
    rule.integrate(f)
}
