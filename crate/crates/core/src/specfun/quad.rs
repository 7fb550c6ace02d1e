//! Globally adaptive Gauss-Kronrod (7/15) quadrature.
//!
//! This is the brute-force reference integrator: slow compared with the fixed
//! Chebyshev rule but with an error estimate attached to every result.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    /// Number of equal panels the interval is split into before refinement starts.
    pub initial_panels: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 0.0,
            max_subdivisions: 4000,
            initial_panels: 1,
        }
    }
}

impl QuadOptions {
    pub fn absolute(tol: f64) -> Self {
        Self {
            abs_tol: tol,
            ..Self::default()
        }
    }

    pub fn relative(tol: f64) -> Self {
        Self {
            abs_tol: 0.0,
            rel_tol: tol,
            ..Self::default()
        }
    }

    pub fn with_panels(mut self, panels: usize) -> Self {
        self.initial_panels = panels.max(1);
        self
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod15<F: FnMut(f64) -> f64>(f: &mut F, lo: f64, hi: f64) -> Result<Panel> {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    check_finite(fc, center)?;
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&x, &wk)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        check_finite(f1, center - dx)?;
        check_finite(f2, center + dx)?;
        kronrod += wk * (f1 + f2);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    Ok(Panel {
        lo,
        hi,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    })
}

fn check_finite(value: f64, node: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite {
            index: 0,
            node,
            value,
        })
    }
}

/// Integrates `f` over `[lo, hi]` to an absolute tolerance `tol`.
pub fn adaptive_quad<F: FnMut(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Result<QuadResult> {
    adaptive_quad_with(f, lo, hi, QuadOptions::absolute(tol))
}

/// Integrates `f` over `[lo, hi]`, refining the worst panel until the summed
/// error estimate drops below `max(abs_tol, rel_tol * |value|)`.
pub fn adaptive_quad_with<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    opts: QuadOptions,
) -> Result<QuadResult> {
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::domain("adaptive_quad", format!("need finite lo < hi, got [{lo}, {hi}]")));
    }
    if !(opts.abs_tol >= 0.0 && opts.rel_tol >= 0.0) || (opts.abs_tol == 0.0 && opts.rel_tol == 0.0) {
        return Err(Error::domain("adaptive_quad", "tolerance must be positive"));
    }

    let panels = opts.initial_panels.max(1);
    let width = (hi - lo) / panels as f64;
    let mut heap = BinaryHeap::with_capacity(panels + 2 * opts.max_subdivisions);
    for k in 0..panels {
        let a = lo + width * k as f64;
        let b = if k + 1 == panels { hi } else { lo + width * (k + 1) as f64 };
        heap.push(kronrod15(&mut f, a, b)?);
    }
    let mut evaluations = 15 * panels;

    let mut subdivisions = 0;
    loop {
        let (value, error) = heap
            .iter()
            .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
        let target = opts.abs_tol.max(opts.rel_tol * value.abs());
        if error <= target {
            return Ok(QuadResult {
                value,
                abs_error_estimate: error,
                evaluations,
            });
        }
        if subdivisions >= opts.max_subdivisions {
            return Err(Error::NoConvergence {
                best: value,
                abs_error: error,
                subdivisions,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            // Panel cannot be split further in floating point.
            return Err(Error::NoConvergence {
                best: value,
                abs_error: error,
                subdivisions,
            });
        }
        heap.push(kronrod15(&mut f, worst.lo, mid)?);
        heap.push(kronrod15(&mut f, mid, worst.hi)?);
        evaluations += 30;
        subdivisions += 1;
    }
}

/// Integrates a non-negative, Gaussian-tailed `f` over `[lo, ∞)`.
///
/// The upper limit is truncated at the first point, scanning outward in steps
/// of `scale`, where `f` has fallen below `1e-16` of the largest value seen.
pub fn adaptive_quad_semi_infinite<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    scale: f64,
    opts: QuadOptions,
) -> Result<QuadResult> {
    if !(scale > 0.0) {
        return Err(Error::domain("adaptive_quad_semi_infinite", "scale must be positive"));
    }
    const SAMPLES_PER_STEP: usize = 32;
    const MAX_STEPS: usize = 4096;
    let mut peak: f64 = 0.0;
    let mut hi = lo;
    for _ in 0..MAX_STEPS {
        let start = hi;
        hi += scale;
        for k in 1..=SAMPLES_PER_STEP {
            let x = start + scale * k as f64 / SAMPLES_PER_STEP as f64;
            let v = f(x).abs();
            if v.is_finite() {
                peak = peak.max(v);
            }
        }
        let tail = f(hi).abs();
        if peak > 0.0 && tail < 1e-16 * peak {
            break;
        }
    }
    let steps = ((hi - lo) / scale).round() as usize;
    adaptive_quad_with(f, lo, hi, QuadOptions {
        initial_panels: opts.initial_panels.max(steps.clamp(1, 256)),
        ..opts
    })
}
