//! Random channel generation and RIS phase alignment.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::params::SystemParams;

/// One draw of every per-element quantity of the user-B → RIS B → user-A link.
///
/// Phases are stored as unit phasors `e^{jφ}`; use the `*_angle` accessors
/// for the angles themselves.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    n_elements: usize,
    n_tx: usize,
    /// |ĥ_n|, estimated RIS → receiver amplitudes.
    pub a: Vec<f64>,
    /// e^{jψ_n}.
    pub psi: Vec<Complex64>,
    /// |g_{n,l}|, row-major `n_tx × n_elements`.
    pub b: Vec<f64>,
    /// e^{jϑ_{n,l}}, same layout as `b`.
    pub theta_g: Vec<Complex64>,
    /// Estimation-error samples Δh_n ~ CN(0, σe²).
    pub err: Vec<Complex64>,
}

fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
}

fn polar_parts(z: Complex64) -> (f64, Complex64) {
    let r = z.norm_sqr().sqrt();
    if r > 0.0 {
        (r, z * r.recip())
    } else {
        (0.0, Complex64::new(1.0, 0.0))
    }
}

impl ChannelRealization {
    pub fn zeros(n_elements: usize, n_tx: usize) -> Self {
        Self {
            n_elements,
            n_tx,
            a: vec![0.0; n_elements],
            psi: vec![Complex64::new(1.0, 0.0); n_elements],
            b: vec![0.0; n_elements * n_tx],
            theta_g: vec![Complex64::new(1.0, 0.0); n_elements * n_tx],
            err: vec![Complex64::new(0.0, 0.0); n_elements],
        }
    }

    /// Builds a realization from explicit amplitudes and angles; `b` and
    /// `theta` are indexed `[antenna][element]`.
    pub fn from_parts(a: &[f64], psi: &[f64], b: &[Vec<f64>], theta: &[Vec<f64>], err: &[Complex64]) -> Result<Self> {
        let n = a.len();
        let n_tx = b.len();
        let shape_ok = psi.len() == n
            && err.len() == n
            && theta.len() == n_tx
            && b.iter().all(|row| row.len() == n)
            && theta.iter().all(|row| row.len() == n);
        if !shape_ok || n == 0 || n_tx == 0 {
            return Err(Error::InvalidParams("inconsistent realization shapes".into()));
        }
        Ok(Self {
            n_elements: n,
            n_tx,
            a: a.to_vec(),
            psi: psi.iter().map(|&p| Complex64::from_polar(1.0, p)).collect(),
            b: b.iter().flatten().copied().collect(),
            theta_g: theta.iter().flatten().map(|&t| Complex64::from_polar(1.0, t)).collect(),
            err: err.to_vec(),
        })
    }

    pub fn n_elements(&self) -> usize {
        self.n_elements
    }

    pub fn n_tx(&self) -> usize {
        self.n_tx
    }

    pub fn b_row(&self, l: usize) -> &[f64] {
        &self.b[l * self.n_elements..(l + 1) * self.n_elements]
    }

    pub fn theta_row(&self, l: usize) -> &[Complex64] {
        &self.theta_g[l * self.n_elements..(l + 1) * self.n_elements]
    }

    pub fn psi_angle(&self, n: usize) -> f64 {
        self.psi[n].arg()
    }

    pub fn theta_angle(&self, l: usize, n: usize) -> f64 {
        self.theta_g[l * self.n_elements + n].arg()
    }

    /// Redraws every field in place. The estimation-error draws are skipped
    /// entirely when σe² = 0.
    pub fn resample<R: Rng + ?Sized>(&mut self, params: &SystemParams, rng: &mut R) {
        let n = params.n_elements;
        let n_tx = params.n_tx;
        if self.n_elements != n || self.n_tx != n_tx {
            *self = Self::zeros(n, n_tx);
        }
        for (a, psi) in self.a.iter_mut().zip(self.psi.iter_mut()) {
            let (r, u) = polar_parts(complex_normal(rng));
            *a = r;
            *psi = u;
        }
        for (b, th) in self.b.iter_mut().zip(self.theta_g.iter_mut()) {
            let (r, u) = polar_parts(complex_normal(rng));
            *b = r;
            *th = u;
        }
        let sigma_e2 = params.sigma_e2();
        if sigma_e2 > 0.0 {
            let s = sigma_e2.sqrt();
            for e in &mut self.err {
                *e = complex_normal(rng) * s;
            }
        } else {
            self.err.fill(Complex64::new(0.0, 0.0));
        }
    }
}

/// Draws a fresh realization for `params`.
pub fn sample_realization<R: Rng + ?Sized>(params: &SystemParams, rng: &mut R) -> ChannelRealization {
    let mut real = ChannelRealization::zeros(params.n_elements, params.n_tx);
    real.resample(params, rng);
    real
}

/// Cascaded gains after the RIS is phase-aligned to the active antenna.
#[derive(Debug, Clone, PartialEq)]
pub struct CascadeGains {
    n_tx: usize,
    active: usize,
    /// χ_l = Σ_n a_n·b_{n,l} for every antenna.
    pub chi: Vec<f64>,
    /// Row-major `n_tx × n_tx`; entry (l, l̂) = Σ_n a_n·b_{n,l̂}·e^{j(ϑ_{n,l} − ϑ_{n,l̂})}.
    pub mismatch: Vec<Complex64>,
}

impl CascadeGains {
    pub fn n_tx(&self) -> usize {
        self.n_tx
    }

    /// Antenna the RIS phases are aligned to.
    pub fn active(&self) -> usize {
        self.active
    }

    pub fn mismatch(&self, l: usize, l_hat: usize) -> Complex64 {
        self.mismatch[l * self.n_tx + l_hat]
    }

    /// Detector candidates for the active antenna (row `active` of the mismatch matrix).
    pub fn candidates(&self) -> &[Complex64] {
        &self.mismatch[self.active * self.n_tx..(self.active + 1) * self.n_tx]
    }

    /// Aligned gain χ of the active antenna.
    pub fn chi_active(&self) -> f64 {
        self.chi[self.active]
    }
}

/// Sets the RIS phases to φ_{n,l} = ψ_n + ϑ_{n,l} for antenna `l` (0-based)
/// and returns the resulting cascaded gains.
pub fn align_phases(real: &ChannelRealization, l: usize) -> Result<CascadeGains> {
    let mut gains = CascadeGains {
        n_tx: real.n_tx,
        active: 0,
        chi: vec![0.0; real.n_tx],
        mismatch: vec![Complex64::new(0.0, 0.0); real.n_tx * real.n_tx],
    };
    align_phases_into(&mut gains, real, l)?;
    Ok(gains)
}

/// In-place variant of [`align_phases`] reusing the buffers of `gains`.
pub fn align_phases_into(gains: &mut CascadeGains, real: &ChannelRealization, l: usize) -> Result<()> {
    let n_tx = real.n_tx;
    if l >= n_tx {
        return Err(Error::IndexOutOfRange { index: l, n_tx });
    }
    if gains.n_tx != n_tx {
        gains.n_tx = n_tx;
        gains.chi = vec![0.0; n_tx];
        gains.mismatch = vec![Complex64::new(0.0, 0.0); n_tx * n_tx];
    }
    gains.active = l;
    for k in 0..n_tx {
        gains.chi[k] = real.a.iter().zip(real.b_row(k)).map(|(a, b)| a * b).sum();
    }
    for row in 0..n_tx {
        let th_row = real.theta_row(row);
        for col in 0..n_tx {
            let value = if row == col {
                Complex64::new(gains.chi[row], 0.0)
            } else {
                let th_col = real.theta_row(col);
                real.a
                    .iter()
                    .zip(real.b_row(col))
                    .zip(th_row.iter().zip(th_col))
                    .map(|((a, b), (tr, tc))| (tr * tc.conj()) * (a * b))
                    .sum()
            };
            gains.mismatch[row * n_tx + col] = value;
        }
    }
    Ok(())
}

/// Density of the difference of two independent phases uniform on (−π, π].
pub fn phase_diff_pdf(z: f64) -> f64 {
    let four_pi2 = 4.0 * PI * PI;
    if z > -2.0 * PI && z <= 0.0 {
        (2.0 * PI + z) / four_pi2
    } else if z > 0.0 && z < 2.0 * PI {
        (2.0 * PI - z) / four_pi2
    } else {
        0.0
    }
}
