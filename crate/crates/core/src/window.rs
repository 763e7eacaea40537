//! Kaiser-Bessel window pair.
//!
//! The resampling kernel lives on the node side and is the compactly supported
//! `sinh` form, evaluated in the scaled variable `u = Ñ k / m`:
//!
//! ```text
//! ψ̂_base(u) = sinh(β √(1 − u²)) / (π √(1 − u²)),   |u| <= 1
//! ```
//!
//! Its Fourier transform, used by the resampling correction on the grid side, is
//!
//! ```text
//! φ_base(v) = ∫ ψ̂_base(u) e^{2πi v u} du = I₀(√(β² − (2πv)²))
//! ```
//!
//! with shape parameter `β = π m (2 − 1/σ)`.

use std::f64::consts::PI;

use crate::error::{NfftError, Result};

/// Modified Bessel function of the first kind, order zero.
///
/// Power series below 30 (all terms positive, so the sum is well conditioned),
/// Hankel asymptotic expansion above.
pub fn i0(x: f64) -> f64 {
    let x = x.abs();
    if x <= 30.0 {
        let q = 0.25 * x * x;
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 1.0;
        loop {
            term *= q / (k * k);
            sum += term;
            if term <= sum * 1e-17 {
                return sum;
            }
            k += 1.0;
        }
    }
    // e^x / sqrt(2πx) * Σ c_k / x^k with c_k = ((2k-1)!!)² / (k! 8^k)
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    while k < 60.0 {
        let t = 2.0 * k - 1.0;
        term *= t * t / (8.0 * k * x);
        sum += term;
        if term <= sum * 1e-17 {
            break;
        }
        k += 1.0;
    }
    // split the exponential so results up to ~1e308 do not overflow early
    let half = (0.5 * x).exp();
    half * (half * sum / (2.0 * PI * x).sqrt())
}

/// Kaiser-Bessel window parameters for half-width `m` and oversampling `sigma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KaiserBesselWindow {
    m: usize,
    sigma: f64,
    beta: f64,
}

impl KaiserBesselWindow {
    pub fn new(m: usize, sigma: f64) -> Self {
        let beta = PI * m as f64 * (2.0 - 1.0 / sigma);
        KaiserBesselWindow { m, sigma, beta }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Truncated node-side kernel on `[-1, 1]`; zero outside.
    ///
    /// At `|u| = 1` the continuous limit `β/π` is returned.
    #[inline]
    pub fn psi_hat_base(&self, u: f64) -> f64 {
        let a = u.abs();
        if a < 1.0 {
            let w = ((1.0 - a) * (1.0 + a)).sqrt();
            (self.beta * w).sinh() / (PI * w)
        } else if a == 1.0 {
            self.beta / PI
        } else {
            0.0
        }
    }

    /// Fourier transform of [`psi_hat_base`](Self::psi_hat_base), valid for `|2πv| <= β`.
    pub fn phi_base(&self, v: f64) -> Result<f64> {
        let arg = 2.0 * PI * v;
        let r = self.beta * self.beta - arg * arg;
        if r.is_nan() || r < 0.0 {
            return Err(NfftError::DomainError {
                argument: arg.abs(),
                limit: self.beta,
            });
        }
        Ok(i0(r.sqrt()))
    }

    /// Grid-side window `φ(n) = (m/Ñ) φ_base(m n / Ñ)` for one dimension.
    pub fn phi(&self, n: i64, ntilde: usize) -> Result<f64> {
        let s = self.m as f64 / ntilde as f64;
        Ok(s * self.phi_base(s * n as f64)?)
    }

    /// Relative residual between `φ(n)` and a trapezoid quadrature with `points`
    /// intervals of `∫ ψ̂_base(Ñk/m) e^{2πi n k} dk`.
    ///
    /// The residual is bounded below by the truncation of the kernel to `[-1, 1]`,
    /// which decays exponentially in `m`.
    pub fn fourier_pair_residual(&self, n: i64, ntilde: usize, points: usize) -> Result<f64> {
        let exact = self.phi(n, ntilde)?;
        let scale = self.m as f64 / ntilde as f64;
        let v = scale * n as f64;
        // substitute u = Ñk/m, the kernel is even so only the cosine part survives
        let h = 2.0 / points as f64;
        let mut sum = 0.0;
        for i in 0..=points {
            let u = -1.0 + i as f64 * h;
            let w = if i == 0 || i == points { 0.5 } else { 1.0 };
            sum += w * self.psi_hat_base(u) * (2.0 * PI * v * u).cos();
        }
        let quad = scale * h * sum;
        Ok((exact - quad).abs() / exact.abs())
    }
}
