//! Resampling correction and its adjoint.
//!
//! The correction divides by the grid-side window and zero-pads into the
//! oversampled buffer. Logical index `n` is written to position `n mod Ñ`, which
//! performs the frequency shift in the same pass.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{NfftError, Result};
use crate::geometry::TransformGeometry;
use crate::window::KaiserBesselWindow;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const CHUNK: usize = 4096;

/// Per-dimension correction factors `1 / (m φ_base(m n_d / Ñ_d))`.
///
/// Their product over dimensions equals `1 / (|I_Ñ| φ(n))`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrectionVectors {
    n: Vec<usize>,
    ntilde: Vec<usize>,
    /// `beta[d][n_d + N_d/2]`
    beta: Vec<Vec<f64>>,
}

impl CorrectionVectors {
    pub fn build(window: &KaiserBesselWindow, geometry: &TransformGeometry) -> Result<Self> {
        let m = window.m() as f64;
        let beta = geometry
            .n()
            .iter()
            .zip(geometry.ntilde())
            .map(|(&nd, &nt)| {
                let half = (nd / 2) as i64;
                (-half..half)
                    .map(|k| Ok(1.0 / (m * window.phi_base(m * k as f64 / nt as f64)?)))
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CorrectionVectors {
            n: geometry.n().to_vec(),
            ntilde: geometry.ntilde().to_vec(),
            beta,
        })
    }

    /// Factors of dimension `d`, indexed by `n_d + N_d/2`.
    pub fn factors(&self, d: usize) -> &[f64] {
        &self.beta[d]
    }

    /// Total stored values, `Σ N_d`.
    pub fn memory_values(&self) -> usize {
        self.beta.iter().map(Vec::len).sum()
    }

    /// Full correction `∏_d β_{n_d,d}` at logical index `n`.
    pub fn at(&self, n: &[i64]) -> f64 {
        n.iter()
            .enumerate()
            .map(|(d, &k)| self.beta[d][(k + (self.n[d] / 2) as i64) as usize])
            .product()
    }

    /// Logical index along `d` stored at buffer position `s`, if any.
    #[inline]
    fn logical(&self, d: usize, s: usize) -> Option<usize> {
        let (n, nt) = (self.n[d], self.ntilde[d]);
        if s < n / 2 {
            Some(s + n / 2)
        } else if s >= nt - n / 2 {
            Some(s + n / 2 - nt)
        } else {
            None
        }
    }

    fn strides(dims: &[usize]) -> Vec<usize> {
        let mut s = vec![1; dims.len()];
        for d in 1..dims.len() {
            s[d] = s[d - 1] * dims[d - 1];
        }
        s
    }
}

fn check(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(NfftError::ShapeMismatch { expected, found })
    }
}

/// Writes `f_n β_n` to buffer position `n mod Ñ` and zeroes everything else.
///
/// `f` is `N`-shaped with logical `n_d` at offset `n_d + N_d/2`.
pub fn apply_correction(
    cv: &CorrectionVectors,
    f: &[Complex64],
    gbuf: &mut [Complex64],
) -> Result<()> {
    check(cv.n.iter().product(), f.len())?;
    check(cv.ntilde.iter().product(), gbuf.len())?;
    let dims = cv.n.len();
    if dims == 1 {
        gbuf.par_chunks_mut(CHUNK)
            .enumerate()
            .for_each(|(c, chunk)| {
                for (i, g) in chunk.iter_mut().enumerate() {
                    *g = match cv.logical(0, c * CHUNK + i) {
                        Some(x) => f[x] * cv.beta[0][x],
                        None => ZERO,
                    };
                }
            });
        return Ok(());
    }
    let fstr = CorrectionVectors::strides(&cv.n);
    let gstr = CorrectionVectors::strides(&cv.ntilde);
    let last = dims - 1;
    gbuf.par_chunks_mut(gstr[last])
        .enumerate()
        .for_each(|(s, plane)| {
            plane.fill(ZERO);
            if let Some(x) = cv.logical(last, s) {
                forward_rec(
                    cv,
                    &fstr,
                    &gstr,
                    last - 1,
                    f,
                    x * fstr[last],
                    plane,
                    0,
                    cv.beta[last][x],
                );
            }
        });
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn forward_rec(
    cv: &CorrectionVectors,
    fstr: &[usize],
    gstr: &[usize],
    d: usize,
    f: &[Complex64],
    fo: usize,
    g: &mut [Complex64],
    go: usize,
    gamma: f64,
) {
    let (n, nt) = (cv.n[d], cv.ntilde[d]);
    let beta = &cv.beta[d];
    // logical n_d ↦ position (n_d mod Ñ_d): the upper half first, then the wrapped lower half
    let runs = [(n / 2, 0usize, n / 2), (0, nt - n / 2, n / 2)];
    for (x0, s0, len) in runs {
        if d == 0 {
            let src = &f[fo + x0..fo + x0 + len];
            let dst = &mut g[go + s0..go + s0 + len];
            for ((o, &v), &b) in dst.iter_mut().zip(src).zip(&beta[x0..x0 + len]) {
                *o = v * (gamma * b);
            }
        } else {
            for i in 0..len {
                let x = x0 + i;
                forward_rec(
                    cv,
                    fstr,
                    gstr,
                    d - 1,
                    f,
                    fo + x * fstr[d],
                    g,
                    go + (s0 + i) * gstr[d],
                    gamma * beta[x],
                );
            }
        }
    }
}

/// Reads position `n mod Ñ` for every logical `n` and scales by `β_n`; the
/// padding region is discarded.
pub fn apply_correction_adjoint(
    cv: &CorrectionVectors,
    gbuf: &[Complex64],
    y: &mut [Complex64],
) -> Result<()> {
    check(cv.ntilde.iter().product(), gbuf.len())?;
    check(cv.n.iter().product(), y.len())?;
    let dims = cv.n.len();
    if dims == 1 {
        let (n, nt) = (cv.n[0], cv.ntilde[0]);
        y.par_chunks_mut(CHUNK).enumerate().for_each(|(c, chunk)| {
            for (i, o) in chunk.iter_mut().enumerate() {
                let x = c * CHUNK + i;
                let s = (x + nt - n / 2) % nt;
                *o = gbuf[s] * cv.beta[0][x];
            }
        });
        return Ok(());
    }
    let fstr = CorrectionVectors::strides(&cv.n);
    let gstr = CorrectionVectors::strides(&cv.ntilde);
    let last = dims - 1;
    let (n, nt) = (cv.n[last], cv.ntilde[last]);
    y.par_chunks_mut(fstr[last])
        .enumerate()
        .for_each(|(x, plane)| {
            let s = (x + nt - n / 2) % nt;
            adjoint_rec(
                cv,
                &fstr,
                &gstr,
                last - 1,
                gbuf,
                s * gstr[last],
                plane,
                0,
                cv.beta[last][x],
            );
        });
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn adjoint_rec(
    cv: &CorrectionVectors,
    fstr: &[usize],
    gstr: &[usize],
    d: usize,
    g: &[Complex64],
    go: usize,
    y: &mut [Complex64],
    yo: usize,
    gamma: f64,
) {
    let (n, nt) = (cv.n[d], cv.ntilde[d]);
    let beta = &cv.beta[d];
    let runs = [(n / 2, 0usize, n / 2), (0, nt - n / 2, n / 2)];
    for (x0, s0, len) in runs {
        if d == 0 {
            let src = &g[go + s0..go + s0 + len];
            let dst = &mut y[yo + x0..yo + x0 + len];
            for ((o, &v), &b) in dst.iter_mut().zip(src).zip(&beta[x0..x0 + len]) {
                *o = v * (gamma * b);
            }
        } else {
            for i in 0..len {
                let x = x0 + i;
                adjoint_rec(
                    cv,
                    fstr,
                    gstr,
                    d - 1,
                    g,
                    go + (s0 + i) * gstr[d],
                    y,
                    yo + x * fstr[d],
                    gamma * beta[x],
                );
            }
        }
    }
}
