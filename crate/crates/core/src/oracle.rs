//! Direct evaluation of the nonequispaced DFT, used as the accuracy reference.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{NfftError, Result};
use crate::geometry::NodeSet;

/// Largest `|I_N| · J` accepted by the direct sums.
pub const ORACLE_TERM_LIMIT: usize = 10_000_000;

fn check_size(n: &[usize], nodes: &NodeSet) -> Result<usize> {
    let grid: usize = n.iter().product();
    let terms = grid.saturating_mul(nodes.len());
    if terms > ORACLE_TERM_LIMIT {
        return Err(NfftError::TooLarge {
            terms,
            limit: ORACLE_TERM_LIMIT,
        });
    }
    if nodes.dims() != n.len() {
        return Err(NfftError::ShapeMismatch {
            expected: n.len(),
            found: nodes.dims(),
        });
    }
    Ok(grid)
}

/// Logical index of every grid point, `D` entries each, dimension 1 fastest.
fn grid_indices(n: &[usize]) -> Vec<f64> {
    let len: usize = n.iter().product();
    let mut out = Vec::with_capacity(len * n.len());
    for mut off in 0..len {
        for &nd in n {
            out.push((off % nd) as f64 - (nd / 2) as f64);
            off /= nd;
        }
    }
    out
}

#[inline]
fn phase(idx: &[f64], k: &[f64]) -> f64 {
    idx.iter().zip(k).map(|(a, b)| a * b).sum::<f64>()
}

/// `f̂_j = Σ_n f_n e^{-2πi n·k_j}`.
pub fn ndft_direct(nodes: &NodeSet, n: &[usize], f: &[Complex64]) -> Result<Vec<Complex64>> {
    let grid = check_size(n, nodes)?;
    if f.len() != grid {
        return Err(NfftError::ShapeMismatch {
            expected: grid,
            found: f.len(),
        });
    }
    let dims = n.len();
    let idx = grid_indices(n);
    Ok((0..nodes.len())
        .into_par_iter()
        .map(|j| {
            let k = nodes.node(j);
            idx.chunks_exact(dims)
                .zip(f)
                .map(|(i, &v)| {
                    let (s, c) = (-2.0 * PI * phase(i, k)).sin_cos();
                    v * Complex64::new(c, s)
                })
                .sum()
        })
        .collect())
}

/// `y_n = Σ_j f̂_j e^{+2πi n·k_j}`.
pub fn ndft_adjoint(nodes: &NodeSet, n: &[usize], fhat: &[Complex64]) -> Result<Vec<Complex64>> {
    check_size(n, nodes)?;
    if fhat.len() != nodes.len() {
        return Err(NfftError::ShapeMismatch {
            expected: nodes.len(),
            found: fhat.len(),
        });
    }
    let dims = n.len();
    let idx = grid_indices(n);
    Ok(idx
        .par_chunks_exact(dims)
        .map(|i| {
            fhat.iter()
                .enumerate()
                .map(|(j, &v)| {
                    let (s, c) = (2.0 * PI * phase(i, nodes.node(j))).sin_cos();
                    v * Complex64::new(c, s)
                })
                .sum()
        })
        .collect())
}

/// `‖reference − approx‖_∞ / ‖reference‖_∞`.
pub fn relative_error(reference: &[Complex64], approx: &[Complex64]) -> Result<f64> {
    if reference.len() != approx.len() {
        return Err(NfftError::ShapeMismatch {
            expected: reference.len(),
            found: approx.len(),
        });
    }
    let scale = reference.iter().fold(0.0f64, |s, v| s.max(v.norm()));
    if scale == 0.0 {
        return Err(NfftError::ZeroReference);
    }
    let diff = reference
        .iter()
        .zip(approx)
        .fold(0.0f64, |s, (a, b)| s.max((a - b).norm()));
    Ok(diff / scale)
}

/// Transform direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TransformKind {
    Direct,
    Adjoint,
}

impl TransformKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            TransformKind::Direct => "direct",
            TransformKind::Adjoint => "adjoint",
        }
    }
}

/// Measured error of one transform against the direct sum.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub rel_inf_error: f64,
    pub m: usize,
    pub sigma: f64,
    pub n: Vec<usize>,
    pub num_nodes: usize,
    pub kind: TransformKind,
}

impl ErrorReport {
    pub fn dims(&self) -> usize {
        self.n.len()
    }
}
