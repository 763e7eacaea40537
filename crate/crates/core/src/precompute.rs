//! Window precomputation strategies.
//!
//! Every strategy produces, for one node and one dimension, the `2m` tap values
//! `ψ̂_base((m - t + frac) / m)`, `t = 0..2m`, where `frac = Ñk - ⌈Ñk⌉ ∈ (-1, 0]`.
//! Tap `t` multiplies grid index `⌈Ñk⌉ - m + t`, i.e. taps are ordered by
//! increasing grid index.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::error::{NfftError, Result};
use crate::geometry::TransformGeometry;
use crate::resample::NodeGrid;
use crate::window::KaiserBesselWindow;

/// Selects how window values are obtained during resampling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum PrecomputeKind {
    /// Sparse matrix holding every product of taps.
    Full,
    /// Per-node, per-dimension tap vectors.
    Tensor,
    /// Linear interpolation in a lookup table.
    Linear,
    /// Piecewise polynomial approximation evaluated on the fly.
    #[default]
    Polynomial,
}

impl PrecomputeKind {
    pub const ALL: [PrecomputeKind; 4] = [
        PrecomputeKind::Full,
        PrecomputeKind::Tensor,
        PrecomputeKind::Linear,
        PrecomputeKind::Polynomial,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            PrecomputeKind::Full => "full",
            PrecomputeKind::Tensor => "tensor",
            PrecomputeKind::Linear => "linear",
            PrecomputeKind::Polynomial => "polynomial",
        }
    }
}

impl fmt::Display for PrecomputeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PrecomputeKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "full" => Ok(PrecomputeKind::Full),
            "tensor" => Ok(PrecomputeKind::Tensor),
            "linear" => Ok(PrecomputeKind::Linear),
            "polynomial" | "poly" => Ok(PrecomputeKind::Polynomial),
            other => Err(format!("unknown precompute strategy '{other}'")),
        }
    }
}

/// Direct window evaluation for all `2m` taps of one node coordinate.
pub fn exact_taps(window: &KaiserBesselWindow, frac: f64, out: &mut [f64]) {
    let m = window.m() as f64;
    for (t, o) in out.iter_mut().enumerate() {
        *o = window.psi_hat_base((m - t as f64 + frac) / m);
    }
}

/// Lookup-table exponents `c_m` for the Kaiser-Bessel window, `m = 1..=8`.
const LINEAR_EXPONENTS: [u32; 8] = [3, 7, 9, 14, 17, 20, 23, 24];

/// Number of lookup-table samples, `S = m·2^c + 2`; `m > 8` reuses `c_8`.
pub fn linear_table_size(m: usize) -> usize {
    assert!(m >= 1, "window half-width must be positive");
    let c = LINEAR_EXPONENTS[m.min(8) - 1];
    m * (1usize << c) + 2
}

fn try_alloc<T: Clone>(len: usize, fill: T) -> Result<Vec<T>> {
    let mut v = Vec::new();
    v.try_reserve_exact(len)
        .map_err(|_| NfftError::AllocationFailure { entries: len })?;
    v.resize(len, fill);
    Ok(v)
}

/// Equidistant samples `ψ̂_base(s / (S-2))`, `s = 0..S`.
#[derive(Debug, Clone)]
pub struct LinearTable {
    m: usize,
    values: Vec<f64>,
}

impl LinearTable {
    pub fn build(window: &KaiserBesselWindow) -> Result<Self> {
        let size = linear_table_size(window.m());
        let mut values = try_alloc(size, 0.0)?;
        let denom = (size - 2) as f64;
        for (s, v) in values.iter_mut().enumerate() {
            *v = window.psi_hat_base(s as f64 / denom);
        }
        Ok(LinearTable {
            m: window.m(),
            values,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Samples per unit of grid distance, `Y = (S-2)/m`.
    fn step(&self) -> usize {
        (self.values.len() - 2) / self.m
    }

    #[inline]
    fn interp(&self, s: usize, alpha: f64) -> f64 {
        let s = s.min(self.values.len() - 2);
        let a = self.values[s];
        a + alpha * (self.values[s + 1] - a)
    }

    /// Interpolated `ψ̂_base(x/m)` for a grid distance `|x| <= m`.
    pub fn lookup(&self, x: f64) -> f64 {
        let kappa = ((self.values.len() - 2) as f64 / self.m as f64 * x).abs();
        let s = kappa.floor();
        self.interp(s as usize, kappa - s)
    }

    /// All `2m` taps for one coordinate. `κ` is computed once per sign run and
    /// the table index then advances by the constant step `Y`.
    pub fn taps(&self, frac: f64, out: &mut [f64]) {
        let m = self.m;
        let y = self.step();
        let yf = y as f64;
        // distances m - t + frac are >= 0 up to t = m - 1 (t = m when frac == 0)
        let split = if frac == 0.0 { m + 1 } else { m };
        let kappa = yf * (m as f64 + frac);
        let s0 = kappa.floor();
        let alpha = kappa - s0;
        let s0 = s0 as usize;
        for (t, o) in out[..split].iter_mut().enumerate() {
            *o = self.interp(s0 - y * t, alpha);
        }
        let kappa = yf * ((split - m) as f64 - frac);
        let s1 = kappa.floor();
        let alpha = kappa - s1;
        let s1 = s1 as usize;
        for (i, o) in out[split..2 * m].iter_mut().enumerate() {
            *o = self.interp(s1 + y * i, alpha);
        }
    }
}

/// Piecewise polynomial fit of the window on `2m` intervals of width `1/m`.
#[derive(Debug, Clone)]
pub struct PolyCoeffs {
    m: usize,
    z: usize,
    /// `mu[l * Z + z]`: coefficient of `ζ^z` on interval `l` (covering `u ∈ [-1 + l/m, -1 + (l+1)/m]`).
    mu: Vec<f64>,
    /// `by_tap[z * 2m + t]`: the same coefficients reordered so tap `t` is contiguous.
    by_tap: Vec<f64>,
}

impl PolyCoeffs {
    /// Least-squares fit of degree `2m` on `Θ = 2Z` equidistant points per interval,
    /// solved through a QR factorisation of the shared Vandermonde matrix.
    pub fn build(window: &KaiserBesselWindow) -> Result<Self> {
        let m = window.m();
        let z = 2 * m + 1;
        let theta = 2 * z;
        let intervals = 2 * m;
        let nodes: Vec<f64> = (0..theta)
            .map(|i| -0.5 + i as f64 / (theta - 1) as f64)
            .collect();
        let vander = DMatrix::from_fn(theta, z, |r, c| nodes[r].powi(c as i32));
        let qr = vander.qr();
        let q = qr.q();
        let r = qr.r();

        let mut mu = vec![0.0; intervals * z];
        for l in 0..intervals {
            let b = DVector::from_fn(theta, |i, _| {
                let u = -1.0 + (l as f64 + i as f64 / (theta - 1) as f64) / m as f64;
                window.psi_hat_base(u)
            });
            let rhs = q.tr_mul(&b);
            let sol = r
                .solve_upper_triangular(&rhs)
                .filter(|s| s.iter().all(|c| c.is_finite()))
                .ok_or(NfftError::SolveFailure { interval: l })?;
            mu[l * z..(l + 1) * z].copy_from_slice(sol.as_slice());
        }

        let mut by_tap = vec![0.0; z * intervals];
        for t in 0..intervals {
            let l = intervals - 1 - t;
            for k in 0..z {
                by_tap[k * intervals + t] = mu[l * z + k];
            }
        }
        Ok(PolyCoeffs { m, z, mu, by_tap })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Coefficients per interval, `Z = 2m + 1`.
    pub fn coeffs_per_interval(&self) -> usize {
        self.z
    }

    /// Coefficients of interval `l` (0-based, increasing `u`), lowest degree first.
    pub fn interval(&self, l: usize) -> &[f64] {
        &self.mu[l * self.z..(l + 1) * self.z]
    }

    /// Evaluates interval `l` at local position `zeta ∈ [-1/2, 1/2]`.
    pub fn eval_interval(&self, l: usize, zeta: f64) -> f64 {
        self.interval(l)
            .iter()
            .rev()
            .fold(0.0, |acc, &c| acc * zeta + c)
    }

    /// Horner evaluation of all `2m` taps at `zeta ∈ [-1/2, 1/2]`.
    ///
    /// Tap `t` approximates `ψ̂_base((m - t + zeta - 1/2) / m)`, so a node with
    /// `frac = Ñk - ⌈Ñk⌉` uses `zeta = frac + 1/2`.
    #[inline]
    pub fn eval_taps(&self, zeta: f64, out: &mut [f64]) {
        let n = 2 * self.m;
        let top = (self.z - 1) * n;
        out[..n].copy_from_slice(&self.by_tap[top..top + n]);
        for k in (0..self.z - 1).rev() {
            let row = &self.by_tap[k * n..(k + 1) * n];
            for (o, &c) in out[..n].iter_mut().zip(row) {
                *o = *o * zeta + c;
            }
        }
    }

    pub fn memory_values(&self) -> usize {
        self.mu.len()
    }
}

/// Tap vectors for every node and dimension, in partition order.
#[derive(Debug, Clone)]
pub struct TensorTable {
    taps_per_dim: usize,
    dims: usize,
    /// `taps[(i * D + d) * 2m + t]`
    taps: Vec<f64>,
    /// `ω(k_{d,i}, 1)` for every node and dimension, `D × J`.
    base_index: Vec<i64>,
    poly: PolyCoeffs,
}

impl TensorTable {
    /// Taps are produced with the polynomial approximation.
    pub fn build(poly: &PolyCoeffs, grid: &NodeGrid) -> Result<Self> {
        let n = 2 * poly.m();
        let dims = grid.dims();
        let mut taps = try_alloc(n * dims * grid.len(), 0.0)?;
        for (chunk, &frac) in taps.chunks_exact_mut(n).zip(grid.fracs()) {
            poly.eval_taps(frac + 0.5, chunk);
        }
        let base_index = (0..grid.len() * dims)
            .map(|c| grid.first_index(c / dims, c % dims))
            .collect();
        Ok(TensorTable {
            taps_per_dim: n,
            dims,
            taps,
            base_index,
            poly: poly.clone(),
        })
    }

    /// `ω(k_{d,i}, 1)`, the logical grid index of tap 0.
    pub fn base_index(&self, i: usize, d: usize) -> i64 {
        self.base_index[i * self.dims + d]
    }

    /// The polynomial the taps were evaluated with.
    pub fn poly(&self) -> &PolyCoeffs {
        &self.poly
    }

    /// Taps of node `i` (partition order), all dimensions, `D × 2m`.
    #[inline]
    pub fn node(&self, i: usize) -> &[f64] {
        let stride = self.taps_per_dim * self.dims;
        &self.taps[i * stride..(i + 1) * stride]
    }

    pub fn memory_values(&self) -> usize {
        self.taps.len()
    }
}

/// Compressed-row resampling matrix `B`, one row per node in partition order.
#[derive(Debug, Clone)]
pub struct SparseB {
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SparseB {
    /// Entries of a row follow the nested tap order, dimension 1 fastest; columns are
    /// storage positions in the oversampled buffer.
    pub fn build(
        window: &KaiserBesselWindow,
        grid: &NodeGrid,
        geometry: &TransformGeometry,
    ) -> Result<Self> {
        let dims = grid.dims();
        let m = window.m();
        let n = 2 * m;
        let row_len = n.pow(dims as u32);
        let rows = grid.len();
        let nnz = row_len
            .checked_mul(rows)
            .ok_or(NfftError::AllocationFailure {
                entries: usize::MAX,
            })?;
        let mut cols = try_alloc(nnz, 0usize)?;
        let mut vals = try_alloc(nnz, 0.0)?;
        let row_ptr: Vec<usize> = (0..=rows).map(|r| r * row_len).collect();

        let ntilde = geometry.ntilde();
        let mut strides = vec![1usize; dims];
        for d in 1..dims {
            strides[d] = strides[d - 1] * ntilde[d - 1];
        }
        let mut taps = vec![0.0; dims * n];
        let mut pos = vec![0usize; dims * n];
        let mut idx = vec![0usize; dims];
        for i in 0..rows {
            for d in 0..dims {
                exact_taps(window, grid.frac(i, d), &mut taps[d * n..(d + 1) * n]);
                for t in 0..n {
                    pos[d * n + t] = grid.storage_index(i, d, t) * strides[d];
                }
            }
            idx.iter_mut().for_each(|v| *v = 0);
            let base = row_ptr[i];
            for r in 0..row_len {
                let mut w = 1.0;
                let mut c = 0;
                for d in 0..dims {
                    w *= taps[d * n + idx[d]];
                    c += pos[d * n + idx[d]];
                }
                vals[base + r] = w;
                cols[base + r] = c;
                for v in idx.iter_mut() {
                    *v += 1;
                    if *v < n {
                        break;
                    }
                    *v = 0;
                }
            }
        }
        Ok(SparseB {
            row_ptr,
            cols,
            vals,
        })
    }

    pub fn rows(&self) -> usize {
        self.row_ptr.len() - 1
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    #[inline]
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.cols[r.clone()], &self.vals[r])
    }

    pub fn memory_values(&self) -> usize {
        self.vals.len()
    }
}

/// The window data held by a plan for its selected strategy.
#[derive(Debug, Clone)]
pub enum PrecomputeTable {
    Full(SparseB),
    Tensor(TensorTable),
    Linear(LinearTable),
    Polynomial(PolyCoeffs),
}

impl PrecomputeTable {
    pub fn build(
        kind: PrecomputeKind,
        window: &KaiserBesselWindow,
        grid: &NodeGrid,
        geometry: &TransformGeometry,
    ) -> Result<Self> {
        Ok(match kind {
            PrecomputeKind::Full => PrecomputeTable::Full(SparseB::build(window, grid, geometry)?),
            PrecomputeKind::Tensor => {
                let poly = PolyCoeffs::build(window)?;
                PrecomputeTable::Tensor(TensorTable::build(&poly, grid)?)
            }
            PrecomputeKind::Linear => PrecomputeTable::Linear(LinearTable::build(window)?),
            PrecomputeKind::Polynomial => PrecomputeTable::Polynomial(PolyCoeffs::build(window)?),
        })
    }

    pub fn kind(&self) -> PrecomputeKind {
        match self {
            PrecomputeTable::Full(_) => PrecomputeKind::Full,
            PrecomputeTable::Tensor(_) => PrecomputeKind::Tensor,
            PrecomputeTable::Linear(_) => PrecomputeKind::Linear,
            PrecomputeTable::Polynomial(_) => PrecomputeKind::Polynomial,
        }
    }

    /// Number of stored window values.
    pub fn memory_values(&self) -> usize {
        match self {
            PrecomputeTable::Full(b) => b.memory_values(),
            PrecomputeTable::Tensor(t) => t.memory_values(),
            PrecomputeTable::Linear(l) => l.len(),
            PrecomputeTable::Polynomial(p) => p.memory_values(),
        }
    }

    /// Fills the `2m` taps of node `i` (partition order) along dimension `d`.
    /// Not used for [`PrecomputeTable::Full`], whose rows already hold the products.
    #[inline]
    pub(crate) fn fill_taps(&self, grid: &NodeGrid, i: usize, out: &mut [f64]) {
        let dims = grid.dims();
        let n = out.len() / dims;
        match self {
            PrecomputeTable::Tensor(t) => out.copy_from_slice(t.node(i)),
            PrecomputeTable::Linear(l) => {
                for d in 0..dims {
                    l.taps(grid.frac(i, d), &mut out[d * n..(d + 1) * n]);
                }
            }
            PrecomputeTable::Polynomial(p) => {
                for d in 0..dims {
                    p.eval_taps(grid.frac(i, d) + 0.5, &mut out[d * n..(d + 1) * n]);
                }
            }
            PrecomputeTable::Full(_) => unreachable!("full precomputation stores whole rows"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::NodeSet;

    fn peak(w: &KaiserBesselWindow) -> f64 {
        w.psi_hat_base(0.0)
    }

    #[test]
    fn table_sizes() {
        assert_eq!(linear_table_size(1), 10);
        assert_eq!(linear_table_size(2), 2 * 128 + 2);
        assert_eq!(linear_table_size(4), 65538);
        assert_eq!(linear_table_size(8), 134_217_730);
        assert_eq!(linear_table_size(9), 9 * (1 << 24) + 2);
        for m in 1..=10 {
            assert_eq!((linear_table_size(m) - 2) % m, 0);
        }
    }

    #[test]
    fn linear_table_endpoints() {
        let w = KaiserBesselWindow::new(3, 2.0);
        let t = LinearTable::build(&w).unwrap();
        let s = t.len();
        assert_eq!(t.values()[0], w.beta().sinh() / std::f64::consts::PI);
        assert_eq!(t.values()[s - 2], w.beta() / std::f64::consts::PI);
        assert_eq!(t.values()[s - 1], 0.0);
    }

    #[test]
    fn linear_lookup_on_knots_and_between() {
        let w = KaiserBesselWindow::new(4, 2.0);
        let t = LinearTable::build(&w).unwrap();
        assert_eq!(t.lookup(0.0), w.psi_hat_base(0.0));
        assert_eq!(t.lookup(4.0), w.psi_hat_base(1.0));
        assert_eq!(t.lookup(-4.0), w.psi_hat_base(1.0));
        let x = 2.0 + 1.234_567e-6;
        let err = (t.lookup(x) - w.psi_hat_base(x / 4.0)).abs() / peak(&w);
        assert!(err <= 1e-9, "relative error {err}");
    }

    #[test]
    fn stepped_linear_taps_match_naive_lookup() {
        for m in 1..=5 {
            let w = KaiserBesselWindow::new(m, 2.0);
            let t = LinearTable::build(&w).unwrap();
            let mut taps = vec![0.0; 2 * m];
            for &frac in &[0.0, -0.1, -0.5, -0.999_999, -1e-12, -0.333] {
                t.taps(frac, &mut taps);
                for (k, &v) in taps.iter().enumerate() {
                    let naive = t.lookup(m as f64 - k as f64 + frac);
                    assert!(
                        (v - naive).abs() <= 1e-12 * peak(&w),
                        "m = {m}, frac = {frac}, tap {k}: {v} vs {naive}"
                    );
                }
            }
        }
    }

    #[test]
    fn poly_fit_residual_at_sample_points() {
        // measured relative to the window peak; a degree-2m fit reaches ~6e-9 at m = 4
        // and the round-off floor from m = 6 on
        for (m, tol) in [
            (2, 1e-3),
            (3, 5e-6),
            (4, 1e-8),
            (5, 5e-11),
            (6, 1e-13),
            (8, 1e-13),
        ] {
            let w = KaiserBesselWindow::new(m, 2.0);
            let p = PolyCoeffs::build(&w).unwrap();
            let z = p.coeffs_per_interval();
            assert_eq!(z, 2 * m + 1);
            let theta = 2 * z;
            for l in 0..2 * m {
                for i in 0..theta {
                    let zeta = -0.5 + i as f64 / (theta - 1) as f64;
                    let u = -1.0 + (l as f64 + i as f64 / (theta - 1) as f64) / m as f64;
                    let err = (p.eval_interval(l, zeta) - w.psi_hat_base(u)).abs() / peak(&w);
                    assert!(err <= tol, "m = {m}, interval {l}: {err}");
                }
            }
        }
    }

    #[test]
    fn poly_coefficients_mirror_across_intervals() {
        let m = 4;
        let w = KaiserBesselWindow::new(m, 2.0);
        let p = PolyCoeffs::build(&w).unwrap();
        for l in 0..2 * m {
            let mirror = 2 * m - 1 - l;
            let a = p.interval(l);
            let b = p.interval(mirror);
            // high-order coefficients carry the conditioning of the Vandermonde fit
            let scale = a.iter().fold(0.0f64, |s, c| s.max(c.abs()));
            for (z, (&x, &y)) in a.iter().zip(b).enumerate() {
                let sign = if z % 2 == 0 { 1.0 } else { -1.0 };
                assert!(
                    (x - sign * y).abs() <= 1e-10 * scale,
                    "interval {l}, z = {z}"
                );
            }
            for i in 0..=20 {
                let zeta = -0.5 + i as f64 / 20.0;
                let d = (p.eval_interval(l, zeta) - p.eval_interval(mirror, -zeta)).abs();
                assert!(d <= 1e-13 * peak(&w), "interval {l}, zeta = {zeta}");
            }
        }
    }

    #[test]
    fn poly_taps_on_grid_and_symmetric() {
        let m = 4;
        let w = KaiserBesselWindow::new(m, 2.0);
        let p = PolyCoeffs::build(&w).unwrap();
        let mut taps = vec![0.0; 2 * m];
        // ζ = -1/2: node one step past a grid point in the floor convention
        p.eval_taps(-0.5, &mut taps);
        for (t, &v) in taps.iter().enumerate() {
            let want = w.psi_hat_base((m as f64 - 1.0 - t as f64) / m as f64);
            assert!((v - want).abs() <= 1e-8 * peak(&w), "tap {t}");
        }
        // ζ = 1/2: node exactly on the grid in the ceil convention
        p.eval_taps(0.5, &mut taps);
        for (t, &v) in taps.iter().enumerate() {
            let want = w.psi_hat_base((m as f64 - t as f64) / m as f64);
            assert!((v - want).abs() <= 1e-8 * peak(&w), "tap {t}");
        }
        p.eval_taps(0.0, &mut taps);
        for t in 0..m {
            assert!((taps[t] - taps[2 * m - 1 - t]).abs() <= 1e-12 * peak(&w));
        }
    }

    #[test]
    fn poly_taps_track_direct_window() {
        for (m, tol) in [(4usize, 2e-8), (8, 1e-13)] {
            let w = KaiserBesselWindow::new(m, 2.0);
            let p = PolyCoeffs::build(&w).unwrap();
            let mut taps = vec![0.0; 2 * m];
            let mut exact = vec![0.0; 2 * m];
            for i in 0..200 {
                let frac = -(i as f64 + 0.37) / 200.0;
                p.eval_taps(frac + 0.5, &mut taps);
                exact_taps(&w, frac, &mut exact);
                for t in 0..2 * m {
                    let err = (taps[t] - exact[t]).abs() / peak(&w);
                    assert!(err <= tol, "m = {m}, frac = {frac}, tap {t}: {err}");
                }
            }
        }
    }

    #[test]
    fn sparse_b_layout() {
        // Ñ = 16, m = 2, k = 0.3: support columns 3..=6
        let geom = TransformGeometry::new(&[8], 2, 2.0, 1).unwrap();
        let nodes = NodeSet::new(1, &[0.3]).unwrap();
        let grid = NodeGrid::new(&nodes, &geom, None);
        let w = KaiserBesselWindow::new(2, 2.0);
        let b = SparseB::build(&w, &grid, &geom).unwrap();
        assert_eq!(b.rows(), 1);
        assert_eq!(b.nnz(), 4);
        assert_eq!(b.row(0).0, &[3, 4, 5, 6]);

        let nodes = NodeSet::new(1, &[0.0]).unwrap();
        let grid = NodeGrid::new(&nodes, &geom, None);
        let b = SparseB::build(&w, &grid, &geom).unwrap();
        let (cols, vals) = b.row(0);
        assert_eq!(cols, &[14, 15, 0, 1]);
        // distances 2, 1, 0, -1: symmetric around the peak tap
        assert_eq!(vals[1], vals[3]);
        assert!(vals[2] > vals[1]);
    }

    #[test]
    fn memory_accounting() {
        let m = 4;
        let geom = TransformGeometry::new(&[32, 32], m, 2.0, 1024).unwrap();
        let coords: Vec<f64> = (0..2048)
            .map(|i| ((i * 7919) % 1000) as f64 / 1000.0 - 0.5)
            .collect();
        let nodes = NodeSet::new(2, &coords).unwrap();
        let grid = NodeGrid::new(&nodes, &geom, None);
        let w = KaiserBesselWindow::new(m, 2.0);
        let sizes: Vec<usize> = PrecomputeKind::ALL
            .iter()
            .map(|&k| {
                PrecomputeTable::build(k, &w, &grid, &geom)
                    .unwrap()
                    .memory_values()
            })
            .collect();
        assert_eq!(sizes[0], 8 * 8 * 1024);
        assert_eq!(sizes[1], 16384);
        assert_eq!(sizes[2], 65538);
        assert_eq!(sizes[3], 2 * m * (2 * m + 1));
    }

    #[test]
    fn tensor_table_empty_for_no_nodes() {
        let geom = TransformGeometry::new(&[16], 2, 2.0, 0).unwrap();
        let nodes = NodeSet::new(1, &[]).unwrap();
        let grid = NodeGrid::new(&nodes, &geom, None);
        let w = KaiserBesselWindow::new(2, 2.0);
        let p = PolyCoeffs::build(&w).unwrap();
        assert_eq!(TensorTable::build(&p, &grid).unwrap().memory_values(), 0);
    }

    #[test]
    fn kind_round_trips_through_strings() {
        for k in PrecomputeKind::ALL {
            assert_eq!(k.to_string().parse::<PrecomputeKind>().unwrap(), k);
        }
        assert!("none".parse::<PrecomputeKind>().is_err());
    }
}
