//! Resampling between the oversampled grid and the nodes.
//!
//! Nodes are binned into equally sized boxes of the torus. Each box is processed
//! against a padded local copy of the grid (`Q_d + 2m` entries per dimension), so
//! the inner tap loops never wrap and boxes can run in parallel.

use std::sync::Mutex;

use num_complex::Complex64;
use rayon::prelude::*;
use rayon::ThreadPool;

use crate::error::{NfftError, Result};
use crate::geometry::{fold, NodeSet, TransformGeometry};
use crate::precompute::{exact_taps, PrecomputeTable};
use crate::window::KaiserBesselWindow;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Number of box caches merged per round in deterministic adjoint mode.
const DETERMINISTIC_GROUP: usize = 16;

/// Wrapped grid index of tap `ell ∈ 1..=2m` for node coordinate `k`, in `[-Ñ/2, Ñ/2)`.
///
/// The buffer position addressed is `omega + Ñ/2`.
pub fn omega(ntilde: usize, m: usize, k: f64, ell: usize) -> i64 {
    let nt = ntilde as i64;
    let x = ntilde as f64 * k.rem_euclid(1.0) - m as f64 + ell as f64 - 1.0;
    (x.ceil() as i64).rem_euclid(nt) - nt / 2
}

/// Default box edge lengths, clamped to the oversampled grid.
pub fn default_block_size(ntilde: &[usize]) -> Vec<usize> {
    let b = match ntilde.len() {
        1 => 4096,
        2 => 64,
        3 => 16,
        _ => 1,
    };
    ntilde.iter().map(|&n| b.min(n)).collect()
}

/// Per-node grid position: `cell = ⌈Ñk⌉ + Ñ/2 ∈ [0, Ñ]` and `frac = Ñk - ⌈Ñk⌉ ∈ (-1, 0]`.
#[derive(Debug, Clone)]
pub struct NodeGrid {
    dims: usize,
    m: usize,
    ntilde: Vec<usize>,
    cells: Vec<usize>,
    fracs: Vec<f64>,
}

impl NodeGrid {
    /// Positions of `nodes`, optionally reordered so entry `i` describes node `order[i]`.
    pub fn new(nodes: &NodeSet, geometry: &TransformGeometry, order: Option<&[usize]>) -> Self {
        let dims = geometry.dims();
        let len = nodes.len();
        let mut cells = Vec::with_capacity(len * dims);
        let mut fracs = Vec::with_capacity(len * dims);
        for i in 0..len {
            let j = order.map_or(i, |o| o[i]);
            for (d, &k) in nodes.node(j).iter().enumerate() {
                let nt = geometry.ntilde()[d];
                let x = nt as f64 * k;
                let c = x.ceil();
                cells.push((c as i64 + (nt / 2) as i64) as usize);
                fracs.push(x - c);
            }
        }
        NodeGrid {
            dims,
            m: geometry.m(),
            ntilde: geometry.ntilde().to_vec(),
            cells,
            fracs,
        }
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.cells.len() / self.dims
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// All offsets, `D × J`, coordinate-fastest.
    pub fn fracs(&self) -> &[f64] {
        &self.fracs
    }

    #[inline]
    pub fn frac(&self, i: usize, d: usize) -> f64 {
        self.fracs[i * self.dims + d]
    }

    #[inline]
    pub fn cell(&self, i: usize, d: usize) -> usize {
        self.cells[i * self.dims + d]
    }

    /// Buffer position along dimension `d` of tap `t` of node `i`.
    #[inline]
    pub fn storage_index(&self, i: usize, d: usize, t: usize) -> usize {
        let nt = self.ntilde[d] as i64;
        (self.cell(i, d) as i64 - nt / 2 - self.m as i64 + t as i64).rem_euclid(nt) as usize
    }

    /// `ω(k, 1)`: wrapped logical index of tap 0.
    pub fn first_index(&self, i: usize, d: usize) -> i64 {
        self.storage_index(i, d, 0) as i64 - (self.ntilde[d] / 2) as i64
    }
}

/// Binning of the nodes into boxes of the torus.
#[derive(Debug, Clone)]
pub struct BlockPartition {
    blocks: Vec<usize>,
    q: Vec<usize>,
    extent: Vec<usize>,
    /// `starts[d][p] = ⌈Ñ_d p / P_d⌉`, `P_d + 1` entries.
    starts: Vec<Vec<usize>>,
    node_order: Vec<usize>,
    rank: Vec<usize>,
    block_offsets: Vec<usize>,
    /// Cache offset of tap 0 for each node, partition order.
    local_offset: Vec<usize>,
    /// `wrap[d][p * E_d + i]`: buffer offset (already times the grid stride) of cache row `i`.
    wrap: Vec<Vec<usize>>,
    active: Vec<usize>,
    pad: usize,
}

impl BlockPartition {
    pub fn new(
        nodes: &NodeSet,
        grid: &NodeGrid,
        geometry: &TransformGeometry,
        block_size: &[usize],
    ) -> Result<Self> {
        let dims = geometry.dims();
        let ntilde = geometry.ntilde();
        let m = geometry.m();
        if block_size.len() != dims {
            return Err(NfftError::BadBlockSize(format!(
                "expected {dims} block dimensions, got {}",
                block_size.len()
            )));
        }
        for (d, (&b, &nt)) in block_size.iter().zip(ntilde).enumerate() {
            if b == 0 || b > nt {
                return Err(NfftError::BadBlockSize(format!(
                    "block size {b} in dimension {d} must lie in 1..={nt}"
                )));
            }
        }
        let blocks: Vec<usize> = ntilde
            .iter()
            .zip(block_size)
            .map(|(&nt, &b)| nt.div_ceil(b))
            .collect();
        let q: Vec<usize> = ntilde
            .iter()
            .zip(&blocks)
            .map(|(&nt, &p)| nt.div_ceil(p))
            .collect();
        let extent: Vec<usize> = q.iter().map(|&q| q + 2 * m).collect();
        let starts: Vec<Vec<usize>> = ntilde
            .iter()
            .zip(&blocks)
            .map(|(&nt, &p)| (0..=p).map(|i| (nt * i).div_ceil(p)).collect())
            .collect();

        let mut gstride = 1;
        let mut wrap = Vec::with_capacity(dims);
        for d in 0..dims {
            let nt = ntilde[d] as i64;
            let e = extent[d];
            let mut w = Vec::with_capacity(blocks[d] * e);
            for &start in &starts[d][..blocks[d]] {
                let origin = start as i64 - m as i64 - nt / 2;
                w.extend((0..e).map(|i| (origin + i as i64).rem_euclid(nt) as usize * gstride));
            }
            wrap.push(w);
            gstride *= ntilde[d];
        }

        let total: usize = blocks.iter().product();
        let len = nodes.len();
        let mut block_of = vec![0usize; len];
        let mut counts = vec![0usize; total + 1];
        for (j, b) in block_of.iter_mut().enumerate() {
            let mut id = 0;
            let mut stride = 1;
            for (d, &k) in nodes.node(j).iter().enumerate() {
                let pd = blocks[d];
                let mut p = (((k + 0.5) * pd as f64).floor().max(0.0) as usize).min(pd - 1);
                let cell = grid.cell(j, d);
                while p > 0 && cell < starts[d][p] {
                    p -= 1;
                }
                while p + 1 < pd && cell > starts[d][p + 1] {
                    p += 1;
                }
                id += p * stride;
                stride *= pd;
            }
            *b = id;
            counts[id + 1] += 1;
        }
        for b in 0..total {
            counts[b + 1] += counts[b];
        }
        let block_offsets = counts;
        let mut next = block_offsets.clone();
        let mut node_order = vec![0usize; len];
        for (j, &b) in block_of.iter().enumerate() {
            node_order[next[b]] = j;
            next[b] += 1;
        }
        let mut rank = vec![0usize; len];
        for (i, &j) in node_order.iter().enumerate() {
            rank[j] = i;
        }
        let active = (0..total)
            .filter(|&b| block_offsets[b + 1] > block_offsets[b])
            .collect();

        let mut local_offset = vec![0usize; len];
        for (i, &j) in node_order.iter().enumerate() {
            let b = block_of[j];
            let mut off = 0;
            let mut bstride = 1;
            let mut cstride = 1;
            for d in 0..dims {
                let p = (b / bstride) % blocks[d];
                off += (grid.cell(j, d) - starts[d][p]) * cstride;
                bstride *= blocks[d];
                cstride *= extent[d];
            }
            local_offset[i] = off;
        }

        Ok(BlockPartition {
            blocks,
            q,
            extent,
            starts,
            node_order,
            rank,
            block_offsets,
            local_offset,
            wrap,
            active,
            pad: m,
        })
    }

    /// Boxes per dimension, `P`.
    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    /// Box edge lengths, `Q = ⌈Ñ / P⌉`.
    pub fn q(&self) -> &[usize] {
        &self.q
    }

    pub fn pad(&self) -> usize {
        self.pad
    }

    pub fn num_blocks(&self) -> usize {
        self.block_offsets.len() - 1
    }

    /// Entries of one padded box cache, `∏(Q_d + 2m)`.
    pub fn cache_len(&self) -> usize {
        self.extent.iter().product()
    }

    pub fn node_order(&self) -> &[usize] {
        &self.node_order
    }

    pub fn block_offsets(&self) -> &[usize] {
        &self.block_offsets
    }

    /// Original indices of the nodes in box `b`.
    pub fn block_nodes(&self, b: usize) -> &[usize] {
        &self.node_order[self.block_offsets[b]..self.block_offsets[b + 1]]
    }

    /// Position of original node `j` in partition order.
    pub fn rank(&self, j: usize) -> usize {
        self.rank[j]
    }

    /// Boxes holding at least one node.
    pub fn active_blocks(&self) -> &[usize] {
        &self.active
    }

    /// Lower grid boundaries of the boxes along dimension `d`.
    pub fn starts(&self, d: usize) -> &[usize] {
        &self.starts[d]
    }

    #[inline]
    fn block_coord(&self, b: usize, d: usize) -> usize {
        let stride: usize = self.blocks[..d].iter().product();
        (b / stride) % self.blocks[d]
    }
}

/// Builds the box partition of `nodes`.
pub fn build_partition(
    nodes: &NodeSet,
    geometry: &TransformGeometry,
    block_size: &[usize],
) -> Result<BlockPartition> {
    let grid = NodeGrid::new(nodes, geometry, None);
    BlockPartition::new(nodes, &grid, geometry, block_size)
}

/// Window taps of one node coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalTaps {
    /// `2m` values, ordered by increasing grid index.
    pub taps: Vec<f64>,
    /// `ω(k, 1)`, the wrapped grid index of the first tap.
    pub base: i64,
}

/// Taps for coordinate `k` along a dimension of size `ntilde`, using the strategy
/// of `table`. Sparse-matrix rows are built from direct window values, so
/// [`PrecomputeTable::Full`] evaluates the window directly here.
pub fn local_taps(
    table: &PrecomputeTable,
    window: &KaiserBesselWindow,
    k: f64,
    ntilde: usize,
) -> LocalTaps {
    let m = window.m();
    let x = ntilde as f64 * fold(k);
    let frac = x - x.ceil();
    let mut taps = vec![0.0; 2 * m];
    match table {
        PrecomputeTable::Full(_) => exact_taps(window, frac, &mut taps),
        PrecomputeTable::Tensor(t) => t.poly().eval_taps(frac + 0.5, &mut taps),
        PrecomputeTable::Linear(l) => l.taps(frac, &mut taps),
        PrecomputeTable::Polynomial(p) => p.eval_taps(frac + 0.5, &mut taps),
    }
    LocalTaps {
        taps,
        base: omega(ntilde, m, k, 1),
    }
}

struct Workspace {
    cache: Vec<Complex64>,
    taps: Vec<f64>,
}

#[derive(Clone, Copy)]
struct SharedMut(*mut Complex64);

// SAFETY: only used to write disjoint indices of one slice from parallel tasks.
unsafe impl Send for SharedMut {}
unsafe impl Sync for SharedMut {}

impl SharedMut {
    /// Method access makes closures capture the whole `Sync` wrapper.
    #[inline]
    fn get(&self) -> *mut Complex64 {
        self.0
    }
}

/// Resampling state owned by a plan: sorted node positions, the partition and
/// the preallocated box caches.
pub(crate) struct Resampler {
    dims: usize,
    taps_per_dim: usize,
    gstride: Vec<usize>,
    cstride: Vec<usize>,
    grid: NodeGrid,
    partition: BlockPartition,
    workspaces: Vec<Mutex<Workspace>>,
    arena: Mutex<Vec<Complex64>>,
}

impl Resampler {
    pub fn new(
        nodes: &NodeSet,
        geometry: &TransformGeometry,
        block_size: &[usize],
        threads: usize,
        deterministic: bool,
    ) -> Result<Self> {
        let unsorted = NodeGrid::new(nodes, geometry, None);
        let partition = BlockPartition::new(nodes, &unsorted, geometry, block_size)?;
        let grid = NodeGrid::new(nodes, geometry, Some(partition.node_order()));
        let dims = geometry.dims();
        let m = geometry.m();
        let mut gstride = vec![1usize; dims];
        let mut cstride = vec![1usize; dims];
        for d in 1..dims {
            gstride[d] = gstride[d - 1] * geometry.ntilde()[d - 1];
            cstride[d] = cstride[d - 1] * partition.extent[d - 1];
        }
        let cache_len = if partition.active.is_empty() {
            0
        } else {
            partition.cache_len()
        };
        let alloc = |len: usize| -> Result<Vec<Complex64>> {
            let mut v = Vec::new();
            v.try_reserve_exact(len)
                .map_err(|_| NfftError::AllocationFailure { entries: len })?;
            v.resize(len, ZERO);
            Ok(v)
        };
        let workspaces = (0..threads.max(1))
            .map(|_| {
                Ok(Mutex::new(Workspace {
                    cache: alloc(cache_len)?,
                    taps: vec![0.0; 2 * m * dims],
                }))
            })
            .collect::<Result<Vec<_>>>()?;
        let arena_len = if deterministic {
            DETERMINISTIC_GROUP.min(partition.active.len()) * cache_len
        } else {
            0
        };
        Ok(Resampler {
            dims,
            taps_per_dim: 2 * m,
            gstride,
            cstride,
            grid,
            partition,
            workspaces,
            arena: Mutex::new(alloc(arena_len)?),
        })
    }

    pub fn grid(&self) -> &NodeGrid {
        &self.grid
    }

    pub fn partition(&self) -> &BlockPartition {
        &self.partition
    }

    /// Worker-local scratch; the index is stable within a pool, so locks are uncontended.
    fn workspace(&self) -> std::sync::MutexGuard<'_, Workspace> {
        let idx = rayon::current_thread_index().unwrap_or(0) % self.workspaces.len();
        self.workspaces[idx]
            .lock()
            .unwrap_or_else(|e| e.into_inner())
    }

    fn ensure_cache(&self, ws: &mut Workspace) {
        let len = self.partition.cache_len();
        if ws.cache.len() < len {
            ws.cache.resize(len, ZERO);
        }
    }

    fn load_block(&self, b: usize, g: &[Complex64], cache: &mut [Complex64]) {
        self.copy_rec(b, self.dims - 1, 0, 0, &mut |c, s| cache[c] = g[s]);
    }

    fn merge_block(&self, b: usize, cache: &[Complex64], g: &mut [Complex64]) {
        self.copy_rec(b, self.dims - 1, 0, 0, &mut |c, s| g[s] += cache[c]);
    }

    fn copy_rec(
        &self,
        b: usize,
        d: usize,
        coff: usize,
        goff: usize,
        f: &mut impl FnMut(usize, usize),
    ) {
        let e = self.partition.extent[d];
        let p = self.partition.block_coord(b, d);
        let wrap = &self.partition.wrap[d][p * e..(p + 1) * e];
        if d == 0 {
            for (i, &s) in wrap.iter().enumerate() {
                f(coff + i, goff + s);
            }
        } else {
            let cs = self.cstride[d];
            for (i, &s) in wrap.iter().enumerate() {
                self.copy_rec(b, d - 1, coff + i * cs, goff + s, f);
            }
        }
    }

    /// Blocked direct resampling: `out[j] = Σ_l ψ(k_j - l/Ñ) g_l`.
    pub fn direct(
        &self,
        table: &PrecomputeTable,
        g: &[Complex64],
        out: &mut [Complex64],
        pool: &ThreadPool,
    ) {
        let part = &self.partition;
        let dst = SharedMut(out.as_mut_ptr());
        pool.install(|| {
            part.active.par_iter().for_each(|&b| {
                let range = part.block_offsets[b]..part.block_offsets[b + 1];
                if let PrecomputeTable::Full(sb) = table {
                    for i in range {
                        let (cols, vals) = sb.row(i);
                        let v = cols.iter().zip(vals).map(|(&c, &w)| g[c] * w).sum();
                        // SAFETY: node_order is a permutation, so every index is written once.
                        unsafe { *dst.get().add(part.node_order[i]) = v };
                    }
                    return;
                }
                let mut ws = self.workspace();
                self.ensure_cache(&mut ws);
                let Workspace { cache, taps } = &mut *ws;
                self.load_block(b, g, cache);
                for i in range {
                    table.fill_taps(&self.grid, i, taps);
                    let v = gather(
                        cache,
                        &self.cstride,
                        taps,
                        self.taps_per_dim,
                        part.local_offset[i],
                    );
                    // SAFETY: as above.
                    unsafe { *dst.get().add(part.node_order[i]) = v };
                }
            })
        });
    }

    fn scatter_block(
        &self,
        b: usize,
        table: &PrecomputeTable,
        fhat: &[Complex64],
        cache: &mut [Complex64],
        taps: &mut [f64],
    ) {
        let part = &self.partition;
        cache.fill(ZERO);
        for i in part.block_offsets[b]..part.block_offsets[b + 1] {
            let v = fhat[part.node_order[i]];
            let off = part.local_offset[i];
            match table {
                PrecomputeTable::Full(sb) => {
                    let (_, vals) = sb.row(i);
                    let mut r = 0;
                    scatter_full(
                        cache,
                        &self.cstride,
                        vals,
                        self.taps_per_dim,
                        off,
                        self.dims - 1,
                        v,
                        &mut r,
                    );
                }
                _ => {
                    table.fill_taps(&self.grid, i, taps);
                    scatter(cache, &self.cstride, taps, self.taps_per_dim, off, v);
                }
            }
        }
    }

    /// Blocked adjoint resampling: `g_l = Σ_j ψ(k_j - l/Ñ) fhat_j`.
    ///
    /// In deterministic mode box caches are merged in box order, independent of
    /// the number of workers.
    pub fn adjoint(
        &self,
        table: &PrecomputeTable,
        fhat: &[Complex64],
        g: &mut [Complex64],
        pool: &ThreadPool,
        deterministic: bool,
    ) {
        let part = &self.partition;
        let len = part.cache_len();
        pool.install(|| {
            g.par_chunks_mut(1 << 14).for_each(|c| c.fill(ZERO));
            if deterministic {
                let mut arena = self.arena.lock().unwrap_or_else(|e| e.into_inner());
                let group = DETERMINISTIC_GROUP.min(part.active.len()).max(1);
                if arena.len() < group * len {
                    arena.resize(group * len, ZERO);
                }
                for blocks in part.active.chunks(group) {
                    arena[..blocks.len() * len]
                        .par_chunks_mut(len)
                        .zip(blocks.par_iter())
                        .for_each(|(cache, &b)| {
                            let mut ws = self.workspace();
                            self.scatter_block(b, table, fhat, cache, &mut ws.taps);
                        });
                    for (cache, &b) in arena.chunks(len).zip(blocks) {
                        self.merge_block(b, cache, g);
                    }
                }
            } else {
                let shared = Mutex::new(&mut *g);
                part.active.par_iter().for_each(|&b| {
                    let mut ws = self.workspace();
                    self.ensure_cache(&mut ws);
                    let Workspace { cache, taps } = &mut *ws;
                    let cache = &mut cache[..len];
                    self.scatter_block(b, table, fhat, cache, taps);
                    let mut g = shared.lock().unwrap_or_else(|e| e.into_inner());
                    self.merge_block(b, cache, &mut g);
                });
            }
        });
    }

    /// Storage offsets (times the grid stride) of every tap of partition node `i`.
    fn tap_positions(&self, i: usize, pos: &mut [usize]) {
        let n = self.taps_per_dim;
        for d in 0..self.dims {
            for t in 0..n {
                pos[d * n + t] = self.grid.storage_index(i, d, t) * self.gstride[d];
            }
        }
    }

    /// Reference direct resampling: one node at a time, straight from the buffer.
    pub fn direct_unblocked(
        &self,
        table: &PrecomputeTable,
        g: &[Complex64],
        out: &mut [Complex64],
    ) {
        let n = self.taps_per_dim;
        let mut taps = vec![0.0; n * self.dims];
        let mut pos = vec![0usize; n * self.dims];
        for (j, o) in out.iter_mut().enumerate() {
            let i = self.partition.rank[j];
            *o = match table {
                PrecomputeTable::Full(sb) => {
                    let (cols, vals) = sb.row(i);
                    cols.iter().zip(vals).map(|(&c, &w)| g[c] * w).sum()
                }
                _ => {
                    table.fill_taps(&self.grid, i, &mut taps);
                    self.tap_positions(i, &mut pos);
                    gather_wrapped(g, &pos, &taps, n, self.dims - 1, 0)
                }
            };
        }
    }

    /// Reference adjoint resampling.
    pub fn adjoint_unblocked(
        &self,
        table: &PrecomputeTable,
        fhat: &[Complex64],
        g: &mut [Complex64],
    ) {
        g.fill(ZERO);
        let n = self.taps_per_dim;
        let mut taps = vec![0.0; n * self.dims];
        let mut pos = vec![0usize; n * self.dims];
        for (j, &v) in fhat.iter().enumerate() {
            let i = self.partition.rank[j];
            match table {
                PrecomputeTable::Full(sb) => {
                    let (cols, vals) = sb.row(i);
                    for (&c, &w) in cols.iter().zip(vals) {
                        g[c] += v * w;
                    }
                }
                _ => {
                    table.fill_taps(&self.grid, i, &mut taps);
                    self.tap_positions(i, &mut pos);
                    scatter_wrapped(g, &pos, &taps, n, self.dims - 1, 0, v);
                }
            }
        }
    }
}

/// Tensor-product sum over a padded cache, innermost dimension contiguous.
#[inline]
fn gather(cache: &[Complex64], cs: &[usize], taps: &[f64], n: usize, off: usize) -> Complex64 {
    #[inline(always)]
    fn row(cache: &[Complex64], w: &[f64], off: usize) -> Complex64 {
        let c = &cache[off..off + w.len()];
        let mut acc = ZERO;
        for (v, &w) in c.iter().zip(w) {
            acc += v * w;
        }
        acc
    }
    match cs.len() {
        1 => row(cache, &taps[..n], off),
        2 => {
            let (w0, w1) = (&taps[..n], &taps[n..2 * n]);
            let mut acc = ZERO;
            for (t1, &w) in w1.iter().enumerate() {
                acc += row(cache, w0, off + t1 * cs[1]) * w;
            }
            acc
        }
        3 => {
            let (w0, w1, w2) = (&taps[..n], &taps[n..2 * n], &taps[2 * n..3 * n]);
            let mut acc = ZERO;
            for (t2, &v2) in w2.iter().enumerate() {
                let o2 = off + t2 * cs[2];
                let mut inner = ZERO;
                for (t1, &v1) in w1.iter().enumerate() {
                    inner += row(cache, w0, o2 + t1 * cs[1]) * v1;
                }
                acc += inner * v2;
            }
            acc
        }
        d => gather_rec(cache, cs, taps, n, off, d - 1),
    }
}

fn gather_rec(
    cache: &[Complex64],
    cs: &[usize],
    taps: &[f64],
    n: usize,
    off: usize,
    d: usize,
) -> Complex64 {
    let w = &taps[d * n..(d + 1) * n];
    if d == 0 {
        return cache[off..off + n].iter().zip(w).map(|(v, &w)| v * w).sum();
    }
    let mut acc = ZERO;
    for (t, &wt) in w.iter().enumerate() {
        acc += gather_rec(cache, cs, taps, n, off + t * cs[d], d - 1) * wt;
    }
    acc
}

/// Adds `v` times the tensor-product taps into a padded cache.
#[inline]
fn scatter(
    cache: &mut [Complex64],
    cs: &[usize],
    taps: &[f64],
    n: usize,
    off: usize,
    v: Complex64,
) {
    #[inline(always)]
    fn row(cache: &mut [Complex64], w: &[f64], off: usize, v: Complex64) {
        for (c, &w) in cache[off..off + w.len()].iter_mut().zip(w) {
            *c += v * w;
        }
    }
    match cs.len() {
        1 => row(cache, &taps[..n], off, v),
        2 => {
            let (w0, w1) = (&taps[..n], &taps[n..2 * n]);
            for (t1, &w) in w1.iter().enumerate() {
                row(cache, w0, off + t1 * cs[1], v * w);
            }
        }
        3 => {
            let (w0, w1, w2) = (&taps[..n], &taps[n..2 * n], &taps[2 * n..3 * n]);
            for (t2, &x2) in w2.iter().enumerate() {
                let o2 = off + t2 * cs[2];
                let v2 = v * x2;
                for (t1, &x1) in w1.iter().enumerate() {
                    row(cache, w0, o2 + t1 * cs[1], v2 * x1);
                }
            }
        }
        d => scatter_rec(cache, cs, taps, n, off, d - 1, v),
    }
}

fn scatter_rec(
    cache: &mut [Complex64],
    cs: &[usize],
    taps: &[f64],
    n: usize,
    off: usize,
    d: usize,
    v: Complex64,
) {
    let w = &taps[d * n..(d + 1) * n];
    if d == 0 {
        for (c, &w) in cache[off..off + n].iter_mut().zip(w) {
            *c += v * w;
        }
        return;
    }
    for (t, &wt) in w.iter().enumerate() {
        scatter_rec(cache, cs, taps, n, off + t * cs[d], d - 1, v * wt);
    }
}

/// Scatter of one sparse-matrix row, whose values follow the nested tap order.
#[allow(clippy::too_many_arguments)]
fn scatter_full(
    cache: &mut [Complex64],
    cs: &[usize],
    vals: &[f64],
    n: usize,
    off: usize,
    d: usize,
    v: Complex64,
    r: &mut usize,
) {
    if d == 0 {
        for (c, &w) in cache[off..off + n].iter_mut().zip(&vals[*r..*r + n]) {
            *c += v * w;
        }
        *r += n;
        return;
    }
    for t in 0..n {
        scatter_full(cache, cs, vals, n, off + t * cs[d], d - 1, v, r);
    }
}

fn gather_wrapped(
    g: &[Complex64],
    pos: &[usize],
    taps: &[f64],
    n: usize,
    d: usize,
    off: usize,
) -> Complex64 {
    let (p, w) = (&pos[d * n..(d + 1) * n], &taps[d * n..(d + 1) * n]);
    if d == 0 {
        return p.iter().zip(w).map(|(&p, &w)| g[off + p] * w).sum();
    }
    p.iter()
        .zip(w)
        .map(|(&p, &w)| gather_wrapped(g, pos, taps, n, d - 1, off + p) * w)
        .sum()
}

fn scatter_wrapped(
    g: &mut [Complex64],
    pos: &[usize],
    taps: &[f64],
    n: usize,
    d: usize,
    off: usize,
    v: Complex64,
) {
    for t in 0..n {
        let (p, w) = (pos[d * n + t], taps[d * n + t]);
        if d == 0 {
            g[off + p] += v * w;
        } else {
            scatter_wrapped(g, pos, taps, n, d - 1, off + p, v * w);
        }
    }
}
