//! Transform plans.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use rayon::{ThreadPool, ThreadPoolBuilder};

use crate::deconvolve::{apply_correction, apply_correction_adjoint, CorrectionVectors};
use crate::error::{NfftError, Result};
use crate::fft::{exec_backward, exec_forward, plan_ffts, FftEffort, FftPlanPair};
use crate::geometry::{NodeSet, TransformGeometry};
use crate::precompute::{PrecomputeKind, PrecomputeTable};
use crate::resample::{default_block_size, BlockPartition, NodeGrid, Resampler};
use crate::window::KaiserBesselWindow;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Options for [`NfftPlan::new`].
#[derive(Debug, Clone, PartialEq)]
pub struct PlanOptions {
    pub precompute: PrecomputeKind,
    /// Box edge lengths per dimension; `None` selects the defaults.
    pub block_size: Option<Vec<usize>>,
    pub threads: usize,
    /// Merge adjoint box caches in a fixed order so results do not depend on scheduling.
    pub deterministic: bool,
    /// Use the box-partitioned resampling; `false` selects the per-node reference loops.
    pub blocking: bool,
    pub fft_effort: FftEffort,
}

impl Default for PlanOptions {
    fn default() -> Self {
        PlanOptions {
            precompute: PrecomputeKind::Polynomial,
            block_size: None,
            threads: std::thread::available_parallelism().map_or(1, |n| n.get()),
            deterministic: false,
            blocking: true,
            fft_effort: FftEffort::Estimate,
        }
    }
}

/// Wall-clock time spent in each stage of the last transform.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StageTimings {
    pub correction: Duration,
    pub fft: Duration,
    pub resample: Duration,
}

impl StageTimings {
    pub fn total(&self) -> Duration {
        self.correction + self.fft + self.resample
    }
}

/// Precomputed state for repeated transforms with fixed nodes.
pub struct NfftPlan {
    geometry: TransformGeometry,
    window: KaiserBesselWindow,
    nodes: NodeSet,
    precompute: PrecomputeTable,
    resampler: Resampler,
    fft: FftPlanPair,
    correction: CorrectionVectors,
    gbuf: Vec<Complex64>,
    pool: ThreadPool,
    options: PlanOptions,
    block_size: Vec<usize>,
}

impl std::fmt::Debug for NfftPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NfftPlan")
            .field("geometry", &self.geometry)
            .field("window", &self.window)
            .field("block_size", &self.block_size)
            .field("options", &self.options)
            .finish()
    }
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(NfftError::ShapeMismatch { expected, found })
    }
}

impl NfftPlan {
    /// Plans transforms of size `n` for the nodes in `coords` (`D × J`, coordinate-fastest).
    ///
    /// Nodes are folded onto `[-1/2, 1/2)^D`. All tables and buffers are allocated here.
    pub fn new(
        coords: &[f64],
        n: &[usize],
        m: usize,
        sigma: f64,
        options: PlanOptions,
    ) -> Result<Self> {
        let dims = n.len();
        if dims == 0 {
            return Err(NfftError::BadGeometry(
                "at least one dimension is required".into(),
            ));
        }
        let nodes = NodeSet::new(dims, coords)?;
        let geometry = TransformGeometry::new(n, m, sigma, nodes.len())?;
        let block_size = options
            .block_size
            .clone()
            .unwrap_or_else(|| default_block_size(geometry.ntilde()));
        let threads = options.threads.max(1);
        let resampler = Resampler::new(
            &nodes,
            &geometry,
            &block_size,
            threads,
            options.deterministic,
        )?;
        let window = KaiserBesselWindow::new(m, sigma);
        let precompute =
            PrecomputeTable::build(options.precompute, &window, resampler.grid(), &geometry)?;
        let fft = plan_ffts(geometry.ntilde(), threads, options.fft_effort)?;
        let correction = CorrectionVectors::build(&window, &geometry)?;
        let len = geometry.oversampled_len();
        let mut gbuf = Vec::new();
        gbuf.try_reserve_exact(len)
            .map_err(|_| NfftError::AllocationFailure { entries: len })?;
        gbuf.resize(len, ZERO);
        let pool = ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| NfftError::PlanFailure(e.to_string()))?;
        Ok(NfftPlan {
            geometry,
            window,
            nodes,
            precompute,
            resampler,
            fft,
            correction,
            gbuf,
            pool,
            options: PlanOptions { threads, ..options },
            block_size,
        })
    }

    pub fn geometry(&self) -> &TransformGeometry {
        &self.geometry
    }

    pub fn window(&self) -> &KaiserBesselWindow {
        &self.window
    }

    /// Folded nodes in their original order.
    pub fn nodes(&self) -> &NodeSet {
        &self.nodes
    }

    pub fn precompute(&self) -> &PrecomputeTable {
        &self.precompute
    }

    pub fn precompute_kind(&self) -> PrecomputeKind {
        self.precompute.kind()
    }

    pub fn partition(&self) -> &BlockPartition {
        self.resampler.partition()
    }

    /// Node positions in partition order.
    pub fn node_grid(&self) -> &NodeGrid {
        self.resampler.grid()
    }

    pub fn correction(&self) -> &CorrectionVectors {
        &self.correction
    }

    pub fn fft(&self) -> &FftPlanPair {
        &self.fft
    }

    pub fn block_size(&self) -> &[usize] {
        &self.block_size
    }

    pub fn options(&self) -> &PlanOptions {
        &self.options
    }

    pub fn threads(&self) -> usize {
        self.options.threads
    }

    pub fn deterministic(&self) -> bool {
        self.options.deterministic
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// The oversampled buffer as left by the last transform.
    pub fn scratch(&self) -> &[Complex64] {
        &self.gbuf
    }

    /// `f̂_j ≈ Σ_n f_n e^{-2πi n·k_j}` for an `N`-shaped `f`.
    pub fn direct(&mut self, f: &[Complex64]) -> Result<Vec<Complex64>> {
        let mut out = vec![ZERO; self.nodes.len()];
        self.direct_into(f, &mut out)?;
        Ok(out)
    }

    /// As [`direct`](Self::direct), writing into `out` (length `J`).
    pub fn direct_into(&mut self, f: &[Complex64], out: &mut [Complex64]) -> Result<StageTimings> {
        check_len(self.geometry.grid_len(), f.len())?;
        check_len(self.nodes.len(), out.len())?;
        let t0 = Instant::now();
        self.pool
            .install(|| apply_correction(&self.correction, f, &mut self.gbuf))?;
        let t1 = Instant::now();
        exec_forward(&self.fft, &mut self.gbuf, &self.pool);
        let t2 = Instant::now();
        if self.options.blocking {
            self.resampler
                .direct(&self.precompute, &self.gbuf, out, &self.pool);
        } else {
            self.resampler
                .direct_unblocked(&self.precompute, &self.gbuf, out);
        }
        let t3 = Instant::now();
        Ok(StageTimings {
            correction: t1 - t0,
            fft: t2 - t1,
            resample: t3 - t2,
        })
    }

    /// `y_n ≈ Σ_j f̂_j e^{+2πi n·k_j}`, returned `N`-shaped.
    pub fn adjoint(&mut self, fhat: &[Complex64]) -> Result<Vec<Complex64>> {
        let mut out = vec![ZERO; self.geometry.grid_len()];
        self.adjoint_into(fhat, &mut out)?;
        Ok(out)
    }

    /// As [`adjoint`](Self::adjoint), writing into `out` (length `|I_N|`).
    pub fn adjoint_into(
        &mut self,
        fhat: &[Complex64],
        out: &mut [Complex64],
    ) -> Result<StageTimings> {
        check_len(self.nodes.len(), fhat.len())?;
        check_len(self.geometry.grid_len(), out.len())?;
        let t0 = Instant::now();
        if self.options.blocking {
            self.resampler.adjoint(
                &self.precompute,
                fhat,
                &mut self.gbuf,
                &self.pool,
                self.options.deterministic,
            );
        } else {
            self.resampler
                .adjoint_unblocked(&self.precompute, fhat, &mut self.gbuf);
        }
        let t1 = Instant::now();
        exec_backward(&self.fft, &mut self.gbuf, &self.pool);
        let t2 = Instant::now();
        self.pool
            .install(|| apply_correction_adjoint(&self.correction, &self.gbuf, out))?;
        let t3 = Instant::now();
        Ok(StageTimings {
            correction: t3 - t2,
            fft: t2 - t1,
            resample: t1 - t0,
        })
    }

    /// Resampling stage alone: nodes from an oversampled buffer.
    pub fn resample_direct(&self, gbuf: &[Complex64], out: &mut [Complex64]) -> Result<()> {
        check_len(self.geometry.oversampled_len(), gbuf.len())?;
        check_len(self.nodes.len(), out.len())?;
        self.resampler
            .direct(&self.precompute, gbuf, out, &self.pool);
        Ok(())
    }

    /// Adjoint resampling stage alone.
    pub fn resample_adjoint(&self, fhat: &[Complex64], gbuf: &mut [Complex64]) -> Result<()> {
        check_len(self.nodes.len(), fhat.len())?;
        check_len(self.geometry.oversampled_len(), gbuf.len())?;
        self.resampler.adjoint(
            &self.precompute,
            fhat,
            gbuf,
            &self.pool,
            self.options.deterministic,
        );
        Ok(())
    }

    /// Per-node reference for [`resample_direct`](Self::resample_direct).
    pub fn resample_direct_unblocked(
        &self,
        gbuf: &[Complex64],
        out: &mut [Complex64],
    ) -> Result<()> {
        check_len(self.geometry.oversampled_len(), gbuf.len())?;
        check_len(self.nodes.len(), out.len())?;
        self.resampler.direct_unblocked(&self.precompute, gbuf, out);
        Ok(())
    }

    /// Per-node reference for [`resample_adjoint`](Self::resample_adjoint).
    pub fn resample_adjoint_unblocked(
        &self,
        fhat: &[Complex64],
        gbuf: &mut [Complex64],
    ) -> Result<()> {
        check_len(self.nodes.len(), fhat.len())?;
        check_len(self.geometry.oversampled_len(), gbuf.len())?;
        self.resampler
            .adjoint_unblocked(&self.precompute, fhat, gbuf);
        Ok(())
    }
}

/// Plans and runs one direct transform with default options.
pub fn nfft_oneshot_direct(
    coords: &[f64],
    n: &[usize],
    f: &[Complex64],
    m: usize,
    sigma: f64,
) -> Result<Vec<Complex64>> {
    check_len(n.iter().product(), f.len())?;
    NfftPlan::new(coords, n, m, sigma, PlanOptions::default())?.direct(f)
}

/// Plans and runs one adjoint transform with default options.
pub fn nfft_oneshot_adjoint(
    coords: &[f64],
    n: &[usize],
    fhat: &[Complex64],
    m: usize,
    sigma: f64,
) -> Result<Vec<Complex64>> {
    let dims = n.len().max(1);
    check_len(coords.len() / dims, fhat.len())?;
    NfftPlan::new(coords, n, m, sigma, PlanOptions::default())?.adjoint(fhat)
}
