//! Multi-dimensional in-place FFT on the oversampled buffer.
//!
//! Each axis is transformed with one-dimensional plans. The contiguous first
//! axis is processed in place; the others are gathered into batches of columns.
//! Both directions are unnormalized: forward uses `e^{-2πi st/Ñ}`, backward `e^{+2πi st/Ñ}`.

use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use rayon::ThreadPool;
use rustfft::{Fft, FftDirection, FftPlanner, FftPlannerScalar};

use crate::error::{NfftError, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
/// Columns gathered per task for non-contiguous axes.
const COLUMN_BATCH: usize = 16;

/// Planning effort.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FftEffort {
    /// Pick algorithms heuristically.
    #[default]
    Estimate,
    /// Time candidate plans per axis and keep the fastest.
    Measure,
}

impl fmt::Display for FftEffort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FftEffort::Estimate => "estimate",
            FftEffort::Measure => "measure",
        })
    }
}

impl FromStr for FftEffort {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "estimate" => Ok(FftEffort::Estimate),
            "measure" => Ok(FftEffort::Measure),
            other => Err(format!("unknown fft effort '{other}'")),
        }
    }
}

struct Axis {
    len: usize,
    forward: Arc<dyn Fft<f64>>,
    backward: Arc<dyn Fft<f64>>,
}

struct Scratch {
    scratch: Vec<Complex64>,
    lines: Vec<Complex64>,
}

/// Forward and backward plans for one oversampled shape.
pub struct FftPlanPair {
    shape: Vec<usize>,
    axes: Vec<Axis>,
    threads: usize,
    scratch: Vec<Mutex<Scratch>>,
}

impl fmt::Debug for FftPlanPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FftPlanPair")
            .field("shape", &self.shape)
            .field("threads", &self.threads)
            .finish()
    }
}

fn measure(candidates: Vec<Arc<dyn Fft<f64>>>) -> Arc<dyn Fft<f64>> {
    let mut best = None;
    let mut best_time = f64::INFINITY;
    for plan in candidates {
        let len = plan.len();
        let mut buf = vec![Complex64::new(1.0, 0.5); len];
        let mut scratch = vec![ZERO; plan.get_inplace_scratch_len()];
        let reps = (1 << 16) / len.max(1) + 3;
        plan.process_with_scratch(&mut buf, &mut scratch);
        let start = Instant::now();
        for _ in 0..reps {
            plan.process_with_scratch(&mut buf, &mut scratch);
        }
        let t = start.elapsed().as_secs_f64();
        if t < best_time {
            best_time = t;
            best = Some(plan);
        }
    }
    best.expect("at least one candidate plan")
}

/// Plans both directions for shape `ntilde` (dimension 1 fastest).
pub fn plan_ffts(ntilde: &[usize], threads: usize, effort: FftEffort) -> Result<FftPlanPair> {
    if ntilde.is_empty() {
        return Err(NfftError::PlanFailure("empty shape".into()));
    }
    if let Some(&n) = ntilde.iter().find(|&&n| n < 2 || n % 2 != 0) {
        return Err(NfftError::PlanFailure(format!(
            "axis length {n} must be even and at least 2"
        )));
    }
    let mut planner = FftPlanner::<f64>::new();
    let mut scalar = FftPlannerScalar::<f64>::new();
    let axes: Vec<Axis> = ntilde
        .iter()
        .map(|&len| {
            let mut pick = |dir| match effort {
                FftEffort::Estimate => planner.plan_fft(len, dir),
                FftEffort::Measure => {
                    measure(vec![planner.plan_fft(len, dir), scalar.plan_fft(len, dir)])
                }
            };
            let forward = pick(FftDirection::Forward);
            let backward = pick(FftDirection::Inverse);
            Axis {
                len,
                forward,
                backward,
            }
        })
        .collect();
    let scratch_len = axes
        .iter()
        .flat_map(|a| {
            [
                a.forward.get_inplace_scratch_len(),
                a.backward.get_inplace_scratch_len(),
            ]
        })
        .max()
        .unwrap_or(0);
    let line_len = ntilde.iter().skip(1).max().copied().unwrap_or(0) * COLUMN_BATCH;
    let threads = threads.max(1);
    let scratch = (0..threads)
        .map(|_| {
            Mutex::new(Scratch {
                scratch: vec![ZERO; scratch_len],
                lines: vec![ZERO; line_len],
            })
        })
        .collect();
    Ok(FftPlanPair {
        shape: ntilde.to_vec(),
        axes,
        threads,
        scratch,
    })
}

#[derive(Clone, Copy)]
struct SharedMut(*mut Complex64);

// SAFETY: tasks touch disjoint sets of columns.
unsafe impl Send for SharedMut {}
unsafe impl Sync for SharedMut {}

impl SharedMut {
    /// Method access makes closures capture the whole `Sync` wrapper.
    #[inline]
    fn get(&self) -> *mut Complex64 {
        self.0
    }
}

impl FftPlanPair {
    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn threads(&self) -> usize {
        self.threads
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn scratch(&self) -> std::sync::MutexGuard<'_, Scratch> {
        let idx = rayon::current_thread_index().unwrap_or(0) % self.scratch.len();
        self.scratch[idx].lock().unwrap_or_else(|e| e.into_inner())
    }

    fn run(&self, buf: &mut [Complex64], forward: bool, pool: &ThreadPool) {
        assert_eq!(
            buf.len(),
            self.len(),
            "buffer does not match the planned shape"
        );
        pool.install(|| {
            let mut stride = 1;
            for axis in &self.axes {
                let plan = if forward {
                    &axis.forward
                } else {
                    &axis.backward
                };
                if stride == 1 {
                    self.contiguous(plan, buf);
                } else {
                    self.strided(plan, buf, stride);
                }
                stride *= axis.len;
            }
        });
    }

    fn contiguous(&self, plan: &Arc<dyn Fft<f64>>, buf: &mut [Complex64]) {
        let len = plan.len();
        let lines = buf.len() / len;
        let per_task = (lines / (4 * self.threads)).clamp(1, 64);
        buf.par_chunks_mut(len * per_task).for_each(|chunk| {
            let mut s = self.scratch();
            plan.process_with_scratch(chunk, &mut s.scratch);
        });
    }

    fn strided(&self, plan: &Arc<dyn Fft<f64>>, buf: &mut [Complex64], stride: usize) {
        let len = plan.len();
        let outer = buf.len() / (stride * len);
        let batches = stride.div_ceil(COLUMN_BATCH);
        let ptr = SharedMut(buf.as_mut_ptr());
        (0..outer * batches).into_par_iter().for_each(|task| {
            let (o, b) = (task / batches, task % batches);
            let first = b * COLUMN_BATCH;
            let width = COLUMN_BATCH.min(stride - first);
            let base = o * stride * len + first;
            let mut guard = self.scratch();
            let Scratch { scratch, lines } = &mut *guard;
            let lines = &mut lines[..width * len];
            // SAFETY: task (o, b) owns columns first..first+width of slab o.
            unsafe {
                for r in 0..len {
                    let src = ptr.get().add(base + r * stride);
                    for c in 0..width {
                        lines[c * len + r] = *src.add(c);
                    }
                }
            }
            plan.process_with_scratch(lines, scratch);
            unsafe {
                for r in 0..len {
                    let dst = ptr.get().add(base + r * stride);
                    for c in 0..width {
                        *dst.add(c) = lines[c * len + r];
                    }
                }
            }
        });
    }
}

/// In-place forward transform, kernel `e^{-2πi s·t ⊘ Ñ}`.
pub fn exec_forward(plan: &FftPlanPair, buf: &mut [Complex64], pool: &ThreadPool) {
    plan.run(buf, true, pool);
}

/// In-place backward transform, kernel `e^{+2πi s·t ⊘ Ñ}`.
pub fn exec_backward(plan: &FftPlanPair, buf: &mut [Complex64], pool: &ThreadPool) {
    plan.run(buf, false, pool);
}
