//! Subcommand implementations.
//!
//! CSV columns of `accuracy`: `m,sigma,strategy,err_direct,err_adjoint`.
//! Every `transform` and `bench` run prints one JSON object with the keys
//! `params` and `timings_ns` (`correction`, `fft`, `resample`, `total`), plus
//! `error` when verified; `bench` adds `trials`, `speedup` and `efficiency`.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::{Duration, Instant};

use nfft::{
    ndft_adjoint, ndft_direct, relative_error, Complex64, NfftPlan, NodeSet, PlanOptions,
    StageTimings, TransformGeometry,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::io::{read_nodes, read_signal, write_nodes, write_signal};
use crate::{
    AccuracyArgs, BenchArgs, BlockSpec, CliError, Command, GenNodesArgs, GenSignalArgs, NodeKind,
    TransformArgs,
};

pub const CSV_HEADER: &str = "m,sigma,strategy,err_direct,err_adjoint";

pub fn run(command: Command, stdout: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Transform(a) => transform(&a, stdout),
        Command::Accuracy(a) => accuracy(&a, stdout),
        Command::Bench(a) => bench(&a, stdout),
        Command::GenNodes(a) => gen_nodes(&a),
        Command::GenSignal(a) => gen_signal(&a),
    }
}

pub fn uniform_nodes(rng: &mut ChaCha8Rng, dims: usize, count: usize) -> Vec<f64> {
    (0..dims * count)
        .map(|_| rng.gen_range(-0.5..0.5))
        .collect()
}

/// Lattice `k = i / N - 1/2` per dimension, dimension 1 fastest.
pub fn equispaced_nodes(shape: &[usize]) -> Vec<f64> {
    let len: usize = shape.iter().product();
    let mut out = Vec::with_capacity(len * shape.len());
    for mut off in 0..len {
        for &n in shape {
            out.push((off % n) as f64 / n as f64 - 0.5);
            off /= n;
        }
    }
    out
}

pub fn random_signal(rng: &mut ChaCha8Rng, len: usize) -> Vec<Complex64> {
    (0..len)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

fn nanos(d: Duration) -> u64 {
    d.as_nanos().min(u64::MAX as u128) as u64
}

fn timings_json(t: &StageTimings) -> Value {
    json!({
        "correction": nanos(t.correction),
        "fft": nanos(t.fft),
        "resample": nanos(t.resample),
        "total": nanos(t.total()),
    })
}

fn emit(out: &mut dyn Write, line: &str) -> Result<(), CliError> {
    writeln!(out, "{line}").map_err(|e| CliError::Io("output".into(), e))
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(path.display().to_string(), e))
}

fn transform(a: &TransformArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let nodes = read_nodes(&a.nodes)?;
    let input = read_signal(&a.input)?;
    let n = if a.adjoint {
        let dims = a
            .dims
            .as_ref()
            .ok_or_else(|| CliError::Usage("--dims is required with --adjoint".into()))?;
        if input.shape != [nodes.len()] {
            return Err(CliError::Format(format!(
                "adjoint input has shape {:?}, expected [{}]",
                input.shape,
                nodes.len()
            )));
        }
        dims.0.clone()
    } else {
        if let Some(d) = &a.dims {
            if d.0 != input.shape {
                return Err(CliError::Format(format!(
                    "signal shape {:?} differs from --dims {:?}",
                    input.shape, d.0
                )));
            }
        }
        input.shape.clone()
    };
    if n.len() != nodes.dims {
        return Err(CliError::Format(format!(
            "nodes are {}-dimensional, grid is {}-dimensional",
            nodes.dims,
            n.len()
        )));
    }

    let p = &a.plan;
    let geometry = TransformGeometry::new(&n, p.m, p.sigma, nodes.len())?;
    let options = PlanOptions {
        precompute: p.precompute,
        block_size: p.block_size.resolve(geometry.ntilde())?,
        threads: p.threads,
        deterministic: p.deterministic,
        ..PlanOptions::default()
    };
    let mut plan = NfftPlan::new(&nodes.coords, &n, p.m, p.sigma, options)?;
    let (output, shape, timings) = if a.adjoint {
        let mut y = vec![Complex64::new(0.0, 0.0); geometry.grid_len()];
        let t = plan.adjoint_into(&input.data, &mut y)?;
        (y, n.clone(), t)
    } else {
        let mut y = vec![Complex64::new(0.0, 0.0); nodes.len()];
        let t = plan.direct_into(&input.data, &mut y)?;
        (y, vec![nodes.len()], t)
    };
    write_signal(&a.out, &shape, &output)?;

    let mut report = json!({
        "params": {
            "command": "transform",
            "dims": n,
            "num_nodes": nodes.len(),
            "m": p.m,
            "sigma": p.sigma,
            "precompute": p.precompute.as_str(),
            "block_size": plan.block_size(),
            "threads": p.threads,
            "adjoint": a.adjoint,
            "deterministic": p.deterministic,
        },
        "timings_ns": timings_json(&timings),
    });
    if a.verify {
        let set = NodeSet::new(n.len(), &nodes.coords)?;
        let reference = if a.adjoint {
            ndft_adjoint(&set, &n, &input.data)?
        } else {
            ndft_direct(&set, &n, &input.data)?
        };
        report["error"] = json!(relative_error(&reference, &output)?);
    }
    emit(stdout, &report.to_string())
}

/// Instance shared by every row of a sweep: seeded nodes, grid signal and node values.
struct Instance {
    coords: Vec<f64>,
    f: Vec<Complex64>,
    fhat: Vec<Complex64>,
}

impl Instance {
    fn new(seed: u64, n: &[usize], j: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coords = uniform_nodes(&mut rng, n.len(), j);
        let f = random_signal(&mut rng, n.iter().product());
        let fhat = random_signal(&mut rng, j);
        Instance { coords, f, fhat }
    }
}

/// CSV of `err_direct`/`err_adjoint` per window width and strategy.
pub fn accuracy_csv(a: &AccuracyArgs) -> Result<String, CliError> {
    let n = &a.dims.0;
    let j = a.num_nodes.unwrap_or_else(|| n.iter().product());
    let widths: Vec<usize> = match a.m {
        Some(m) => vec![m],
        None => (a.m_range.0..=a.m_range.1).collect(),
    };
    for &m in &widths {
        TransformGeometry::new(n, m, a.sigma, j)?;
    }
    let inst = Instance::new(a.seed, n, j);
    let nodes = NodeSet::new(n.len(), &inst.coords)?;
    let want_direct = ndft_direct(&nodes, n, &inst.f)?;
    let want_adjoint = ndft_adjoint(&nodes, n, &inst.fhat)?;

    let mut csv = format!("{CSV_HEADER}\n");
    for &m in &widths {
        for &kind in &a.precompute {
            let options = PlanOptions {
                precompute: kind,
                threads: a.threads,
                deterministic: a.deterministic,
                ..PlanOptions::default()
            };
            let mut plan = NfftPlan::new(&inst.coords, n, m, a.sigma, options)?;
            let ed = relative_error(&want_direct, &plan.direct(&inst.f)?)?;
            let ea = relative_error(&want_adjoint, &plan.adjoint(&inst.fhat)?)?;
            csv.push_str(&format!("{m},{},{kind},{ed:e},{ea:e}\n", a.sigma));
        }
    }
    Ok(csv)
}

fn accuracy(a: &AccuracyArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let csv = accuracy_csv(a)?;
    match &a.out {
        Some(path) => write_text(path, &csv),
        None => stdout
            .write_all(csv.as_bytes())
            .map_err(|e| CliError::Io("output".into(), e)),
    }
}

/// Stage-wise minima over repeated runs.
#[derive(Debug, Clone, Copy)]
pub struct MinTimings {
    pub correction: Duration,
    pub fft: Duration,
    pub resample: Duration,
    pub total: Duration,
    pub trials: usize,
}

impl MinTimings {
    fn new() -> Self {
        MinTimings {
            correction: Duration::MAX,
            fft: Duration::MAX,
            resample: Duration::MAX,
            total: Duration::MAX,
            trials: 0,
        }
    }

    pub fn record(&mut self, t: &StageTimings) {
        self.correction = self.correction.min(t.correction);
        self.fft = self.fft.min(t.fft);
        self.resample = self.resample.min(t.resample);
        self.total = self.total.min(t.total());
        self.trials += 1;
    }

    fn json(&self) -> Value {
        json!({
            "correction": nanos(self.correction),
            "fft": nanos(self.fft),
            "resample": nanos(self.resample),
            "total": nanos(self.total),
        })
    }
}

/// Repeats `step` until the budget is spent or `max_trials` runs are done; always runs once.
pub fn repeat_min(
    budget: Duration,
    max_trials: Option<usize>,
    mut step: impl FnMut() -> Result<StageTimings, CliError>,
) -> Result<MinTimings, CliError> {
    let start = Instant::now();
    let mut best = MinTimings::new();
    loop {
        best.record(&step()?);
        if max_trials.is_some_and(|t| best.trials >= t) || start.elapsed() >= budget {
            return Ok(best);
        }
    }
}

fn bench(a: &BenchArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let n = &a.dims.0;
    let j = a.num_nodes.unwrap_or_else(|| n.iter().product());
    let geometry = TransformGeometry::new(n, a.m, a.sigma, j)?;
    if a.threads.is_empty() || a.threads.contains(&0) {
        return Err(CliError::Usage("thread counts must be positive".into()));
    }
    if !(a.trials_budget_secs >= 0.0 && a.trials_budget_secs.is_finite()) {
        return Err(CliError::Usage(
            "--trials-budget-secs must be a finite non-negative number".into(),
        ));
    }
    if a.trials == Some(0) {
        return Err(CliError::Usage("--trials must be positive".into()));
    }
    let blocks = a
        .block_size
        .iter()
        .map(|b| b.resolve(geometry.ntilde()))
        .collect::<Result<Vec<_>, _>>()?;
    let inst = Instance::new(a.seed, n, j);
    let budget = Duration::from_secs_f64(a.trials_budget_secs);

    let mut lines = Vec::new();
    for (spec, block) in a.block_size.iter().zip(&blocks) {
        let mut cells = Vec::new();
        for &threads in &a.threads {
            let options = PlanOptions {
                precompute: a.precompute,
                block_size: block.clone(),
                threads,
                deterministic: a.deterministic,
                ..PlanOptions::default()
            };
            let mut plan = NfftPlan::new(&inst.coords, n, a.m, a.sigma, options)?;
            let best = if a.adjoint {
                let mut y = vec![Complex64::new(0.0, 0.0); geometry.grid_len()];
                repeat_min(budget, a.trials, || {
                    Ok(plan.adjoint_into(&inst.fhat, &mut y)?)
                })?
            } else {
                let mut y = vec![Complex64::new(0.0, 0.0); j];
                repeat_min(budget, a.trials, || Ok(plan.direct_into(&inst.f, &mut y)?))?
            };
            cells.push((threads, plan.block_size().to_vec(), best));
        }
        // speedup relative to the smallest thread count of the sweep
        let (base_threads, _, base) = cells.iter().min_by_key(|c| c.0).cloned().unwrap();
        for (threads, block_size, best) in cells {
            let speedup =
                base.total.as_secs_f64() / best.total.as_secs_f64().max(f64::MIN_POSITIVE);
            let efficiency = speedup * base_threads as f64 / threads as f64;
            let report = json!({
                "params": {
                    "command": "bench",
                    "dims": n,
                    "num_nodes": j,
                    "m": a.m,
                    "sigma": a.sigma,
                    "precompute": a.precompute.as_str(),
                    "block_spec": block_spec_name(spec),
                    "block_size": block_size,
                    "threads": threads,
                    "adjoint": a.adjoint,
                    "deterministic": a.deterministic,
                    "seed": a.seed,
                },
                "timings_ns": best.json(),
                "trials": best.trials,
                "speedup": speedup,
                "efficiency": efficiency,
            });
            lines.push(report.to_string());
        }
    }
    let text: String = lines.iter().map(|l| format!("{l}\n")).collect();
    match &a.out {
        Some(path) => write_text(path, &text),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io("output".into(), e)),
    }
}

fn block_spec_name(spec: &BlockSpec) -> String {
    match spec {
        BlockSpec::Default => "default".into(),
        BlockSpec::Single => "single".into(),
        BlockSpec::Uniform(b) => b.to_string(),
        BlockSpec::Explicit(b) => b
            .iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(","),
    }
}

fn gen_nodes(a: &GenNodesArgs) -> Result<(), CliError> {
    let shape = &a.dims.0;
    let grid: usize = shape.iter().product();
    let coords = match a.kind {
        NodeKind::Uniform => {
            let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
            uniform_nodes(&mut rng, shape.len(), a.num_nodes.unwrap_or(grid))
        }
        NodeKind::Equispaced => {
            if a.num_nodes.is_some_and(|j| j != grid) {
                return Err(CliError::Usage(format!(
                    "equispaced nodes on {shape:?} number {grid}"
                )));
            }
            equispaced_nodes(shape)
        }
    };
    write_nodes(&a.out, shape.len(), &coords)
}

fn gen_signal(a: &GenSignalArgs) -> Result<(), CliError> {
    let shape = match (&a.dims, a.num_nodes) {
        (Some(d), _) => d.0.clone(),
        (None, Some(j)) => vec![j],
        (None, None) => {
            return Err(CliError::Usage(
                "one of --dims or --num-nodes is required".into(),
            ))
        }
    };
    let len = shape.iter().product();
    let data = if a.zero {
        vec![Complex64::new(0.0, 0.0); len]
    } else {
        random_signal(&mut ChaCha8Rng::seed_from_u64(a.seed), len)
    };
    write_signal(&a.out, &shape, &data)
}
