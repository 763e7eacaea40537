//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits non-zero
//! if any gating criterion fails.

use std::time::{Duration, Instant};

use nfft::fft::{exec_backward, exec_forward, plan_ffts, FftEffort};
use nfft::precompute::{LinearTable, PolyCoeffs};
use nfft::{
    linear_table_size, ndft_adjoint, ndft_direct, relative_error, Complex64, KaiserBesselWindow,
    NfftPlan, NodeSet, PlanOptions, PrecomputeKind,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    gating: bool,
    detail: String,
}

impl Outcome {
    fn gate(pass: bool, detail: String) -> Self {
        Outcome {
            pass,
            gating: true,
            detail,
        }
    }
}

fn random_coords(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.gen_range(-0.5..0.5)).collect()
}

fn random_complex(rng: &mut ChaCha8Rng, len: usize) -> Vec<Complex64> {
    (0..len)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

fn opts(kind: PrecomputeKind) -> PlanOptions {
    PlanOptions {
        precompute: kind,
        ..PlanOptions::default()
    }
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

fn norm2(a: &[Complex64]) -> f64 {
    a.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

struct Instance {
    n: Vec<usize>,
    coords: Vec<f64>,
    f: Vec<Complex64>,
    fhat: Vec<Complex64>,
    want_direct: Vec<Complex64>,
    want_adjoint: Vec<Complex64>,
}

impl Instance {
    fn new(rng: &mut ChaCha8Rng, n: &[usize], j: usize) -> Self {
        let coords = random_coords(rng, n.len() * j);
        let f = random_complex(rng, n.iter().product());
        let fhat = random_complex(rng, j);
        let nodes = NodeSet::new(n.len(), &coords).unwrap();
        let want_direct = ndft_direct(&nodes, n, &f).unwrap();
        let want_adjoint = ndft_adjoint(&nodes, n, &fhat).unwrap();
        Instance {
            n: n.to_vec(),
            coords,
            f,
            fhat,
            want_direct,
            want_adjoint,
        }
    }

    fn run(&self, m: usize, options: PlanOptions) -> (Vec<Complex64>, Vec<Complex64>) {
        let mut plan = NfftPlan::new(&self.coords, &self.n, m, 2.0, options).unwrap();
        (
            plan.direct(&self.f).unwrap(),
            plan.adjoint(&self.fhat).unwrap(),
        )
    }

    fn errors(&self, out: &(Vec<Complex64>, Vec<Complex64>)) -> (f64, f64) {
        (
            relative_error(&self.want_direct, &out.0).unwrap(),
            relative_error(&self.want_adjoint, &out.1).unwrap(),
        )
    }
}

fn oracle_equivalence() -> Outcome {
    const TOL: f64 = 1e-9;
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x0acc_0001);
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let dims = 1 + i % 3;
        // m = 8 needs Ñ > 16, so N >= 10; 3D stays within the oracle term limit
        let max_n = if dims == 3 { 16 } else { 32 };
        let n: Vec<usize> = (0..dims)
            .map(|_| 2 * rng.gen_range(5..=max_n / 2))
            .collect();
        let grid: usize = n.iter().product();
        let j = rng.gen_range(1..=2048usize.min(10_000_000 / grid));
        let inst = Instance::new(&mut rng, &n, j);
        let (ed, ea) = inst.errors(&inst.run(8, opts(PrecomputeKind::Polynomial)));
        worst = worst.max(ed).max(ea);
    }
    let elapsed = start.elapsed();
    Outcome::gate(
        worst <= TOL && elapsed <= Duration::from_secs(60),
        format!(
            "max error {worst:.2e} (tol {TOL:.0e}), {:.1} s (limit 60 s)",
            elapsed.as_secs_f64()
        ),
    )
}

/// Shared instance of criteria 2 and 3.
fn decay_instance() -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0acc_0002);
    Instance::new(&mut rng, &[32, 32], 1024)
}

fn exponential_decay(inst: &Instance) -> Outcome {
    let start = Instant::now();
    let mut errs = Vec::new();
    for m in 3..=8 {
        let (ed, ea) = inst.errors(&inst.run(m, opts(PrecomputeKind::Full)));
        errs.push(ed.max(ea));
    }
    let elapsed = start.elapsed();
    let mut ok = true;
    for w in errs.windows(2) {
        if w[0] > 1e-12 && w[1] / w[0] > 0.5 {
            ok = false;
        }
    }
    let last = *errs.last().unwrap();
    ok &= last <= 1e-12 && elapsed <= Duration::from_secs(30);
    let curve: Vec<String> = errs.iter().map(|e| format!("{e:.1e}")).collect();
    Outcome::gate(
        ok,
        format!(
            "err(m=3..8) = [{}], err(8) tol 1e-12, {:.1} s (limit 30 s)",
            curve.join(", "),
            elapsed.as_secs_f64()
        ),
    )
}

fn strategy_agreement(inst: &Instance) -> Outcome {
    let mut ok = true;
    let mut worst_ratio: f64 = 0.0;
    for m in 3..=8 {
        // the m = 8 lookup table holds 134217730 values and is left out, as in criterion 6
        let kinds: Vec<PrecomputeKind> = PrecomputeKind::ALL
            .into_iter()
            .filter(|&k| !(k == PrecomputeKind::Linear && m == 8))
            .collect();
        let outs: Vec<_> = kinds.iter().map(|&k| inst.run(m, opts(k))).collect();
        let (ed, ea) = inst.errors(&outs[0]);
        let reference = ed.max(ea);
        for a in 0..outs.len() {
            for b in a + 1..outs.len() {
                let dev = relative_error(&outs[a].0, &outs[b].0)
                    .unwrap()
                    .max(relative_error(&outs[a].1, &outs[b].1).unwrap());
                let ratio = dev / reference;
                worst_ratio = worst_ratio.max(ratio);
                if ratio > 10.0 {
                    ok = false;
                    eprintln!(
                        "  m = {m}: {} vs {} deviate {dev:.2e}, oracle error {reference:.2e}",
                        kinds[a], kinds[b]
                    );
                }
            }
        }
    }
    Outcome::gate(
        ok,
        format!(
            "max pairwise deviation / full-strategy oracle error = {worst_ratio:.2} (limit 10)"
        ),
    )
}

fn adjoint_identity() -> Outcome {
    const TOL: f64 = 1e-10;
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x0acc_0004);
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let dims = 1 + i % 3;
        let n: Vec<usize> = (0..dims).map(|_| 2 * rng.gen_range(4..=16)).collect();
        let min_nt = 2 * n.iter().min().unwrap();
        let m = rng.gen_range(2..=8usize.min((min_nt - 1) / 2));
        let mut kind = PrecomputeKind::ALL[rng.gen_range(0..4)];
        if kind == PrecomputeKind::Linear && m > 6 {
            kind = PrecomputeKind::Polynomial;
        }
        let j = rng.gen_range(1..=400);
        let coords = random_coords(&mut rng, dims * j);
        let f = random_complex(&mut rng, n.iter().product());
        let fhat = random_complex(&mut rng, j);
        let mut plan = NfftPlan::new(&coords, &n, m, 2.0, opts(kind)).unwrap();
        let af = plan.direct(&f).unwrap();
        let ah = plan.adjoint(&fhat).unwrap();
        let r = (dot(&af, &fhat) - dot(&f, &ah)).norm() / (norm2(&af) * norm2(&fhat));
        worst = worst.max(r);
    }
    let elapsed = start.elapsed();
    Outcome::gate(
        worst <= TOL && elapsed <= Duration::from_secs(10),
        format!(
            "max defect {worst:.2e} (tol {TOL:.0e}), {:.1} s (limit 10 s)",
            elapsed.as_secs_f64()
        ),
    )
}

fn blocking_equivalence() -> Outcome {
    const TOL: f64 = 1e-13;
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x0acc_0005);
    let shapes: [(&[usize], usize); 3] = [(&[256], 600), (&[32, 32], 1000), (&[12, 12, 12], 800)];
    let mut worst: f64 = 0.0;
    let mut stable = true;
    for (n, j) in shapes {
        let coords = random_coords(&mut rng, n.len() * j);
        let f = random_complex(&mut rng, n.iter().product());
        let fhat = random_complex(&mut rng, j);
        let ntilde: Vec<usize> = n.iter().map(|&x| 2 * x).collect();
        let block_sets: [Option<Vec<usize>>; 3] =
            [Some(ntilde.clone()), None, Some(vec![4; n.len()])];
        for kind in PrecomputeKind::ALL {
            let reference = NfftPlan::new(
                &coords,
                n,
                4,
                2.0,
                PlanOptions {
                    precompute: kind,
                    blocking: false,
                    threads: 1,
                    ..PlanOptions::default()
                },
            )
            .unwrap();
            let mut reference = reference;
            let rd = reference.direct(&f).unwrap();
            let ra = reference.adjoint(&fhat).unwrap();
            for block in &block_sets {
                let mut det_out: Option<Vec<Complex64>> = None;
                for threads in [1, 4] {
                    for deterministic in [false, true] {
                        let mut plan = NfftPlan::new(
                            &coords,
                            n,
                            4,
                            2.0,
                            PlanOptions {
                                precompute: kind,
                                block_size: block.clone(),
                                threads,
                                deterministic,
                                ..PlanOptions::default()
                            },
                        )
                        .unwrap();
                        let d = plan.direct(&f).unwrap();
                        let a = plan.adjoint(&fhat).unwrap();
                        worst = worst
                            .max(relative_error(&rd, &d).unwrap())
                            .max(relative_error(&ra, &a).unwrap());
                        if deterministic {
                            match &det_out {
                                None => det_out = Some(a),
                                Some(prev) => stable &= *prev == a,
                            }
                        }
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed();
    Outcome::gate(
        worst <= TOL && stable && elapsed <= Duration::from_secs(60),
        format!(
            "max blocked/unblocked deviation {worst:.2e} (tol {TOL:.0e}), deterministic bitwise stable: {stable}, {:.1} s (limit 60 s)",
            elapsed.as_secs_f64()
        ),
    )
}

fn table_sizes() -> Outcome {
    let size_ok = linear_table_size(8) == 134_217_730;
    // interpolation and fit errors relative to the window peak, bounded by the
    // oracle error of the full transform at the same m (criterion 2 instance, 2D 32²)
    let inst = decay_instance();
    let mut ok = size_ok;
    let mut lines = Vec::new();
    for m in 2..=8 {
        let (ed, ea) = inst.errors(&inst.run(m, opts(PrecomputeKind::Full)));
        let bound = ed.max(ea);
        let w = KaiserBesselWindow::new(m, 2.0);
        let peak = w.psi_hat_base(0.0);
        let poly = PolyCoeffs::build(&w).unwrap();
        let mut taps = vec![0.0; 2 * m];
        let mut poly_err: f64 = 0.0;
        for i in 0..20_000 {
            let frac = -(i as f64 + 0.5) / 20_000.0;
            poly.eval_taps(frac + 0.5, &mut taps);
            for (t, &v) in taps.iter().enumerate() {
                let d = (m as f64 - t as f64 + frac) / m as f64;
                poly_err = poly_err.max((v - w.psi_hat_base(d)).abs() / peak);
            }
        }
        // gated for the tables built at m <= 4; above that the comparison is reported
        if m <= 4 {
            ok &= poly_err <= bound;
        }
        let mut line = format!("m={m}: poly {poly_err:.1e}");
        if m <= 4 {
            let table = LinearTable::build(&w).unwrap();
            let lin_err = (0..=40_000)
                .map(|i| m as f64 * i as f64 / 40_000.0 * 0.999_97)
                .map(|x| (table.lookup(x) - w.psi_hat_base(x / m as f64)).abs() / peak)
                .fold(0.0, f64::max);
            ok &= lin_err <= bound;
            line.push_str(&format!(", linear {lin_err:.1e}"));
        }
        let rel = if m <= 4 { "<=" } else { "vs (reported)" };
        line.push_str(&format!(" {rel} {bound:.1e}"));
        lines.push(line);
    }
    Outcome::gate(
        ok,
        format!(
            "linear_table_size(8) = {} ; {}",
            linear_table_size(8),
            lines.join("; ")
        ),
    )
}

fn performance() -> Outcome {
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    let n = 1usize << 18;
    let mut rng = ChaCha8Rng::seed_from_u64(0x0acc_0007);
    let coords = random_coords(&mut rng, n);
    let fhat = random_complex(&mut rng, n);
    let f = random_complex(&mut rng, n);
    let best = |threads: usize, blocking: bool| -> (Duration, Duration) {
        let mut plan = NfftPlan::new(
            &coords,
            &[n],
            4,
            2.0,
            PlanOptions {
                threads,
                blocking,
                ..PlanOptions::default()
            },
        )
        .unwrap();
        let mut y = vec![Complex64::new(0.0, 0.0); n];
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        let mut total = Duration::MAX;
        let mut resample = Duration::MAX;
        for _ in 0..5 {
            let ta = plan.adjoint_into(&fhat, &mut y).unwrap();
            let td = plan.direct_into(&f, &mut out).unwrap();
            total = total.min(ta.total());
            resample = resample.min(ta.resample + td.resample);
        }
        (total, resample)
    };
    let (t1, r_blocked) = best(1, true);
    let (t4, _) = best(4, true);
    let (_, r_unblocked) = best(1, false);
    let speedup = t1.as_secs_f64() / t4.as_secs_f64();
    let ratio = r_blocked.as_secs_f64() / r_unblocked.as_secs_f64();
    let pass = speedup >= 2.0 && ratio <= 1.1;
    Outcome {
        pass,
        gating: cores >= 4,
        detail: format!(
            "adjoint speedup 4 vs 1 threads {speedup:.2} (target 2.0), blocked/unblocked resampling time {ratio:.2} (target <= 1.1), {cores} cores available"
        ),
    }
}

fn fft_identity() -> Outcome {
    const TOL: f64 = 1e-13;
    let mut rng = ChaCha8Rng::seed_from_u64(0x0acc_0008);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(2)
        .build()
        .unwrap();
    let mut worst: f64 = 0.0;
    for shape in [
        &[8usize][..],
        &[128],
        &[64, 64],
        &[128, 128],
        &[20, 34],
        &[16, 16, 16],
    ] {
        let plan = plan_ffts(shape, 2, FftEffort::Estimate).unwrap();
        let x = random_complex(&mut rng, plan.len());
        let mut y = x.clone();
        exec_forward(&plan, &mut y, &pool);
        exec_backward(&plan, &mut y, &pool);
        let scale = plan.len() as f64;
        let scaled: Vec<Complex64> = x.iter().map(|v| v * scale).collect();
        worst = worst.max(relative_error(&scaled, &y).unwrap());
    }
    Outcome::gate(
        worst <= TOL,
        format!("max deviation {worst:.2e} (tol {TOL:.0e})"),
    )
}

type Criterion<'a> = Box<dyn Fn() -> Outcome + 'a>;

fn main() {
    let decay = decay_instance();
    let criteria: Vec<(&str, Criterion)> = vec![
        (
            "1 oracle equivalence (m=8, polynomial, D=1..3)",
            Box::new(oracle_equivalence),
        ),
        (
            "2 exponential decay in m (2D 32x32, J=1024)",
            Box::new(|| exponential_decay(&decay)),
        ),
        (
            "3 precompute strategy agreement",
            Box::new(|| strategy_agreement(&decay)),
        ),
        (
            "4 adjoint identity (100 instances)",
            Box::new(adjoint_identity),
        ),
        (
            "5 blocking equivalence and determinism",
            Box::new(blocking_equivalence),
        ),
        (
            "6 lookup table size and window approximation bounds",
            Box::new(table_sizes),
        ),
        (
            "7 performance (informational below 4 cores)",
            Box::new(performance),
        ),
        ("8 fft round trip", Box::new(fft_identity)),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let o = run();
        let status = match (o.pass, o.gating) {
            (true, _) => "PASS",
            (false, true) => "FAIL",
            (false, false) => "INFO",
        };
        if !o.pass && o.gating {
            failed += 1;
        }
        println!("criterion {name}: {status} | {}", o.detail);
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all gating acceptance criteria passed");
}
