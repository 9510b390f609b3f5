//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, Matrix2};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use slabfront::{load, run_scenario, RunOptions};
use slabfront_core::analyticity::{default_region, scan_upper_half_plane};
use slabfront_core::dielectric::{
    eval_epsilon, kk_reconstruct, kk_round_trip, passivity_check, sum_rule, DielectricModel, ImagSpectrum, Resonance,
};
use slabfront_core::roots::{find_branch_points, BranchKind};
use slabfront_core::slab::{evaluate_spectrum, Slab, SlabConfig};
use slabfront_core::timedomain::{
    assess, convolve, extract_kernel, propagate, synthesize_pulse, ProbeConfig, PulseSpec, Thresholds, TimeGrid,
    Verdict,
};
use slabfront_core::{Complex64, FrequencyGrid, Region};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn lorentz_passive() -> DielectricModel {
    DielectricModel::lorentz(1.0, 1.0, 2.0, 0.1)
}

fn inverted() -> DielectricModel {
    DielectricModel::lorentz(-1.0, 2.0, 1.0, 0.1)
}

fn two_line() -> DielectricModel {
    DielectricModel::OscillatorSet {
        plasma: 1.0,
        resonances: vec![Resonance::new(0.6, 1.0, 0.2), Resonance::new(0.4, 3.0, 0.5)],
    }
}

fn grid() -> FrequencyGrid {
    FrequencyGrid::up_to(40.0, 4001).unwrap()
}

fn within(name: &str, value: f64, limit: f64) -> Result<(), String> {
    if value < limit {
        Ok(())
    } else {
        Err(format!("{name} = {value:.3e} ≥ {limit:.0e}"))
    }
}

fn budget(t: Instant, limit: Duration) -> Result<Duration, String> {
    let e = t.elapsed();
    if e <= limit {
        Ok(e)
    } else {
        Err(format!("took {e:.2?}, budget {limit:?}"))
    }
}

fn sum_rules() -> Check {
    let mut notes = Vec::new();
    for (m, want) in [(lorentz_passive(), 1.0), (inverted(), -4.0)] {
        let t = Instant::now();
        let v = sum_rule(&m, grid()).map_err(|e| e.to_string())?;
        let e = budget(t, Duration::from_secs(1))?;
        within("relative error", ((v - want) / want).abs(), 1e-4)?;
        notes.push(format!("{v:.8} in {e:.1?}"));
    }
    Ok(notes.join(", "))
}

fn kk_round_trips() -> Check {
    let t = Instant::now();
    let mut worst: f64 = 0.0;
    let mut worst_off: f64 = 0.0;
    for m in [lorentz_passive(), two_line(), DielectricModel::lorentz(0.5, 2.0, 1.0, 0.3)] {
        let k = kk_round_trip(&m, grid()).map_err(|e| e.to_string())?;
        within("real-axis error", k.max_rel_error, 1e-3)?;
        worst = worst.max(k.max_rel_error);
        let spec = ImagSpectrum::from_model(&m, grid()).map_err(|e| e.to_string())?;
        let z = c(0.0, 3.0);
        let kk = kk_reconstruct(&spec, z).map_err(|e| e.to_string())?;
        let e = eval_epsilon(&m, z).map_err(|e| e.to_string())?;
        let off = (kk - e).norm() / e.norm();
        within("error at 3i", off, 1e-4)?;
        worst_off = worst_off.max(off);
    }
    let e = budget(t, Duration::from_secs(5))?;
    Ok(format!("max real-axis {worst:.2e}, at 3i {worst_off:.2e}, {e:.1?}"))
}

fn slab_limits() -> Check {
    let t = Instant::now();
    let g = grid();
    let mut dev: f64 = 0.0;
    for cfg in [
        SlabConfig::new(DielectricModel::Vacuum, 3.0).unwrap(),
        SlabConfig::new(lorentz_passive(), 0.0).unwrap(),
        SlabConfig::new(inverted(), 0.0).unwrap(),
        SlabConfig::new(DielectricModel::Constant { eps: 2.25 }, 0.0).unwrap(),
    ] {
        let s = Slab::new(&cfg).unwrap();
        for w in g.iter() {
            let tau = s.transmission(c(w, 0.0)).map_err(|e| e.to_string())?;
            dev = dev.max((tau - 1.0).norm());
        }
    }
    if dev > 1e-14 {
        return Err(format!("|τ − 1| = {dev:.2e} for a trivial slab"));
    }
    let mut excess: f64 = f64::NEG_INFINITY;
    let mut lossless_gap: f64 = 0.0;
    let passive = [
        (lorentz_passive(), 5.0),
        (lorentz_passive(), 1.0),
        (two_line(), 2.0),
        (DielectricModel::Constant { eps: 2.25 }, 3.3),
        (DielectricModel::lorentz(1.0, 1.0, 2.0, 0.0), 1.5),
    ];
    for (m, l) in passive {
        let cfg = SlabConfig::new(m, l).unwrap();
        let s = Slab::new(&cfg).unwrap();
        for w in g.iter() {
            let z = c(w, 0.0);
            let (Ok(tau), Ok(rho), Ok(eps)) = (s.transmission(z), s.reflection(z), eval_epsilon(&cfg.model, z)) else {
                // Only the lossless line's pole at ω = Ω can refuse.
                continue;
            };
            let e = tau.norm_sqr() + rho.norm_sqr();
            excess = excess.max(e - 1.0);
            if eps.im == 0.0 {
                lossless_gap = lossless_gap.max((e - 1.0).abs());
            }
        }
    }
    if excess > 1e-9 {
        return Err(format!("|τ|²+|ρ|² exceeds 1 by {excess:.2e}"));
    }
    within("lossless |τ|²+|ρ|² − 1", lossless_gap, 1e-9)?;
    let e = budget(t, Duration::from_secs(1))?;
    Ok(format!("trivial |τ−1| {dev:.1e}, max excess {excess:.1e}, lossless gap {lossless_gap:.1e}, {e:.1?}"))
}

fn causal_direction() -> Check {
    let t = Instant::now();
    let cfg = SlabConfig::new(lorentz_passive(), 5.0).unwrap();
    let probe = ProbeConfig::auto(&cfg).map_err(|e| e.to_string())?;
    if probe.time.count != 1 << 16 || probe.pulse != PulseSpec::step_sine(2.0, 0.0) {
        return Err(format!("unexpected probe {probe:?}"));
    }
    let a = assess(&cfg, &probe, Thresholds::default()).map_err(|e| e.to_string())?;
    let r = &a.report;
    let lam = r.front_leakage.ok_or("no front leakage")?;
    let ratio = r.kernel_ratio.ok_or("no kernel ratio")?;
    within("λ", lam, 1e-6)?;
    within("M₋/M", ratio, 1e-6)?;
    let scan = a.scan.as_ref().ok_or("no scan")?;
    if scan.singularity_count() != 0 || scan.straddles != 0 || scan.region != default_region(&cfg.model) {
        return Err(format!("scan found {} singularities, {} straddles", scan.singularity_count(), scan.straddles));
    }
    let e = budget(t, Duration::from_secs(10))?;
    Ok(format!("λ {lam:.2e}, M₋/M {ratio:.2e}, 0 singularities, {e:.1?}"))
}

fn acausal_model() -> Check {
    let t = Instant::now();
    let cfg = SlabConfig::new(inverted(), 1.0).unwrap();
    let want = c(0.0, 3.01f64.sqrt() - 0.1);
    let scan = scan_upper_half_plane(&cfg, &default_region(&cfg.model), 32).map_err(|e| e.to_string())?;
    let zero = scan
        .branch_points
        .iter()
        .filter(|b| b.kind == BranchKind::ZeroOfEpsilon)
        .map(|b| b.location)
        .min_by(|a, b| (a - want).norm().total_cmp(&(b - want).norm()))
        .ok_or("scan found no zero of ε")?;
    let miss = (zero - want).norm();
    within("|ζ* − i(√3.01 − 0.1)|", miss, 1e-6)?;
    let probe = ProbeConfig::auto(&cfg).map_err(|e| e.to_string())?;
    let a = assess(&cfg, &probe, Thresholds::default()).map_err(|e| e.to_string())?;
    if a.report.verdict != Verdict::Acausal {
        return Err(format!("verdict {:?}", a.report.verdict));
    }
    let ratio = a.report.kernel_ratio.ok_or("no kernel ratio")?;
    if !(ratio > 1e-3) {
        return Err(format!("M₋/M = {ratio:.2e} ≤ 1e-3"));
    }
    let e = budget(t, Duration::from_secs(15))?;
    Ok(format!("ζ* = {:.9}i (miss {miss:.1e}), acausal, M₋/M {ratio:.3}, {e:.1?}", zero.im))
}

/// Phase of τ by an independent transfer-matrix product.
fn tm_transmission(m: &DielectricModel, l: f64, w: f64) -> Complex64 {
    let i = c(0.0, 1.0);
    let n = eval_epsilon(m, c(w, 0.0)).unwrap().sqrt();
    let d = n * w * l;
    let layer = Matrix2::new(d.cos(), i * d.sin() / n, i * n * d.sin(), d.cos());
    let t = 2.0 / (layer[(0, 0)] + layer[(1, 1)] - layer[(0, 1)] - layer[(1, 0)]);
    t * (-i * w * l).exp()
}

fn negative_delay() -> Check {
    let t = Instant::now();
    // Frozen after a sweep over line strength, width and thickness.
    let (m, l) = (lorentz_passive(), 1.0);
    let g = grid();
    if !passivity_check(&m, g).passive {
        return Err("model is not passive".into());
    }
    let cfg = SlabConfig::new(m.clone(), l).unwrap();
    let r = evaluate_spectrum(&cfg, g).map_err(|e| e.to_string())?;
    let (k, d) = r
        .delay
        .iter()
        .enumerate()
        .filter(|(_, d)| d.is_finite())
        .min_by(|a, b| a.1.total_cmp(b.1))
        .ok_or("no delay samples")?;
    let w = g.omega(k);
    if !(*d < 0.0) {
        return Err(format!("minimum delay {d} is not negative"));
    }
    let h = 1e-5;
    let fd = (tm_transmission(&m, l, w + h) / tm_transmission(&m, l, w - h)).arg() / (2.0 * h);
    if !(fd < 0.0) || (fd - d).abs() > 1e-3 * d.abs() {
        return Err(format!("transfer-matrix delay {fd} disagrees with {d}"));
    }
    let mut probe = ProbeConfig::auto(&cfg).map_err(|e| e.to_string())?;
    probe.pulse = PulseSpec::step_sine(w, 0.0);
    let a = assess(&cfg, &probe, Thresholds::default()).map_err(|e| e.to_string())?;
    let lam = a.report.front_leakage.ok_or("no front leakage")?;
    within("λ", lam, 1e-6)?;
    let e = budget(t, Duration::from_secs(15))?;
    Ok(format!("t_delay({w:.3}) = {d:.3} (oracle {fd:.3}), λ {lam:.2e}, {e:.1?}"))
}

fn random_model(rng: &mut StdRng, lines: usize) -> DielectricModel {
    DielectricModel::OscillatorSet {
        plasma: rng.random_range(0.3..2.0),
        resonances: (0..lines)
            .map(|_| {
                let f = rng.random_range(0.1..1.5) * if rng.random_bool(0.25) { -1.0 } else { 1.0 };
                Resonance::new(f, rng.random_range(0.3..3.0), rng.random_range(0.02..1.0))
            })
            .collect(),
    }
}

/// Roots of `Σ c_k u^k` (real, highest first) from the companion matrix, Newton-polished.
fn companion_roots(coef: &[f64]) -> Vec<Complex64> {
    let n = coef.len() - 1;
    let lead = coef[0];
    let mut comp = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        comp[(0, k)] = -coef[k + 1] / lead;
        if k + 1 < n {
            comp[(k + 1, k)] = 1.0;
        }
    }
    comp.complex_eigenvalues()
        .iter()
        .map(|r0| {
            let mut r = *r0;
            for _ in 0..3 {
                let (mut p, mut dp) = (c(0.0, 0.0), c(0.0, 0.0));
                for a in coef {
                    dp = dp * r + p;
                    p = p * r + a;
                }
                if dp.norm() > 0.0 {
                    r -= p / dp;
                }
            }
            r
        })
        .collect()
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_add(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len().max(b.len());
    let pad = |p: &[f64]| [vec![0.0; n - p.len()], p.to_vec()].concat();
    pad(a).iter().zip(pad(b)).map(|(x, y)| x + y).collect()
}

/// With `ζ = iu` each denominator is the real quadratic `u² + 2γu + Ω²`.
fn oracle_zeros(m: &DielectricModel) -> (Vec<Complex64>, Vec<Complex64>) {
    let DielectricModel::OscillatorSet { plasma, resonances } = m else { unreachable!() };
    let quads: Vec<Vec<f64>> = resonances.iter().map(|r| vec![1.0, 2.0 * r.gamma, r.omega0 * r.omega0]).collect();
    let mut num = vec![1.0];
    for q in &quads {
        num = poly_mul(&num, q);
    }
    for (j, r) in resonances.iter().enumerate() {
        let mut term = vec![r.strength * plasma * plasma];
        for (k, q) in quads.iter().enumerate() {
            if k != j {
                term = poly_mul(&term, q);
            }
        }
        num = poly_add(&num, &term);
    }
    let to_zeta = |u: Complex64| c(0.0, 1.0) * u;
    let zeros = companion_roots(&num).into_iter().map(to_zeta).collect();
    let poles = quads.iter().flat_map(|q| companion_roots(q)).map(to_zeta).collect();
    (zeros, poles)
}

fn oracle_equivalences() -> Check {
    let t = Instant::now();
    let mut rng = StdRng::seed_from_u64(0x5eed_cafe);

    let mut worst_tm: f64 = 0.0;
    for _ in 0..10_000 {
        let lines = rng.random_range(1..=2);
        let m = random_model(&mut rng, lines);
        let w = rng.random_range(0.05..10.0);
        let l = rng.random_range(0.01..5.0);
        let cfg = SlabConfig::new(m.clone(), l).unwrap();
        let closed = Slab::new(&cfg).unwrap().transmission(c(w, 0.0)).map_err(|e| e.to_string())?;
        let oracle = tm_transmission(&m, l, w);
        worst_tm = worst_tm.max((closed - oracle).norm() / oracle.norm());
    }
    within("closed form vs transfer matrix", worst_tm, 1e-12)?;

    let mut worst_root: f64 = 0.0;
    for k in 0..300 {
        let m = random_model(&mut rng, 1 + k % 3);
        let found = find_branch_points(&m, &Region::everywhere()).map_err(|e| e.to_string())?;
        let (zeros, poles) = oracle_zeros(&m);
        for (kind, want) in [(BranchKind::ZeroOfEpsilon, zeros), (BranchKind::PoleOfEpsilon, poles)] {
            let got: Vec<Complex64> = found.iter().filter(|b| b.kind == kind).map(|b| b.location).collect();
            if got.len() != want.len() {
                return Err(format!("{kind:?}: {} found, {} expected for {m:?}", got.len(), want.len()));
            }
            for z in &want {
                let d = got.iter().map(|g| (g - z).norm()).fold(f64::INFINITY, f64::min) / z.norm().max(1.0);
                worst_root = worst_root.max(d);
            }
        }
    }
    within("branch points vs companion matrix", worst_root, 1e-12)?;

    let mut worst_conv: f64 = 0.0;
    let dt = 0.01;
    let tg = TimeGrid::new(dt, 8192, -40.0).unwrap();
    let input = synthesize_pulse(&PulseSpec::gaussian(2.0, 0.0, 5.0), tg).unwrap();
    let kgrid = FrequencyGrid::up_to(std::f64::consts::PI / dt, (1 << 16) + 1).unwrap();
    for (m, l) in [(lorentz_passive(), 5.0), (lorentz_passive(), 1.0), (two_line(), 2.0)] {
        let cfg = SlabConfig::new(m, l).unwrap();
        let fast = propagate(&input, &cfg).map_err(|e| e.to_string())?;
        let k = extract_kernel(&cfg, kgrid).map_err(|e| e.to_string())?;
        let slow = convolve(&k, &input).map_err(|e| e.to_string())?;
        let err = fast.samples.iter().zip(&slow.samples).fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
        worst_conv = worst_conv.max(err / fast.peak());
    }
    within("propagate vs convolution", worst_conv, 1e-6)?;
    let e = budget(t, Duration::from_secs(20))?;
    Ok(format!("τ {worst_tm:.1e}, roots {worst_root:.1e}, convolution {worst_conv:.1e}, {e:.1?}"))
}

fn scenarios_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios")
}

fn read_tree(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

fn determinism() -> Check {
    let t = Instant::now();
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut paths: Vec<PathBuf> = std::fs::read_dir(scenarios_dir())
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "scenario"))
        .collect();
    paths.sort();
    let mut files = 0;
    for p in &paths {
        let sc = load(p).map_err(|e| e.to_string())?;
        let mut trees = Vec::new();
        for (run, threads) in [(0, 1), (1, 1), (2, 4)] {
            let out = tmp.path().join(format!("{}-{run}", sc.name));
            let opts = RunOptions { out: Some(out.clone()), literal_eq17: false, plots: true };
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| run_scenario(&sc, &opts)).map_err(|e| format!("{e:#}"))?;
            trees.push(read_tree(&out));
        }
        if trees[0] != trees[1] || trees[0] != trees[2] {
            return Err(format!("{} artifacts differ between runs", sc.name));
        }
        files += trees[0].len();
    }
    Ok(format!("{} scenarios, {files} artifacts identical across 3 runs, {:.1?}", paths.len(), t.elapsed()))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("1 sum rule", sum_rules),
        ("2 dispersion-relation round trip", kk_round_trips),
        ("3 slab limits and energy bound", slab_limits),
        ("4 analytic slab is causal", causal_direction),
        ("5 inverted slab is acausal", acausal_model),
        ("6 negative group delay with a sharp front", negative_delay),
        ("7 oracle equivalences", oracle_equivalences),
        ("8 deterministic artifacts", determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    println!("{} of 8 criteria passed", 8 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
