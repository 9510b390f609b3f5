//! Scenario orchestration and `report.json`.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use rayon::prelude::*;
use serde::Serialize;
use slabfront_core::analyticity::{certify, sample_transmission, scan_upper_half_plane, SingularityReport};
use slabfront_core::dielectric::{kk_round_trip, passivity_check, sum_rule, DielectricModel, Passivity};
use slabfront_core::roots::BranchPoint;
use slabfront_core::slab::{assemble, sample, Formula, Slab, SlabConfig, SpectralResponse};
use slabfront_core::timedomain::{
    assess, extract_kernel, Assessment, CausalityReport, KernelEstimate, ProbeConfig, Thresholds, Verdict,
};
use slabfront_core::{Complex64, Error};

use crate::io;
use crate::plot::{self, HeatMap, LineChart, Series};
use crate::scenario::{Scenario, Units};

/// Flags that override the scenario file.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out: Option<PathBuf>,
    pub literal_eq17: bool,
    pub plots: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    GuardFailure,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::GuardFailure => 3,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GuardFailure {
    pub analysis: String,
    pub guard: String,
    pub message: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumSummary {
    pub formula: Formula,
    pub points: usize,
    pub failed_points: usize,
    pub crossed_cut: usize,
    pub unwrap_warnings: usize,
    pub max_power: f64,
    pub min_delay: f64,
    pub min_delay_omega: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct KernelSummary {
    pub ds: f64,
    pub delta: f64,
    pub negative_mass: f64,
    pub total_mass: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanSummary {
    pub count: usize,
    pub branch_points: Vec<BranchPoint>,
    pub denominator_zeros: Vec<Complex64>,
    pub straddles: usize,
    pub certified: Option<bool>,
}

/// Contents of `report.json`. Values are in natural units; `resolved.omega_ref`
/// converts them back.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: u32,
    pub name: String,
    pub version: &'static str,
    pub status: Status,
    pub verdict: Option<Verdict>,
    pub causality: Option<CausalityReport>,
    pub sum_rule: Option<f64>,
    pub sum_rule_expected: Option<f64>,
    pub kk_max_error: Option<f64>,
    pub kk_worst_omega: Option<f64>,
    pub passivity: Passivity,
    pub spectrum: Option<SpectrumSummary>,
    pub kernel: Option<KernelSummary>,
    pub singularities: Option<ScanSummary>,
    pub guard_failures: Vec<GuardFailure>,
    pub artifacts: Vec<String>,
    pub resolved: Resolved,
}

/// Echo of every default the run filled in.
#[derive(Debug, Clone, Serialize)]
pub struct Resolved {
    #[serde(flatten)]
    pub scenario: Scenario,
    pub formula: Formula,
    pub probe: Option<ProbeConfig>,
    pub thresholds: Thresholds,
}

pub struct Outcome {
    pub report: Report,
    pub dir: PathBuf,
}

struct Ctx<'a> {
    dir: &'a Path,
    artifacts: Vec<String>,
    failures: Vec<GuardFailure>,
    plots: bool,
    f_unit: f64,
    t_unit: f64,
}

impl Ctx<'_> {
    fn path(&mut self, name: &str) -> PathBuf {
        self.artifacts.push(name.to_string());
        self.dir.join(name)
    }

    fn fail(&mut self, analysis: &str, e: &Error) {
        self.failures.push(GuardFailure {
            analysis: analysis.into(),
            guard: e.guard().unwrap_or("invalid_input").into(),
            message: e.to_string(),
        });
    }
}

/// τ and ρ on the scenario grid, sampled in parallel and assembled in order.
pub fn spectrum(slab: &SlabConfig, grid: slabfront_core::FrequencyGrid, formula: Formula) -> Result<SpectralResponse, Error> {
    let s = Slab::new(slab)?;
    let omegas: Vec<f64> = grid.iter().collect();
    let samples = omegas.par_iter().map(|w| sample(&s, *w, formula)).collect();
    Ok(assemble(grid, samples))
}

pub fn probe_for(sc: &Scenario, slab: &SlabConfig) -> Result<ProbeConfig, Error> {
    let mut p = ProbeConfig::auto(slab)?;
    if let Some(pulse) = sc.pulse {
        p.pulse = pulse;
    }
    if let Some(t) = sc.time {
        p.time = t;
    }
    if let Some(r) = sc.region {
        p.region = r;
    }
    if let Some(r) = sc.resolution {
        p.resolution = r;
    }
    Ok(p)
}

/// Run every enabled analysis and write the artifacts into the output directory.
pub fn run_scenario(sc: &Scenario, opts: &RunOptions) -> Result<Outcome> {
    let dir = opts.out.clone().unwrap_or_else(|| sc.output_dir.clone());
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let slab = SlabConfig { thickness: sc.thickness, model: sc.model.clone() };
    let formula = if opts.literal_eq17 || sc.literal_eq17 { Formula::Literal } else { Formula::FieldMatching };
    let (f_unit, t_unit) = match sc.units {
        Units::Natural => (1.0, 1.0),
        Units::Si => (sc.frequency_unit(), sc.time_unit()),
    };
    let mut cx = Ctx { dir: &dir, artifacts: Vec::new(), failures: Vec::new(), plots: opts.plots || sc.plots, f_unit, t_unit };
    let a = sc.analysis;

    let spectrum_summary = if a.spectrum { write_spectrum(&mut cx, &slab, sc, formula)? } else { None };

    let (mut kk_max, mut kk_at) = (None, None);
    if a.kk_check {
        match kk_round_trip(&sc.model, sc.grid) {
            Ok(k) => {
                kk_max = Some(k.max_rel_error);
                kk_at = Some(k.worst_omega);
                let model = &sc.model;
                let rows = k.reconstructed.iter().enumerate().map(|(n, kk)| {
                    let w = sc.grid.omega(n);
                    let e = slabfront_core::dielectric::eval_epsilon(model, Complex64::new(w, 0.0))
                        .unwrap_or(Complex64::new(f64::NAN, f64::NAN));
                    vec![w * f_unit, e.re, e.im, kk.re, kk.im]
                });
                let p = cx.path("kk.csv");
                io::write_columns(&p, &["omega", "re_eps", "im_eps", "re_kk", "im_kk"], rows)?;
            }
            Err(e) => cx.fail("kk_check", &e),
        }
    }

    let mut sum = None;
    if a.sum_rule {
        match sum_rule(&sc.model, sc.grid) {
            Ok(v) => sum = Some(v),
            Err(e) => cx.fail("sum_rule", &e),
        }
    }
    let sum_expected = match sc.model {
        DielectricModel::Tabulated(_) => None,
        _ => Some(sc.model.total_strength()),
    };

    let mut probe = None;
    let needs_probe = a.causality || a.kernel || a.scan;
    if needs_probe {
        match probe_for(sc, &slab) {
            Ok(p) => probe = Some(p),
            Err(e) => cx.fail("probe", &e),
        }
    }

    let mut assessment: Option<Assessment> = None;
    if let (true, Some(p)) = (a.causality, probe.as_ref()) {
        match assess(&slab, p, Thresholds::default()) {
            Ok(r) => assessment = Some(r),
            Err(e) => cx.fail("causality", &e),
        }
    }
    if let Some(asm) = &assessment {
        write_causality(&mut cx, asm)?;
    }

    let mut kernel_summary = None;
    if let (true, Some(p)) = (a.kernel, probe.as_ref()) {
        let k = match assessment.as_ref().and_then(|x| x.kernel.clone()) {
            Some(k) => Ok(k),
            None => extract_kernel(&slab, p.kernel_grid),
        };
        match k {
            Ok(k) => {
                let path = cx.path("kernel.csv");
                io::write_kernel(&path, &k, t_unit)?;
                kernel_summary = Some(summarise_kernel(&k));
            }
            Err(e) => cx.fail("kernel", &e),
        }
    }

    let mut scan_summary = None;
    if let (true, Some(p)) = (a.scan, probe.as_ref()) {
        let rep = match assessment.as_ref().and_then(|x| x.scan.clone()) {
            Some(r) => Ok(r),
            None => scan_upper_half_plane(&slab, &p.region, p.resolution),
        };
        match rep {
            Ok(r) => scan_summary = Some(write_scan(&mut cx, &slab, &r, sc.landscape)?),
            Err(e) => cx.fail("scan", &e),
        }
    }

    let status = if cx.failures.is_empty() { Status::Ok } else { Status::GuardFailure };
    let causality = assessment.map(|x| x.report);
    let report = Report {
        schema: crate::scenario::SCHEMA,
        name: sc.name.clone(),
        version: env!("CARGO_PKG_VERSION"),
        status,
        verdict: causality.as_ref().map(|c| c.verdict),
        causality,
        sum_rule: sum,
        sum_rule_expected: sum_expected,
        kk_max_error: kk_max,
        kk_worst_omega: kk_at,
        passivity: passivity_check(&sc.model, sc.grid),
        spectrum: spectrum_summary,
        kernel: kernel_summary,
        singularities: scan_summary,
        guard_failures: std::mem::take(&mut cx.failures),
        artifacts: {
            let mut v = std::mem::take(&mut cx.artifacts);
            v.push("report.json".into());
            v
        },
        resolved: Resolved { scenario: sc.clone(), formula, probe, thresholds: Thresholds::default() },
    };
    io::write_json(&dir.join("report.json"), &report)?;
    Ok(Outcome { report, dir })
}

fn summarise_kernel(k: &KernelEstimate) -> KernelSummary {
    KernelSummary { ds: k.ds, delta: k.delta, negative_mass: k.negative_mass, total_mass: k.total_mass, ratio: k.ratio() }
}

#[derive(Serialize)]
struct SpectrumJson<'a> {
    formula: Formula,
    omega: Vec<f64>,
    tau: &'a [Complex64],
    rho: &'a [Complex64],
    eps: &'a [Complex64],
    eta: &'a [Complex64],
    power: &'a [f64],
    theta: &'a [f64],
    t_delay: Vec<f64>,
    errors: Vec<PointError>,
    crossed_cut: &'a [usize],
    unwrap_warnings: &'a [usize],
}

#[derive(Serialize)]
struct PointError {
    index: usize,
    omega: f64,
    guard: Option<&'static str>,
    message: String,
}

fn write_spectrum(cx: &mut Ctx<'_>, slab: &SlabConfig, sc: &Scenario, formula: Formula) -> Result<Option<SpectrumSummary>> {
    let r = match spectrum(slab, sc.grid, formula) {
        Ok(r) => r,
        Err(e) => {
            cx.fail("spectrum", &e);
            return Ok(None);
        }
    };
    let (fu, tu) = (cx.f_unit, cx.t_unit);
    let omega: Vec<f64> = r.grid.iter().map(|w| w * fu).collect();
    let delay: Vec<f64> = r.delay.iter().map(|d| d * tu).collect();
    let rows = (0..r.grid.count).map(|n| {
        vec![omega[n], r.tau[n].re, r.tau[n].im, r.rho[n].re, r.rho[n].im, r.power[n], r.phase[n], delay[n]]
    });
    let p = cx.path("spectrum.csv");
    io::write_columns(&p, &["omega", "re_tau", "im_tau", "re_rho", "im_rho", "P", "theta", "t_delay"], rows)?;
    let json = SpectrumJson {
        formula,
        omega: omega.clone(),
        tau: &r.tau,
        rho: &r.rho,
        eps: &r.eps,
        eta: &r.eta,
        power: &r.power,
        theta: &r.phase,
        t_delay: delay.clone(),
        errors: r
            .errors
            .iter()
            .map(|(i, e)| PointError { index: *i, omega: omega[*i], guard: e.guard(), message: e.to_string() })
            .collect(),
        crossed_cut: &r.crossed_cut,
        unwrap_warnings: &r.unwrap_warnings,
    };
    let p = cx.path("spectrum.json");
    io::write_json(&p, &json)?;

    let (mut min_delay, mut min_at) = (f64::INFINITY, f64::NAN);
    for (n, d) in r.delay.iter().enumerate() {
        if *d < min_delay {
            min_delay = *d;
            min_at = r.grid.omega(n);
        }
    }
    if cx.plots {
        let unit = if fu == 1.0 { "ω (ω_ref)" } else { "ω (rad/s)" };
        let power = LineChart {
            title: "Transmitted power P(ω) = |τ|²",
            x_label: unit,
            y_label: "P",
            series: vec![Series { label: "P(ω)", color: "#1f77b4", points: omega.iter().copied().zip(r.power.iter().copied()).collect() }],
            marker: None,
        };
        let p = cx.path("power.svg");
        plot::write(&p, &plot::render_lines(&power))?;
        let dl = LineChart {
            title: "Group delay relative to vacuum",
            x_label: unit,
            y_label: if tu == 1.0 { "t_delay (1/ω_ref)" } else { "t_delay (s)" },
            series: vec![Series { label: "t_delay(ω)", color: "#d62728", points: omega.iter().copied().zip(delay.iter().copied()).collect() }],
            marker: None,
        };
        let p = cx.path("delay.svg");
        plot::write(&p, &plot::render_lines(&dl))?;
    }
    Ok(Some(SpectrumSummary {
        formula,
        points: r.grid.count,
        failed_points: r.errors.len(),
        crossed_cut: r.crossed_cut.len(),
        unwrap_warnings: r.unwrap_warnings.len(),
        max_power: r.power.iter().copied().filter(|v| v.is_finite()).fold(0.0, f64::max),
        min_delay,
        min_delay_omega: min_at,
    }))
}

fn write_causality(cx: &mut Ctx<'_>, asm: &Assessment) -> Result<()> {
    let p = cx.path("causality.json");
    io::write_json(&p, &serde_json::json!({ "report": asm.report, "probe": asm.probe }))?;
    let tu = cx.t_unit;
    if let Some(w) = &asm.input {
        let p = cx.path("waveform_in.csv");
        io::write_waveform(&p, w, tu)?;
    }
    if let Some(w) = &asm.output {
        let p = cx.path("waveform_out.csv");
        io::write_waveform(&p, w, tu)?;
    }
    if cx.plots {
        if let (Some(i), Some(o)) = (&asm.input, &asm.output) {
            let pts = |w: &slabfront_core::timedomain::Waveform| w.times().map(|t| t * tu).zip(w.samples.iter().copied()).collect();
            let chart = LineChart {
                title: "Step-sine probe: input and transmitted field",
                x_label: if tu == 1.0 { "t (1/ω_ref)" } else { "t (s)" },
                y_label: "V",
                series: vec![
                    Series { label: "V_in", color: "#7f7f7f", points: pts(i) },
                    Series { label: "V_out", color: "#1f77b4", points: pts(o) },
                ],
                marker: i.front_time.map(|t| (t * tu, "front")),
            };
            let p = cx.path("waveforms.svg");
            plot::write(&p, &plot::render_lines(&chart))?;
        }
    }
    Ok(())
}

fn write_scan(cx: &mut Ctx<'_>, slab: &SlabConfig, r: &SingularityReport, landscape: [usize; 2]) -> Result<ScanSummary> {
    let certified = match certify(r) {
        Ok(v) => Some(v),
        Err(e) => {
            cx.fail("scan", &e);
            None
        }
    };
    let p = cx.path("singularities.json");
    io::write_json(&p, &serde_json::json!({ "report": r, "certified": certified }))?;

    let [nx, ny] = landscape;
    let region = r.region;
    let lattice = match sample_transmission(slab, &region, nx, ny) {
        Ok(v) => v,
        Err(e) => {
            cx.fail("landscape", &e);
            return Ok(summary(r, certified));
        }
    };
    let p = cx.path("landscape.csv");
    io::write_landscape(&p, &lattice, cx.f_unit)?;
    if cx.plots {
        let fu = cx.f_unit;
        let map = HeatMap {
            title: "log10 |τ(ζ)| over the upper half plane",
            x_label: if fu == 1.0 { "Re ζ (ω_ref)" } else { "Re ζ (rad/s)" },
            y_label: if fu == 1.0 { "Im ζ (ω_ref)" } else { "Im ζ (rad/s)" },
            nx,
            ny,
            x_range: (region.re_min * fu, region.re_max * fu),
            y_range: (region.im_min * fu, region.im_max * fu),
            values: lattice.iter().map(|(_, v)| v.norm().log10()).collect(),
            value_label: "log10 |τ|",
        };
        let p = cx.path("landscape.svg");
        plot::write(&p, &plot::render_heat(&map))?;
    }
    Ok(summary(r, certified))
}

fn summary(r: &SingularityReport, certified: Option<bool>) -> ScanSummary {
    ScanSummary {
        count: r.singularity_count(),
        branch_points: r.branch_points.clone(),
        denominator_zeros: r.denominator_zeros.clone(),
        straddles: r.straddles,
        certified,
    }
}
