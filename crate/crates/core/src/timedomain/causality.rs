use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::kernel::{extract_kernel, KernelEstimate};
use super::propagate::{front_leakage, propagate_unguarded, transfer, Plan, NYQUIST_COVER};
use super::pulse::{synthesize_pulse, PulseSpec, TimeGrid, Waveform};
use crate::analyticity::{certify, default_region, scan_upper_half_plane, SingularityReport};
use crate::dielectric::DielectricModel;
use crate::grid::{FrequencyGrid, Region};
use crate::math::{next_pow2, sqrt, PI};
use crate::slab::SlabConfig;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Thresholds {
    pub front_leakage: f64,
    pub kernel_ratio: f64,
    pub singularities: usize,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self { front_leakage: 1e-4, kernel_ratio: 1e-3, singularities: 1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Verdict {
    Causal,
    Acausal,
    Inconclusive,
}

/// Probe pulse, kernel grid and scan settings.
///
/// Front leakage needs a front-limited pulse; a gaussian leaves it unavailable.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ProbeConfig {
    pub pulse: PulseSpec,
    pub time: TimeGrid,
    pub kernel_grid: FrequencyGrid,
    pub region: Region,
    pub resolution: usize,
}

/// Samples in the automatic probe window.
pub const PROBE_SAMPLES: usize = 1 << 16;
/// Target for the discretisation floor of the front leakage.
const GIBBS_TARGET: f64 = 1e-7;
const KERNEL_DS: f64 = 0.05;
/// Kernel frequency samples across the narrowest linewidth.
const KERNEL_PER_LINEWIDTH: f64 = 64.0;
const KERNEL_MAX_HALF: usize = 1 << 20;

impl ProbeConfig {
    /// Defaults derived from the model.
    ///
    /// The carrier sits on the first resonance. `Δt` keeps the front's ringing
    /// floor `a·ω₀·Δt²/(2π²·11)` below 1e-7, `a = L·Σfω_p²/2`, and meets the
    /// Nyquist cover. The front sits a quarter into the window.
    pub fn auto(slab: &SlabConfig) -> Result<Self> {
        slab.validate()?;
        let model = &slab.model;
        let top = match model.top_frequency() {
            t if t > 0.0 => t,
            _ => 1.0,
        };
        let carrier = match model {
            DielectricModel::OscillatorSet { resonances, .. } => {
                resonances.iter().map(|r| r.omega0).find(|w| *w > 0.0).unwrap_or(top)
            }
            _ => top,
        };
        let top = top.max(carrier);
        let mut dt = PI / (NYQUIST_COVER * top);
        let a = slab.thickness * abs_strength(model) / 2.0;
        if a > 0.0 {
            dt = dt.min(sqrt(GIBBS_TARGET * 2.0 * PI * PI * 11.0 / (a * carrier)));
        }
        let span = dt * PROBE_SAMPLES as f64;
        let time = TimeGrid::new(dt, PROBE_SAMPLES, -span / 4.0)?;

        let ds = KERNEL_DS.min(PI / (NYQUIST_COVER * top));
        let omega_max = PI / ds;
        let dw = match model.min_gamma().filter(|g| *g > 0.0) {
            Some(g) => g / KERNEL_PER_LINEWIDTH,
            None => omega_max / 4096.0,
        };
        let half = next_pow2(libm::ceil(omega_max / dw) as usize).clamp(8, KERNEL_MAX_HALF);
        let kernel_grid = FrequencyGrid::up_to(omega_max, half + 1)?;
        Ok(Self { pulse: PulseSpec::step_sine(carrier, 0.0), time, kernel_grid, region: default_region(model), resolution: 32 })
    }
}

fn abs_strength(model: &DielectricModel) -> f64 {
    match model {
        DielectricModel::OscillatorSet { plasma, resonances } => {
            resonances.iter().map(|r| r.strength.abs()).sum::<f64>() * plasma * plasma
        }
        _ => 0.0,
    }
}

/// A constituent that could not be computed.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Failure {
    pub indicator: String,
    pub guard: Option<String>,
    pub message: String,
}

impl Failure {
    fn new(indicator: &str, e: &Error) -> Self {
        Self { indicator: indicator.into(), guard: e.guard().map(Into::into), message: format!("{e}") }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CausalityReport {
    pub front_leakage: Option<f64>,
    pub kernel_ratio: Option<f64>,
    pub singularities: Option<usize>,
    pub verdict: Verdict,
    pub thresholds: Thresholds,
    pub failures: Vec<Failure>,
}

/// Acausal when two indicators exceed; causal only when all three are present and below.
pub fn verdict(
    leakage: Option<f64>,
    ratio: Option<f64>,
    singularities: Option<usize>,
    th: &Thresholds,
) -> Verdict {
    let flags = [
        leakage.map(|v| v > th.front_leakage),
        ratio.map(|v| v > th.kernel_ratio),
        singularities.map(|n| n >= th.singularities),
    ];
    let exceeded = flags.iter().filter(|f| **f == Some(true)).count();
    if exceeded >= 2 {
        Verdict::Acausal
    } else if flags.iter().all(|f| *f == Some(false)) {
        Verdict::Causal
    } else {
        Verdict::Inconclusive
    }
}

/// Everything the assessment computed, for export.
#[derive(Debug, Clone)]
pub struct Assessment {
    pub report: CausalityReport,
    pub probe: ProbeConfig,
    pub input: Option<Waveform>,
    pub output: Option<Waveform>,
    pub kernel: Option<KernelEstimate>,
    pub scan: Option<SingularityReport>,
}

/// Run all three indicators. Constituent failures are recorded, not returned.
pub fn assess(slab: &SlabConfig, probe: &ProbeConfig, thresholds: Thresholds) -> Result<Assessment> {
    slab.validate()?;
    let mut failures = Vec::new();

    let input = synthesize_pulse(&probe.pulse, probe.time).map_err(|e| failures.push(Failure::new("front_leakage", &e))).ok();
    let mut output = None;
    let mut leakage = None;
    if let Some(w) = &input {
        match probe_output(slab, w) {
            Ok((out, fraction)) => {
                let lam = front_leakage(&out);
                // Wrapped energy hides part of the precursor, so only an exceedance is conclusive.
                if fraction > 1e-8 {
                    failures.push(Failure::new("front_leakage", &Error::Wraparound { fraction }));
                    leakage = lam.filter(|v| *v > thresholds.front_leakage);
                } else {
                    leakage = lam;
                }
                output = Some(out);
            }
            Err(e) => failures.push(Failure::new("front_leakage", &e)),
        }
    }

    let kernel = extract_kernel(slab, probe.kernel_grid).map_err(|e| failures.push(Failure::new("kernel_ratio", &e))).ok();
    let ratio = kernel.as_ref().map(KernelEstimate::ratio);

    let scan = scan_upper_half_plane(slab, &probe.region, probe.resolution)
        .map_err(|e| failures.push(Failure::new("singularities", &e)))
        .ok();
    let singularities = scan.as_ref().and_then(|s| match certify(s) {
        Ok(_) => Some(s.singularity_count()),
        Err(e) => {
            failures.push(Failure::new("singularities", &e));
            None
        }
    });

    let v = verdict(leakage, ratio, singularities, &thresholds);
    Ok(Assessment {
        report: CausalityReport {
            front_leakage: leakage,
            kernel_ratio: ratio,
            singularities,
            verdict: v,
            thresholds,
            failures,
        },
        probe: *probe,
        input,
        output,
        kernel,
        scan,
    })
}

fn probe_output(slab: &SlabConfig, input: &Waveform) -> Result<(Waveform, f64)> {
    let plan = Plan::for_model(input.grid, &slab.model)?;
    let h = transfer(slab, &plan)?;
    propagate_unguarded(input, &plan, &h)
}

/// [`assess`] with automatic probe settings and default thresholds.
pub fn assess_causality(slab: &SlabConfig) -> Result<CausalityReport> {
    let probe = ProbeConfig::auto(slab)?;
    Ok(assess(slab, &probe, Thresholds::default())?.report)
}
