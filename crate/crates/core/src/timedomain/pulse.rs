use alloc::vec::Vec;

use crate::math::{cos, exp, sin, PI};
use crate::{Error, Result};

/// Uniform time samples `t_n = start + n·Δt`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TimeGrid {
    pub dt: f64,
    pub count: usize,
    pub start: f64,
}

impl TimeGrid {
    pub fn new(dt: f64, count: usize, start: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite() && start.is_finite()) || count < 2 {
            return Err(Error::invalid("time grid needs Δt > 0 and at least 2 samples"));
        }
        Ok(Self { dt, count, start })
    }

    #[inline]
    pub fn time(&self, n: usize) -> f64 {
        self.start + n as f64 * self.dt
    }

    pub fn end(&self) -> f64 {
        self.time(self.count - 1)
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Waveform {
    pub grid: TimeGrid,
    pub samples: Vec<f64>,
    /// Samples before this instant are exactly zero.
    pub front_time: Option<f64>,
}

impl Waveform {
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|v| v * v).sum::<f64>() * self.grid.dt
    }

    pub fn peak(&self) -> f64 {
        self.samples.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.samples.len()).map(|n| self.grid.time(n))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum PulseKind {
    /// `exp(−(t−t₀)²/2σ²)·sin(ω₀(t−t₀))`; no front.
    Gaussian { center: f64, width: f64 },
    /// `sin(ω₀(t−t_f))` from `t_f` on, exactly zero before.
    StepSine { front: f64 },
    /// Step sine with a raised-cosine turn-on of length `ramp` after the front.
    TruncatedSine { front: f64, ramp: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PulseSpec {
    pub kind: PulseKind,
    pub carrier: f64,
    pub amplitude: f64,
}

impl PulseSpec {
    pub fn step_sine(carrier: f64, front: f64) -> Self {
        Self { kind: PulseKind::StepSine { front }, carrier, amplitude: 1.0 }
    }

    pub fn gaussian(carrier: f64, center: f64, width: f64) -> Self {
        Self { kind: PulseKind::Gaussian { center, width }, carrier, amplitude: 1.0 }
    }
}

/// Sample a test pulse on `grid`.
pub fn synthesize_pulse(spec: &PulseSpec, grid: TimeGrid) -> Result<Waveform> {
    let w0 = spec.carrier;
    if !(w0 > 0.0 && w0.is_finite() && spec.amplitude.is_finite()) {
        return Err(Error::invalid("pulse carrier must be positive and finite"));
    }
    let limit = 0.25 * PI / grid.dt;
    if w0 > limit {
        return Err(Error::Aliasing { carrier: w0, limit });
    }
    let a = spec.amplitude;
    let (samples, front): (Vec<f64>, Option<f64>) = match spec.kind {
        PulseKind::Gaussian { center, width } => {
            if !(width > 0.0) {
                return Err(Error::invalid("gaussian width must be positive"));
            }
            let env = |t: f64| exp(-(t - center) * (t - center) / (2.0 * width * width));
            if env(grid.start) > 1e-12 || env(grid.end()) > 1e-12 {
                return Err(Error::invalid("time grid does not contain the gaussian to 1e-12 of its peak"));
            }
            let v = (0..grid.count)
                .map(|n| {
                    let t = grid.time(n);
                    a * env(t) * sin(w0 * (t - center))
                })
                .collect();
            (v, None)
        }
        PulseKind::StepSine { front } => (ramped(grid, a, w0, front, 0.0), Some(front)),
        PulseKind::TruncatedSine { front, ramp } => {
            if !(ramp >= 0.0 && ramp.is_finite()) {
                return Err(Error::invalid("turn-on length must be ≥ 0"));
            }
            (ramped(grid, a, w0, front, ramp), Some(front))
        }
    };
    Ok(Waveform { grid, samples, front_time: front })
}

fn ramped(grid: TimeGrid, a: f64, w0: f64, front: f64, ramp: f64) -> Vec<f64> {
    (0..grid.count)
        .map(|n| {
            let u = grid.time(n) - front;
            if u < 0.0 {
                return 0.0;
            }
            let w = if u < ramp { 0.5 * (1.0 - cos(PI * u / ramp)) } else { 1.0 };
            a * w * sin(w0 * u)
        })
        .collect()
}
