//! Normal-incidence transmission and reflection of a homogeneous slab.
//!
//! Amplitudes are normalised so that vacuum gives `τ = 1`:
//! `τ = 2η e^{−iζL} / [2η cos x − i(1+η²) sin x]`, `x = ζηL`.
//! Both `τ` and `ρ` are even in `η`, so either root of `ε` may be used.

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::dielectric::{eval_epsilon, DielectricModel};
use crate::grid::FrequencyGrid;
use crate::math::{abs, arg, cexp, csqrt, scaled_cos_sin, wrap_angle, I, PI};
use crate::refraction::Refraction;
use crate::{Error, Result};

pub mod transfer;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SlabConfig {
    pub thickness: f64,
    pub model: DielectricModel,
}

impl SlabConfig {
    pub fn new(model: DielectricModel, thickness: f64) -> Result<Self> {
        let s = Self { thickness, model };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.thickness >= 0.0 && self.thickness.is_finite()) {
            return Err(Error::invalid("slab thickness must be finite and ≥ 0"));
        }
        self.model.validate()
    }

    /// True when the slab cannot be told apart from vacuum.
    pub fn is_trivial(&self) -> bool {
        self.thickness == 0.0 || self.model.is_vacuum()
    }
}

/// Which closed form to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Formula {
    /// Field matching with the vacuum-normalised numerator.
    #[default]
    FieldMatching,
    /// `2η e^{iζL} / [(1+η²) cos x + 2iη sin x]`, taken verbatim.
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Amplitudes {
    pub eps: Complex64,
    pub eta: Complex64,
    pub tau: Complex64,
    pub rho: Complex64,
    pub crossed_cut: bool,
}

/// Prepared slab evaluator.
#[derive(Debug, Clone)]
pub struct Slab<'a> {
    config: &'a SlabConfig,
    index: Refraction<'a>,
}

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

impl<'a> Slab<'a> {
    pub fn new(config: &'a SlabConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self { config, index: Refraction::new(&config.model)? })
    }

    pub fn config(&self) -> &SlabConfig {
        self.config
    }

    pub fn refraction(&self) -> &Refraction<'a> {
        &self.index
    }

    /// Root of `ε` with `Im(ζη) ≥ 0`, so that `|e^{iζηL}| ≤ 1`.
    fn decaying_root(z: Complex64, eps: Complex64) -> Complex64 {
        let r = csqrt(eps);
        if (z * r).im < 0.0 {
            -r
        } else {
            r
        }
    }

    /// `(τ, ρ)` from `ε` in the overflow-safe exponential form.
    fn tau_rho(&self, z: Complex64, eps: Complex64) -> Result<(Complex64, Complex64)> {
        let l = self.config.thickness;
        let eta = Self::decaying_root(z, eps);
        let q = cexp(I * z * eta * l);
        let q2 = q * q;
        let a = (ONE + eta) * (ONE + eta);
        let b = (ONE - eta) * (ONE - eta) * q2;
        let den = a - b;
        let scale = abs(a) + abs(b);
        if abs(den) < 1e-14 * scale {
            return Err(Error::DenominatorZero { re: z.re, im: z.im, magnitude: abs(den) / scale });
        }
        let tau = 4.0 * eta * cexp(I * z * (eta - 1.0) * l) / den;
        let rho = (eta * eta - 1.0) * (q2 - 1.0) / den;
        Ok((tau, rho))
    }

    pub fn transmission(&self, z: Complex64) -> Result<Complex64> {
        if self.config.is_trivial() {
            return Ok(ONE);
        }
        self.index.check(z)?;
        let eps = eval_epsilon(&self.config.model, z)?;
        Ok(self.tau_rho(z, eps)?.0)
    }

    pub fn reflection(&self, z: Complex64) -> Result<Complex64> {
        if self.config.is_trivial() {
            return Ok(ZERO);
        }
        self.index.check(z)?;
        let eps = eval_epsilon(&self.config.model, z)?;
        Ok(self.tau_rho(z, eps)?.1)
    }

    /// Verbatim closed form, odd in `η`; uses the continuity branch.
    pub fn transmission_literal(&self, z: Complex64) -> Result<Complex64> {
        let eta = self.index.eta(z)?.value;
        self.literal_with(z, eta)
    }

    fn literal_with(&self, z: Complex64, eta: Complex64) -> Result<Complex64> {
        let l = self.config.thickness;
        let x = z * eta * l;
        let (c, s) = scaled_cos_sin(x);
        let den = (ONE + eta * eta) * c + 2.0 * I * eta * s;
        let num = 2.0 * eta * cexp(I * z * l - x.im.abs());
        if abs(den) < 1e-14 * (abs((ONE + eta * eta) * c) + abs(2.0 * eta * s)) {
            return Err(Error::DenominatorZero { re: z.re, im: z.im, magnitude: abs(den) });
        }
        Ok(num / den)
    }

    /// Everything at one frequency, with `η` on the continuity branch.
    pub fn amplitudes(&self, z: Complex64, formula: Formula) -> Result<Amplitudes> {
        let eps = eval_epsilon(&self.config.model, z)?;
        let eta = self.index.eta(z)?;
        let (tau, rho) = if self.config.is_trivial() {
            (ONE, ZERO)
        } else {
            self.tau_rho(z, eps)?
        };
        let tau = match formula {
            Formula::FieldMatching => tau,
            Formula::Literal => self.literal_with(z, eta.value)?,
        };
        Ok(Amplitudes { eps, eta: eta.value, tau, rho, crossed_cut: eta.crossed_cut })
    }

    /// `e^{−|Im x|}·F(ζ)`, where `τ = 2e^{−iζL}/F` and
    /// `F = 2cos x − i(η + 1/η) sin x` depends on `ε` only.
    ///
    /// Entire wherever `ε` is; its zeros are the poles of `τ`.
    pub fn scaled_denominator(&self, z: Complex64) -> Result<Complex64> {
        let eps = eval_epsilon(&self.config.model, z)?;
        Ok(self.scaled_denominator_from(z, eps))
    }

    pub(crate) fn scaled_denominator_from(&self, z: Complex64, eps: Complex64) -> Complex64 {
        let l = self.config.thickness;
        let eta = csqrt(eps);
        let x = z * eta * l;
        let (c, s) = scaled_cos_sin(x);
        // sin(x)/η = ζL·sin(x)/x, finite at ε = 0.
        let sinc = if abs(x) < 1e-3 {
            let x2 = x * x;
            (ONE - x2 / 6.0 + x2 * x2 / 120.0) * libm::exp(-x.im.abs())
        } else {
            s / x
        };
        2.0 * c - I * (eta * s + z * l * sinc)
    }
}

pub fn transmission(slab: &SlabConfig, z: Complex64) -> Result<Complex64> {
    Slab::new(slab)?.transmission(z)
}

pub fn reflection(slab: &SlabConfig, omega: f64) -> Result<Complex64> {
    Slab::new(slab)?.reflection(Complex64::new(omega, 0.0))
}

/// One real-frequency sample of a spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub omega: f64,
    pub amplitudes: core::result::Result<Amplitudes, Error>,
}

pub fn sample(slab: &Slab<'_>, omega: f64, formula: Formula) -> Sample {
    Sample { omega, amplitudes: slab.amplitudes(Complex64::new(omega, 0.0), formula) }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralResponse {
    pub grid: FrequencyGrid,
    pub eps: Vec<Complex64>,
    pub eta: Vec<Complex64>,
    pub tau: Vec<Complex64>,
    pub rho: Vec<Complex64>,
    pub power: Vec<f64>,
    /// Unwrapped phase of `τ`.
    pub phase: Vec<f64>,
    pub delay: Vec<f64>,
    /// Per-sample failures; the sample's values are NaN.
    pub errors: Vec<(usize, Error)>,
    /// Samples whose continuity path for `η` crossed a branch point.
    pub crossed_cut: Vec<usize>,
    /// Samples where the phase step from the previous one exceeded π/2.
    pub unwrap_warnings: Vec<usize>,
}

/// Assemble a response from per-frequency samples taken on `grid`, in order.
pub fn assemble(grid: FrequencyGrid, samples: Vec<Sample>) -> SpectralResponse {
    let n = grid.count;
    let nan = Complex64::new(f64::NAN, f64::NAN);
    let mut r = SpectralResponse {
        grid,
        eps: Vec::with_capacity(n),
        eta: Vec::with_capacity(n),
        tau: Vec::with_capacity(n),
        rho: Vec::with_capacity(n),
        power: Vec::with_capacity(n),
        phase: Vec::with_capacity(n),
        delay: Vec::new(),
        errors: Vec::new(),
        crossed_cut: Vec::new(),
        unwrap_warnings: Vec::new(),
    };
    for (k, s) in samples.into_iter().enumerate() {
        match s.amplitudes {
            Ok(a) => {
                if a.crossed_cut {
                    r.crossed_cut.push(k);
                }
                r.eps.push(a.eps);
                r.eta.push(a.eta);
                r.tau.push(a.tau);
                r.rho.push(a.rho);
                r.power.push(a.tau.norm_sqr());
            }
            Err(e) => {
                r.errors.push((k, e));
                for v in [&mut r.eps, &mut r.eta, &mut r.tau, &mut r.rho] {
                    v.push(nan);
                }
                r.power.push(f64::NAN);
            }
        }
    }
    let (phase, warnings) = unwrap_phase(&r.tau);
    r.phase = phase;
    r.unwrap_warnings = warnings;
    r.delay = differentiate(&r.phase, grid.spacing);
    r
}

pub fn evaluate_spectrum(slab: &SlabConfig, grid: FrequencyGrid) -> Result<SpectralResponse> {
    evaluate_spectrum_with(slab, grid, Formula::FieldMatching)
}

pub fn evaluate_spectrum_with(
    slab: &SlabConfig,
    grid: FrequencyGrid,
    formula: Formula,
) -> Result<SpectralResponse> {
    let s = Slab::new(slab)?;
    let samples = grid.iter().map(|w| sample(&s, w, formula)).collect();
    Ok(assemble(grid, samples))
}

/// Cumulative unwrapping from the first finite sample.
fn unwrap_phase(tau: &[Complex64]) -> (Vec<f64>, Vec<usize>) {
    let mut out = Vec::with_capacity(tau.len());
    let mut warn = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for (k, t) in tau.iter().enumerate() {
        if !(t.re.is_finite() && t.im.is_finite()) {
            out.push(f64::NAN);
            continue;
        }
        let a = arg(*t);
        let theta = match prev {
            None => a,
            Some((raw, unwrapped)) => {
                let step = wrap_angle(a - raw);
                if step.abs() >= PI / 2.0 {
                    warn.push(k);
                }
                unwrapped + step
            }
        };
        prev = Some((a, theta));
        out.push(theta);
    }
    (out, warn)
}

/// `dθ/dω`: five-point central stencil, three-point near the ends.
///
/// At the low end the phase is continued as an odd function when `θ(0) = 0`.
fn differentiate(theta: &[f64], h: f64) -> Vec<f64> {
    let n = theta.len();
    let odd = theta[0] == 0.0;
    let at = |j: isize| -> Option<f64> {
        if j >= 0 {
            theta.get(j as usize).copied()
        } else if odd {
            theta.get((-j) as usize).map(|v| -v)
        } else {
            None
        }
    };
    (0..n as isize)
        .map(|k| {
            if let (Some(m2), Some(m1), Some(p1), Some(p2)) = (at(k - 2), at(k - 1), at(k + 1), at(k + 2)) {
                (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h)
            } else if let (Some(m1), Some(p1)) = (at(k - 1), at(k + 1)) {
                (p1 - m1) / (2.0 * h)
            } else if let (Some(p1), Some(p2)) = (at(k + 1), at(k + 2)) {
                (-3.0 * theta[k as usize] + 4.0 * p1 - p2) / (2.0 * h)
            } else if let (Some(m1), Some(m2)) = (at(k - 1), at(k - 2)) {
                (3.0 * theta[k as usize] - 4.0 * m1 + m2) / (2.0 * h)
            } else {
                f64::NAN
            }
        })
        .collect()
}

/// `t_delay(ω)` interpolated linearly between samples.
pub fn group_delay(response: &SpectralResponse, omega: f64) -> Result<f64> {
    let g = response.grid;
    if !(omega > 0.0 && omega < g.omega_max()) {
        return Err(Error::Boundary { omega });
    }
    let pos = omega / g.spacing;
    let k = (libm::floor(pos) as usize).min(g.count - 2);
    let s = pos - k as f64;
    Ok(response.delay[k] * (1.0 - s) + response.delay[k + 1] * s)
}
