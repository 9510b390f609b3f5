use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use super::pulse::{TimeGrid, Waveform};
use crate::dielectric::DielectricModel;
use crate::fft;
use crate::math::{next_pow2, PI, TAU};
use crate::slab::{Slab, SlabConfig};
use crate::{Error, Result};

/// Minimum zero-padding factor.
pub const PADDING: usize = 4;
/// Frequency samples required across the narrowest linewidth.
pub const PER_LINEWIDTH: f64 = 16.0;
/// Nyquist frequency over the top model frequency.
pub const NYQUIST_COVER: f64 = 20.0;
const MAX_LEN: usize = 1 << 24;

/// Padded FFT layout shared by the input, the transfer samples and the output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plan {
    pub grid: TimeGrid,
    /// Padded length, a power of two.
    pub len: usize,
}

impl Plan {
    /// Smallest padded length meeting the padding and linewidth rules.
    pub fn for_model(grid: TimeGrid, model: &DielectricModel) -> Result<Self> {
        let top = model.top_frequency();
        let nyquist = PI / grid.dt;
        if top > 0.0 && nyquist < NYQUIST_COVER * top {
            return Err(Error::Resolution {
                quantity: "Δt",
                value: grid.dt,
                limit: PI / (NYQUIST_COVER * top),
            });
        }
        let mut needed = PADDING * grid.count;
        if let Some(g) = model.min_gamma() {
            let want = TAU * PER_LINEWIDTH / (g * grid.dt);
            if !(want <= MAX_LEN as f64) {
                return Err(Error::Resolution {
                    quantity: "Δω",
                    value: TAU / (MAX_LEN as f64 * grid.dt),
                    limit: g / PER_LINEWIDTH,
                });
            }
            needed = needed.max(libm::ceil(want) as usize);
        }
        Self::with_len(grid, next_pow2(needed))
    }

    pub fn with_len(grid: TimeGrid, len: usize) -> Result<Self> {
        if !len.is_power_of_two() || len < grid.count || len > MAX_LEN {
            return Err(Error::invalid("padded length must be a power of two ≥ the sample count"));
        }
        Ok(Self { grid, len })
    }

    /// `Δω = 2π/(M·Δt)`.
    pub fn spacing(&self) -> f64 {
        TAU / (self.len as f64 * self.grid.dt)
    }

    /// Nonnegative bins `0..=M/2`.
    pub fn bins(&self) -> usize {
        self.len / 2 + 1
    }

    pub fn omega(&self, k: usize) -> f64 {
        k as f64 * self.spacing()
    }
}

/// `τ(ω_k)` on the plan's nonnegative bins.
pub fn transfer(slab: &SlabConfig, plan: &Plan) -> Result<Vec<Complex64>> {
    let s = Slab::new(slab)?;
    (0..plan.bins())
        .map(|k| s.transmission(Complex64::new(plan.omega(k), 0.0)))
        .collect()
}

/// `Σ_n x_n e^{+iω_k t_n}` for `k = 0..=M/2`, times measured from the first sample.
pub fn spectrum(x: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft::forward(&mut buf);
    buf.truncate(x.len() / 2 + 1);
    buf.iter_mut().for_each(|v| *v = v.conj());
    buf
}

/// Apply the real filter `h` (nonnegative bins) to a padded real sequence.
///
/// Negative bins are filled with `conj h`; the Nyquist bin uses `Re h`, so the
/// output is real up to rounding and only its real part is kept.
pub fn filter_real(x: &[f64], h: &[Complex64]) -> Vec<f64> {
    let m = x.len();
    assert_eq!(h.len(), m / 2 + 1, "filter has the wrong number of bins");
    let xs = spectrum(x);
    let mut y = vec![Complex64::new(0.0, 0.0); m];
    for k in 0..=m / 2 {
        let hk = if k == m / 2 { Complex64::new(h[k].re, 0.0) } else { h[k] };
        y[k] = hk * xs[k];
        if k > 0 && k < m / 2 {
            y[m - k] = y[k].conj();
        }
    }
    // v_n = (1/M) Σ_k Y_k e^{−2πi nk/M}
    fft::forward(&mut y);
    y.iter().map(|v| v.re / m as f64).collect()
}

/// Propagate with precomputed transfer samples.
pub fn propagate_with(input: &Waveform, plan: &Plan, h: &[Complex64]) -> Result<Waveform> {
    let (out, fraction) = propagate_unguarded(input, plan, h)?;
    if fraction > 1e-8 {
        return Err(Error::Wraparound { fraction });
    }
    Ok(out)
}

/// As [`propagate_with`], returning the share of output energy in the last 1%
/// of the padded window instead of refusing it.
pub fn propagate_unguarded(input: &Waveform, plan: &Plan, h: &[Complex64]) -> Result<(Waveform, f64)> {
    if input.grid != plan.grid || input.samples.len() != plan.grid.count {
        return Err(Error::invalid("waveform does not match the propagation plan"));
    }
    if h.iter().all(|v| *v == Complex64::new(1.0, 0.0)) {
        return Ok((input.clone(), 0.0));
    }
    let mut x = input.samples.clone();
    x.resize(plan.len, 0.0);
    let out = filter_real(&x, h);
    let total: f64 = out.iter().map(|v| v * v).sum();
    let edge = plan.len.div_ceil(100);
    let tail: f64 = out[plan.len - edge..].iter().map(|v| v * v).sum();
    let fraction = if total > 0.0 { tail / total } else { 0.0 };
    let w = Waveform { grid: input.grid, samples: out[..input.grid.count].to_vec(), front_time: input.front_time };
    Ok((w, fraction))
}

/// `V_out = F⁻¹[τ·F V_in]` on a padded grid sized by [`Plan::for_model`].
pub fn propagate(input: &Waveform, slab: &SlabConfig) -> Result<Waveform> {
    let plan = Plan::for_model(input.grid, &slab.model)?;
    let h = transfer(slab, &plan)?;
    propagate_with(input, &plan, &h)
}

/// `max_{t < t_f − 10Δt}|V| / max|V|`, or `None` without a front.
pub fn front_leakage(output: &Waveform) -> Option<f64> {
    let front = output.front_time?;
    let guard = front - 10.0 * output.grid.dt;
    let peak = output.peak();
    if peak == 0.0 {
        return Some(0.0);
    }
    let early = output
        .times()
        .zip(&output.samples)
        .filter(|(t, _)| *t < guard)
        .fold(0.0f64, |m, (_, v)| m.max(v.abs()));
    Some(early / peak)
}
