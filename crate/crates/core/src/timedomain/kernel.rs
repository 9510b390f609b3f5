//! Response kernel `g(s)` with `1 − τ(ω) = ∫ e^{iωs} g(s) ds`.
//!
//! `1 − τ` decays only like `1/ω`, so a bare inverse transform rings. A
//! three-term causal model `A(ω) = Σ c_k (i/(ω+iβ))^k` matching the
//! high-frequency expansion of `1 − τ` is subtracted first and its exact
//! impulse response `c_k s^{k−1} e^{−βs}/(k−1)!` is added back afterwards.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use super::pulse::Waveform;
use super::propagate::{NYQUIST_COVER, PER_LINEWIDTH};
use crate::dielectric::DielectricModel;
use crate::fft;
use crate::grid::FrequencyGrid;
use crate::math::{exp, PI, TAU};
use crate::slab::{Slab, SlabConfig};
use crate::{Error, Result};

/// Causal asymptotic part of the kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Asymptote {
    pub beta: f64,
    pub c: [f64; 3],
}

impl Asymptote {
    const NONE: Asymptote = Asymptote { beta: 1.0, c: [0.0; 3] };

    /// Coefficients from `1 − τ ≈ i a₁/ω + a₂/ω² + i a₃/ω³`.
    pub fn for_slab(slab: &SlabConfig) -> Self {
        let DielectricModel::OscillatorSet { plasma, resonances } = &slab.model else {
            return Self::NONE;
        };
        if slab.is_trivial() {
            return Self::NONE;
        }
        let l = slab.thickness;
        let p2 = plasma * plasma;
        let (mut s1, mut sg, mut t) = (0.0, 0.0, 0.0);
        for r in resonances {
            let w = r.strength * p2;
            s1 += w;
            sg += w * r.gamma;
            t += w * (r.omega0 * r.omega0 - 4.0 * r.gamma * r.gamma);
        }
        let a1 = l * s1 / 2.0;
        let a2 = l * sg + a1 * a1 / 2.0;
        let a3 = l * t / 2.0 + l * s1 * s1 / 8.0 - l * l * s1 * sg / 2.0 - l * l * l * s1 * s1 * s1 / 48.0;
        let beta = slab.model.top_frequency().max(1e-3);
        let c1 = a1;
        let c2 = a1 * beta - a2;
        let c3 = -c1 * beta * beta + 2.0 * beta * c2 - a3;
        Self { beta, c: [c1, c2, c3] }
    }

    pub fn spectrum(&self, omega: f64) -> Complex64 {
        let u = Complex64::new(0.0, 1.0) / Complex64::new(omega, self.beta);
        self.c[0] * u + self.c[1] * u * u + self.c[2] * u * u * u
    }

    /// Impulse response for `s > 0`; zero for `s < 0`.
    pub fn density(&self, s: f64) -> f64 {
        if s < 0.0 {
            return 0.0;
        }
        let e = exp(-self.beta * s);
        (self.c[0] + self.c[1] * s + self.c[2] * s * s / 2.0) * e
    }

    fn derivative_at_zero(&self) -> f64 {
        -self.beta * self.c[0] + self.c[1]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelEstimate {
    pub ds: f64,
    /// Time-ordered density, `s_j = (j − origin)·Δs`.
    pub density: Vec<f64>,
    pub origin: usize,
    /// Transform-computed remainder, same layout as `density`.
    pub numeric: Vec<f64>,
    pub asymptote: Asymptote,
    /// Guard band: `M₋` counts `s < −delta`.
    pub delta: f64,
    pub negative_mass: f64,
    pub total_mass: f64,
}

impl KernelEstimate {
    pub fn time(&self, j: usize) -> f64 {
        (j as f64 - self.origin as f64) * self.ds
    }

    /// `M₋/M`, zero for an empty kernel.
    pub fn ratio(&self) -> f64 {
        if self.total_mass == 0.0 {
            0.0
        } else {
            self.negative_mass / self.total_mass
        }
    }
}

/// Inverse transform of `1 − τ` sampled on `grid`, which needs `2^k + 1` points.
pub fn extract_kernel(slab: &SlabConfig, grid: FrequencyGrid) -> Result<KernelEstimate> {
    slab.validate()?;
    match slab.model {
        DielectricModel::Constant { .. } if !slab.is_trivial() => {
            return Err(Error::Unsupported("a constant-ε slab has a delta-train kernel"))
        }
        DielectricModel::Tabulated(_) => {
            return Err(Error::Unsupported("tabulated media cannot be evaluated off their table"))
        }
        _ => {}
    }
    let half = grid.count - 1;
    if !half.is_power_of_two() || half < 4 {
        return Err(Error::invalid("kernel grid needs 2^k + 1 samples"));
    }
    let top = slab.model.top_frequency();
    if grid.omega_max() < NYQUIST_COVER * top {
        return Err(Error::Resolution {
            quantity: "1/ω_max",
            value: 1.0 / grid.omega_max(),
            limit: 1.0 / (NYQUIST_COVER * top),
        });
    }
    if let Some(g) = slab.model.min_gamma() {
        if grid.spacing > g / PER_LINEWIDTH {
            return Err(Error::Resolution { quantity: "Δω", value: grid.spacing, limit: g / PER_LINEWIDTH });
        }
    }
    let m = 2 * half;
    let ds = PI / grid.omega_max();
    let delta = 5.0 * ds;
    let asym = Asymptote::for_slab(slab);
    if slab.is_trivial() {
        return Ok(KernelEstimate {
            ds,
            density: vec![0.0; m],
            origin: m / 2 - 1,
            numeric: vec![0.0; m],
            asymptote: asym,
            delta,
            negative_mass: 0.0,
            total_mass: 0.0,
        });
    }

    let s = Slab::new(slab)?;
    let one = Complex64::new(1.0, 0.0);
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    for k in 0..=half {
        let w = grid.omega(k);
        let r = one - s.transmission(Complex64::new(w, 0.0))? - asym.spectrum(w);
        if k == half {
            buf[k] = Complex64::new(r.re, 0.0);
        } else {
            buf[k] = r;
            if k > 0 {
                buf[m - k] = r.conj();
            }
        }
    }
    // g_n = (Δω/2π) Σ_k R_k e^{−iω_k s_n}
    fft::forward(&mut buf);
    let scale = grid.spacing / TAU;
    let peak_re = buf.iter().fold(0.0f64, |a, v| a.max(v.re.abs()));
    let peak_im = buf.iter().fold(0.0f64, |a, v| a.max(v.im.abs()));
    if peak_im > 1e-9 * peak_re.max(f64::MIN_POSITIVE) {
        return Err(Error::ImaginaryResidue { ratio: peak_im / peak_re });
    }

    // Reorder: indices above M/2 hold negative times.
    let origin = m / 2 - 1;
    let mut numeric = vec![0.0; m];
    for (n, v) in buf.iter().enumerate() {
        let j = if n > m / 2 { n - m / 2 - 1 } else { n + origin };
        numeric[j] = v.re * scale;
    }
    let density: Vec<f64> = numeric
        .iter()
        .enumerate()
        .map(|(j, r)| {
            let t = (j as f64 - origin as f64) * ds;
            let a = if j == origin { 0.5 * asym.c[0] } else { asym.density(t) };
            r + a
        })
        .collect();

    let total_sq: f64 = density.iter().map(|g| g * g).sum();
    let edge_from = 0.49 * half as f64 * ds;
    let edge_sq: f64 = density
        .iter()
        .enumerate()
        .filter(|(j, _)| ((*j as f64 - origin as f64) * ds).abs() >= edge_from)
        .map(|(_, g)| g * g)
        .sum();
    if total_sq > 0.0 && edge_sq > 1e-8 * total_sq {
        return Err(Error::Wraparound { fraction: edge_sq / total_sq });
    }

    let mut neg = 0.0;
    let mut tot = 0.0;
    for (j, g) in density.iter().enumerate() {
        let a = g.abs() * ds;
        tot += a;
        if (j as f64 - origin as f64) * ds < -delta {
            neg += a;
        }
    }
    Ok(KernelEstimate {
        ds,
        density,
        origin,
        numeric,
        asymptote: asym,
        delta,
        negative_mass: neg,
        total_mass: tot,
    })
}

/// `V_out(t) = V_in(t) − ∫ V_in(t−s) g(s) ds` by direct summation.
///
/// The transform remainder is summed as a Riemann sum. The analytic part is
/// integrated by trapezoid with its Euler–Maclaurin end correction at `s = 0`.
pub fn convolve(kernel: &KernelEstimate, input: &Waveform) -> Result<Waveform> {
    let dt = input.grid.dt;
    if (kernel.ds - dt).abs() > 1e-12 * dt {
        return Err(Error::invalid("kernel spacing must equal the waveform spacing"));
    }
    let v = &input.samples;
    let n = v.len();
    let at = |i: isize| if i >= 0 && (i as usize) < n { v[i as usize] } else { 0.0 };
    let o = kernel.origin as isize;
    let asym = kernel.asymptote;
    let analytic: Vec<f64> = (0..n).map(|j| asym.density(j as f64 * dt)).collect();
    let a0 = asym.c[0];
    let da0 = asym.derivative_at_zero();
    let len = kernel.numeric.len() as isize;
    let out = (0..n as isize)
        .map(|i| {
            // Kernel index j + o with 0 ≤ i − j < n.
            let lo = (i - n as isize + 1).max(-o);
            let hi = i.min(len - 1 - o);
            let mut acc = 0.0;
            for j in lo..=hi {
                acc += kernel.numeric[(j + o) as usize] * v[(i - j) as usize];
            }
            let mut an = 0.5 * a0 * at(i);
            for j in 1..=i as usize {
                an += analytic[j] * v[i as usize - j];
            }
            // ∫₀^∞ f ≈ trapezoid + Δ²/12·f'(0), f(s) = a(s)V(t−s).
            let dv = (3.0 * at(i) - 4.0 * at(i - 1) + at(i - 2)) / (2.0 * dt);
            let corr = dt / 12.0 * (da0 * at(i) - a0 * dv);
            at(i) - dt * (acc + an + corr)
        })
        .collect();
    Ok(Waveform { grid: input.grid, samples: out, front_time: input.front_time })
}
