//! Dielectric models `ε(ζ)`, the dispersion relation and the oscillator-strength sum rule.

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::grid::FrequencyGrid;
use crate::math::{abs, PI};
use crate::{Error, Result};

/// One Lorentz line. A negative `strength` describes an inverted population.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Resonance {
    pub strength: f64,
    pub omega0: f64,
    pub gamma: f64,
}

impl Resonance {
    pub fn new(strength: f64, omega0: f64, gamma: f64) -> Self {
        Self { strength, omega0, gamma }
    }
}

/// Real-axis samples of `ε`, `ω ≥ 0` and strictly increasing.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Table {
    pub omega: Vec<f64>,
    pub eps: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum DielectricModel {
    Vacuum,
    /// Frequency-independent, real, nonzero `ε`. Lossless by definition.
    Constant { eps: f64 },
    /// `ε = 1 + Σ f_j ω_p² / (Ω_j² − 2iζγ_j − ζ²)` with one shared `ω_p`.
    OscillatorSet { plasma: f64, resonances: Vec<Resonance> },
    Tabulated(Table),
}

impl DielectricModel {
    pub fn lorentz(strength: f64, plasma: f64, omega0: f64, gamma: f64) -> Self {
        DielectricModel::OscillatorSet {
            plasma,
            resonances: alloc::vec![Resonance::new(strength, omega0, gamma)],
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            DielectricModel::Vacuum => Ok(()),
            DielectricModel::Constant { eps } => {
                if eps.is_finite() && *eps != 0.0 {
                    Ok(())
                } else {
                    Err(Error::invalid("constant ε must be finite and nonzero"))
                }
            }
            DielectricModel::OscillatorSet { plasma, resonances } => {
                if !resonances.is_empty() && !(*plasma > 0.0 && plasma.is_finite()) {
                    return Err(Error::invalid("ω_p must be positive when resonances exist"));
                }
                for r in resonances {
                    if !(r.gamma >= 0.0 && r.gamma.is_finite()) {
                        return Err(Error::invalid("γ must be finite and ≥ 0"));
                    }
                    if !(r.omega0 >= 0.0 && r.omega0.is_finite() && r.strength.is_finite()) {
                        return Err(Error::invalid("Ω must be finite and ≥ 0, f finite"));
                    }
                }
                Ok(())
            }
            DielectricModel::Tabulated(t) => {
                if t.omega.len() < 2 || t.omega.len() != t.eps.len() {
                    return Err(Error::invalid("table needs ≥ 2 rows of matching length"));
                }
                if t.omega[0] < 0.0 || t.omega.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::invalid("table frequencies must be ≥ 0 and strictly increasing"));
                }
                if t.eps.iter().any(|e| !(e.re.is_finite() && e.im.is_finite())) {
                    return Err(Error::invalid("table ε values must be finite"));
                }
                Ok(())
            }
        }
    }

    /// `max(Ω_j, ω_p)`, the frequency scale of the model. Zero for non-dispersive models.
    pub fn top_frequency(&self) -> f64 {
        match self {
            DielectricModel::OscillatorSet { plasma, resonances } => resonances
                .iter()
                .fold(if resonances.is_empty() { 0.0 } else { *plasma }, |m, r| m.max(r.omega0)),
            DielectricModel::Tabulated(t) => *t.omega.last().unwrap_or(&0.0),
            _ => 0.0,
        }
    }

    /// Smallest damping rate among the resonances, if any.
    pub fn min_gamma(&self) -> Option<f64> {
        match self {
            DielectricModel::OscillatorSet { resonances, .. } => {
                resonances.iter().map(|r| r.gamma).reduce(f64::min)
            }
            _ => None,
        }
    }

    /// `Σ f_j ω_p²`, the value the sum rule must return.
    pub fn total_strength(&self) -> f64 {
        match self {
            DielectricModel::OscillatorSet { plasma, resonances } => {
                resonances.iter().map(|r| r.strength * plasma * plasma).sum()
            }
            _ => 0.0,
        }
    }

    pub fn is_vacuum(&self) -> bool {
        match self {
            DielectricModel::Vacuum => true,
            DielectricModel::Constant { eps } => *eps == 1.0,
            DielectricModel::OscillatorSet { resonances, .. } => {
                resonances.iter().all(|r| r.strength == 0.0)
            }
            DielectricModel::Tabulated(_) => false,
        }
    }

    /// Coefficients `(a, b)` of `ω·Im ε ≈ a/ω² + b/ω⁴` at large real `ω`.
    pub fn tail_coefficients(&self) -> (f64, f64) {
        match self {
            DielectricModel::OscillatorSet { plasma, resonances } => {
                resonances.iter().fold((0.0, 0.0), |(a, b), r| {
                    let s = r.strength * plasma * plasma * 2.0 * r.gamma;
                    let o2 = r.omega0 * r.omega0;
                    (a + s, b + s * (2.0 * o2 - 4.0 * r.gamma * r.gamma))
                })
            }
            _ => (0.0, 0.0),
        }
    }
}

fn oscillator_eps(plasma: f64, resonances: &[Resonance], z: Complex64) -> Result<Complex64> {
    let mut eps = Complex64::new(1.0, 0.0);
    for r in resonances {
        let o2 = r.omega0 * r.omega0;
        let d = Complex64::new(o2, 0.0) - Complex64::new(0.0, 2.0 * r.gamma) * z - z * z;
        let az = abs(z);
        let scale = o2 + az * az + 2.0 * r.gamma * az;
        if abs(d) <= 4.0 * f64::EPSILON * scale {
            return Err(Error::Pole { re: z.re, im: z.im });
        }
        eps += r.strength * plasma * plasma / d;
    }
    Ok(eps)
}

/// `ε` and `dε/dζ` for an oscillator set. Used for Newton polishing.
pub(crate) fn oscillator_eps_derivative(
    plasma: f64,
    resonances: &[Resonance],
    z: Complex64,
) -> (Complex64, Complex64) {
    let mut eps = Complex64::new(1.0, 0.0);
    let mut deps = Complex64::new(0.0, 0.0);
    for r in resonances {
        let c = r.strength * plasma * plasma;
        let d = Complex64::new(r.omega0 * r.omega0, 0.0) - Complex64::new(0.0, 2.0 * r.gamma) * z - z * z;
        eps += c / d;
        deps += c * (Complex64::new(0.0, 2.0 * r.gamma) + 2.0 * z) / (d * d);
    }
    (eps, deps)
}

fn table_eps(t: &Table, z: Complex64) -> Result<Complex64> {
    let lo = t.omega[0];
    let hi = *t.omega.last().unwrap();
    let w = z.re.abs();
    if z.im != 0.0 || w < lo || w > hi {
        return Err(Error::OutOfRange { re: z.re, im: z.im, lo, hi });
    }
    let k = t.omega.partition_point(|&x| x <= w).clamp(1, t.omega.len() - 1);
    let (w0, w1) = (t.omega[k - 1], t.omega[k]);
    let s = (w - w0) / (w1 - w0);
    let e = t.eps[k - 1] * (1.0 - s) + t.eps[k] * s;
    Ok(if z.re < 0.0 { e.conj() } else { e })
}

/// `ε(ζ)` at complex frequency.
///
/// For `Re ζ < 0` the value is built as `conj ε(−conj ζ)`, so the real-axis
/// identity `ε(−ω) = conj ε(ω)` holds bit for bit.
pub fn eval_epsilon(model: &DielectricModel, z: Complex64) -> Result<Complex64> {
    match model {
        DielectricModel::Vacuum => Ok(Complex64::new(1.0, 0.0)),
        DielectricModel::Constant { eps } => Ok(Complex64::new(*eps, 0.0)),
        DielectricModel::OscillatorSet { plasma, resonances } => {
            if z.re < 0.0 {
                Ok(oscillator_eps(*plasma, resonances, -z.conj())?.conj())
            } else {
                oscillator_eps(*plasma, resonances, z)
            }
        }
        DielectricModel::Tabulated(t) => table_eps(t, z),
    }
}

/// `ω·Im ε(ω + i0⁺)` on the real axis.
///
/// Oscillator sets use the form `2γω²/((Ω²−ω²)² + 4γ²ω²)`, which stays finite
/// at `Ω = 0` and treats a lossless line as contributing nothing off its pole.
pub fn omega_im_eps(model: &DielectricModel, omega: f64) -> Result<f64> {
    match model {
        DielectricModel::OscillatorSet { plasma, resonances } => {
            let w2 = omega * omega;
            Ok(resonances
                .iter()
                .map(|r| {
                    if r.gamma == 0.0 {
                        return 0.0;
                    }
                    let o2 = r.omega0 * r.omega0;
                    let den = if o2 == 0.0 {
                        w2 + 4.0 * r.gamma * r.gamma
                    } else {
                        let d = o2 - w2;
                        (d * d + 4.0 * r.gamma * r.gamma * w2) / w2
                    };
                    if den == 0.0 {
                        return 0.0;
                    }
                    r.strength * plasma * plasma * 2.0 * r.gamma / den
                })
                .sum())
        }
        _ => Ok(omega * eval_epsilon(model, Complex64::new(omega, 0.0))?.im),
    }
}

/// Sampled `g(ω) = ω·Im ε(ω)` on a grid, with an asymptotic tail `a/ω² + b/ω⁴`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImagSpectrum {
    pub grid: FrequencyGrid,
    pub values: Vec<f64>,
    pub tail: (f64, f64),
    /// Allowed ratio of the unmodelled tail to the whole integral.
    pub tail_tol: f64,
}

impl ImagSpectrum {
    pub const DEFAULT_TAIL_TOL: f64 = 1e-4;

    /// Sample a model; rational models get their analytic tail.
    pub fn from_model(model: &DielectricModel, grid: FrequencyGrid) -> Result<Self> {
        model.validate()?;
        let values = grid.iter().map(|w| omega_im_eps(model, w)).collect::<Result<Vec<_>>>()?;
        Ok(Self { grid, values, tail: model.tail_coefficients(), tail_tol: Self::DEFAULT_TAIL_TOL })
    }

    /// Raw samples with no tail model.
    pub fn from_samples(grid: FrequencyGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.count {
            return Err(Error::invalid("sample count does not match the grid"));
        }
        Ok(Self { grid, values, tail: (0.0, 0.0), tail_tol: Self::DEFAULT_TAIL_TOL })
    }

    /// `g` at signed node index, using evenness for negative indices.
    #[inline]
    fn at(&self, j: isize) -> f64 {
        self.values[j.unsigned_abs()]
    }

    fn trapezoid(&self) -> f64 {
        let v = &self.values;
        let inner: f64 = v[1..v.len() - 1].iter().sum();
        self.grid.spacing * (inner + 0.5 * (v[0] + v[v.len() - 1]))
    }

    /// Tail-dominance guard shared by the sum rule and the reconstruction.
    fn check_tail(&self, total: f64) -> Result<()> {
        let w = self.grid.omega_max();
        let g = *self.values.last().unwrap();
        let (a, b) = self.tail;
        let w2 = w * w;
        let remainder = w * (g - a / w2 - b / (w2 * w2)).abs();
        if remainder > 0.0 && remainder > self.tail_tol * total.abs() {
            return Err(Error::TailDominance { remainder, total });
        }
        Ok(())
    }

    /// `∫_W^∞ (a/ω² + b/ω⁴)/(ω² − ζ²) dω`.
    fn tail_integral(&self, z: Complex64) -> Complex64 {
        let (a, b) = self.tail;
        if a == 0.0 && b == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let w = self.grid.omega_max();
        let r = z / w;
        if abs(r) <= 0.5 {
            let r2 = r * r;
            let mut p = Complex64::new(1.0, 0.0);
            let mut sum = Complex64::new(0.0, 0.0);
            for k in 0..60 {
                let kf = k as f64;
                let term = p * (a / ((2.0 * kf + 3.0) * w * w * w) + b / ((2.0 * kf + 5.0) * (w * w * w * w * w)));
                sum += term;
                if abs(term) <= 1e-18 * abs(sum) {
                    break;
                }
                p *= r2;
            }
            sum
        } else {
            let z2 = z * z;
            let j0 = r.atanh() / z;
            let j2 = (j0 - 1.0 / w) / z2;
            let j4 = (j2 - 1.0 / (3.0 * w * w * w)) / z2;
            a * j2 + b * j4
        }
    }
}

/// `(2/π) ∫₀^∞ ω·Im ε(ω) dω` by trapezoid plus the analytic tail.
pub fn sum_rule(model: &DielectricModel, grid: FrequencyGrid) -> Result<f64> {
    let spec = ImagSpectrum::from_model(model, grid)?;
    sum_rule_from(&spec)
}

pub fn sum_rule_from(spec: &ImagSpectrum) -> Result<f64> {
    let body = spec.trapezoid();
    spec.check_tail(body)?;
    let w = spec.grid.omega_max();
    let (a, b) = spec.tail;
    Ok(2.0 / PI * (body + a / w + b / (3.0 * w * w * w)))
}

/// Rebuild `ε(ζ)` from `ω·Im ε` through the dispersion relation.
///
/// `Im ζ > 0` uses a plain trapezoid and needs `Im ζ ≥ 4Δω`. Real `ζ` must
/// sit on a grid node other than the last; the principal value is taken by
/// pairing samples symmetrically about the node.
pub fn kk_reconstruct(spec: &ImagSpectrum, z: Complex64) -> Result<Complex64> {
    let dw = spec.grid.spacing;
    let n = spec.grid.count;
    let total = spec.trapezoid();
    spec.check_tail(total)?;
    let singular = Err(Error::Singular { re: z.re, im: z.im });

    if z.im < 0.0 {
        return Err(Error::OutOfRange { re: z.re, im: z.im, lo: 0.0, hi: f64::INFINITY });
    }
    if z.im > 0.0 {
        if z.im < 4.0 * dw {
            return singular;
        }
        let z2 = z * z;
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, &g) in spec.values.iter().enumerate() {
            let w = spec.grid.omega(k);
            let wt = if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
            acc += wt * g / (w * w - z2);
        }
        return Ok(1.0 + 2.0 / PI * (acc * dw + spec.tail_integral(z)));
    }

    let ws = z.re.abs();
    let pos = ws / dw;
    let s = libm::round(pos) as usize;
    if (pos - s as f64).abs() > 1e-6 || s >= n - 1 {
        return singular;
    }
    if s == 0 {
        // g/ω² at the origin by even quadratic extrapolation.
        let h = |k: usize| spec.values[k] / (spec.grid.omega(k) * spec.grid.omega(k));
        let h0 = (4.0 * h(1) - h(2)) / 3.0;
        let mut acc = 0.5 * h0 + 0.5 * h(n - 1);
        for k in 1..n - 1 {
            acc += h(k);
        }
        let re = 1.0 + 2.0 / PI * (acc * dw + spec.tail_integral(Complex64::new(0.0, 0.0)).re);
        return Ok(Complex64::new(re, 0.0));
    }

    let si = s as isize;
    let k_max = (n - 1 - s) as isize;
    // Symmetric pairs: trapezoid of [g(ω_s+u) − g(ω_s−u)]/u on [0, KΔω].
    let deriv = if k_max >= 2 {
        (-spec.at(si + 2) + 8.0 * spec.at(si + 1) - 8.0 * spec.at(si - 1) + spec.at(si - 2)) / 12.0
    } else {
        0.5 * (spec.at(si + 1) - spec.at(si - 1))
    };
    let mut pv = deriv;
    for k in 1..=k_max {
        let pair = (spec.at(si + k) - spec.at(si - k)) / k as f64;
        pv += if k == k_max { 0.5 * pair } else { pair };
    }
    // Remaining lower stretch [−W, ω_s − KΔω], regular.
    let lo = -((n - 1) as isize);
    let hi = si - k_max;
    if hi > lo {
        let mut acc = 0.0;
        for j in lo..=hi {
            let wt = if j == lo || j == hi { 0.5 } else { 1.0 };
            acc += wt * spec.at(j) / ((j - si) as f64);
        }
        pv += acc;
    }
    let tail = spec.tail_integral(Complex64::new(ws, 0.0));
    let re = 1.0 + pv / (PI * ws) + 2.0 / PI * tail.re;
    let im = spec.values[s] / ws;
    Ok(if z.re < 0.0 { Complex64::new(re, -im) } else { Complex64::new(re, im) })
}

/// Worst relative mismatch between the reconstruction and the model on the real grid.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KkCheck {
    pub max_rel_error: f64,
    pub worst_omega: f64,
    /// Reconstructed `ε` at every node but the last.
    pub reconstructed: Vec<Complex64>,
}

pub fn kk_round_trip(model: &DielectricModel, grid: FrequencyGrid) -> Result<KkCheck> {
    let spec = ImagSpectrum::from_model(model, grid)?;
    let mut out = KkCheck { max_rel_error: 0.0, worst_omega: 0.0, reconstructed: Vec::with_capacity(grid.count - 1) };
    for n in 0..grid.count - 1 {
        let w = grid.omega(n);
        let z = Complex64::new(w, 0.0);
        let kk = kk_reconstruct(&spec, z)?;
        let e = eval_epsilon(model, z)?;
        let err = abs(kk - e) / abs(e);
        if err > out.max_rel_error {
            out.max_rel_error = err;
            out.worst_omega = w;
        }
        out.reconstructed.push(kk);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Passivity {
    pub passive: bool,
    /// Most negative `ω·Im ε` found, or the smallest value when none is negative.
    pub worst_value: f64,
    pub worst_omega: f64,
}

/// `ω·Im ε ≥ −tol` at every grid frequency, with `tol = 1e-12·ω_p²`.
pub fn passivity_check(model: &DielectricModel, grid: FrequencyGrid) -> Passivity {
    let tol = match model {
        DielectricModel::OscillatorSet { plasma, .. } => 1e-12 * plasma * plasma,
        _ => 1e-12,
    };
    let mut worst = Passivity { passive: true, worst_value: f64::INFINITY, worst_omega: 0.0 };
    for w in grid.iter() {
        // Points the model cannot evaluate (outside a table) carry no evidence of gain.
        let Ok(g) = omega_im_eps(model, w) else { continue };
        if g < worst.worst_value {
            worst.worst_value = g;
            worst.worst_omega = w;
        }
    }
    if !worst.worst_value.is_finite() {
        worst.worst_value = 0.0;
    }
    worst.passive = worst.worst_value >= -tol;
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn lorentz() -> DielectricModel {
        DielectricModel::lorentz(1.0, 1.0, 2.0, 0.1)
    }

    fn inverted() -> DielectricModel {
        DielectricModel::lorentz(-1.0, 2.0, 1.0, 0.1)
    }

    #[test]
    fn vacuum_is_one() {
        assert_eq!(eval_epsilon(&DielectricModel::Vacuum, c(3.0, 2.0)).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn static_values() {
        let m = DielectricModel::lorentz(1.0, 1.0, 2.0, 0.0);
        assert_relative_eq!(eval_epsilon(&m, c(0.0, 0.0)).unwrap().re, 1.25, epsilon = 1e-15);
        assert_relative_eq!(eval_epsilon(&inverted(), c(0.0, 0.0)).unwrap().re, -3.0, epsilon = 1e-15);
    }

    #[test]
    fn pole_and_range_errors() {
        let m = DielectricModel::lorentz(1.0, 1.0, 2.0, 0.0);
        assert!(matches!(eval_epsilon(&m, c(2.0, 0.0)), Err(Error::Pole { .. })));
        let t = DielectricModel::Tabulated(Table {
            omega: alloc::vec![0.0, 1.0, 2.0],
            eps: alloc::vec![c(2.0, 0.0), c(2.0, 0.5), c(1.5, 0.2)],
        });
        assert!(matches!(eval_epsilon(&t, c(3.0, 0.0)), Err(Error::OutOfRange { .. })));
        assert!(matches!(eval_epsilon(&t, c(1.0, 0.1)), Err(Error::OutOfRange { .. })));
        assert_eq!(eval_epsilon(&t, c(1.5, 0.0)).unwrap(), c(1.75, 0.35));
        assert_eq!(eval_epsilon(&t, c(-1.5, 0.0)).unwrap(), c(1.75, -0.35));
    }

    #[test]
    fn validation() {
        assert!(DielectricModel::lorentz(1.0, 1.0, 2.0, -0.1).validate().is_err());
        assert!(DielectricModel::lorentz(1.0, 0.0, 2.0, 0.1).validate().is_err());
        let bad = DielectricModel::Tabulated(Table {
            omega: alloc::vec![0.0, 0.0],
            eps: alloc::vec![c(1.0, 0.0); 2],
        });
        assert!(bad.validate().is_err());
    }

    #[test]
    fn high_frequency_limit() {
        for m in [lorentz(), inverted(), DielectricModel::lorentz(0.5, 3.0, 7.0, 1.0)] {
            let top = m.top_frequency();
            let mut prev = f64::INFINITY;
            for k in 0..6 {
                let r = top * 10f64.powi(k);
                let d = abs(eval_epsilon(&m, c(0.0, 10.0 * r)).unwrap() - 1.0);
                assert!(d < prev);
                prev = d;
            }
            assert!(abs(eval_epsilon(&m, c(0.0, 1e4 * top)).unwrap() - 1.0) < 1e-6);
        }
    }

    #[test]
    fn poles_in_lower_half_plane() {
        for (om, g) in [(2.0f64, 0.1f64), (1.0, 0.1), (0.5, 2.0)] {
            let root = crate::math::csqrt(c(om * om - g * g, 0.0));
            for p in [c(0.0, -g) + root, c(0.0, -g) - root] {
                assert!(p.im < 0.0);
            }
        }
    }

    #[test]
    fn sum_rule_values() {
        let grid = FrequencyGrid::up_to(40.0, 4001).unwrap();
        assert_eq!(sum_rule(&DielectricModel::Vacuum, grid).unwrap(), 0.0);
        assert_relative_eq!(sum_rule(&lorentz(), grid).unwrap(), 1.0, max_relative = 1e-4);
        assert_relative_eq!(sum_rule(&inverted(), grid).unwrap(), -4.0, max_relative = 1e-4);
    }

    #[test]
    fn sum_rule_additive() {
        let grid = FrequencyGrid::up_to(60.0, 6001).unwrap();
        let a = Resonance::new(0.6, 1.5, 0.2);
        let b = Resonance::new(0.4, 3.0, 0.3);
        let both = DielectricModel::OscillatorSet { plasma: 1.2, resonances: alloc::vec![a, b] };
        let sa = sum_rule(&DielectricModel::OscillatorSet { plasma: 1.2, resonances: alloc::vec![a] }, grid).unwrap();
        let sb = sum_rule(&DielectricModel::OscillatorSet { plasma: 1.2, resonances: alloc::vec![b] }, grid).unwrap();
        assert_relative_eq!(sum_rule(&both, grid).unwrap(), sa + sb, max_relative = 1e-6);
        assert_relative_eq!(sa + sb, 1.44, max_relative = 1e-4);
    }

    #[test]
    fn tail_guard_fires_on_short_tabulated_grid() {
        let grid = FrequencyGrid::up_to(2.0, 201).unwrap();
        let m = lorentz();
        let values = grid.iter().map(|w| omega_im_eps(&m, w).unwrap()).collect();
        let spec = ImagSpectrum::from_samples(grid, values).unwrap();
        assert!(matches!(sum_rule_from(&spec), Err(Error::TailDominance { .. })));
    }

    #[test]
    fn kk_vacuum() {
        let grid = FrequencyGrid::up_to(10.0, 101).unwrap();
        let spec = ImagSpectrum::from_samples(grid, alloc::vec![0.0; 101]).unwrap();
        for z in [c(0.0, 0.0), c(1.0, 0.0), c(0.3, 2.0)] {
            assert_eq!(kk_reconstruct(&spec, z).unwrap(), c(1.0, 0.0));
        }
    }

    #[test]
    fn kk_matches_closed_form() {
        let m = DielectricModel::lorentz(1.0, 1.0, 2.0, 0.2);
        let grid = FrequencyGrid::up_to(40.0, 4001).unwrap();
        let spec = ImagSpectrum::from_model(&m, grid).unwrap();
        let at1 = kk_reconstruct(&spec, c(1.0, 0.0)).unwrap();
        let want = eval_epsilon(&m, c(1.0, 0.0)).unwrap();
        assert_relative_eq!(at1.re, want.re, max_relative = 1e-3);
        let at3i = kk_reconstruct(&spec, c(0.0, 3.0)).unwrap();
        let want = eval_epsilon(&m, c(0.0, 3.0)).unwrap();
        assert!(abs(at3i - want) / abs(want) < 1e-4);
    }

    #[test]
    fn kk_guards() {
        let grid = FrequencyGrid::up_to(40.0, 401).unwrap();
        let spec = ImagSpectrum::from_model(&lorentz(), grid).unwrap();
        assert!(matches!(kk_reconstruct(&spec, c(1.05, 0.0)), Err(Error::Singular { .. })));
        assert!(matches!(kk_reconstruct(&spec, c(40.0, 0.0)), Err(Error::Singular { .. })));
        assert!(matches!(kk_reconstruct(&spec, c(1.0, 0.2)), Err(Error::Singular { .. })));
        assert!(kk_reconstruct(&spec, c(1.0, -1.0)).is_err());
    }

    #[test]
    fn passivity() {
        let grid = FrequencyGrid::up_to(40.0, 4001).unwrap();
        assert!(passivity_check(&DielectricModel::Vacuum, grid).passive);
        assert!(passivity_check(&lorentz(), grid).passive);
        let p = passivity_check(&inverted(), grid);
        assert!(!p.passive);
        assert!((p.worst_omega - 1.0).abs() < 0.05, "{}", p.worst_omega);
    }

    proptest! {
        #[test]
        fn conjugate_symmetry(f in -2.0f64..2.0, wp in 0.1f64..3.0, om in 0.0f64..5.0,
                              g in 0.0f64..1.0, w in 0.0f64..20.0, y in 0.0f64..5.0) {
            let m = DielectricModel::lorentz(f, wp, om, g);
            let z = c(w, y);
            if let Ok(e) = eval_epsilon(&m, z) {
                prop_assert_eq!(eval_epsilon(&m, -z.conj()).unwrap(), e.conj());
            }
        }

        #[test]
        fn imag_part_matches_closed_form(f in -2.0f64..2.0, wp in 0.1f64..3.0, om in 0.0f64..5.0,
                                         g in 0.01f64..1.0, w in 0.01f64..20.0) {
            let m = DielectricModel::lorentz(f, wp, om, g);
            let direct = w * eval_epsilon(&m, c(w, 0.0)).unwrap().im;
            let safe = omega_im_eps(&m, w).unwrap();
            prop_assert!((direct - safe).abs() <= 1e-12 * (1.0 + safe.abs()));
        }
    }

    #[test]
    fn kk_round_trip_passive_models() {
        let grid = FrequencyGrid::up_to(40.0, 4001).unwrap();
        for m in [
            DielectricModel::lorentz(1.0, 1.0, 2.0, 0.1),
            DielectricModel::lorentz(0.5, 2.0, 1.0, 0.3),
            DielectricModel::OscillatorSet {
                plasma: 1.0,
                resonances: alloc::vec![Resonance::new(0.6, 1.0, 0.2), Resonance::new(0.4, 3.0, 0.5)],
            },
        ] {
            let c = kk_round_trip(&m, grid).unwrap();
            assert!(c.max_rel_error < 1e-3);
        }
    }
}
