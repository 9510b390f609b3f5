//! Zeros and poles of oscillator-set dielectric functions.
//!
//! `ε = N(ζ)/Π D_j(ζ)` with `D_j = Ω_j² − 2iγ_jζ − ζ²`. Poles come straight
//! from the quadratics; zeros are the roots of `N`, closed form for one line
//! and Aberth–Ehrlich iteration otherwise.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::dielectric::{oscillator_eps_derivative, DielectricModel, Resonance};
use crate::grid::Region;
use crate::math::{abs, cos, csqrt, sin, TAU};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum BranchKind {
    ZeroOfEpsilon,
    PoleOfEpsilon,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BranchPoint {
    pub location: Complex64,
    pub kind: BranchKind,
    pub in_upper_half_plane: bool,
}

impl BranchPoint {
    fn new(location: Complex64, kind: BranchKind) -> Self {
        Self { location, kind, in_upper_half_plane: location.im > 0.0 }
    }
}

/// Ascending-coefficient polynomial product.
pub fn poly_mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Value and first derivative by Horner's rule.
pub fn poly_eval(p: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut v = Complex64::new(0.0, 0.0);
    let mut d = Complex64::new(0.0, 0.0);
    for c in p.iter().rev() {
        d = d * z + v;
        v = v * z + c;
    }
    (v, d)
}

/// All roots of a polynomial with nonzero leading coefficient.
pub fn poly_roots(p: &[Complex64]) -> Vec<Complex64> {
    let n = p.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    let lead = p[n];
    // Fujiwara-style bound for the starting circle.
    let radius = (0..n)
        .map(|k| libm::pow(abs(p[k] / lead), 1.0 / (n - k) as f64))
        .fold(0.0, f64::max)
        .max(1e-3);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let a = TAU * k as f64 / n as f64 + 0.4;
            Complex64::new(radius * cos(a), radius * sin(a))
        })
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let (v, d) = poly_eval(p, z[i]);
            if v == Complex64::new(0.0, 0.0) {
                continue;
            }
            let ratio = v / d;
            let s: Complex64 = (0..n).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
            let step = ratio / (1.0 - ratio * s);
            z[i] -= step;
            moved = moved.max(abs(step) / abs(z[i]).max(1e-300));
        }
        if moved < 1e-15 {
            break;
        }
    }
    for zi in z.iter_mut() {
        newton(p, zi);
    }
    z
}

fn newton(p: &[Complex64], z: &mut Complex64) {
    for _ in 0..4 {
        let (v, d) = poly_eval(p, *z);
        if d == Complex64::new(0.0, 0.0) {
            return;
        }
        let step = v / d;
        if !(step.re.is_finite() && step.im.is_finite()) {
            return;
        }
        *z -= step;
    }
}

/// Lines with identical `(Ω, γ)` combined and zero-strength lines removed.
fn merged(resonances: &[Resonance]) -> Vec<Resonance> {
    let mut out: Vec<Resonance> = Vec::new();
    for r in resonances {
        match out.iter_mut().find(|o| o.omega0 == r.omega0 && o.gamma == r.gamma) {
            Some(o) => o.strength += r.strength,
            None => out.push(*r),
        }
    }
    out.retain(|r| r.strength != 0.0);
    out
}

fn quad(r: &Resonance) -> [Complex64; 3] {
    [
        Complex64::new(r.omega0 * r.omega0, 0.0),
        Complex64::new(0.0, -2.0 * r.gamma),
        Complex64::new(-1.0, 0.0),
    ]
}

/// Numerator polynomial `Π D_j + Σ c_j Π_{k≠j} D_k` of `ε`.
pub fn epsilon_numerator(plasma: f64, resonances: &[Resonance]) -> Vec<Complex64> {
    let lines = merged(resonances);
    let mut num = vec![Complex64::new(1.0, 0.0)];
    for r in &lines {
        num = poly_mul(&num, &quad(r));
    }
    for (j, r) in lines.iter().enumerate() {
        let mut term = vec![Complex64::new(r.strength * plasma * plasma, 0.0)];
        for (k, o) in lines.iter().enumerate() {
            if k != j {
                term = poly_mul(&term, &quad(o));
            }
        }
        for (i, t) in term.iter().enumerate() {
            num[i] += t;
        }
    }
    num
}

/// Both roots of `ζ² + 2iγζ − s = 0`, i.e. `−iγ ± √(s − γ²)`.
fn shifted_pair(s: f64, gamma: f64) -> [Complex64; 2] {
    let r = csqrt(Complex64::new(s - gamma * gamma, 0.0));
    let c = Complex64::new(0.0, -gamma);
    [c + r, c - r]
}

/// Zeros and poles of `ε` inside `region`, sorted by real then imaginary part.
pub fn find_branch_points(model: &DielectricModel, region: &Region) -> Result<Vec<BranchPoint>> {
    let (plasma, resonances) = match model {
        DielectricModel::Vacuum | DielectricModel::Constant { .. } => return Ok(Vec::new()),
        DielectricModel::Tabulated(_) => {
            return Err(Error::Unsupported("tabulated media have no closed-form continuation"))
        }
        DielectricModel::OscillatorSet { plasma, resonances } => (*plasma, resonances),
    };
    let lines = merged(resonances);
    let mut out = Vec::new();
    for r in &lines {
        for p in shifted_pair(r.omega0 * r.omega0, r.gamma) {
            out.push(BranchPoint::new(p, BranchKind::PoleOfEpsilon));
        }
    }
    let zeros: Vec<Complex64> = match lines.as_slice() {
        [] => Vec::new(),
        [r] => shifted_pair(r.omega0 * r.omega0 + r.strength * plasma * plasma, r.gamma).to_vec(),
        _ => {
            let mut z = poly_roots(&epsilon_numerator(plasma, &lines));
            for zi in z.iter_mut() {
                polish_zero(plasma, &lines, zi);
            }
            z
        }
    };
    out.extend(zeros.into_iter().map(|z| BranchPoint::new(z, BranchKind::ZeroOfEpsilon)));
    out.retain(|b| region.contains(b.location));
    out.sort_by(|a, b| {
        a.location
            .re
            .total_cmp(&b.location.re)
            .then(a.location.im.total_cmp(&b.location.im))
    });
    Ok(out)
}

/// Newton on `ε` itself, which is better conditioned than the expanded numerator.
pub(crate) fn polish_zero(plasma: f64, lines: &[Resonance], z: &mut Complex64) {
    for _ in 0..3 {
        let (e, de) = oscillator_eps_derivative(plasma, lines, *z);
        if de == Complex64::new(0.0, 0.0) {
            return;
        }
        let step = e / de;
        if !(step.re.is_finite() && step.im.is_finite()) || abs(step) > 1e-6 * (1.0 + abs(*z)) {
            return;
        }
        *z -= step;
    }
}
