//! Scalar and complex helpers backed by `libm`.
//!
//! Everything numerical in the crate goes through these so that a `no_std`
//! build and a test build produce the same bits.

use num_complex::Complex64;

pub const PI: f64 = core::f64::consts::PI;
pub const TAU: f64 = core::f64::consts::TAU;
pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn sin(x: f64) -> f64 {
    libm::sin(x)
}

#[inline]
pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn atan2(y: f64, x: f64) -> f64 {
    libm::atan2(y, x)
}

#[inline]
pub fn hypot(x: f64, y: f64) -> f64 {
    libm::hypot(x, y)
}

#[inline]
pub fn abs(z: Complex64) -> f64 {
    hypot(z.re, z.im)
}

#[inline]
pub fn arg(z: Complex64) -> f64 {
    atan2(z.im, z.re)
}

/// Principal square root with the cut on the negative real axis.
///
/// Points on the negative real axis map to `+i·√|z|` regardless of the sign
/// of a zero imaginary part.
pub fn csqrt(z: Complex64) -> Complex64 {
    if z.im == 0.0 {
        return if z.re >= 0.0 {
            Complex64::new(sqrt(z.re), 0.0)
        } else {
            Complex64::new(0.0, sqrt(-z.re))
        };
    }
    let r = abs(z);
    // Half-angle formulas, arranged to avoid cancellation.
    if z.re >= 0.0 {
        let t = sqrt(0.5 * (r + z.re));
        Complex64::new(t, z.im / (2.0 * t))
    } else {
        let t = sqrt(0.5 * (r - z.re));
        let t = if z.im < 0.0 { -t } else { t };
        Complex64::new(z.im / (2.0 * t), t)
    }
}

pub fn cexp(z: Complex64) -> Complex64 {
    let m = exp(z.re);
    Complex64::new(m * cos(z.im), m * sin(z.im))
}

/// `(cos z, sin z)` with both multiplied by `exp(-|Im z|)`.
///
/// The common positive factor leaves phases untouched and keeps the values
/// bounded far off the real axis.
pub fn scaled_cos_sin(z: Complex64) -> (Complex64, Complex64) {
    let (a, b) = (z.re, z.im);
    let decay = exp(-2.0 * b.abs());
    let ch = 0.5 * (1.0 + decay);
    let sh = 0.5 * (1.0 - decay) * b.signum();
    let (sa, ca) = (sin(a), cos(a));
    (
        Complex64::new(ca * ch, -sa * sh),
        Complex64::new(sa * ch, ca * sh),
    )
}

/// Wrap an angle difference into `(-π, π]`.
pub fn wrap_angle(mut x: f64) -> f64 {
    while x > PI {
        x -= TAU;
    }
    while x <= -PI {
        x += TAU;
    }
    x
}

pub fn next_pow2(n: usize) -> usize {
    n.max(1).next_power_of_two()
}
