//! In-place radix-2 FFT.
//!
//! `forward` computes `X_k = Σ x_n e^{-2πi nk/N}`; `inverse` is the
//! unnormalised adjoint. Callers divide by `N` themselves.

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::math::{cos, sin, TAU};

fn bit_reverse(data: &mut [Complex64]) {
    let n = data.len();
    let bits = n.trailing_zeros();
    if bits == 0 {
        return;
    }
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if i < j {
            data.swap(i, j);
        }
    }
}

fn transform(data: &mut [Complex64], sign: f64) {
    let n = data.len();
    assert!(n.is_power_of_two(), "FFT length {n} is not a power of two");
    bit_reverse(data);
    // Twiddles evaluated directly, not by recurrence, to keep rounding at O(ε log N).
    let twiddles: Vec<Complex64> = (0..n / 2)
        .map(|k| {
            let a = sign * TAU * k as f64 / n as f64;
            Complex64::new(cos(a), sin(a))
        })
        .collect();
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let stride = n / len;
        for start in (0..n).step_by(len) {
            for k in 0..half {
                let w = twiddles[k * stride];
                let a = data[start + k];
                let b = data[start + k + half] * w;
                data[start + k] = a + b;
                data[start + k + half] = a - b;
            }
        }
        len *= 2;
    }
}

pub fn forward(data: &mut [Complex64]) {
    transform(data, -1.0);
}

pub fn inverse(data: &mut [Complex64]) {
    transform(data, 1.0);
}
