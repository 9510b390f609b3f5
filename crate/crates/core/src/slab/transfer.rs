//! 2×2 characteristic-matrix products for layered media at normal incidence.
//!
//! Independent of the closed form in the parent module and used to check it.

use num_complex::Complex64;

pub type Matrix = [[Complex64; 2]; 2];

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Characteristic matrix of one layer of index `n` and thickness `d`.
pub fn layer(n: Complex64, d: f64, omega: Complex64) -> Matrix {
    let delta = n * omega * d;
    let (c, s) = (delta.cos(), delta.sin());
    [[c, I * s / n], [I * n * s, c]]
}

pub fn mul(a: &Matrix, b: &Matrix) -> Matrix {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// Product over `(index, thickness)` layers, first layer met by the incident wave first.
pub fn stack(layers: &[(Complex64, f64)], omega: Complex64) -> Matrix {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    layers
        .iter()
        .fold([[one, zero], [zero, one]], |acc, &(n, d)| mul(&acc, &layer(n, d, omega)))
}

/// `(t, r)` of a stack in vacuum, with `t` referenced to the stack's faces.
///
/// Every layer matrix is unimodular, so `det = 1` is used exactly; forming
/// `ad − bc` numerically cancels catastrophically in thick lossy layers.
pub fn amplitudes(m: &Matrix) -> (Complex64, Complex64) {
    let [[a, b], [c, d]] = *m;
    let den = a + d - b - c;
    (2.0 / den, (c + d - a - b) / den)
}

/// `(τ, ρ)` of a single slab, with the vacuum transit removed from `τ`.
pub fn slab_amplitudes(n: Complex64, thickness: f64, omega: Complex64) -> (Complex64, Complex64) {
    let (t, r) = amplitudes(&layer(n, thickness, omega));
    (t * (-I * omega * thickness).exp(), r)
}
