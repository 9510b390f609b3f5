//! Causality diagnostics for electromagnetic transmission through a dispersive slab.
//!
//! The crate evaluates dielectric models at complex frequency, builds the
//! slab transmission and reflection amplitudes, checks the dispersion relation
//! and the oscillator-strength sum rule, locates upper-half-plane
//! singularities, and measures precursor leakage of front-limited pulses.
//!
//! Units: the speed of light is 1. Frequencies are in units of a reference
//! frequency `ω_ref`, lengths in `c/ω_ref` and times in `1/ω_ref`.
//!
//! The crate is `no_std` and needs only `alloc`.

#![cfg_attr(not(test), no_std)]
// `!(x > 0.0)` is deliberate: NaN must fail validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod analyticity;
pub mod dielectric;
mod error;
pub mod fft;
pub mod grid;
pub mod math;
pub mod refraction;
pub mod roots;
pub mod slab;
pub mod timedomain;

pub use error::{Error, Result};
pub use grid::{FrequencyGrid, Region};
pub use num_complex::Complex64;
