use crate::{Error, Result};

/// Uniform real-frequency samples `ω_n = n·Δω`, `n = 0..N`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FrequencyGrid {
    pub spacing: f64,
    pub count: usize,
}

impl FrequencyGrid {
    /// Default ratio between `ω_max` and the highest model frequency.
    pub const DEFAULT_COVER: f64 = 20.0;

    pub fn new(spacing: f64, count: usize) -> Result<Self> {
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::invalid("grid spacing must be positive and finite"));
        }
        if count < 8 {
            return Err(Error::invalid("grid needs at least 8 samples"));
        }
        Ok(Self { spacing, count })
    }

    /// Grid of `count` samples reaching `omega_max` exactly.
    pub fn up_to(omega_max: f64, count: usize) -> Result<Self> {
        if count < 8 {
            return Err(Error::invalid("grid needs at least 8 samples"));
        }
        Self::new(omega_max / (count - 1) as f64, count)
    }

    #[inline]
    pub fn omega(&self, n: usize) -> f64 {
        n as f64 * self.spacing
    }

    pub fn omega_max(&self) -> f64 {
        self.omega(self.count - 1)
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(|n| self.omega(n))
    }

    /// Check `ω_max ≥ factor · top`.
    pub fn check_cover(&self, top: f64, factor: f64) -> Result<()> {
        if self.omega_max() < factor * top {
            return Err(Error::invalid(alloc::format!(
                "grid ends at {} but must reach {factor}× the top model frequency {top}",
                self.omega_max()
            )));
        }
        Ok(())
    }
}

/// Axis-aligned rectangle in the complex frequency plane.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Region {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Region {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        let ok = [re_min, re_max, im_min, im_max].iter().all(|v| v.is_finite())
            && re_min < re_max
            && im_min < im_max;
        if !ok {
            return Err(Error::invalid("region bounds must be finite with min < max"));
        }
        Ok(Self { re_min, re_max, im_min, im_max })
    }

    /// Whole plane, for closed-form root listings.
    pub fn everywhere() -> Self {
        Self {
            re_min: f64::NEG_INFINITY,
            re_max: f64::INFINITY,
            im_min: f64::NEG_INFINITY,
            im_max: f64::INFINITY,
        }
    }

    pub fn contains(&self, z: num_complex::Complex64) -> bool {
        z.re >= self.re_min && z.re <= self.re_max && z.im >= self.im_min && z.im <= self.im_max
    }

    pub fn width(&self) -> f64 {
        self.re_max - self.re_min
    }

    pub fn height(&self) -> f64 {
        self.im_max - self.im_min
    }
}
