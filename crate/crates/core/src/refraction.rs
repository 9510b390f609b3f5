//! Complex index `η = √ε` with the branch fixed by continuity from `i·∞`.

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::dielectric::{eval_epsilon, DielectricModel};
use crate::grid::Region;
use crate::math::{abs, csqrt};
use crate::roots::{find_branch_points, BranchPoint};
use crate::{Error, Result};

pub use crate::roots::BranchKind;

/// Queries closer than this to a branch point are refused.
pub const BRANCH_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eta {
    pub value: Complex64,
    /// The continuation path passed a branch point and was reseeded there.
    pub crossed_cut: bool,
}

/// Index evaluator with the model's branch points precomputed.
#[derive(Debug, Clone)]
pub struct Refraction<'a> {
    model: &'a DielectricModel,
    branch: Vec<BranchPoint>,
    r_big: f64,
}

impl<'a> Refraction<'a> {
    pub fn new(model: &'a DielectricModel) -> Result<Self> {
        model.validate()?;
        let branch = match model {
            DielectricModel::Tabulated(_) => Vec::new(),
            _ => find_branch_points(model, &Region::everywhere())?,
        };
        Ok(Self { model, branch, r_big: 1e4 * model.top_frequency().max(1.0) })
    }

    pub fn model(&self) -> &DielectricModel {
        self.model
    }

    pub fn branch_points(&self) -> &[BranchPoint] {
        &self.branch
    }

    /// Branch-point proximity guard.
    pub fn check(&self, z: Complex64) -> Result<()> {
        for b in &self.branch {
            let d = abs(z - b.location);
            if d < BRANCH_TOL {
                return Err(Error::BranchPoint { re: z.re, im: z.im, distance: d });
            }
        }
        Ok(())
    }

    /// `η(ζ)` continued along the straight path from `i·R_big`.
    pub fn eta(&self, z: Complex64) -> Result<Eta> {
        self.check(z)?;
        match self.model {
            DielectricModel::OscillatorSet { .. } => {}
            _ => {
                return Ok(Eta { value: csqrt(eval_epsilon(self.model, z)?), crossed_cut: false });
            }
        }
        if z.re < 0.0 {
            let m = self.eta(-z.conj())?;
            return Ok(Eta { value: m.value.conj(), ..m });
        }
        let start = Complex64::new(0.0, self.r_big);
        let dir = z - start;
        let len = abs(dir);
        let at = |t: f64| if t >= 1.0 { z } else { start + dir * t };

        let mut eps = eval_epsilon(self.model, start)?;
        let mut eta = csqrt(eps);
        let mut crossed = false;
        let (mut t, mut h) = (0.0f64, 1.0 / 32.0);
        while t < 1.0 {
            let t1 = (t + h).min(1.0);
            if let Some(u) = self.crossing(start, dir, t, t1) {
                // Step past the branch point and restart from the principal root.
                let tj = (u + 2.0 * BRANCH_TOL / len).min(1.0);
                eps = eval_epsilon(self.model, at(tj))?;
                eta = csqrt(eps);
                crossed = true;
                t = tj;
                continue;
            }
            let e1 = eval_epsilon(self.model, at(t1))?;
            if abs(e1 - eps) >= 0.1 * abs(eps) {
                h *= 0.5;
                if h < 1e-15 {
                    let p = at(t);
                    return Err(Error::BranchPoint { re: p.re, im: p.im, distance: 0.0 });
                }
                continue;
            }
            let s = csqrt(e1);
            eta = if abs(s - eta) <= abs(s + eta) { s } else { -s };
            eps = e1;
            t = t1;
            h *= 2.0;
        }
        Ok(Eta { value: eta, crossed_cut: crossed })
    }

    /// Parameter along the path where it comes within tolerance of a branch point.
    fn crossing(&self, start: Complex64, dir: Complex64, t0: f64, t1: f64) -> Option<f64> {
        let n2 = dir.norm_sqr();
        self.branch
            .iter()
            .filter_map(|b| {
                let u = ((b.location - start) * dir.conj()).re / n2;
                if u < t0 || u > t1 {
                    return None;
                }
                (abs(start + dir * u - b.location) < BRANCH_TOL).then_some(u)
            })
            .reduce(f64::min)
    }
}

pub fn eval_eta(model: &DielectricModel, z: Complex64) -> Result<Eta> {
    Refraction::new(model)?.eta(z)
}
