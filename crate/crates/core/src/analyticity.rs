//! Argument-principle scan of the upper half plane.
//!
//! Two functions are wound around every cell: `ε`, whose zeros are the branch
//! points of `η`, and the transmission denominator `F = 2e^{−iζL}/τ`, whose
//! zeros are the poles of `τ`. Both are single valued, so no cut can cross a
//! contour; a failed winding means the sampling could not follow the phase.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::dielectric::{eval_epsilon, DielectricModel};
use crate::grid::Region;
use crate::math::{abs, arg, csqrt, wrap_angle, I, PI, TAU};
use crate::refraction::BRANCH_TOL;
use crate::roots::{find_branch_points, BranchKind, BranchPoint};
use crate::slab::{Slab, SlabConfig};
use crate::{Error, Result};

/// Quadtree depth used to localise a nonzero winding.
pub const MAX_DEPTH: u32 = 8;
pub const MIN_RESOLUTION: usize = 32;
/// Grid lines are nudged off the symmetric positions where model roots tend to sit.
const LINE_OFFSET: (f64, f64) = (0.012_345_7, 0.017_320_5);
const EDGE_MIN_SPLIT: u32 = 2;
const EDGE_MAX_SPLIT: u32 = 40;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CellWinding {
    pub rect: Region,
    pub denominator: i32,
    pub epsilon: i32,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SingularityReport {
    pub region: Region,
    pub resolution: usize,
    /// Zeros and poles of `ε` inside the region.
    pub branch_points: Vec<BranchPoint>,
    /// Zeros of the transmission denominator, i.e. poles of `τ`.
    pub denominator_zeros: Vec<Complex64>,
    /// Top-level cells with their winding numbers.
    pub cells: Vec<CellWinding>,
    /// Rectangles wound in total, refinement included.
    pub rectangles_scanned: usize,
    /// Cells whose winding could not be resolved or did not add up under refinement.
    pub straddles: usize,
    /// Points where the scan and the closed-form roots disagree.
    pub unconfirmed: Vec<Complex64>,
}

impl SingularityReport {
    pub fn singularity_count(&self) -> usize {
        self.branch_points.iter().filter(|b| b.in_upper_half_plane).count()
            + self.denominator_zeros.len()
    }
}

/// `[−4ω_top, 4ω_top] × [1e-6, 4ω_top]`, with `ω_top = 1` for dispersionless models.
pub fn default_region(model: &DielectricModel) -> Region {
    let top = match model.top_frequency() {
        t if t > 0.0 => t,
        _ => 1.0,
    };
    Region { re_min: -4.0 * top, re_max: 4.0 * top, im_min: BRANCH_TOL, im_max: 4.0 * top }
}

type Func<'a> = dyn Fn(Complex64) -> Option<Complex64> + 'a;

/// Phase change of `f` from `a` to `b`, bisecting until every step is below π/2.
///
/// A step is only accepted when the midpoint agrees with it and the segment is
/// no longer than `max_len`.
fn edge(f: &Func<'_>, a: Complex64, b: Complex64, fa: Complex64, fb: Complex64, max_len: f64, depth: u32) -> Option<f64> {
    let m = (a + b) * 0.5;
    let fm = value(f, m)?;
    let d1 = wrap_angle(arg(fm) - arg(fa));
    let d2 = wrap_angle(arg(fb) - arg(fm));
    let d = wrap_angle(arg(fb) - arg(fa));
    let settled = d1.abs() < PI / 4.0 && d2.abs() < PI / 4.0 && (d1 + d2 - d).abs() < 1e-9;
    if settled && depth >= EDGE_MIN_SPLIT && abs(b - a) <= max_len {
        return Some(d);
    }
    if depth >= EDGE_MAX_SPLIT {
        return None;
    }
    Some(edge(f, a, m, fa, fm, max_len, depth + 1)? + edge(f, m, b, fm, fb, max_len, depth + 1)?)
}

fn value(f: &Func<'_>, z: Complex64) -> Option<Complex64> {
    f(z).filter(|v| v.re.is_finite() && v.im.is_finite() && *v != Complex64::new(0.0, 0.0))
}

fn to_winding(total: f64) -> Option<i32> {
    let w = total / TAU;
    let r = libm::round(w);
    ((w - r).abs() < 0.1).then_some(r as i32)
}

/// Winding of `f` around a rectangle, counter-clockwise.
fn winding(f: &Func<'_>, r: &Region, max_len: f64) -> Option<i32> {
    let c = [
        Complex64::new(r.re_min, r.im_min),
        Complex64::new(r.re_max, r.im_min),
        Complex64::new(r.re_max, r.im_max),
        Complex64::new(r.re_min, r.im_max),
    ];
    let v = [value(f, c[0])?, value(f, c[1])?, value(f, c[2])?, value(f, c[3])?];
    let mut total = 0.0;
    for k in 0..4 {
        total += edge(f, c[k], c[(k + 1) % 4], v[k], v[(k + 1) % 4], max_len, 0)?;
    }
    to_winding(total)
}

fn quadrants(r: &Region) -> [Region; 4] {
    let xm = 0.5 * (r.re_min + r.re_max);
    let ym = 0.5 * (r.im_min + r.im_max);
    [
        Region { re_min: r.re_min, re_max: xm, im_min: r.im_min, im_max: ym },
        Region { re_min: xm, re_max: r.re_max, im_min: r.im_min, im_max: ym },
        Region { re_min: r.re_min, re_max: xm, im_min: ym, im_max: r.im_max },
        Region { re_min: xm, re_max: r.re_max, im_min: ym, im_max: r.im_max },
    ]
}

struct Refined {
    /// Leaf centres with their winding numbers.
    leaves: Vec<(Complex64, i32)>,
    straddles: usize,
    rectangles: usize,
}

/// Quadtree descent into a cell of winding `w`, checking additivity at each level.
fn refine(f: &Func<'_>, r: &Region, w: i32, max_len: f64, depth: u32, out: &mut Refined) {
    if depth == MAX_DEPTH {
        let c = Complex64::new(0.5 * (r.re_min + r.re_max), 0.5 * (r.im_min + r.im_max));
        out.leaves.push((c, w));
        return;
    }
    let kids = quadrants(r);
    let mut ws = [0i32; 4];
    for (k, q) in kids.iter().enumerate() {
        out.rectangles += 1;
        match winding(f, q, max_len) {
            Some(v) => ws[k] = v,
            None => {
                out.straddles += 1;
                return;
            }
        }
    }
    if ws.iter().sum::<i32>() != w {
        out.straddles += 1;
        return;
    }
    for (q, &v) in kids.iter().zip(&ws) {
        if v != 0 {
            refine(f, q, v, max_len, depth + 1, out);
        }
    }
}

/// Newton iteration with a central-difference derivative.
fn newton(f: &Func<'_>, mut z: Complex64) -> Option<Complex64> {
    for _ in 0..60 {
        let h = 1e-7 * abs(z).max(1.0);
        let fz = f(z)?;
        let d = (f(z + h)? - f(z - h)?) / (2.0 * h);
        let step = fz / d;
        if !(step.re.is_finite() && step.im.is_finite()) {
            return None;
        }
        z -= step;
        if abs(step) <= 1e-15 * abs(z).max(1.0) {
            return Some(z);
        }
    }
    Some(z)
}

/// Unscaled `F = 2cos x − i(η + 1/η) sin x` and the size of its terms.
fn denominator(slab: &SlabConfig, z: Complex64) -> Option<(Complex64, f64)> {
    let eps = eval_epsilon(&slab.model, z).ok()?;
    let eta = csqrt(eps);
    let x = z * eta * slab.thickness;
    let (c, s) = (x.cos(), x.sin());
    let sinc = if abs(x) < 1e-3 { 1.0 - x * x / 6.0 } else { s / x };
    let t1 = 2.0 * c;
    let t2 = I * (eta * s + z * slab.thickness * sinc);
    Some((t1 - t2, abs(t1) + abs(t2)))
}

/// Scan `region` with `resolution × resolution` cells.
pub fn scan_upper_half_plane(slab: &SlabConfig, region: &Region, resolution: usize) -> Result<SingularityReport> {
    slab.validate()?;
    if matches!(slab.model, DielectricModel::Tabulated(_)) {
        return Err(Error::Unsupported("tabulated media have no continuation off the real axis"));
    }
    if region.im_min < BRANCH_TOL {
        return Err(Error::invalid("scan region must sit at least 1e-6 above the real axis"));
    }
    if resolution < MIN_RESOLUTION {
        return Err(Error::invalid("scan resolution must be at least 32"));
    }
    let s = Slab::new(slab)?;
    let den: &Func<'_> = &|z| {
        if slab.is_trivial() {
            return Some(Complex64::new(2.0, 0.0));
        }
        s.scaled_denominator(z).ok()
    };
    let model = &slab.model;
    let eps: &Func<'_> = &|z| eval_epsilon(model, z).ok();

    // Phase along an edge turns at about L·|η| per unit length and faster across a line.
    let mut max_len = 0.25 / slab.thickness.max(1e-300);
    if let Some(g) = model.min_gamma().filter(|g| *g > 0.0) {
        max_len = max_len.min(0.5 * g);
    }
    let n = resolution;
    let (hx, hy) = (region.width() / n as f64, region.height() / n as f64);
    let line = |lo: f64, h: f64, off: f64, k: usize| {
        if k == 0 || k == n {
            lo + k as f64 * h
        } else {
            lo + (k as f64 + off) * h
        }
    };
    let xs: Vec<f64> = (0..=n).map(|k| line(region.re_min, hx, LINE_OFFSET.0, k)).collect();
    let ys: Vec<f64> = (0..=n).map(|k| line(region.im_min, hy, LINE_OFFSET.1, k)).collect();
    let node = |k: usize, j: usize| Complex64::new(xs[k], ys[j]);

    // Shared edges are wound once, so cell windings add up to the boundary's exactly.
    let edges = |f: &Func<'_>| {
        let vals: Vec<Option<Complex64>> =
            (0..=n).flat_map(|j| (0..=n).map(move |k| (k, j))).map(|(k, j)| value(f, node(k, j))).collect();
        let val = |k: usize, j: usize| vals[j * (n + 1) + k];
        let seg = |a: (usize, usize), b: (usize, usize)| -> Option<f64> {
            edge(f, node(a.0, a.1), node(b.0, b.1), val(a.0, a.1)?, val(b.0, b.1)?, max_len, 0)
        };
        let horiz: Vec<Option<f64>> =
            (0..=n).flat_map(|j| (0..n).map(move |k| (k, j))).map(|(k, j)| seg((k, j), (k + 1, j))).collect();
        let vert: Vec<Option<f64>> =
            (0..n).flat_map(|j| (0..=n).map(move |k| (k, j))).map(|(k, j)| seg((k, j), (k, j + 1))).collect();
        (horiz, vert)
    };
    let cell_winding = |h: &[Option<f64>], v: &[Option<f64>], k: usize, j: usize| -> Option<i32> {
        let bottom = h[j * n + k]?;
        let top = h[(j + 1) * n + k]?;
        let left = v[j * (n + 1) + k]?;
        let right = v[j * (n + 1) + k + 1]?;
        to_winding(bottom + right - top - left)
    };

    let (dh, dv) = edges(den);
    let (eh, ev) = edges(eps);
    let mut cells = Vec::with_capacity(n * n);
    let mut straddles = 0;
    let mut rectangles = n * n;
    let mut den_leaves = Vec::new();
    let mut eps_leaves = Vec::new();
    for j in 0..n {
        for k in 0..n {
            let rect = Region { re_min: xs[k], re_max: xs[k + 1], im_min: ys[j], im_max: ys[j + 1] };
            let wd = cell_winding(&dh, &dv, k, j);
            let we = cell_winding(&eh, &ev, k, j);
            for (w, f, leaves) in [(wd, den, &mut den_leaves), (we, eps, &mut eps_leaves)] {
                match w {
                    None => straddles += 1,
                    Some(0) => {}
                    Some(w) => {
                        let mut r = Refined { leaves: Vec::new(), straddles: 0, rectangles: 0 };
                        refine(f, &rect, w, max_len, 0, &mut r);
                        straddles += r.straddles;
                        rectangles += r.rectangles;
                        leaves.extend(r.leaves);
                    }
                }
            }
            cells.push(CellWinding { rect, denominator: wd.unwrap_or(0), epsilon: we.unwrap_or(0) });
        }
    }

    // Poles of τ: polish on the unscaled denominator and check the residual.
    let unscaled: &Func<'_> = &|z| denominator(slab, z).map(|(v, _)| v);
    let mut denominator_zeros: Vec<Complex64> = Vec::new();
    for (c, w) in den_leaves {
        if w < 0 {
            straddles += 1;
            continue;
        }
        match newton(unscaled, c).filter(|z| {
            denominator(slab, *z).is_some_and(|(v, sc)| abs(v) < 1e-9 * sc)
        }) {
            Some(z) => {
                if !denominator_zeros.iter().any(|p| abs(p - z) < 1e-8) {
                    denominator_zeros.push(z);
                }
            }
            None => straddles += 1,
        }
    }

    // Branch points: scan zeros of ε against the closed form.
    let closed = find_branch_points(model, region)?;
    let mut found: Vec<(Complex64, BranchKind)> = Vec::new();
    for (c, w) in eps_leaves {
        let kind = if w > 0 { BranchKind::ZeroOfEpsilon } else { BranchKind::PoleOfEpsilon };
        let z = if w > 0 { newton(eps, c).unwrap_or(c) } else { c };
        if !found.iter().any(|(p, _)| abs(p - z) < 1e-8) {
            found.push((z, kind));
        }
    }
    let mut unconfirmed = Vec::new();
    let mut branch_points = Vec::new();
    for b in &closed {
        match found.iter().position(|(p, k)| *k == b.kind && abs(p - b.location) < BRANCH_TOL) {
            Some(i) => {
                let (p, _) = found.remove(i);
                branch_points.push(BranchPoint { location: p, ..*b });
            }
            None => {
                unconfirmed.push(b.location);
                branch_points.push(*b);
            }
        }
    }
    for (p, kind) in found {
        unconfirmed.push(p);
        branch_points.push(BranchPoint { location: p, kind, in_upper_half_plane: p.im > 0.0 });
    }
    straddles += unconfirmed.len();
    let by_location = |a: &Complex64, b: &Complex64| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im));
    denominator_zeros.sort_by(by_location);
    branch_points.sort_by(|a, b| by_location(&a.location, &b.location));

    Ok(SingularityReport {
        region: *region,
        resolution,
        branch_points,
        denominator_zeros,
        cells,
        rectangles_scanned: rectangles,
        straddles,
        unconfirmed,
    })
}

/// True iff the scan found nothing and every winding vanished.
pub fn certify(report: &SingularityReport) -> Result<bool> {
    if report.straddles > 0 {
        return Err(Error::Inconclusive { count: report.straddles });
    }
    Ok(report.branch_points.is_empty()
        && report.denominator_zeros.is_empty()
        && report.cells.iter().all(|c| c.denominator == 0 && c.epsilon == 0))
}

/// `τ` on an `nx × ny` lattice spanning `region`, row by row from the bottom.
///
/// Points that cannot be evaluated carry NaN.
pub fn sample_transmission(slab: &SlabConfig, region: &Region, nx: usize, ny: usize) -> Result<Vec<(Complex64, Complex64)>> {
    if nx < 2 || ny < 2 {
        return Err(Error::invalid("landscape needs at least 2×2 points"));
    }
    let s = Slab::new(slab)?;
    let nan = Complex64::new(f64::NAN, f64::NAN);
    let mut out = vec![];
    for j in 0..ny {
        for k in 0..nx {
            let z = Complex64::new(
                region.re_min + region.width() * k as f64 / (nx - 1) as f64,
                region.im_min + region.height() * j as f64 / (ny - 1) as f64,
            );
            out.push((z, s.transmission(z).unwrap_or(nan)));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dielectric::Resonance;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn vacuum_scan_is_clean() {
        let cfg = SlabConfig::new(DielectricModel::Vacuum, 1.0).unwrap();
        let r = Region::new(-5.0, 5.0, 0.01, 5.0).unwrap();
        let rep = scan_upper_half_plane(&cfg, &r, 32).unwrap();
        assert_eq!(rep.singularity_count(), 0);
        assert!(rep.cells.iter().all(|c| c.denominator == 0 && c.epsilon == 0));
        assert!(certify(&rep).unwrap());
    }

    #[test]
    fn passive_lorentz_scan_is_clean() {
        let cfg = SlabConfig::new(DielectricModel::lorentz(1.0, 1.0, 2.0, 0.1), 5.0).unwrap();
        let r = Region::new(-5.0, 5.0, 0.01, 5.0).unwrap();
        let rep = scan_upper_half_plane(&cfg, &r, 32).unwrap();
        assert_eq!(rep.singularity_count(), 0, "{rep:?}");
        assert!(certify(&rep).unwrap());
        let rep = scan_upper_half_plane(&cfg, &default_region(&cfg.model), 32).unwrap();
        assert!(certify(&rep).unwrap());
    }

    #[test]
    fn inverted_scan_finds_cut_and_poles() {
        let m = DielectricModel::lorentz(-1.0, 2.0, 1.0, 0.1);
        let cfg = SlabConfig::new(m.clone(), 1.0).unwrap();
        let rep = scan_upper_half_plane(&cfg, &default_region(&m), 32).unwrap();
        assert_eq!(rep.straddles, 0, "{rep:?}");
        let want = c(0.0, libm::sqrt(3.01) - 0.1);
        let zero = rep.branch_points.iter().find(|b| b.kind == BranchKind::ZeroOfEpsilon).unwrap();
        assert!(abs(zero.location - want) < 1e-6);
        assert!(!rep.denominator_zeros.is_empty());
        for z in &rep.denominator_zeros {
            assert!(z.im > 0.0);
            let t = Slab::new(&cfg).unwrap().transmission(*z + c(1e-4, 0.0)).unwrap();
            assert!(abs(t) > 1e2);
        }
        assert!(!certify(&rep).unwrap());
    }

    #[test]
    fn winding_additive_over_quadrants() {
        let m = DielectricModel::lorentz(-1.0, 2.0, 1.0, 0.1);
        let f: &Func<'_> = &|z| eval_epsilon(&m, z).ok();
        for r in [
            Region::new(-1.0, 1.3, 0.5, 2.7).unwrap(),
            Region::new(-3.0, 3.1, 0.01, 4.0).unwrap(),
            Region::new(0.2, 1.0, 0.2, 1.0).unwrap(),
        ] {
            let whole = winding(f, &r, 0.05).unwrap();
            let parts: i32 = quadrants(&r).iter().map(|q| winding(f, q, 0.05).unwrap()).sum();
            assert_eq!(whole, parts);
        }
    }

    #[test]
    fn two_resonance_soundness() {
        // Two inverted lines: the numerator is quartic and solved numerically.
        let m = DielectricModel::OscillatorSet {
            plasma: 2.0,
            resonances: alloc::vec![Resonance::new(-1.0, 1.0, 0.1), Resonance::new(-0.5, 2.5, 0.2)],
        };
        let cfg = SlabConfig::new(m.clone(), 0.5).unwrap();
        let region = default_region(&m);
        let rep = scan_upper_half_plane(&cfg, &region, 48).unwrap();
        assert!(rep.unconfirmed.is_empty(), "{rep:?}");
        let closed = find_branch_points(&m, &region).unwrap();
        assert_eq!(closed.len(), rep.branch_points.len());
        for (a, b) in closed.iter().zip(&rep.branch_points) {
            assert!(abs(a.location - b.location) < 1e-6);
        }
    }

    #[test]
    fn guards() {
        let cfg = SlabConfig::new(DielectricModel::Vacuum, 1.0).unwrap();
        assert!(scan_upper_half_plane(&cfg, &Region::new(-1.0, 1.0, 0.0, 1.0).unwrap(), 32).is_err());
        assert!(scan_upper_half_plane(&cfg, &Region::new(-1.0, 1.0, 0.1, 1.0).unwrap(), 16).is_err());
        let empty = SingularityReport {
            region: Region::new(-1.0, 1.0, 0.1, 1.0).unwrap(),
            resolution: 32,
            branch_points: Vec::new(),
            denominator_zeros: Vec::new(),
            cells: Vec::new(),
            rectangles_scanned: 0,
            straddles: 0,
            unconfirmed: Vec::new(),
        };
        assert!(certify(&empty).unwrap());
        let mut bad = empty.clone();
        bad.straddles = 2;
        assert!(matches!(certify(&bad), Err(Error::Inconclusive { count: 2 })));
        let mut cut = empty;
        cut.branch_points.push(BranchPoint { location: c(0.0, 1.0), kind: BranchKind::ZeroOfEpsilon, in_upper_half_plane: true });
        assert!(!certify(&cut).unwrap());
    }
}
