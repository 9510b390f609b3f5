//! Static SVG charts. Output depends only on the data, so reruns are byte-identical.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{Context, Result};

const W: f64 = 720.0;
const H: f64 = 440.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 56.0;
/// Series longer than this are reduced to per-column min/max pairs.
const MAX_POINTS: usize = 4000;

/// Column index with its lowest and highest point.
type Bucket = Option<(usize, (f64, f64), (f64, f64))>;

pub struct Series<'a> {
    pub label: &'a str,
    pub color: &'a str,
    pub points: Vec<(f64, f64)>,
}

pub struct LineChart<'a> {
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
    pub series: Vec<Series<'a>>,
    /// Vertical dashed marker, e.g. a pulse front.
    pub marker: Option<(f64, &'a str)>,
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn nice_step(span: f64, target: usize) -> f64 {
    let raw = span / target as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let r = raw / mag;
    let m = if r < 1.5 {
        1.0
    } else if r < 3.5 {
        2.0
    } else if r < 7.5 {
        5.0
    } else {
        10.0
    };
    m * mag
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let step = nice_step(hi - lo, 6);
    let first = (lo / step - 1e-9).ceil() as i64;
    let last = (hi / step + 1e-9).floor() as i64;
    // Round through the decimal form so 3 × 0.1 prints as 0.3.
    (first..=last).map(|k| format!("{:.12e}", k as f64 * step).parse::<f64>().unwrap() + 0.0).collect()
}

fn label(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 1e4 || v.abs() < 1e-3 {
        format!("{v:.1e}")
    } else {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

fn bounds(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    let (lo, hi) = values.filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return None;
    }
    if hi - lo <= 1e-12 * hi.abs().max(1e-300) {
        let pad = if lo == 0.0 { 1.0 } else { 0.1 * lo.abs() };
        return Some((lo - pad, hi + pad));
    }
    let pad = 0.04 * (hi - lo);
    Some((lo - pad, hi + pad))
}

/// Keep the first and extreme points of each pixel column.
fn decimate(points: &[(f64, f64)], x0: f64, x1: f64) -> Vec<(f64, f64)> {
    if points.len() <= MAX_POINTS {
        return points.to_vec();
    }
    let cols = MAX_POINTS / 2;
    let mut out = Vec::with_capacity(MAX_POINTS + 2);
    let mut bucket: Bucket = None;
    let flush = |b: Bucket, out: &mut Vec<(f64, f64)>| {
        if let Some((_, lo, hi)) = b {
            if lo.0 <= hi.0 {
                out.push(lo);
                out.push(hi);
            } else {
                out.push(hi);
                out.push(lo);
            }
        }
    };
    for &p in points {
        if !p.1.is_finite() {
            flush(bucket.take(), &mut out);
            out.push(p);
            continue;
        }
        let c = (((p.0 - x0) / (x1 - x0)) * cols as f64).clamp(0.0, cols as f64) as usize;
        bucket = match bucket {
            Some((bc, lo, hi)) if bc == c => Some((bc, if p.1 < lo.1 { p } else { lo }, if p.1 > hi.1 { p } else { hi })),
            other => {
                flush(other, &mut out);
                Some((c, p, p))
            }
        };
    }
    flush(bucket, &mut out);
    out
}

fn frame(svg: &mut String, title: &str, x_label: &str, y_label: &str, (x0, x1): (f64, f64), (y0, y1): (f64, f64)) {
    let pw = W - LEFT - RIGHT;
    let ph = H - TOP - BOTTOM;
    let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(svg, r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#, W / 2.0, esc(title));
    let _ = writeln!(svg, r##"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="#333"/>"##);
    for t in ticks(x0, x1) {
        let x = LEFT + (t - x0) / (x1 - x0) * pw;
        let _ = writeln!(svg, r##"<line x1="{x:.2}" y1="{}" x2="{x:.2}" y2="{}" stroke="#ddd"/>"##, TOP, TOP + ph);
        let _ = writeln!(svg, r#"<text x="{x:.2}" y="{}" text-anchor="middle">{}</text>"#, TOP + ph + 16.0, label(t));
    }
    for t in ticks(y0, y1) {
        let y = TOP + ph - (t - y0) / (y1 - y0) * ph;
        let _ = writeln!(svg, r##"<line x1="{LEFT}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="#ddd"/>"##, LEFT + pw);
        let _ = writeln!(svg, r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#, LEFT - 6.0, y + 4.0, label(t));
    }
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, LEFT + pw / 2.0, H - 14.0, esc(x_label));
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{0}" text-anchor="middle" transform="rotate(-90 18 {0})">{1}</text>"#,
        TOP + ph / 2.0,
        esc(y_label)
    );
}

pub fn render_lines(chart: &LineChart<'_>) -> String {
    let xs = chart.series.iter().flat_map(|s| s.points.iter().map(|p| p.0));
    let ys = chart.series.iter().flat_map(|s| s.points.iter().map(|p| p.1));
    let (x0, x1) = bounds(xs).unwrap_or((0.0, 1.0));
    let (y0, y1) = bounds(ys).unwrap_or((0.0, 1.0));
    let pw = W - LEFT - RIGHT;
    let ph = H - TOP - BOTTOM;
    let px = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let py = |y: f64| TOP + ph - (y - y0) / (y1 - y0) * ph;

    let mut svg = String::new();
    frame(&mut svg, chart.title, chart.x_label, chart.y_label, (x0, x1), (y0, y1));
    for (k, s) in chart.series.iter().enumerate() {
        let pts = decimate(&s.points, x0, x1);
        let mut run: Vec<String> = Vec::new();
        let mut emit = |run: &mut Vec<String>| {
            if run.len() > 1 {
                let _ = writeln!(svg, r#"<polyline fill="none" stroke="{}" stroke-width="1.4" points="{}"/>"#, s.color, run.join(" "));
            }
            run.clear();
        };
        for (x, y) in pts {
            if x.is_finite() && y.is_finite() {
                run.push(format!("{:.2},{:.2}", px(x), py(y)));
            } else {
                emit(&mut run);
            }
        }
        emit(&mut run);
        let ly = TOP + 14.0 + 16.0 * k as f64;
        let _ = writeln!(
            svg,
            r#"<line x1="{0}" y1="{ly}" x2="{1}" y2="{ly}" stroke="{2}" stroke-width="2"/><text x="{3}" y="{4}">{5}</text>"#,
            LEFT + pw - 150.0,
            LEFT + pw - 126.0,
            s.color,
            LEFT + pw - 120.0,
            ly + 4.0,
            esc(s.label)
        );
    }
    if let Some((m, text)) = chart.marker {
        if m >= x0 && m <= x1 {
            let x = px(m);
            let _ = writeln!(svg, r#"<line x1="{x:.2}" y1="{TOP}" x2="{x:.2}" y2="{}" stroke="black" stroke-dasharray="5,4"/>"#, TOP + ph);
            let _ = writeln!(svg, r#"<text x="{:.2}" y="{}">{}</text>"#, x + 4.0, TOP + 14.0, esc(text));
        }
    }
    svg.push_str("</svg>\n");
    svg
}

/// A perceptually ordered ramp from dark blue through green to yellow.
fn ramp(t: f64) -> (u8, u8, u8) {
    const STOPS: [(f64, f64, f64); 5] =
        [(68.0, 1.0, 84.0), (59.0, 82.0, 139.0), (33.0, 145.0, 140.0), (94.0, 201.0, 98.0), (253.0, 231.0, 37.0)];
    let t = t.clamp(0.0, 1.0) * (STOPS.len() - 1) as f64;
    let i = (t.floor() as usize).min(STOPS.len() - 2);
    let f = t - i as f64;
    let (a, b) = (STOPS[i], STOPS[i + 1]);
    let mix = |p: f64, q: f64| (p + (q - p) * f).round() as u8;
    (mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}

pub struct HeatMap<'a> {
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
    pub nx: usize,
    pub ny: usize,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    /// Row-major from the bottom row; non-finite cells are drawn grey.
    pub values: Vec<f64>,
    pub value_label: &'a str,
}

pub fn render_heat(map: &HeatMap<'_>) -> String {
    let (lo, hi) = bounds(map.values.iter().copied()).unwrap_or((0.0, 1.0));
    let pw = W - LEFT - RIGHT - 70.0;
    let ph = H - TOP - BOTTOM;
    let (x0, x1) = map.x_range;
    let (y0, y1) = map.y_range;
    // Cells are centred on the lattice points.
    let dx = (x1 - x0) / (map.nx - 1) as f64;
    let dy = (y1 - y0) / (map.ny - 1) as f64;
    let (ex0, ex1, ey0, ey1) = (x0 - dx / 2.0, x1 + dx / 2.0, y0 - dy / 2.0, y1 + dy / 2.0);
    let mut svg = String::new();
    let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let cw = pw / map.nx as f64;
    let ch = ph / map.ny as f64;
    for j in 0..map.ny {
        for k in 0..map.nx {
            let v = map.values[j * map.nx + k];
            let fill = if v.is_finite() {
                let (r, g, b) = ramp((v - lo) / (hi - lo));
                format!("#{r:02x}{g:02x}{b:02x}")
            } else {
                "#999999".into()
            };
            let x = LEFT + k as f64 * cw;
            let y = TOP + ph - (j + 1) as f64 * ch;
            let _ = writeln!(svg, r#"<rect x="{x:.2}" y="{y:.2}" width="{:.2}" height="{:.2}" fill="{fill}"/>"#, cw + 0.05, ch + 0.05);
        }
    }
    let _ = writeln!(svg, r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#, W / 2.0, esc(map.title));
    let _ = writeln!(svg, r##"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="#333"/>"##);
    for t in ticks(ex0, ex1) {
        let x = LEFT + (t - ex0) / (ex1 - ex0) * pw;
        let _ = writeln!(svg, r#"<text x="{x:.2}" y="{}" text-anchor="middle">{}</text>"#, TOP + ph + 16.0, label(t));
    }
    for t in ticks(ey0, ey1) {
        let y = TOP + ph - (t - ey0) / (ey1 - ey0) * ph;
        let _ = writeln!(svg, r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#, LEFT - 6.0, y + 4.0, label(t));
    }
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, LEFT + pw / 2.0, H - 14.0, esc(map.x_label));
    let _ = writeln!(svg, r#"<text x="18" y="{0}" text-anchor="middle" transform="rotate(-90 18 {0})">{1}</text>"#, TOP + ph / 2.0, esc(map.y_label));
    // Colour bar.
    let bx = LEFT + pw + 20.0;
    for i in 0..64 {
        let (r, g, b) = ramp(i as f64 / 63.0);
        let y = TOP + ph - (i + 1) as f64 * ph / 64.0;
        let _ = writeln!(svg, r##"<rect x="{bx}" y="{y:.2}" width="16" height="{:.2}" fill="#{r:02x}{g:02x}{b:02x}"/>"##, ph / 64.0 + 0.05);
    }
    let _ = writeln!(svg, r#"<text x="{}" y="{}">{}</text>"#, bx, TOP + ph + 16.0, label(lo));
    let _ = writeln!(svg, r#"<text x="{}" y="{}">{}</text>"#, bx, TOP - 6.0, label(hi));
    let _ = writeln!(svg, r#"<text x="{0}" y="{1}" text-anchor="middle" transform="rotate(-90 {0} {1})">{2}</text>"#, bx + 34.0, TOP + ph / 2.0, esc(map.value_label));
    svg.push_str("</svg>\n");
    svg
}

pub fn write(path: &Path, svg: &str) -> Result<()> {
    std::fs::write(path, svg).with_context(|| format!("writing {}", path.display()))
}
