//! Scenario files: TOML with `schema = 1`.
//!
//! Everything is converted to natural units (`c = 1`, frequencies in `ω_ref`)
//! on load. SI scenarios give frequencies in rad/s, lengths in metres and times
//! in seconds.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use slabfront_core::dielectric::{DielectricModel, Resonance, Table};
use slabfront_core::timedomain::{PulseKind, PulseSpec, TimeGrid};
use slabfront_core::{FrequencyGrid, Region};

use crate::io::read_table;

pub const SCHEMA: u32 = 1;
/// Speed of light in m/s.
pub const C_SI: f64 = 299_792_458.0;
/// Smallest automatic spectral grid.
const AUTO_MIN_COUNT: usize = 4001;
/// Spectral samples across the narrowest linewidth on an automatic grid.
const AUTO_PER_LINEWIDTH: f64 = 16.0;

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("malformed scenario: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error("invalid table {path}: {message}")]
    Table { path: PathBuf, message: String },
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, ScenarioError> {
    Err(ScenarioError::Invalid(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Units {
    #[default]
    Natural,
    Si,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub schema: u32,
    pub name: String,
    #[serde(default)]
    pub units: Units,
    pub omega_ref: Option<f64>,
    pub model: ModelSection,
    pub slab: SlabSection,
    pub grid: Option<GridSection>,
    pub pulse: Option<PulseSection>,
    pub time: Option<TimeSection>,
    pub scan: Option<ScanSection>,
    #[serde(default)]
    pub analysis: Analysis,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSection {
    Vacuum,
    Constant { eps: f64 },
    OscillatorSet { plasma: f64, resonances: Vec<Resonance> },
    /// CSV with header `omega,re_eps,im_eps`, relative to the scenario file.
    Tabulated { file: PathBuf },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlabSection {
    pub thickness: f64,
}

/// Two of `count`, `spacing`, `omega_max`. Omitted entirely means automatic.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub count: Option<usize>,
    pub spacing: Option<f64>,
    pub omega_max: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PulseSection {
    Gaussian { carrier: f64, amplitude: Option<f64>, center: f64, width: f64 },
    StepSine { carrier: f64, amplitude: Option<f64>, front: Option<f64> },
    TruncatedSine { carrier: f64, amplitude: Option<f64>, front: Option<f64>, ramp: f64 },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSection {
    pub dt: f64,
    pub count: usize,
    pub start: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    /// `[re_min, re_max, im_min, im_max]`.
    pub region: Option<[f64; 4]>,
    pub resolution: Option<usize>,
    /// `[nx, ny]` lattice for the |τ(ζ)| export.
    pub landscape: Option<[usize; 2]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Analysis {
    pub spectrum: bool,
    pub kk_check: bool,
    pub sum_rule: bool,
    pub kernel: bool,
    pub scan: bool,
    pub causality: bool,
}

impl Default for Analysis {
    fn default() -> Self {
        Self { spectrum: true, kk_check: true, sum_rule: true, kernel: true, scan: true, causality: true }
    }
}

impl Analysis {
    fn needs_continuation(&self) -> bool {
        self.kernel || self.scan || self.causality
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
    #[serde(default)]
    pub literal_eq17: bool,
    #[serde(default)]
    pub plots: bool,
}

/// A validated scenario in natural units.
#[derive(Debug, Clone, Serialize)]
pub struct Scenario {
    pub name: String,
    pub units: Units,
    pub omega_ref: f64,
    pub model: DielectricModel,
    pub thickness: f64,
    pub grid: FrequencyGrid,
    pub grid_auto: bool,
    pub pulse: Option<PulseSpec>,
    pub time: Option<TimeGrid>,
    pub region: Option<Region>,
    pub resolution: Option<usize>,
    pub landscape: [usize; 2],
    pub analysis: Analysis,
    pub output_dir: PathBuf,
    pub literal_eq17: bool,
    pub plots: bool,
}

impl Scenario {
    /// Scale factors from natural units back to scenario units.
    pub fn frequency_unit(&self) -> f64 {
        self.omega_ref
    }

    pub fn time_unit(&self) -> f64 {
        1.0 / self.omega_ref
    }
}

pub fn load(path: &Path) -> Result<Scenario, ScenarioError> {
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Read { path: path.into(), source })?;
    let file: ScenarioFile = toml::from_str(&text)?;
    resolve(file, path.parent().unwrap_or(Path::new(".")))
}

fn positive(name: &str, v: f64) -> Result<f64, ScenarioError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        invalid(format!("{name} must be positive and finite, got {v}"))
    }
}

fn finite(name: &str, v: f64) -> Result<f64, ScenarioError> {
    if v.is_finite() {
        Ok(v)
    } else {
        invalid(format!("{name} must be finite, got {v}"))
    }
}

/// Check every field and convert to natural units. No numerics run here.
pub fn resolve(file: ScenarioFile, base: &Path) -> Result<Scenario, ScenarioError> {
    if file.schema != SCHEMA {
        return invalid(format!("unsupported schema {}, expected {SCHEMA}", file.schema));
    }
    if file.name.is_empty() || file.name.contains(['/', '\\']) {
        return invalid("name must be a non-empty plain file name");
    }
    let omega_ref = match (file.units, file.omega_ref) {
        (Units::Natural, None) => 1.0,
        (Units::Natural, Some(1.0)) => 1.0,
        (Units::Natural, Some(_)) => return invalid("natural units fix omega_ref = 1"),
        (Units::Si, None) => return invalid("SI scenarios must declare omega_ref in rad/s"),
        (Units::Si, Some(w)) => positive("omega_ref", w)?,
    };
    // Natural value of a frequency, a time and a length.
    let (fq, tm, ln) = match file.units {
        Units::Natural => (1.0, 1.0, 1.0),
        Units::Si => (1.0 / omega_ref, omega_ref, omega_ref / C_SI),
    };

    let model = match file.model {
        ModelSection::Vacuum => DielectricModel::Vacuum,
        ModelSection::Constant { eps } => DielectricModel::Constant { eps },
        ModelSection::OscillatorSet { plasma, resonances } => DielectricModel::OscillatorSet {
            plasma: plasma * fq,
            resonances: resonances
                .into_iter()
                .map(|r| Resonance::new(r.strength, r.omega0 * fq, r.gamma * fq))
                .collect(),
        },
        ModelSection::Tabulated { file: rel } => {
            let path = base.join(rel);
            let mut t: Table = read_table(&path)
                .map_err(|e| ScenarioError::Table { path: path.clone(), message: format!("{e:#}") })?;
            t.omega.iter_mut().for_each(|w| *w *= fq);
            DielectricModel::Tabulated(t)
        }
    };
    model.validate().map_err(|e| ScenarioError::Invalid(format!("model: {e}")))?;
    let tabulated = matches!(model, DielectricModel::Tabulated(_));
    if tabulated && file.analysis.needs_continuation() {
        return invalid("tabulated media support spectrum, kk_check and sum_rule only");
    }

    if matches!(model, DielectricModel::Constant { eps } if eps != 1.0) && file.analysis.kernel && file.slab.thickness > 0.0 {
        return invalid("a constant-ε slab has a delta-train kernel; disable analysis.kernel");
    }

    let thickness = file.slab.thickness;
    if !(thickness >= 0.0 && thickness.is_finite()) {
        return invalid(format!("slab thickness must be ≥ 0 and finite, got {thickness}"));
    }
    let thickness = thickness * ln;

    let (grid, grid_auto) = match file.grid {
        None => (auto_grid(&model)?, true),
        Some(g) => {
            let grid = match (g.count, g.spacing, g.omega_max) {
                (Some(n), Some(dw), None) => FrequencyGrid::new(positive("grid.spacing", dw)? * fq, n),
                (Some(n), None, Some(w)) => FrequencyGrid::up_to(positive("grid.omega_max", w)? * fq, n),
                (None, Some(dw), Some(w)) => {
                    let (dw, w) = (positive("grid.spacing", dw)?, positive("grid.omega_max", w)?);
                    FrequencyGrid::new(dw * fq, (w / dw).round() as usize + 1)
                }
                _ => return invalid("grid needs exactly two of count, spacing, omega_max"),
            };
            (grid.map_err(|e| ScenarioError::Invalid(format!("grid: {e}")))?, false)
        }
    };
    if let DielectricModel::Tabulated(t) = &model {
        if grid.omega_max() > *t.omega.last().unwrap() * (1.0 + 1e-12) {
            return invalid("grid extends beyond the tabulated range");
        }
    }

    let pulse = match file.pulse {
        None => None,
        Some(p) => Some(match p {
            PulseSection::Gaussian { carrier, amplitude, center, width } => PulseSpec {
                kind: PulseKind::Gaussian { center: finite("pulse.center", center)? * tm, width: positive("pulse.width", width)? * tm },
                carrier: positive("pulse.carrier", carrier)? * fq,
                amplitude: finite("pulse.amplitude", amplitude.unwrap_or(1.0))?,
            },
            PulseSection::StepSine { carrier, amplitude, front } => PulseSpec {
                kind: PulseKind::StepSine { front: finite("pulse.front", front.unwrap_or(0.0))? * tm },
                carrier: positive("pulse.carrier", carrier)? * fq,
                amplitude: finite("pulse.amplitude", amplitude.unwrap_or(1.0))?,
            },
            PulseSection::TruncatedSine { carrier, amplitude, front, ramp } => {
                if !(ramp >= 0.0 && ramp.is_finite()) {
                    return invalid("pulse.ramp must be ≥ 0");
                }
                PulseSpec {
                    kind: PulseKind::TruncatedSine { front: finite("pulse.front", front.unwrap_or(0.0))? * tm, ramp: ramp * tm },
                    carrier: positive("pulse.carrier", carrier)? * fq,
                    amplitude: finite("pulse.amplitude", amplitude.unwrap_or(1.0))?,
                }
            }
        }),
    };
    let time = match file.time {
        None => None,
        Some(t) => Some(
            TimeGrid::new(positive("time.dt", t.dt)? * tm, t.count, finite("time.start", t.start)? * tm)
                .map_err(|e| ScenarioError::Invalid(format!("time: {e}")))?,
        ),
    };
    if time.is_some() && pulse.is_none() {
        return invalid("a [time] grid needs a [pulse]");
    }

    let (mut region, mut resolution, mut landscape) = (None, None, [64, 32]);
    if let Some(s) = file.scan {
        if let Some([a, b, c, d]) = s.region {
            region = Some(
                Region::new(a * fq, b * fq, c * fq, d * fq)
                    .map_err(|e| ScenarioError::Invalid(format!("scan.region: {e}")))?,
            );
            if c * fq < 1e-6 {
                return invalid("scan.region must sit at least 1e-6 ω_ref above the real axis");
            }
        }
        if let Some(r) = s.resolution {
            if r < 32 {
                return invalid("scan.resolution must be at least 32");
            }
            resolution = Some(r);
        }
        if let Some(l) = s.landscape {
            if l[0] < 2 || l[1] < 2 {
                return invalid("scan.landscape needs at least 2×2 points");
            }
            landscape = l;
        }
    }

    Ok(Scenario {
        output_dir: file.output.dir.unwrap_or_else(|| PathBuf::from("out").join(&file.name)),
        name: file.name,
        units: file.units,
        omega_ref,
        model,
        thickness,
        grid,
        grid_auto,
        pulse,
        time,
        region,
        resolution,
        landscape,
        analysis: file.analysis,
        literal_eq17: file.output.literal_eq17,
        plots: file.output.plots,
    })
}

/// `ω_max = 20 ω_top` and at least 16 samples per linewidth.
pub fn auto_grid(model: &DielectricModel) -> Result<FrequencyGrid, ScenarioError> {
    let grid = match model {
        DielectricModel::Tabulated(t) => FrequencyGrid::up_to(*t.omega.last().unwrap(), AUTO_MIN_COUNT),
        _ => {
            let top = match model.top_frequency() {
                t if t > 0.0 => t,
                _ => 1.0,
            };
            let omega_max = FrequencyGrid::DEFAULT_COVER * top;
            let mut count = AUTO_MIN_COUNT;
            if let Some(g) = model.min_gamma().filter(|g| *g > 0.0) {
                count = count.max((omega_max * AUTO_PER_LINEWIDTH / g).ceil() as usize + 1);
            }
            FrequencyGrid::up_to(omega_max, count)
        }
    };
    grid.map_err(|e| ScenarioError::Invalid(format!("automatic grid: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<Scenario, ScenarioError> {
        resolve(toml::from_str(s)?, Path::new("."))
    }

    const LORENTZ: &str = r#"
schema = 1
name = "t"
[model]
kind = "oscillator_set"
plasma = 1.0
resonances = [{ strength = 1.0, omega0 = 2.0, gamma = 0.1 }]
[slab]
thickness = 5.0
"#;

    #[test]
    fn minimal_lorentz() {
        let s = parse(LORENTZ).unwrap();
        assert_eq!(s.model, DielectricModel::lorentz(1.0, 1.0, 2.0, 0.1));
        assert!(s.grid_auto);
        assert_eq!(s.grid.omega_max(), 40.0);
        assert!(s.grid.spacing <= 0.1 / 16.0);
        assert_eq!(s.analysis, Analysis::default());
        assert_eq!(s.output_dir, PathBuf::from("out/t"));
    }

    #[test]
    fn si_conversion() {
        let w = 2.0e15;
        let s = parse(&format!(
            r#"
schema = 1
name = "si"
units = "si"
omega_ref = {w:e}
[model]
kind = "oscillator_set"
plasma = {w:e}
resonances = [{{ strength = 1.0, omega0 = 4.0e15, gamma = 2.0e14 }}]
[slab]
thickness = 1.0e-6
[grid]
count = 101
omega_max = 8.0e16
[pulse]
kind = "step_sine"
carrier = 4.0e15
front = 1.0e-15
"#
        ))
        .unwrap();
        assert_eq!(s.model, DielectricModel::lorentz(1.0, 1.0, 2.0, 0.1));
        assert!((s.thickness - 1.0e-6 * w / C_SI).abs() < 1e-15);
        assert_eq!(s.grid.omega_max(), 40.0);
        assert_eq!(s.pulse.unwrap().carrier, 2.0);
        assert_eq!(s.pulse.unwrap().kind, PulseKind::StepSine { front: 2.0 });
    }

    #[test]
    fn rejects() {
        let bad = [
            LORENTZ.replace("schema = 1", "schema = 2"),
            LORENTZ.replace("thickness = 5.0", "thickness = -1.0"),
            LORENTZ.replace("gamma = 0.1", "gamma = -0.1"),
            LORENTZ.replace("plasma = 1.0", "plasma = 0.0"),
            LORENTZ.replace("[slab]", "bogus = 1\n[slab]"),
            format!("{LORENTZ}[grid]\ncount = 100\n"),
            format!("{LORENTZ}[scan]\nresolution = 8\n"),
            format!("{LORENTZ}[scan]\nregion = [-1.0, 1.0, 0.0, 1.0]\n"),
            format!("{LORENTZ}[time]\ndt = 0.01\ncount = 100\nstart = 0.0\n"),
            format!("{LORENTZ}[pulse]\nkind = \"gaussian\"\ncarrier = 1.0\ncenter = 0.0\nwidth = 0.0\n"),
            LORENTZ.replace("name = \"t\"", "name = \"t\"\nunits = \"si\""),
        ];
        for s in bad {
            assert!(parse(&s).is_err(), "accepted:\n{s}");
        }
    }

    #[test]
    fn grid_forms_agree() {
        let a = parse(&format!("{LORENTZ}[grid]\ncount = 4001\nomega_max = 40.0\n")).unwrap().grid;
        let b = parse(&format!("{LORENTZ}[grid]\nspacing = 0.01\nomega_max = 40.0\n")).unwrap().grid;
        let c = parse(&format!("{LORENTZ}[grid]\ncount = 4001\nspacing = 0.01\n")).unwrap().grid;
        assert_eq!(a.count, b.count);
        assert_eq!(b, c);
    }
}
