//! Scenario runner for `slabfront-core`: TOML scenarios, CSV/JSON artifacts and SVG plots.

pub mod io;
pub mod plot;
pub mod run;
pub mod scenario;

pub use run::{run_scenario, Outcome, Report, RunOptions, Status};
pub use scenario::{load, Scenario, ScenarioError};
