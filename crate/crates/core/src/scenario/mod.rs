//! Truth simulation, measurement generation and experiment orchestration.

pub mod config;
pub mod runner;
pub mod sim;

use std::path::Path;

pub use config::{InitSpec, ScenarioConfig, TrajectoryKind, TrajectorySpec, Waypoint};
pub use runner::{
    run_filter, run_monte_carlo, run_replicate, MonteCarloSummary, Replicate, RunMetrics,
    RunOutput,
};
pub use sim::{generate_measurements, simulate_truth};

use crate::error::{Error, Result};

/// Scenario files shipped with the crate, by name.
pub const BUNDLED: [(&str, &str); 4] = [
    ("table1_first", include_str!("../../scenarios/table1_first.cfg")),
    ("table1_second", include_str!("../../scenarios/table1_second.cfg")),
    ("curved", include_str!("../../scenarios/curved.cfg")),
    ("poor_init", include_str!("../../scenarios/poor_init.cfg")),
];

/// Parses a bundled scenario by name (with or without `.cfg`).
pub fn bundled(name: &str) -> Result<ScenarioConfig> {
    let stem = name.strip_suffix(".cfg").unwrap_or(name);
    let (_, text) = BUNDLED.iter().find(|(n, _)| *n == stem).ok_or_else(|| {
        Error::config(
            "scenario",
            format!(
                "no bundled scenario `{name}` (available: {})",
                BUNDLED.map(|(n, _)| n).join(", ")
            ),
        )
    })?;
    ScenarioConfig::parse(text)
}

/// Loads a scenario from a file, falling back to the bundled scenario of
/// that name when no such file exists.
pub fn load(path: &Path) -> Result<ScenarioConfig> {
    match std::fs::read_to_string(path) {
        Ok(text) => ScenarioConfig::parse(&text),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound && path.components().count() == 1 => {
            bundled(&path.to_string_lossy()).map_err(|_| {
                Error::config(
                    "scenario",
                    format!(
                        "no file `{}` and no bundled scenario of that name (bundled: {})",
                        path.display(),
                        BUNDLED.map(|(n, _)| n).join(", ")
                    ),
                )
            })
        }
        Err(e) => Err(Error::io(path, e)),
    }
}
