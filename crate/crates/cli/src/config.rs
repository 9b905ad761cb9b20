//! Scenario file parsing and validation.
//!
//! The scenario is a single TOML document:
//!
//! ```toml
//! frequency = 10e9
//! b = 2.0
//! power_budget = 1.0
//! kappa = "auto"          # or a spacing in meters
//!
//! [room]
//! width = 8.0
//! depth = 8.0
//! height = 4.0
//!
//! [[hotspots]]
//! x = 1.5
//! y = 1.5
//! z = 1.0
//! k = 1.0
//! radius = 0.5            # optional, defaults to 0.5
//! ```

use std::path::Path;

use serde::Deserialize;
use stripeplan::{Hotspot64, Scenario64};

use crate::AppError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RoomFile {
    width: f64,
    depth: f64,
    height: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct HotspotFile {
    x: f64,
    y: f64,
    z: f64,
    k: f64,
    #[serde(default = "default_radius")]
    radius: f64,
}

fn default_radius() -> f64 {
    0.5
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum KappaFile {
    Auto(String),
    Meters(f64),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    room: RoomFile,
    frequency: f64,
    b: f64,
    power_budget: f64,
    kappa: KappaFile,
    hotspots: Vec<HotspotFile>,
}

/// Read, parse and validate a scenario file. `c_light` resolves
/// `kappa = "auto"` to half a wavelength.
pub fn parse_scenario(path: &Path, c_light: f64) -> Result<Scenario64, AppError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| AppError::Config(format!("cannot read {}: {e}", path.display())))?;
    let file: ScenarioFile =
        toml::from_str(&text).map_err(|e| AppError::Config(format!("{}: {e}", path.display())))?;

    let spacing = match file.kappa {
        KappaFile::Meters(v) => v,
        KappaFile::Auto(ref s) if s == "auto" => {
            if file.frequency <= 0.0 {
                return Err(AppError::Config(
                    "kappa = \"auto\" needs a positive frequency".into(),
                ));
            }
            c_light / file.frequency / 2.0
        }
        KappaFile::Auto(other) => {
            return Err(AppError::Config(format!(
                "kappa must be a number or \"auto\", got \"{other}\""
            )));
        }
    };

    let scenario = Scenario64 {
        room_width: file.room.width,
        room_depth: file.room.depth,
        ceiling_height: file.room.height,
        hotspots: file
            .hotspots
            .iter()
            .map(|h| Hotspot64 {
                position: [h.x, h.y, h.z],
                density: h.k,
                user_radius: h.radius,
            })
            .collect(),
        frequency: file.frequency,
        boresight_gain: file.b,
        power_budget: file.power_budget,
        spacing,
    };
    scenario
        .validate()
        .map_err(|e| AppError::Config(format!("{}: {e}", path.display())))?;
    Ok(scenario)
}
