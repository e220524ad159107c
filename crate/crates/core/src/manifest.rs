//! Run manifests: everything needed to reproduce a CLI run.

use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::environment::{
    DELAUNAY_LENGTH_DENSITY, DELAUNAY_LENGTH_DENSITY_CI, VORONOI_LENGTH_DENSITY, VORONOI_LENGTH_DENSITY_CI,
};
use crate::error::Result;
use crate::pathloss::validate;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub voronoi_length_density: f64,
    pub voronoi_length_density_ci: f64,
    pub delaunay_length_density: f64,
    pub delaunay_length_density_ci: f64,
}

impl Default for Calibration {
    fn default() -> Self {
        Calibration {
            voronoi_length_density: VORONOI_LENGTH_DENSITY,
            voronoi_length_density_ci: VORONOI_LENGTH_DENSITY_CI,
            delaunay_length_density: DELAUNAY_LENGTH_DENSITY,
            delaunay_length_density_ci: DELAUNAY_LENGTH_DENSITY_CI,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub seed: u64,
    /// The resolved configuration as TOML; [`Config::from_toml`] on this
    /// string gives back the configuration of the run.
    pub config: String,
    /// Command-line overrides applied on top of the configuration.
    pub overrides: Vec<(String, String)>,
    pub boundary: String,
    pub validation: Vec<String>,
    pub calibration: Calibration,
    pub outputs: Vec<String>,
    pub started_unix: u64,
    pub finished_unix: u64,
}

fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

impl RunManifest {
    pub fn new(command: &str, config: &Config, overrides: Vec<(String, String)>) -> Result<Self> {
        let report = validate(&config.path_loss()?, &config.sinr_params()?, config.window.dim);
        Ok(RunManifest {
            command: command.to_owned(),
            version: env!("CARGO_PKG_VERSION").to_owned(),
            seed: config.estimator.seed,
            config: config.to_toml(),
            overrides,
            boundary: format!("{:?}", config.window.boundary).to_lowercase(),
            validation: report.lines(),
            calibration: Calibration::default(),
            outputs: Vec::new(),
            started_unix: now(),
            finished_unix: 0,
        })
    }

    pub fn finish(&mut self, outputs: Vec<String>) {
        self.outputs = outputs;
        self.finished_unix = now();
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| crate::Error::Config(format!("bad manifest: {e}")))
    }

    pub fn config(&self) -> Result<Config> {
        Config::from_toml(&self.config)
    }
}
