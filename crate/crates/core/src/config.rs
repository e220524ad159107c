//! TOML run configuration.
//!
//! Five sections are recognised: `[model]`, `[pathloss]`, `[sinr]`,
//! `[window]` and `[estimator]`. Only `[model]` is required. Loading fills
//! every default in, so the echo written to a manifest reloads to an equal
//! [`Config`].

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::environment::IntensityModel;
use crate::error::{Error, Result};
use crate::estimators::{EstimatorConfig, GraphKind, Proxy};
use crate::geometry::{Boundary, Window};
use crate::pathloss::{PathLoss, SinrParams};
use crate::percolation::Stabilization;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Poisson,
    ShotNoise,
    Modulated,
    Voronoi,
    Delaunay,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub kind: ModelKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub site_rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel_radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inside: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outside: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub germ_intensity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grain_radius: Option<f64>,
    /// Rescale so that `E[Λ(Q_1)] = 1`.
    #[serde(default = "yes")]
    pub normalize: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    Truncated,
    Compact,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathLossSection {
    #[serde(default = "truncated")]
    pub kind: LossKind,
    #[serde(default = "one")]
    pub cap: f64,
    #[serde(default = "four")]
    pub exponent: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<f64>,
}

impl Default for PathLossSection {
    fn default() -> Self {
        PathLossSection {
            kind: LossKind::Truncated,
            cap: 1.0,
            exponent: 4.0,
            cutoff: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SinrSection {
    pub noise: f64,
    pub tau: f64,
    #[serde(default)]
    pub gamma: f64,
}

impl Default for SinrSection {
    fn default() -> Self {
        SinrSection {
            noise: 0.25,
            tau: 1.0,
            gamma: 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowSection {
    #[serde(default = "two")]
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub side: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper: Option<Vec<f64>>,
    #[serde(default = "periodic")]
    pub boundary: Boundary,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub guard: Option<f64>,
}

impl Default for WindowSection {
    fn default() -> Self {
        WindowSection {
            dim: 2,
            side: None,
            lower: None,
            upper: None,
            boundary: Boundary::Periodic,
            guard: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProxyKind {
    CrossingHard,
    LargestFraction,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StabilizationKind {
    ConstantRange,
    EmpiricalVoronoi,
    Skip,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorSection {
    #[serde(default = "gilbert_kind")]
    pub graph: GraphKind,
    /// Gilbert radius; defaults to `r_B`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default = "reps")]
    pub reps: usize,
    #[serde(default = "crossing_kind")]
    pub proxy: ProxyKind,
    #[serde(default = "three")]
    pub alpha: f64,
    /// Crossing scale; defaults to the window side over `alpha`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<f64>,
    #[serde(default = "threshold")]
    pub threshold: f64,
    #[serde(default = "half")]
    pub p_succ: f64,
    #[serde(default = "tolerance")]
    pub tolerance: f64,
    #[serde(default = "tolerance")]
    pub gamma_tolerance: f64,
    #[serde(default = "max_iter")]
    pub max_iter: usize,
    #[serde(default = "one_u64")]
    pub seed: u64,
    #[serde(default)]
    pub timing: bool,
    #[serde(default = "one")]
    pub lambda: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_lo: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_hi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_hi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambdas: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gammas: Option<Vec<f64>>,
    /// Block scale of the good-site sweep.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub site_n: Option<f64>,
    /// Interference level `M` of the good-site sweep.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub site_m: Option<f64>,
    #[serde(default = "skip_kind")]
    pub stabilization: StabilizationKind,
}

impl Default for EstimatorSection {
    fn default() -> Self {
        toml::from_str("").expect("estimator defaults")
    }
}

fn yes() -> bool {
    true
}
fn one() -> f64 {
    1.0
}
fn one_u64() -> u64 {
    1
}
fn two() -> usize {
    2
}
fn three() -> f64 {
    3.0
}
fn four() -> f64 {
    4.0
}
fn half() -> f64 {
    0.5
}
fn threshold() -> f64 {
    0.3
}
fn tolerance() -> f64 {
    0.05
}
fn reps() -> usize {
    200
}
fn max_iter() -> usize {
    40
}
fn truncated() -> LossKind {
    LossKind::Truncated
}
fn periodic() -> Boundary {
    Boundary::Periodic
}
fn gilbert_kind() -> GraphKind {
    GraphKind::Gilbert
}
fn crossing_kind() -> ProxyKind {
    ProxyKind::CrossingHard
}
fn skip_kind() -> StabilizationKind {
    StabilizationKind::Skip
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub model: ModelSection,
    #[serde(default)]
    pub pathloss: PathLossSection,
    #[serde(default)]
    pub sinr: SinrSection,
    #[serde(default)]
    pub window: WindowSection,
    #[serde(default)]
    pub estimator: EstimatorSection,
}

const KEYS: &[(&str, &[&str])] = &[
    (
        "model",
        &["kind", "site_rate", "kernel_radius", "inside", "outside", "germ_intensity", "grain_radius", "normalize"],
    ),
    ("pathloss", &["kind", "cap", "exponent", "cutoff"]),
    ("sinr", &["noise", "tau", "gamma"]),
    ("window", &["dim", "side", "lower", "upper", "boundary", "guard"]),
    (
        "estimator",
        &[
            "graph", "r", "k", "reps", "proxy", "alpha", "n", "threshold", "p_succ", "tolerance",
            "gamma_tolerance", "max_iter", "seed", "timing", "lambda", "lambda_lo", "lambda_hi",
            "gamma_hi", "lambdas", "gammas", "site_n", "site_m", "stabilization",
        ],
    ),
];

/// 1-based line of the first `key =` inside `[section]`, if found.
fn key_line(text: &str, section: Option<&str>, key: &str) -> Option<usize> {
    let mut current: Option<String> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(rest) = line.strip_prefix('[') {
            current = Some(rest.trim_end_matches(']').trim().to_owned());
            continue;
        }
        let name = line.split('=').next().unwrap_or("").trim().trim_matches('"');
        if line.contains('=') && name == key && current.as_deref() == section {
            return Some(i + 1);
        }
    }
    None
}

fn unknown_keys(text: &str, table: &toml::Table) -> Vec<String> {
    let mut out = Vec::new();
    let at = |section: Option<&str>, key: &str| match key_line(text, section, key) {
        Some(l) => format!(" (line {l})"),
        None => String::new(),
    };
    for (name, value) in table {
        match KEYS.iter().find(|(s, _)| s == name) {
            None => out.push(format!("{name}{}", at(None, name))),
            Some((_, allowed)) => {
                if let Some(t) = value.as_table() {
                    for key in t.keys() {
                        if !allowed.contains(&key.as_str()) {
                            out.push(format!("{name}.{key}{}", at(Some(name), key)));
                        }
                    }
                }
            }
        }
    }
    out
}

fn required(section: &str, key: &str, v: Option<f64>) -> Result<f64> {
    v.ok_or_else(|| Error::Config(format!("missing key {section}.{key}")))
}

impl Config {
    /// Parses, validates and fills in defaults.
    pub fn from_toml(text: &str) -> Result<Config> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        let unknown = unknown_keys(text, &table);
        if !unknown.is_empty() {
            return Err(Error::Config(format!("unknown keys: {}", unknown.join(", "))));
        }
        if !table.contains_key("model") {
            return Err(Error::Config("missing section [model]".into()));
        }
        if let Some(s) = table.get("sinr").and_then(|v| v.as_table()) {
            for key in ["noise", "tau"] {
                if !s.contains_key(key) {
                    let line = key_line(text, Some("sinr"), "noise")
                        .or_else(|| key_line(text, Some("sinr"), "gamma"))
                        .map(|l| format!(" (section near line {l})"))
                        .unwrap_or_default();
                    return Err(Error::Config(format!("missing key sinr.{key}{line}")));
                }
            }
        }
        let mut cfg: Config = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.fill_defaults()?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    fn fill_defaults(&mut self) -> Result<()> {
        let guard = self.raw_model()?.default_guard();
        let w = &mut self.window;
        if w.lower.is_none() && w.upper.is_none() {
            let side = *w.side.get_or_insert(20.0);
            w.lower = Some(vec![0.0; w.dim]);
            w.upper = Some(vec![side; w.dim]);
        }
        if w.guard.is_none() {
            w.guard = Some(if w.boundary == Boundary::Periodic { 0.0 } else { guard });
        }
        let e = &mut self.estimator;
        if e.n.is_none() {
            let lower = self.window.lower.as_ref().expect("filled");
            let upper = self.window.upper.as_ref().expect("filled");
            let short = lower
                .iter()
                .zip(upper)
                .take(2)
                .map(|(a, b)| b - a)
                .fold(f64::INFINITY, f64::min);
            let long = lower.iter().zip(upper).take(2).map(|(a, b)| b - a).fold(0.0, f64::max);
            e.n = Some((long / e.alpha).min(short));
        }
        Ok(())
    }

    fn raw_model(&self) -> Result<IntensityModel> {
        let m = &self.model;
        let model = match m.kind {
            ModelKind::Poisson => IntensityModel::Homogeneous,
            ModelKind::ShotNoise => IntensityModel::shot_noise(
                required("model", "site_rate", m.site_rate)?,
                required("model", "kernel_radius", m.kernel_radius)?,
            ),
            ModelKind::Modulated => IntensityModel::modulated(
                required("model", "inside", m.inside)?,
                required("model", "outside", m.outside)?,
                required("model", "germ_intensity", m.germ_intensity)?,
                required("model", "grain_radius", m.grain_radius)?,
            ),
            ModelKind::Voronoi => IntensityModel::voronoi(required("model", "site_rate", m.site_rate)?),
            ModelKind::Delaunay => IntensityModel::delaunay(required("model", "site_rate", m.site_rate)?),
        };
        model.check().map_err(|e| Error::Config(format!("[model]: {e}")))?;
        Ok(model)
    }

    /// The intensity model, normalized unless `normalize = false`.
    pub fn intensity_model(&self) -> Result<IntensityModel> {
        let raw = self.raw_model()?;
        if self.model.normalize {
            raw.normalize(self.window.dim).map_err(|e| Error::Config(format!("[model]: {e}")))
        } else {
            Ok(raw)
        }
    }

    pub fn path_loss(&self) -> Result<PathLoss> {
        let p = &self.pathloss;
        let l = match p.kind {
            LossKind::Truncated => PathLoss::truncated(p.cap, p.exponent),
            LossKind::Compact => PathLoss::compact(p.cap, p.exponent, required("pathloss", "cutoff", p.cutoff)?),
        };
        l.map_err(|e| Error::Config(format!("[pathloss]: {e}")))
    }

    pub fn sinr_params(&self) -> Result<SinrParams> {
        SinrParams::new(self.sinr.noise, self.sinr.tau, self.sinr.gamma)
            .map_err(|e| Error::Config(format!("[sinr]: {e}")))
    }

    pub fn window(&self) -> Result<Window> {
        let w = &self.window;
        let mut lower = [0.0; 3];
        let mut upper = [0.0; 3];
        let lo = w.lower.as_ref().expect("filled");
        let hi = w.upper.as_ref().expect("filled");
        if lo.len() != w.dim || hi.len() != w.dim {
            return Err(Error::Config(format!("window.lower and window.upper need {} entries", w.dim)));
        }
        lower[..w.dim].copy_from_slice(lo);
        upper[..w.dim].copy_from_slice(hi);
        Window::new(w.dim, lower, upper, w.boundary, w.guard.unwrap_or(0.0))
            .map_err(|e| Error::Config(format!("[window]: {e}")))
    }

    pub fn stabilization(&self) -> Stabilization {
        match self.estimator.stabilization {
            StabilizationKind::ConstantRange => Stabilization::ConstantRange,
            StabilizationKind::EmpiricalVoronoi => Stabilization::EmpiricalVoronoi,
            StabilizationKind::Skip => Stabilization::Skip,
        }
    }

    pub fn estimator_config(&self) -> Result<EstimatorConfig> {
        let e = &self.estimator;
        let proxy = match e.proxy {
            ProxyKind::CrossingHard => Proxy::CrossingHard {
                alpha: e.alpha,
                n: e.n.expect("filled"),
            },
            ProxyKind::LargestFraction => Proxy::LargestFraction { threshold: e.threshold },
        };
        let cfg = EstimatorConfig {
            model: self.intensity_model()?,
            loss: self.path_loss()?,
            sinr: self.sinr_params()?,
            window: self.window()?,
            graph: e.graph,
            r: e.r,
            reps: e.reps,
            proxy,
            p_succ: e.p_succ,
            tolerance: e.tolerance,
            gamma_tolerance: e.gamma_tolerance,
            max_iter: e.max_iter,
            seed: e.seed,
            timing: e.timing,
        };
        cfg.check().map_err(|e| Error::Config(format!("[estimator]: {e}")))?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.intensity_model()?;
        self.window()?;
        self.estimator_config()?;
        Ok(())
    }
}

pub fn load_config(path: &Path) -> Result<Config> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    Config::from_toml(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = Config::from_toml("[model]\nkind = \"poisson\"\n").unwrap();
        assert_eq!(c.window.side, Some(20.0));
        assert_eq!(c.window.guard, Some(0.0));
        assert_eq!(c.estimator.reps, 200);
        assert_eq!(c.estimator.n, Some(20.0 / 3.0));
        let e = c.estimator_config().unwrap();
        assert_eq!(e.model, IntensityModel::Homogeneous);
        assert_eq!(e.sinr, SinrParams::new(0.25, 1.0, 0.0).unwrap());
        let echo = c.to_toml();
        assert!(echo.contains("reps = 200"));
        assert_eq!(Config::from_toml(&echo).unwrap(), c);
    }

    #[test]
    fn full_config_round_trips() {
        let text = r#"
[model]
kind = "modulated"
inside = 4.0
outside = 0.5
germ_intensity = 0.2
grain_radius = 1.0

[pathloss]
kind = "compact"
cap = 1.0
exponent = 3.5
cutoff = 3.0

[sinr]
noise = 0.1
tau = 2.0
gamma = 0.01

[window]
lower = [0.0, 0.0]
upper = [30.0, 10.0]
boundary = "hard"

[estimator]
graph = "sinr"
reps = 10
lambdas = [1.0, 2.0]
seed = 99
"#;
        let c = Config::from_toml(text).unwrap();
        assert_eq!(c.window.guard, Some(2.0));
        assert_eq!(c.estimator.n, Some(10.0));
        let m = c.intensity_model().unwrap();
        assert!((m.mean_mass(2) - 1.0).abs() < 1e-12);
        assert_eq!(Config::from_toml(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn unknown_keys_are_listed_with_lines() {
        let err = Config::from_toml("[model]\nkind = \"poisson\"\ncolour = 1\n\n[sinr]\nnoise = 1\ntau = 1\nbeta = 2\n")
            .unwrap_err()
            .to_string();
        assert!(err.contains("model.colour (line 3)"), "{err}");
        assert!(err.contains("sinr.beta (line 8)"), "{err}");
        let err = Config::from_toml("[model]\nkind = \"poisson\"\n[extra]\n").unwrap_err().to_string();
        assert!(err.contains("extra"));
    }

    #[test]
    fn missing_tau_is_named() {
        let err = Config::from_toml("[model]\nkind = \"poisson\"\n[sinr]\nnoise = 1.0\n")
            .unwrap_err()
            .to_string();
        assert!(err.contains("sinr.tau"), "{err}");
        let err = Config::from_toml("[model]\nkind = \"voronoi\"\n").unwrap_err().to_string();
        assert!(err.contains("model.site_rate"), "{err}");
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = Config::from_toml("[model]\nkind = \"poisson\"\n[sinr]\nnoise = = 1\n").unwrap_err().to_string();
        assert!(err.contains("line 4"), "{err}");
    }

    #[test]
    fn invalid_values_are_config_errors() {
        let err = Config::from_toml("[model]\nkind = \"poisson\"\n[estimator]\np_succ = 1.5\n").unwrap_err();
        assert!(matches!(err, Error::Config(_)));
        let err = Config::from_toml("[model]\nkind = \"poisson\"\n[window]\nside = -1.0\n").unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }
}
