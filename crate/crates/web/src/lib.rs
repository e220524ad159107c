//! Browser bindings: sample a Cox pattern once, then redraw its SINR graph
//! as the interference factor changes.

use coxnet::environment::{sample_cox, sample_environment, Environment, IntensityModel, PointPattern};
use coxnet::graphs::{max_in_degree_bound, SinrNetwork};
use coxnet::pathloss::{PathLoss, SinrParams};
use coxnet::render::{render_svg, RenderStyle};
use coxnet::{Boundary, SeedPath, Window};
use wasm_bindgen::prelude::*;

fn err(e: coxnet::Error) -> String {
    e.to_string()
}

fn model(name: &str) -> Result<IntensityModel, String> {
    let m = match name {
        "poisson" => IntensityModel::Homogeneous,
        "shot_noise" => IntensityModel::shot_noise(0.3, 1.5),
        "modulated" => IntensityModel::modulated(1.0, 0.1, 0.2, 1.5),
        "voronoi" => IntensityModel::voronoi(0.5),
        "delaunay" => IntensityModel::delaunay(0.5),
        other => return Err(format!("unknown model {other:?}")),
    };
    m.normalize(2).map_err(err)
}

#[wasm_bindgen]
pub struct Demo {
    env: Environment,
    pattern: PointPattern,
}

#[wasm_bindgen]
impl Demo {
    /// Samples `model` with intensity `lambda` on a periodic square.
    #[wasm_bindgen(constructor)]
    pub fn new(model_name: &str, side: f64, lambda: f64, seed: u32) -> Result<Demo, String> {
        let m = model(model_name)?;
        let w = Window::square(side, Boundary::Periodic).map_err(err)?;
        let s = SeedPath::new(u64::from(seed));
        let env = sample_environment(&m, &w, &s.derive("env", 0)).map_err(err)?;
        let pattern = sample_cox(&env, lambda, &s.derive("points", 0)).map_err(err)?;
        Ok(Demo { env, pattern })
    }

    pub fn points(&self) -> usize {
        self.pattern.len()
    }

    /// SVG drawing of the undirected SINR graph with path loss
    /// `min(cap, r^-exponent)`.
    #[allow(clippy::too_many_arguments)]
    pub fn sinr_svg(
        &self,
        cap: f64,
        exponent: f64,
        noise: f64,
        tau: f64,
        gamma: f64,
        overlay: bool,
    ) -> Result<String, String> {
        let l = PathLoss::truncated(cap, exponent).map_err(err)?;
        let sp = SinrParams::new(noise, tau, gamma).map_err(err)?;
        let g = SinrNetwork::new(&self.pattern, l).graph(&sp).map_err(err)?;
        let env = overlay.then_some(&self.env);
        render_svg(&self.pattern, &g, env, &RenderStyle::default()).map_err(err)
    }

    /// Edge counts of the SINR graph for each value in `gammas`.
    pub fn edge_counts(
        &self,
        cap: f64,
        exponent: f64,
        noise: f64,
        tau: f64,
        gammas: Vec<f64>,
    ) -> Result<Vec<u32>, String> {
        let l = PathLoss::truncated(cap, exponent).map_err(err)?;
        let net = SinrNetwork::new(&self.pattern, l);
        gammas
            .iter()
            .map(|&gamma| {
                let sp = SinrParams::new(noise, tau, gamma).map_err(err)?;
                Ok(net.graph(&sp).map_err(err)?.edge_count() as u32)
            })
            .collect()
    }
}

/// Largest in-degree any directed SINR graph can have at `(tau, gamma)`.
#[wasm_bindgen]
pub fn in_degree_bound(tau: f64, gamma: f64) -> Result<u32, String> {
    let sp = SinrParams::new(0.0, tau, gamma).map_err(err)?;
    max_in_degree_bound(&sp).map(|b| b as u32).map_err(err)
}
