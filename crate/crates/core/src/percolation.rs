//! Finite-window percolation functionals.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::dsu::components;
use crate::environment::{Environment, PointPattern, Realization};
use crate::error::{Error, Result};
use crate::geometry::{Aabb, Boundary, Point, Window};
use crate::graphs::{gilbert, shifted_interference, SpatialGraph};
use crate::io::num;
use crate::par;
use crate::pathloss::{PathLoss, SinrParams};
use crate::support::support_map;

#[derive(Clone, Debug, PartialEq)]
pub struct ClusterStats {
    pub largest_fraction: f64,
    pub count: usize,
    /// `(size, number of clusters of that size)`, ascending in size.
    pub sizes: Vec<(usize, usize)>,
}

pub fn largest_cluster_stats(g: &SpatialGraph) -> ClusterStats {
    if g.n == 0 {
        return ClusterStats {
            largest_fraction: 0.0,
            count: 0,
            sizes: Vec::new(),
        };
    }
    let c = g.components();
    let mut sizes: Vec<usize> = c.sizes.clone();
    sizes.sort_unstable();
    let mut hist: Vec<(usize, usize)> = Vec::new();
    for s in sizes {
        match hist.last_mut() {
            Some((size, count)) if *size == s => *count += 1,
            _ => hist.push((s, 1)),
        }
    }
    ClusterStats {
        largest_fraction: c.largest() as f64 / g.n as f64,
        count: c.count(),
        sizes: hist,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// Left to right, across the long side.
    Hard,
    /// Bottom to top, across the short side.
    Easy,
}

/// The rectangle `anchor + [0, alpha n] x [0, n]` and a Gilbert radius.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossingSpec {
    pub anchor: Point,
    pub alpha: f64,
    pub n: f64,
    pub direction: Direction,
    pub r: f64,
}

impl CrossingSpec {
    pub fn hard(anchor: Point, alpha: f64, n: f64, r: f64) -> Self {
        CrossingSpec {
            anchor,
            alpha,
            n,
            direction: Direction::Hard,
            r,
        }
    }

    pub fn check(&self) -> Result<()> {
        if !(self.alpha >= 1.0) || !(self.n > 0.0) || !(self.r > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "crossing needs alpha >= 1, n > 0, r > 0 (got {}, {}, {})",
                self.alpha, self.n, self.r
            )));
        }
        Ok(())
    }

    pub fn rect(&self) -> Aabb {
        let a = self.anchor;
        Aabb::rect(a.x(), a.y(), a.x() + self.alpha * self.n, a.y() + self.n)
    }
}

/// Points of `p` inside the rectangle, in rectangle-local coordinates. On
/// a torus the rectangle is read through the wrap, and edges are never
/// allowed across the seam because the local copy has hard boundaries.
fn local_points(p: &PointPattern, spec: &CrossingSpec) -> Result<(Window, Vec<Point>)> {
    let w = &p.window;
    let (width, height) = (spec.alpha * spec.n, spec.n);
    if w.dim != 2 {
        return Err(Error::UnsupportedDimension(w.dim));
    }
    let fits = if w.is_periodic() {
        width <= w.side(0) * (1.0 + 1e-12) && height <= w.side(1) * (1.0 + 1e-12)
    } else {
        let region = w.region();
        region.expand(1e-12 * region.diameter()).contains_box(&spec.rect())
    };
    if !fits {
        return Err(Error::BoxOutsideRegion);
    }
    let local = Window::new(2, [0.0; 3], [width, height, 0.0], Boundary::Hard, 0.0)?;
    let mut pts = Vec::new();
    for x in &p.points {
        let mut u = x.x() - spec.anchor.x();
        let mut v = x.y() - spec.anchor.y();
        if w.is_periodic() {
            u = u.rem_euclid(w.side(0));
            v = v.rem_euclid(w.side(1));
        }
        if (0.0..=width).contains(&u) && (0.0..=height).contains(&v) {
            pts.push(Point::new2(u, v));
        }
    }
    Ok((local, pts))
}

/// Whether one Gilbert cluster inside the rectangle has points within
/// `r/2` of both target sides.
pub fn crossing(p: &PointPattern, spec: &CrossingSpec) -> Result<bool> {
    spec.check()?;
    let (local, pts) = local_points(p, spec)?;
    if pts.is_empty() {
        return Ok(false);
    }
    let sub = PointPattern::from_points(local, pts)?;
    let g = gilbert(&sub, spec.r);
    let c = g.components();
    let axis = match spec.direction {
        Direction::Hard => 0,
        Direction::Easy => 1,
    };
    let far = local.side(axis);
    let h = spec.r / 2.0;
    let mut near_start = vec![false; sub.len()];
    for (i, x) in sub.points.iter().enumerate() {
        if x.0[axis] < h {
            near_start[c.labels[i]] = true;
        }
    }
    Ok(sub
        .points
        .iter()
        .enumerate()
        .any(|(i, x)| far - x.0[axis] < h && near_start[c.labels[i]]))
}

/// Crossing test on an existing graph over `p`. Edges leaving the
/// rectangle or wrapping around a torus seam are ignored; target sides are
/// reached within `spec.r / 2`.
pub fn crossing_in(p: &PointPattern, g: &SpatialGraph, spec: &CrossingSpec) -> Result<bool> {
    spec.check()?;
    let (local, _) = local_points(p, spec)?;
    let w = &p.window;
    let (width, height) = (local.side(0), local.side(1));
    let mut pos: Vec<Option<Point>> = vec![None; p.len()];
    for (i, x) in p.points.iter().enumerate() {
        let mut u = x.x() - spec.anchor.x();
        let mut v = x.y() - spec.anchor.y();
        if w.is_periodic() {
            u = u.rem_euclid(w.side(0));
            v = v.rem_euclid(w.side(1));
        }
        if (0.0..=width).contains(&u) && (0.0..=height).contains(&v) {
            pos[i] = Some(Point::new2(u, v));
        }
    }
    let mut ds = crate::dsu::DisjointSets::new(p.len());
    for (a, b) in g.edges() {
        if let (Some(pa), Some(pb)) = (pos[a], pos[b]) {
            let local_d2 = (pa.x() - pb.x()).powi(2) + (pa.y() - pb.y()).powi(2);
            if local_d2 <= w.dist2(&p.points[a], &p.points[b]) * (1.0 + 1e-9) {
                ds.union(a, b);
            }
        }
    }
    let axis = match spec.direction {
        Direction::Hard => 0,
        Direction::Easy => 1,
    };
    let far = local.side(axis);
    let h = spec.r / 2.0;
    let mut near_start = vec![false; p.len()];
    for i in 0..p.len() {
        if let Some(x) = pos[i] {
            if x.0[axis] < h {
                let root = ds.find(i);
                near_start[root] = true;
            }
        }
    }
    for i in 0..p.len() {
        if let Some(x) = pos[i] {
            if far - x.0[axis] < h && near_start[ds.find(i)] {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Stabilization {
    /// Radius taken as the dependence range of the model.
    ConstantRange,
    /// Twice the largest distance from a 5x5 probe grid to the nearest
    /// tessellation site.
    EmpiricalVoronoi,
    Skip,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoodSiteSpec {
    pub n: f64,
    pub r: f64,
    pub stabilization: Stabilization,
}

impl GoodSiteSpec {
    pub fn min_diameter(&self) -> f64 {
        self.n / 3.0
    }

    /// Diameter threshold in the essential-connectedness condition.
    pub fn small_diameter(&self) -> f64 {
        self.n / 9.0
    }

    pub fn check(&self) -> Result<()> {
        if !(self.n > 0.0) || !(self.r > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "good-site scale {} and radius {} must be > 0",
                self.n, self.r
            )));
        }
        Ok(())
    }

    /// Checks `upsilon_0 < r < r_B` for the SINR parameters in use.
    pub fn check_radius(&self, l: &PathLoss, sp: &SinrParams) -> Result<()> {
        let rb = crate::pathloss::snr_radius(l, sp)?;
        if !(self.r > l.plateau_end() && self.r < rb) {
            return Err(Error::InvalidParameter(format!(
                "r = {} must lie in ({}, {})",
                self.r,
                l.plateau_end(),
                rb
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reason {
    Good,
    Stabilization,
    NoPointInLargeSupport,
    NotConnected,
}

impl Reason {
    pub fn code(&self) -> u8 {
        match self {
            Reason::Good => 0,
            Reason::Stabilization => 1,
            Reason::NoPointInLargeSupport => 2,
            Reason::NotConnected => 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GoodSiteReport {
    pub good: bool,
    pub reason: Reason,
    /// Whether some large support component of the block is cut by the
    /// block boundary.
    pub touches_boundary: bool,
    pub stabilization_radius: f64,
}

/// `Q_s(n z)`.
pub fn site_box(dim: usize, z: [i64; 3], n: f64, s: f64) -> Aabb {
    let mut c = [0.0; 3];
    for i in 0..dim {
        c[i] = n * z[i] as f64;
    }
    Aabb::cube(dim, Point(c), s)
}

fn stabilization_radius(env: &Environment, block: &Aabb, mode: Stabilization) -> Result<f64> {
    match mode {
        Stabilization::Skip => Ok(0.0),
        Stabilization::ConstantRange => Ok(env.model.dependence_range().unwrap_or(f64::INFINITY)),
        Stabilization::EmpiricalVoronoi => {
            let Realization::Segments { sites, .. } = &env.realization else {
                return Err(Error::InvalidParameter(
                    "empirical stabilization needs a tessellation environment".into(),
                ));
            };
            if block.dim != 2 {
                return Err(Error::UnsupportedDimension(block.dim));
            }
            let mut worst: f64 = 0.0;
            for a in 0..5 {
                for b in 0..5 {
                    let q = Point::new2(
                        block.lo[0] + block.side(0) * a as f64 / 4.0,
                        block.lo[1] + block.side(1) * b as f64 / 4.0,
                    );
                    let near = sites
                        .iter()
                        .map(|s| env.window.dist(s, &q))
                        .fold(f64::INFINITY, f64::min);
                    worst = worst.max(near);
                }
            }
            Ok(2.0 * worst)
        }
    }
}

/// Ids of points of `p` lying in `Xi_n(n z)`, and whether a large component
/// touches the block boundary.
fn xi_points(p: &PointPattern, env: &Environment, spec: &GoodSiteSpec, z: [i64; 3]) -> Result<(Vec<usize>, bool)> {
    let dim = p.window.dim;
    let block = site_box(dim, z, spec.n, spec.n);
    let map = support_map(env, &block)?;
    let large = map.large(spec.min_diameter());
    let touches = large.iter().any(|&c| map.components[c].touches_boundary);
    let mut keep = vec![false; map.components.len()];
    for &c in &large {
        keep[c] = true;
    }
    let ids = p
        .points
        .iter()
        .enumerate()
        .filter(|(_, x)| block.contains(x) && map.locate(x).is_some_and(|c| keep[c]))
        .map(|(i, _)| i)
        .collect();
    Ok((ids, touches))
}

fn neighbor_sites(dim: usize, z: [i64; 3]) -> Vec<[i64; 3]> {
    let span = |i: usize| if i < dim { -1..=1 } else { 0..=0 };
    let mut out = Vec::new();
    for dz in span(2) {
        for dy in span(1) {
            for dx in span(0) {
                out.push([z[0] + dx, z[1] + dy, z[2] + dz]);
            }
        }
    }
    out
}

/// Checks whether the site `z` is n-good. Clause (3) also asks the points
/// of `Xi_n(n z)` to be connected among themselves, which is the case
/// `z' = z` of the neighbourhood condition.
pub fn n_good(p: &PointPattern, env: &Environment, spec: &GoodSiteSpec, z: [i64; 3]) -> Result<GoodSiteReport> {
    spec.check()?;
    let dim = p.window.dim;
    let outer = site_box(dim, z, spec.n, 6.0 * spec.n);
    let region = p.window.region();
    if !region.expand(1e-12 * region.diameter()).contains_box(&outer) {
        return Err(Error::BoxOutsideRegion);
    }
    let block = site_box(dim, z, spec.n, spec.n);
    let rad = stabilization_radius(env, &block, spec.stabilization)?;
    let (own, touches) = xi_points(p, env, spec, z)?;
    let report = |good: bool, reason: Reason| GoodSiteReport {
        good,
        reason,
        touches_boundary: touches,
        stabilization_radius: rad,
    };
    if !(rad < spec.n / 2.0) {
        return Ok(report(false, Reason::Stabilization));
    }
    if own.is_empty() {
        return Ok(report(false, Reason::NoPointInLargeSupport));
    }
    let mut targets = Vec::new();
    for zz in neighbor_sites(dim, z) {
        targets.extend(xi_points(p, env, spec, zz)?.0);
    }
    let inside: Vec<usize> = (0..p.len()).filter(|&i| outer.contains(&p.points[i])).collect();
    let mut local = vec![usize::MAX; p.len()];
    for (k, &i) in inside.iter().enumerate() {
        local[i] = k;
    }
    let sub = PointPattern::from_points(p.window, inside.iter().map(|&i| p.points[i]).collect())?;
    let g = gilbert(&sub, spec.r);
    let comps = components(sub.len(), &g.edges())?;
    let root = comps.labels[local[own[0]]];
    let connected = targets.iter().all(|&i| comps.labels[local[i]] == root);
    Ok(if connected {
        report(true, Reason::Good)
    } else {
        report(false, Reason::NotConnected)
    })
}

/// `B_{n,M}(z) = { I_{6n}(n z) <= M }`.
pub fn interference_event(p: &PointPattern, z: [i64; 3], n: f64, m: f64, l: &PathLoss) -> Result<bool> {
    Ok(site_interference(p, z, n, l)? <= m)
}

/// `I_{6n}(n z)`.
pub fn site_interference(p: &PointPattern, z: [i64; 3], n: f64, l: &PathLoss) -> Result<f64> {
    let mut c = [0.0; 3];
    for i in 0..p.window.dim {
        c[i] = n * z[i] as f64;
    }
    Ok(shifted_interference(p, &Point(c), 6.0 * n, l)?.total)
}

/// Largest interference factor for which links shorter than `r` survive an
/// interference level of at most `M`.
pub fn admissible_gamma(l: &PathLoss, r: f64, sp: &SinrParams, m: f64) -> Result<f64> {
    if !(sp.noise > 0.0) || !(m > 0.0) {
        return Err(Error::InvalidParameter("admissible gamma needs N0 > 0 and M > 0".into()));
    }
    let rb = crate::pathloss::snr_radius(l, sp)?;
    let v0 = l.plateau_end();
    if !(r > v0 && r < rb) {
        return Err(Error::InvalidParameter(format!("r = {r} must lie in ({v0}, {rb})")));
    }
    Ok(sp.noise / m * (l.value(r) / (sp.tau * sp.noise) - 1.0))
}

/// Number of points in a small square beyond which all of them are
/// isolated in the SINR graph.
pub fn isolation_threshold(m: f64, sp: &SinrParams) -> Result<f64> {
    if !(sp.gamma > 0.0) || !(sp.tau > 0.0) || !(sp.noise > 0.0) || !(m > 0.0) {
        return Err(Error::InvalidParameter(
            "isolation threshold needs gamma, tau, N0, M > 0".into(),
        ));
    }
    let tg = sp.tau * sp.gamma;
    Ok((1.0 + 2.0 * tg) * m / (sp.tau * tg * sp.noise))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SiteRow {
    pub z: [i64; 3],
    pub good: bool,
    pub reason: Reason,
    pub interference: f64,
    pub b_event: bool,
}

/// Sites whose `Q_{6n}` box fits inside the window region.
pub fn admissible_sites(w: &Window, n: f64) -> Vec<[i64; 3]> {
    let region = w.region();
    let mut ranges = [(0i64, 0i64); 3];
    for (i, rg) in ranges.iter_mut().enumerate().take(w.dim) {
        let lo = ((region.lo[i] + 3.0 * n) / n - 1e-9).ceil() as i64;
        let hi = ((region.hi[i] - 3.0 * n) / n + 1e-9).floor() as i64;
        *rg = (lo, hi);
    }
    let mut out = Vec::new();
    for z2 in ranges[2].0..=ranges[2].1 {
        for z1 in ranges[1].0..=ranges[1].1 {
            for z0 in ranges[0].0..=ranges[0].1 {
                out.push([z0, z1, z2]);
            }
        }
    }
    out
}

pub fn site_sweep(
    p: &PointPattern,
    env: &Environment,
    spec: &GoodSiteSpec,
    m: f64,
    l: &PathLoss,
) -> Result<Vec<SiteRow>> {
    let sites = admissible_sites(&p.window, spec.n);
    par::map_range(sites.len(), |k| {
        let z = sites[k];
        let rep = n_good(p, env, spec, z)?;
        let i = site_interference(p, z, spec.n, l)?;
        Ok(SiteRow {
            z,
            good: rep.good,
            reason: rep.reason,
            interference: i,
            b_event: i <= m,
        })
    })
    .into_iter()
    .collect()
}

pub fn site_sweep_csv(rows: &[SiteRow]) -> String {
    let mut out = String::from("zx,zy,good,reason,I6n,B_event\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.z[0],
            r.z[1],
            u8::from(r.good),
            r.reason.code(),
            num(r.interference),
            u8::from(r.b_event)
        );
    }
    out
}
