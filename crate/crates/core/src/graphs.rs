//! Gilbert, SINR and k-nearest-neighbour graphs over point patterns.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::dsu::{components, Components};
use crate::environment::PointPattern;
use crate::error::{Error, Result};
use crate::geometry::{Aabb, Point, Window};
use crate::io::histogram_csv;
use crate::par;
use crate::pathloss::{snr_radius, PathLoss, SinrParams};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum RuleTag {
    Gilbert { r: f64 },
    Sinr { noise: f64, tau: f64, gamma: f64 },
    Knn { k: usize, bidirectional: bool },
}

/// Adjacency lists are sorted. For directed graphs `adj[i]` holds the
/// targets of arcs leaving `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpatialGraph {
    pub n: usize,
    pub directed: bool,
    pub adj: Vec<Vec<usize>>,
    pub rule: RuleTag,
    pub window: Window,
}

impl SpatialGraph {
    fn from_adj(adj: Vec<Vec<usize>>, directed: bool, rule: RuleTag, window: Window) -> Self {
        SpatialGraph {
            n: adj.len(),
            directed,
            adj,
            rule,
            window,
        }
    }

    fn from_arcs(n: usize, arcs: &[(usize, usize)], directed: bool, rule: RuleTag, window: Window) -> Self {
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in arcs {
            adj[a].push(b);
            if !directed {
                adj[b].push(a);
            }
        }
        for l in &mut adj {
            l.sort_unstable();
            l.dedup();
        }
        Self::from_adj(adj, directed, rule, window)
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj.get(a).is_some_and(|l| l.binary_search(&b).is_ok())
    }

    /// Undirected edges as `(i, j)` with `i < j`, or all arcs when directed.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, l) in self.adj.iter().enumerate() {
            for &j in l {
                if self.directed || i < j {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        let s: usize = self.adj.iter().map(Vec::len).sum();
        if self.directed {
            s
        } else {
            s / 2
        }
    }

    /// Degrees, or out-degrees when directed.
    pub fn degrees(&self) -> Vec<usize> {
        self.adj.iter().map(Vec::len).collect()
    }

    pub fn in_degrees(&self) -> Vec<usize> {
        if !self.directed {
            return self.degrees();
        }
        let mut d = vec![0; self.n];
        for l in &self.adj {
            for &j in l {
                d[j] += 1;
            }
        }
        d
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    /// `hist[k]` is the number of vertices of degree `k` (in-degree when
    /// directed).
    pub fn degree_histogram(&self) -> Vec<usize> {
        let deg = self.in_degrees();
        let mut hist = vec![0; deg.iter().max().map_or(1, |m| m + 1)];
        for d in deg {
            hist[d] += 1;
        }
        hist
    }

    /// Whether every edge of `self` is an edge of `other`.
    pub fn is_subgraph_of(&self, other: &SpatialGraph) -> bool {
        self.n == other.n && self.edges().iter().all(|&(a, b)| other.has_edge(a, b))
    }

    /// Connected components, ignoring arc directions.
    pub fn components(&self) -> Components {
        components(self.n, &self.edges()).expect("edge ids are in range")
    }

    /// Subgraph induced by `keep` (given as ascending ids), relabelled
    /// `0..keep.len()`.
    pub fn induced(&self, keep: &[usize]) -> SpatialGraph {
        let mut map = vec![usize::MAX; self.n];
        for (k, &i) in keep.iter().enumerate() {
            map[i] = k;
        }
        let adj = keep
            .iter()
            .map(|&i| {
                let mut l: Vec<usize> =
                    self.adj[i].iter().filter(|&&j| map[j] != usize::MAX).map(|&j| map[j]).collect();
                l.sort_unstable();
                l
            })
            .collect();
        Self::from_adj(adj, self.directed, self.rule, self.window)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(if self.directed { "src,dst,directed\n" } else { "src,dst\n" });
        for (a, b) in self.edges() {
            if self.directed {
                let _ = writeln!(out, "{a},{b},1");
            } else {
                let _ = writeln!(out, "{a},{b}");
            }
        }
        out
    }

    pub fn degree_csv(&self) -> String {
        histogram_csv(&self.degree_histogram())
    }
}

/// Gilbert graph: an edge joins two points at distance strictly below `r`.
pub fn gilbert(p: &PointPattern, r: f64) -> SpatialGraph {
    let rule = RuleTag::Gilbert { r };
    if !(r > 0.0) || p.len() < 2 {
        return SpatialGraph::from_adj(vec![Vec::new(); p.len()], false, rule, p.window);
    }
    let grid = p.grid(r);
    let adj = par::map_range(p.len(), |i| grid.neighbors_within(&p.points, &p.points[i], r, Some(i)));
    SpatialGraph::from_adj(adj, false, rule, p.window)
}

fn sum_over<F: Fn(usize) -> bool>(p: &PointPattern, y: &Point, l: &PathLoss, skip: F) -> f64 {
    let mut s = 0.0;
    for (k, x) in p.points.iter().enumerate() {
        if !skip(k) {
            s += l.value(p.window.dist(x, y));
        }
    }
    s
}

/// Total power received at `y` from all points whose ids are not in
/// `exclude`.
pub fn interference_at(p: &PointPattern, y: &Point, l: &PathLoss, exclude: &[usize]) -> f64 {
    sum_over(p, y, l, |k| exclude.contains(&k))
}

/// Shot-noise `I_j = sum_{k != j} l(|X_k - X_j|)` at every point.
#[derive(Clone, Debug, PartialEq)]
pub struct InterferenceField {
    pub values: Vec<f64>,
    pub periodic: bool,
}

impl InterferenceField {
    /// Each entry is summed in a fixed order, so the result does not depend
    /// on how the work is split.
    pub fn new(p: &PointPattern, l: &PathLoss) -> Self {
        let n = p.len();
        let values = match l.support_end() {
            Some(cut) if cut < p.window.half_min_side() => {
                let grid = p.grid(cut);
                let cut2 = cut * cut;
                par::map_range(n, |j| {
                    let y = &p.points[j];
                    let mut s = 0.0;
                    grid.for_each_candidate(y, cut, |k| {
                        let d2 = p.window.dist2(&p.points[k], y);
                        if k != j && d2 < cut2 {
                            s += l.value(d2.sqrt());
                        }
                    });
                    s
                })
            }
            _ => par::map_range(n, |j| sum_over(p, &p.points[j], l, |k| k == j)),
        };
        InterferenceField {
            values,
            periodic: p.window.is_periodic(),
        }
    }

    pub fn get(&self, j: usize) -> f64 {
        self.values[j]
    }
}

/// `I_a(z)` split into the part from points inside the cube of side
/// `2a sqrt(d)` around `z` and the rest.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShiftedInterference {
    pub total: f64,
    pub inner: f64,
    pub outer: f64,
}

pub fn shifted_interference(p: &PointPattern, z: &Point, a: f64, l: &PathLoss) -> Result<ShiftedInterference> {
    if !(a > 0.0) {
        return Err(Error::InvalidParameter(format!("shift {a} must be > 0")));
    }
    let d = p.window.dim;
    let half = a * (d as f64).sqrt();
    let (mut inner, mut outer) = (0.0, 0.0);
    for x in &p.points {
        let v = p.window.displacement(z, x);
        let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        let val = l.shifted_value(a, d, r);
        if v.iter().take(d).all(|c| c.abs() <= half) {
            inner += val;
        } else {
            outer += val;
        }
    }
    Ok(ShiftedInterference {
        total: inner + outer,
        inner,
        outer,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SinrValue {
    Ratio(f64),
    Edge(bool),
}

/// SINR of the link `i -> j`, computed by direct summation. With zero
/// noise only the decision `l > tau gamma I` is meaningful.
pub fn sinr_value(p: &PointPattern, i: usize, j: usize, sp: &SinrParams, l: &PathLoss) -> Result<SinrValue> {
    let n = p.len();
    for idx in [i, j] {
        if idx >= n {
            return Err(Error::IndexOutOfRange { index: idx, len: n });
        }
    }
    if i == j {
        return Err(Error::InvalidParameter("SINR needs two distinct points".into()));
    }
    let signal = l.value(p.window.dist(&p.points[i], &p.points[j]));
    let interference = interference_at(p, &p.points[j], l, &[i, j]);
    Ok(if sp.noise > 0.0 {
        SinrValue::Ratio(signal / (sp.noise + sp.gamma * interference))
    } else {
        SinrValue::Edge(signal > sp.tau * sp.gamma * interference)
    })
}

/// A realization with its interference field, from which SINR graphs for
/// many parameter values can be built without recomputing the field.
pub struct SinrNetwork<'a> {
    pattern: &'a PointPattern,
    loss: PathLoss,
    field: InterferenceField,
}

impl<'a> SinrNetwork<'a> {
    pub fn new(pattern: &'a PointPattern, loss: PathLoss) -> Self {
        let field = InterferenceField::new(pattern, &loss);
        SinrNetwork { pattern, loss, field }
    }

    pub fn field(&self) -> &InterferenceField {
        &self.field
    }

    /// Arc `i -> j` passes iff `l_ij / (N0 + gamma (I_j - l_ij)) > tau`,
    /// evaluated as `l_ij - tau N0 > tau gamma (I_j - l_ij)`. Both sides
    /// are monotone in `gamma` under rounding, so arc sets are nested.
    pub fn digraph(&self, sp: &SinrParams) -> Result<SpatialGraph> {
        sp.check()?;
        let p = self.pattern;
        let l = &self.loss;
        let rule = RuleTag::Sinr {
            noise: sp.noise,
            tau: sp.tau,
            gamma: sp.gamma,
        };
        let n = p.len();
        if n < 2 || sp.tau * sp.noise >= l.cap() {
            return Ok(SpatialGraph::from_adj(vec![Vec::new(); n], true, rule, p.window));
        }
        if sp.gamma == 0.0 {
            let g = gilbert(p, snr_radius(l, sp)?);
            return Ok(SpatialGraph::from_adj(g.adj, true, rule, p.window));
        }
        let tg = sp.tau * sp.gamma;
        let tn = sp.tau * sp.noise;
        let rb = if sp.noise > 0.0 { snr_radius(l, sp)? } else { f64::INFINITY };
        let whole = p.window.region().diameter();
        let grid_side = if rb.is_finite() {
            rb
        } else {
            l.support_end().unwrap_or(whole)
        };
        let grid = p.grid(grid_side);
        // in-lists, then transposed into out-lists
        let incoming = par::map_range(n, |j| {
            let ij = self.field.values[j];
            let thr = sp.tau * (sp.noise + sp.gamma * ij) / (1.0 + tg);
            let reach = l.reach(thr).min(rb);
            let mut src = Vec::new();
            if reach <= 0.0 {
                return src;
            }
            let y = &p.points[j];
            let mut test = |i: usize| {
                if i == j {
                    return;
                }
                let lij = l.value(p.window.dist(&p.points[i], y));
                if lij - tn > tg * (ij - lij) {
                    src.push(i);
                }
            };
            let radius = reach * (1.0 + 1e-9) + 1e-12;
            if radius >= p.window.half_min_side() || radius >= whole {
                (0..n).for_each(&mut test);
            } else {
                grid.for_each_candidate(y, radius, &mut test);
            }
            src
        });
        let mut arcs = Vec::new();
        for (j, src) in incoming.into_iter().enumerate() {
            arcs.extend(src.into_iter().map(|i| (i, j)));
        }
        Ok(SpatialGraph::from_arcs(n, &arcs, true, rule, p.window))
    }

    /// Undirected SINR graph: an edge needs both arcs.
    pub fn graph(&self, sp: &SinrParams) -> Result<SpatialGraph> {
        Ok(symmetric_part(&self.digraph(sp)?))
    }
}

fn symmetric_part(d: &SpatialGraph) -> SpatialGraph {
    let adj = d
        .adj
        .iter()
        .enumerate()
        .map(|(i, l)| l.iter().copied().filter(|&j| d.has_edge(j, i)).collect())
        .collect();
    SpatialGraph::from_adj(adj, false, d.rule, d.window)
}

pub fn sinr_digraph(p: &PointPattern, sp: &SinrParams, l: &PathLoss) -> Result<SpatialGraph> {
    SinrNetwork::new(p, *l).digraph(sp)
}

pub fn sinr_graph(p: &PointPattern, sp: &SinrParams, l: &PathLoss) -> Result<SpatialGraph> {
    SinrNetwork::new(p, *l).graph(sp)
}

/// The `k` nearest neighbours of every point, ordered by `(distance, id)`.
pub fn nearest_neighbors(p: &PointPattern, k: usize) -> Vec<Vec<usize>> {
    let n = p.len();
    let k = k.min(n.saturating_sub(1));
    if k == 0 {
        return vec![Vec::new(); n];
    }
    let region: Aabb = p.window.region();
    let d = p.window.dim as i32;
    let density = n as f64 / region.volume();
    let start = (k as f64 / density).powf(1.0 / d as f64);
    let grid = p.grid(start);
    let limit = p.window.half_min_side().min(region.diameter());
    let key = |i: usize, x: &Point| (p.window.dist2(x, &p.points[i]), i);
    par::map_range(n, |i| {
        let x = &p.points[i];
        let mut rho = start;
        let mut cand: Vec<(f64, usize)> = loop {
            if rho >= limit {
                break (0..n).filter(|&m| m != i).map(|m| key(m, x)).collect();
            }
            let ids = grid.neighbors_within(&p.points, x, rho, Some(i));
            if ids.len() >= k {
                break ids.into_iter().map(|m| key(m, x)).collect();
            }
            rho *= 2.0;
        };
        cand.sort_by(|a, b| a.partial_cmp(b).expect("finite distances"));
        cand.truncate(k);
        cand.into_iter().map(|(_, m)| m).collect()
    })
}

/// k-NN graph. `bidirectional` keeps an edge only when each endpoint is
/// among the other's `k` nearest; otherwise one direction suffices.
pub fn knn_graph(p: &PointPattern, k: usize, bidirectional: bool) -> Result<SpatialGraph> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be >= 1".into()));
    }
    if p.len() < 2 {
        return Err(Error::InvalidParameter("k-NN graph needs at least two points".into()));
    }
    let nn = nearest_neighbors(p, k);
    let mut arcs = Vec::new();
    for (i, l) in nn.iter().enumerate() {
        for &j in l {
            if !bidirectional || nn[j].contains(&i) {
                arcs.push((i, j));
            }
        }
    }
    Ok(SpatialGraph::from_arcs(
        p.len(),
        &arcs,
        false,
        RuleTag::Knn { k, bidirectional },
        p.window,
    ))
}

/// Largest integer strictly below `1 + 1/(tau gamma)`.
pub fn max_in_degree_bound(sp: &SinrParams) -> Result<usize> {
    if !(sp.gamma > 0.0) {
        return Err(Error::InvalidParameter("degree bound needs gamma > 0".into()));
    }
    let x = 1.0 + 1.0 / (sp.tau * sp.gamma);
    let r = x.round();
    let x = if ((x - r) / x).abs() < 1e-12 { r } else { x };
    Ok(x.ceil() as usize - 1)
}
