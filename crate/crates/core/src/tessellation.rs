//! Planar Delaunay triangulations and the Voronoi / Delaunay edge sets
//! derived from them.
//!
//! Construction is incremental Bowyer–Watson. The convex hull is closed off
//! by "ghost" triangles that share a symbolic vertex at infinity, so no
//! bounding super-triangle is needed and hull triangles are never lost.

use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Aabb, Point};
use crate::seed::SeedPath;

const GHOST: usize = usize::MAX;
const NONE: usize = usize::MAX;

/// Relative magnitude of the deterministic jitter applied to input sites.
pub const JITTER: f64 = 1e-9;

#[inline]
fn orient(a: &Point, b: &Point, c: &Point) -> f64 {
    (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x())
}

/// Positive when `d` lies inside the circumcircle of the counter-clockwise
/// triangle `(a, b, c)`.
#[inline]
pub fn incircle(a: &Point, b: &Point, c: &Point, d: &Point) -> f64 {
    let (adx, ady) = (a.x() - d.x(), a.y() - d.y());
    let (bdx, bdy) = (b.x() - d.x(), b.y() - d.y());
    let (cdx, cdy) = (c.x() - d.x(), c.y() - d.y());
    let ad = adx * adx + ady * ady;
    let bd = bdx * bdx + bdy * bdy;
    let cd = cdx * cdx + cdy * cdy;
    adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx)
}

pub fn circumcenter(a: &Point, b: &Point, c: &Point) -> Point {
    let (bx, by) = (b.x() - a.x(), b.y() - a.y());
    let (cx, cy) = (c.x() - a.x(), c.y() - a.y());
    let d = 2.0 * (bx * cy - by * cx);
    let b2 = bx * bx + by * by;
    let c2 = cx * cx + cy * cy;
    let ux = (cy * b2 - by * c2) / d;
    let uy = (bx * c2 - cx * b2) / d;
    Point::new2(a.x() + ux, a.y() + uy)
}

#[derive(Clone, Copy, Debug)]
struct Tri {
    v: [usize; 3],
    /// `n[k]` is the triangle across the edge opposite `v[k]`.
    n: [usize; 3],
    alive: bool,
}

impl Tri {
    fn ghost_slot(&self) -> Option<usize> {
        self.v.iter().position(|&x| x == GHOST)
    }
}

struct Builder<'a> {
    pts: &'a [Point],
    tris: Vec<Tri>,
    last: usize,
}

impl<'a> Builder<'a> {
    fn conflict(&self, t: usize, p: &Point) -> bool {
        let tri = &self.tris[t];
        match tri.ghost_slot() {
            None => {
                let [a, b, c] = tri.v;
                incircle(&self.pts[a], &self.pts[b], &self.pts[c], p) > 0.0
            }
            Some(g) => {
                let u = &self.pts[tri.v[(g + 1) % 3]];
                let w = &self.pts[tri.v[(g + 2) % 3]];
                let o = orient(u, w, p);
                if o > 0.0 {
                    return true;
                }
                if o < 0.0 {
                    return false;
                }
                // on the hull line: in conflict only strictly between u and w
                let t = (p.x() - u.x()) * (w.x() - u.x()) + (p.y() - u.y()) * (w.y() - u.y());
                let len2 = (w.x() - u.x()).powi(2) + (w.y() - u.y()).powi(2);
                t > 0.0 && t < len2
            }
        }
    }

    fn locate(&self, p: &Point) -> usize {
        let mut t = self.last;
        let limit = 4 * self.tris.len() + 16;
        let mut offset = 0usize;
        for _ in 0..limit {
            let tri = &self.tris[t];
            if let Some(g) = tri.ghost_slot() {
                if self.conflict(t, p) {
                    return t;
                }
                t = tri.n[g];
                continue;
            }
            let mut moved = false;
            offset = (offset + 1) % 3;
            for s in 0..3 {
                let k = (s + offset) % 3;
                let a = &self.pts[tri.v[(k + 1) % 3]];
                let b = &self.pts[tri.v[(k + 2) % 3]];
                if orient(a, b, p) < 0.0 {
                    t = tri.n[k];
                    moved = true;
                    break;
                }
            }
            if !moved {
                return t;
            }
        }
        // the walk should always terminate on a Delaunay mesh; fall back to a scan
        (0..self.tris.len())
            .find(|&t| self.tris[t].alive && self.conflict(t, p))
            .expect("some triangle conflicts with every new site")
    }

    fn insert(&mut self, pi: usize) {
        let p = self.pts[pi];
        let start = self.locate(&p);
        let mut cavity = vec![start];
        let mut in_cavity: HashMap<usize, ()> = HashMap::new();
        in_cavity.insert(start, ());
        let mut i = 0;
        while i < cavity.len() {
            let t = cavity[i];
            i += 1;
            for k in 0..3 {
                let u = self.tris[t].n[k];
                if !in_cavity.contains_key(&u) && self.conflict(u, &p) {
                    in_cavity.insert(u, ());
                    cavity.push(u);
                }
            }
        }
        // boundary edges (from, to, outside neighbour)
        let mut boundary = Vec::new();
        for &t in &cavity {
            let tri = self.tris[t];
            for k in 0..3 {
                if !in_cavity.contains_key(&tri.n[k]) {
                    boundary.push((tri.v[(k + 1) % 3], tri.v[(k + 2) % 3], tri.n[k], t));
                }
            }
        }
        for &t in &cavity {
            self.tris[t].alive = false;
        }
        let mut by_start = HashMap::with_capacity(boundary.len());
        let mut by_end = HashMap::with_capacity(boundary.len());
        let mut created = Vec::with_capacity(boundary.len());
        for &(u, w, outside, old) in &boundary {
            let id = self.tris.len();
            self.tris.push(Tri {
                v: [u, w, pi],
                n: [NONE, NONE, outside],
                alive: true,
            });
            let o = &mut self.tris[outside];
            for k in 0..3 {
                if o.n[k] == old {
                    o.n[k] = id;
                }
            }
            by_start.insert(u, id);
            by_end.insert(w, id);
            created.push(id);
        }
        for &id in &created {
            let [u, w, _] = self.tris[id].v;
            self.tris[id].n[0] = by_start[&w];
            self.tris[id].n[1] = by_end[&u];
        }
        self.last = *created
            .iter()
            .find(|&&t| self.tris[t].ghost_slot().is_none())
            .unwrap_or(&created[0]);
    }
}

/// A planar Delaunay triangulation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Triangulation {
    /// Site positions after jitter.
    pub sites: Vec<Point>,
    /// Counter-clockwise index triples.
    pub triangles: Vec<[usize; 3]>,
    /// `neighbors[t][k]` is the triangle across the edge opposite
    /// `triangles[t][k]`, or `None` on the convex hull.
    pub neighbors: Vec<[Option<usize>; 3]>,
    /// Undirected edges `(i, j)` with `i < j`, sorted.
    pub edges: Vec<(usize, usize)>,
}

fn jitter(sites: &[Point]) -> Vec<Point> {
    if sites.is_empty() {
        return Vec::new();
    }
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in sites {
        for i in 0..2 {
            lo[i] = lo[i].min(p.0[i]);
            hi[i] = hi[i].max(p.0[i]);
        }
    }
    let scale = JITTER * (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-300);
    let mut rng = SeedPath::new(0x6a17_7e55).derive("delaunay-jitter", sites.len() as u64).rng();
    sites
        .iter()
        .map(|p| {
            Point::new2(
                p.x() + scale * (rng.random::<f64>() - 0.5),
                p.y() + scale * (rng.random::<f64>() - 0.5),
            )
        })
        .collect()
}

/// Spatially coherent insertion order (serpentine rows of a coarse grid).
fn insertion_order(pts: &[Point]) -> Vec<usize> {
    let n = pts.len();
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in pts {
        for i in 0..2 {
            lo[i] = lo[i].min(p.0[i]);
            hi[i] = hi[i].max(p.0[i]);
        }
    }
    let rows = ((n as f64).sqrt() / 2.0).ceil().max(1.0);
    let h = ((hi[1] - lo[1]) / rows).max(1e-300);
    let mut order: Vec<usize> = (0..n).collect();
    let key = |i: usize| {
        let row = (((pts[i].y() - lo[1]) / h).floor() as i64).min(rows as i64 - 1);
        let x = if row % 2 == 0 { pts[i].x() } else { -pts[i].x() };
        (row, x)
    };
    order.sort_by(|&a, &b| {
        let (ra, xa) = key(a);
        let (rb, xb) = key(b);
        ra.cmp(&rb).then(xa.total_cmp(&xb))
    });
    order
}

/// Delaunay triangulation of at least three non-collinear sites.
pub fn delaunay(sites: &[Point]) -> Result<Triangulation> {
    if sites.len() < 3 {
        return Err(Error::Degenerate(format!(
            "need at least 3 sites, got {}",
            sites.len()
        )));
    }
    let pts = jitter(sites);
    let order = insertion_order(&pts);

    // seed triangle: first site, then the farthest-from-collinear choices
    let a = order[0];
    let b = (0..pts.len())
        .max_by(|&i, &j| pts[a].euclid(&pts[i]).total_cmp(&pts[a].euclid(&pts[j])))
        .unwrap();
    let scale = pts[a].euclid(&pts[b]);
    if scale == 0.0 {
        return Err(Error::Degenerate("all sites coincide".into()));
    }
    let c = order
        .iter()
        .copied()
        .filter(|&i| i != a && i != b)
        .max_by(|&i, &j| {
            orient(&pts[a], &pts[b], &pts[i])
                .abs()
                .total_cmp(&orient(&pts[a], &pts[b], &pts[j]).abs())
        })
        .unwrap();
    let area = orient(&pts[a], &pts[b], &pts[c]);
    // `scale` is the largest distance from `a`, so this is a relative width
    if area.abs() <= 1e-6 * scale * scale {
        return Err(Error::Degenerate("all sites are collinear".into()));
    }
    let (a, b, c) = if area > 0.0 { (a, b, c) } else { (a, c, b) };

    let mut tris = vec![
        Tri { v: [a, b, c], n: [3, 1, 2], alive: true },
        // ghost across edge a->b (opposite c)
        Tri { v: [b, a, GHOST], n: [2, 3, 0], alive: true },
        // ghost across edge c->a (opposite b)
        Tri { v: [a, c, GHOST], n: [3, 1, 0], alive: true },
        // ghost across edge b->c (opposite a)
        Tri { v: [c, b, GHOST], n: [1, 2, 0], alive: true },
    ];
    // fix ghost adjacency: ghost (u, w, g): n[0] opposite u is across edge (w, g),
    // shared with the ghost whose finite edge starts at w
    let ghost_of = |tris: &Vec<Tri>, start: usize| {
        (1..4).find(|&t| tris[t].v[0] == start).unwrap()
    };
    let ghost_of_end = |tris: &Vec<Tri>, end: usize| {
        (1..4).find(|&t| tris[t].v[1] == end).unwrap()
    };
    for t in 1..4 {
        let [u, w, _] = tris[t].v;
        tris[t].n[0] = ghost_of(&tris, w);
        tris[t].n[1] = ghost_of_end(&tris, u);
        tris[t].n[2] = 0;
    }
    // finite triangle: n[k] is the ghost across the edge opposite v[k]
    let tv = tris[0].v;
    for k in 0..3 {
        let (u, w) = (tv[(k + 1) % 3], tv[(k + 2) % 3]);
        tris[0].n[k] = (1..4)
            .find(|&t| tris[t].v[0] == w && tris[t].v[1] == u)
            .unwrap();
    }

    let mut builder = Builder {
        pts: &pts,
        tris,
        last: 0,
    };
    for &i in &order {
        if i == a || i == b || i == c {
            continue;
        }
        builder.insert(i);
    }

    let alive: Vec<usize> = (0..builder.tris.len())
        .filter(|&t| builder.tris[t].alive && builder.tris[t].ghost_slot().is_none())
        .collect();
    let mut index = vec![NONE; builder.tris.len()];
    for (k, &t) in alive.iter().enumerate() {
        index[t] = k;
    }
    let triangles: Vec<[usize; 3]> = alive.iter().map(|&t| builder.tris[t].v).collect();
    let neighbors: Vec<[Option<usize>; 3]> = alive
        .iter()
        .map(|&t| {
            let n = builder.tris[t].n;
            [0, 1, 2].map(|k| {
                let u = index[n[k]];
                (u != NONE).then_some(u)
            })
        })
        .collect();
    let mut edges: Vec<(usize, usize)> = triangles
        .iter()
        .flat_map(|v| {
            (0..3).map(move |k| {
                let (i, j) = (v[(k + 1) % 3], v[(k + 2) % 3]);
                (i.min(j), i.max(j))
            })
        })
        .collect();
    edges.sort_unstable();
    edges.dedup();
    Ok(Triangulation {
        sites: pts,
        triangles,
        neighbors,
        edges,
    })
}

impl Triangulation {
    pub fn circumcenter(&self, t: usize) -> Point {
        let [a, b, c] = self.triangles[t];
        circumcenter(&self.sites[a], &self.sites[b], &self.sites[c])
    }

    /// Edges shared by two triangles.
    pub fn interior_edge_count(&self) -> usize {
        self.neighbors
            .iter()
            .flatten()
            .filter(|n| n.is_some())
            .count()
            / 2
    }

    /// Empty-circumcircle certificate against every site: returns the
    /// largest violation `incircle / (scale^4)` found (≤ tolerance passes).
    pub fn max_incircle_violation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for v in &self.triangles {
            let [a, b, c] = *v;
            let (pa, pb, pc) = (&self.sites[a], &self.sites[b], &self.sites[c]);
            let s = pa.euclid(pb).max(pb.euclid(pc)).max(pc.euclid(pa));
            let norm = s.powi(4).max(1e-300);
            for (k, q) in self.sites.iter().enumerate() {
                if k == a || k == b || k == c {
                    continue;
                }
                worst = worst.max(incircle(pa, pb, pc, q) / norm);
            }
        }
        worst
    }
}

/// A planar segment with the pair of sites it derives from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
    pub sources: [usize; 2],
}

impl Segment {
    pub fn length(&self) -> f64 {
        self.a.euclid(&self.b)
    }

    pub fn midpoint(&self) -> Point {
        Point::new2(0.5 * (self.a.x() + self.b.x()), 0.5 * (self.a.y() + self.b.y()))
    }

    /// Parameter interval of `a + t (b - a)` inside `rect`, for `t` in
    /// `[t0, t1]` (Liang–Barsky).
    fn clip_param(a: &Point, d: (f64, f64), rect: &Aabb, t0: f64, t1: f64) -> Option<(f64, f64)> {
        let (mut lo, mut hi) = (t0, t1);
        let checks = [
            (-d.0, a.x() - rect.lo[0]),
            (d.0, rect.hi[0] - a.x()),
            (-d.1, a.y() - rect.lo[1]),
            (d.1, rect.hi[1] - a.y()),
        ];
        for (p, q) in checks {
            if p == 0.0 {
                if q < 0.0 {
                    return None;
                }
            } else {
                let r = q / p;
                if p < 0.0 {
                    lo = lo.max(r);
                } else {
                    hi = hi.min(r);
                }
            }
        }
        (lo < hi).then_some((lo, hi))
    }

    /// The part of this segment inside `rect`, if any.
    pub fn clip(&self, rect: &Aabb) -> Option<Segment> {
        let d = (self.b.x() - self.a.x(), self.b.y() - self.a.y());
        let (lo, hi) = Segment::clip_param(&self.a, d, rect, 0.0, 1.0)?;
        let at = |t: f64| {
            if t == 0.0 {
                self.a
            } else if t == 1.0 {
                self.b
            } else {
                Point::new2(self.a.x() + t * d.0, self.a.y() + t * d.1)
            }
        };
        Some(Segment {
            a: at(lo),
            b: at(hi),
            sources: self.sources,
        })
    }

    /// The part of the ray `origin + s * dir`, `s >= 0`, inside `rect`.
    pub fn clip_ray(origin: Point, dir: (f64, f64), rect: &Aabb, sources: [usize; 2]) -> Option<Segment> {
        let (lo, hi) = Segment::clip_param(&origin, dir, rect, 0.0, f64::INFINITY)?;
        let at = |t: f64| {
            if t == 0.0 {
                origin
            } else {
                Point::new2(origin.x() + t * dir.0, origin.y() + t * dir.1)
            }
        };
        Some(Segment {
            a: at(lo),
            b: at(hi),
            sources,
        })
    }

    /// The part of the full line `origin + s * dir`, `s` in R, inside `rect`.
    pub fn clip_line(origin: Point, dir: (f64, f64), rect: &Aabb, sources: [usize; 2]) -> Option<Segment> {
        let (lo, hi) =
            Segment::clip_param(&origin, dir, rect, f64::NEG_INFINITY, f64::INFINITY)?;
        Some(Segment {
            a: Point::new2(origin.x() + lo * dir.0, origin.y() + lo * dir.1),
            b: Point::new2(origin.x() + hi * dir.0, origin.y() + hi * dir.1),
            sources,
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SegmentSet {
    pub segments: Vec<Segment>,
    pub total_length: f64,
}

impl SegmentSet {
    pub fn new(segments: Vec<Segment>) -> Self {
        let total_length = segments.iter().map(Segment::length).sum();
        SegmentSet {
            segments,
            total_length,
        }
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// Total length of the parts inside `rect`.
    pub fn length_in(&self, rect: &Aabb) -> f64 {
        self.segments
            .iter()
            .filter_map(|s| s.clip(rect))
            .map(|s| s.length())
            .sum()
    }

    pub fn clipped(&self, rect: &Aabb) -> SegmentSet {
        SegmentSet::new(self.segments.iter().filter_map(|s| s.clip(rect)).collect())
    }

    /// CSV with header `x1,y1,x2,y2`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x1,y1,x2,y2\n");
        for s in &self.segments {
            out.push_str(&format!(
                "{},{},{},{}\n",
                crate::io::num(s.a.x()),
                crate::io::num(s.a.y()),
                crate::io::num(s.b.x()),
                crate::io::num(s.b.y())
            ));
        }
        out
    }
}

/// Voronoi edges: circumcentre-to-circumcentre segments of adjacent
/// triangles and rays across hull edges, clipped to `rect`.
pub fn voronoi_edges(tri: &Triangulation, rect: &Aabb) -> SegmentSet {
    let centers: Vec<Point> = (0..tri.triangles.len()).map(|t| tri.circumcenter(t)).collect();
    let mut out = Vec::new();
    for (t, v) in tri.triangles.iter().enumerate() {
        for k in 0..3 {
            let (i, j) = (v[(k + 1) % 3], v[(k + 2) % 3]);
            let sources = [i.min(j), i.max(j)];
            match tri.neighbors[t][k] {
                Some(u) if t < u => {
                    let s = Segment {
                        a: centers[t],
                        b: centers[u],
                        sources,
                    };
                    if let Some(c) = s.clip(rect) {
                        out.push(c);
                    }
                }
                Some(_) => {}
                None => {
                    let (a, b) = (&tri.sites[i], &tri.sites[j]);
                    // interior lies left of a->b, so the outward normal is to the right
                    let dir = (b.y() - a.y(), -(b.x() - a.x()));
                    if let Some(c) = Segment::clip_ray(centers[t], dir, rect, sources) {
                        out.push(c);
                    }
                }
            }
        }
    }
    SegmentSet::new(out)
}

/// Voronoi edges of arbitrary site sets, including the degenerate
/// collinear case (parallel bisector lines).
pub fn voronoi_of_sites(sites: &[Point], rect: &Aabb) -> Result<SegmentSet> {
    if sites.len() < 2 {
        return Ok(SegmentSet::default());
    }
    match delaunay(sites) {
        Ok(tri) => Ok(voronoi_edges(&tri, rect)),
        Err(Error::Degenerate(_)) => {
            let a = sites[0];
            let far = (1..sites.len())
                .max_by(|&i, &j| a.euclid(&sites[i]).total_cmp(&a.euclid(&sites[j])))
                .unwrap();
            let dir = (sites[far].x() - a.x(), sites[far].y() - a.y());
            if dir == (0.0, 0.0) {
                return Ok(SegmentSet::default());
            }
            let mut idx: Vec<usize> = (0..sites.len()).collect();
            let proj = |i: usize| (sites[i].x() - a.x()) * dir.0 + (sites[i].y() - a.y()) * dir.1;
            idx.sort_by(|&i, &j| proj(i).total_cmp(&proj(j)));
            let mut out = Vec::new();
            for w in idx.windows(2) {
                let (p, q) = (sites[w[0]], sites[w[1]]);
                if p == q {
                    continue;
                }
                let mid = Point::new2(0.5 * (p.x() + q.x()), 0.5 * (p.y() + q.y()));
                let normal = (-dir.1, dir.0);
                let sources = [w[0].min(w[1]), w[0].max(w[1])];
                if let Some(s) = Segment::clip_line(mid, normal, rect, sources) {
                    out.push(s);
                }
            }
            Ok(SegmentSet::new(out))
        }
        Err(e) => Err(e),
    }
}

/// Delaunay edges clipped to `rect`.
pub fn delaunay_edges(tri: &Triangulation, rect: &Aabb) -> SegmentSet {
    SegmentSet::new(
        tri.edges
            .iter()
            .filter_map(|&(i, j)| {
                Segment {
                    a: tri.sites[i],
                    b: tri.sites[j],
                    sources: [i, j],
                }
                .clip(rect)
            })
            .collect(),
    )
}
