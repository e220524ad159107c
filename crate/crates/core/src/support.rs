//! Connected components of the support of an environment inside a box.
//!
//! Supports are unions of primitives: closed disks for the shot-noise and
//! modulated models, segments for tessellations, the whole box for
//! homogeneous fields. Two primitives are joined when their intersection
//! meets the box, so components are those of `supp(Λ) ∩ B` itself.

use std::collections::HashMap;

use crate::dsu::DisjointSets;
use crate::environment::{Environment, IntensityModel, Realization};
use crate::error::{Error, Result};
use crate::geometry::{Aabb, Boundary, Point, Window};
use crate::grid::CellGrid;
use crate::tessellation::Segment;

/// Arc samples per clipped disk when measuring diameters.
const ARC_SAMPLES: usize = 64;

#[derive(Clone, Debug, PartialEq)]
pub struct SupportComponent {
    pub diameter: f64,
    /// Whether the component is cut by the box boundary.
    pub touches_boundary: bool,
    /// Number of primitives (disks, segments or raster cells).
    pub primitives: usize,
}

#[derive(Clone, Debug)]
enum Layout {
    Empty,
    Whole,
    Disks {
        centers: Vec<Point>,
        r: f64,
        labels: Vec<usize>,
        grid: CellGrid,
    },
    Segments {
        segments: Vec<Segment>,
        labels: Vec<usize>,
        buckets: SegmentBuckets,
    },
    Raster {
        h: f64,
        nx: usize,
        ny: usize,
        labels: Vec<Option<usize>>,
    },
}

/// All components of `supp(Λ) ∩ B`, with point location.
#[derive(Clone, Debug)]
pub struct SupportMap {
    pub bbox: Aabb,
    pub components: Vec<SupportComponent>,
    layout: Layout,
}

impl SupportMap {
    /// Component containing `p`, if `p` lies in the clipped support.
    pub fn locate(&self, p: &Point) -> Option<usize> {
        if !self.bbox.contains(p) {
            return None;
        }
        match &self.layout {
            Layout::Empty => None,
            Layout::Whole => Some(0),
            Layout::Disks {
                centers,
                r,
                labels,
                grid,
            } => {
                let r2 = r * r * (1.0 + 1e-12);
                let mut found = None;
                grid.for_each_candidate(p, *r, |id| {
                    if found.is_none() {
                        let dx = p.x() - centers[id].x();
                        let dy = p.y() - centers[id].y();
                        if dx * dx + dy * dy <= r2 {
                            found = Some(labels[id]);
                        }
                    }
                });
                found
            }
            Layout::Segments {
                segments,
                labels,
                buckets,
            } => {
                let tol = 1e-9 * (1.0 + self.bbox.diameter());
                buckets
                    .candidates(p)
                    .iter()
                    .find(|&&i| point_segment_distance(p, &segments[i]) <= tol)
                    .map(|&i| labels[i])
            }
            Layout::Raster { h, nx, ny, labels } => {
                let i = (((p.x() - self.bbox.lo[0]) / h) as usize).min(nx - 1);
                let j = (((p.y() - self.bbox.lo[1]) / h) as usize).min(ny - 1);
                labels[j * nx + i]
            }
        }
    }

    /// Indices of components with diameter at least `min_diameter`.
    pub fn large(&self, min_diameter: f64) -> Vec<usize> {
        (0..self.components.len())
            .filter(|&c| self.components[c].diameter >= min_diameter)
            .collect()
    }
}

/// Components of `supp(Λ) ∩ B` with diameter at least `min_diameter`.
pub fn support_components(env: &Environment, b: &Aabb, min_diameter: f64) -> Result<Vec<SupportComponent>> {
    let map = support_map(env, b)?;
    Ok(map
        .components
        .into_iter()
        .filter(|c| c.diameter >= min_diameter)
        .collect())
}

pub fn support_map(env: &Environment, b: &Aabb) -> Result<SupportMap> {
    let region = env.region();
    if b.dim != env.window.dim || !region.expand(1e-12 * region.diameter()).contains_box(b) {
        return Err(Error::BoxOutsideRegion);
    }
    let whole = || SupportMap {
        bbox: *b,
        components: vec![SupportComponent {
            diameter: b.diameter(),
            touches_boundary: true,
            primitives: 1,
        }],
        layout: Layout::Whole,
    };
    let empty = || SupportMap {
        bbox: *b,
        components: Vec::new(),
        layout: Layout::Empty,
    };
    match (&env.realization, env.model) {
        (Realization::Uniform { density }, _) => Ok(if *density > 0.0 { whole() } else { empty() }),
        (Realization::ShotNoise { radius, amplitude, .. }, _) => {
            if *amplitude <= 0.0 {
                return Ok(empty());
            }
            need_plane(b)?;
            Ok(disk_map(env.disks_touching(b), *radius, b))
        }
        (
            Realization::Modulated {
                radius,
                inside,
                outside,
                ..
            },
            IntensityModel::Modulated { .. },
        ) => {
            if *inside > 0.0 && *outside > 0.0 {
                Ok(whole())
            } else if *inside > 0.0 {
                need_plane(b)?;
                Ok(disk_map(env.disks_touching(b), *radius, b))
            } else {
                need_plane(b)?;
                Ok(vacant_raster(env, *radius, b))
            }
        }
        (Realization::Segments { segments, weight, .. }, _) => {
            if *weight <= 0.0 {
                return Ok(empty());
            }
            let clipped: Vec<Segment> = segments
                .segments
                .iter()
                .filter_map(|s| s.clip(b))
                .filter(|s| s.length() > 0.0)
                .collect();
            Ok(segment_map(clipped, b))
        }
        _ => unreachable!("realization always matches its model"),
    }
}

fn need_plane(b: &Aabb) -> Result<()> {
    if b.dim == 2 {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(b.dim))
    }
}

fn disk_in_box(c: &Point, r: f64, b: &Aabb) -> bool {
    (0..2).all(|i| c.0[i] - r >= b.lo[i] && c.0[i] + r <= b.hi[i])
}

/// Parameter interval `[t0, t1] ⊂ [0, 1]` of the segment `p + t (q - p)`
/// inside the closed disk, if non-empty.
fn segment_disk_interval(p: (f64, f64), q: (f64, f64), c: &Point, r: f64) -> Option<(f64, f64)> {
    let (ex, ey) = (q.0 - p.0, q.1 - p.1);
    let (fx, fy) = (p.0 - c.x(), p.1 - c.y());
    let qa = ex * ex + ey * ey;
    let qb = 2.0 * (fx * ex + fy * ey);
    let qc = fx * fx + fy * fy - r * r;
    if qa == 0.0 {
        return (qc <= 0.0).then_some((0.0, 1.0));
    }
    let disc = qb * qb - 4.0 * qa * qc;
    if disc < 0.0 {
        return None;
    }
    let s = disc.sqrt();
    let t0 = ((-qb - s) / (2.0 * qa)).max(0.0);
    let t1 = ((-qb + s) / (2.0 * qa)).min(1.0);
    (t0 <= t1).then_some((t0, t1))
}

/// Whether two closed disks of radius `r` overlap somewhere inside `b`.
pub fn lens_meets_box(a: &Point, c: &Point, r: f64, b: &Aabb) -> bool {
    let dx = c.x() - a.x();
    let dy = c.y() - a.y();
    let d = (dx * dx + dy * dy).sqrt();
    if d > 2.0 * r {
        return false;
    }
    if d == 0.0 {
        return b.distance_to(a) <= r;
    }
    let in_both = |x: f64, y: f64| {
        let p = Point::new2(x, y);
        p.euclid(a) <= r * (1.0 + 1e-12) && p.euclid(c) <= r * (1.0 + 1e-12)
    };
    let corners = [
        (b.lo[0], b.lo[1]),
        (b.hi[0], b.lo[1]),
        (b.hi[0], b.hi[1]),
        (b.lo[0], b.hi[1]),
    ];
    if corners.iter().any(|&(x, y)| in_both(x, y)) {
        return true;
    }
    // the lens vertices
    let h = (r * r - d * d / 4.0).max(0.0).sqrt();
    let (mx, my) = (a.x() + dx / 2.0, a.y() + dy / 2.0);
    let (ux, uy) = (-dy / d, dx / d);
    for s in [-1.0, 1.0] {
        let v = Point::new2(mx + s * h * ux, my + s * h * uy);
        if b.contains(&v) {
            return true;
        }
    }
    for k in 0..4 {
        let p = corners[k];
        let q = corners[(k + 1) % 4];
        if let (Some(i), Some(j)) = (
            segment_disk_interval(p, q, a, r),
            segment_disk_interval(p, q, c, r),
        ) {
            if i.0.max(j.0) <= i.1.min(j.1) {
                return true;
            }
        }
    }
    false
}

fn cross(o: &(f64, f64), a: &(f64, f64), b: &(f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Diameter of a planar point set via its convex hull.
pub fn point_set_diameter(points: &[(f64, f64)]) -> f64 {
    let mut pts = points.to_vec();
    pts.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.total_cmp(&q.1)));
    pts.dedup();
    if pts.len() < 2 {
        return 0.0;
    }
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(2 * pts.len());
    for pass in [false, true] {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &(f64, f64)>> = if pass {
            Box::new(pts.iter().rev())
        } else {
            Box::new(pts.iter())
        };
        for p in iter {
            while hull.len() >= start + 2
                && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= 0.0
            {
                hull.pop();
            }
            hull.push(*p);
        }
        hull.pop();
    }
    let mut best: f64 = 0.0;
    for i in 0..hull.len() {
        for j in i + 1..hull.len() {
            let d = (hull[i].0 - hull[j].0).powi(2) + (hull[i].1 - hull[j].1).powi(2);
            best = best.max(d);
        }
    }
    best.sqrt()
}

fn clipped_disk_points(c: &Point, r: f64, b: &Aabb, out: &mut Vec<(f64, f64)>) {
    for k in 0..ARC_SAMPLES {
        let t = std::f64::consts::TAU * k as f64 / ARC_SAMPLES as f64;
        let p = Point::new2(c.x() + r * t.cos(), c.y() + r * t.sin());
        if b.contains(&p) {
            out.push((p.x(), p.y()));
        }
    }
    let corners = [
        (b.lo[0], b.lo[1]),
        (b.hi[0], b.lo[1]),
        (b.hi[0], b.hi[1]),
        (b.lo[0], b.hi[1]),
    ];
    for k in 0..4 {
        let p = corners[k];
        let q = corners[(k + 1) % 4];
        if Point::new2(p.0, p.1).euclid(c) <= r {
            out.push(p);
        }
        if let Some((t0, t1)) = segment_disk_interval(p, q, c, r) {
            for t in [t0, t1] {
                out.push((p.0 + t * (q.0 - p.0), p.1 + t * (q.1 - p.1)));
            }
        }
    }
}

fn disk_map(centers: Vec<Point>, r: f64, b: &Aabb) -> SupportMap {
    let grow = b.expand(r);
    let gw = Window::new(2, grow.lo, grow.hi, Boundary::Hard, 0.0).expect("box is non-degenerate");
    let grid = CellGrid::new(&gw, &centers, 2.0 * r);
    let mut ds = DisjointSets::new(centers.len());
    for i in 0..centers.len() {
        for j in grid.neighbors_within(&centers, &centers[i], 2.0 * r * (1.0 + 1e-12), Some(i)) {
            if j > i && lens_meets_box(&centers[i], &centers[j], r, b) {
                ds.union(i, j);
            }
        }
    }
    let comps = crate::dsu::label(&mut ds);
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); comps.count()];
    for (i, &l) in comps.labels.iter().enumerate() {
        members[l].push(i);
    }
    let components = members
        .iter()
        .map(|m| {
            let clipped = m.iter().any(|&i| !disk_in_box(&centers[i], r, b));
            let diameter = if clipped {
                let mut pts = Vec::new();
                for &i in m {
                    clipped_disk_points(&centers[i], r, b, &mut pts);
                }
                point_set_diameter(&pts)
            } else {
                let pts: Vec<(f64, f64)> = m.iter().map(|&i| (centers[i].x(), centers[i].y())).collect();
                point_set_diameter(&pts) + 2.0 * r
            };
            SupportComponent {
                diameter,
                touches_boundary: clipped,
                primitives: m.len(),
            }
        })
        .collect();
    SupportMap {
        bbox: *b,
        components,
        layout: Layout::Disks {
            centers,
            r,
            labels: comps.labels,
            grid,
        },
    }
}

fn point_segment_distance(p: &Point, s: &Segment) -> f64 {
    let (ex, ey) = (s.b.x() - s.a.x(), s.b.y() - s.a.y());
    let len2 = ex * ex + ey * ey;
    let t = if len2 > 0.0 {
        (((p.x() - s.a.x()) * ex + (p.y() - s.a.y()) * ey) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    Point::new2(s.a.x() + t * ex, s.a.y() + t * ey).euclid(p)
}

/// Segments registered in every cell their bounding box overlaps.
#[derive(Clone, Debug)]
struct SegmentBuckets {
    lo: [f64; 2],
    h: f64,
    n: [usize; 2],
    cells: Vec<Vec<usize>>,
}

impl SegmentBuckets {
    fn new(segments: &[Segment], b: &Aabb) -> Self {
        let k = ((segments.len() as f64).sqrt().ceil() as usize).clamp(1, 1024);
        let h = (b.side(0).max(b.side(1)) / k as f64).max(1e-300);
        let n = [
            ((b.side(0) / h).ceil() as usize).max(1),
            ((b.side(1) / h).ceil() as usize).max(1),
        ];
        let mut cells = vec![Vec::new(); n[0] * n[1]];
        let lo = [b.lo[0], b.lo[1]];
        let mut out = SegmentBuckets { lo, h, n, cells: Vec::new() };
        for (i, s) in segments.iter().enumerate() {
            let (x0, x1) = (s.a.x().min(s.b.x()), s.a.x().max(s.b.x()));
            let (y0, y1) = (s.a.y().min(s.b.y()), s.a.y().max(s.b.y()));
            let (i0, j0) = out.cell(x0, y0);
            let (i1, j1) = out.cell(x1, y1);
            for j in j0..=j1 {
                for ii in i0..=i1 {
                    cells[j * n[0] + ii].push(i);
                }
            }
        }
        out.cells = cells;
        out
    }

    fn cell(&self, x: f64, y: f64) -> (usize, usize) {
        let f = |v: f64, lo: f64, n: usize| {
            let c = ((v - lo) / self.h).floor();
            if c < 0.0 {
                0
            } else {
                (c as usize).min(n - 1)
            }
        };
        (f(x, self.lo[0], self.n[0]), f(y, self.lo[1], self.n[1]))
    }

    fn candidates(&self, p: &Point) -> &[usize] {
        let (i, j) = self.cell(p.x(), p.y());
        &self.cells[j * self.n[0] + i]
    }
}

fn segment_map(segments: Vec<Segment>, b: &Aabb) -> SupportMap {
    let mut ds = DisjointSets::new(segments.len());
    let mut at: HashMap<(u64, u64), usize> = HashMap::new();
    for (i, s) in segments.iter().enumerate() {
        for p in [s.a, s.b] {
            let key = (p.x().to_bits(), p.y().to_bits());
            match at.get(&key) {
                Some(&j) => {
                    ds.union(i, j);
                }
                None => {
                    at.insert(key, i);
                }
            }
        }
    }
    let comps = crate::dsu::label(&mut ds);
    let mut pts: Vec<Vec<(f64, f64)>> = vec![Vec::new(); comps.count()];
    let mut touches = vec![false; comps.count()];
    let tol = 1e-12 * (1.0 + b.diameter());
    for (i, s) in segments.iter().enumerate() {
        let l = comps.labels[i];
        for p in [s.a, s.b] {
            pts[l].push((p.x(), p.y()));
            if (0..2).any(|k| (p.0[k] - b.lo[k]).abs() <= tol || (p.0[k] - b.hi[k]).abs() <= tol) {
                touches[l] = true;
            }
        }
    }
    let components = (0..comps.count())
        .map(|l| SupportComponent {
            diameter: point_set_diameter(&pts[l]),
            touches_boundary: touches[l],
            primitives: comps.sizes[l],
        })
        .collect();
    let buckets = SegmentBuckets::new(&segments, b);
    SupportMap {
        bbox: *b,
        components,
        layout: Layout::Segments {
            segments,
            labels: comps.labels,
            buckets,
        },
    }
}

/// Components of the vacant set (complement of the grains) on a raster
/// with cells of side at most `r / 8`.
fn vacant_raster(env: &Environment, r: f64, b: &Aabb) -> SupportMap {
    let h = (r / 8.0).max(b.side(0).max(b.side(1)) / 2048.0);
    let nx = ((b.side(0) / h).ceil() as usize).max(1);
    let ny = ((b.side(1) / h).ceil() as usize).max(1);
    let hx = b.side(0) / nx as f64;
    let hy = b.side(1) / ny as f64;
    let centre = |i: usize, j: usize| {
        Point::new2(b.lo[0] + (i as f64 + 0.5) * hx, b.lo[1] + (j as f64 + 0.5) * hy)
    };
    let vacant: Vec<bool> = (0..nx * ny)
        .map(|k| !env.covered(&env.window.wrap(centre(k % nx, k / nx))))
        .collect();
    let mut ds = DisjointSets::new(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let k = j * nx + i;
            if !vacant[k] {
                continue;
            }
            if i + 1 < nx && vacant[k + 1] {
                ds.union(k, k + 1);
            }
            if j + 1 < ny && vacant[k + nx] {
                ds.union(k, k + nx);
            }
        }
    }
    let mut label_of_root: HashMap<usize, usize> = HashMap::new();
    let mut labels = vec![None; nx * ny];
    let mut pts: Vec<Vec<(f64, f64)>> = Vec::new();
    let mut touches: Vec<bool> = Vec::new();
    let mut sizes: Vec<usize> = Vec::new();
    for k in 0..nx * ny {
        if !vacant[k] {
            continue;
        }
        let root = ds.find(k);
        let l = *label_of_root.entry(root).or_insert_with(|| {
            pts.push(Vec::new());
            touches.push(false);
            sizes.push(0);
            pts.len() - 1
        });
        labels[k] = Some(l);
        sizes[l] += 1;
        let (i, j) = (k % nx, k / nx);
        let c = centre(i, j);
        for (sx, sy) in [(-0.5, -0.5), (0.5, -0.5), (0.5, 0.5), (-0.5, 0.5)] {
            pts[l].push((c.x() + sx * hx, c.y() + sy * hy));
        }
        if i == 0 || j == 0 || i + 1 == nx || j + 1 == ny {
            touches[l] = true;
        }
    }
    let components = (0..pts.len())
        .map(|l| SupportComponent {
            diameter: point_set_diameter(&pts[l]),
            touches_boundary: touches[l],
            primitives: sizes[l],
        })
        .collect();
    SupportMap {
        bbox: *b,
        components,
        layout: Layout::Raster {
            h: hx.max(hy),
            nx,
            ny,
            labels,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environment::sample_environment;
    use crate::seed::SeedPath;
    use rand::Rng;

    fn disk_env(centers: Vec<Point>, r: f64, w: Window) -> Environment {
        Environment::from_grains(IntensityModel::modulated(1.0, 0.0, 1.0, r), w, centers).unwrap()
    }

    #[test]
    fn two_disjoint_disks() {
        let w = Window::new(2, [-3.0, -3.0, 0.0], [8.0, 3.0, 0.0], Boundary::Hard, 0.0).unwrap();
        let env = disk_env(vec![Point::new2(0.0, 0.0), Point::new2(5.0, 0.0)], 0.5, w);
        let c = support_components(&env, &Aabb::rect(-1.0, -1.0, 6.0, 1.0), 0.0).unwrap();
        assert_eq!(c.len(), 2);
        for comp in &c {
            assert!((comp.diameter - 1.0).abs() < 1e-12);
            assert!(!comp.touches_boundary);
        }
    }

    #[test]
    fn overlapping_unit_disks() {
        let w = Window::new(2, [-4.0, -4.0, 0.0], [5.0, 4.0, 0.0], Boundary::Hard, 0.0).unwrap();
        let env = disk_env(vec![Point::new2(0.0, 0.0), Point::new2(1.0, 0.0)], 1.0, w);
        let c = support_components(&env, &Aabb::rect(-3.0, -3.0, 4.0, 3.0), 0.0).unwrap();
        assert_eq!(c.len(), 1);
        assert!((c[0].diameter - 3.0).abs() < 1e-12, "{:?}", c);
        // the diameter filter
        assert!(support_components(&env, &Aabb::rect(-3.0, -3.0, 4.0, 3.0), 3.5).unwrap().is_empty());
    }

    #[test]
    fn overlap_outside_the_box_does_not_connect() {
        let w = Window::square(10.0, Boundary::Hard).unwrap();
        // the lens sits around x = 5, the box stops at x = 4.5
        let env = disk_env(vec![Point::new2(4.2, 5.0), Point::new2(5.8, 5.0)], 1.0, w);
        let c = support_components(&env, &Aabb::rect(0.0, 0.0, 4.5, 10.0), 0.0).unwrap();
        assert_eq!(c.len(), 1);
        let c = support_components(&env, &Aabb::rect(0.0, 0.0, 5.5, 10.0), 0.0).unwrap();
        assert_eq!(c.len(), 1);
        let c = support_components(&env, &Aabb::rect(0.0, 5.9, 10.0, 10.0), 0.0).unwrap();
        assert_eq!(c.len(), 2);
    }

    #[test]
    fn matches_pairwise_overlap_closure() {
        let w = Window::square(10.0, Boundary::Hard).unwrap();
        let mut rng = SeedPath::new(31).rng();
        for _ in 0..200 {
            let n = rng.random_range(1..=8);
            let r = 0.3 + rng.random::<f64>();
            let centers: Vec<Point> = (0..n)
                .map(|_| Point::new2(3.0 + 4.0 * rng.random::<f64>(), 3.0 + 4.0 * rng.random::<f64>()))
                .collect();
            let env = disk_env(centers.clone(), r, w);
            // box containing every disk: connectivity is plain overlap
            let c = support_components(&env, &Aabb::rect(1.0, 1.0, 9.0, 9.0), 0.0).unwrap();
            let mut edges = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    if centers[i].euclid(&centers[j]) <= 2.0 * r {
                        edges.push((i, j));
                    }
                }
            }
            let oracle = crate::dsu::components(n, &edges).unwrap();
            assert_eq!(c.len(), oracle.count());
        }
    }

    #[test]
    fn enlarging_the_box_never_splits() {
        let model = IntensityModel::modulated(1.0, 0.0, 0.6, 0.5);
        let w = Window::square(12.0, Boundary::Hard).unwrap();
        let mut rng = SeedPath::new(32).rng();
        for k in 0..20 {
            let env = sample_environment(&model, &w, &SeedPath::new(100 + k)).unwrap();
            let small = Aabb::rect(4.0, 4.0, 7.0, 7.0);
            let big = Aabb::rect(3.0, 3.5, 8.0, 9.0);
            let ms = support_map(&env, &small).unwrap();
            let mb = support_map(&env, &big).unwrap();
            let probes: Vec<Point> = (0..300)
                .map(|_| Point::new2(4.0 + 3.0 * rng.random::<f64>(), 4.0 + 3.0 * rng.random::<f64>()))
                .collect();
            let ls: Vec<Option<usize>> = probes.iter().map(|p| ms.locate(p)).collect();
            let lb: Vec<Option<usize>> = probes.iter().map(|p| mb.locate(p)).collect();
            for a in 0..probes.len() {
                for b in 0..probes.len() {
                    if ls[a].is_some() && ls[a] == ls[b] {
                        assert!(lb[a].is_some());
                        assert_eq!(lb[a], lb[b]);
                    }
                }
            }
        }
    }

    #[test]
    fn tessellation_components_are_exact() {
        let model = IntensityModel::voronoi(1.0);
        let w = Window::square(10.0, Boundary::Hard).unwrap();
        let env = sample_environment(&model, &w, &SeedPath::new(33)).unwrap();
        let b = Aabb::rect(2.0, 2.0, 8.0, 8.0);
        let map = support_map(&env, &b).unwrap();
        // a planar Voronoi diagram clipped to a box is connected
        assert_eq!(map.components.len(), 1);
        assert!(map.components[0].diameter <= b.diameter() + 1e-12);
        assert!(map.components[0].diameter > 0.9 * b.diameter());
    }

    #[test]
    fn homogeneous_is_the_whole_box() {
        let w = Window::square(4.0, Boundary::Hard).unwrap();
        let env = sample_environment(&IntensityModel::Homogeneous, &w, &SeedPath::new(1)).unwrap();
        let b = Aabb::rect(0.0, 0.0, 3.0, 4.0);
        let c = support_components(&env, &b, 0.0).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].diameter, 5.0);
    }

    #[test]
    fn vacant_set_of_a_sparse_boolean_model_is_connected() {
        let model = IntensityModel::modulated(0.0, 1.0, 0.1, 0.3);
        let w = Window::square(10.0, Boundary::Hard).unwrap();
        let env = sample_environment(&model, &w, &SeedPath::new(34)).unwrap();
        let map = support_map(&env, &Aabb::rect(2.0, 2.0, 8.0, 8.0)).unwrap();
        let big = map.large(3.0);
        assert_eq!(big.len(), 1);
        assert!(map.components[big[0]].diameter > 8.0);
    }

    #[test]
    fn hull_diameter() {
        let pts = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0), (0.5, 0.5)];
        assert!((point_set_diameter(&pts) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(point_set_diameter(&[(1.0, 1.0)]), 0.0);
    }
}
