//! Areas of unions of disks clipped to rectangles, and volumes of unions of
//! balls clipped to boxes.
//!
//! The planar area is exact up to rounding: the boundary of
//! `union ∩ rect` is a chain of circle arcs and rectangle edge pieces, and
//! Green's theorem turns `½∮(x dy − y dx)` over that chain into closed-form
//! terms. Volumes integrate the planar area over slices.

use std::f64::consts::TAU;

use crate::geometry::{Aabb, Point};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Disk {
    pub cx: f64,
    pub cy: f64,
    pub r: f64,
}

impl Disk {
    pub fn new(c: Point, r: f64) -> Self {
        Disk {
            cx: c.x(),
            cy: c.y(),
            r,
        }
    }

    #[inline]
    fn contains_strict(&self, x: f64, y: f64) -> bool {
        let dx = x - self.cx;
        let dy = y - self.cy;
        dx * dx + dy * dy < self.r * self.r
    }
}

#[derive(Clone, Copy)]
struct Rect {
    x0: f64,
    y0: f64,
    x1: f64,
    y1: f64,
}

impl Rect {
    fn inside_strict(&self, x: f64, y: f64) -> bool {
        x > self.x0 && x < self.x1 && y > self.y0 && y < self.y1
    }

    fn dist_to(&self, x: f64, y: f64) -> f64 {
        let dx = (self.x0 - x).max(0.0).max(x - self.x1);
        let dy = (self.y0 - y).max(0.0).max(y - self.y1);
        (dx * dx + dy * dy).sqrt()
    }
}

/// Area of `(⋃ disks) ∩ rect` for a planar box.
pub fn union_area_in_rect(disks: &[Disk], rect: &Aabb) -> f64 {
    // local coordinates centred on the rectangle keep the Green sums well
    // conditioned
    let c = rect.center();
    let r = Rect {
        x0: rect.lo[0] - c.x(),
        y0: rect.lo[1] - c.y(),
        x1: rect.hi[0] - c.x(),
        y1: rect.hi[1] - c.y(),
    };
    if !(r.x1 > r.x0 && r.y1 > r.y0) {
        return 0.0;
    }
    let mut ds: Vec<Disk> = disks
        .iter()
        .filter(|d| d.r > 0.0)
        .map(|d| Disk {
            cx: d.cx - c.x(),
            cy: d.cy - c.y(),
            r: d.r,
        })
        .filter(|d| r.dist_to(d.cx, d.cy) < d.r)
        .collect();
    // drop disks covered by another one (keep the first of identical pairs)
    let covered: Vec<bool> = (0..ds.len())
        .map(|i| {
            (0..ds.len()).any(|j| {
                if i == j {
                    return false;
                }
                let (a, b) = (&ds[i], &ds[j]);
                let dist = ((a.cx - b.cx).powi(2) + (a.cy - b.cy).powi(2)).sqrt();
                if a == b {
                    j < i
                } else {
                    dist + a.r <= b.r
                }
            })
        })
        .collect();
    let mut k = 0;
    ds.retain(|_| {
        let keep = !covered[k];
        k += 1;
        keep
    });
    if ds.is_empty() {
        return 0.0;
    }
    let corners = [(r.x0, r.y0), (r.x1, r.y0), (r.x1, r.y1), (r.x0, r.y1)];
    for d in &ds {
        if corners
            .iter()
            .all(|&(x, y)| (x - d.cx).powi(2) + (y - d.cy).powi(2) <= d.r * d.r)
        {
            return (r.x1 - r.x0) * (r.y1 - r.y0);
        }
    }

    let mut twice_area = 0.0;

    // arcs of each circle that bound the clipped union
    let mut angles: Vec<f64> = Vec::new();
    for (i, d) in ds.iter().enumerate() {
        angles.clear();
        for (j, e) in ds.iter().enumerate() {
            if i == j {
                continue;
            }
            let dx = e.cx - d.cx;
            let dy = e.cy - d.cy;
            let dist = (dx * dx + dy * dy).sqrt();
            if dist >= d.r + e.r || dist <= (d.r - e.r).abs() {
                continue;
            }
            let base = dy.atan2(dx);
            let cosh = ((d.r * d.r + dist * dist - e.r * e.r) / (2.0 * d.r * dist)).clamp(-1.0, 1.0);
            let half = cosh.acos();
            angles.push(base - half);
            angles.push(base + half);
        }
        for x in [r.x0, r.x1] {
            let dx = x - d.cx;
            if dx.abs() < d.r {
                let h = (d.r * d.r - dx * dx).sqrt();
                angles.push(h.atan2(dx));
                angles.push((-h).atan2(dx));
            }
        }
        for y in [r.y0, r.y1] {
            let dy = y - d.cy;
            if dy.abs() < d.r {
                let h = (d.r * d.r - dy * dy).sqrt();
                angles.push(dy.atan2(h));
                angles.push(dy.atan2(-h));
            }
        }
        for a in angles.iter_mut() {
            *a = a.rem_euclid(TAU);
        }
        angles.sort_by(f64::total_cmp);
        angles.dedup();
        let arcs: Vec<(f64, f64)> = if angles.is_empty() {
            vec![(0.0, TAU)]
        } else {
            let n = angles.len();
            (0..n)
                .map(|k| {
                    let a = angles[k];
                    let b = if k + 1 < n { angles[k + 1] } else { angles[0] + TAU };
                    (a, b)
                })
                .collect()
        };
        for (a, b) in arcs {
            if b - a <= 0.0 {
                continue;
            }
            let m = 0.5 * (a + b);
            let (mx, my) = (d.cx + d.r * m.cos(), d.cy + d.r * m.sin());
            if !r.inside_strict(mx, my) {
                continue;
            }
            if ds
                .iter()
                .enumerate()
                .any(|(j, e)| j != i && e.contains_strict(mx, my))
            {
                continue;
            }
            twice_area += d.r * d.r * (b - a) + d.cx * d.r * (b.sin() - a.sin())
                - d.cy * d.r * (b.cos() - a.cos());
        }
    }

    // rectangle edge pieces covered by the union, traversed counter-clockwise
    let edges = [
        (corners[0], corners[1]),
        (corners[1], corners[2]),
        (corners[2], corners[3]),
        (corners[3], corners[0]),
    ];
    let mut ts: Vec<f64> = Vec::new();
    for ((ax, ay), (bx, by)) in edges {
        ts.clear();
        ts.push(0.0);
        ts.push(1.0);
        let (ex, ey) = (bx - ax, by - ay);
        for d in &ds {
            // |a + t e - c|^2 = r^2
            let (fx, fy) = (ax - d.cx, ay - d.cy);
            let qa = ex * ex + ey * ey;
            let qb = 2.0 * (fx * ex + fy * ey);
            let qc = fx * fx + fy * fy - d.r * d.r;
            let disc = qb * qb - 4.0 * qa * qc;
            if disc <= 0.0 {
                continue;
            }
            let s = disc.sqrt();
            for t in [(-qb - s) / (2.0 * qa), (-qb + s) / (2.0 * qa)] {
                if t > 0.0 && t < 1.0 {
                    ts.push(t);
                }
            }
        }
        ts.sort_by(f64::total_cmp);
        for w in ts.windows(2) {
            let (t0, t1) = (w[0], w[1]);
            if t1 <= t0 {
                continue;
            }
            let tm = 0.5 * (t0 + t1);
            let (mx, my) = (ax + tm * ex, ay + tm * ey);
            if ds.iter().any(|d| d.contains_strict(mx, my)) {
                let (px, py) = (ax + t0 * ex, ay + t0 * ey);
                let (qx, qy) = (ax + t1 * ex, ay + t1 * ey);
                twice_area += px * qy - qx * py;
            }
        }
    }
    (0.5 * twice_area).max(0.0)
}

/// Area of a single disk clipped to a rectangle.
pub fn disk_rect_area(d: &Disk, rect: &Aabb) -> f64 {
    union_area_in_rect(std::slice::from_ref(d), rect)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ball {
    pub center: Point,
    pub r: f64,
}

fn slice_disks(balls: &[Ball], z: f64) -> Vec<Disk> {
    balls
        .iter()
        .filter_map(|b| {
            let dz = z - b.center.z();
            let h2 = b.r * b.r - dz * dz;
            (h2 > 0.0).then(|| Disk {
                cx: b.center.x(),
                cy: b.center.y(),
                r: h2.sqrt(),
            })
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn adaptive_simpson<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

/// Volume of `(⋃ balls) ∩ bx` for a 3D box, integrating exact slice areas
/// with adaptive Simpson to absolute tolerance `tol`.
pub fn union_volume_in_box(balls: &[Ball], bx: &Aabb, tol: f64) -> f64 {
    let rect = Aabb::rect(bx.lo[0], bx.lo[1], bx.hi[0], bx.hi[1]);
    let relevant: Vec<Ball> = balls
        .iter()
        .copied()
        .filter(|b| bx.distance_to(&b.center) < b.r)
        .collect();
    if relevant.is_empty() {
        return 0.0;
    }
    let (z0, z1) = (bx.lo[2], bx.hi[2]);
    let mut cuts = vec![z0, z1];
    for b in &relevant {
        for z in [b.center.z() - b.r, b.center.z() + b.r, b.center.z()] {
            if z > z0 && z < z1 {
                cuts.push(z);
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let f = |z: f64| union_area_in_rect(&slice_disks(&relevant, z), &rect);
    let pieces = (cuts.len() - 1).max(1) as f64;
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        total += adaptive_simpson(&f, a, b, fa, fm, fb, whole, tol / pieces, 40);
    }
    total
}
