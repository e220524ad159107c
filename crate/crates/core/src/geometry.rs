//! Points, axis-aligned boxes and simulation windows.
//!
//! Points always carry three coordinates; in two dimensions the third one is
//! zero and contributes nothing to distances.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Point(pub [f64; 3]);

impl Point {
    pub const fn new2(x: f64, y: f64) -> Self {
        Point([x, y, 0.0])
    }

    pub const fn new3(x: f64, y: f64, z: f64) -> Self {
        Point([x, y, z])
    }

    #[inline]
    pub fn x(&self) -> f64 {
        self.0[0]
    }

    #[inline]
    pub fn y(&self) -> f64 {
        self.0[1]
    }

    #[inline]
    pub fn z(&self) -> f64 {
        self.0[2]
    }

    #[inline]
    pub fn euclid(&self, other: &Point) -> f64 {
        let dx = other.0[0] - self.0[0];
        let dy = other.0[1] - self.0[1];
        let dz = other.0[2] - self.0[2];
        (dx * dx + dy * dy + dz * dz).sqrt()
    }

    pub fn add(&self, v: [f64; 3]) -> Point {
        Point([self.0[0] + v[0], self.0[1] + v[1], self.0[2] + v[2]])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Hard,
    Periodic,
}

/// Closed axis-aligned box `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub dim: usize,
    pub lo: [f64; 3],
    pub hi: [f64; 3],
}

impl Aabb {
    pub fn new(dim: usize, lo: [f64; 3], hi: [f64; 3]) -> Self {
        let mut lo = lo;
        let mut hi = hi;
        for i in dim..3 {
            lo[i] = 0.0;
            hi[i] = 0.0;
        }
        Aabb { dim, lo, hi }
    }

    pub fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Aabb::new(2, [x0, y0, 0.0], [x1, y1, 0.0])
    }

    /// The cube `Q_side(center) = center + [-side/2, side/2]^d`.
    pub fn cube(dim: usize, center: Point, side: f64) -> Self {
        let h = side / 2.0;
        let c = center.0;
        Aabb::new(
            dim,
            [c[0] - h, c[1] - h, c[2] - h],
            [c[0] + h, c[1] + h, c[2] + h],
        )
    }

    pub fn side(&self, i: usize) -> f64 {
        self.hi[i] - self.lo[i]
    }

    pub fn volume(&self) -> f64 {
        (0..self.dim).map(|i| self.side(i)).product()
    }

    pub fn center(&self) -> Point {
        let mut c = [0.0; 3];
        for i in 0..self.dim {
            c[i] = 0.5 * (self.lo[i] + self.hi[i]);
        }
        Point(c)
    }

    pub fn contains(&self, p: &Point) -> bool {
        (0..self.dim).all(|i| p.0[i] >= self.lo[i] && p.0[i] <= self.hi[i])
    }

    pub fn contains_box(&self, other: &Aabb) -> bool {
        (0..self.dim).all(|i| other.lo[i] >= self.lo[i] && other.hi[i] <= self.hi[i])
    }

    pub fn intersects(&self, other: &Aabb) -> bool {
        (0..self.dim).all(|i| other.lo[i] <= self.hi[i] && other.hi[i] >= self.lo[i])
    }

    pub fn expand(&self, margin: f64) -> Aabb {
        let mut lo = self.lo;
        let mut hi = self.hi;
        for i in 0..self.dim {
            lo[i] -= margin;
            hi[i] += margin;
        }
        Aabb { dim: self.dim, lo, hi }
    }

    /// Euclidean distance from `p` to the box (0 inside).
    pub fn distance_to(&self, p: &Point) -> f64 {
        let mut s = 0.0;
        for i in 0..self.dim {
            let d = if p.0[i] < self.lo[i] {
                self.lo[i] - p.0[i]
            } else if p.0[i] > self.hi[i] {
                p.0[i] - self.hi[i]
            } else {
                0.0
            };
            s += d * d;
        }
        s.sqrt()
    }

    pub fn diameter(&self) -> f64 {
        (0..self.dim).map(|i| self.side(i).powi(2)).sum::<f64>().sqrt()
    }
}

/// Simulation region. Under [`Boundary::Hard`] points are sampled on the
/// window enlarged by `guard`; under [`Boundary::Periodic`] the window is a
/// torus and `guard` must be zero.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub dim: usize,
    pub lower: [f64; 3],
    pub upper: [f64; 3],
    pub boundary: Boundary,
    pub guard: f64,
}

impl Window {
    pub fn new(
        dim: usize,
        lower: [f64; 3],
        upper: [f64; 3],
        boundary: Boundary,
        guard: f64,
    ) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::UnsupportedDimension(dim));
        }
        for i in 0..dim {
            if !(upper[i] > lower[i]) || !lower[i].is_finite() || !upper[i].is_finite() {
                return Err(Error::InvalidWindow(format!(
                    "upper[{i}] = {} must exceed lower[{i}] = {}",
                    upper[i], lower[i]
                )));
            }
        }
        if !(guard >= 0.0) || !guard.is_finite() {
            return Err(Error::InvalidWindow(format!("guard {guard} must be >= 0")));
        }
        if boundary == Boundary::Periodic && guard != 0.0 {
            return Err(Error::InvalidWindow(
                "periodic windows take no guard margin".into(),
            ));
        }
        let mut lower = lower;
        let mut upper = upper;
        for i in dim..3 {
            lower[i] = 0.0;
            upper[i] = 0.0;
        }
        Ok(Window {
            dim,
            lower,
            upper,
            boundary,
            guard,
        })
    }

    /// `[0, side]^2` with the given boundary and no guard.
    pub fn square(side: f64, boundary: Boundary) -> Result<Self> {
        Window::new(2, [0.0; 3], [side, side, 0.0], boundary, 0.0)
    }

    pub fn with_guard(mut self, guard: f64) -> Result<Self> {
        self.guard = guard;
        Window::new(self.dim, self.lower, self.upper, self.boundary, guard)
    }

    pub fn is_periodic(&self) -> bool {
        self.boundary == Boundary::Periodic
    }

    pub fn side(&self, i: usize) -> f64 {
        self.upper[i] - self.lower[i]
    }

    /// The reporting window without guard.
    pub fn reporting(&self) -> Aabb {
        Aabb::new(self.dim, self.lower, self.upper)
    }

    /// The region on which points and environments are realized.
    pub fn region(&self) -> Aabb {
        self.reporting().expand(self.guard)
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.region().contains(p)
    }

    pub fn check(&self, p: &Point) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::OutsideWindow { point: p.0 })
        }
    }

    /// Maps a point onto the fundamental domain `[lower, upper)` of a
    /// periodic window; identity under hard boundaries.
    pub fn wrap(&self, p: Point) -> Point {
        if !self.is_periodic() {
            return p;
        }
        let mut c = p.0;
        for i in 0..self.dim {
            let l = self.side(i);
            let mut v = (c[i] - self.lower[i]).rem_euclid(l);
            if v >= l {
                v = 0.0;
            }
            c[i] = self.lower[i] + v;
        }
        Point(c)
    }

    /// `b - a`, using the minimum image convention under periodic boundaries.
    #[inline]
    pub fn displacement(&self, a: &Point, b: &Point) -> [f64; 3] {
        let mut d = [
            b.0[0] - a.0[0],
            b.0[1] - a.0[1],
            b.0[2] - a.0[2],
        ];
        if self.boundary == Boundary::Periodic {
            for (i, di) in d.iter_mut().enumerate().take(self.dim) {
                let l = self.upper[i] - self.lower[i];
                *di -= l * (*di / l).round();
            }
        }
        d
    }

    #[inline]
    pub fn dist2(&self, a: &Point, b: &Point) -> f64 {
        let d = self.displacement(a, b);
        d[0] * d[0] + d[1] * d[1] + d[2] * d[2]
    }

    /// Unchecked boundary-aware distance.
    #[inline]
    pub fn dist(&self, a: &Point, b: &Point) -> f64 {
        self.dist2(a, b).sqrt()
    }

    /// Largest radius for which the minimum image is unambiguous.
    pub fn half_min_side(&self) -> f64 {
        (0..self.dim)
            .map(|i| self.side(i))
            .fold(f64::INFINITY, f64::min)
            / 2.0
    }
}

/// Boundary-aware distance between two points of the window.
pub fn pair_distance(a: &Point, b: &Point, w: &Window) -> Result<f64> {
    w.check(a)?;
    w.check(b)?;
    Ok(w.dist(a, b))
}

/// Volume of the unit ball in dimension `d` (2 or 3).
pub fn unit_ball_volume(d: usize) -> f64 {
    match d {
        1 => 2.0,
        2 => std::f64::consts::PI,
        3 => 4.0 / 3.0 * std::f64::consts::PI,
        _ => panic!("unsupported dimension {d}"),
    }
}

pub fn ball_volume(d: usize, r: f64) -> f64 {
    unit_ball_volume(d) * r.powi(d as i32)
}
