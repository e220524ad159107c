//! Random intensity measures and Cox point processes driven by them.
//!
//! An [`IntensityModel`] describes the law of the random measure `Λ`; an
//! [`Environment`] is one realization on a window. Conditionally on the
//! environment, [`sample_cox`] draws a Poisson process with intensity `λΛ`.
//!
//! Patterns at different `λ` are coupled: every sampler draws proposals in
//! blocks of unit "time" and keeps a proposal when its time mark is below
//! `λ`, so for a fixed seed the pattern at `λ` is a subset of the pattern at
//! any `λ' > λ`.

use std::fmt::Write as _;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::disks::{disk_rect_area, union_area_in_rect, union_volume_in_box, Ball, Disk};
use crate::error::{Error, Result};
use crate::geometry::{ball_volume, Aabb, Boundary, Point, Window};
use crate::grid::CellGrid;
use crate::io::num;
use crate::seed::SeedPath;
use crate::tessellation::{delaunay, delaunay_edges, voronoi_edges, Segment, SegmentSet};

/// Mean Voronoi edge length per unit area for unit site intensity, from the
/// Monte Carlo calibration in [`calibrate_length_density`] (400 periodic
/// 40×40 tori, `examples/calibrate.rs`). Half-width of the 95% interval: [`VORONOI_LENGTH_DENSITY_CI`].
pub const VORONOI_LENGTH_DENSITY: f64 = 1.999_522_381_028_251_6;
pub const VORONOI_LENGTH_DENSITY_CI: f64 = 2.462e-3;
/// Mean Delaunay edge length per unit area for unit site intensity.
pub const DELAUNAY_LENGTH_DENSITY: f64 = 3.394_604_962_998_970_5;
pub const DELAUNAY_LENGTH_DENSITY_CI: f64 = 3.908e-3;

/// Boolean model of balls with fixed radius around Poisson germs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BooleanModelSpec {
    pub germ_intensity: f64,
    pub grain_radius: f64,
}

impl BooleanModelSpec {
    pub fn check(&self) -> Result<()> {
        if !(self.germ_intensity > 0.0 && self.germ_intensity.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "germ intensity {} must be positive",
                self.germ_intensity
            )));
        }
        if !(self.grain_radius > 0.0 && self.grain_radius.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "grain radius {} must be positive",
                self.grain_radius
            )));
        }
        Ok(())
    }

    /// Probability that a fixed point is covered by some grain.
    pub fn coverage(&self, d: usize) -> f64 {
        1.0 - (-self.germ_intensity * ball_volume(d, self.grain_radius)).exp()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IntensityModel {
    /// Lebesgue measure.
    Homogeneous,
    /// Density `amplitude * #{germs within kernel_radius}` over Poisson germs
    /// of rate `site_rate`.
    ShotNoise {
        site_rate: f64,
        kernel_radius: f64,
        amplitude: f64,
    },
    /// Density `inside` on the Boolean model `grains`, `outside` elsewhere.
    Modulated {
        inside: f64,
        outside: f64,
        grains: BooleanModelSpec,
    },
    /// `weight` times the length measure on the edges of a Poisson–Voronoi
    /// tessellation with site rate `site_rate`.
    VoronoiEdges { site_rate: f64, weight: f64 },
    /// As [`IntensityModel::VoronoiEdges`] for the Poisson–Delaunay edges.
    DelaunayEdges { site_rate: f64, weight: f64 },
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} = {v} must be positive")))
    }
}

fn non_negative(name: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} = {v} must be >= 0")))
    }
}

impl IntensityModel {
    pub fn shot_noise(site_rate: f64, kernel_radius: f64) -> Self {
        IntensityModel::ShotNoise {
            site_rate,
            kernel_radius,
            amplitude: 1.0,
        }
    }

    pub fn modulated(inside: f64, outside: f64, germ_intensity: f64, grain_radius: f64) -> Self {
        IntensityModel::Modulated {
            inside,
            outside,
            grains: BooleanModelSpec {
                germ_intensity,
                grain_radius,
            },
        }
    }

    pub fn voronoi(site_rate: f64) -> Self {
        IntensityModel::VoronoiEdges {
            site_rate,
            weight: 1.0,
        }
    }

    pub fn delaunay(site_rate: f64) -> Self {
        IntensityModel::DelaunayEdges {
            site_rate,
            weight: 1.0,
        }
    }

    /// Short identifier used in tables.
    pub fn name(&self) -> &'static str {
        match self {
            IntensityModel::Homogeneous => "poisson",
            IntensityModel::ShotNoise { .. } => "shot_noise",
            IntensityModel::Modulated { .. } => "modulated",
            IntensityModel::VoronoiEdges { .. } => "voronoi",
            IntensityModel::DelaunayEdges { .. } => "delaunay",
        }
    }

    pub fn is_tessellation(&self) -> bool {
        matches!(
            self,
            IntensityModel::VoronoiEdges { .. } | IntensityModel::DelaunayEdges { .. }
        )
    }

    pub fn check(&self) -> Result<()> {
        match *self {
            IntensityModel::Homogeneous => Ok(()),
            IntensityModel::ShotNoise {
                site_rate,
                kernel_radius,
                amplitude,
            } => {
                positive("site_rate", site_rate)?;
                positive("kernel_radius", kernel_radius)?;
                non_negative("amplitude", amplitude)
            }
            IntensityModel::Modulated {
                inside,
                outside,
                grains,
            } => {
                non_negative("inside", inside)?;
                non_negative("outside", outside)?;
                if inside + outside <= 0.0 {
                    return Err(Error::InvalidParameter(
                        "modulated model needs inside + outside > 0".into(),
                    ));
                }
                grains.check()
            }
            IntensityModel::VoronoiEdges { site_rate, weight }
            | IntensityModel::DelaunayEdges { site_rate, weight } => {
                positive("site_rate", site_rate)?;
                non_negative("weight", weight)
            }
        }
    }

    /// Analytic `E[Λ(Q_1)]`.
    pub fn mean_mass(&self, d: usize) -> f64 {
        match *self {
            IntensityModel::Homogeneous => 1.0,
            IntensityModel::ShotNoise {
                site_rate,
                kernel_radius,
                amplitude,
            } => site_rate * amplitude * ball_volume(d, kernel_radius),
            IntensityModel::Modulated {
                inside,
                outside,
                grains,
            } => {
                let p = grains.coverage(d);
                inside * p + outside * (1.0 - p)
            }
            IntensityModel::VoronoiEdges { site_rate, weight } => {
                weight * VORONOI_LENGTH_DENSITY * site_rate.sqrt()
            }
            IntensityModel::DelaunayEdges { site_rate, weight } => {
                weight * DELAUNAY_LENGTH_DENSITY * site_rate.sqrt()
            }
        }
    }

    /// Rescales the model so that `E[Λ(Q_1)] = 1`.
    pub fn normalize(&self, d: usize) -> Result<IntensityModel> {
        self.check()?;
        let m = self.mean_mass(d);
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "cannot normalize a model with mean mass {m}"
            )));
        }
        let s = 1.0 / m;
        Ok(match *self {
            IntensityModel::Homogeneous => IntensityModel::Homogeneous,
            IntensityModel::ShotNoise {
                site_rate,
                kernel_radius,
                amplitude,
            } => IntensityModel::ShotNoise {
                site_rate,
                kernel_radius,
                amplitude: amplitude * s,
            },
            IntensityModel::Modulated {
                inside,
                outside,
                grains,
            } => IntensityModel::Modulated {
                inside: inside * s,
                outside: outside * s,
                grains,
            },
            IntensityModel::VoronoiEdges { site_rate, weight } => IntensityModel::VoronoiEdges {
                site_rate,
                weight: weight * s,
            },
            IntensityModel::DelaunayEdges { site_rate, weight } => IntensityModel::DelaunayEdges {
                site_rate,
                weight: weight * s,
            },
        })
    }

    /// Range `b` beyond which restrictions of `Λ` are independent; `None`
    /// when no finite range exists.
    pub fn dependence_range(&self) -> Option<f64> {
        match *self {
            IntensityModel::Homogeneous => Some(0.0),
            IntensityModel::ShotNoise { kernel_radius, .. } => Some(2.0 * kernel_radius),
            IntensityModel::Modulated { grains, .. } => Some(2.0 * grains.grain_radius),
            IntensityModel::VoronoiEdges { .. } | IntensityModel::DelaunayEdges { .. } => None,
        }
    }

    /// Default guard width for hard windows.
    pub fn default_guard(&self) -> f64 {
        match *self {
            IntensityModel::Homogeneous => 0.0,
            IntensityModel::ShotNoise { kernel_radius, .. } => 2.0 * kernel_radius,
            IntensityModel::Modulated { grains, .. } => 2.0 * grains.grain_radius,
            IntensityModel::VoronoiEdges { site_rate, .. }
            | IntensityModel::DelaunayEdges { site_rate, .. } => 1.5 / site_rate.sqrt(),
        }
    }

    /// Padding around the sampled region on which tessellation sites are
    /// drawn.
    pub fn site_padding(&self) -> f64 {
        match *self {
            IntensityModel::VoronoiEdges { site_rate, .. }
            | IntensityModel::DelaunayEdges { site_rate, .. } => 3.0 / site_rate.sqrt(),
            _ => 0.0,
        }
    }
}

/// Displays the dependence range, `unbounded` when infinite.
pub fn format_range(r: Option<f64>) -> String {
    match r {
        Some(b) => num(b),
        None => "unbounded".into(),
    }
}

/// The sampled payload of an environment.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Realization {
    Uniform {
        density: f64,
    },
    ShotNoise {
        germs: Vec<Point>,
        radius: f64,
        amplitude: f64,
    },
    Modulated {
        centers: Vec<Point>,
        radius: f64,
        inside: f64,
        outside: f64,
    },
    Segments {
        sites: Vec<Point>,
        segments: SegmentSet,
        weight: f64,
    },
}

/// One realization of a random measure on a window.
#[derive(Clone, Debug, Serialize)]
pub struct Environment {
    pub model: IntensityModel,
    pub window: Window,
    pub seed: SeedPath,
    pub realization: Realization,
    #[serde(skip)]
    index: Option<CellGrid>,
}

pub(crate) fn poisson(rng: &mut ChaCha8Rng, mean: f64) -> u64 {
    if !(mean > 0.0) {
        return 0;
    }
    Poisson::new(mean).map(|p| p.sample(rng) as u64).unwrap_or(0)
}

fn uniform_in_box(rng: &mut ChaCha8Rng, b: &Aabb) -> Point {
    let mut c = [0.0; 3];
    for (i, ci) in c.iter_mut().enumerate().take(b.dim) {
        *ci = b.lo[i] + rng.random::<f64>() * b.side(i);
    }
    Point(c)
}

fn uniform_in_ball(rng: &mut ChaCha8Rng, d: usize, center: &Point, r: f64) -> Point {
    if d == 2 {
        let rho = r * rng.random::<f64>().sqrt();
        let theta = std::f64::consts::TAU * rng.random::<f64>();
        return Point::new2(center.x() + rho * theta.cos(), center.y() + rho * theta.sin());
    }
    loop {
        let v = [
            2.0 * rng.random::<f64>() - 1.0,
            2.0 * rng.random::<f64>() - 1.0,
            2.0 * rng.random::<f64>() - 1.0,
        ];
        if v[0] * v[0] + v[1] * v[1] + v[2] * v[2] < 1.0 {
            return center.add([r * v[0], r * v[1], r * v[2]]);
        }
    }
}

/// Germ region of a window: the sampled region enlarged by `pad` under hard
/// boundaries, the torus itself under periodic ones.
fn germ_region(w: &Window, pad: f64) -> Aabb {
    if w.is_periodic() {
        w.reporting()
    } else {
        w.region().expand(pad)
    }
}

fn index_window(w: &Window, pad: f64) -> Window {
    if w.is_periodic() {
        *w
    } else {
        let r = w.region().expand(pad);
        Window::new(w.dim, r.lo, r.hi, Boundary::Hard, 0.0).expect("expanded region is valid")
    }
}

fn germs(rng: &mut ChaCha8Rng, region: &Aabb, rate: f64) -> Vec<Point> {
    let n = poisson(rng, rate * region.volume());
    (0..n).map(|_| uniform_in_box(rng, region)).collect()
}

/// Shifts of the periodic lattice that bring a ball of radius `r` around
/// `c` into contact with `b`.
fn periodic_images(w: &Window, c: &Point, r: f64, b: &Aabb) -> Vec<Point> {
    if !w.is_periodic() {
        return if b.distance_to(c) < r { vec![*c] } else { Vec::new() };
    }
    let mut out = Vec::new();
    let range = |i: usize| if i < w.dim { -1i32..=1 } else { 0..=0 };
    for sz in range(2) {
        for sy in range(1) {
            for sx in range(0) {
                let s = [sx, sy, sz];
                let mut v = [0.0; 3];
                for i in 0..w.dim {
                    v[i] = s[i] as f64 * w.side(i);
                }
                let p = c.add(v);
                if b.distance_to(&p) < r {
                    out.push(p);
                }
            }
        }
    }
    out
}

fn tessellation_segments(
    model: &IntensityModel,
    w: &Window,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<Point>, SegmentSet)> {
    let (rate, voronoi) = match *model {
        IntensityModel::VoronoiEdges { site_rate, .. } => (site_rate, true),
        IntensityModel::DelaunayEdges { site_rate, .. } => (site_rate, false),
        _ => unreachable!(),
    };
    let pad = model.site_padding();
    let clip = germ_region(w, 0.0);
    let sites;
    let mut all;
    if w.is_periodic() {
        if pad >= w.half_min_side() {
            return Err(Error::InvalidWindow(format!(
                "periodic window too small for tessellation padding {pad}"
            )));
        }
        sites = germs(rng, &w.reporting(), rate);
        all = sites.clone();
        let grown = w.reporting().expand(pad);
        for s in &sites {
            for p in periodic_images(w, s, f64::INFINITY, &grown) {
                if p != *s && grown.contains(&p) {
                    all.push(p);
                }
            }
        }
    } else {
        sites = germs(rng, &w.region().expand(pad), rate);
        all = sites.clone();
    }
    let set = match all.len() {
        0 | 1 => SegmentSet::default(),
        2 => {
            let pair = [all[0], all[1]];
            if voronoi {
                crate::tessellation::voronoi_of_sites(&pair, &clip)?
            } else {
                SegmentSet::new(
                    Segment {
                        a: pair[0],
                        b: pair[1],
                        sources: [0, 1],
                    }
                    .clip(&clip)
                    .into_iter()
                    .collect(),
                )
            }
        }
        _ => {
            let tri = delaunay(&all)?;
            if voronoi {
                voronoi_edges(&tri, &clip)
            } else {
                delaunay_edges(&tri, &clip)
            }
        }
    };
    Ok((sites, set))
}

/// Draws one realization of `model` on `w`.
pub fn sample_environment(model: &IntensityModel, w: &Window, s: &SeedPath) -> Result<Environment> {
    model.check()?;
    if model.is_tessellation() && w.dim != 2 {
        return Err(Error::UnsupportedDimension(w.dim));
    }
    let mut rng = s.rng();
    let (realization, index) = match *model {
        IntensityModel::Homogeneous => (Realization::Uniform { density: 1.0 }, None),
        IntensityModel::ShotNoise {
            site_rate,
            kernel_radius,
            amplitude,
        } => {
            let g = germs(&mut rng, &germ_region(w, kernel_radius), site_rate);
            let grid = CellGrid::new(&index_window(w, kernel_radius), &g, kernel_radius);
            (
                Realization::ShotNoise {
                    germs: g,
                    radius: kernel_radius,
                    amplitude,
                },
                Some(grid),
            )
        }
        IntensityModel::Modulated {
            inside,
            outside,
            grains,
        } => {
            let r = grains.grain_radius;
            let g = germs(&mut rng, &germ_region(w, r), grains.germ_intensity);
            let grid = CellGrid::new(&index_window(w, r), &g, r);
            (
                Realization::Modulated {
                    centers: g,
                    radius: r,
                    inside,
                    outside,
                },
                Some(grid),
            )
        }
        IntensityModel::VoronoiEdges { weight, .. } | IntensityModel::DelaunayEdges { weight, .. } => {
            let (sites, segments) = tessellation_segments(model, w, &mut rng)?;
            (
                Realization::Segments {
                    sites,
                    segments,
                    weight,
                },
                None,
            )
        }
    };
    Ok(Environment {
        model: *model,
        window: *w,
        seed: s.clone(),
        realization,
        index,
    })
}

impl Environment {
    /// A modulated or shot-noise environment with explicitly placed grain
    /// (or germ) centres.
    pub fn from_grains(model: IntensityModel, window: Window, centers: Vec<Point>) -> Result<Self> {
        model.check()?;
        let (realization, r) = match model {
            IntensityModel::Modulated {
                inside,
                outside,
                grains,
            } => (
                Realization::Modulated {
                    centers,
                    radius: grains.grain_radius,
                    inside,
                    outside,
                },
                grains.grain_radius,
            ),
            IntensityModel::ShotNoise {
                kernel_radius,
                amplitude,
                ..
            } => (
                Realization::ShotNoise {
                    germs: centers,
                    radius: kernel_radius,
                    amplitude,
                },
                kernel_radius,
            ),
            _ => {
                return Err(Error::InvalidParameter(
                    "explicit grains need a modulated or shot-noise model".into(),
                ))
            }
        };
        let pts = match &realization {
            Realization::Modulated { centers, .. } => centers,
            Realization::ShotNoise { germs, .. } => germs,
            _ => unreachable!(),
        };
        let index = Some(CellGrid::new(&index_window(&window, r), pts, r));
        Ok(Environment {
            model,
            window,
            seed: SeedPath::new(0),
            realization,
            index,
        })
    }

    /// A tessellation-type environment carrying the given segments.
    pub fn from_segments(model: IntensityModel, window: Window, segments: SegmentSet) -> Result<Self> {
        model.check()?;
        let weight = match model {
            IntensityModel::VoronoiEdges { weight, .. } | IntensityModel::DelaunayEdges { weight, .. } => weight,
            _ => {
                return Err(Error::InvalidParameter(
                    "explicit segments need a tessellation model".into(),
                ))
            }
        };
        Ok(Environment {
            model,
            window,
            seed: SeedPath::new(0),
            realization: Realization::Segments {
                sites: Vec::new(),
                segments,
                weight,
            },
            index: None,
        })
    }

    /// The region on which the measure is realized and points are sampled.
    pub fn region(&self) -> Aabb {
        if self.window.is_periodic() {
            self.window.reporting()
        } else {
            self.window.region()
        }
    }

    fn covering_count(&self, x: &Point, centers: &[Point], r: f64, stop_at_one: bool) -> usize {
        let grid = self.index.as_ref().expect("disk environments carry an index");
        let w = grid.window();
        let r2 = r * r;
        let mut count = 0;
        let mut done = false;
        grid.for_each_candidate(x, r, |id| {
            if done {
                return;
            }
            if w.dist2(x, &centers[id]) < r2 {
                count += 1;
                if stop_at_one {
                    done = true;
                }
            }
        });
        count
    }

    /// Density of `Λ` at `x`; zero for the singular tessellation measures.
    pub fn density_at(&self, x: &Point) -> f64 {
        match &self.realization {
            Realization::Uniform { density } => *density,
            Realization::ShotNoise {
                germs,
                radius,
                amplitude,
            } => *amplitude * self.covering_count(x, germs, *radius, false) as f64,
            Realization::Modulated {
                centers,
                radius,
                inside,
                outside,
            } => {
                if self.covering_count(x, centers, *radius, true) > 0 {
                    *inside
                } else {
                    *outside
                }
            }
            Realization::Segments { .. } => 0.0,
        }
    }

    /// Whether `x` lies in a grain (modulated) or a kernel disk (shot noise).
    pub fn covered(&self, x: &Point) -> bool {
        match &self.realization {
            Realization::ShotNoise { germs, radius, .. } => {
                self.covering_count(x, germs, *radius, true) > 0
            }
            Realization::Modulated { centers, radius, .. } => {
                self.covering_count(x, centers, *radius, true) > 0
            }
            _ => false,
        }
    }

    fn check_box(&self, b: &Aabb) -> Result<()> {
        let region = self.region();
        let slack = 1e-12 * region.diameter();
        if b.dim != self.window.dim || !region.expand(slack).contains_box(b) {
            return Err(Error::BoxOutsideRegion);
        }
        Ok(())
    }

    /// Disks (or balls) of the realization that meet `b`, with periodic
    /// images where needed.
    pub fn disks_touching(&self, b: &Aabb) -> Vec<Point> {
        let (centers, r) = match &self.realization {
            Realization::ShotNoise { germs, radius, .. } => (germs, *radius),
            Realization::Modulated { centers, radius, .. } => (centers, *radius),
            _ => return Vec::new(),
        };
        centers
            .iter()
            .flat_map(|c| periodic_images(&self.window, c, r, b))
            .collect()
    }

    fn covered_volume(&self, centers: &[Point], r: f64, b: &Aabb, union: bool) -> f64 {
        if self.window.dim == 2 {
            let disks: Vec<Disk> = centers.iter().map(|c| Disk::new(*c, r)).collect();
            if union {
                union_area_in_rect(&disks, b)
            } else {
                disks.iter().map(|d| disk_rect_area(d, b)).sum()
            }
        } else {
            let tol = 1e-12 * ball_volume(3, r);
            let balls: Vec<Ball> = centers.iter().map(|c| Ball { center: *c, r }).collect();
            if union {
                union_volume_in_box(&balls, b, tol * balls.len().max(1) as f64)
            } else {
                balls
                    .iter()
                    .map(|ball| union_volume_in_box(std::slice::from_ref(ball), b, tol))
                    .sum()
            }
        }
    }

    /// `Λ(B)` for an axis-aligned box inside the sampled region.
    pub fn measure_box(&self, b: &Aabb) -> Result<f64> {
        self.check_box(b)?;
        Ok(match &self.realization {
            Realization::Uniform { density } => density * b.volume(),
            Realization::ShotNoise { radius, amplitude, .. } => {
                let c = self.disks_touching(b);
                amplitude * self.covered_volume(&c, *radius, b, false)
            }
            Realization::Modulated {
                radius,
                inside,
                outside,
                ..
            } => {
                let c = self.disks_touching(b);
                let covered = self.covered_volume(&c, *radius, b, true);
                outside * b.volume() + (inside - outside) * covered
            }
            Realization::Segments {
                segments, weight, ..
            } => weight * segments.length_in(b),
        })
    }

    /// JSON export of model, seed, normalization and payload.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Export<'a> {
            model: &'a IntensityModel,
            window: &'a Window,
            seed: &'a SeedPath,
            mean_mass: f64,
            dependence_range: String,
            realization: &'a Realization,
        }
        serde_json::to_string_pretty(&Export {
            model: &self.model,
            window: &self.window,
            seed: &self.seed,
            mean_mass: self.model.mean_mass(self.window.dim),
            dependence_range: format_range(self.model.dependence_range()),
            realization: &self.realization,
        })
        .expect("environment serializes")
    }
}

/// A realization of the Cox process inside a window.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PointPattern {
    pub points: Vec<Point>,
    pub window: Window,
    pub lambda: f64,
    pub model: Option<IntensityModel>,
    pub seed: Option<SeedPath>,
}

impl PointPattern {
    /// A pattern from explicit positions; all must lie in the window.
    pub fn from_points(window: Window, points: Vec<Point>) -> Result<Self> {
        for p in &points {
            window.check(p)?;
        }
        Ok(PointPattern {
            points,
            window,
            lambda: 0.0,
            model: None,
            seed: None,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn grid(&self, cell_side: f64) -> CellGrid {
        CellGrid::new(&self.window, &self.points, cell_side)
    }

    /// Number of points inside the closed box `b`.
    pub fn count_in(&self, b: &Aabb) -> usize {
        self.points.iter().filter(|p| b.contains(p)).count()
    }

    /// CSV with header `id,x,y` (or `id,x,y,z` in three dimensions).
    pub fn to_csv(&self) -> String {
        let mut out = String::from(if self.window.dim == 3 { "id,x,y,z\n" } else { "id,x,y\n" });
        for (i, p) in self.points.iter().enumerate() {
            if self.window.dim == 3 {
                let _ = writeln!(out, "{i},{},{},{}", num(p.x()), num(p.y()), num(p.z()));
            } else {
                let _ = writeln!(out, "{i},{},{}", num(p.x()), num(p.y()));
            }
        }
        out
    }
}

fn blocks(lambda: f64) -> u64 {
    if lambda > 0.0 {
        lambda.ceil() as u64
    } else {
        0
    }
}

fn finish(env: &Environment, lambda: f64, s: &SeedPath, points: Vec<Point>) -> PointPattern {
    PointPattern {
        points,
        window: env.window,
        lambda,
        model: Some(env.model),
        seed: Some(s.clone()),
    }
}

/// Thinning of unit-time blocks of a dominating homogeneous process with
/// rate `sup`: keeps a proposal `x` with mark `v` when `v * sup < density(x)`.
fn sample_by_thinning<F: Fn(&Point) -> f64>(
    env: &Environment,
    lambda: f64,
    s: &SeedPath,
    sup: f64,
    density: F,
) -> Vec<Point> {
    let region = env.region();
    let mut out = Vec::new();
    for k in 0..blocks(lambda) {
        let mut rng = s.derive("block", k).rng();
        let n = poisson(&mut rng, sup * region.volume());
        for _ in 0..n {
            let x = uniform_in_box(&mut rng, &region);
            let t = k as f64 + rng.random::<f64>();
            let v = rng.random::<f64>();
            if t < lambda && v * sup < density(&x) {
                out.push(x);
            }
        }
    }
    out
}

/// Conditional Poisson sample with intensity `λΛ` given the environment.
pub fn sample_cox(env: &Environment, lambda: f64, s: &SeedPath) -> Result<PointPattern> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!("lambda = {lambda} must be positive")));
    }
    let region = env.region();
    let w = &env.window;
    let points = match &env.realization {
        Realization::Uniform { density } => sample_by_thinning(env, lambda, s, *density, |_| *density),
        Realization::Modulated { inside, outside, .. } => {
            let sup = inside.max(*outside);
            sample_by_thinning(env, lambda, s, sup, |x| env.density_at(x))
        }
        Realization::ShotNoise {
            germs,
            radius,
            amplitude,
        } => {
            let mean = amplitude * ball_volume(w.dim, *radius);
            let mut out = Vec::new();
            for k in 0..blocks(lambda) {
                let mut rng = s.derive("block", k).rng();
                for g in germs {
                    let n = poisson(&mut rng, mean);
                    for _ in 0..n {
                        let x = uniform_in_ball(&mut rng, w.dim, g, *radius);
                        let t = k as f64 + rng.random::<f64>();
                        if t >= lambda {
                            continue;
                        }
                        if w.is_periodic() {
                            out.push(w.wrap(x));
                        } else if region.contains(&x) {
                            out.push(x);
                        }
                    }
                }
            }
            out
        }
        Realization::Segments {
            segments, weight, ..
        } => {
            let mut cumulative = Vec::with_capacity(segments.len());
            let mut acc = 0.0;
            for seg in &segments.segments {
                acc += seg.length();
                cumulative.push(acc);
            }
            let mut out = Vec::new();
            for k in 0..blocks(lambda) {
                let mut rng = s.derive("block", k).rng();
                let n = poisson(&mut rng, weight * acc);
                for _ in 0..n {
                    let u = rng.random::<f64>() * acc;
                    let i = cumulative.partition_point(|&c| c <= u).min(cumulative.len() - 1);
                    let seg = &segments.segments[i];
                    let f = rng.random::<f64>();
                    let x = Point::new2(
                        seg.a.x() + f * (seg.b.x() - seg.a.x()),
                        seg.a.y() + f * (seg.b.y() - seg.a.y()),
                    );
                    let t = k as f64 + rng.random::<f64>();
                    if t < lambda {
                        out.push(if w.is_periodic() { w.wrap(x) } else { x });
                    }
                }
            }
            out
        }
    };
    Ok(finish(env, lambda, s, points))
}

/// Shot-noise sampling by thinning a dominating homogeneous process; an
/// independent construction of the same law as the cluster sampler in
/// [`sample_cox`].
pub fn sample_shot_noise_by_thinning(env: &Environment, lambda: f64, s: &SeedPath) -> Result<PointPattern> {
    let Realization::ShotNoise {
        germs,
        radius,
        amplitude,
    } = &env.realization
    else {
        return Err(Error::InvalidParameter("not a shot-noise environment".into()));
    };
    // a point covered by k kernels has k germs pairwise within 2R
    let grid = CellGrid::new(&index_window(&env.window, *radius), germs, 2.0 * radius);
    let most = (0..germs.len())
        .map(|i| grid.neighbors_within(germs, &germs[i], 2.0 * radius, Some(i)).len())
        .max()
        .map_or(0, |m| m + 1);
    let sup = amplitude * most as f64;
    let points = if sup > 0.0 {
        sample_by_thinning(env, lambda, s, sup, |x| env.density_at(x))
    } else {
        Vec::new()
    };
    Ok(finish(env, lambda, s, points))
}

/// Monte Carlo estimate of the mean edge length per unit area of a
/// tessellation with unit site rate, over `reps` periodic tori of side
/// `side`. Returns `(mean, half-width of the 95% interval)`.
pub fn calibrate_length_density(voronoi: bool, reps: usize, side: f64, s: &SeedPath) -> Result<(f64, f64)> {
    let model = if voronoi {
        IntensityModel::voronoi(1.0)
    } else {
        IntensityModel::delaunay(1.0)
    };
    let w = Window::square(side, Boundary::Periodic)?;
    let mut values = Vec::with_capacity(reps);
    for k in 0..reps {
        let env = sample_environment(&model, &w, &s.derive("calibration", k as u64))?;
        let Realization::Segments { segments, .. } = &env.realization else {
            unreachable!()
        };
        values.push(segments.total_length / (side * side));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    Ok((mean, 1.96 * (var / n).sqrt()))
}
