//! Uniform cell grid for fixed-radius neighbour queries.

use crate::geometry::{Point, Window};

/// Buckets point ids by the cell containing them. Cells are stored in
/// compressed rows: `ids[starts[c]..starts[c + 1]]` is the bucket of cell `c`.
#[derive(Clone, Debug)]
pub struct CellGrid {
    window: Window,
    origin: [f64; 3],
    cell: [f64; 3],
    counts: [usize; 3],
    starts: Vec<usize>,
    ids: Vec<usize>,
}

const MAX_CELLS_PER_POINT: usize = 4;

impl CellGrid {
    /// Builds a grid whose cells have side at least `cell_side`.
    pub fn new(window: &Window, points: &[Point], cell_side: f64) -> Self {
        let region = window.region();
        let dim = window.dim;
        let budget = (MAX_CELLS_PER_POINT * points.len()).max(64);
        let mut side = if cell_side.is_finite() && cell_side > 0.0 {
            cell_side
        } else {
            region.diameter().max(1e-300)
        };
        let counts = loop {
            let mut counts = [1usize; 3];
            for (i, c) in counts.iter_mut().enumerate().take(dim) {
                let n = (region.side(i) / side).floor();
                *c = if n < 1.0 { 1 } else { n.min(1e9) as usize };
            }
            if counts.iter().product::<usize>() <= budget {
                break counts;
            }
            side *= 2.0;
        };
        let mut cell = [1.0; 3];
        for i in 0..dim {
            cell[i] = region.side(i) / counts[i] as f64;
        }
        let mut grid = CellGrid {
            window: *window,
            origin: region.lo,
            cell,
            counts,
            starts: Vec::new(),
            ids: Vec::new(),
        };
        let ncells: usize = counts.iter().product();
        let keys: Vec<usize> = points.iter().map(|p| grid.flat(grid.coords_of(p))).collect();
        let mut starts = vec![0usize; ncells + 1];
        for &k in &keys {
            starts[k + 1] += 1;
        }
        for c in 0..ncells {
            starts[c + 1] += starts[c];
        }
        let mut fill = starts.clone();
        let mut ids = vec![0usize; points.len()];
        for (id, &k) in keys.iter().enumerate() {
            ids[fill[k]] = id;
            fill[k] += 1;
        }
        grid.starts = starts;
        grid.ids = ids;
        grid
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn cell_side(&self) -> [f64; 3] {
        self.cell
    }

    pub fn counts(&self) -> [usize; 3] {
        self.counts
    }

    /// Integer coordinates of the cell containing `p` (clamped to the grid).
    pub fn coords_of(&self, p: &Point) -> [usize; 3] {
        let mut c = [0usize; 3];
        for (i, ci) in c.iter_mut().enumerate().take(self.window.dim) {
            let v = ((p.0[i] - self.origin[i]) / self.cell[i]).floor();
            *ci = if v < 0.0 {
                0
            } else {
                (v as usize).min(self.counts[i] - 1)
            };
        }
        c
    }

    fn flat(&self, c: [usize; 3]) -> usize {
        (c[2] * self.counts[1] + c[1]) * self.counts[0] + c[0]
    }

    pub fn bucket(&self, coords: [usize; 3]) -> &[usize] {
        let k = self.flat(coords);
        &self.ids[self.starts[k]..self.starts[k + 1]]
    }

    fn axis_range(&self, i: usize, center: usize, rings: usize) -> Vec<usize> {
        let n = self.counts[i];
        if self.window.is_periodic() {
            if 2 * rings + 1 >= n {
                return (0..n).collect();
            }
            (0..=2 * rings)
                .map(|k| (center + n + k - rings) % n)
                .collect()
        } else {
            let lo = center.saturating_sub(rings);
            let hi = (center + rings).min(n - 1);
            (lo..=hi).collect()
        }
    }

    /// Calls `f` for every id in the cells that may hold points within
    /// `radius` of `x`.
    pub fn for_each_candidate<F: FnMut(usize)>(&self, x: &Point, radius: f64, mut f: F) {
        let dim = self.window.dim;
        let c = self.coords_of(x);
        let mut ranges: [Vec<usize>; 3] = [vec![0], vec![0], vec![0]];
        for i in 0..dim {
            let rings = if radius.is_finite() {
                (radius / self.cell[i]).ceil() as usize
            } else {
                self.counts[i]
            };
            ranges[i] = self.axis_range(i, c[i], rings.min(self.counts[i]));
        }
        for &cz in &ranges[2] {
            for &cy in &ranges[1] {
                for &cx in &ranges[0] {
                    for &id in self.bucket([cx, cy, cz]) {
                        f(id);
                    }
                }
            }
        }
    }

    /// Ids with boundary-aware distance strictly below `radius` from `x`,
    /// ascending, omitting `exclude`.
    pub fn neighbors_within(
        &self,
        points: &[Point],
        x: &Point,
        radius: f64,
        exclude: Option<usize>,
    ) -> Vec<usize> {
        let mut out = Vec::new();
        if !(radius > 0.0) {
            return out;
        }
        let r2 = radius * radius;
        self.for_each_candidate(x, radius, |id| {
            if Some(id) != exclude && self.window.dist2(x, &points[id]) < r2 {
                out.push(id);
            }
        });
        out.sort_unstable();
        out
    }
}

/// Free-function form of [`CellGrid::neighbors_within`].
pub fn neighbors_within(
    grid: &CellGrid,
    points: &[Point],
    x: &Point,
    radius: f64,
    exclude: Option<usize>,
) -> Vec<usize> {
    grid.neighbors_within(points, x, radius, exclude)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Boundary;
    use crate::seed::SeedPath;
    use rand::Rng;

    #[test]
    fn small_example() {
        let w = Window::new(2, [-1.0, -1.0, 0.0], [6.0, 6.0, 0.0], Boundary::Hard, 0.0).unwrap();
        let pts = vec![Point::new2(0.0, 0.0), Point::new2(1.0, 0.0), Point::new2(5.0, 5.0)];
        let g = CellGrid::new(&w, &pts, 1.5);
        assert_eq!(g.neighbors_within(&pts, &pts[0], 1.5, Some(0)), vec![1]);
        assert!(g.neighbors_within(&pts, &pts[0], 0.0, Some(0)).is_empty());
    }

    #[test]
    fn every_point_in_its_own_bucket() {
        let w = Window::square(10.0, Boundary::Hard).unwrap();
        let mut rng = SeedPath::new(3).rng();
        let pts: Vec<Point> = (0..300)
            .map(|_| Point::new2(rng.random::<f64>() * 10.0, rng.random::<f64>() * 10.0))
            .collect();
        let g = CellGrid::new(&w, &pts, 0.7);
        let mut seen = vec![0; pts.len()];
        let [nx, ny, _] = g.counts();
        for cy in 0..ny {
            for cx in 0..nx {
                for &id in g.bucket([cx, cy, 0]) {
                    seen[id] += 1;
                    assert_eq!(g.coords_of(&pts[id]), [cx, cy, 0]);
                }
            }
        }
        assert!(seen.iter().all(|&s| s == 1));
    }

    fn brute(w: &Window, pts: &[Point], x: &Point, r: f64, ex: Option<usize>) -> Vec<usize> {
        (0..pts.len())
            .filter(|&j| Some(j) != ex && w.dist(x, &pts[j]) < r)
            .collect()
    }

    #[test]
    fn matches_exhaustive_scan() {
        for (k, boundary) in [Boundary::Hard, Boundary::Periodic].into_iter().enumerate() {
            let w = Window::square(10.0, boundary).unwrap();
            let mut rng = SeedPath::new(11).derive("grid", k as u64).rng();
            let pts: Vec<Point> = (0..500)
                .map(|_| Point::new2(rng.random::<f64>() * 10.0, rng.random::<f64>() * 10.0))
                .collect();
            for cell in [0.3, 1.0, 4.0] {
                let g = CellGrid::new(&w, &pts, cell);
                for q in 0..50 {
                    let x = Point::new2(rng.random::<f64>() * 10.0, rng.random::<f64>() * 10.0);
                    let r = rng.random::<f64>() * 3.0;
                    let ex = if q % 2 == 0 { Some(q) } else { None };
                    assert_eq!(g.neighbors_within(&pts, &x, r, ex), brute(&w, &pts, &x, r, ex));
                }
            }
        }
    }

    #[test]
    fn three_dimensional_queries() {
        let w = Window::new(3, [0.0; 3], [4.0, 4.0, 4.0], Boundary::Periodic, 0.0).unwrap();
        let mut rng = SeedPath::new(5).rng();
        let pts: Vec<Point> = (0..200)
            .map(|_| {
                Point::new3(
                    rng.random::<f64>() * 4.0,
                    rng.random::<f64>() * 4.0,
                    rng.random::<f64>() * 4.0,
                )
            })
            .collect();
        let g = CellGrid::new(&w, &pts, 0.8);
        for i in 0..40 {
            assert_eq!(
                g.neighbors_within(&pts, &pts[i], 1.1, Some(i)),
                brute(&w, &pts, &pts[i], 1.1, Some(i))
            );
        }
    }
}
