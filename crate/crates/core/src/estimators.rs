//! Monte Carlo estimation of crossing probabilities, `lambda_c(r)` and
//! `gamma*(lambda)`.

use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::environment::{sample_cox, sample_environment, IntensityModel, PointPattern};
use crate::error::{Error, Result};
use crate::geometry::{Point, Window};
use crate::graphs::{gilbert, SinrNetwork, SpatialGraph};
use crate::io::num;
use crate::par;
use crate::pathloss::{snr_radius, PathLoss, SinrParams};
use crate::percolation::{crossing, crossing_in, largest_cluster_stats, CrossingSpec};
use crate::seed::SeedPath;

/// 97.5% standard normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphKind {
    Gilbert,
    Sinr,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Proxy {
    /// Hard crossing of the `alpha n x n` rectangle at the lower corner of
    /// the window.
    CrossingHard { alpha: f64, n: f64 },
    /// Largest cluster holds at least this fraction of the points.
    LargestFraction { threshold: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    pub model: IntensityModel,
    pub loss: PathLoss,
    pub sinr: SinrParams,
    pub window: Window,
    pub graph: GraphKind,
    /// Gilbert radius; `None` means `r_B`.
    pub r: Option<f64>,
    pub reps: usize,
    pub proxy: Proxy,
    pub p_succ: f64,
    /// Absolute tolerance of the `lambda` bisection.
    pub tolerance: f64,
    /// Relative tolerance of the `gamma` bisection.
    pub gamma_tolerance: f64,
    pub max_iter: usize,
    pub seed: u64,
    /// Record wall time in sweep rows; off by default so that tables are
    /// reproducible byte for byte.
    pub timing: bool,
}

impl EstimatorConfig {
    /// Gilbert-graph crossing estimator on `window` with the usual
    /// defaults.
    pub fn gilbert(model: IntensityModel, window: Window, r: f64, proxy: Proxy, seed: u64) -> Self {
        EstimatorConfig {
            model,
            loss: PathLoss::truncated(1.0, 4.0).expect("valid default path loss"),
            sinr: SinrParams {
                noise: 1.0,
                tau: 1.0,
                gamma: 0.0,
            },
            window,
            graph: GraphKind::Gilbert,
            r: Some(r),
            reps: 200,
            proxy,
            p_succ: 0.5,
            tolerance: 0.05,
            gamma_tolerance: 0.05,
            max_iter: 40,
            seed,
            timing: false,
        }
    }

    pub fn check(&self) -> Result<()> {
        self.model.check()?;
        self.loss.check()?;
        self.sinr.check()?;
        if self.reps == 0 {
            return Err(Error::InvalidParameter("reps must be >= 1".into()));
        }
        if !(self.p_succ > 0.0 && self.p_succ < 1.0) {
            return Err(Error::InvalidParameter(format!("p_succ = {} must lie in (0, 1)", self.p_succ)));
        }
        if !(self.tolerance > 0.0) || !(self.gamma_tolerance > 0.0) {
            return Err(Error::InvalidParameter("tolerances must be > 0".into()));
        }
        if let Some(r) = self.r {
            if !(r > 0.0) {
                return Err(Error::InvalidParameter(format!("r = {r} must be > 0")));
            }
        }
        match self.proxy {
            Proxy::CrossingHard { alpha, n } if !(alpha >= 1.0 && n > 0.0) => {
                Err(Error::InvalidParameter("crossing proxy needs alpha >= 1 and n > 0".into()))
            }
            Proxy::LargestFraction { threshold } if !(threshold > 0.0 && threshold <= 1.0) => {
                Err(Error::InvalidParameter("largest-fraction threshold must lie in (0, 1]".into()))
            }
            _ => Ok(()),
        }
    }

    /// Connection radius: the configured Gilbert radius, else `r_B`.
    pub fn radius(&self) -> Result<f64> {
        match self.r {
            Some(r) if self.graph == GraphKind::Gilbert => Ok(r),
            _ => snr_radius(&self.loss, &self.sinr),
        }
    }

    fn crossing_spec(&self, r: f64) -> Option<CrossingSpec> {
        match self.proxy {
            Proxy::CrossingHard { alpha, n } => {
                Some(CrossingSpec::hard(Point(self.window.lower), alpha, n, r))
            }
            Proxy::LargestFraction { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub model: String,
    pub lambda: f64,
    pub gamma: f64,
    pub r: f64,
    pub n: f64,
    pub alpha: f64,
    pub reps: usize,
    pub successes: usize,
    pub p_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub seed: u64,
    pub ms: u64,
}

/// Wilson score interval at 95% confidence.
pub fn wilson(successes: usize, trials: usize) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// A 64-bit seed for the `k`-th tuple of a run.
pub fn tuple_seed(master: u64, k: u64) -> u64 {
    let key = SeedPath::new(master).derive("tuple", k).key();
    u64::from_le_bytes(key[..8].try_into().expect("8 bytes"))
}

fn replicate(cfg: &EstimatorConfig, lambda: f64, seed: u64, rep: usize) -> Result<PointPattern> {
    let s = SeedPath::new(seed);
    let env = sample_environment(&cfg.model, &cfg.window, &s.derive("env", rep as u64))?;
    sample_cox(&env, lambda, &s.derive("points", rep as u64))
}

fn proxy_holds(cfg: &EstimatorConfig, p: &PointPattern, g: Option<&SpatialGraph>, r: f64) -> Result<bool> {
    match (cfg.crossing_spec(r), g) {
        (Some(spec), Some(g)) => crossing_in(p, g, &spec),
        (Some(spec), None) => crossing(p, &spec),
        (None, g) => {
            let owned;
            let g = match g {
                Some(g) => g,
                None => {
                    owned = gilbert(p, r);
                    &owned
                }
            };
            let t = match cfg.proxy {
                Proxy::LargestFraction { threshold } => threshold,
                Proxy::CrossingHard { .. } => unreachable!(),
            };
            Ok(!p.is_empty() && largest_cluster_stats(g).largest_fraction >= t)
        }
    }
}

/// Per-replication proxy outcomes with replication streams keyed by
/// `seed`. The environment and pattern of replication `k` do not depend on
/// `lambda` beyond the monotone coupling of the sampler.
pub fn outcomes(cfg: &EstimatorConfig, lambda: f64, gamma: f64, seed: u64) -> Result<Vec<bool>> {
    cfg.check()?;
    let r = cfg.radius()?;
    let sp = cfg.sinr.with_gamma(gamma);
    sp.check()?;
    par::map_range(cfg.reps, |k| {
        let p = replicate(cfg, lambda, seed, k)?;
        match cfg.graph {
            GraphKind::Gilbert => proxy_holds(cfg, &p, None, r),
            GraphKind::Sinr => {
                let g = SinrNetwork::new(&p, cfg.loss).graph(&sp)?;
                proxy_holds(cfg, &p, Some(&g), r)
            }
        }
    })
    .into_iter()
    .collect()
}

fn row(cfg: &EstimatorConfig, lambda: f64, gamma: f64, seed: u64, successes: usize, ms: u64) -> Result<SweepRow> {
    let (n, alpha) = match cfg.proxy {
        Proxy::CrossingHard { alpha, n } => (n, alpha),
        Proxy::LargestFraction { .. } => (0.0, 0.0),
    };
    let (ci_lo, ci_hi) = wilson(successes, cfg.reps);
    Ok(SweepRow {
        model: cfg.model.name().to_owned(),
        lambda,
        gamma: if cfg.graph == GraphKind::Gilbert { 0.0 } else { gamma },
        r: cfg.radius()?,
        n,
        alpha,
        reps: cfg.reps,
        successes,
        p_hat: successes as f64 / cfg.reps as f64,
        ci_lo,
        ci_hi,
        seed,
        ms,
    })
}

pub fn estimate_with_seed(cfg: &EstimatorConfig, lambda: f64, gamma: f64, seed: u64) -> Result<SweepRow> {
    let start = Instant::now();
    let hits = outcomes(cfg, lambda, gamma, seed)?.into_iter().filter(|&b| b).count();
    let ms = if cfg.timing { start.elapsed().as_millis() as u64 } else { 0 };
    row(cfg, lambda, gamma, seed, hits, ms)
}

/// Proxy success frequency over `cfg.reps` replications.
pub fn estimate_proxy(cfg: &EstimatorConfig, lambda: f64, gamma: f64) -> Result<SweepRow> {
    estimate_with_seed(cfg, lambda, gamma, tuple_seed(cfg.seed, 0))
}

#[derive(Clone, Debug, PartialEq)]
pub struct BisectResult {
    pub estimate: f64,
    /// Final bracket.
    pub lo: f64,
    pub hi: f64,
    pub iterations: usize,
    /// Every evaluated point, in evaluation order.
    pub rows: Vec<SweepRow>,
}

/// Bisection for `lambda_c(r)` on the Gilbert graph of radius `r`. All
/// evaluations share the replication streams of tuple 0.
pub fn bisect_lambda_c(cfg: &EstimatorConfig, r: f64, bracket: (f64, f64)) -> Result<BisectResult> {
    let cfg = EstimatorConfig {
        graph: GraphKind::Gilbert,
        r: Some(r),
        ..cfg.clone()
    };
    cfg.check()?;
    let (mut lo, mut hi) = bracket;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::InvalidParameter(format!("bracket [{lo}, {hi}] must satisfy 0 < lo < hi")));
    }
    let seed = tuple_seed(cfg.seed, 0);
    let mut rows = Vec::new();
    let eval = |lambda: f64, rows: &mut Vec<SweepRow>| -> Result<f64> {
        let row = estimate_with_seed(&cfg, lambda, 0.0, seed)?;
        let p = row.p_hat;
        rows.push(row);
        Ok(p)
    };
    let lo_p = eval(lo, &mut rows)?;
    let hi_p = eval(hi, &mut rows)?;
    if !(lo_p < cfg.p_succ && hi_p >= cfg.p_succ) {
        return Err(Error::InvalidBracket {
            lo_p,
            hi_p,
            p_succ: cfg.p_succ,
        });
    }
    let mut iterations = 0;
    while hi - lo > cfg.tolerance && iterations < cfg.max_iter {
        let mid = 0.5 * (lo + hi);
        if eval(mid, &mut rows)? >= cfg.p_succ {
            hi = mid;
        } else {
            lo = mid;
        }
        iterations += 1;
    }
    Ok(BisectResult {
        estimate: 0.5 * (lo + hi),
        lo,
        hi,
        iterations,
        rows,
    })
}

/// Bisection for `gamma*(lambda)` on the undirected SINR graph. The
/// realizations and their interference fields are drawn once and reused
/// for every `gamma`.
pub fn bisect_gamma_star(cfg: &EstimatorConfig, lambda: f64, gamma_hi: Option<f64>) -> Result<BisectResult> {
    let cfg = EstimatorConfig {
        graph: GraphKind::Sinr,
        ..cfg.clone()
    };
    cfg.check()?;
    if cfg.sinr.noise == 0.0 {
        return Err(Error::InvalidParameter("gamma bisection needs N0 > 0".into()));
    }
    let r = cfg.radius()?;
    let cap = 1.0 / cfg.sinr.tau;
    let mut hi = gamma_hi.unwrap_or(cap).min(cap);
    if !(hi > 0.0) {
        return Err(Error::InvalidParameter(format!("gamma bracket top {hi} must be > 0")));
    }
    let seed = tuple_seed(cfg.seed, 0);
    let patterns: Vec<PointPattern> = par::map_range(cfg.reps, |k| replicate(&cfg, lambda, seed, k))
        .into_iter()
        .collect::<Result<_>>()?;
    let nets: Vec<SinrNetwork> = patterns.iter().map(|p| SinrNetwork::new(p, cfg.loss)).collect();
    let mut rows = Vec::new();
    let eval = |gamma: f64, rows: &mut Vec<SweepRow>| -> Result<f64> {
        let sp = cfg.sinr.with_gamma(gamma);
        sp.check()?;
        let t0 = Instant::now();
        let hits: Vec<bool> = par::map_range(nets.len(), |k| {
            let g = nets[k].graph(&sp)?;
            proxy_holds(&cfg, &patterns[k], Some(&g), r)
        })
        .into_iter()
        .collect::<Result<_>>()?;
        let ms = if cfg.timing { t0.elapsed().as_millis() as u64 } else { 0 };
        let row = row(&cfg, lambda, gamma, seed, hits.iter().filter(|&&b| b).count(), ms)?;
        let p = row.p_hat;
        rows.push(row);
        Ok(p)
    };
    if eval(0.0, &mut rows)? < cfg.p_succ {
        return Ok(BisectResult {
            estimate: 0.0,
            lo: 0.0,
            hi: 0.0,
            iterations: 0,
            rows,
        });
    }
    if eval(hi, &mut rows)? >= cfg.p_succ {
        return Ok(BisectResult {
            estimate: hi,
            lo: hi,
            hi,
            iterations: 0,
            rows,
        });
    }
    let mut lo = 0.0;
    let mut iterations = 0;
    while hi - lo > cfg.gamma_tolerance * hi && iterations < cfg.max_iter {
        let mid = 0.5 * (lo + hi);
        if eval(mid, &mut rows)? >= cfg.p_succ {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    Ok(BisectResult {
        estimate: 0.5 * (lo + hi),
        lo,
        hi,
        iterations,
        rows,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub lambda: f64,
    pub gamma: f64,
}

/// Rank of each tuple among the distinct tuples sorted by `(lambda, gamma)`.
fn canonical_ranks(grid: &[SweepPoint]) -> Vec<u64> {
    let key = |p: &SweepPoint| (p.lambda.to_bits(), p.gamma.to_bits());
    let mut sorted: Vec<&SweepPoint> = grid.iter().collect();
    sorted.sort_by(|a, b| a.lambda.total_cmp(&b.lambda).then(a.gamma.total_cmp(&b.gamma)));
    sorted.dedup_by(|a, b| key(a) == key(b));
    grid.iter()
        .map(|p| {
            sorted
                .binary_search_by(|q| q.lambda.total_cmp(&p.lambda).then(q.gamma.total_cmp(&p.gamma)))
                .expect("tuple is present") as u64
        })
        .collect()
}

/// One row per grid point, in input order.
pub fn sweep(cfg: &EstimatorConfig, grid: &[SweepPoint]) -> Result<Vec<SweepRow>> {
    let ranks = canonical_ranks(grid);
    grid.iter()
        .zip(ranks)
        .map(|(pt, k)| estimate_with_seed(cfg, pt.lambda, pt.gamma, tuple_seed(cfg.seed, k)))
        .collect()
}

pub const SWEEP_HEADER: &str = "model,lambda,gamma,r,n,alpha,reps,successes,p_hat,ci_lo,ci_hi,seed,ms";

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = format!("{SWEEP_HEADER}\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.model,
            num(r.lambda),
            num(r.gamma),
            num(r.r),
            num(r.n),
            num(r.alpha),
            r.reps,
            r.successes,
            num(r.p_hat),
            num(r.ci_lo),
            num(r.ci_hi),
            r.seed,
            r.ms
        );
    }
    out
}
