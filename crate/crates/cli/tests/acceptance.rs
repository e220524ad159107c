//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! with status 1 if any criterion fails.

#![allow(clippy::needless_range_loop)]

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use coxnet::environment::{
    sample_cox, sample_environment, sample_shot_noise_by_thinning, IntensityModel, PointPattern,
};
use coxnet::estimators::{
    bisect_gamma_star, bisect_lambda_c, estimate_with_seed, tuple_seed, EstimatorConfig, GraphKind, Proxy,
};
use coxnet::geometry::{Aabb, Boundary, Point, Window};
use coxnet::graphs::{
    gilbert, interference_at, knn_graph, max_in_degree_bound, shifted_interference, sinr_graph, InterferenceField,
    SinrNetwork, SpatialGraph,
};
use coxnet::pathloss::{k0_bound, snr_radius, PathLoss, SinrParams};
use coxnet::percolation::{isolation_threshold, n_good, site_interference, GoodSiteSpec, Stabilization};
use coxnet::SeedPath;
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn models() -> Vec<IntensityModel> {
    [
        IntensityModel::Homogeneous,
        IntensityModel::shot_noise(0.5, 1.0),
        IntensityModel::modulated(1.0, 0.5, 0.5, 0.5),
        IntensityModel::modulated(2.0, 0.0, 0.3, 0.7),
        IntensityModel::voronoi(5.0),
        IntensityModel::delaunay(5.0),
    ]
    .into_iter()
    .map(|m| m.normalize(2).unwrap())
    .collect()
}

fn log_uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    (lo.ln() + rng.random::<f64>() * (hi / lo).ln()).exp()
}

fn random_loss<R: Rng>(rng: &mut R, d: usize) -> PathLoss {
    let cap = log_uniform(rng, 0.5, 100.0);
    let alpha = d as f64 + 0.5 + 3.5 * rng.random::<f64>();
    if rng.random::<bool>() {
        PathLoss::truncated(cap, alpha).unwrap()
    } else {
        PathLoss::compact(cap, alpha, 1.0 + 2.0 * rng.random::<f64>()).unwrap()
    }
}

/// A Cox pattern with about `target` points on a small torus.
fn cox_pattern<R: Rng>(model: &IntensityModel, s: &SeedPath, rng: &mut R, target: f64) -> PointPattern {
    let side = 3.0 + 3.0 * rng.random::<f64>();
    let w = Window::square(side, Boundary::Periodic).unwrap();
    let env = sample_environment(model, &w, &s.derive("env", 0)).unwrap();
    sample_cox(&env, target / (side * side), &s.derive("points", 0)).unwrap()
}

fn uniform_pattern<R: Rng>(rng: &mut R, w: Window, n: usize) -> PointPattern {
    let pts = (0..n)
        .map(|_| {
            let mut c = [0.0; 3];
            for i in 0..w.dim {
                c[i] = w.lower[i] + rng.random::<f64>() * w.side(i);
            }
            Point(c)
        })
        .collect();
    PointPattern::from_points(w, pts).unwrap()
}

fn c1_degree_bound() -> Outcome {
    let models = models();
    let (mut violations, mut trials, mut arcs) = (0usize, 0usize, 0usize);
    for k in 0..10_000u64 {
        let s = SeedPath::new(1).derive("degree", k);
        let mut rng = s.rng();
        let model = &models[k as usize % models.len()];
        let target = 10.0 + 50.0 * rng.random::<f64>();
        let p = cox_pattern(model, &s, &mut rng, target);
        let l = random_loss(&mut rng, 2);
        let tau = log_uniform(&mut rng, 0.3, 3.0);
        let noise = if k % 10 == 0 { 0.0 } else { rng.random::<f64>() * 0.5 * l.cap() / tau };
        let gamma = match k % 3 {
            0 => (1.0 + 2.0 * rng.random::<f64>()) / tau,
            1 => (0.5 + 0.5 * rng.random::<f64>()) / tau,
            _ => log_uniform(&mut rng, 1e-3, 0.5) / tau,
        };
        let sp = SinrParams::new(noise, tau, gamma).unwrap();
        let net = SinrNetwork::new(&p, l);
        let d = net.digraph(&sp).unwrap();
        let g = net.graph(&sp).unwrap();
        let max_in = d.in_degrees().into_iter().max().unwrap_or(0);
        arcs += d.edge_count();
        trials += 1;
        let mut ok = (max_in as f64) < 1.0 + 1.0 / (tau * gamma) && max_in <= max_in_degree_bound(&sp).unwrap();
        if gamma >= 1.0 / tau {
            ok &= g.max_degree() <= 1;
        } else if gamma >= 0.5 / tau {
            ok &= g.max_degree() <= 2;
        }
        violations += usize::from(!ok);
    }
    outcome(violations == 0, format!("{trials} trials, {arcs} arcs, {violations} violations"))
}

fn c2_dominations() -> Outcome {
    let models = models();
    let mut violations = 0;
    let mut edges = 0;
    for k in 0..1000u64 {
        let s = SeedPath::new(2).derive("domination", k);
        let mut rng = s.rng();
        let target = 15.0 + 60.0 * rng.random::<f64>();
        let p = cox_pattern(&models[k as usize % models.len()], &s, &mut rng, target);
        let l = random_loss(&mut rng, 2);
        let tau = log_uniform(&mut rng, 0.3, 3.0);
        let noise = (0.05 + 0.9 * rng.random::<f64>()) * l.cap() / tau;
        let sp = SinrParams::new(noise, tau, 0.0).unwrap();
        let rb = snr_radius(&l, &sp).unwrap();
        let gb = gilbert(&p, rb);
        let net = SinrNetwork::new(&p, l);
        let g0 = net.graph(&sp).unwrap();
        let mut ok = g0.adj == gb.adj;
        let mut last: Option<SpatialGraph> = None;
        for c in [3.0, 1.0, 0.5, 0.2, 0.1, 0.03, 0.01, 0.001] {
            let sp = sp.with_gamma(c / tau);
            let g = net.graph(&sp).unwrap();
            edges += g.edge_count();
            ok &= g.is_subgraph_of(&gb);
            if let Some(prev) = &last {
                ok &= prev.is_subgraph_of(&g);
            }
            if p.len() >= 2 {
                let kk = (1.0 + 1.0 / (tau * sp.gamma)).ceil() as usize - 1;
                ok &= g.is_subgraph_of(&knn_graph(&p, kk.max(1), true).unwrap());
            }
            last = Some(g);
        }
        ok &= last.unwrap().is_subgraph_of(&g0);
        violations += usize::from(!ok);
    }
    outcome(violations == 0, format!("1000 realizations, {edges} SINR edges checked, {violations} violations"))
}

fn brute_disp(w: &Window, a: &Point, b: &Point) -> f64 {
    let mut s = 0.0;
    for i in 0..w.dim {
        let mut d = b.0[i] - a.0[i];
        if w.is_periodic() {
            let side = w.side(i);
            d -= side * (d / side).round();
        }
        s += d * d;
    }
    s
}

fn brute_components(n: usize, adj: &[Vec<usize>]) -> Vec<usize> {
    let mut label = vec![usize::MAX; n];
    for s in 0..n {
        if label[s] != usize::MAX {
            continue;
        }
        label[s] = s;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for &v in &adj[u] {
                if label[v] == usize::MAX {
                    label[v] = s;
                    stack.push(v);
                }
            }
        }
    }
    label
}

fn c3_oracles() -> Outcome {
    let mut bad: Vec<String> = Vec::new();
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * b.abs().max(1e-300);
    for k in 0..200u64 {
        let mut rng = SeedPath::new(3).derive("oracle", k).rng();
        let dim = if k % 4 == 3 { 3 } else { 2 };
        let boundary = if k % 2 == 0 { Boundary::Periodic } else { Boundary::Hard };
        let side = 1.0 + 9.0 * rng.random::<f64>();
        let w = Window::new(dim, [0.0; 3], [side; 3], boundary, 0.0).unwrap();
        let n = rng.random_range(2..=100);
        let p = uniform_pattern(&mut rng, w, n);
        let d2 = |i: usize, j: usize| brute_disp(&w, &p.points[i], &p.points[j]);

        let r = side * (0.05 + 0.3 * rng.random::<f64>());
        let g = gilbert(&p, r);
        let mut adj = vec![Vec::new(); n];
        for i in 0..n {
            for j in 0..n {
                if i != j && d2(i, j) < r * r {
                    adj[i].push(j);
                }
            }
        }
        if g.adj != adj {
            bad.push(format!("gilbert #{k}"));
        }

        let labels = brute_components(n, &adj);
        let c = g.components();
        for i in 0..n {
            for j in i + 1..n {
                if (labels[i] == labels[j]) != (c.labels[i] == c.labels[j]) {
                    bad.push(format!("components #{k}"));
                }
            }
        }

        let kk = rng.random_range(1..=8);
        let mutual = rng.random::<bool>();
        let nn: Vec<Vec<usize>> = (0..n)
            .map(|i| {
                let mut o: Vec<(f64, usize)> = (0..n).filter(|&j| j != i).map(|j| (d2(i, j), j)).collect();
                o.sort_by(|a, b| a.partial_cmp(b).unwrap());
                o.into_iter().take(kk).map(|(_, j)| j).collect()
            })
            .collect();
        let mut kadj = vec![Vec::new(); n];
        for i in 0..n {
            for j in 0..n {
                let (a, b) = (nn[i].contains(&j), nn[j].contains(&i));
                if i != j && if mutual { a && b } else { a || b } {
                    kadj[i].push(j);
                }
            }
        }
        if knn_graph(&p, kk, mutual).unwrap().adj != kadj {
            bad.push(format!("knn #{k}"));
        }

        let l = random_loss(&mut rng, dim);
        let tau = log_uniform(&mut rng, 0.3, 3.0);
        let noise = rng.random::<f64>() * 0.5 * l.cap() / tau;
        let gamma = if k % 5 == 0 { 0.0 } else { log_uniform(&mut rng, 1e-3, 2.0) / tau };
        let sp = SinrParams::new(noise, tau, gamma).unwrap();
        let lv = |i: usize, j: usize| l.value(d2(i, j).sqrt());
        let mut dadj = vec![Vec::new(); n];
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let rest: f64 = (0..n).filter(|&m| m != i && m != j).map(|m| lv(m, j)).sum();
                if lv(i, j) > tau * (noise + gamma * rest) {
                    dadj[i].push(j);
                }
            }
        }
        if noise > 0.0 || gamma > 0.0 {
            match coxnet::graphs::sinr_digraph(&p, &sp, &l) {
                Ok(d) if d.adj == dadj => {}
                _ => bad.push(format!("sinr_digraph #{k}")),
            }
        }

        let field = InterferenceField::new(&p, &l);
        for j in 0..n {
            let b: f64 = (0..n).filter(|&m| m != j).map(|m| lv(m, j)).sum();
            if !close(field.get(j), b) {
                bad.push(format!("interference field #{k}"));
                break;
            }
        }
        let y = uniform_pattern(&mut rng, w, 1).points[0];
        let exclude: Vec<usize> = (0..n).filter(|_| rng.random::<f64>() < 0.2).collect();
        let got = interference_at(&p, &y, &l, &exclude);
        let want: f64 = (0..n)
            .filter(|m| !exclude.contains(m))
            .map(|m| l.value(brute_disp(&w, &y, &p.points[m]).sqrt()))
            .sum();
        if !close(got, want) {
            bad.push(format!("interference_at #{k}"));
        }
    }
    bad.dedup();
    let detail = if bad.is_empty() {
        "200 instances, all five operations match".to_owned()
    } else {
        format!("mismatches: {}", bad.join(", "))
    };
    outcome(bad.is_empty(), detail)
}

fn mean_var_se(xs: &[f64]) -> (f64, f64, f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    let m4 = xs.iter().map(|x| (x - m).powi(4)).sum::<f64>() / n;
    let var_se = ((m4 - v * v).max(0.0) / n).sqrt();
    (m, (v / n).sqrt(), v, var_se)
}

fn c4_normalization() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    let w = Window::square(5.0, Boundary::Periodic).unwrap();
    let q1 = Aabb::rect(1.0, 1.0, 2.0, 2.0);
    for (mi, model) in models().iter().enumerate() {
        let xs: Vec<f64> = (0..500u64)
            .map(|k| {
                let env = sample_environment(model, &w, &SeedPath::new(4).derive("norm", 1000 * mi as u64 + k)).unwrap();
                env.measure_box(&q1).unwrap()
            })
            .collect();
        let (m, se, _, _) = mean_var_se(&xs);
        let ok = (m - 1.0).abs() <= 3.0 * se + 1e-12;
        pass &= ok;
        parts.push(format!("{} {:.3}±{:.3}", model.name(), m, se));
    }
    let model = IntensityModel::shot_noise(0.5, 1.0).normalize(2).unwrap();
    let w = Window::square(6.0, Boundary::Periodic).unwrap();
    let b = Aabb::rect(1.0, 1.0, 3.0, 3.0);
    let (mut a, mut t) = (Vec::new(), Vec::new());
    for k in 0..2000u64 {
        let s = SeedPath::new(4).derive("shot", k);
        let env = sample_environment(&model, &w, &s.derive("env", 0)).unwrap();
        a.push(sample_cox(&env, 4.0, &s.derive("cluster", 0)).unwrap().count_in(&b) as f64);
        t.push(sample_shot_noise_by_thinning(&env, 4.0, &s.derive("thin", 0)).unwrap().count_in(&b) as f64);
    }
    let (ma, sa, va, vsa) = mean_var_se(&a);
    let (mt, st, vt, vst) = mean_var_se(&t);
    let ok = (ma - mt).abs() <= 3.0 * (sa * sa + st * st).sqrt() && (va - vt).abs() <= 3.0 * (vsa * vsa + vst * vst).sqrt();
    pass &= ok;
    parts.push(format!("cluster mean/var {ma:.3}/{va:.3} vs thinning {mt:.3}/{vt:.3}"));
    outcome(pass, parts.join("; "))
}

fn c5_k0() -> Outcome {
    let mut violations = 0;
    let mut worst: f64 = 0.0;
    for k in 0..100u64 {
        let mut rng = SeedPath::new(5).derive("k0", k).rng();
        let d = if k % 2 == 0 { 2 } else { 3 };
        let l = random_loss(&mut rng, d);
        let bound = k0_bound(&l, d).unwrap();
        let n = 1.0 + 4.0 * rng.random::<f64>();
        let keep = 0.5 + 0.5 * rng.random::<f64>();
        let reach: i64 = if d == 2 { 12 } else { 6 };
        let mut x = [0.0; 3];
        for c in x.iter_mut().take(d) {
            *c = (rng.random::<f64>() - 0.5) * 2.0 * n;
        }
        let mut sum = 0.0;
        let span = |i: usize| if i < d { -reach..=reach } else { 0..=0 };
        for a in span(0) {
            for b in span(1) {
                for c in span(2) {
                    if rng.random::<f64>() > keep {
                        continue;
                    }
                    let z = [a as f64 * n, b as f64 * n, c as f64 * n];
                    let r = (0..3).map(|i| (x[i] - z[i]).powi(2)).sum::<f64>().sqrt();
                    sum += l.shifted_value(6.0 * n, d, r);
                }
            }
        }
        worst = worst.max(sum / bound);
        violations += usize::from(sum > bound);
    }
    let mut dom_violations = 0;
    for k in 0..1000u64 {
        let mut rng = SeedPath::new(5).derive("shifted", k).rng();
        let boundary = if k % 2 == 0 { Boundary::Periodic } else { Boundary::Hard };
        let w = Window::square(10.0, boundary).unwrap();
        let n = rng.random_range(0..=60);
        let p = uniform_pattern(&mut rng, w, n);
        let l = random_loss(&mut rng, 2);
        let a = 0.05 + 3.95 * rng.random::<f64>();
        let z = Point::new2(2.0 + 6.0 * rng.random::<f64>(), 2.0 + 6.0 * rng.random::<f64>());
        let x = Point::new2(z.x() + (rng.random::<f64>() - 0.5) * a, z.y() + (rng.random::<f64>() - 0.5) * a);
        let ix = interference_at(&p, &x, &l, &[]);
        let iz = shifted_interference(&p, &z, a, &l).unwrap().total;
        dom_violations += usize::from(ix > iz * (1.0 + 1e-12));
    }
    outcome(
        violations == 0 && dom_violations == 0,
        format!(
            "100 lattice configurations, {violations} violations (largest sum/K0 = {worst:.3}); \
             1000 shifted trials, {dom_violations} violations"
        ),
    )
}

fn c9_isolation() -> Outcome {
    let mut violations = 0;
    let mut packed = 0;
    for k in 0..100u64 {
        let mut rng = SeedPath::new(9).derive("isolation", k).rng();
        let delta = 0.5 + rng.random::<f64>();
        let cap = log_uniform(&mut rng, 0.5, 10.0);
        let alpha = 2.5 + 3.0 * rng.random::<f64>();
        let l = if k % 2 == 0 {
            PathLoss::truncated(cap, alpha).unwrap()
        } else {
            PathLoss::compact(cap, alpha, 2.0 * delta).unwrap()
        };
        let (sp, lp, m) = loop {
            let tau = log_uniform(&mut rng, 0.5, 2.0);
            let noise = (0.2 + 0.75 * rng.random::<f64>()) * l.value(delta) / tau;
            let gamma = 0.1 + rng.random::<f64>();
            let sp = SinrParams::new(noise, tau, gamma).unwrap();
            let m = cap * (1.0 + rng.random::<f64>());
            let lp = isolation_threshold(m, &sp).unwrap();
            if lp < 400.0 {
                break (sp, lp, m);
            }
        };
        let _ = m;
        let count = lp.floor() as usize + 1 + rng.random_range(0..5);
        let side = 12.0;
        let w = Window::square(side, Boundary::Hard).unwrap();
        let c = Point::new2(1.0 + rng.random::<f64>() * (side - 2.0), 1.0 + rng.random::<f64>() * (side - 2.0));
        let mut pts: Vec<Point> = (0..count)
            .map(|_| {
                Point::new2(
                    c.x() + (rng.random::<f64>() - 0.5) * delta / 2.0,
                    c.y() + (rng.random::<f64>() - 0.5) * delta / 2.0,
                )
            })
            .collect();
        let extra = rng.random_range(0..60);
        pts.extend(uniform_pattern(&mut rng, w, extra).points);
        let p = PointPattern::from_points(w, pts).unwrap();
        let g = sinr_graph(&p, &sp, &l).unwrap();
        let d = SinrNetwork::new(&p, l).digraph(&sp).unwrap();
        let indeg = d.in_degrees();
        let isolated = (0..count).all(|i| g.adj[i].is_empty() && indeg[i] == 0);
        packed += count;
        violations += usize::from(!isolated);
    }
    outcome(violations == 0, format!("100 configurations, {packed} packed points, {violations} with incident edges"))
}

fn c10_n_good() -> Outcome {
    let model = IntensityModel::modulated(1.0, 0.5, 0.5, 0.5).normalize(2).unwrap();
    let n = 3.0;
    let z = [3i64, 3, 0];
    let w = Window::square(6.0 * n, Boundary::Hard).unwrap();
    let spec = GoodSiteSpec {
        n,
        r: 1.0,
        stabilization: Stabilization::ConstantRange,
    };
    let l = PathLoss::truncated(1.0, 4.0).unwrap();
    let reps = 100u64;
    let mut fractions = Vec::new();
    let mut interference = Vec::new();
    for (li, lambda) in [2.0, 4.0, 8.0].into_iter().enumerate() {
        let mut good = 0;
        let mut is = Vec::new();
        for k in 0..reps {
            let s = SeedPath::new(10).derive("site", k);
            let env = sample_environment(&model, &w, &s.derive("env", 0)).unwrap();
            let p = sample_cox(&env, lambda, &s.derive("points", 0)).unwrap();
            good += usize::from(n_good(&p, &env, &spec, z).unwrap().good);
            if li == 2 {
                is.push(site_interference(&p, z, n, &l).unwrap());
            }
        }
        fractions.push(good as f64 / reps as f64);
        if li == 2 {
            interference = is;
        }
    }
    let se = |f: f64| (f * (1.0 - f) / reps as f64).sqrt().max(1.0 / reps as f64);
    let mut sorted = interference.clone();
    sorted.sort_by(f64::total_cmp);
    let median = 0.5 * (sorted[49] + sorted[50]);
    let freq = |m: f64| interference.iter().filter(|&&i| i <= m).count() as f64 / reps as f64;
    let b: Vec<f64> = [1.0, 2.0, 4.0].iter().map(|c| freq(c * median)).collect();
    let mono = |xs: &[f64]| xs.windows(2).all(|p| p[1] >= p[0] - 2.0 * (se(p[0]).powi(2) + se(p[1]).powi(2)).sqrt());
    let pass = fractions[2] >= 0.9 && b[2] >= 0.95 && mono(&fractions) && mono(&b);
    outcome(
        pass,
        format!(
            "n-good fraction at lambda 2/4/8: {:.2}/{:.2}/{:.2}; B frequency at M = 1/2/4 x median {:.1}: {:.2}/{:.2}/{:.2}",
            fractions[0], fractions[1], fractions[2], median, b[0], b[1], b[2]
        ),
    )
}

fn poisson_cfg(side: f64, proxy: Proxy, seed: u64, reps: usize) -> EstimatorConfig {
    let w = Window::square(side, Boundary::Periodic).unwrap();
    let mut cfg = EstimatorConfig::gilbert(IntensityModel::Homogeneous, w, 1.0, proxy, seed);
    cfg.reps = reps;
    cfg
}

fn c6_threshold() -> (Outcome, f64) {
    let square = Proxy::CrossingHard { alpha: 1.0, n: 30.0 };
    let start = Instant::now();
    let one = bisect_lambda_c(&poisson_cfg(30.0, square, 1, 200), 1.0, (0.5, 3.0)).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let other = bisect_lambda_c(&poisson_cfg(30.0, square, 2, 200), 1.0, (0.5, 3.0)).unwrap();
    let two = bisect_lambda_c(&poisson_cfg(30.0, square, 1, 200), 2.0, (0.125, 0.75)).unwrap();
    let (a, b, c) = (one.estimate, other.estimate, two.estimate * 4.0);
    let pass = (1.2..=1.7).contains(&a) && (a - b).abs() <= 0.1 && (c - a).abs() <= 0.15 * a && elapsed <= 600.0;
    (
        outcome(
            pass,
            format!("lambda_c(1) = {a:.4} (seed 1, {elapsed:.0} s), {b:.4} (seed 2); 4 lambda_c(2) = {c:.4}"),
        ),
        a,
    )
}

fn c7_rsw(lambda_c: f64) -> Outcome {
    let lambda = 1.5 * lambda_c;
    let mut rows = Vec::new();
    for n in [5.0, 10.0, 20.0] {
        let cfg = poisson_cfg(3.0 * n, Proxy::CrossingHard { alpha: 3.0, n }, 7, 200);
        rows.push(estimate_with_seed(&cfg, lambda, 0.0, tuple_seed(7, 0)).unwrap());
    }
    let p: Vec<f64> = rows.iter().map(|r| r.p_hat).collect();
    let pass = p[0] <= p[1] && p[1] <= p[2] && p[0] < p[2] && p[2] > 0.8 && rows[2].ci_lo > 0.7;
    outcome(
        pass,
        format!(
            "lambda = {lambda:.3}: P(C(3,n)) at n = 5/10/20: {:.3}/{:.3}/{:.3}, Wilson lower bound at 20: {:.3}",
            p[0], p[1], p[2], rows[2].ci_lo
        ),
    )
}

fn c8_gamma_trend(lambda_c1: f64) -> Outcome {
    let start = Instant::now();
    let loss = PathLoss::compact(1.0, 4.0, 2.0).unwrap();
    let sinr = SinrParams::new(0.25, 1.0, 0.0).unwrap();
    let rb = snr_radius(&loss, &sinr).unwrap();
    let lambda_c = lambda_c1 / (rb * rb);
    let mut results = Vec::new();
    for (factor, side) in [(2.0, 24.0), (10.0, 18.0), (40.0, 12.0)] {
        let mut cfg = poisson_cfg(side, Proxy::CrossingHard { alpha: 1.0, n: side }, 8, 100);
        cfg.graph = GraphKind::Sinr;
        cfg.r = None;
        cfg.loss = loss;
        cfg.sinr = sinr;
        cfg.gamma_tolerance = 0.1;
        results.push(bisect_gamma_star(&cfg, factor * lambda_c, None).unwrap());
    }
    let elapsed = start.elapsed().as_secs_f64();
    let max = results.iter().map(|r| r.estimate).fold(0.0, f64::max);
    let pass = results[0].lo > 0.0 && results[2].estimate < max && elapsed <= 1800.0;
    outcome(
        pass,
        format!(
            "gamma* at 2/10/40 lambda_c(r_B): {:.4} [{:.4}, {:.4}] / {:.4} / {:.4} ({elapsed:.0} s)",
            results[0].estimate, results[0].lo, results[0].hi, results[1].estimate, results[2].estimate
        ),
    )
}

const DETERMINISM_CONFIG: &str = r#"[model]
kind = "shot_noise"
site_rate = 0.5
kernel_radius = 1.0

[pathloss]
kind = "truncated"
cap = 1.0
exponent = 4.0

[sinr]
noise = 0.25
tau = 1.0
gamma = 0.05

[window]
side = 18.0
boundary = "hard"

[estimator]
graph = "sinr"
reps = 40
alpha = 1.0
lambda = 3.0
lambdas = [1.0, 3.0]
gammas = [0.0, 0.05, 0.2]
lambda_lo = 0.2
lambda_hi = 4.0
tolerance = 0.1
site_n = 3.0
site_m = 50.0
stabilization = "constant_range"
"#;

fn run_cli(dir: &Path, args: &[&str], threads: &str) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_coxnet"))
        .args(args)
        .args(["--config", dir.join("run.toml").to_str().unwrap()])
        .args(["--threads", threads, "--out"])
        .arg(dir.join(format!("t{threads}")))
        .status()
        .map_err(|e| e.to_string())?;
    if status.success() {
        Ok(())
    } else {
        Err(format!("coxnet {} exited with {status}", args.join(" ")))
    }
}

fn c11_determinism() -> Outcome {
    let root = tempfile::tempdir().unwrap();
    let commands: [&[&str]; 5] = [
        &["sweep"],
        &["bisect", "--target", "lambda"],
        &["percolate"],
        &["graph", "--kind", "digraph"],
        &["render"],
    ];
    let mut compared = 0;
    let mut differing = Vec::new();
    for (ci, args) in commands.iter().enumerate() {
        let dir = root.path().join(format!("c{ci}"));
        std::fs::create_dir_all(&dir).unwrap();
        std::fs::write(dir.join("run.toml"), DETERMINISM_CONFIG).unwrap();
        for t in ["1", "3"] {
            if let Err(e) = run_cli(&dir, args, t) {
                return outcome(false, e);
            }
        }
        let mut names: Vec<_> = std::fs::read_dir(dir.join("t1"))
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .filter(|n| n.ends_with(".csv") || n.ends_with(".svg"))
            .collect();
        names.sort();
        for name in names {
            let a = std::fs::read(dir.join("t1").join(&name)).unwrap();
            let b = std::fs::read(dir.join("t3").join(&name)).unwrap_or_default();
            compared += 1;
            if a != b {
                differing.push(format!("{} {name}", args[0]));
            }
        }
    }
    let detail = if differing.is_empty() {
        format!("{compared} files identical between --threads 1 and --threads 3")
    } else {
        format!("differing: {}", differing.join(", "))
    };
    outcome(differing.is_empty() && compared > 0, detail)
}

fn report(id: usize, name: &str, run: impl FnOnce() -> Outcome, failures: &mut usize) {
    let start = Instant::now();
    let o = run();
    let verdict = if o.pass { "PASS" } else { "FAIL" };
    println!("{verdict} {id:>2} {name}: {} [{:.1} s]", o.detail, start.elapsed().as_secs_f64());
    *failures += usize::from(!o.pass);
}

fn main() {
    let mut failures = 0;
    report(1, "degree bound", c1_degree_bound, &mut failures);
    report(2, "structural dominations", c2_dominations, &mut failures);
    report(3, "oracle equivalence", c3_oracles, &mut failures);
    report(4, "normalization", c4_normalization, &mut failures);
    report(5, "K0 certificate", c5_k0, &mut failures);
    let mut lambda_c = f64::NAN;
    report(
        6,
        "Poisson threshold",
        || {
            let (o, l) = c6_threshold();
            lambda_c = l;
            o
        },
        &mut failures,
    );
    report(7, "RSW trend", || c7_rsw(lambda_c), &mut failures);
    report(8, "gamma* trend", || c8_gamma_trend(lambda_c), &mut failures);
    report(9, "isolation", c9_isolation, &mut failures);
    report(10, "n-good diagnostics", c10_n_good, &mut failures);
    report(11, "determinism", c11_determinism, &mut failures);
    println!("{} of 11 criteria passed", 11 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
