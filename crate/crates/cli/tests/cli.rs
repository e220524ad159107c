use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use coxnet::config::Config;
use coxnet::manifest::RunManifest;

const BASE: &str = r#"[model]
kind = "modulated"
inside = 1.0
outside = 0.2
germ_intensity = 0.3
grain_radius = 1.0

[sinr]
noise = 0.25
tau = 1.0
gamma = 0.05

[window]
side = 12.0

[estimator]
graph = "sinr"
reps = 20
lambda = 2.0
lambdas = [1.0, 2.0]
gammas = [0.0, 0.1]
"#;

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn coxnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coxnet")).args(args).output().unwrap()
}

fn run_ok(config: &Path, out: &Path, args: &[&str]) {
    let mut all: Vec<&str> = args.to_vec();
    all.extend(["--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    let o = coxnet(&all);
    assert!(o.status.success(), "{:?}: {}", all, String::from_utf8_lossy(&o.stderr));
}

fn read(p: PathBuf) -> String {
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

#[test]
fn sinr_at_zero_gamma_is_gilbert_at_snr_radius() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "a.toml", BASE);
    run_ok(&cfg, &dir.path().join("s"), &["graph", "--kind", "sinr", "--gamma", "0"]);
    run_ok(&cfg, &dir.path().join("g"), &["graph", "--kind", "gilbert"]);
    let s = read(dir.path().join("s/edges.csv"));
    assert_eq!(s, read(dir.path().join("g/edges.csv")));
    assert!(s.lines().count() > 10);
}

#[test]
fn sweep_is_reproducible_from_its_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "a.toml", BASE);
    run_ok(&cfg, &dir.path().join("a"), &["sweep", "--seed", "11", "--lambda", "1.5"]);
    let manifest = RunManifest::from_json(&read(dir.path().join("a/manifest.json"))).unwrap();
    assert_eq!(manifest.seed, 11);
    assert_eq!(manifest.outputs, vec!["sweep.csv".to_owned()]);
    assert!(manifest.overrides.contains(&("lambda".to_owned(), "1.5".to_owned())));
    let echoed = manifest.config().unwrap();
    assert_eq!(echoed.estimator.lambda, 1.5);
    let again = write_config(dir.path(), "echo.toml", &manifest.config);
    run_ok(&again, &dir.path().join("b"), &["sweep"]);
    let table = read(dir.path().join("a/sweep.csv"));
    assert_eq!(table, read(dir.path().join("b/sweep.csv")));
    assert_eq!(table.lines().count(), 5);
    assert!(table.starts_with("model,lambda,gamma,r,n,alpha,reps,successes,p_hat,ci_lo,ci_hi,seed,ms\n"));
}

#[test]
fn sample_writes_points_environment_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "a.toml", BASE);
    let out = dir.path().join("o");
    run_ok(&cfg, &out, &["sample"]);
    let points = read(out.join("points.csv"));
    assert!(points.starts_with("id,x,y\n"));
    let env: serde_json::Value = serde_json::from_str(&read(out.join("environment.json"))).unwrap();
    assert!(env.is_object());
    let m = RunManifest::from_json(&read(out.join("manifest.json"))).unwrap();
    assert_eq!(m.config().unwrap(), Config::from_toml(BASE).unwrap());
    assert_eq!(m.validation.len(), 3);
}

#[test]
fn render_counts_match_graph() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "a.toml", BASE);
    run_ok(&cfg, &dir.path().join("r"), &["render", "--no-environment"]);
    run_ok(&cfg, &dir.path().join("g"), &["graph"]);
    let svg = read(dir.path().join("r/graph.svg"));
    let points = read(dir.path().join("g/points.csv")).lines().count() - 1;
    let edges = read(dir.path().join("g/edges.csv")).lines().count() - 1;
    assert_eq!(svg.matches("<circle ").count(), points);
    assert_eq!(svg.matches("<line ").count(), edges);
    assert_eq!(svg.matches("<path ").count(), 0);
}

#[test]
fn percolate_reports_clusters_and_sites() {
    let dir = tempfile::tempdir().unwrap();
    let text = BASE.replace("side = 12.0", "side = 20.0\nboundary = \"hard\"") + "site_n = 3.0\nsite_m = 10.0\n";
    let cfg = write_config(dir.path(), "a.toml", &text);
    let out = dir.path().join("p");
    run_ok(&cfg, &out, &["percolate", "--kind", "gilbert"]);
    let summary = read(out.join("percolation.csv"));
    assert!(summary.starts_with("points,edges,components,largest_fraction,crossing\n"));
    let sites = read(out.join("sites.csv"));
    assert!(sites.starts_with("zx,zy,good,reason,I6n,B_event\n"));
    assert!(sites.lines().count() > 1);
    let clusters = read(out.join("clusters.csv"));
    let total: usize = clusters
        .lines()
        .skip(1)
        .map(|l| {
            let (s, c) = l.split_once(',').unwrap();
            s.parse::<usize>().unwrap() * c.parse::<usize>().unwrap()
        })
        .sum();
    let points: usize = summary.lines().nth(1).unwrap().split(',').next().unwrap().parse().unwrap();
    assert_eq!(total, points);
}

#[test]
fn validate_reports_divergent_tail_without_failing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "a.toml", "[model]\nkind = \"poisson\"\n[pathloss]\nexponent = 2.0\n");
    let o = coxnet(&["validate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("integrability: FAIL")), "{text}");
}

#[test]
fn config_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("unknown.toml", "[model]\nkind = \"poisson\"\ncolour = 1\n", "model.colour (line 3)"),
        ("tau.toml", "[model]\nkind = \"poisson\"\n[sinr]\nnoise = 0.5\n", "sinr.tau"),
        ("knn.toml", "[model]\nkind = \"poisson\"\n", "estimator.k"),
    ];
    for (name, text, needle) in cases {
        let cfg = write_config(dir.path(), name, text);
        let o = coxnet(&[
            "graph",
            "--kind",
            "knn",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            dir.path().join("o").to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(2), "{name}");
        let err = String::from_utf8(o.stderr).unwrap();
        assert!(err.contains(needle), "{name}: {err}");
    }
    let cfg = write_config(dir.path(), "ok.toml", BASE);
    let o = coxnet(&["sample", "--config", cfg.to_str().unwrap(), "--r", "-1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = coxnet(&["sample", "--config", dir.path().join("missing.toml").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn runtime_errors_exit_with_3() {
    let dir = tempfile::tempdir().unwrap();
    let text = BASE.replace("graph = \"sinr\"", "graph = \"gilbert\"") + "lambda_lo = 8.0\nlambda_hi = 9.0\n";
    let cfg = write_config(dir.path(), "a.toml", &text);
    let o = coxnet(&[
        "bisect",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8(o.stderr).unwrap().contains("invalid bracket"));
}
