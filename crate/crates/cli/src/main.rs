use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use coxnet::config::{load_config, Config};
use coxnet::environment::{sample_cox, sample_environment, Environment, PointPattern};
use coxnet::estimators::{
    bisect_gamma_star, bisect_lambda_c, sweep, sweep_csv, tuple_seed, GraphKind, SweepPoint,
};
use coxnet::graphs::{gilbert, knn_graph, SinrNetwork, SpatialGraph};
use coxnet::io::{histogram_csv, num, write_file};
use coxnet::manifest::RunManifest;
use coxnet::pathloss::validate;
use coxnet::percolation::{
    crossing_in, largest_cluster_stats, site_sweep, site_sweep_csv, CrossingSpec, GoodSiteSpec,
};
use coxnet::render::{render_svg, RenderStyle};
use coxnet::{Error, Point, SeedPath};

#[derive(Parser)]
#[command(name = "coxnet", version, about = "SINR graphs on Cox point processes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// TOML configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Master seed; overrides `estimator.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads. Outputs do not depend on this value.
    #[arg(long)]
    threads: Option<usize>,
    /// Overrides `estimator.lambda`.
    #[arg(long, allow_negative_numbers = true)]
    lambda: Option<f64>,
    /// Overrides `sinr.gamma`.
    #[arg(long, allow_negative_numbers = true)]
    gamma: Option<f64>,
    /// Overrides `estimator.r`, the Gilbert radius.
    #[arg(long, allow_negative_numbers = true)]
    r: Option<f64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Gilbert,
    Sinr,
    /// Directed SINR graph.
    Digraph,
    Knn,
    /// k-NN graph keeping only mutual neighbours.
    KnnMutual,
}

#[derive(Args, Clone)]
struct GraphArgs {
    /// Graph type; defaults to `estimator.graph`.
    #[arg(long, value_enum)]
    kind: Option<Kind>,
    /// Neighbour count for k-NN graphs; defaults to `estimator.k`.
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Target {
    Lambda,
    Gamma,
}

#[derive(Subcommand)]
enum Command {
    /// Sample the environment and the Cox pattern.
    Sample(Common),
    /// Build a graph on a sampled pattern.
    Graph {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        graph: GraphArgs,
    },
    /// Cluster statistics, crossing and good-site sweep on one sample.
    Percolate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        graph: GraphArgs,
    },
    /// Crossing probabilities over the `lambdas` x `gammas` grid.
    Sweep(Common),
    /// Bisection for the critical intensity or the critical gamma.
    Bisect {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "lambda")]
        target: Target,
    },
    /// Draw a sampled graph as SVG.
    Render {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        graph: GraphArgs,
        /// Leave out the environment overlay.
        #[arg(long)]
        no_environment: bool,
    },
    /// Check the path-loss and SINR parameters of a configuration.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

struct Run {
    config: Config,
    manifest: RunManifest,
    out: PathBuf,
    outputs: Vec<String>,
}

impl Run {
    fn start(command: &str, c: &Common) -> Result<Run, Error> {
        let mut config = load_config(&c.config)?;
        let mut overrides = Vec::new();
        if let Some(s) = c.seed {
            config.estimator.seed = s;
            overrides.push(("seed".to_owned(), s.to_string()));
        }
        if let Some(l) = c.lambda {
            config.estimator.lambda = l;
            overrides.push(("lambda".to_owned(), num(l)));
        }
        if let Some(g) = c.gamma {
            config.sinr.gamma = g;
            overrides.push(("gamma".to_owned(), num(g)));
        }
        if let Some(r) = c.r {
            config.estimator.r = Some(r);
            overrides.push(("r".to_owned(), num(r)));
        }
        config.validate()?;
        if let Some(t) = c.threads {
            rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build_global()
                .map_err(|e| Error::Config(format!("--threads: {e}")))?;
        }
        let manifest = RunManifest::new(command, &config, overrides)?;
        Ok(Run {
            config,
            manifest,
            out: c.out.clone(),
            outputs: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<(), Error> {
        write_file(&self.out.join(name), contents)?;
        self.outputs.push(name.to_owned());
        Ok(())
    }

    fn finish(mut self) -> Result<(), Error> {
        let outputs = std::mem::take(&mut self.outputs);
        self.manifest.finish(outputs);
        write_file(&self.out.join("manifest.json"), &self.manifest.to_json())
    }

    /// Replication 0 of tuple 0, the same draw the estimators start from.
    fn sample(&self) -> Result<(Environment, PointPattern), Error> {
        let cfg = self.config.estimator_config()?;
        let s = SeedPath::new(tuple_seed(cfg.seed, 0));
        let env = sample_environment(&cfg.model, &cfg.window, &s.derive("env", 0))?;
        let p = sample_cox(&env, self.config.estimator.lambda, &s.derive("points", 0))?;
        Ok((env, p))
    }

    fn graph(&self, p: &PointPattern, args: &GraphArgs) -> Result<SpatialGraph, Error> {
        let cfg = self.config.estimator_config()?;
        let kind = args.kind.unwrap_or(match cfg.graph {
            GraphKind::Gilbert => Kind::Gilbert,
            GraphKind::Sinr => Kind::Sinr,
        });
        let k = || {
            args.k
                .or(self.config.estimator.k)
                .ok_or_else(|| Error::Config("k-NN graph needs --k or estimator.k".into()))
        };
        match kind {
            Kind::Gilbert => Ok(gilbert(p, self.gilbert_radius()?)),
            Kind::Sinr => SinrNetwork::new(p, cfg.loss).graph(&cfg.sinr),
            Kind::Digraph => SinrNetwork::new(p, cfg.loss).digraph(&cfg.sinr),
            Kind::Knn => knn_graph(p, k()?, false),
            Kind::KnnMutual => knn_graph(p, k()?, true),
        }
    }

    fn gilbert_radius(&self) -> Result<f64, Error> {
        let cfg = self.config.estimator_config()?;
        match cfg.r {
            Some(r) => Ok(r),
            None => coxnet::pathloss::snr_radius(&cfg.loss, &cfg.sinr),
        }
    }
}

fn cmd_sample(c: &Common) -> Result<(), Error> {
    let mut run = Run::start("sample", c)?;
    let (env, p) = run.sample()?;
    run.write("points.csv", &p.to_csv())?;
    run.write("environment.json", &env.to_json())?;
    run.finish()
}

fn cmd_graph(c: &Common, args: &GraphArgs) -> Result<(), Error> {
    let mut run = Run::start("graph", c)?;
    let (_, p) = run.sample()?;
    let g = run.graph(&p, args)?;
    run.write("points.csv", &p.to_csv())?;
    run.write("edges.csv", &g.to_csv())?;
    run.write("degrees.csv", &g.degree_csv())?;
    run.write("degree_histogram.csv", &histogram_csv(&g.degree_histogram()))?;
    run.finish()
}

fn cmd_percolate(c: &Common, args: &GraphArgs) -> Result<(), Error> {
    let mut run = Run::start("percolate", c)?;
    let (env, p) = run.sample()?;
    let g = run.graph(&p, args)?;
    let stats = largest_cluster_stats(&g);
    let e = run.config.estimator.clone();
    let r = run.gilbert_radius()?;
    let spec = CrossingSpec::hard(Point(p.window.lower), e.alpha, e.n.expect("filled"), r);
    let crossed = match crossing_in(&p, &g, &spec) {
        Ok(b) => u8::from(b).to_string(),
        Err(Error::BoxOutsideRegion | Error::UnsupportedDimension(_)) => "NA".to_owned(),
        Err(err) => return Err(err),
    };
    let mut summary = String::from("points,edges,components,largest_fraction,crossing\n");
    let _ = writeln!(
        summary,
        "{},{},{},{},{}",
        p.len(),
        g.edge_count(),
        stats.count,
        num(stats.largest_fraction),
        crossed
    );
    let mut clusters = String::from("size,count\n");
    for (s, n) in &stats.sizes {
        let _ = writeln!(clusters, "{s},{n}");
    }
    run.write("percolation.csv", &summary)?;
    run.write("clusters.csv", &clusters)?;
    if let Some(n) = e.site_n {
        let m = e
            .site_m
            .ok_or_else(|| Error::Config("estimator.site_n needs estimator.site_m".into()))?;
        let site = GoodSiteSpec {
            n,
            r,
            stabilization: run.config.stabilization(),
        };
        site.check().map_err(|err| Error::Config(format!("[estimator]: {err}")))?;
        let rows = site_sweep(&p, &env, &site, m, &run.config.path_loss()?)?;
        run.write("sites.csv", &site_sweep_csv(&rows))?;
    }
    run.finish()
}

fn cmd_sweep(c: &Common) -> Result<(), Error> {
    let mut run = Run::start("sweep", c)?;
    let e = &run.config.estimator;
    let lambdas = e.lambdas.clone().unwrap_or_else(|| vec![e.lambda]);
    let gammas = e.gammas.clone().unwrap_or_else(|| vec![run.config.sinr.gamma]);
    let grid: Vec<SweepPoint> = lambdas
        .iter()
        .flat_map(|&lambda| gammas.iter().map(move |&gamma| SweepPoint { lambda, gamma }))
        .collect();
    let rows = sweep(&run.config.estimator_config()?, &grid)?;
    run.write("sweep.csv", &sweep_csv(&rows))?;
    run.finish()
}

fn cmd_bisect(c: &Common, target: Target) -> Result<(), Error> {
    let mut run = Run::start("bisect", c)?;
    let cfg = run.config.estimator_config()?;
    let e = &run.config.estimator;
    let (name, res) = match target {
        Target::Lambda => {
            let missing = || Error::Config("lambda bisection needs estimator.lambda_lo and lambda_hi".into());
            let lo = e.lambda_lo.ok_or_else(missing)?;
            let hi = e.lambda_hi.ok_or_else(missing)?;
            ("lambda_c", bisect_lambda_c(&cfg, run.gilbert_radius()?, (lo, hi))?)
        }
        Target::Gamma => ("gamma_star", bisect_gamma_star(&cfg, e.lambda, e.gamma_hi)?),
    };
    let mut result = String::from("target,estimate,lo,hi,iterations\n");
    let _ = writeln!(
        result,
        "{name},{},{},{},{}",
        num(res.estimate),
        num(res.lo),
        num(res.hi),
        res.iterations
    );
    run.write("bisect.csv", &result)?;
    run.write("bisect_rows.csv", &sweep_csv(&res.rows))?;
    run.finish()
}

fn cmd_render(c: &Common, args: &GraphArgs, no_environment: bool) -> Result<(), Error> {
    let mut run = Run::start("render", c)?;
    let (env, p) = run.sample()?;
    let g = run.graph(&p, args)?;
    let env = if no_environment { None } else { Some(&env) };
    run.write("graph.svg", &render_svg(&p, &g, env, &RenderStyle::default())?)?;
    run.finish()
}

fn cmd_validate(path: &Path) -> Result<(), Error> {
    let config = load_config(path)?;
    let report = validate(&config.path_loss()?, &config.sinr_params()?, config.window.dim);
    for line in report.lines() {
        println!("{line}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.command {
        Command::Sample(c) => cmd_sample(c),
        Command::Graph { common, graph } => cmd_graph(common, graph),
        Command::Percolate { common, graph } => cmd_percolate(common, graph),
        Command::Sweep(c) => cmd_sweep(c),
        Command::Bisect { common, target } => cmd_bisect(common, *target),
        Command::Render {
            common,
            graph,
            no_environment,
        } => cmd_render(common, graph, *no_environment),
        Command::Validate { config } => cmd_validate(config),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ Error::Config(_)) => {
            eprintln!("coxnet: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("coxnet: {e}");
            ExitCode::from(3)
        }
    }
}
