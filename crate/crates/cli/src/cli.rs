//! Command-line interface: argument definitions and subcommand dispatch.

use std::fs::File;
use std::io::{self as stdio, BufWriter, Write};
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use spclust_core::datasets::{DEFAULT_NOISE_STD, DEFAULT_SPIRAL_TURNS};
use spclust_core::distance::{KernelSpec, DEFAULT_PENALTY_FACTOR};
use spclust_core::{DistanceKernel, InitStrategy, SolverConfig};

use crate::io;
use crate::pipeline::{self, DataSource, Dataset, GenKind, GenSpec, SweepGrid};
use crate::report;

#[derive(Debug, Parser)]
#[command(
    name = "spclust",
    version,
    about = "Manifold clustering with a Schatten-p balance term"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cluster a dataset with the Schatten-regularized solver.
    Solve(SolveArgs),
    /// Cluster a dataset with Lloyd's K-means.
    Kmeans(KmeansArgs),
    /// Write a synthetic dataset to CSV.
    Gen(GenArgs),
    /// Run the solver over a grid of alpha, p and C values.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum GenName {
    TwoMoon,
    TwoSpiral,
}

impl From<GenName> for GenKind {
    fn from(g: GenName) -> Self {
        match g {
            GenName::TwoMoon => GenKind::TwoMoon,
            GenName::TwoSpiral => GenKind::TwoSpiral,
        }
    }
}

#[derive(Debug, Args)]
pub struct GenParams {
    /// Number of samples (even, at least 4).
    #[arg(long, default_value_t = 400)]
    pub n: usize,
    /// Standard deviation of the Gaussian noise.
    #[arg(long, default_value_t = DEFAULT_NOISE_STD)]
    pub noise: f64,
    /// Spiral turns (two-spiral only).
    #[arg(long, default_value_t = DEFAULT_SPIRAL_TURNS)]
    pub turns: f64,
    /// Generator seed.
    #[arg(long, default_value_t = 0)]
    pub gen_seed: u64,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Numeric CSV, one sample per row.
    #[arg(long, conflicts_with = "gen", required_unless_present = "gen")]
    pub input: Option<PathBuf>,
    /// Generate the data instead of reading it.
    #[arg(long, value_enum)]
    pub gen: Option<GenName>,
    /// Zero-based CSV column holding ground-truth labels.
    #[arg(long, requires = "input")]
    pub label_column: Option<usize>,
    /// Skip the first CSV row.
    #[arg(long, requires = "input")]
    pub header: bool,
    /// Ground-truth label file, one label per line.
    #[arg(long, requires = "input")]
    pub truth: Option<PathBuf>,
    #[command(flatten)]
    pub gen_params: GenParams,
}

impl InputArgs {
    fn source(&self) -> DataSource {
        match (&self.input, self.gen) {
            (Some(path), _) => DataSource::Csv {
                path: path.clone(),
                label_column: self.label_column,
                header: self.header,
                truth: self.truth.clone(),
            },
            (None, Some(kind)) => DataSource::Generated(self.gen_params.spec(kind.into())),
            (None, None) => unreachable!("clap requires --input or --gen"),
        }
    }

    fn load(&self) -> Result<Dataset> {
        Dataset::load(self.source()).context("loading dataset")
    }
}

impl GenParams {
    fn spec(&self, kind: GenKind) -> GenSpec {
        GenSpec {
            kind,
            n: self.n,
            noise: self.noise,
            turns: self.turns,
            seed: self.gen_seed,
        }
    }
}

#[derive(Debug, Args)]
pub struct KernelArgs {
    /// Distance kernel: euclidean, knn-masked or knn-geodesic.
    #[arg(long, default_value = "euclidean")]
    pub kernel: DistanceKernel,
    /// Penalty multiplier for non-neighbour entries of knn-masked.
    #[arg(long, default_value_t = DEFAULT_PENALTY_FACTOR)]
    pub penalty: f64,
    /// Divide the distance matrix by its largest entry.
    #[arg(long)]
    pub normalize_distance: bool,
}

impl KernelArgs {
    fn spec(&self, c: usize) -> KernelSpec {
        KernelSpec {
            kernel: self.kernel,
            c,
            penalty_factor: self.penalty,
            normalize: self.normalize_distance,
        }
    }
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    /// Number of clusters.
    #[arg(long)]
    pub k: usize,
    /// Solver seed (initialization and restarts).
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub max_sweeps: usize,
    /// Stop once the objective changes by at most this much in a sweep.
    #[arg(long, default_value_t = 0.0)]
    pub tol: f64,
    /// Initialization: mixed, seeded-growth, kmeans-pp or random-balanced.
    #[arg(long, default_value = "mixed")]
    pub init: InitStrategy,
    /// Independent starts; the lowest final objective wins.
    #[arg(long, default_value_t = 10)]
    pub restarts: usize,
    /// Move a far point into any cluster that becomes empty.
    #[arg(long)]
    pub repair_empty: bool,
}

impl SolverArgs {
    fn config(&self, alpha: f64, p: f64) -> SolverConfig {
        SolverConfig {
            max_sweeps: self.max_sweeps,
            tol: self.tol,
            seed: self.seed,
            init: self.init,
            restarts: self.restarts,
            repair_empty: self.repair_empty,
            ..SolverConfig::new(self.k, alpha, p)
        }
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub kernel: KernelArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Neighbourhood size for the KNN kernels.
    #[arg(long, default_value_t = 10)]
    pub c: usize,
    /// Weight of the balance term.
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Schatten exponent.
    #[arg(long, default_value_t = 1.0)]
    pub p: f64,
    #[arg(long)]
    pub out_labels: Option<PathBuf>,
    #[arg(long)]
    pub out_report: Option<PathBuf>,
    /// Also write the distance matrix as CSV.
    #[arg(long)]
    pub save_distance: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct KmeansArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 300)]
    pub max_iters: usize,
    #[arg(long)]
    pub out_labels: Option<PathBuf>,
    #[arg(long)]
    pub out_report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(value_enum)]
    pub kind: GenName,
    #[command(flatten)]
    pub params: GenParams,
    /// Feature CSV to write.
    #[arg(long)]
    pub out: PathBuf,
    /// Label file to write.
    #[arg(long)]
    pub out_labels: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub kernel: KernelArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Comma-separated neighbourhood sizes.
    #[arg(long, value_delimiter = ',', default_value = "10")]
    pub c: Vec<usize>,
    /// Comma-separated alpha values.
    #[arg(long, value_delimiter = ',', default_value = "1e1,1e2,1e3,1e4")]
    pub alpha: Vec<f64>,
    /// Comma-separated p values.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0,1.1,1.2,1.3,1.4,1.5,1.6,1.7,1.8,1.9,2.0"
    )]
    pub p: Vec<f64>,
    /// Result CSV; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Solve(a) => solve(a),
        Command::Kmeans(a) => kmeans(a),
        Command::Gen(a) => gen(a),
        Command::Sweep(a) => sweep(a),
    }
}

fn print_summary(objective: f64, iterations: usize, converged: bool, metrics: Option<&spclust_core::MetricReport>) {
    println!("objective {objective} iterations {iterations} converged {converged}");
    if let Some(m) = metrics {
        println!(
            "acc {:.4} nmi {:.4} purity {:.4} precision {:.4} fscore {:.4} ari {:.4}",
            m.acc, m.nmi, m.purity, m.precision, m.fscore, m.ari
        );
    }
}

fn solve(a: SolveArgs) -> Result<()> {
    let ds = a.input.load()?;
    let kernel = a.kernel.spec(a.c);
    let cfg = a.solver.config(a.alpha, a.p);
    let run = pipeline::run_solve(&ds, &kernel, &cfg)?;
    if let Some(path) = &a.save_distance {
        io::save_distance(path, &run.distance)?;
    }
    if let Some(path) = &a.out_labels {
        io::save_labels(path, run.assignment.labels())?;
    }
    if let Some(path) = &a.out_report {
        report::emit_report(&report::solve_report(&ds, &kernel, &cfg, &run), path)?;
    }
    let t = &run.trace;
    print_summary(t.final_objective(), t.sweeps_run, t.converged, run.metrics.as_ref());
    Ok(())
}

fn kmeans(a: KmeansArgs) -> Result<()> {
    let ds = a.input.load()?;
    let run = pipeline::run_kmeans(&ds, a.k, a.seed, a.max_iters)?;
    if let Some(path) = &a.out_labels {
        io::save_labels(path, run.fit.assignment.labels())?;
    }
    let rep = report::kmeans_report(&ds, a.k, a.seed, a.max_iters, &run);
    if let Some(path) = &a.out_report {
        report::emit_report(&rep, path)?;
    }
    print_summary(
        rep.result.final_objective,
        run.fit.iterations,
        run.fit.converged,
        run.metrics.as_ref(),
    );
    Ok(())
}

fn gen(a: GenArgs) -> Result<()> {
    let (x, y) = a.params.spec(a.kind.into()).generate()?;
    io::save_csv(&a.out, &x)?;
    if let Some(path) = &a.out_labels {
        io::save_labels(path, y.as_slice())?;
    }
    Ok(())
}

fn sweep(a: SweepArgs) -> Result<()> {
    let ds = a.input.load()?;
    let grid = SweepGrid {
        alphas: a.alpha,
        ps: a.p,
        cs: a.c,
    };
    if grid.is_empty() {
        bail!("sweep grid is empty");
    }
    let kernel = a.kernel.spec(grid.cs[0]);
    let base = a.solver.config(grid.alphas[0], grid.ps[0]);
    let rows = pipeline::sweep(&ds, &kernel, &grid, &base)?;
    match &a.out {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            let mut w = BufWriter::new(file);
            pipeline::write_sweep_csv(&mut w, &rows)?;
            w.flush()?;
            if let Some(best) = pipeline::best_by_acc(&rows) {
                let c = best.c.map(|c| c.to_string()).unwrap_or_else(|| "-".into());
                println!(
                    "best acc {:.4} at alpha {} p {} c {}",
                    best.metrics.acc, best.alpha, best.p, c
                );
            }
        }
        None => pipeline::write_sweep_csv(stdio::stdout().lock(), &rows)?,
    }
    Ok(())
}
