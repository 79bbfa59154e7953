//! Dataset acquisition and the solve / kmeans / sweep experiment runs.

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use spclust_core::baseline::{self, KMeansFit};
use spclust_core::distance::KernelSpec;
use spclust_core::metrics::{self, MetricReport};
use spclust_core::solver::{self, Assignment};
use spclust_core::{datasets, DataMatrix, DistanceMatrix, LabelVector, SolveTrace, SolverConfig};

use crate::io::{self, DataError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenKind {
    TwoMoon,
    TwoSpiral,
}

impl GenKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GenKind::TwoMoon => "two-moon",
            GenKind::TwoSpiral => "two-spiral",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenSpec {
    pub kind: GenKind,
    pub n: usize,
    pub noise: f64,
    pub turns: f64,
    pub seed: u64,
}

impl GenSpec {
    pub fn generate(&self) -> Result<(DataMatrix, LabelVector), DataError> {
        Ok(match self.kind {
            GenKind::TwoMoon => datasets::two_moon(self.n, self.noise, self.seed)?,
            GenKind::TwoSpiral => datasets::two_spiral(self.n, self.turns, self.noise, self.seed)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    Csv {
        path: PathBuf,
        label_column: Option<usize>,
        header: bool,
        truth: Option<PathBuf>,
    },
    Generated(GenSpec),
}

#[derive(Debug, Clone)]
pub struct Dataset {
    pub x: DataMatrix,
    pub truth: Option<LabelVector>,
    pub source: DataSource,
}

impl Dataset {
    pub fn load(source: DataSource) -> Result<Self, DataError> {
        let (x, truth) = match &source {
            DataSource::Csv {
                path,
                label_column,
                header,
                truth,
            } => {
                let (x, from_column) = io::load_csv(path, *label_column, *header)?;
                let truth = match truth {
                    Some(p) => Some(io::load_labels(p)?),
                    None => from_column,
                };
                (x, truth)
            }
            DataSource::Generated(spec) => {
                let (x, y) = spec.generate()?;
                (x, Some(y))
            }
        };
        if let Some(t) = &truth {
            if t.len() != x.n_samples() {
                return Err(DataError::TruthLength(t.len(), x.n_samples()));
            }
        }
        Ok(Dataset { x, truth, source })
    }

    /// SHA-256 over `N`, `d` and the feature values, all little-endian.
    pub fn content_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.x.n_samples() as u64).to_le_bytes());
        h.update((self.x.n_features() as u64).to_le_bytes());
        for v in self.x.as_slice() {
            h.update(v.to_le_bytes());
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    fn score(&self, labels: &[usize]) -> Result<Option<MetricReport>, DataError> {
        match &self.truth {
            Some(t) => Ok(Some(metrics::evaluate(labels, t.as_slice())?)),
            None => Ok(None),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveRun {
    pub assignment: Assignment,
    pub trace: SolveTrace,
    pub metrics: Option<MetricReport>,
    /// `tr(GᵀDG P⁻¹)` of the result; absent when a cluster is empty.
    pub model2: Option<f64>,
    pub distance: DistanceMatrix,
    pub seconds: f64,
}

pub fn run_solve(ds: &Dataset, kernel: &KernelSpec, cfg: &SolverConfig) -> Result<SolveRun, DataError> {
    let start = Instant::now();
    let d = kernel.build(&ds.x)?;
    let (assignment, trace) = solver::solve(&d, cfg)?;
    let metrics = ds.score(assignment.labels())?;
    let model2 = solver::model2_diagnostic(&d, &assignment).ok();
    Ok(SolveRun {
        assignment,
        trace,
        metrics,
        model2,
        distance: d,
        seconds: start.elapsed().as_secs_f64(),
    })
}

#[derive(Debug, Clone)]
pub struct KMeansRun {
    pub fit: KMeansFit,
    pub metrics: Option<MetricReport>,
    pub seconds: f64,
}

pub fn run_kmeans(ds: &Dataset, k: usize, seed: u64, max_iters: usize) -> Result<KMeansRun, DataError> {
    let start = Instant::now();
    let fit = baseline::kmeans(&ds.x, k, seed, max_iters)?;
    let metrics = ds.score(fit.assignment.labels())?;
    Ok(KMeansRun {
        fit,
        metrics,
        seconds: start.elapsed().as_secs_f64(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub alphas: Vec<f64>,
    pub ps: Vec<f64>,
    pub cs: Vec<usize>,
}

impl SweepGrid {
    pub fn len(&self) -> usize {
        self.alphas.len() * self.ps.len() * self.cs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub alpha: f64,
    pub p: f64,
    /// `None` for the plain Euclidean kernel, which ignores C.
    pub c: Option<usize>,
    pub metrics: MetricReport,
    pub objective: f64,
    pub sweeps: usize,
}

pub const SWEEP_HEADER: &str = "alpha,p,c,acc,nmi,purity,precision,fscore,ari,objective,sweeps";

/// Solves every grid cell. One distance matrix is built per C value and
/// shared by its cells, which run in parallel; rows come back in grid order
/// (C outermost, then α, then p).
pub fn sweep(
    ds: &Dataset,
    kernel: &KernelSpec,
    grid: &SweepGrid,
    base: &SolverConfig,
) -> Result<Vec<SweepRow>, DataError> {
    let truth = ds.truth.as_ref().ok_or(DataError::MissingTruth("sweep"))?;
    let uses_c = kernel.kernel != spclust_core::DistanceKernel::SquaredEuclidean;
    let mut rows = Vec::with_capacity(grid.len());
    for &c in &grid.cs {
        let d = KernelSpec { c, ..*kernel }.build(&ds.x)?;
        let cells: Vec<(f64, f64)> = grid
            .alphas
            .iter()
            .flat_map(|&a| grid.ps.iter().map(move |&p| (a, p)))
            .collect();
        let solved: Result<Vec<SweepRow>, DataError> = cells
            .par_iter()
            .map(|&(alpha, p)| {
                let cfg = SolverConfig {
                    alpha,
                    p,
                    ..base.clone()
                };
                let (g, trace) = solver::solve(&d, &cfg)?;
                Ok(SweepRow {
                    alpha,
                    p,
                    c: uses_c.then_some(c),
                    metrics: metrics::evaluate(g.labels(), truth.as_slice())?,
                    objective: trace.final_objective(),
                    sweeps: trace.sweeps_run,
                })
            })
            .collect();
        rows.extend(solved?);
    }
    Ok(rows)
}

pub fn write_sweep_csv<W: Write>(mut out: W, rows: &[SweepRow]) -> std::io::Result<()> {
    writeln!(out, "{SWEEP_HEADER}")?;
    for r in rows {
        let m = &r.metrics;
        let c = r.c.map(|c| c.to_string()).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.alpha, r.p, c, m.acc, m.nmi, m.purity, m.precision, m.fscore, m.ari, r.objective, r.sweeps
        )?;
    }
    Ok(())
}

/// Grid cell with the highest ACC (first in grid order on ties).
pub fn best_by_acc(rows: &[SweepRow]) -> Option<&SweepRow> {
    rows.iter().fold(None, |best: Option<&SweepRow>, r| match best {
        Some(b) if b.metrics.acc >= r.metrics.acc => Some(b),
        _ => Some(r),
    })
}
