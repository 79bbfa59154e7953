//! JSON run reports. Field order is fixed by the struct definitions and
//! floats are written in shortest round-trip form, so a report fully
//! determines a rerun.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use serde::{Deserialize, Serialize};

use spclust_core::distance::{KernelSpec, GEODESIC_DISCONNECT_FACTOR};
use spclust_core::metrics::{MetricReport, NMI_NORMALIZATION};
use spclust_core::rng::RNG_ALGORITHM;
use spclust_core::SolverConfig;

use crate::io::DataError;
use crate::pipeline::{DataSource, Dataset, KMeansRun, SolveRun};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub dataset: DatasetEcho,
    pub solver: Option<SolverEcho>,
    pub kmeans: Option<KMeansEcho>,
    pub rng_algorithm: String,
    pub result: ResultEcho,
    pub metrics: Option<Metrics>,
    pub wall_time_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetEcho {
    pub source: String,
    pub path: Option<String>,
    pub label_column: Option<usize>,
    pub header: Option<bool>,
    pub truth_path: Option<String>,
    pub gen_n: Option<usize>,
    pub gen_noise: Option<f64>,
    pub gen_turns: Option<f64>,
    pub gen_seed: Option<u64>,
    pub n_samples: usize,
    pub n_features: usize,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverEcho {
    pub kernel: String,
    pub c: Option<usize>,
    pub penalty_factor: Option<f64>,
    pub geodesic_disconnect_factor: Option<f64>,
    pub normalize_distance: bool,
    pub alpha: f64,
    pub p: f64,
    pub k: usize,
    pub max_sweeps: usize,
    pub tol: f64,
    pub seed: u64,
    pub init: String,
    pub restarts: usize,
    pub repair_empty: bool,
    pub sigma_floor: f64,
    pub gradient_schedule: String,
    pub row_order: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KMeansEcho {
    pub k: usize,
    pub seed: u64,
    pub max_iters: usize,
    pub seeding: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultEcho {
    pub converged: bool,
    pub iterations: usize,
    pub initial_objective: Option<f64>,
    pub objective_trace: Vec<f64>,
    pub final_objective: f64,
    pub model2_diagnostic: Option<f64>,
    pub empty_cluster_events: Option<usize>,
    pub degenerate_distances: Option<bool>,
    pub restart: Option<usize>,
    pub counts: Vec<usize>,
    pub labels: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub acc: f64,
    pub nmi: f64,
    pub purity: f64,
    pub precision: f64,
    pub fscore: f64,
    pub ari: f64,
    pub nmi_normalization: String,
}

impl From<&MetricReport> for Metrics {
    fn from(m: &MetricReport) -> Self {
        Metrics {
            acc: m.acc,
            nmi: m.nmi,
            purity: m.purity,
            precision: m.precision,
            fscore: m.fscore,
            ari: m.ari,
            nmi_normalization: NMI_NORMALIZATION.to_string(),
        }
    }
}

fn dataset_echo(ds: &Dataset) -> DatasetEcho {
    let mut echo = DatasetEcho {
        source: String::new(),
        path: None,
        label_column: None,
        header: None,
        truth_path: None,
        gen_n: None,
        gen_noise: None,
        gen_turns: None,
        gen_seed: None,
        n_samples: ds.x.n_samples(),
        n_features: ds.x.n_features(),
        sha256: ds.content_hash(),
    };
    match &ds.source {
        DataSource::Csv {
            path,
            label_column,
            header,
            truth,
        } => {
            echo.source = "csv".into();
            echo.path = Some(path.display().to_string());
            echo.label_column = *label_column;
            echo.header = Some(*header);
            echo.truth_path = truth.as_ref().map(|t| t.display().to_string());
        }
        DataSource::Generated(spec) => {
            echo.source = spec.kind.as_str().into();
            echo.gen_n = Some(spec.n);
            echo.gen_noise = Some(spec.noise);
            echo.gen_turns = Some(spec.turns);
            echo.gen_seed = Some(spec.seed);
        }
    }
    echo
}

fn header(command: &str) -> (String, String, String) {
    (
        env!("CARGO_PKG_NAME").to_string(),
        env!("CARGO_PKG_VERSION").to_string(),
        command.to_string(),
    )
}

pub fn solve_report(ds: &Dataset, kernel: &KernelSpec, cfg: &SolverConfig, run: &SolveRun) -> RunReport {
    let (tool, version, command) = header("solve");
    let knn = kernel.kernel != spclust_core::DistanceKernel::SquaredEuclidean;
    let solver = SolverEcho {
        kernel: kernel.kernel.as_str().into(),
        c: knn.then_some(kernel.c),
        penalty_factor: run.distance.penalty_factor(),
        geodesic_disconnect_factor: (kernel.kernel == spclust_core::DistanceKernel::KnnGeodesic)
            .then_some(GEODESIC_DISCONNECT_FACTOR),
        normalize_distance: kernel.normalize,
        alpha: cfg.alpha,
        p: cfg.p,
        k: cfg.k,
        max_sweeps: cfg.max_sweeps,
        tol: cfg.tol,
        seed: cfg.seed,
        init: cfg.init.as_str().into(),
        restarts: cfg.restarts,
        repair_empty: cfg.repair_empty,
        sigma_floor: cfg.sigma_floor,
        gradient_schedule: "per-sweep".into(),
        row_order: "sequential-immediate-commit".into(),
    };
    let t = &run.trace;
    RunReport {
        tool,
        version,
        command,
        dataset: dataset_echo(ds),
        solver: Some(solver),
        kmeans: None,
        rng_algorithm: RNG_ALGORITHM.into(),
        result: ResultEcho {
            converged: t.converged,
            iterations: t.sweeps_run,
            initial_objective: Some(t.initial_objective),
            objective_trace: t.objective_per_sweep.clone(),
            final_objective: t.final_objective(),
            model2_diagnostic: run.model2,
            empty_cluster_events: Some(t.empty_cluster_events),
            degenerate_distances: Some(t.degenerate_distances),
            restart: Some(t.restart),
            counts: run.assignment.counts().to_vec(),
            labels: run.assignment.labels().to_vec(),
        },
        metrics: run.metrics.as_ref().map(Metrics::from),
        wall_time_seconds: run.seconds,
    }
}

pub fn kmeans_report(ds: &Dataset, k: usize, seed: u64, max_iters: usize, run: &KMeansRun) -> RunReport {
    let (tool, version, command) = header("kmeans");
    let fit = &run.fit;
    RunReport {
        tool,
        version,
        command,
        dataset: dataset_echo(ds),
        solver: None,
        kmeans: Some(KMeansEcho {
            k,
            seed,
            max_iters,
            seeding: "kmeans++".into(),
        }),
        rng_algorithm: RNG_ALGORITHM.into(),
        result: ResultEcho {
            converged: fit.converged,
            iterations: fit.iterations,
            initial_objective: None,
            objective_trace: fit.objective_trace.clone(),
            final_objective: spclust_core::baseline::kmeans_objective(&ds.x, &fit.assignment),
            model2_diagnostic: None,
            empty_cluster_events: None,
            degenerate_distances: None,
            restart: None,
            counts: fit.assignment.counts().to_vec(),
            labels: fit.assignment.labels().to_vec(),
        },
        metrics: run.metrics.as_ref().map(Metrics::from),
        wall_time_seconds: run.seconds,
    }
}

pub fn emit_report(report: &RunReport, path: &Path) -> Result<(), DataError> {
    let io_err = |source| DataError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(io_err)?;
    serde_json::to_writer_pretty(BufWriter::new(file), report).map_err(|e| io_err(std::io::Error::other(e)))
}

pub fn load_report(path: &Path) -> Result<RunReport, DataError> {
    let io_err = |source| DataError::Io {
        path: path.to_path_buf(),
        source,
    };
    let text = std::fs::read_to_string(path).map_err(io_err)?;
    serde_json::from_str(&text).map_err(|e| io_err(std::io::Error::new(std::io::ErrorKind::InvalidData, e)))
}
