//! Label optimization for `tr(GᵀDG) − α‖G‖ₛₚᵖ` over one-hot `G`.
//!
//! Each sweep fixes the Schatten gradient `F` at the current labels and
//! visits samples `0..N` in order. Sample `i` moves to the cluster `b`
//! minimizing
//!
//! ```text
//! score(j) = 2 Σ_l D[l][i]·[label(l) = j] − α F[i][j]
//! ```
//!
//! and the move is committed before the next sample is visited. For
//! `p ≥ 1` the Schatten power is convex, so the linearization majorizes
//! `−α‖G‖ₛₚᵖ` and the true objective never increases from one sweep to the
//! next.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::distance::DistanceMatrix;
use crate::linalg::Matrix;
use crate::rng;
use crate::schatten::{self, GradientMatrix, DEFAULT_SIGMA_FLOOR};
use crate::{Error, Result};

/// One-hot label matrix stored as per-sample cluster indices plus column sums.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    labels: Vec<usize>,
    counts: Vec<usize>,
}

impl Assignment {
    pub fn new(labels: Vec<usize>, k: usize) -> Result<Self> {
        let mut counts = vec![0; k];
        for (i, &l) in labels.iter().enumerate() {
            if l >= k {
                return Err(Error::invalid_argument(alloc::format!(
                    "label {l} of sample {i} is not below K = {k}"
                )));
            }
            counts[l] += 1;
        }
        Ok(Assignment { labels, counts })
    }

    #[inline]
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    #[inline]
    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    #[inline]
    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn n_samples(&self) -> usize {
        self.labels.len()
    }

    pub fn n_clusters(&self) -> usize {
        self.counts.len()
    }

    pub fn has_empty_cluster(&self) -> bool {
        self.counts.contains(&0)
    }

    /// Moves sample `i` to cluster `to`, keeping counts in sync.
    pub fn reassign(&mut self, i: usize, to: usize) {
        let from = self.labels[i];
        self.counts[from] -= 1;
        self.counts[to] += 1;
        self.labels[i] = to;
    }

    pub fn to_matrix(&self) -> Matrix {
        Matrix::one_hot(&self.labels, self.counts.len())
    }

    pub fn into_labels(self) -> Vec<usize> {
        self.labels
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitStrategy {
    /// Seeded random permutation dealt round-robin into the K clusters.
    RandomBalanced,
    /// k-means++ seeding on `D`, every sample joins its nearest seed.
    KmeansPP,
    /// k-means++ seeding on `D`, then clusters grow from the seeds by
    /// repeatedly attaching the unassigned sample closest to any assigned
    /// one (multi-source Prim order).
    SeededGrowth,
    /// Restarts cycle through seeded growth, k-means++ and random balanced,
    /// so the objective alone decides between their fixed points.
    Mixed,
}

impl InitStrategy {
    pub fn as_str(self) -> &'static str {
        match self {
            InitStrategy::RandomBalanced => "random-balanced",
            InitStrategy::KmeansPP => "kmeans-pp",
            InitStrategy::SeededGrowth => "seeded-growth",
            InitStrategy::Mixed => "mixed",
        }
    }

    /// Concrete strategy used by restart number `restart`.
    pub fn for_restart(self, restart: usize) -> InitStrategy {
        const CYCLE: [InitStrategy; 3] = [
            InitStrategy::SeededGrowth,
            InitStrategy::KmeansPP,
            InitStrategy::RandomBalanced,
        ];
        match self {
            InitStrategy::Mixed => CYCLE[restart % CYCLE.len()],
            other => other,
        }
    }
}

impl core::str::FromStr for InitStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random-balanced" => Ok(InitStrategy::RandomBalanced),
            "kmeans-pp" => Ok(InitStrategy::KmeansPP),
            "seeded-growth" => Ok(InitStrategy::SeededGrowth),
            "mixed" => Ok(InitStrategy::Mixed),
            other => Err(Error::invalid_argument(alloc::format!(
                "unknown init strategy `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Weight of the Schatten term.
    pub alpha: f64,
    pub p: f64,
    pub k: usize,
    pub max_sweeps: usize,
    /// Stop when the objective changes by at most this much between sweeps.
    pub tol: f64,
    pub seed: u64,
    pub init: InitStrategy,
    /// Independent initializations; the lowest final objective wins.
    pub restarts: usize,
    pub repair_empty: bool,
    /// Relative singular-value floor for the gradient's pseudo-inverse.
    pub sigma_floor: f64,
}

impl SolverConfig {
    pub fn new(k: usize, alpha: f64, p: f64) -> Self {
        SolverConfig {
            alpha,
            p,
            k,
            max_sweeps: 100,
            tol: 0.0,
            seed: 0,
            init: InitStrategy::Mixed,
            restarts: 10,
            repair_empty: false,
            sigma_floor: DEFAULT_SIGMA_FLOOR,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::invalid_argument("need at least K = 2 clusters"));
        }
        if self.max_sweeps == 0 {
            return Err(Error::invalid_argument("max_sweeps must be at least 1"));
        }
        if self.restarts == 0 {
            return Err(Error::invalid_argument("restarts must be at least 1"));
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::invalid_argument("alpha must be finite and nonnegative"));
        }
        if !(self.p > 0.0 && self.p.is_finite()) {
            return Err(Error::invalid_argument("p must be positive"));
        }
        if self.tol.is_nan() || self.tol < 0.0 {
            return Err(Error::invalid_argument("tol must be nonnegative"));
        }
        if self.sigma_floor.is_nan() || self.sigma_floor < 0.0 {
            return Err(Error::invalid_argument("sigma_floor must be nonnegative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SolveTrace {
    /// Objective of the initial labels, before the first sweep.
    pub initial_objective: f64,
    /// Objective after each sweep.
    pub objective_per_sweep: Vec<f64>,
    /// Labels moved in each sweep (repairs excluded).
    pub changes_per_sweep: Vec<usize>,
    pub sweeps_run: usize,
    pub converged: bool,
    /// Empty clusters observed at the end of sweeps, summed over sweeps.
    pub empty_cluster_events: usize,
    /// Every entry of `D` is zero (all samples identical).
    pub degenerate_distances: bool,
    /// Which restart produced the returned labels.
    pub restart: usize,
}

impl SolveTrace {
    pub fn final_objective(&self) -> f64 {
        self.objective_per_sweep
            .last()
            .copied()
            .unwrap_or(self.initial_objective)
    }
}

/// `Σ_{i,l} D[i][l]·[same cluster]`, i.e. `tr(GᵀDG)` for one-hot `G`.
pub fn within_cluster_sum(d: &DistanceMatrix, g: &Assignment) -> f64 {
    let labels = g.labels();
    let mut total = 0.0;
    for i in 0..d.n() {
        let li = labels[i];
        total += d
            .row(i)
            .iter()
            .zip(labels)
            .filter(|(_, &l)| l == li)
            .map(|(v, _)| v)
            .sum::<f64>();
    }
    total
}

/// `tr(GᵀDG) − α Σⱼ nⱼ^{p/2}`.
pub fn objective(d: &DistanceMatrix, g: &Assignment, alpha: f64, p: f64) -> f64 {
    within_cluster_sum(d, g) - alpha * schatten::one_hot_value(g.counts(), p)
}

/// `tr(GᵀDG P⁻¹)`: each cluster's within sum divided by its size.
pub fn model2_diagnostic(d: &DistanceMatrix, g: &Assignment) -> Result<f64> {
    if let Some(j) = g.counts().iter().position(|&c| c == 0) {
        return Err(Error::invalid_state(alloc::format!("cluster {j} is empty")));
    }
    let mut per_cluster = vec![0.0; g.n_clusters()];
    let labels = g.labels();
    for i in 0..d.n() {
        let li = labels[i];
        per_cluster[li] += d
            .row(i)
            .iter()
            .zip(labels)
            .filter(|(_, &l)| l == li)
            .map(|(v, _)| v)
            .sum::<f64>();
    }
    Ok(per_cluster.iter().zip(g.counts()).map(|(s, &n)| s / n as f64).sum())
}

/// Per-cluster sums `Σ_l D[l][i]·[label(l) = j]`.
fn cluster_sums(d: &DistanceMatrix, g: &Assignment, i: usize, out: &mut [f64]) {
    out.fill(0.0);
    for (v, &l) in d.row(i).iter().zip(g.labels()) {
        out[l] += v;
    }
}

/// Best cluster for sample `i` under the linearized objective; ties go to the smallest index.
pub fn row_update(d: &DistanceMatrix, g: &Assignment, f: &GradientMatrix, alpha: f64, i: usize) -> usize {
    let mut sums = vec![0.0; g.n_clusters()];
    best_cluster(d, g, f, alpha, i, &mut sums)
}

fn best_cluster(
    d: &DistanceMatrix,
    g: &Assignment,
    f: &GradientMatrix,
    alpha: f64,
    i: usize,
    sums: &mut [f64],
) -> usize {
    cluster_sums(d, g, i, sums);
    let fi = f.row(i);
    let mut best = 0;
    let mut best_score = f64::INFINITY;
    for (j, (&s, &fij)) in sums.iter().zip(fi).enumerate() {
        let score = 2.0 * s - alpha * fij;
        if score < best_score {
            best_score = score;
            best = j;
        }
    }
    best
}

/// Picks from `0..weights.len()` with probability proportional to `weights`,
/// uniformly among `fallback` candidates when all weights are zero.
fn sample_weighted(weights: &[f64], rng: &mut rng::Rng, fallback: &[usize]) -> usize {
    let total: f64 = weights.iter().sum();
    if total > 0.0 {
        let mut target = rng.random::<f64>() * total;
        for (i, &w) in weights.iter().enumerate() {
            if w > 0.0 {
                if target < w {
                    return i;
                }
                target -= w;
            }
        }
        // rounding fell off the end: last positive weight
        return weights.iter().rposition(|&w| w > 0.0).unwrap();
    }
    fallback[rng.random_range(0..fallback.len())]
}

/// k-means++ seeding with `D` entries as the squared distances.
pub fn kmeans_pp_seeds(d: &DistanceMatrix, k: usize, rng: &mut rng::Rng) -> Vec<usize> {
    let n = d.n();
    let mut seeds = vec![rng.random_range(0..n)];
    let mut closest: Vec<f64> = d.row(seeds[0]).to_vec();
    while seeds.len() < k {
        let free: Vec<usize> = (0..n).filter(|i| !seeds.contains(i)).collect();
        let next = sample_weighted(&closest, rng, &free);
        seeds.push(next);
        for (c, &v) in closest.iter_mut().zip(d.row(next)) {
            *c = c.min(v);
        }
    }
    seeds
}

pub fn init_random_balanced(n: usize, k: usize, rng: &mut rng::Rng) -> Assignment {
    use rand::seq::SliceRandom;
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut labels = vec![0; n];
    for (slot, &i) in perm.iter().enumerate() {
        labels[i] = slot % k;
    }
    Assignment::new(labels, k).expect("labels below k")
}

pub fn init_kmeans_pp(d: &DistanceMatrix, k: usize, rng: &mut rng::Rng) -> Assignment {
    let seeds = kmeans_pp_seeds(d, k, rng);
    let labels = (0..d.n())
        .map(|i| {
            if let Some(j) = seeds.iter().position(|&s| s == i) {
                return j;
            }
            let row = d.row(i);
            let mut best = 0;
            for j in 1..k {
                if row[seeds[j]] < row[seeds[best]] {
                    best = j;
                }
            }
            best
        })
        .collect();
    Assignment::new(labels, k).expect("labels below k")
}

pub fn init_seeded_growth(d: &DistanceMatrix, k: usize, rng: &mut rng::Rng) -> Assignment {
    let n = d.n();
    let seeds = kmeans_pp_seeds(d, k, rng);
    let mut labels = vec![usize::MAX; n];
    let mut reach = vec![f64::INFINITY; n];
    let mut source = vec![0usize; n];
    for (j, &s) in seeds.iter().enumerate() {
        labels[s] = j;
    }
    let relax = |from: usize, label: usize, labels: &[usize], reach: &mut [f64], source: &mut [usize]| {
        for (l, &v) in d.row(from).iter().enumerate() {
            if labels[l] == usize::MAX && v < reach[l] {
                reach[l] = v;
                source[l] = label;
            }
        }
    };
    for (j, &s) in seeds.iter().enumerate() {
        relax(s, j, &labels, &mut reach, &mut source);
    }
    for _ in k..n {
        let mut next = usize::MAX;
        for i in 0..n {
            if labels[i] == usize::MAX && (next == usize::MAX || reach[i] < reach[next]) {
                next = i;
            }
        }
        labels[next] = source[next];
        relax(next, source[next], &labels, &mut reach, &mut source);
    }
    Assignment::new(labels, k).expect("labels below k")
}

pub fn initialize(d: &DistanceMatrix, k: usize, strategy: InitStrategy, rng: &mut rng::Rng) -> Assignment {
    match strategy {
        InitStrategy::RandomBalanced => init_random_balanced(d.n(), k, rng),
        InitStrategy::KmeansPP => init_kmeans_pp(d, k, rng),
        InitStrategy::SeededGrowth => init_seeded_growth(d, k, rng),
        InitStrategy::Mixed => initialize(d, k, strategy.for_restart(0), rng),
    }
}

/// Fills every empty cluster with the sample of the currently largest
/// cluster that has the largest within-cluster distance sum.
fn repair_empty_clusters(d: &DistanceMatrix, g: &mut Assignment) -> usize {
    let mut moved = 0;
    while let Some(empty) = g.counts().iter().position(|&c| c == 0) {
        let largest = (0..g.n_clusters())
            .max_by_key(|&j| (g.counts()[j], core::cmp::Reverse(j)))
            .unwrap();
        if g.counts()[largest] < 2 {
            break;
        }
        let labels = g.labels();
        let victim = (0..d.n())
            .filter(|&i| labels[i] == largest)
            .map(|i| {
                let s: f64 = d
                    .row(i)
                    .iter()
                    .zip(labels)
                    .filter(|(_, &l)| l == largest)
                    .map(|(v, _)| v)
                    .sum();
                (i, s)
            })
            .fold(
                (usize::MAX, f64::NEG_INFINITY),
                |best, cur| if cur.1 > best.1 { cur } else { best },
            )
            .0;
        g.reassign(victim, empty);
        moved += 1;
    }
    moved
}

/// Runs sweeps from a given starting assignment.
pub fn solve_from(d: &DistanceMatrix, cfg: &SolverConfig, init: Assignment) -> Result<(Assignment, SolveTrace)> {
    cfg.validate()?;
    if init.n_samples() != d.n() || init.n_clusters() != cfg.k {
        return Err(Error::invalid_argument("initial assignment does not match D and K"));
    }
    let mut g = init;
    let mut trace = SolveTrace {
        initial_objective: objective(d, &g, cfg.alpha, cfg.p),
        degenerate_distances: d.max_entry() == 0.0,
        ..SolveTrace::default()
    };
    let mut sums = vec![0.0; cfg.k];
    let mut previous = trace.initial_objective;
    for _ in 0..cfg.max_sweeps {
        let f = schatten::schatten_p_gradient(&g.to_matrix(), cfg.p, cfg.sigma_floor)?;
        let mut changed = 0;
        for i in 0..d.n() {
            let b = best_cluster(d, &g, &f, cfg.alpha, i, &mut sums);
            if b != g.label(i) {
                g.reassign(i, b);
                changed += 1;
            }
        }
        let empties = g.counts().iter().filter(|&&c| c == 0).count();
        trace.empty_cluster_events += empties;
        let repaired = if cfg.repair_empty && empties > 0 {
            repair_empty_clusters(d, &mut g)
        } else {
            0
        };

        let current = objective(d, &g, cfg.alpha, cfg.p);
        trace.objective_per_sweep.push(current);
        trace.changes_per_sweep.push(changed);
        trace.sweeps_run += 1;
        if repaired == 0 && (changed == 0 || libm::fabs(current - previous) <= cfg.tol) {
            trace.converged = true;
            break;
        }
        previous = current;
    }
    Ok((g, trace))
}

/// Full solve: `restarts` initializations drawn from one seeded stream,
/// keeping the run with the lowest final objective (earliest on ties).
pub fn solve(d: &DistanceMatrix, cfg: &SolverConfig) -> Result<(Assignment, SolveTrace)> {
    cfg.validate()?;
    if cfg.k > d.n() {
        return Err(Error::invalid_argument(alloc::format!(
            "K = {} exceeds N = {}",
            cfg.k,
            d.n()
        )));
    }
    if cfg.p > 2.0 {
        log::warn!(
            "p = {} > 2: the Schatten term then favors unbalanced partitions of one-hot labels",
            cfg.p
        );
    }
    let mut rng = rng::seeded(cfg.seed);
    let mut best: Option<(Assignment, SolveTrace)> = None;
    for restart in 0..cfg.restarts {
        let init = initialize(d, cfg.k, cfg.init.for_restart(restart), &mut rng);
        let (g, mut trace) = solve_from(d, cfg, init)?;
        trace.restart = restart;
        let better = best
            .as_ref()
            .is_none_or(|(_, t)| trace.final_objective() < t.final_objective());
        if better {
            best = Some((g, trace));
        }
    }
    Ok(best.expect("at least one restart"))
}
