//! Pairwise distance matrices.
//!
//! Three kernels are provided: plain squared Euclidean, a KNN-masked
//! variant that replaces every non-neighbor entry with a constant penalty,
//! and squared geodesic (shortest-path) distance over the symmetrized KNN
//! graph. All outputs are exactly symmetric with a zero diagonal.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::data::DataMatrix;
use crate::{Error, Result};

/// Disconnected geodesic pairs get this multiple of the largest finite squared geodesic.
pub const GEODESIC_DISCONNECT_FACTOR: f64 = 4.0;
pub const DEFAULT_PENALTY_FACTOR: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistanceKernel {
    SquaredEuclidean,
    KnnMasked,
    KnnGeodesic,
}

impl DistanceKernel {
    pub fn as_str(self) -> &'static str {
        match self {
            DistanceKernel::SquaredEuclidean => "euclidean",
            DistanceKernel::KnnMasked => "knn-masked",
            DistanceKernel::KnnGeodesic => "knn-geodesic",
        }
    }
}

impl core::str::FromStr for DistanceKernel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclidean" | "squared-euclidean" => Ok(DistanceKernel::SquaredEuclidean),
            "knn-masked" => Ok(DistanceKernel::KnnMasked),
            "knn-geodesic" => Ok(DistanceKernel::KnnGeodesic),
            other => Err(Error::invalid_argument(alloc::format!("unknown kernel `{other}`"))),
        }
    }
}

/// Symmetric `N×N` matrix of nonnegative dissimilarities, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    values: Vec<f64>,
    n: usize,
    kernel: DistanceKernel,
    knn_c: Option<usize>,
    penalty_factor: Option<f64>,
    normalized: bool,
}

impl DistanceMatrix {
    /// Wraps precomputed values, checking symmetry, zero diagonal and nonnegativity.
    pub fn from_values(values: Vec<f64>, n: usize) -> Result<Self> {
        if values.len() != n * n {
            return Err(Error::invalid_argument("distance values must be N*N"));
        }
        for i in 0..n {
            if values[i * n + i] != 0.0 {
                return Err(Error::invalid_argument(alloc::format!("nonzero diagonal at {i}")));
            }
            for l in 0..i {
                let v = values[i * n + l];
                if !(v.is_finite() && v >= 0.0) {
                    return Err(Error::invalid_argument(alloc::format!("entry ({i},{l}) is {v}")));
                }
                if v != values[l * n + i] {
                    return Err(Error::invalid_argument(alloc::format!("asymmetric at ({i},{l})")));
                }
            }
        }
        Ok(DistanceMatrix {
            values,
            n,
            kernel: DistanceKernel::SquaredEuclidean,
            knn_c: None,
            penalty_factor: None,
            normalized: false,
        })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, l: usize) -> f64 {
        self.values[i * self.n + l]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn kernel(&self) -> DistanceKernel {
        self.kernel
    }

    pub fn knn_c(&self) -> Option<usize> {
        self.knn_c
    }

    pub fn penalty_factor(&self) -> Option<f64> {
        self.penalty_factor
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn max_entry(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Matrix with rows and columns reordered by `order` (new index `r` is old `order[r]`).
    pub fn permuted(&self, order: &[usize]) -> DistanceMatrix {
        let n = self.n;
        let mut values = vec![0.0; n * n];
        for (r, &i) in order.iter().enumerate() {
            for (s, &l) in order.iter().enumerate() {
                values[r * n + s] = self.get(i, l);
            }
        }
        DistanceMatrix { values, ..self.clone() }
    }
}

/// Fills an `n×n` buffer one row at a time. Rows are independent, so with
/// the `parallel` feature they are distributed over the rayon pool.
fn fill_rows<F>(n: usize, f: F) -> Vec<f64>
where
    F: Fn(usize, &mut [f64]) + Sync + Send,
{
    let mut values = vec![0.0; n * n];
    if n == 0 {
        return values;
    }
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        values.par_chunks_mut(n).enumerate().for_each(|(i, row)| f(i, row));
    }
    #[cfg(not(feature = "parallel"))]
    {
        values.chunks_mut(n).enumerate().for_each(|(i, row)| f(i, row));
    }
    values
}

#[inline]
fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Mirrors the upper triangle into the lower one so symmetry is exact.
fn symmetrize_from_upper(values: &mut [f64], n: usize) {
    for i in 0..n {
        values[i * n + i] = 0.0;
        for l in 0..i {
            values[i * n + l] = values[l * n + i];
        }
    }
}

pub fn squared_euclidean(x: &DataMatrix) -> DistanceMatrix {
    let n = x.n_samples();
    let mut values = fill_rows(n, |i, row| {
        let xi = x.row(i);
        for (l, slot) in row.iter_mut().enumerate().skip(i + 1) {
            *slot = sq_dist(xi, x.row(l));
        }
    });
    symmetrize_from_upper(&mut values, n);
    DistanceMatrix {
        values,
        n,
        kernel: DistanceKernel::SquaredEuclidean,
        knn_c: None,
        penalty_factor: None,
        normalized: false,
    }
}

fn check_c(n: usize, c: usize) -> Result<()> {
    if c == 0 || c + 1 > n {
        return Err(Error::invalid_argument(alloc::format!(
            "KNN parameter C must lie in [1, N-1] = [1, {}], got {c}",
            n.saturating_sub(1)
        )));
    }
    Ok(())
}

/// The `c` nearest neighbors of every sample under `sq`, ties broken by smaller index.
pub fn knn_lists(sq: &DistanceMatrix, c: usize) -> Result<Vec<Vec<usize>>> {
    let n = sq.n();
    check_c(n, c)?;
    let lists = (0..n)
        .map(|i| {
            let row = sq.row(i);
            let mut others: Vec<usize> = (0..n).filter(|&l| l != i).collect();
            others.sort_by(|&a, &b| row[a].total_cmp(&row[b]).then(a.cmp(&b)));
            others.truncate(c);
            others
        })
        .collect();
    Ok(lists)
}

/// Symmetrized KNN adjacency: `(i, l)` is an edge iff either is among the other's `c` nearest.
fn knn_adjacency(sq: &DistanceMatrix, c: usize) -> Result<Vec<bool>> {
    let n = sq.n();
    let lists = knn_lists(sq, c)?;
    let mut adj = vec![false; n * n];
    for (i, list) in lists.iter().enumerate() {
        for &l in list {
            adj[i * n + l] = true;
            adj[l * n + i] = true;
        }
    }
    Ok(adj)
}

/// Squared Euclidean distances on KNN edges; every other off-diagonal pair
/// gets `penalty_factor` times the largest kept entry.
pub fn knn_masked(x: &DataMatrix, c: usize, penalty_factor: f64) -> Result<DistanceMatrix> {
    if !(penalty_factor > 0.0 && penalty_factor.is_finite()) {
        return Err(Error::invalid_argument("penalty_factor must be positive"));
    }
    let mut d = squared_euclidean(x);
    let n = d.n;
    let adj = knn_adjacency(&d, c)?;
    let max_kept = d
        .values
        .iter()
        .zip(&adj)
        .filter(|(_, &kept)| kept)
        .map(|(&v, _)| v)
        .fold(0.0, f64::max);
    let penalty = penalty_factor * max_kept;
    for i in 0..n {
        for l in 0..n {
            if i != l && !adj[i * n + l] {
                d.values[i * n + l] = penalty;
            }
        }
    }
    d.kernel = DistanceKernel::KnnMasked;
    d.knn_c = Some(c);
    d.penalty_factor = Some(penalty_factor);
    Ok(d)
}

#[derive(Clone, Copy, PartialEq)]
struct Frontier {
    dist: f64,
    node: usize,
}

impl Eq for Frontier {}

impl Ord for Frontier {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on distance
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn dijkstra(adj: &[Vec<(usize, f64)>], source: usize, out: &mut [f64]) {
    out.fill(f64::INFINITY);
    out[source] = 0.0;
    let mut heap = BinaryHeap::new();
    heap.push(Frontier {
        dist: 0.0,
        node: source,
    });
    while let Some(Frontier { dist, node }) = heap.pop() {
        if dist > out[node] {
            continue;
        }
        for &(next, w) in &adj[node] {
            let cand = dist + w;
            if cand < out[next] {
                out[next] = cand;
                heap.push(Frontier { dist: cand, node: next });
            }
        }
    }
}

/// Squared shortest-path lengths over the symmetrized KNN graph with
/// Euclidean edge weights.
pub fn knn_geodesic(x: &DataMatrix, c: usize) -> Result<DistanceMatrix> {
    let sq = squared_euclidean(x);
    let n = sq.n;
    let mask = knn_adjacency(&sq, c)?;
    let adj: Vec<Vec<(usize, f64)>> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&l| mask[i * n + l])
                .map(|l| (l, libm::sqrt(sq.get(i, l))))
                .collect()
        })
        .collect();

    let mut values = fill_rows(n, |i, row| {
        dijkstra(&adj, i, row);
        for v in row.iter_mut() {
            *v *= *v;
        }
    });
    symmetrize_from_upper(&mut values, n);

    let max_finite = values.iter().copied().filter(|v| v.is_finite()).fold(0.0, f64::max);
    let penalty = GEODESIC_DISCONNECT_FACTOR * max_finite;
    for v in values.iter_mut() {
        if !v.is_finite() {
            *v = penalty;
        }
    }
    Ok(DistanceMatrix {
        values,
        n,
        kernel: DistanceKernel::KnnGeodesic,
        knn_c: Some(c),
        penalty_factor: None,
        normalized: false,
    })
}

/// Divides every entry by the largest one.
pub fn normalize(d: &DistanceMatrix) -> Result<DistanceMatrix> {
    let max = d.max_entry();
    if max <= 0.0 {
        return Err(Error::invalid_argument("cannot normalize an all-zero distance matrix"));
    }
    let mut out = d.clone();
    for v in out.values.iter_mut() {
        *v /= max;
    }
    out.normalized = true;
    Ok(out)
}

/// Kernel choice plus its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    pub kernel: DistanceKernel,
    pub c: usize,
    pub penalty_factor: f64,
    pub normalize: bool,
}

impl KernelSpec {
    pub fn build(&self, x: &DataMatrix) -> Result<DistanceMatrix> {
        let d = match self.kernel {
            DistanceKernel::SquaredEuclidean => squared_euclidean(x),
            DistanceKernel::KnnMasked => knn_masked(x, self.c, self.penalty_factor)?,
            DistanceKernel::KnnGeodesic => knn_geodesic(x, self.c)?,
        };
        if self.normalize {
            normalize(&d)
        } else {
            Ok(d)
        }
    }
}
