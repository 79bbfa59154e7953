//! Lloyd's K-means with k-means++ seeding, plus the two equivalent forms of
//! the within-cluster scatter used to cross-check the pairwise objective.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::data::DataMatrix;
use crate::linalg::Matrix;
use crate::rng;
use crate::solver::Assignment;
use crate::{Error, Result};

/// `K×d` cluster means; row `j` is zero for an empty cluster.
pub type Centroids = Matrix;

#[derive(Debug, Clone)]
pub struct KMeansFit {
    pub assignment: Assignment,
    pub centroids: Centroids,
    /// Within-cluster sum of squares after each Lloyd iteration.
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

#[inline]
fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn centroids(x: &DataMatrix, g: &Assignment) -> Centroids {
    let (k, d) = (g.n_clusters(), x.n_features());
    let mut c = Matrix::zeros(k, d);
    for (row, &j) in x.rows().zip(g.labels()) {
        for (f, v) in row.iter().enumerate() {
            c[(j, f)] += v;
        }
    }
    for (j, &n) in g.counts().iter().enumerate() {
        if n > 0 {
            for f in 0..d {
                c[(j, f)] /= n as f64;
            }
        }
    }
    c
}

/// `Σ_i ‖x_i − u_{label(i)}‖²`.
pub fn kmeans_objective(x: &DataMatrix, g: &Assignment) -> f64 {
    let c = centroids(x, g);
    x.rows().zip(g.labels()).map(|(row, &j)| sq_dist(row, c.row(j))).sum()
}

/// `Σ_{i,l} ‖x_i − x_l‖² m_{il}` with `m_{il} = [same cluster] / n_j`,
/// summed cluster by cluster without forming the `N×N` matrix `M`.
pub fn manifold_objective(x: &DataMatrix, g: &Assignment) -> Result<f64> {
    if let Some(j) = g.counts().iter().position(|&c| c == 0) {
        return Err(Error::invalid_state(alloc::format!("cluster {j} is empty")));
    }
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); g.n_clusters()];
    for (i, &j) in g.labels().iter().enumerate() {
        members[j].push(i);
    }
    let mut total = 0.0;
    for idx in &members {
        let mut pair_sum = 0.0;
        for (a, &i) in idx.iter().enumerate() {
            for &l in &idx[a + 1..] {
                pair_sum += sq_dist(x.row(i), x.row(l));
            }
        }
        // ordered pairs count each unordered pair twice
        total += 2.0 * pair_sum / idx.len() as f64;
    }
    Ok(total)
}

fn kmeans_pp(x: &DataMatrix, k: usize, rng: &mut rng::Rng) -> Vec<usize> {
    let n = x.n_samples();
    let mut seeds = vec![rng.random_range(0..n)];
    let mut closest: Vec<f64> = x.rows().map(|r| sq_dist(r, x.row(seeds[0]))).collect();
    while seeds.len() < k {
        let total: f64 = closest.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut pick = closest.iter().rposition(|&w| w > 0.0).unwrap();
            for (i, &w) in closest.iter().enumerate() {
                if w > 0.0 && target < w {
                    pick = i;
                    break;
                }
                target -= w;
            }
            pick
        } else {
            let free: Vec<usize> = (0..n).filter(|i| !seeds.contains(i)).collect();
            free[rng.random_range(0..free.len())]
        };
        seeds.push(next);
        for (c, row) in closest.iter_mut().zip(x.rows()) {
            *c = c.min(sq_dist(row, x.row(next)));
        }
    }
    seeds
}

fn nearest(row: &[f64], c: &Centroids) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for j in 0..c.rows() {
        let d = sq_dist(row, c.row(j));
        if d < best_d {
            best_d = d;
            best = j;
        }
    }
    best
}

pub fn kmeans(x: &DataMatrix, k: usize, seed: u64, max_iters: usize) -> Result<KMeansFit> {
    let n = x.n_samples();
    if k == 0 || k > n {
        return Err(Error::invalid_argument(alloc::format!(
            "K = {k} must lie in [1, N = {n}]"
        )));
    }
    if max_iters == 0 {
        return Err(Error::invalid_argument("max_iters must be at least 1"));
    }
    let mut rng = rng::seeded(seed);
    let seeds = kmeans_pp(x, k, &mut rng);
    let mut c = Matrix::from_fn(k, x.n_features(), |j, f| x.row(seeds[j])[f]);
    let mut labels: Vec<usize> = x.rows().map(|r| nearest(r, &c)).collect();
    // seeds keep their own cluster even when duplicated points tie
    for (j, &s) in seeds.iter().enumerate() {
        labels[s] = j;
    }
    let mut g = Assignment::new(labels, k)?;
    let mut trace = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    while iterations < max_iters {
        iterations += 1;
        c = centroids(x, &g);
        while let Some(empty) = g.counts().iter().position(|&cnt| cnt == 0) {
            let far = (0..n)
                .filter(|&i| g.counts()[g.label(i)] > 1)
                .map(|i| (i, sq_dist(x.row(i), c.row(g.label(i)))))
                .fold((usize::MAX, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best })
                .0;
            if far == usize::MAX {
                break;
            }
            g.reassign(far, empty);
            c = centroids(x, &g);
        }
        trace.push(kmeans_objective(x, &g));

        let mut changed = false;
        for i in 0..n {
            let j = nearest(x.row(i), &c);
            if j != g.label(i) {
                g.reassign(i, j);
                changed = true;
            }
        }
        if !changed {
            converged = true;
            break;
        }
    }
    let centroids = centroids(x, &g);
    Ok(KMeansFit {
        assignment: g,
        centroids,
        objective_trace: trace,
        iterations,
        converged,
    })
}
