//! Dense matrices and a thin SVD by one-sided Jacobi rotations.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Panics if `data.len() != rows * cols`.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length");
        Matrix { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Dense one-hot indicator with `labels.len()` rows and `k` columns.
    pub fn one_hot(labels: &[usize], k: usize) -> Self {
        let mut m = Matrix::zeros(labels.len(), k);
        for (i, &j) in labels.iter().enumerate() {
            m[(i, j)] = 1.0;
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "matmul shape");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs[(k, j)];
                }
            }
        }
        out
    }

    pub fn scale(&self, c: f64) -> Matrix {
        Matrix {
            data: self.data.iter().map(|v| v * c).collect(),
            ..self.clone()
        }
    }

    /// Frobenius inner product `tr(selfᵀ other)`.
    pub fn dot(&self, other: &Matrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "dot shape");
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "diff shape");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| libm::fabs(a - b))
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    fn from_columns(rows: usize, cols: &[Vec<f64>]) -> Matrix {
        Matrix::from_fn(rows, cols.len(), |i, j| cols[j][i])
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Thin singular value decomposition `A = U diag(sigma) Vᵀ`.
///
/// For an `m×n` input with `r = min(m, n)`: `u` is `m×r`, `v` is `n×r`,
/// both with orthonormal columns, and `sigma` is nonincreasing.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: Matrix,
    pub sigma: Vec<f64>,
    pub v: Matrix,
}

impl Svd {
    pub fn reconstruct(&self) -> Matrix {
        let us = Matrix::from_fn(self.u.rows(), self.sigma.len(), |i, j| self.u[(i, j)] * self.sigma[j]);
        us.matmul(&self.v.transpose())
    }
}

const MAX_SWEEPS: usize = 80;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}

/// Completes `cols` (some entries `None`) to an orthonormal set by
/// Gram-Schmidt against the standard basis.
fn complete_orthonormal(dim: usize, cols: &mut [Option<Vec<f64>>]) {
    let mut basis = 0;
    for slot in 0..cols.len() {
        if cols[slot].is_some() {
            continue;
        }
        while basis < dim {
            let mut cand = vec![0.0; dim];
            cand[basis] = 1.0;
            basis += 1;
            // two passes of classical Gram-Schmidt for stability
            for _ in 0..2 {
                for other in cols.iter().flatten() {
                    let proj = dot(&cand, other);
                    cand.iter_mut().zip(other).for_each(|(c, o)| *c -= proj * o);
                }
            }
            let nrm = norm(&cand);
            if nrm > 1e-6 {
                cand.iter_mut().for_each(|c| *c /= nrm);
                cols[slot] = Some(cand);
                break;
            }
        }
    }
}

/// One-sided Jacobi SVD for `m >= n` (Hestenes' method).
fn jacobi_tall(a: &Matrix) -> Svd {
    let (m, n) = (a.rows(), a.cols());
    let mut w: Vec<Vec<f64>> = (0..n).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            e
        })
        .collect();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = dot(&w[p], &w[p]);
                let beta = dot(&w[q], &w[q]);
                let gamma = dot(&w[p], &w[q]);
                if gamma == 0.0 || libm::fabs(gamma) <= f64::EPSILON * libm::sqrt(alpha * beta) {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = libm::copysign(1.0, zeta) / (libm::fabs(zeta) + libm::sqrt(1.0 + zeta * zeta));
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = c * t;
                for (cols, len) in [(&mut w, m), (&mut v, n)] {
                    let (lo, hi) = cols.split_at_mut(q);
                    let (cp, cq) = (&mut lo[p], &mut hi[0]);
                    for i in 0..len {
                        let (x, y) = (cp[i], cq[i]);
                        cp[i] = c * x - s * y;
                        cq[i] = s * x + c * y;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<(f64, usize)> = w.iter().enumerate().map(|(j, col)| (norm(col), j)).collect();
    order.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let sigma_max = order.first().map_or(0.0, |o| o.0);
    let negligible = sigma_max * f64::EPSILON * (m.max(n) as f64);

    let mut sigma = Vec::with_capacity(n);
    let mut u_cols: Vec<Option<Vec<f64>>> = Vec::with_capacity(n);
    let mut v_cols = Vec::with_capacity(n);
    for &(s, j) in &order {
        if s > negligible && s > 0.0 {
            sigma.push(s);
            u_cols.push(Some(w[j].iter().map(|x| x / s).collect()));
        } else {
            sigma.push(0.0);
            u_cols.push(None);
        }
        v_cols.push(v[j].clone());
    }
    complete_orthonormal(m, &mut u_cols);
    let u_cols: Vec<Vec<f64>> = u_cols.into_iter().map(|c| c.expect("completed")).collect();
    Svd {
        u: Matrix::from_columns(m, &u_cols),
        sigma,
        v: Matrix::from_columns(n, &v_cols),
    }
}

pub fn svd_thin(a: &Matrix) -> Svd {
    if a.rows() >= a.cols() {
        jacobi_tall(a)
    } else {
        let t = jacobi_tall(&a.transpose());
        Svd {
            u: t.v,
            sigma: t.sigma,
            v: t.u,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn random(rows: usize, cols: usize, seed: u64) -> Matrix {
        let mut rng = crate::rng::seeded(seed);
        Matrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
    }

    fn check(a: &Matrix) {
        let svd = svd_thin(a);
        let r = a.rows().min(a.cols());
        assert_eq!(svd.sigma.len(), r);
        assert!(svd.sigma.windows(2).all(|w| w[0] >= w[1]));
        assert!(svd.sigma.iter().all(|&s| s >= 0.0));
        assert!(svd.u.transpose().matmul(&svd.u).max_abs_diff(&Matrix::identity(r)) <= 1e-8);
        assert!(svd.v.transpose().matmul(&svd.v).max_abs_diff(&Matrix::identity(r)) <= 1e-8);
        assert!(svd.reconstruct().max_abs_diff(a) <= 1e-8);
    }

    #[test]
    fn random_shapes() {
        for (seed, (m, n)) in [(8, 3), (3, 8), (5, 5), (40, 4), (1, 3), (3, 1)]
            .into_iter()
            .enumerate()
        {
            check(&random(m, n, seed as u64));
        }
    }

    #[test]
    fn rank_deficient_and_zero() {
        check(&Matrix::zeros(4, 3));
        check(&Matrix::one_hot(&[0, 0, 2, 2, 0], 3));
        let svd = svd_thin(&Matrix::one_hot(&[0, 0, 1, 1], 2));
        assert!((svd.sigma[0] - libm::sqrt(2.0)).abs() < 1e-14);
        assert!((svd.sigma[1] - libm::sqrt(2.0)).abs() < 1e-14);
    }

    #[test]
    fn diagonal_input() {
        let a = Matrix::from_row_major(2, 2, vec![3.0, 0.0, 0.0, 0.0]);
        let svd = svd_thin(&a);
        assert_eq!(svd.sigma, vec![3.0, 0.0]);
        check(&a);
    }
}
