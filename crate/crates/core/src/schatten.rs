//! Schatten p-norm value `‖G‖ₛₚᵖ = Σ σᵢ(G)ᵖ` and its gradient
//! `F = p U diag(σᵢ^{p−1}) Vᵀ`.
//!
//! Singular values at or below `sigma_floor · σ_max` are treated as zero in
//! the gradient (Moore-Penrose convention), which keeps `F` finite for
//! `p < 1` and at rank-deficient inputs.

use crate::linalg::{svd_thin, Matrix, Svd};
use crate::{Error, Result};

/// Relative singular-value floor used by the solver.
pub const DEFAULT_SIGMA_FLOOR: f64 = 1e-10;

/// Thin SVD factors of a label matrix.
pub type SvdFactors = Svd;

/// `∂‖G‖ₛₚᵖ / ∂G`, same shape as `G`.
pub type GradientMatrix = Matrix;

fn check_p(p: f64) -> Result<()> {
    if p > 0.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid_argument(alloc::format!(
            "Schatten exponent p must be positive, got {p}"
        )))
    }
}

#[inline]
fn pow_or_zero(sigma: f64, p: f64) -> f64 {
    if sigma > 0.0 {
        libm::pow(sigma, p)
    } else {
        0.0
    }
}

pub fn schatten_p_value(g: &Matrix, p: f64) -> Result<f64> {
    check_p(p)?;
    Ok(svd_thin(g).sigma.iter().map(|&s| pow_or_zero(s, p)).sum())
}

/// Closed form for a one-hot indicator with column sums `counts`: `σⱼ = √nⱼ`.
pub fn one_hot_value(counts: &[usize], p: f64) -> f64 {
    counts.iter().map(|&n| pow_or_zero(n as f64, p / 2.0)).sum()
}

pub fn schatten_p_gradient(g: &Matrix, p: f64, sigma_floor: f64) -> Result<GradientMatrix> {
    check_p(p)?;
    let svd = svd_thin(g);
    let sigma_max = svd.sigma.first().copied().unwrap_or(0.0);
    let cutoff = sigma_floor * sigma_max;
    let weights: alloc::vec::Vec<f64> = svd
        .sigma
        .iter()
        .map(|&s| {
            if s > cutoff && s > 0.0 {
                p * libm::pow(s, p - 1.0)
            } else {
                0.0
            }
        })
        .collect();
    let uw = Matrix::from_fn(svd.u.rows(), weights.len(), |i, j| svd.u[(i, j)] * weights[j]);
    Ok(uw.matmul(&svd.v.transpose()))
}

/// `tr(Fᵀ G)`.
pub fn linearized_bonus(f: &GradientMatrix, g: &Matrix) -> Result<f64> {
    if (f.rows(), f.cols()) != (g.rows(), g.cols()) {
        return Err(Error::invalid_argument(alloc::format!(
            "shape mismatch: F is {}x{}, G is {}x{}",
            f.rows(),
            f.cols(),
            g.rows(),
            g.cols()
        )));
    }
    Ok(f.dot(g))
}
