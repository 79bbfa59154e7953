//! Synthetic two-class datasets that are not linearly separable.
//!
//! Both generators lay out `n/2` points per class along a parametric curve,
//! add isotropic Gaussian noise, and shuffle samples with the same seeded
//! generator so that sample order carries no class information.

use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::seq::SliceRandom;
use rand_distr::{Distribution, Normal};

use crate::data::{DataMatrix, LabelVector};
use crate::rng;
use crate::{Error, Result};

pub const DEFAULT_NOISE_STD: f64 = 0.05;
pub const DEFAULT_SPIRAL_TURNS: f64 = 1.5;
/// Radius of both spiral arms at angle zero.
pub const SPIRAL_START_RADIUS: f64 = 0.25;

/// Point of moon `class` (0 upper, 1 lower) at parameter `t ∈ [0, π]`.
///
/// The upper moon is the unit half-circle around the origin, the lower moon
/// is the reflected unit half-circle around `(1, 0.5)`.
pub fn moon_point(class: usize, t: f64) -> [f64; 2] {
    let (c, s) = (libm::cos(t), libm::sin(t));
    if class == 0 {
        [c, s]
    } else {
        [1.0 - c, 0.5 - s]
    }
}

/// Point of spiral arm `class` at angle `theta`. Arm 1 is arm 0 rotated by π.
pub fn spiral_point(class: usize, theta: f64) -> [f64; 2] {
    let r = SPIRAL_START_RADIUS + theta / (2.0 * PI);
    let p = [r * libm::cos(theta), r * libm::sin(theta)];
    if class == 0 {
        p
    } else {
        [-p[0], -p[1]]
    }
}

const SPIRAL_GROWTH: f64 = 1.0 / (2.0 * PI);

/// Arc length of a spiral arm from angle 0 to `theta`.
pub fn spiral_arc_length(theta: f64) -> f64 {
    let b = SPIRAL_GROWTH;
    let primitive = |r: f64| (r * libm::sqrt(r * r + b * b) + b * b * libm::asinh(r / b)) / (2.0 * b);
    primitive(SPIRAL_START_RADIUS + b * theta) - primitive(SPIRAL_START_RADIUS)
}

/// Angle at which a spiral arm has arc length `s`, for `0 ≤ s ≤ spiral_arc_length(theta_max)`.
fn spiral_angle_at(s: f64, theta_max: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, theta_max);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if spiral_arc_length(mid) < s {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn check_size(n_samples: usize, noise_std: f64) -> Result<()> {
    if n_samples < 4 || !n_samples.is_multiple_of(2) {
        return Err(Error::invalid_argument(alloc::format!(
            "n_samples must be even and at least 4, got {n_samples}"
        )));
    }
    if !(noise_std >= 0.0 && noise_std.is_finite()) {
        return Err(Error::invalid_argument("noise_std must be finite and nonnegative"));
    }
    Ok(())
}

fn assemble(
    n_samples: usize,
    noise_std: f64,
    seed: u64,
    curve: impl Fn(usize, usize) -> [f64; 2],
) -> Result<(DataMatrix, LabelVector)> {
    let half = n_samples / 2;
    let mut rng = rng::seeded(seed);
    let noise = Normal::new(0.0, noise_std).expect("validated std");

    let mut points = Vec::with_capacity(n_samples);
    for class in 0..2 {
        for k in 0..half {
            let [x, y] = curve(class, k);
            let (dx, dy) = if noise_std > 0.0 {
                (noise.sample(&mut rng), noise.sample(&mut rng))
            } else {
                (0.0, 0.0)
            };
            points.push(([x + dx, y + dy], class));
        }
    }
    points.shuffle(&mut rng);

    let mut values = Vec::with_capacity(2 * n_samples);
    let mut labels = Vec::with_capacity(n_samples);
    for ([x, y], class) in points {
        values.push(x);
        values.push(y);
        labels.push(class);
    }
    Ok((DataMatrix::new(values, n_samples, 2)?, LabelVector::new(labels)))
}

/// Two interleaving half-circles.
pub fn two_moon(n_samples: usize, noise_std: f64, seed: u64) -> Result<(DataMatrix, LabelVector)> {
    check_size(n_samples, noise_std)?;
    let half = n_samples / 2;
    let step = PI / (half - 1) as f64;
    assemble(n_samples, noise_std, seed, |class, k| {
        moon_point(class, k as f64 * step)
    })
}

/// Two interleaved Archimedean spirals over `turns` full rotations.
///
/// Points are spaced evenly in arc length rather than angle, so the outer
/// turn is as dense as the inner one and neighbourhood graphs stay on their
/// own arm.
pub fn two_spiral(n_samples: usize, turns: f64, noise_std: f64, seed: u64) -> Result<(DataMatrix, LabelVector)> {
    check_size(n_samples, noise_std)?;
    if !(turns > 0.0 && turns.is_finite()) {
        return Err(Error::invalid_argument("turns must be positive"));
    }
    let half = n_samples / 2;
    let theta_max = 2.0 * PI * turns;
    let step = spiral_arc_length(theta_max) / (half - 1) as f64;
    let angles: Vec<f64> = (0..half).map(|k| spiral_angle_at(k as f64 * step, theta_max)).collect();
    assemble(n_samples, noise_std, seed, |class, k| spiral_point(class, angles[k]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn on_moon(class: usize, p: &[f64]) -> bool {
        let (cx, cy) = if class == 0 { (0.0, 0.0) } else { (1.0, 0.5) };
        let r = libm::hypot(p[0] - cx, p[1] - cy);
        let above = if class == 0 {
            p[1] >= -1e-12
        } else {
            p[1] <= 0.5 + 1e-12
        };
        (r - 1.0).abs() < 1e-12 && above
    }

    #[test]
    fn moon_sizes_and_labels() {
        let (x, y) = two_moon(400, 0.0, 11).unwrap();
        assert_eq!(x.n_samples(), 400);
        assert_eq!(x.n_features(), 2);
        assert_eq!(y.as_slice().iter().filter(|&&c| c == 0).count(), 200);
        assert_eq!(y.as_slice().iter().filter(|&&c| c == 1).count(), 200);
    }

    #[test]
    fn noiseless_moon_points_lie_on_arcs() {
        let (x, y) = two_moon(4, 0.0, 7).unwrap();
        for (row, &c) in x.rows().zip(y.as_slice()) {
            assert!(on_moon(c, row), "{row:?} not on arc {c}");
        }
        let (x, y) = two_moon(100, 0.0, 3).unwrap();
        for (row, &c) in x.rows().zip(y.as_slice()) {
            assert!(on_moon(c, row));
        }
    }

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(two_moon(400, 0.05, 1).unwrap(), two_moon(400, 0.05, 1).unwrap());
        assert_eq!(
            two_spiral(200, 1.5, 0.02, 5).unwrap(),
            two_spiral(200, 1.5, 0.02, 5).unwrap()
        );
        assert_ne!(two_moon(400, 0.05, 1).unwrap().0, two_moon(400, 0.05, 2).unwrap().0);
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(two_moon(3, 0.0, 0).is_err());
        assert!(two_moon(401, 0.0, 0).is_err());
        assert!(two_moon(2, 0.0, 0).is_err());
        assert!(two_spiral(5, 1.0, 0.0, 0).is_err());
        assert!(two_spiral(4, 0.0, 0.0, 0).is_err());
        assert!(two_moon(4, -1.0, 0).is_err());
    }

    #[test]
    fn arc_length_matches_numerical_integral() {
        let theta = 3.0 * PI;
        let steps = 100_000;
        let h = theta / steps as f64;
        let speed = |t: f64| libm::hypot(SPIRAL_START_RADIUS + SPIRAL_GROWTH * t, SPIRAL_GROWTH);
        let integral: f64 = (0..steps).map(|i| h * speed((i as f64 + 0.5) * h)).sum();
        assert!((spiral_arc_length(theta) - integral).abs() < 1e-8);
        assert_eq!(spiral_arc_length(0.0), 0.0);
        let s = spiral_arc_length(2.0);
        assert!((spiral_angle_at(s, theta) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn spiral_split_is_even() {
        let (_, y) = two_spiral(200, 1.5, 0.02, 5).unwrap();
        assert_eq!(y.as_slice().iter().filter(|&&c| c == 0).count(), 100);
    }

    #[test]
    fn noiseless_spiral_radius_is_monotone_in_angle() {
        let (x, y) = two_spiral(400, 1.5, 0.0, 3).unwrap();
        for class in 0..2 {
            // Recover each point's angle along the arm from its radius and
            // check it reproduces the point: radius is a bijection of angle.
            let mut arm: Vec<(f64, [f64; 2])> = x
                .rows()
                .zip(y.as_slice())
                .filter(|(_, &c)| c == class)
                .map(|(r, _)| (libm::hypot(r[0], r[1]), [r[0], r[1]]))
                .collect();
            arm.sort_by(|a, b| a.0.total_cmp(&b.0));
            for (r, p) in &arm {
                let theta = (r - SPIRAL_START_RADIUS) * 2.0 * PI;
                let q = spiral_point(class, theta);
                assert!((q[0] - p[0]).abs() < 1e-9 && (q[1] - p[1]).abs() < 1e-9);
            }
            assert!(arm.windows(2).all(|w| w[0].0 < w[1].0));
        }
    }

    #[test]
    fn four_point_spiral_hits_curve_endpoints() {
        let (x, y) = two_spiral(4, 1.0, 0.0, 0).unwrap();
        let mut arm0: Vec<&[f64]> = x
            .rows()
            .zip(y.as_slice())
            .filter(|(_, &c)| c == 0)
            .map(|(r, _)| r)
            .collect();
        arm0.sort_by(|a, b| libm::hypot(a[0], a[1]).total_cmp(&libm::hypot(b[0], b[1])));
        let start = spiral_point(0, 0.0);
        let end = spiral_point(0, 2.0 * PI);
        assert!((arm0[0][0] - start[0]).abs() < 1e-12 && (arm0[0][1] - start[1]).abs() < 1e-12);
        assert!((arm0[1][0] - end[0]).abs() < 1e-12 && (arm0[1][1] - end[1]).abs() < 1e-12);
    }
}
