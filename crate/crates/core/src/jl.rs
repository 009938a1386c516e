//! Random Gaussian projection preserving dot products between unit-ball
//! points and unit normals.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::dot;
use crate::sampling::sample_gaussian;

/// Constant in `k = ceil(C * ln n / eps^2)`; smallest power of two that
/// passes the Monte-Carlo dot-product check at eps in {0.1, 0.2}.
pub const JL_DIM_CONSTANT: f64 = 8.0;

/// Target dimension preserving dot products among `n` vectors to within
/// `eps`, with the documented constant.
pub fn required_dim(n: usize, eps: f64) -> Result<usize> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 vectors, got {n}"
        )));
    }
    if !(0.0 < eps && eps < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "eps must be in (0,1), got {eps}"
        )));
    }
    let k = (JL_DIM_CONSTANT * (n as f64).ln() / (eps * eps)).ceil() as usize;
    Ok(k.max(1))
}

/// A k x d random projection with entries i.i.d. N(0, 1/k), so expected
/// squared norms are preserved.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JlMap {
    k: usize,
    d: usize,
    /// Row-major k x d matrix.
    m: Vec<Vec<f64>>,
}

impl JlMap {
    pub fn new<R: Rng>(d: usize, k: usize, rng: &mut R) -> Result<Self> {
        if d == 0 || k == 0 {
            return Err(Error::InvalidParameter(
                "source and target dimensions must be >= 1".into(),
            ));
        }
        let scale = 1.0 / (k as f64).sqrt();
        let m = (0..k)
            .map(|_| (0..d).map(|_| sample_gaussian(rng) * scale).collect())
            .collect();
        Ok(Self { k, d, m })
    }

    pub fn source_dim(&self) -> usize {
        self.d
    }

    pub fn target_dim(&self) -> usize {
        self.k
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.m
    }

    /// Matrix-vector product; exactly linear up to float rounding.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got: x.len(),
            });
        }
        Ok(self.m.iter().map(|row| dot(row, x)).collect())
    }
}

/// Fraction of pairs (x, t) whose projected dot product drifts from the
/// original by more than `eps`.
pub fn check_dot_products(
    f: &JlMap,
    points: &[Vec<f64>],
    normals: &[Vec<f64>],
    eps: f64,
) -> Result<f64> {
    if points.is_empty() || normals.is_empty() {
        return Ok(0.0);
    }
    let proj_points: Vec<Vec<f64>> = points
        .iter()
        .map(|x| f.apply(x))
        .collect::<Result<_>>()?;
    let proj_normals: Vec<Vec<f64>> = normals
        .iter()
        .map(|t| f.apply(t))
        .collect::<Result<_>>()?;
    let mut failures = 0usize;
    let total = points.len() * normals.len();
    for (x, fx) in points.iter().zip(&proj_points) {
        for (t, ft) in normals.iter().zip(&proj_normals) {
            if (dot(ft, fx) - dot(t, x)).abs() > eps {
                failures += 1;
            }
        }
    }
    Ok(failures as f64 / total as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{add, norm, scale};
    use crate::sampling::{sample_unit_ball, sample_unit_sphere, RngSeed};

    #[test]
    fn required_dim_examples() {
        assert!(required_dim(2, 0.99).unwrap() >= 1);
        assert_eq!(required_dim(100, 0.2).unwrap(), 922);
        // nonincreasing in eps
        let mut prev = usize::MAX;
        for eps in [0.1, 0.2, 0.4, 0.8] {
            let k = required_dim(50, eps).unwrap();
            assert!(k <= prev);
            prev = k;
        }
        assert!(required_dim(100, 1.5).is_err());
        assert!(required_dim(1, 0.5).is_err());
    }

    #[test]
    fn shape_and_determinism() {
        let mut rng = RngSeed::new(5, 0).rng();
        let f = JlMap::new(10, 4, &mut rng).unwrap();
        assert_eq!(f.matrix().len(), 4);
        assert_eq!(f.matrix()[0].len(), 10);
        let g = JlMap::new(10, 4, &mut RngSeed::new(5, 0).rng()).unwrap();
        assert_eq!(f.matrix(), g.matrix());
    }

    #[test]
    fn apply_zero_and_linearity() {
        let mut rng = RngSeed::new(6, 0).rng();
        let f = JlMap::new(6, 3, &mut rng).unwrap();
        let zero = vec![0.0; 6];
        assert!(f.apply(&zero).unwrap().iter().all(|v| *v == 0.0));
        for _ in 0..20 {
            let x = sample_unit_ball(6, &mut rng).unwrap();
            let y = sample_unit_ball(6, &mut rng).unwrap();
            let (a, b) = (0.3, -1.7);
            let lhs = f.apply(&add(&scale(&x, a), &scale(&y, b))).unwrap();
            let rhs = add(&scale(&f.apply(&x).unwrap(), a), &scale(&f.apply(&y).unwrap(), b));
            assert!(norm(&crate::geometry::sub(&lhs, &rhs)) <= 1e-10);
        }
        assert!(f.apply(&[1.0]).is_err());
    }

    #[test]
    fn norm_preserved_in_expectation() {
        // E||f(x)||^2 = ||x||^2 over fresh maps.
        let x = {
            let mut rng = RngSeed::new(7, 0).rng();
            sample_unit_sphere(8, &mut rng).unwrap()
        };
        let mut total = 0.0;
        for s in 0..1000u64 {
            let mut rng = RngSeed::new(8, s).rng();
            let f = JlMap::new(8, 16, &mut rng).unwrap();
            let fx = f.apply(&x).unwrap();
            total += dot(&fx, &fx);
        }
        let ratio = total / 1000.0;
        assert!((ratio - 1.0).abs() < 0.05, "mean squared-norm ratio {ratio}");
    }

    #[test]
    fn dot_check_edge_cases() {
        let mut rng = RngSeed::new(9, 0).rng();
        let f = JlMap::new(5, 40, &mut rng).unwrap();
        let points: Vec<Vec<f64>> = (0..20)
            .map(|_| sample_unit_ball(5, &mut rng).unwrap())
            .collect();
        assert_eq!(check_dot_products(&f, &points, &[], 0.1).unwrap(), 0.0);
        let normals: Vec<Vec<f64>> = (0..5)
            .map(|_| sample_unit_sphere(5, &mut rng).unwrap())
            .collect();
        // eps = 2 always passes: values bounded near norms <= 1
        assert_eq!(check_dot_products(&f, &points, &normals, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn distortion_monte_carlo_small() {
        // Small-scale version of the acceptance criterion.
        let d = 20;
        let mut data_rng = RngSeed::new(10, 0).rng();
        let points: Vec<Vec<f64>> = (0..50)
            .map(|_| sample_unit_ball(d, &mut data_rng).unwrap())
            .collect();
        let normals: Vec<Vec<f64>> = (0..5)
            .map(|_| sample_unit_sphere(d, &mut data_rng).unwrap())
            .collect();
        let k = required_dim(55, 0.2).unwrap();
        let mut good = 0;
        for s in 0..10u64 {
            let f = JlMap::new(d, k, &mut RngSeed::new(11, s).rng()).unwrap();
            if check_dot_products(&f, &points, &normals, 0.2).unwrap() <= 0.01 {
                good += 1;
            }
        }
        assert!(good >= 9, "only {good}/10 seeds passed");
    }
}
