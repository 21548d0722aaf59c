//! Running sample covariance for the adaptive proposal.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

/// Incrementally updated mean and covariance of the chain history.
///
/// Uses a Welford-style rank-one update so the result matches the batch
/// sample covariance (normalized by `n - 1`) to machine precision.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunningCovariance {
    dim: usize,
    count: u64,
    mean: DVector<f64>,
    /// Sum of outer products of deviations; covariance = scatter / (n - 1).
    scatter: DMatrix<f64>,
}

impl RunningCovariance {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            count: 0,
            mean: DVector::zeros(dim),
            scatter: DMatrix::zeros(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn push(&mut self, x: &DVector<f64>) {
        assert_eq!(x.len(), self.dim);
        self.count += 1;
        let n = self.count as f64;
        let delta = x - &self.mean;
        self.mean += &delta / n;
        let delta2 = x - &self.mean;
        // scatter += delta * delta2^T
        self.scatter.ger(1.0, &delta, &delta2, 1.0);
    }

    /// Sample covariance, or `None` with fewer than two points.
    pub fn covariance(&self) -> Option<DMatrix<f64>> {
        if self.count < 2 {
            return None;
        }
        Some(&self.scatter / (self.count as f64 - 1.0))
    }
}

/// Batch sample covariance over a slice of points (normalized by `n - 1`).
pub fn batch_covariance(points: &[DVector<f64>]) -> Option<DMatrix<f64>> {
    if points.len() < 2 {
        return None;
    }
    let dim = points[0].len();
    let n = points.len() as f64;
    let mut mean = DVector::zeros(dim);
    for p in points {
        mean += p;
    }
    mean /= n;
    let mut scatter = DMatrix::zeros(dim, dim);
    for p in points {
        let d = p - &mean;
        scatter.ger(1.0, &d, &d, 1.0);
    }
    Some(scatter / (n - 1.0))
}
