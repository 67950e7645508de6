use rayon::prelude::*;

use super::kernel::MemoryKernel;
use super::wiener::standard_normals;
use super::NoisePath;
use crate::error::{Error, Result};
use crate::grid::TimeGrid;

enum Weights {
    /// `w[k-1]` multiplies the normal `k` steps in the past.
    Lag(Vec<f64>),
    /// `rows[i-1][j]` multiplies normal `j` in `M(t_i)`.
    Rows(Vec<Vec<f64>>),
}

/// Discretized memory multifractional driver
///
/// `M(t_i) = Σ_{j<i} K(t_i, t_j) ξ_j dt^{H(t_j)}`
///
/// The equal-time term is excluded, so the smallest lag is one step and the
/// kernel is never evaluated at zero lag. Kernels that depend on `t - s` only
/// store a single weight row.
pub struct MmfbmGenerator {
    kernel: MemoryKernel,
    grid: TimeGrid,
    weights: Weights,
}

impl MmfbmGenerator {
    pub fn new(kernel: &MemoryKernel, grid: &TimeGrid) -> Self {
        let n = grid.steps();
        let dt = grid.dt();
        let weights = if kernel.is_stationary() {
            let (exponent, norm) = kernel.exponent_and_norm(0.0);
            let scale = dt.powf(kernel.increment_hurst(0.0));
            Weights::Lag(
                (1..=n)
                    .map(|k| kernel.lag_weight(exponent, norm, k as f64 * dt) * scale)
                    .collect(),
            )
        } else {
            let scales: Vec<f64> = (0..n)
                .map(|j| dt.powf(kernel.increment_hurst(grid.time(j))))
                .collect();
            Weights::Rows(
                (1..=n)
                    .into_par_iter()
                    .map(|i| {
                        let (exponent, norm) = kernel.exponent_and_norm(grid.time(i));
                        (0..i)
                            .map(|j| {
                                kernel.lag_weight(exponent, norm, (i - j) as f64 * dt) * scales[j]
                            })
                            .collect()
                    })
                    .collect(),
            )
        };
        Self {
            kernel: kernel.clone(),
            grid: grid.clone(),
            weights,
        }
    }

    pub fn kernel(&self) -> &MemoryKernel {
        &self.kernel
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    /// Weight applied to normal `j` in `M(t_i)`; zero for `j >= i`.
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        if j >= i {
            return 0.0;
        }
        match &self.weights {
            Weights::Lag(w) => w[i - j - 1],
            Weights::Rows(rows) => rows[i - 1][j],
        }
    }

    pub fn path_from_normals(&self, normals: &[f64]) -> Result<NoisePath> {
        let n = self.grid.steps();
        if normals.len() != n {
            return Err(Error::Validation(format!(
                "expected {n} normals, got {}",
                normals.len()
            )));
        }
        let mut values = Vec::with_capacity(n + 1);
        values.push(0.0);
        match &self.weights {
            Weights::Lag(w) => {
                for i in 1..=n {
                    let mut acc = 0.0;
                    for j in 0..i {
                        acc += w[i - j - 1] * normals[j];
                    }
                    values.push(acc);
                }
            }
            Weights::Rows(rows) => {
                for row in rows {
                    values.push(row.iter().zip(normals).map(|(w, z)| w * z).sum());
                }
            }
        }
        Ok(NoisePath {
            grid: self.grid.clone(),
            values,
        })
    }

    pub fn sample(&self, seed: u64) -> NoisePath {
        let normals = standard_normals(self.grid.steps(), seed);
        self.path_from_normals(&normals)
            .expect("normal count matches grid")
    }
}

pub fn generate_mmfbm(kernel: &MemoryKernel, grid: &TimeGrid, seed: u64) -> NoisePath {
    MmfbmGenerator::new(kernel, grid).sample(seed)
}
