//! Gaussian noise drivers: Wiener increments, exact fractional Brownian
//! motion, and memory multifractional Brownian motion built by causal kernel
//! convolution.

mod fbm;
mod hurst;
mod kernel;
mod mmfbm;
mod wiener;

pub use fbm::{fgn_autocovariance, generate_fbm, FbmGenerator, FbmMethod, CHOLESKY_MAX_STEPS};
pub use hurst::{HurstProfile, HurstShape};
pub use kernel::{KernelShape, MemoryKernel};
pub use mmfbm::{generate_mmfbm, MmfbmGenerator};
pub use wiener::{rng, sample_wiener, standard_normals, WienerIncrements};

use crate::grid::TimeGrid;

/// A process sampled at every point of its grid.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisePath {
    pub grid: TimeGrid,
    pub values: Vec<f64>,
}

impl NoisePath {
    pub fn increments(&self) -> Vec<f64> {
        self.values.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn scaled(&self, factor: f64) -> NoisePath {
        NoisePath {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }
}
