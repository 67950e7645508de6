use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::wiener::standard_normals;
use super::NoisePath;
use crate::error::{domain, Error, Result};
use crate::grid::TimeGrid;

/// Largest step count for which the exact Cholesky factor is used by default.
pub const CHOLESKY_MAX_STEPS: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FbmMethod {
    Cholesky,
    /// Davies–Harte circulant embedding of the fractional Gaussian noise.
    CirculantEmbedding,
}

impl FbmMethod {
    pub fn for_steps(steps: usize) -> Self {
        if steps <= CHOLESKY_MAX_STEPS {
            FbmMethod::Cholesky
        } else {
            FbmMethod::CirculantEmbedding
        }
    }
}

/// Autocovariance of unit-step fractional Gaussian noise at lag `k`.
pub fn fgn_autocovariance(hurst: f64, k: usize) -> f64 {
    let k = k as f64;
    let h2 = 2.0 * hurst;
    0.5 * ((k + 1.0).powf(h2) - 2.0 * k.powf(h2) + (k - 1.0).abs().powf(h2))
}

enum Factor {
    /// Packed rows of the lower Cholesky factor of the fGn covariance.
    Cholesky(Vec<Vec<f64>>),
    Circulant {
        sqrt_eigenvalues: Vec<f64>,
        fft: Arc<dyn Fft<f64>>,
    },
}

/// Exact-covariance fBm sampler on a fixed grid. The factorization is built
/// once and reused for every seed.
pub struct FbmGenerator {
    hurst: f64,
    grid: TimeGrid,
    factor: Factor,
}

impl std::fmt::Debug for FbmGenerator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FbmGenerator")
            .field("hurst", &self.hurst)
            .field("grid", &self.grid)
            .field("method", &self.method())
            .finish()
    }
}

impl FbmGenerator {
    pub fn new(hurst: f64, grid: &TimeGrid) -> Result<Self> {
        Self::with_method(hurst, grid, FbmMethod::for_steps(grid.steps()))
    }

    pub fn with_method(hurst: f64, grid: &TimeGrid, method: FbmMethod) -> Result<Self> {
        if !(hurst > 0.0 && hurst < 1.0) {
            return Err(domain("hurst", hurst, "(0, 1)"));
        }
        let n = grid.steps();
        let factor = match method {
            FbmMethod::Cholesky => {
                let cov = DMatrix::from_fn(n, n, |i, j| fgn_autocovariance(hurst, i.abs_diff(j)));
                let chol = cov.cholesky().ok_or_else(|| {
                    Error::Validation("fGn covariance is not positive definite".into())
                })?;
                let l = chol.l();
                Factor::Cholesky((0..n).map(|i| (0..=i).map(|j| l[(i, j)]).collect()).collect())
            }
            FbmMethod::CirculantEmbedding => {
                let m = 2 * n;
                let mut c: Vec<Complex64> = (0..m)
                    .map(|k| {
                        let lag = if k <= n { k } else { m - k };
                        Complex64::new(fgn_autocovariance(hurst, lag), 0.0)
                    })
                    .collect();
                let fft = FftPlanner::new().plan_fft_forward(m);
                fft.process(&mut c);
                let max = c.iter().map(|z| z.re).fold(0.0, f64::max);
                let mut sqrt_eigenvalues = Vec::with_capacity(m);
                for z in &c {
                    if z.re < -1e-10 * max {
                        return Err(Error::Validation(format!(
                            "circulant embedding has negative eigenvalue {}",
                            z.re
                        )));
                    }
                    sqrt_eigenvalues.push((z.re.max(0.0) / m as f64).sqrt());
                }
                Factor::Circulant {
                    sqrt_eigenvalues,
                    fft,
                }
            }
        };
        Ok(Self {
            hurst,
            grid: grid.clone(),
            factor,
        })
    }

    pub fn hurst(&self) -> f64 {
        self.hurst
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn method(&self) -> FbmMethod {
        match self.factor {
            Factor::Cholesky(_) => FbmMethod::Cholesky,
            Factor::Circulant { .. } => FbmMethod::CirculantEmbedding,
        }
    }

    /// Unit-step fractional Gaussian noise of length `N`.
    pub fn sample_fgn(&self, seed: u64) -> Vec<f64> {
        let n = self.grid.steps();
        match &self.factor {
            Factor::Cholesky(rows) => {
                let z = standard_normals(n, seed);
                rows.iter()
                    .map(|row| row.iter().zip(&z).map(|(l, z)| l * z).sum())
                    .collect()
            }
            Factor::Circulant {
                sqrt_eigenvalues,
                fft,
            } => {
                let m = sqrt_eigenvalues.len();
                let z = standard_normals(2 * m, seed);
                let mut buf: Vec<Complex64> = sqrt_eigenvalues
                    .iter()
                    .enumerate()
                    .map(|(k, s)| Complex64::new(s * z[2 * k], s * z[2 * k + 1]))
                    .collect();
                fft.process(&mut buf);
                buf.iter().take(n).map(|c| c.re).collect()
            }
        }
    }

    pub fn sample(&self, seed: u64) -> NoisePath {
        let scale = self.grid.dt().powf(self.hurst);
        let mut values = Vec::with_capacity(self.grid.len());
        let mut acc = 0.0;
        values.push(0.0);
        for g in self.sample_fgn(seed) {
            acc += g;
            values.push(acc * scale);
        }
        NoisePath {
            grid: self.grid.clone(),
            values,
        }
    }
}

/// One fBm path with covariance `½(t^{2H} + s^{2H} - |t-s|^{2H})`.
pub fn generate_fbm(hurst: f64, grid: &TimeGrid, seed: u64) -> Result<NoisePath> {
    Ok(FbmGenerator::new(hurst, grid)?.sample(seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fbm_cov(h: f64, t: f64, s: f64) -> f64 {
        0.5 * (t.powf(2.0 * h) + s.powf(2.0 * h) - (t - s).abs().powf(2.0 * h))
    }

    #[test]
    fn starts_at_zero_and_is_deterministic() {
        let g = TimeGrid::new(1.0, 64).unwrap();
        for h in [0.2, 0.5, 0.9] {
            let a = generate_fbm(h, &g, 3).unwrap();
            assert_eq!(a.values[0], 0.0);
            assert_eq!(a.values.len(), 65);
            assert_eq!(a, generate_fbm(h, &g, 3).unwrap());
        }
    }

    #[test]
    fn rejects_bad_hurst() {
        let g = TimeGrid::new(1.0, 8).unwrap();
        assert!(generate_fbm(0.0, &g, 0).is_err());
        assert!(generate_fbm(1.0, &g, 0).is_err());
        assert!(generate_fbm(f64::NAN, &g, 0).is_err());
    }

    #[test]
    fn method_switch() {
        assert_eq!(FbmMethod::for_steps(2048), FbmMethod::Cholesky);
        assert_eq!(FbmMethod::for_steps(2049), FbmMethod::CirculantEmbedding);
    }

    #[test]
    fn cholesky_factor_reproduces_covariance() {
        // L L^T must equal the fBm covariance once accumulated
        let h = 0.7;
        let g = TimeGrid::new(1.0, 16).unwrap();
        let gen = FbmGenerator::with_method(h, &g, FbmMethod::Cholesky).unwrap();
        let Factor::Cholesky(rows) = &gen.factor else {
            unreachable!()
        };
        let n = 16;
        let scale = g.dt().powf(2.0 * h);
        let mut cum: Vec<Vec<f64>> = vec![vec![0.0; n]; n];
        for i in 0..n {
            for k in 0..n {
                cum[i][k] = (0..=i).map(|r| rows[r].get(k).copied().unwrap_or(0.0)).sum();
            }
        }
        for i in 0..n {
            for j in 0..n {
                let c: f64 = (0..n).map(|k| cum[i][k] * cum[j][k]).sum::<f64>() * scale;
                let expect = fbm_cov(h, g.time(i + 1), g.time(j + 1));
                assert!((c - expect).abs() < 1e-12, "{i} {j} {c} {expect}");
            }
        }
    }

    #[test]
    fn methods_agree_in_distribution() {
        let h = 0.3;
        let g = TimeGrid::new(1.0, 32).unwrap();
        let n_paths = 4000;
        for method in [FbmMethod::Cholesky, FbmMethod::CirculantEmbedding] {
            let gen = FbmGenerator::with_method(h, &g, method).unwrap();
            let (i, j) = (10, 25);
            let mut acc = 0.0;
            let mut acc2 = 0.0;
            for seed in 0..n_paths {
                let p = gen.sample(seed);
                let x = p.values[i] * p.values[j];
                acc += x;
                acc2 += x * x;
            }
            let mean = acc / n_paths as f64;
            let se = ((acc2 / n_paths as f64 - mean * mean) / n_paths as f64).sqrt();
            let expect = fbm_cov(h, g.time(i), g.time(j));
            assert!((mean - expect).abs() < 4.0 * se, "{method:?}: {mean} vs {expect}");
        }
    }
}
