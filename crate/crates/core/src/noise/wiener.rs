use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::grid::TimeGrid;

/// All randomness in the crate comes from ChaCha8 seeded through
/// `seed_from_u64`, so a `(seed, length)` pair fixes the stream on every
/// platform and thread count.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn standard_normals(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = rng(seed);
    (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
}

/// `N` independent `Normal(0, dt)` increments of a Wiener process.
#[derive(Debug, Clone, PartialEq)]
pub struct WienerIncrements {
    pub grid: TimeGrid,
    pub seed: u64,
    pub values: Vec<f64>,
}

pub fn sample_wiener(grid: &TimeGrid, seed: u64) -> WienerIncrements {
    let scale = grid.dt().sqrt();
    let values = standard_normals(grid.steps(), seed)
        .into_iter()
        .map(|z| z * scale)
        .collect();
    WienerIncrements {
        grid: grid.clone(),
        seed,
        values,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        let g = TimeGrid::new(1.0, 500).unwrap();
        assert_eq!(sample_wiener(&g, 42), sample_wiener(&g, 42));
        assert_ne!(sample_wiener(&g, 42).values, sample_wiener(&g, 43).values);
    }

    #[test]
    fn moments() {
        let n = 100_000;
        let g = TimeGrid::new(2.0, n).unwrap();
        let dt = g.dt();
        let w = sample_wiener(&g, 7);
        assert_eq!(w.values.len(), n);
        let mean = w.values.iter().sum::<f64>() / n as f64;
        assert!(mean.abs() < 4.0 * (dt / n as f64).sqrt(), "mean {mean}");
        let var = w.values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let ratio = var / dt;
        assert!((0.95..=1.05).contains(&ratio), "var/dt {ratio}");
    }
}
