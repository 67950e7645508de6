//! Euler–Maruyama integration of `dχ = F(χ) dt + G dN(t)` where `N` is a
//! memory-kernel driver, and pointwise ensemble statistics.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::analysis::stats::pointwise_mean_std;
use crate::error::{domain, Error, Result};
use crate::grid::TimeGrid;
use crate::noise::{KernelShape, MemoryKernel, MmfbmGenerator, NoisePath};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Drift {
    /// `F = -λχ`
    Linear { lambda: f64 },
    /// `F = μχ`
    Affine { mu: f64 },
}

impl Drift {
    pub fn eval(&self, chi: f64) -> f64 {
        match *self {
            Drift::Linear { lambda } => -lambda * chi,
            Drift::Affine { mu } => mu * chi,
        }
    }

    /// Linear rate `r` in `F = r χ`.
    pub fn rate(&self) -> f64 {
        match *self {
            Drift::Linear { lambda } => -lambda,
            Drift::Affine { mu } => mu,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdeSpec {
    pub drift: Drift,
    /// `σ` for the multifractional SDE, `σφ` for the memory OU form.
    pub diffusion: f64,
    pub chi0: f64,
    pub kernel: MemoryKernel,
    pub grid: TimeGrid,
}

impl SdeSpec {
    pub fn new(
        drift: Drift,
        diffusion: f64,
        chi0: f64,
        kernel: MemoryKernel,
        grid: TimeGrid,
    ) -> Result<Self> {
        let spec = Self {
            drift,
            diffusion,
            chi0,
            kernel,
            grid,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.diffusion.is_finite() && self.diffusion >= 0.0) {
            return Err(domain("diffusion", self.diffusion, "finite and >= 0"));
        }
        if !self.chi0.is_finite() {
            return Err(domain("chi0", self.chi0, "finite"));
        }
        match self.drift {
            Drift::Linear { lambda } if !(lambda.is_finite() && lambda >= 0.0) => {
                Err(domain("lambda", lambda, "finite and >= 0"))
            }
            Drift::Affine { mu } if !mu.is_finite() => Err(domain("mu", mu, "finite")),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntegratorKind {
    /// `dχ = F dt + σ dM` with the multifractional kernel.
    MmfbmSde,
    /// `dχ = -λχ dt + (σφ/2π) d∫K dW` with the power-law kernel.
    MemoryOu,
}

impl IntegratorKind {
    pub fn name(&self) -> &'static str {
        match self {
            IntegratorKind::MmfbmSde => "mmfbm_sde",
            IntegratorKind::MemoryOu => "memory_ou",
        }
    }
}

/// A spec bound to its cached driver weights; cheap to call per seed.
pub struct SdeIntegrator {
    spec: SdeSpec,
    kind: IntegratorKind,
    driver: MmfbmGenerator,
}

impl SdeIntegrator {
    pub fn new(spec: &SdeSpec, kind: IntegratorKind) -> Result<Self> {
        spec.validate()?;
        match (kind, spec.kernel.shape()) {
            (IntegratorKind::MmfbmSde, KernelShape::Mmfbm(_)) => {}
            (IntegratorKind::MemoryOu, KernelShape::PowerLaw { beta }) => {
                if !(*beta > 0.0) {
                    return Err(domain("beta", *beta, "> 0"));
                }
            }
            (kind, _) => {
                return Err(Error::Validation(format!(
                    "integrator {} does not accept this kernel",
                    kind.name()
                )))
            }
        }
        if let Some(h) = spec.kernel.hurst() {
            if h.horizon() < spec.grid.total_time() {
                return Err(Error::Validation(format!(
                    "Hurst profile horizon {} shorter than the grid ({})",
                    h.horizon(),
                    spec.grid.total_time()
                )));
            }
        }
        Ok(Self {
            spec: spec.clone(),
            kind,
            driver: MmfbmGenerator::new(&spec.kernel, &spec.grid),
        })
    }

    pub fn spec(&self) -> &SdeSpec {
        &self.spec
    }

    pub fn kind(&self) -> IntegratorKind {
        self.kind
    }

    pub fn driver(&self) -> &MmfbmGenerator {
        &self.driver
    }

    /// Prefactor applied to driver increments.
    pub fn noise_amplitude(&self) -> f64 {
        match self.kind {
            IntegratorKind::MmfbmSde => self.spec.diffusion,
            IntegratorKind::MemoryOu => self.spec.diffusion / (2.0 * PI),
        }
    }

    /// Euler–Maruyama recursion driven by a precomputed driver path.
    pub fn integrate_driver(&self, driver: &NoisePath) -> NoisePath {
        let dt = self.spec.grid.dt();
        let amp = self.noise_amplitude();
        let mut chi = Vec::with_capacity(driver.values.len());
        let mut x = self.spec.chi0;
        chi.push(x);
        for w in driver.values.windows(2) {
            x = x + self.spec.drift.eval(x) * dt + amp * (w[1] - w[0]);
            chi.push(x);
        }
        NoisePath {
            grid: self.spec.grid.clone(),
            values: chi,
        }
    }

    pub fn trajectory(&self, seed: u64) -> NoisePath {
        self.integrate_driver(&self.driver.sample(seed))
    }
}

pub fn integrate_mmfbm_sde(spec: &SdeSpec, seed: u64) -> Result<NoisePath> {
    Ok(SdeIntegrator::new(spec, IntegratorKind::MmfbmSde)?.trajectory(seed))
}

pub fn integrate_memory_ou(spec: &SdeSpec, seed: u64) -> Result<NoisePath> {
    Ok(SdeIntegrator::new(spec, IntegratorKind::MemoryOu)?.trajectory(seed))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleStats {
    pub grid: TimeGrid,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    pub n_traj: usize,
}

impl EnsembleStats {
    pub fn from_paths(paths: &[NoisePath]) -> Result<Self> {
        let first = paths
            .first()
            .ok_or_else(|| Error::Validation("empty ensemble".into()))?;
        if paths.iter().any(|p| p.grid != first.grid) {
            return Err(Error::Validation("ensemble paths use different grids".into()));
        }
        let rows: Vec<&[f64]> = paths.iter().map(|p| p.values.as_slice()).collect();
        let (mean, std) = pointwise_mean_std(&rows);
        Ok(Self {
            grid: first.grid.clone(),
            mean,
            std,
            n_traj: paths.len(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    pub stats: EnsembleStats,
    /// Trajectory `k` was generated with seed `base_seed + k`.
    pub paths: Option<Vec<NoisePath>>,
}

/// Trajectories run in parallel; results are collected in index order and
/// reduced sequentially, so the output does not depend on thread count.
pub fn run_ensemble(
    spec: &SdeSpec,
    kind: IntegratorKind,
    n_traj: usize,
    base_seed: u64,
    keep_paths: bool,
) -> Result<Ensemble> {
    let integrator = SdeIntegrator::new(spec, kind)?;
    run_ensemble_with(&integrator, n_traj, base_seed, keep_paths)
}

pub fn run_ensemble_with(
    integrator: &SdeIntegrator,
    n_traj: usize,
    base_seed: u64,
    keep_paths: bool,
) -> Result<Ensemble> {
    if n_traj == 0 {
        return Err(domain("n_traj", 0.0, ">= 1"));
    }
    let paths: Vec<NoisePath> = (0..n_traj as u64)
        .into_par_iter()
        .map(|k| integrator.trajectory(base_seed.wrapping_add(k)))
        .collect();
    let stats = EnsembleStats::from_paths(&paths)?;
    Ok(Ensemble {
        stats,
        paths: keep_paths.then_some(paths),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::HurstProfile;

    fn table_kernel() -> MemoryKernel {
        MemoryKernel::mmfbm(HurstProfile::sinusoidal(0.3, 0.2, 1.0, 1.0).unwrap())
    }

    fn grid() -> TimeGrid {
        TimeGrid::new(1.0, 500).unwrap()
    }

    #[test]
    fn deterministic_exponential_limit() {
        let spec = SdeSpec::new(Drift::Affine { mu: -0.1 }, 0.0, 1.0, table_kernel(), grid()).unwrap();
        let path = integrate_mmfbm_sde(&spec, 1).unwrap();
        assert!((path.values[500] - (-0.1f64).exp()).abs() < 2e-3);
        assert_eq!(path.values[0], 1.0);
    }

    #[test]
    fn zero_dynamics_constant() {
        let spec = SdeSpec::new(Drift::Linear { lambda: 0.0 }, 0.0, 0.5, table_kernel(), grid()).unwrap();
        let path = integrate_mmfbm_sde(&spec, 3).unwrap();
        assert!(path.values.iter().all(|&v| v == 0.5));
    }

    #[test]
    fn memory_ou_deterministic_limit() {
        let t = 2.0;
        let g = TimeGrid::new(t, 2000).unwrap();
        let spec = SdeSpec::new(
            Drift::Linear { lambda: 1.0 },
            0.0,
            0.5,
            MemoryKernel::power_law(1.0).unwrap(),
            g,
        )
        .unwrap();
        let path = integrate_memory_ou(&spec, 0).unwrap();
        assert!((path.values[2000] - 0.5 * (-2.0f64).exp()).abs() < 1e-3);
    }

    #[test]
    fn kernel_mismatch_rejected() {
        let spec = SdeSpec::new(Drift::Linear { lambda: 1.0 }, 1.0, 0.0, table_kernel(), grid()).unwrap();
        assert!(integrate_memory_ou(&spec, 0).is_err());
        let pl = SdeSpec {
            kernel: MemoryKernel::power_law(1.0).unwrap(),
            ..spec
        };
        assert!(integrate_mmfbm_sde(&pl, 0).is_err());
    }

    #[test]
    fn invalid_spec() {
        let k = MemoryKernel::power_law(1.0).unwrap();
        assert!(SdeSpec::new(Drift::Linear { lambda: 1.0 }, -1.0, 0.0, k.clone(), grid()).is_err());
        assert!(SdeSpec::new(Drift::Linear { lambda: -1.0 }, 1.0, 0.0, k, grid()).is_err());
    }

    #[test]
    fn noiseless_ensemble_has_zero_spread() {
        let spec = SdeSpec::new(Drift::Affine { mu: -0.1 }, 0.0, 1.0, table_kernel(), grid()).unwrap();
        let e = run_ensemble(&spec, IntegratorKind::MmfbmSde, 5, 10, true).unwrap();
        assert!(e.stats.std.iter().all(|&s| s == 0.0));
        assert_eq!(e.paths.unwrap().len(), 5);
        assert!(run_ensemble(&spec, IntegratorKind::MmfbmSde, 0, 10, false).is_err());
    }

    #[test]
    fn short_hurst_horizon_rejected() {
        let k = MemoryKernel::mmfbm(HurstProfile::constant(0.5, 0.5).unwrap());
        let spec = SdeSpec::new(Drift::Affine { mu: 0.0 }, 1.0, 0.0, k, grid()).unwrap();
        assert!(integrate_mmfbm_sde(&spec, 0).is_err());
    }
}
