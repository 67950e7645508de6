use num_complex::Complex64;
use rayon::prelude::*;

use super::mat2::Mat2;
use super::params::{frame_hamiltonian, propagator, Frame, LindbladParams, QubitParams};
use super::state::{DensityMatrix, QuantumState, NORM_TOLERANCE};
use crate::analysis::stats::pointwise_mean_std;
use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::noise::NoisePath;

/// Largest `‖H‖ dt` accepted by the RK4 Lindblad integrator.
pub const RK4_MAX_PHASE_PER_STEP: f64 = 2.0;

#[derive(Debug, Clone, PartialEq)]
pub struct QubitMetrics {
    pub grid: TimeGrid,
    pub fidelity: Vec<f64>,
    pub coherence: Vec<f64>,
    pub excited_population: Vec<f64>,
}

impl QubitMetrics {
    fn with_capacity(grid: &TimeGrid) -> Self {
        let n = grid.len();
        Self {
            grid: grid.clone(),
            fidelity: Vec::with_capacity(n),
            coherence: Vec::with_capacity(n),
            excited_population: Vec::with_capacity(n),
        }
    }

    fn push(&mut self, fidelity: f64, coherence: f64, pe: f64) {
        self.fidelity.push(fidelity.clamp(0.0, 1.0));
        self.coherence.push(coherence.clamp(0.0, 1.0));
        self.excited_population.push(pe.clamp(0.0, 1.0));
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryRun {
    pub states: Vec<QuantumState>,
    pub metrics: QubitMetrics,
}

fn validate_noise(params: &QubitParams, noise: &NoisePath) -> Result<()> {
    params.validate()?;
    if noise.values.len() != noise.grid.len() {
        return Err(Error::Validation("noise path length does not match its grid".into()));
    }
    if noise.values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Validation("noise path has non-finite values".into()));
    }
    Ok(())
}

/// Exact piecewise-constant propagation: step `i -> i+1` applies
/// `exp(-i H(χ_i) dt)`.
pub fn evolve_unitary(
    params: &QubitParams,
    noise: &NoisePath,
    psi0: &QuantumState,
) -> Result<UnitaryRun> {
    validate_noise(params, noise)?;
    if (psi0.norm_sqr() - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::Validation(format!(
            "initial state norm² {} differs from 1",
            psi0.norm_sqr()
        )));
    }
    let dt = noise.grid.dt();
    let mut states = Vec::with_capacity(noise.grid.len());
    let mut metrics = QubitMetrics::with_capacity(&noise.grid);
    let mut psi = *psi0;
    let record = |psi: &QuantumState, metrics: &mut QubitMetrics| {
        let [a0, a1] = psi.amplitudes();
        metrics.push(psi0.inner(psi).norm_sqr(), (a0 * a1.conj()).norm(), a1.norm_sqr());
    };
    record(&psi, &mut metrics);
    states.push(psi);
    for &chi in &noise.values[..noise.values.len() - 1] {
        let (hx, hz) = params.field(chi);
        psi = psi.apply(&propagator(hx, hz, dt));
        record(&psi, &mut metrics);
        states.push(psi);
    }
    Ok(UnitaryRun { states, metrics })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LindbladRun {
    pub states: Vec<DensityMatrix>,
    pub metrics: QubitMetrics,
}

struct Dissipator {
    relaxation: f64,
    dephasing: f64,
}

impl Dissipator {
    fn rhs(&self, h: &Mat2, rho: &Mat2) -> Mat2 {
        let minus_i = Complex64::new(0.0, -1.0);
        let mut out = h.commutator(rho).scale(minus_i);
        if self.relaxation > 0.0 {
            let sm = Mat2::sigma_minus();
            let sp = sm.dagger();
            let jump = sm * *rho * sp - (sp * sm).anticommutator(rho).scale_re(0.5);
            out = out + jump.scale_re(self.relaxation);
        }
        if self.dephasing > 0.0 {
            let sz = Mat2::sigma_z();
            out = out + (sz * *rho * sz - *rho).scale_re(0.5 * self.dephasing);
        }
        out
    }
}

/// `dρ/dt = -i[H, ρ] + (1/T1) D[σ₋]ρ + γφ D[σz/√2]ρ` by classical RK4 with
/// the noise held constant over each step, followed by Hermitian
/// symmetrization.
pub fn evolve_lindblad(
    params: &QubitParams,
    lb: &LindbladParams,
    noise: &NoisePath,
    rho0: &DensityMatrix,
) -> Result<LindbladRun> {
    validate_noise(params, noise)?;
    let lb = LindbladParams::new(lb.t1, lb.t2)?;
    let rho0 = DensityMatrix::new(*rho0.matrix())?;
    let dt = noise.grid.dt();
    if params.frame == Frame::Lab {
        let chi_max = noise.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let (hx, hz) = params.field(chi_max);
        let phase = hx.hypot(hz) * dt;
        if phase > RK4_MAX_PHASE_PER_STEP {
            return Err(Error::Validation(format!(
                "lab-frame step too coarse for RK4: ‖H‖dt = {phase:.3} > {RK4_MAX_PHASE_PER_STEP}"
            )));
        }
    }
    let diss = Dissipator {
        relaxation: lb.relaxation_rate(),
        dephasing: lb.dephasing_rate(),
    };
    let mut states = Vec::with_capacity(noise.grid.len());
    let mut metrics = QubitMetrics::with_capacity(&noise.grid);
    let record = |rho: &DensityMatrix, metrics: &mut QubitMetrics| {
        metrics.push(rho0.fidelity(rho), rho.coherence(), rho.excited_population());
    };
    let mut rho = *rho0.matrix();
    record(&rho0, &mut metrics);
    states.push(rho0);
    for &chi in &noise.values[..noise.values.len() - 1] {
        let h = frame_hamiltonian(params, chi);
        let k1 = diss.rhs(&h, &rho);
        let k2 = diss.rhs(&h, &(rho + k1.scale_re(0.5 * dt)));
        let k3 = diss.rhs(&h, &(rho + k2.scale_re(0.5 * dt)));
        let k4 = diss.rhs(&h, &(rho + k3.scale_re(dt)));
        rho = rho + (k1 + k2.scale_re(2.0) + k3.scale_re(2.0) + k4).scale_re(dt / 6.0);
        rho = (rho + rho.dagger()).scale_re(0.5);
        let state = DensityMatrix(rho);
        record(&state, &mut metrics);
        states.push(state);
    }
    Ok(LindbladRun { states, metrics })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricBand {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleMetrics {
    pub grid: TimeGrid,
    pub fidelity: MetricBand,
    pub coherence: MetricBand,
    pub excited_population: MetricBand,
    pub runs: usize,
}

/// Pointwise mean and sample std of each metric, reduced in run order.
pub fn ensemble_metrics(runs: &[QubitMetrics]) -> Result<EnsembleMetrics> {
    let first = runs
        .first()
        .ok_or_else(|| Error::Validation("no runs to aggregate".into()))?;
    if runs.iter().any(|r| r.grid != first.grid) {
        return Err(Error::Validation("runs use different grids".into()));
    }
    let band = |pick: fn(&QubitMetrics) -> &[f64]| {
        let rows: Vec<&[f64]> = runs.iter().map(pick).collect();
        let (mean, std) = pointwise_mean_std(&rows);
        MetricBand { mean, std }
    };
    Ok(EnsembleMetrics {
        grid: first.grid.clone(),
        fidelity: band(|m| &m.fidelity),
        coherence: band(|m| &m.coherence),
        excited_population: band(|m| &m.excited_population),
        runs: runs.len(),
    })
}

pub fn run_unitary_ensemble(
    params: &QubitParams,
    noise: &[NoisePath],
    psi0: &QuantumState,
) -> Result<Vec<QubitMetrics>> {
    noise
        .par_iter()
        .map(|n| evolve_unitary(params, n, psi0).map(|r| r.metrics))
        .collect()
}

pub fn run_lindblad_ensemble(
    params: &QubitParams,
    lb: &LindbladParams,
    noise: &[NoisePath],
    rho0: &DensityMatrix,
) -> Result<Vec<QubitMetrics>> {
    noise
        .par_iter()
        .map(|n| evolve_lindblad(params, lb, n, rho0).map(|r| r.metrics))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant_noise(value: f64, total: f64, steps: usize) -> NoisePath {
        let grid = TimeGrid::new(total, steps).unwrap();
        NoisePath {
            values: vec![value; grid.len()],
            grid,
        }
    }

    fn lab(omega0: f64, delta: f64) -> QubitParams {
        QubitParams {
            omega0,
            delta,
            frame: Frame::Lab,
            ..Default::default()
        }
    }

    #[test]
    fn decoupled_ground_state_is_stationary() {
        let noise = constant_noise(0.8, 1.0, 1000);
        let run = evolve_unitary(&lab(50.0, 0.0), &noise, &QuantumState::zero()).unwrap();
        assert!(run.metrics.excited_population.iter().all(|&p| p == 0.0));
        assert!(run.metrics.fidelity.iter().all(|&f| (f - 1.0).abs() < 1e-15));
    }

    #[test]
    fn rabi_oscillation() {
        let (omega0, delta, chi) = (6.0, 1.5, 0.9);
        let noise = constant_noise(chi, 4.0, 4000);
        let run = evolve_unitary(&lab(omega0, delta), &noise, &QuantumState::zero()).unwrap();
        let big = ((omega0 / 2.0).powi(2) + (delta * chi).powi(2)).sqrt();
        for (i, pe) in run.metrics.excited_population.iter().enumerate() {
            let t = noise.grid.time(i);
            let expect = (delta * chi / big).powi(2) * (big * t).sin().powi(2);
            assert!((pe - expect).abs() < 1e-8, "t = {t}");
        }
    }

    #[test]
    fn unnormalized_initial_state_rejected() {
        let noise = constant_noise(0.0, 1.0, 10);
        let bad = QuantumState::new_unchecked(Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0));
        assert!(evolve_unitary(&lab(1.0, 1.0), &noise, &bad).is_err());
    }

    #[test]
    fn lindblad_relaxation_and_dephasing() {
        let noise = constant_noise(0.3, 5.0, 5000);
        let lb = LindbladParams::new(50.0, 30.0).unwrap();
        let p = QubitParams {
            delta: 0.0,
            ..Default::default()
        };
        let excited = evolve_lindblad(&p, &lb, &noise, &QuantumState::one().density()).unwrap();
        let plus = evolve_lindblad(&p, &lb, &noise, &QuantumState::plus().density()).unwrap();
        for i in (0..=5000).step_by(250) {
            let t = noise.grid.time(i);
            assert!((excited.metrics.excited_population[i] - (-t / 50.0).exp()).abs() < 1e-6);
            assert!((plus.metrics.coherence[i] - 0.5 * (-t / 30.0).exp()).abs() < 1e-6);
        }
    }

    #[test]
    fn lindblad_without_channels_matches_unitary() {
        let noise = constant_noise(0.7, 2.0, 2000);
        let p = QubitParams {
            delta: 2.0,
            ..Default::default()
        };
        let lb = LindbladParams::new(f64::INFINITY, f64::INFINITY).unwrap();
        let open = evolve_lindblad(&p, &lb, &noise, &QuantumState::zero().density()).unwrap();
        let closed = evolve_unitary(&p, &noise, &QuantumState::zero()).unwrap();
        for (a, b) in open
            .metrics
            .excited_population
            .iter()
            .zip(&closed.metrics.excited_population)
        {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn coarse_lab_frame_rejected() {
        let noise = constant_noise(0.0, 5.0, 5000);
        let lb = LindbladParams::new(50.0, 30.0).unwrap();
        let p = QubitParams {
            frame: Frame::Lab,
            ..Default::default()
        };
        let r = evolve_lindblad(&p, &lb, &noise, &QuantumState::plus().density());
        assert!(matches!(r, Err(Error::Validation(_))));
    }

    #[test]
    fn ensemble_of_identical_runs() {
        let noise = constant_noise(0.2, 1.0, 100);
        let p = QubitParams {
            delta: 3.0,
            ..Default::default()
        };
        let run = evolve_unitary(&p, &noise, &QuantumState::zero()).unwrap().metrics;
        let single = ensemble_metrics(std::slice::from_ref(&run)).unwrap();
        assert_eq!(single.fidelity.mean, run.fidelity);
        assert!(single.fidelity.std.iter().all(|&s| s == 0.0));
        let many = ensemble_metrics(&vec![run.clone(); 4]).unwrap();
        assert!(many.excited_population.std.iter().all(|&s| s == 0.0));
        let other = evolve_unitary(&p, &constant_noise(0.2, 2.0, 100), &QuantumState::zero())
            .unwrap()
            .metrics;
        assert!(ensemble_metrics(&[run, other]).is_err());
        assert!(ensemble_metrics(&[]).is_err());
    }
}
