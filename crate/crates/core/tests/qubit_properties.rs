use qnoise::noise::{HurstProfile, MemoryKernel, MmfbmGenerator, NoisePath};
use qnoise::qubit::{
    evolve_lindblad, evolve_unitary, Frame, LindbladParams, QuantumState, QubitParams,
};
use qnoise::TimeGrid;

fn noise(steps: usize, total: f64, seed: u64) -> NoisePath {
    let grid = TimeGrid::new(total, steps).unwrap();
    let kernel = MemoryKernel::mmfbm(HurstProfile::sinusoidal(0.7, 0.1, total, total).unwrap())
        .with_cutoff(1.0)
        .unwrap();
    MmfbmGenerator::new(&kernel, &grid).sample(seed).scaled(3.0 / (2.0 * std::f64::consts::PI))
}

#[test]
fn unitary_norm_drift_over_long_noisy_run() {
    let n = noise(5000, 5.0, 1);
    for frame in [Frame::Lab, Frame::Rotating] {
        let p = QubitParams {
            delta: 8.0,
            frame,
            ..Default::default()
        };
        for psi0 in [QuantumState::plus(), QuantumState::zero()] {
            let run = evolve_unitary(&p, &n, &psi0).unwrap();
            let drift = run
                .states
                .iter()
                .map(|s| (s.norm_sqr() - 1.0).abs())
                .fold(0.0, f64::max);
            assert!(drift < 1e-10, "{frame:?}: {drift}");
            assert_eq!(run.metrics.fidelity[0], 1.0);
            for m in [&run.metrics.fidelity, &run.metrics.coherence, &run.metrics.excited_population] {
                assert!(m.iter().all(|v| (0.0..=1.0).contains(v)));
            }
        }
    }
}

#[test]
fn lindblad_stays_physical_with_noise() {
    let n = noise(5000, 5.0, 2);
    let p = QubitParams {
        delta: 8.0,
        ..Default::default()
    };
    let lb = LindbladParams::new(50.0, 30.0).unwrap();
    let run = evolve_lindblad(&p, &lb, &n, &QuantumState::plus().density()).unwrap();
    for rho in &run.states {
        assert!((rho.trace() - 1.0).abs() < 1e-9);
        assert!(rho.min_eigenvalue() >= -1e-10);
        assert!(rho.matrix().hermiticity_error() <= 1e-12);
    }
    assert_eq!(run.metrics.fidelity[0], 1.0);
}

/// Same piecewise-constant field on a grid refined by two.
fn refine(n: &NoisePath) -> NoisePath {
    let grid = TimeGrid::new(n.grid.total_time(), 2 * n.grid.steps()).unwrap();
    let values = (0..grid.len()).map(|i| n.values[(i / 2).min(n.grid.steps())]).collect();
    NoisePath { grid, values }
}

#[test]
fn halving_the_step_changes_metrics_below_tolerance() {
    let coarse = noise(5000, 5.0, 3);
    let fine = refine(&coarse);
    let p = QubitParams {
        delta: 8.0,
        ..Default::default()
    };
    let lb = LindbladParams::new(50.0, 30.0).unwrap();
    let rho0 = QuantumState::plus().density();
    let a = evolve_lindblad(&p, &lb, &coarse, &rho0).unwrap().metrics;
    let b = evolve_lindblad(&p, &lb, &fine, &rho0).unwrap().metrics;
    for i in 0..=5000 {
        assert!((a.fidelity[i] - b.fidelity[2 * i]).abs() < 1e-6);
        assert!((a.coherence[i] - b.coherence[2 * i]).abs() < 1e-6);
        assert!((a.excited_population[i] - b.excited_population[2 * i]).abs() < 1e-6);
    }
}

#[test]
fn open_and_closed_evolution_agree_without_channels() {
    let n = noise(2000, 2.0, 4);
    let p = QubitParams {
        delta: 8.0,
        ..Default::default()
    };
    let lb = LindbladParams::new(f64::INFINITY, f64::INFINITY).unwrap();
    let psi0 = QuantumState::zero();
    let open = evolve_lindblad(&p, &lb, &n, &psi0.density()).unwrap().metrics;
    let closed = evolve_unitary(&p, &n, &psi0).unwrap().metrics;
    for (a, b) in open.excited_population.iter().zip(&closed.excited_population) {
        assert!((a - b).abs() < 1e-8);
    }
}
