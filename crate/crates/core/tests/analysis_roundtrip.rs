use qnoise::analysis::{
    estimate_hurst, estimate_psd, estimate_psd_samples, fit_gaussian_decay, PsdMethod,
};
use qnoise::noise::{generate_fbm, FbmGenerator, HurstProfile, MemoryKernel, MmfbmGenerator};
use qnoise::qubit::{ensemble_metrics, run_unitary_ensemble, QuantumState, QubitParams};
use qnoise::TimeGrid;

#[test]
fn fgn_spectral_slope() {
    let n = 1 << 16;
    let grid = TimeGrid::new(1.0, n).unwrap();
    for (h, expect) in [(0.9, 0.8), (0.3, -0.4)] {
        let gen = FbmGenerator::new(h, &grid).unwrap();
        let mean: f64 = (0..20)
            .map(|s| {
                let inc = gen.sample(s).increments();
                let mut est = estimate_psd_samples(&inc, grid.dt(), PsdMethod::SegmentAveraged, None).unwrap();
                est.fit_default_band().unwrap().beta_hat
            })
            .sum::<f64>()
            / 20.0;
        assert!((mean - expect).abs() < 0.1, "H = {h}: {mean}");
    }
}

#[test]
fn hurst_roundtrip() {
    let grid = TimeGrid::new(1.0, 1 << 14).unwrap();
    let h5 = estimate_hurst(&generate_fbm(0.5, &grid, 1).unwrap()).unwrap();
    assert!((0.45..=0.55).contains(&h5.hurst), "{h5:?}");
    let h8 = estimate_hurst(&generate_fbm(0.8, &grid, 1).unwrap()).unwrap();
    assert!((0.73..=0.87).contains(&h8.hurst), "{h8:?}");
}

#[test]
fn hurst_roundtrip_is_monotone() {
    let grid = TimeGrid::new(1.0, 1 << 14).unwrap();
    for seed in 0..5 {
        let est: Vec<f64> = [0.3, 0.5, 0.7]
            .iter()
            .map(|&h| estimate_hurst(&generate_fbm(h, &grid, seed).unwrap()).unwrap().hurst)
            .collect();
        assert!(est[0] < est[1] && est[1] < est[2], "seed {seed}: {est:?}");
    }
}

#[test]
fn periodogram_parseval_on_fbm() {
    let grid = TimeGrid::new(1.0, 3000).unwrap();
    let path = generate_fbm(0.6, &grid, 8).unwrap();
    let est = estimate_psd(&path, PsdMethod::Periodogram, None).unwrap();
    let total = est.psd.iter().sum::<f64>() * est.frequencies[0];
    let n = path.values.len() as f64;
    let m = path.values.iter().sum::<f64>() / n;
    let var = path.values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n;
    assert!((total / var - 1.0).abs() < 0.02);
}

#[test]
fn qubit_decay_fit_reproduces_its_input() {
    let total = 5.0;
    let grid = TimeGrid::new(total, 2000).unwrap();
    let kernel = MemoryKernel::mmfbm(HurstProfile::sinusoidal(0.7, 0.1, total, total).unwrap())
        .with_cutoff(1.0)
        .unwrap();
    let gen = MmfbmGenerator::new(&kernel, &grid);
    let noise: Vec<_> = (0..100).map(|s| gen.sample(s).scaled(0.477)).collect();
    let p = QubitParams {
        delta: 8.0,
        ..Default::default()
    };
    let runs = run_unitary_ensemble(&p, &noise, &QuantumState::zero()).unwrap();
    let ens = ensemble_metrics(&runs).unwrap();
    let fit = fit_gaussian_decay(&grid, &ens.fidelity.mean, (0.0, 2.0)).unwrap();
    let max_dev = (0..grid.len())
        .filter(|&i| grid.time(i) <= 2.0)
        .map(|i| (ens.fidelity.mean[i] - fit.model(grid.time(i))).abs())
        .fold(0.0, f64::max);
    assert!(max_dev < 3.0 * fit.residual_std, "{max_dev} vs {}", fit.residual_std);
}
