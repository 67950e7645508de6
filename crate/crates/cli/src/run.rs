//! Scenario execution. Everything here stays in memory; writing is done by
//! [`crate::output`] from a single thread.

use qnoise::analysis::{
    average_spectra, estimate_psd, estimate_psd_samples, fit_gaussian_decay, fit_spectral_exponent,
    DecayFit, PsdMethod, SpectralFit, SpectrumEstimate,
};
use qnoise::noise::NoisePath;
use qnoise::qubit::{
    calibrate_coupling, ensemble_metrics, local_maxima, run_lindblad_ensemble, run_unitary_ensemble,
    EnsembleMetrics,
};
use qnoise::sde::{run_ensemble_with, EnsembleStats, SdeIntegrator};

use crate::config::{LoadedConfig, Model, Scenario};
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct SdeOutcome {
    pub stats: EnsembleStats,
    /// The first `output.noise_paths` trajectories.
    pub paths: Vec<NoisePath>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumTarget {
    Path,
    Increments,
}

impl SpectrumTarget {
    pub fn name(&self) -> &'static str {
        match self {
            SpectrumTarget::Path => "path",
            SpectrumTarget::Increments => "increments",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSpectrum {
    pub target: SpectrumTarget,
    /// Ensemble-averaged estimate.
    pub estimate: SpectrumEstimate,
    pub band: (f64, f64),
    pub fit: Result<SpectralFit, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSpectra {
    pub path: NoiseSpectrum,
    pub increments: NoiseSpectrum,
}

impl NoiseSpectra {
    /// Targets whose fitted exponent lies within `beta ± tol`.
    pub fn matching(&self, beta: f64, tol: f64) -> Vec<SpectrumTarget> {
        [&self.path, &self.increments]
            .into_iter()
            .filter(|s| matches!(&s.fit, Ok(f) if (f.beta_hat - beta).abs() <= tol))
            .map(|s| s.target)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QubitOutcome {
    /// Statistics of the χ(t) field driving the qubit.
    pub noise: EnsembleStats,
    pub paths: Vec<NoisePath>,
    pub metrics: EnsembleMetrics,
    pub decay: Result<DecayFit, String>,
    pub spectra: NoiseSpectra,
    /// Interior local maxima of the mean coherence.
    pub revivals: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Sde(SdeOutcome),
    Qubit(QubitOutcome),
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariantOutcome {
    pub label: Option<String>,
    pub outcome: Outcome,
}

/// The χ(t) ensemble of a scenario; trajectory `k` uses `base_seed + k`.
pub fn noise_field(s: &Scenario) -> Result<Vec<NoisePath>, CliError> {
    let integrator = SdeIntegrator::new(&s.spec, s.integrator)?;
    let ens = run_ensemble_with(&integrator, s.n_traj, s.base_seed, true)?;
    Ok(ens.paths.expect("paths kept"))
}

fn fit_band(estimate: &SpectrumEstimate, band: Option<(f64, f64)>) -> ((f64, f64), Result<SpectralFit, String>) {
    let band = band.unwrap_or_else(|| estimate.default_band());
    let fit = fit_spectral_exponent(estimate, band.0, band.1).map_err(|e| e.to_string());
    (band, fit)
}

/// Ensemble-averaged spectra of the paths and of their increments, each
/// fitted on `band` (or its default band).
pub fn noise_spectra(
    paths: &[NoisePath],
    method: PsdMethod,
    segment: Option<usize>,
    band: Option<(f64, f64)>,
) -> Result<NoiseSpectra, CliError> {
    let mut path_est = Vec::with_capacity(paths.len());
    let mut inc_est = Vec::with_capacity(paths.len());
    for p in paths {
        path_est.push(estimate_psd(p, method, segment)?);
        inc_est.push(estimate_psd_samples(&p.increments(), p.grid.dt(), method, segment)?);
    }
    let build = |target, spectra: &[SpectrumEstimate]| -> Result<NoiseSpectrum, CliError> {
        let mut estimate = average_spectra(spectra)?;
        let (band, fit) = fit_band(&estimate, band);
        estimate.fit = fit.clone().ok();
        Ok(NoiseSpectrum {
            target,
            estimate,
            band,
            fit,
        })
    };
    Ok(NoiseSpectra {
        path: build(SpectrumTarget::Path, &path_est)?,
        increments: build(SpectrumTarget::Increments, &inc_est)?,
    })
}

fn run_qubit(s: &Scenario) -> Result<QubitOutcome, CliError> {
    let q = s.qubit.as_ref().expect("qubit models carry a qubit setup");
    let paths = noise_field(s)?;
    let psi0 = q.initial_state.state();
    let runs = match s.model {
        Model::Unitary => run_unitary_ensemble(&q.params, &paths, &psi0)?,
        Model::Lindblad => {
            let lb = s.lindblad.as_ref().expect("lindblad model carries channel rates");
            run_lindblad_ensemble(&q.params, lb, &paths, &psi0.density())?
        }
        Model::Sde => unreachable!("sde scenarios have no qubit"),
    };
    let metrics = ensemble_metrics(&runs)?;
    let decay = fit_gaussian_decay(&metrics.grid, &metrics.fidelity.mean, s.analysis.decay_window)
        .map_err(|e| e.to_string());
    let spectra = noise_spectra(
        &paths,
        s.analysis.psd_method,
        s.analysis.psd_segment,
        s.analysis.spectral_band,
    )?;
    let revivals = local_maxima(&metrics.coherence.mean);
    let noise = EnsembleStats::from_paths(&paths)?;
    Ok(QubitOutcome {
        noise,
        paths: paths.into_iter().take(s.noise_paths).collect(),
        metrics,
        decay,
        spectra,
        revivals,
    })
}

pub fn run_variant(s: &Scenario) -> Result<Outcome, CliError> {
    match s.model {
        Model::Sde => {
            let integrator = SdeIntegrator::new(&s.spec, s.integrator)?;
            let keep = s.noise_paths > 0;
            let ens = run_ensemble_with(&integrator, s.n_traj, s.base_seed, keep)?;
            let paths = ens
                .paths
                .map(|p| p.into_iter().take(s.noise_paths).collect())
                .unwrap_or_default();
            Ok(Outcome::Sde(SdeOutcome {
                stats: ens.stats,
                paths,
            }))
        }
        Model::Unitary | Model::Lindblad => Ok(Outcome::Qubit(run_qubit(s)?)),
    }
}

pub fn execute(cfg: &LoadedConfig) -> Result<Vec<VariantOutcome>, CliError> {
    cfg.variants
        .iter()
        .map(|v| {
            Ok(VariantOutcome {
                label: v.label.clone(),
                outcome: run_variant(&v.scenario)?,
            })
        })
        .collect()
}

/// Coupling `δ` for which the scenario's unitary ensemble fits `T2* = target`
/// on its decay window.
pub fn calibrate(s: &Scenario, target: f64) -> Result<f64, CliError> {
    let q = s
        .qubit
        .as_ref()
        .ok_or_else(|| CliError::Schema(format!("scenario {} has no qubit to calibrate", s.name)))?;
    let paths = noise_field(s)?;
    Ok(calibrate_coupling(
        &q.params,
        &paths,
        &q.initial_state.state(),
        s.analysis.decay_window,
        target,
    )?)
}
