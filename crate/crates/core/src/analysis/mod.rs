//! Spectral, decay and roughness estimators used to validate simulated paths.

mod decay;
mod hurst;
mod psd;
pub mod stats;

pub use decay::{fit_gaussian_decay, DecayFit};
pub use hurst::{estimate_hurst, HurstEstimate, MIN_HURST_SAMPLES};
pub use psd::{
    average_spectra, estimate_psd, estimate_psd_samples, fit_spectral_exponent, hann, PsdMethod,
    SpectralFit, SpectrumEstimate, MIN_PSD_SAMPLES,
};
