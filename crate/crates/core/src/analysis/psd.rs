use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::stats::fit_line;
use crate::error::{Error, Result};
use crate::noise::NoisePath;

pub const MIN_PSD_SAMPLES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsdMethod {
    /// Single untapered transform of the whole record.
    Periodogram,
    /// Hann-tapered segments with 50% overlap, averaged (Welch).
    SegmentAveraged,
}

impl PsdMethod {
    pub fn name(&self) -> &'static str {
        match self {
            PsdMethod::Periodogram => "periodogram",
            PsdMethod::SegmentAveraged => "segment-averaged",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralFit {
    pub beta_hat: f64,
    pub stderr: f64,
    pub f_lo: f64,
    pub f_hi: f64,
    pub bins: usize,
}

/// One-sided PSD on the positive frequencies `k / (L dt)`, `k = 1..=L/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumEstimate {
    pub frequencies: Vec<f64>,
    pub psd: Vec<f64>,
    pub method: PsdMethod,
    pub segment_length: usize,
    pub fit: Option<SpectralFit>,
}

impl SpectrumEstimate {
    /// Excludes the lowest decade and the highest octave of the estimate.
    pub fn default_band(&self) -> (f64, f64) {
        let f_min = self.frequencies[0];
        let f_max = *self.frequencies.last().unwrap();
        (10.0 * f_min, f_max / 2.0)
    }

    pub fn fit_default_band(&mut self) -> Result<SpectralFit> {
        let (lo, hi) = self.default_band();
        let fit = fit_spectral_exponent(self, lo, hi)?;
        self.fit = Some(fit);
        Ok(fit)
    }
}

/// Periodic Hann taper `w_k = 1/2 - 1/2 cos(2πk/L)`.
pub fn hann(len: usize) -> Vec<f64> {
    (0..len)
        .map(|k| 0.5 - 0.5 * (2.0 * PI * k as f64 / len as f64).cos())
        .collect()
}

fn default_segment_length(n: usize) -> usize {
    let mut len = MIN_PSD_SAMPLES;
    while len * 2 <= n / 8 {
        len *= 2;
    }
    len.min(n)
}

/// One-sided transform of a mean-removed, optionally tapered segment.
/// Normalized by the taper power, which is `L` without a taper.
fn one_sided(planner: &mut FftPlanner<f64>, seg: &[f64], taper: Option<&[f64]>, dt: f64) -> Vec<f64> {
    let len = seg.len();
    let m = seg.iter().sum::<f64>() / len as f64;
    let mut buf: Vec<Complex64> = seg
        .iter()
        .enumerate()
        .map(|(k, v)| Complex64::new((v - m) * taper.map_or(1.0, |w| w[k]), 0.0))
        .collect();
    let norm = taper.map_or(len as f64, |w| w.iter().map(|x| x * x).sum());
    planner.plan_fft_forward(len).process(&mut buf);
    (1..=len / 2)
        .map(|k| {
            let two_sided = buf[k].norm_sqr() * dt / norm;
            if 2 * k == len {
                two_sided
            } else {
                2.0 * two_sided
            }
        })
        .collect()
}

pub fn estimate_psd(
    path: &NoisePath,
    method: PsdMethod,
    segment_length: Option<usize>,
) -> Result<SpectrumEstimate> {
    estimate_psd_samples(&path.values, path.grid.dt(), method, segment_length)
}

/// PSD of a uniformly sampled series with spacing `dt`.
pub fn estimate_psd_samples(
    values: &[f64],
    dt: f64,
    method: PsdMethod,
    segment_length: Option<usize>,
) -> Result<SpectrumEstimate> {
    let n = values.len();
    if n < MIN_PSD_SAMPLES {
        return Err(Error::Validation(format!(
            "PSD needs at least {MIN_PSD_SAMPLES} samples, got {n}"
        )));
    }
    let mut planner = FftPlanner::new();
    let (len, psd) = match method {
        PsdMethod::Periodogram => (n, one_sided(&mut planner, values, None, dt)),
        PsdMethod::SegmentAveraged => {
            let len = segment_length.unwrap_or_else(|| default_segment_length(n));
            if !(MIN_PSD_SAMPLES..=n).contains(&len) {
                return Err(Error::Validation(format!(
                    "segment length {len} outside [{MIN_PSD_SAMPLES}, {n}]"
                )));
            }
            let taper = hann(len);
            let step = len / 2;
            let mut acc = vec![0.0; len / 2];
            let mut count = 0usize;
            let mut start = 0;
            while start + len <= n {
                let p = one_sided(&mut planner, &values[start..start + len], Some(&taper), dt);
                acc.iter_mut().zip(p).for_each(|(a, v)| *a += v);
                count += 1;
                start += step;
            }
            acc.iter_mut().for_each(|a| *a /= count as f64);
            (len, acc)
        }
    };
    let df = 1.0 / (len as f64 * dt);
    Ok(SpectrumEstimate {
        frequencies: (1..=len / 2).map(|k| k as f64 * df).collect(),
        psd,
        method,
        segment_length: len,
        fit: None,
    })
}

/// Bin-wise mean of spectra computed with identical settings.
pub fn average_spectra(spectra: &[SpectrumEstimate]) -> Result<SpectrumEstimate> {
    let first = spectra
        .first()
        .ok_or_else(|| Error::Validation("no spectra to average".into()))?;
    if spectra.iter().any(|s| s.frequencies != first.frequencies) {
        return Err(Error::Validation("spectra have different frequency grids".into()));
    }
    let mut psd = vec![0.0; first.psd.len()];
    for s in spectra {
        psd.iter_mut().zip(&s.psd).for_each(|(a, v)| *a += v);
    }
    psd.iter_mut().for_each(|a| *a /= spectra.len() as f64);
    Ok(SpectrumEstimate {
        psd,
        fit: None,
        ..first.clone()
    })
}

/// Least-squares slope of `log psd` against `log f` on `[f_lo, f_hi]`;
/// `beta_hat = -slope`.
pub fn fit_spectral_exponent(spec: &SpectrumEstimate, f_lo: f64, f_hi: f64) -> Result<SpectralFit> {
    let mut x = Vec::new();
    let mut y = Vec::new();
    for (&f, &p) in spec.frequencies.iter().zip(&spec.psd) {
        if f < f_lo || f > f_hi {
            continue;
        }
        if !(p > 0.0) {
            return Err(Error::Validation(format!("non-positive PSD {p} at f = {f}")));
        }
        x.push(f.ln());
        y.push(p.ln());
    }
    if x.len() < 10 {
        return Err(Error::Validation(format!(
            "spectral fit needs at least 10 bins in [{f_lo}, {f_hi}], got {}",
            x.len()
        )));
    }
    let line = fit_line(&x, &y)?;
    Ok(SpectralFit {
        beta_hat: -line.slope,
        stderr: line.slope_stderr,
        f_lo,
        f_hi,
        bins: x.len(),
    })
}
