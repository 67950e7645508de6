use crate::error::{Error, Result};
use crate::grid::TimeGrid;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    /// `T2*` in `F(t) = exp(-(t/T2*)^2)`.
    pub t2_star: f64,
    pub stderr: f64,
    pub fit_window: (f64, f64),
    /// Standard deviation of `F - exp(-(t/T2*)^2)` on the window.
    pub residual_std: f64,
    pub points: usize,
}

impl DecayFit {
    pub fn model(&self, t: f64) -> f64 {
        (-(t / self.t2_star).powi(2)).exp()
    }
}

/// Regresses `-ln F` on `t²` through the origin over the window.
pub fn fit_gaussian_decay(grid: &TimeGrid, fidelity: &[f64], window: (f64, f64)) -> Result<DecayFit> {
    if fidelity.len() != grid.len() {
        return Err(Error::Validation(format!(
            "fidelity has {} samples for a grid of {}",
            fidelity.len(),
            grid.len()
        )));
    }
    let (lo, hi) = window;
    let mut ts = Vec::new();
    let mut fs = Vec::new();
    for (i, &f) in fidelity.iter().enumerate() {
        let t = grid.time(i);
        if t < lo || t > hi {
            continue;
        }
        if !(f > 0.0 && f <= 1.0 + 1e-9) {
            return Err(Error::Validation(format!("fidelity {f} at t = {t} outside (0, 1]")));
        }
        ts.push(t);
        fs.push(f.min(1.0));
    }
    if ts.len() < 3 {
        return Err(Error::Validation(format!(
            "decay fit needs at least 3 points in [{lo}, {hi}], got {}",
            ts.len()
        )));
    }
    let x: Vec<f64> = ts.iter().map(|t| t * t).collect();
    let y: Vec<f64> = fs.iter().map(|f| -f.ln()).collect();
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    let slope = x.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>() / sxx;
    if !(slope > 0.0) {
        return Err(Error::FitRejected(format!(
            "no decay on [{lo}, {hi}] (slope {slope})"
        )));
    }
    let n = x.len() as f64;
    let rss: f64 = x.iter().zip(&y).map(|(a, b)| (b - slope * a).powi(2)).sum();
    let slope_se = (rss / (n - 1.0) / sxx).sqrt();
    let t2_star = slope.sqrt().recip();
    let fit = DecayFit {
        t2_star,
        stderr: 0.5 * slope.powf(-1.5) * slope_se,
        fit_window: window,
        residual_std: 0.0,
        points: ts.len(),
    };
    let resid: Vec<f64> = ts.iter().zip(&fs).map(|(&t, f)| f - fit.model(t)).collect();
    let rm = resid.iter().sum::<f64>() / n;
    let residual_std = (resid.iter().map(|r| (r - rm).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    Ok(DecayFit { residual_std, ..fit })
}
