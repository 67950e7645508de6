use super::stats::fit_line_weighted;
use crate::error::{Error, Result};
use crate::noise::NoisePath;

pub const MIN_HURST_SAMPLES: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HurstEstimate {
    pub hurst: f64,
    pub stderr: f64,
}

/// Aggregated-variance estimate from the path increments.
///
/// Increments are summed in non-overlapping blocks of `m = 1, 2, 4, ...` up to
/// an eighth of the record; `Var[block sum] ∝ m^{2H}`. The log-log line is
/// fitted with weights equal to each scale's degrees of freedom, since the
/// variance of a log sample variance falls like `1/(blocks - 1)`.
pub fn estimate_hurst(path: &NoisePath) -> Result<HurstEstimate> {
    if path.values.len() < MIN_HURST_SAMPLES {
        return Err(Error::Validation(format!(
            "Hurst estimate needs at least {MIN_HURST_SAMPLES} samples, got {}",
            path.values.len()
        )));
    }
    let inc = path.increments();
    let scale_ref = inc.iter().map(|v| v * v).sum::<f64>() / inc.len() as f64;
    let mut x = Vec::new();
    let mut y = Vec::new();
    let mut w = Vec::new();
    let mut m = 1;
    while m <= inc.len() / 8 {
        let sums: Vec<f64> = inc.chunks_exact(m).map(|c| c.iter().sum()).collect();
        let nb = sums.len();
        let mean = sums.iter().sum::<f64>() / nb as f64;
        let var = sums.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (nb - 1) as f64;
        if !(var > 1e-16 * scale_ref * (m * m) as f64) {
            return Err(Error::DegenerateVariance(format!(
                "increment variance {var:e} at scale {m}"
            )));
        }
        x.push((m as f64).ln());
        y.push(var.ln());
        w.push((nb - 1) as f64);
        m *= 2;
    }
    let line = fit_line_weighted(&x, &y, &w)?;
    Ok(HurstEstimate {
        hurst: line.slope / 2.0,
        stderr: line.slope_stderr / 2.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::TimeGrid;

    #[test]
    fn ramp_is_degenerate() {
        let g = TimeGrid::new(1.0, 4096).unwrap();
        let path = NoisePath {
            values: g.times().iter().map(|t| 3.0 * t - 1.0).collect(),
            grid: g,
        };
        assert!(matches!(estimate_hurst(&path), Err(Error::DegenerateVariance(_))));
    }

    #[test]
    fn short_path_rejected() {
        let g = TimeGrid::new(1.0, 1000).unwrap();
        let path = NoisePath {
            values: vec![0.0; 1001],
            grid: g,
        };
        assert!(matches!(estimate_hurst(&path), Err(Error::Validation(_))));
    }
}
