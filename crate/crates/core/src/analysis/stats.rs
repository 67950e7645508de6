//! Small descriptive-statistics and regression helpers.

use crate::error::{Error, Result};

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Sample standard deviation (`n - 1` denominator); zero for a single value.
pub fn std_dev(x: &[f64]) -> f64 {
    if x.len() < 2 {
        return 0.0;
    }
    let m = mean(x);
    (x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (x.len() - 1) as f64).sqrt()
}

pub fn skewness(x: &[f64]) -> f64 {
    let m = mean(x);
    let n = x.len() as f64;
    let m2 = x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n;
    let m3 = x.iter().map(|v| (v - m).powi(3)).sum::<f64>() / n;
    m3 / m2.powf(1.5)
}

/// Pointwise mean and sample std across equally long rows, reduced in row
/// order.
pub fn pointwise_mean_std<R: AsRef<[f64]>>(rows: &[R]) -> (Vec<f64>, Vec<f64>) {
    let Some(first) = rows.first().map(|r| r.as_ref()) else {
        return (Vec::new(), Vec::new());
    };
    let n = rows.len();
    let len = first.len();
    // shifted by the first row: identical rows give an exact mean and zero std
    let mut mean = vec![0.0; len];
    for r in &rows[1..] {
        for ((m, v), f) in mean.iter_mut().zip(r.as_ref()).zip(first) {
            *m += v - f;
        }
    }
    mean.iter_mut()
        .zip(first)
        .for_each(|(m, f)| *m = f + *m / n as f64);
    let mut std = vec![0.0; len];
    if n > 1 {
        for r in rows {
            for ((s, v), m) in std.iter_mut().zip(r.as_ref()).zip(&mean) {
                *s += (v - m).powi(2);
            }
        }
        std.iter_mut()
            .for_each(|s| *s = (*s / (n - 1) as f64).sqrt());
    }
    (mean, std)
}

/// Sample autocorrelation at `lag` with the mean removed.
pub fn autocorrelation(x: &[f64], lag: usize) -> f64 {
    let m = mean(x);
    let denom: f64 = x.iter().map(|v| (v - m).powi(2)).sum();
    if lag >= x.len() || denom == 0.0 {
        return 0.0;
    }
    let num: f64 = x
        .iter()
        .zip(&x[lag..])
        .map(|(a, b)| (a - m) * (b - m))
        .sum();
    num / denom
}

fn ranks(x: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut r = vec![0.0; x.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && x[idx[j + 1]] == x[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            r[k] = avg;
        }
        i = j + 1;
    }
    r
}

pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let (mx, my) = (mean(x), mean(y));
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    sxy / (sxx * syy).sqrt()
}

/// Spearman rank correlation, ties given their average rank.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    pearson(&ranks(x), &ranks(y))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
}

/// Ordinary least squares `y = intercept + slope * x`.
pub fn fit_line(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    fit_line_weighted(x, y, &vec![1.0; x.len()])
}

/// Weighted least squares with weights proportional to inverse variances.
pub fn fit_line_weighted(x: &[f64], y: &[f64], w: &[f64]) -> Result<LinearFit> {
    let n = x.len();
    if n < 3 || y.len() != n || w.len() != n {
        return Err(Error::Validation(format!(
            "line fit needs at least 3 matching points, got {n}"
        )));
    }
    let sw: f64 = w.iter().sum();
    let xm = x.iter().zip(w).map(|(a, w)| a * w).sum::<f64>() / sw;
    let ym = y.iter().zip(w).map(|(b, w)| b * w).sum::<f64>() / sw;
    let sxx: f64 = x.iter().zip(w).map(|(a, w)| w * (a - xm).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Validation("line fit abscissae are all equal".into()));
    }
    let sxy: f64 = x
        .iter()
        .zip(y)
        .zip(w)
        .map(|((a, b), w)| w * (a - xm) * (b - ym))
        .sum();
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let rss: f64 = x
        .iter()
        .zip(y)
        .zip(w)
        .map(|((a, b), w)| w * (b - intercept - slope * a).powi(2))
        .sum();
    // weights are rescaled so that sum(w) = n before the residual variance
    let sigma2 = rss * n as f64 / sw / (n - 2) as f64;
    let slope_stderr = (sigma2 * n as f64 / sw / sxx).sqrt();
    Ok(LinearFit {
        slope,
        intercept,
        slope_stderr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let x: Vec<f64> = (0..10).map(f64::from).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 - 0.5 * v).collect();
        let f = fit_line(&x, &y).unwrap();
        assert!((f.slope + 0.5).abs() < 1e-14);
        assert!((f.intercept - 2.0).abs() < 1e-13);
        assert!(f.slope_stderr < 1e-12);
        let wf = fit_line_weighted(&x, &y, &[3.0, 1.0, 2.0, 5.0, 1.0, 1.0, 2.0, 7.0, 1.0, 1.0]).unwrap();
        assert!((wf.slope + 0.5).abs() < 1e-14);
    }

    #[test]
    fn spearman_with_ties() {
        let x = [1.0, 2.0, 3.0, 4.0];
        assert!((spearman(&x, &[1.0, 1.0, 2.0, 3.0]) - 0.948_683_298_050_513_8).abs() < 1e-12);
        assert!((spearman(&x, &[4.0, 3.0, 2.0, 1.0]) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn std_of_single_value_is_zero() {
        assert_eq!(std_dev(&[3.0]), 0.0);
        let (m, s) = pointwise_mean_std(&[vec![1.0, 2.0]]);
        assert_eq!(m, vec![1.0, 2.0]);
        assert_eq!(s, vec![0.0, 0.0]);
    }

    #[test]
    fn autocorrelation_of_alternating_series() {
        let x: Vec<f64> = (0..100).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        assert!((autocorrelation(&x, 1) + 0.99).abs() < 1e-12);
        assert!((autocorrelation(&x, 2) - 0.98).abs() < 1e-12);
    }
}
