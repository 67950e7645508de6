use crate::error::{domain, Result};

/// Uniform time discretization `t_i = i * dt`, `i = 0..=steps`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    total_time: f64,
    steps: usize,
    dt: f64,
}

impl TimeGrid {
    pub fn new(total_time: f64, steps: usize) -> Result<Self> {
        if !(total_time.is_finite() && total_time > 0.0) {
            return Err(domain("total_time", total_time, "finite and > 0"));
        }
        if steps == 0 {
            return Err(domain("steps", 0.0, ">= 1"));
        }
        Ok(Self {
            total_time,
            steps,
            dt: total_time / steps as f64,
        })
    }

    pub fn total_time(&self) -> f64 {
        self.total_time
    }

    /// Number of steps `N`; the grid has `N + 1` points.
    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Time of grid point `i`. The last point is pinned to `total_time`.
    pub fn time(&self, i: usize) -> f64 {
        if i == self.steps {
            self.total_time
        } else {
            i as f64 * self.dt
        }
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.steps).map(|i| self.time(i)).collect()
    }

    pub fn contains(&self, t: f64) -> bool {
        (0.0..=self.total_time).contains(&t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_and_spacing() {
        let g = TimeGrid::new(1.0, 500).unwrap();
        let t = g.times();
        assert_eq!(t.len(), 501);
        assert_eq!(t[0], 0.0);
        assert_eq!(t[500], 1.0);
        assert!(t.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(g.dt(), 1.0 / 500.0);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(TimeGrid::new(0.0, 10).is_err());
        assert!(TimeGrid::new(-1.0, 10).is_err());
        assert!(TimeGrid::new(f64::NAN, 10).is_err());
        assert!(TimeGrid::new(1.0, 0).is_err());
    }
}
