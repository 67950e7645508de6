use std::f64::consts::PI;

use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HurstShape {
    Constant(f64),
    /// `base + amplitude * sin(2π t / period)`
    Sinusoidal {
        base: f64,
        amplitude: f64,
        period: f64,
    },
}

/// Time-varying regularity `H(t)` on the domain `[0, horizon]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HurstProfile {
    shape: HurstShape,
    horizon: f64,
}

impl HurstProfile {
    pub fn constant(h: f64, horizon: f64) -> Result<Self> {
        Self::new(HurstShape::Constant(h), horizon)
    }

    pub fn sinusoidal(base: f64, amplitude: f64, period: f64, horizon: f64) -> Result<Self> {
        Self::new(
            HurstShape::Sinusoidal {
                base,
                amplitude,
                period,
            },
            horizon,
        )
    }

    pub fn new(shape: HurstShape, horizon: f64) -> Result<Self> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(domain("horizon", horizon, "finite and > 0"));
        }
        if let HurstShape::Sinusoidal { period, amplitude, .. } = shape {
            if !(period.is_finite() && period > 0.0) {
                return Err(domain("period", period, "finite and > 0"));
            }
            if !amplitude.is_finite() {
                return Err(domain("amplitude", amplitude, "finite"));
            }
        }
        let profile = Self { shape, horizon };
        let (lo, hi) = profile.range();
        for h in [lo, hi] {
            if !(h > 0.0 && h < 1.0) {
                return Err(domain("hurst", h, "(0, 1) over the whole horizon"));
            }
        }
        Ok(profile)
    }

    pub fn shape(&self) -> HurstShape {
        self.shape
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn is_constant(&self) -> bool {
        match self.shape {
            HurstShape::Constant(_) => true,
            HurstShape::Sinusoidal { amplitude, .. } => amplitude == 0.0,
        }
    }

    /// `H(t)`, checked against the profile domain.
    pub fn at(&self, t: f64) -> Result<f64> {
        if !(0.0..=self.horizon).contains(&t) {
            return Err(domain("t", t, "[0, horizon]"));
        }
        Ok(self.value(t))
    }

    pub(crate) fn value(&self, t: f64) -> f64 {
        match self.shape {
            HurstShape::Constant(h) => h,
            HurstShape::Sinusoidal {
                base,
                amplitude,
                period,
            } => base + amplitude * (2.0 * PI * t / period).sin(),
        }
    }

    /// Minimum and maximum of `H` over `[0, horizon]`, from the endpoints and
    /// every interior critical point of the sinusoid.
    pub fn range(&self) -> (f64, f64) {
        match self.shape {
            HurstShape::Constant(h) => (h, h),
            HurstShape::Sinusoidal { period, .. } => {
                let mut lo = self.value(0.0).min(self.value(self.horizon));
                let mut hi = self.value(0.0).max(self.value(self.horizon));
                let mut k = 0usize;
                loop {
                    let t = period * (0.25 + 0.5 * k as f64);
                    if t > self.horizon {
                        break;
                    }
                    let h = self.value(t);
                    lo = lo.min(h);
                    hi = hi.max(h);
                    k += 1;
                }
                (lo, hi)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_profile_values() {
        let p = HurstProfile::sinusoidal(0.3, 0.2, 1.0, 1.0).unwrap();
        assert_eq!(p.at(0.0).unwrap(), 0.3);
        assert!((p.at(0.25).unwrap() - 0.5).abs() < 1e-15);
        let (lo, hi) = p.range();
        assert!((lo - 0.1).abs() < 1e-12 && (hi - 0.5).abs() < 1e-12);
    }

    #[test]
    fn qubit_profile_midpoint() {
        let t = 5.0;
        let p = HurstProfile::sinusoidal(0.7, 0.1, t, t).unwrap();
        assert!((p.at(t / 2.0).unwrap() - 0.7).abs() < 1e-15);
    }

    #[test]
    fn out_of_domain_time() {
        let p = HurstProfile::constant(0.5, 1.0).unwrap();
        assert!(p.at(-1e-9).is_err());
        assert!(p.at(1.0 + 1e-9).is_err());
        assert!(p.at(1.0).is_ok());
    }

    #[test]
    fn rejects_profiles_leaving_unit_interval() {
        assert!(HurstProfile::constant(0.0, 1.0).is_err());
        assert!(HurstProfile::constant(1.0, 1.0).is_err());
        assert!(HurstProfile::sinusoidal(0.9, 0.1, 1.0, 1.0).is_err());
        // the peak at t = 0.25 lies outside a short horizon, so it is not reached
        assert!(HurstProfile::sinusoidal(0.9, 0.2, 1.0, 0.01).is_ok());
        assert!(HurstProfile::sinusoidal(0.9, 0.2, 1.0, 0.3).is_err());
    }
}
