use statrs::function::gamma::gamma;

use super::hurst::HurstProfile;
use crate::error::{domain, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum KernelShape {
    /// `(t-s)^(H(t)-1/2) / Γ(H(t)+1/2)`
    Mmfbm(HurstProfile),
    /// `(t-s)^(β/2-1) / Γ(β/2)`
    PowerLaw { beta: f64 },
}

/// Causal memory kernel `K(t, s)`, zero for `s >= t`.
#[derive(Debug, Clone, PartialEq)]
pub struct MemoryKernel {
    shape: KernelShape,
    cutoff: Option<f64>,
}

impl MemoryKernel {
    pub fn mmfbm(hurst: HurstProfile) -> Self {
        Self {
            shape: KernelShape::Mmfbm(hurst),
            cutoff: None,
        }
    }

    pub fn power_law(beta: f64) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(domain("beta", beta, "finite and > 0"));
        }
        Ok(Self {
            shape: KernelShape::PowerLaw { beta },
            cutoff: None,
        })
    }

    /// Multiplies the kernel by `exp(-(t-s)/tau)`.
    pub fn with_cutoff(mut self, tau: f64) -> Result<Self> {
        if !(tau.is_finite() && tau > 0.0) {
            return Err(domain("cutoff", tau, "finite and > 0"));
        }
        self.cutoff = Some(tau);
        Ok(self)
    }

    pub fn shape(&self) -> &KernelShape {
        &self.shape
    }

    pub fn cutoff(&self) -> Option<f64> {
        self.cutoff
    }

    pub fn hurst(&self) -> Option<&HurstProfile> {
        match &self.shape {
            KernelShape::Mmfbm(h) => Some(h),
            KernelShape::PowerLaw { .. } => None,
        }
    }

    /// True when `K(t, s)` depends on `t - s` only.
    pub fn is_stationary(&self) -> bool {
        match &self.shape {
            KernelShape::Mmfbm(h) => h.is_constant(),
            KernelShape::PowerLaw { .. } => true,
        }
    }

    /// Exponent and normalization at evaluation time `t`.
    pub(crate) fn exponent_and_norm(&self, t: f64) -> (f64, f64) {
        match &self.shape {
            KernelShape::Mmfbm(h) => {
                let h = h.value(t);
                (h - 0.5, 1.0 / gamma(h + 0.5))
            }
            KernelShape::PowerLaw { beta } => (beta / 2.0 - 1.0, 1.0 / gamma(beta / 2.0)),
        }
    }

    pub(crate) fn lag_weight(&self, exponent: f64, norm: f64, lag: f64) -> f64 {
        let base = lag.powf(exponent) * norm;
        match self.cutoff {
            Some(tau) => base * (-lag / tau).exp(),
            None => base,
        }
    }

    pub fn eval(&self, t: f64, s: f64) -> f64 {
        if s >= t {
            return 0.0;
        }
        let (exponent, norm) = self.exponent_and_norm(t);
        self.lag_weight(exponent, norm, t - s)
    }

    /// Regularity of the driving increments: `H(t_j)` for the multifractional
    /// kernel, `1/2` (Wiener increments) for the power-law kernel.
    pub fn increment_hurst(&self, t: f64) -> f64 {
        match &self.shape {
            KernelShape::Mmfbm(h) => h.value(t),
            KernelShape::PowerLaw { .. } => 0.5,
        }
    }
}
