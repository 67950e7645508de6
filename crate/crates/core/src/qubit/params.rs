use std::f64::consts::PI;

use num_complex::Complex64;

use super::mat2::Mat2;
use crate::error::{domain, Result};

/// `ω₀ = 2π × 4.5 GHz` expressed in rad/μs.
pub const DEFAULT_OMEGA0: f64 = 2.0 * PI * 4.5e3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    /// Full `-ω₀σz/2 + δχσx`.
    Lab,
    /// `δχσx` only; the `σz` precession is removed.
    Rotating,
}

impl Frame {
    pub fn name(&self) -> &'static str {
        match self {
            Frame::Lab => "lab",
            Frame::Rotating => "rotating",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitParams {
    /// Angular frequency, rad/μs.
    pub omega0: f64,
    /// Coupling, rad/μs per unit χ.
    pub delta: f64,
    /// Recorded only.
    pub ej_ec_ratio: f64,
    /// Recorded only.
    pub delta_ng: f64,
    pub frame: Frame,
}

impl Default for QubitParams {
    fn default() -> Self {
        Self {
            omega0: DEFAULT_OMEGA0,
            delta: 0.0,
            ej_ec_ratio: 50.0,
            delta_ng: 0.1,
            frame: Frame::Rotating,
        }
    }
}

impl QubitParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.omega0.is_finite() && self.omega0 > 0.0) {
            return Err(domain("omega0", self.omega0, "finite and > 0"));
        }
        if !self.delta.is_finite() {
            return Err(domain("delta", self.delta, "finite"));
        }
        Ok(())
    }

    /// `(h_x, h_z)` with `H = h_x σx + h_z σz` in the configured frame.
    pub(crate) fn field(&self, chi: f64) -> (f64, f64) {
        let hz = match self.frame {
            Frame::Lab => -0.5 * self.omega0,
            Frame::Rotating => 0.0,
        };
        (self.delta * chi, hz)
    }
}

/// Lab-frame Hamiltonian `[[-ω₀/2, δχ], [δχ, ω₀/2]]`.
pub fn hamiltonian(params: &QubitParams, chi: f64) -> Mat2 {
    let hx = Complex64::new(params.delta * chi, 0.0);
    let hz = Complex64::new(0.5 * params.omega0, 0.0);
    Mat2::new(-hz, hx, hx, hz)
}

/// Hamiltonian in the frame the evolution runs in.
pub fn frame_hamiltonian(params: &QubitParams, chi: f64) -> Mat2 {
    let (hx, hz) = params.field(chi);
    Mat2::sigma_x().scale_re(hx) + Mat2::sigma_z().scale_re(hz)
}

/// `exp(-i H dt)` for `H = h_x σx + h_z σz`.
pub(crate) fn propagator(hx: f64, hz: f64, dt: f64) -> Mat2 {
    let omega = hx.hypot(hz);
    if omega == 0.0 {
        return Mat2::identity();
    }
    let (s, c) = (omega * dt).sin_cos();
    let k = s / omega;
    Mat2::new(
        Complex64::new(c, -k * hz),
        Complex64::new(0.0, -k * hx),
        Complex64::new(0.0, -k * hx),
        Complex64::new(c, k * hz),
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LindbladParams {
    pub t1: f64,
    pub t2: f64,
}

impl LindbladParams {
    /// Infinite times switch the corresponding channel off.
    pub fn new(t1: f64, t2: f64) -> Result<Self> {
        if !(t1 > 0.0) {
            return Err(domain("t1", t1, "> 0"));
        }
        if !(t2 > 0.0) {
            return Err(domain("t2", t2, "> 0"));
        }
        if t2 > 2.0 * t1 {
            return Err(domain("t2", t2, "<= 2 t1"));
        }
        Ok(Self { t1, t2 })
    }

    pub fn relaxation_rate(&self) -> f64 {
        self.t1.recip()
    }

    /// `γφ = 1/T2 - 1/(2 T1)`
    pub fn dephasing_rate(&self) -> f64 {
        (self.t2.recip() - 0.5 * self.t1.recip()).max(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(omega0: f64, delta: f64) -> QubitParams {
        QubitParams {
            omega0,
            delta,
            frame: Frame::Lab,
            ..Default::default()
        }
    }

    #[test]
    fn hamiltonian_spectrum() {
        let p = params(10.0, 2.0);
        let h0 = hamiltonian(&p, 0.0);
        assert_eq!(h0.hermitian_eigenvalues(), [-5.0, 5.0]);
        for chi in [-1.3, 0.4, 2.0] {
            let h = hamiltonian(&p, chi);
            assert_eq!(h.hermiticity_error(), 0.0);
            let expect = (25.0f64 + (2.0 * chi).powi(2)).sqrt();
            let [lo, hi] = h.hermitian_eigenvalues();
            assert!((hi - expect).abs() < 1e-12 && (lo + expect).abs() < 1e-12);
        }
        assert_eq!(frame_hamiltonian(&p, 0.7), h0 + Mat2::sigma_x().scale_re(1.4));
    }

    #[test]
    fn pure_sigma_x_eigenvectors() {
        let h = hamiltonian(&params(f64::MIN_POSITIVE, 1.0), 1.0);
        let [lo, hi] = h.hermitian_eigenvalues();
        assert!((lo + 1.0).abs() < 1e-15 && (hi - 1.0).abs() < 1e-15);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        // H (|0⟩ ± |1⟩)/√2 = ±(|0⟩ ± |1⟩)/√2
        for sign in [1.0, -1.0] {
            let v = [Complex64::new(r, 0.0), Complex64::new(sign * r, 0.0)];
            for row in 0..2 {
                let hv = h.get(row, 0) * v[0] + h.get(row, 1) * v[1];
                assert!((hv - v[row] * sign).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn propagator_is_unitary() {
        let u = propagator(0.3, -4.0, 0.7);
        let p = u * u.dagger();
        assert!((p - Mat2::identity()).0.iter().flatten().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn lindblad_validation() {
        assert!(LindbladParams::new(50.0, 30.0).is_ok());
        assert!(LindbladParams::new(50.0, 100.0).is_ok());
        assert!(LindbladParams::new(50.0, 100.1).is_err());
        assert!(LindbladParams::new(0.0, 1.0).is_err());
        assert!(LindbladParams::new(f64::INFINITY, f64::INFINITY).is_ok());
        let lb = LindbladParams::new(50.0, 30.0).unwrap();
        assert!((lb.dephasing_rate() - (1.0 / 30.0 - 0.01)).abs() < 1e-15);
    }
}
