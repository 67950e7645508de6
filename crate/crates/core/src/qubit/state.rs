use num_complex::Complex64;

use super::mat2::Mat2;
use crate::error::{Error, Result};

pub const NORM_TOLERANCE: f64 = 1e-10;

/// Pure two-level state in the `|0⟩, |1⟩` basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantumState {
    amplitudes: [Complex64; 2],
}

impl QuantumState {
    pub fn new(a0: Complex64, a1: Complex64) -> Result<Self> {
        let s = Self::new_unchecked(a0, a1);
        if (s.norm_sqr() - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::Validation(format!(
                "state norm² {} differs from 1",
                s.norm_sqr()
            )));
        }
        Ok(s)
    }

    pub(crate) fn new_unchecked(a0: Complex64, a1: Complex64) -> Self {
        Self {
            amplitudes: [a0, a1],
        }
    }

    pub fn zero() -> Self {
        Self::new_unchecked(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
    }

    pub fn one() -> Self {
        Self::new_unchecked(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0))
    }

    /// `(|0⟩ + |1⟩)/√2`
    pub fn plus() -> Self {
        let a = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self::new_unchecked(a, a)
    }

    pub fn amplitudes(&self) -> [Complex64; 2] {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &QuantumState) -> Complex64 {
        self.amplitudes[0].conj() * other.amplitudes[0]
            + self.amplitudes[1].conj() * other.amplitudes[1]
    }

    pub fn apply(&self, u: &Mat2) -> QuantumState {
        let [a0, a1] = self.amplitudes;
        QuantumState::new_unchecked(
            u.get(0, 0) * a0 + u.get(0, 1) * a1,
            u.get(1, 0) * a0 + u.get(1, 1) * a1,
        )
    }

    pub fn density(&self) -> DensityMatrix {
        let [a0, a1] = self.amplitudes;
        DensityMatrix(Mat2::new(
            a0 * a0.conj(),
            a0 * a1.conj(),
            a1 * a0.conj(),
            a1 * a1.conj(),
        ))
    }
}

pub const HERMITICITY_TOLERANCE: f64 = 1e-12;
pub const TRACE_TOLERANCE: f64 = 1e-9;
pub const POSITIVITY_TOLERANCE: f64 = 1e-10;

/// 2×2 density operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(pub(crate) Mat2);

impl DensityMatrix {
    pub fn new(m: Mat2) -> Result<Self> {
        let rho = DensityMatrix(m);
        if m.hermiticity_error() > HERMITICITY_TOLERANCE {
            return Err(Error::Validation("density matrix is not Hermitian".into()));
        }
        if (rho.trace() - 1.0).abs() > TRACE_TOLERANCE {
            return Err(Error::Validation(format!("density matrix trace {}", rho.trace())));
        }
        if rho.min_eigenvalue() < -POSITIVITY_TOLERANCE {
            return Err(Error::Validation(format!(
                "density matrix eigenvalue {}",
                rho.min_eigenvalue()
            )));
        }
        Ok(rho)
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.0.hermitian_eigenvalues()[0]
    }

    pub fn excited_population(&self) -> f64 {
        self.0.get(1, 1).re
    }

    pub fn coherence(&self) -> f64 {
        self.0.get(0, 1).norm()
    }

    /// Uhlmann fidelity `Tr(ρσ) + 2√(det ρ det σ)`, exact for qubits; reduces
    /// to `⟨ψ|σ|ψ⟩` when `ρ = |ψ⟩⟨ψ|`.
    pub fn fidelity(&self, other: &DensityMatrix) -> f64 {
        let overlap = (self.0 * other.0).trace().re;
        let dets = (self.0.det().re * other.0.det().re).max(0.0);
        overlap + 2.0 * dets.sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unnormalized_state_rejected() {
        assert!(QuantumState::new(Complex64::new(1.0, 0.0), Complex64::new(0.1, 0.0)).is_err());
        assert!(QuantumState::new(Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)).is_ok());
    }

    #[test]
    fn density_validation() {
        assert!(DensityMatrix::new(QuantumState::plus().density().0).is_ok());
        let not_trace_one = Mat2::identity();
        assert!(DensityMatrix::new(not_trace_one).is_err());
        let negative = Mat2::new(
            Complex64::new(1.2, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(-0.2, 0.0),
        );
        assert!(DensityMatrix::new(negative).is_err());
        let non_hermitian = Mat2::new(
            Complex64::new(0.5, 0.0),
            Complex64::new(0.1, 0.0),
            Complex64::new(0.2, 0.0),
            Complex64::new(0.5, 0.0),
        );
        assert!(DensityMatrix::new(non_hermitian).is_err());
    }

    #[test]
    fn fidelity_of_pure_and_mixed() {
        let plus = QuantumState::plus().density();
        let zero = QuantumState::zero().density();
        assert!((plus.fidelity(&plus) - 1.0).abs() < 1e-15);
        assert!((plus.fidelity(&zero) - 0.5).abs() < 1e-15);
        let mixed = DensityMatrix(Mat2::identity().scale_re(0.5));
        assert!((mixed.fidelity(&mixed) - 1.0).abs() < 1e-15);
    }
}
