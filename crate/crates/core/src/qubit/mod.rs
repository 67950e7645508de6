//! Two-level dynamics driven by a classical noise field `χ(t)`.
//!
//! Basis `|0⟩` (ground, energy `-ω₀/2`) and `|1⟩`. Times are in μs and
//! frequencies in rad/μs. Metrics are `F = ⟨ψ₀|ρ|ψ₀⟩`, `C = |ρ₀₁|` and
//! `Pe = ρ₁₁`.

mod calibrate;
mod evolve;
mod mat2;
mod params;
mod state;

pub use calibrate::{calibrate_coupling, ensemble_t2_star};
pub use evolve::{
    ensemble_metrics, evolve_lindblad, evolve_unitary, run_lindblad_ensemble,
    run_unitary_ensemble, EnsembleMetrics, LindbladRun, MetricBand, QubitMetrics, UnitaryRun,
    RK4_MAX_PHASE_PER_STEP,
};
pub use mat2::Mat2;
pub use params::{
    frame_hamiltonian, hamiltonian, Frame, LindbladParams, QubitParams, DEFAULT_OMEGA0,
};
pub use state::{DensityMatrix, QuantumState};

/// Indices of strict interior local maxima, used to flag coherence revivals.
pub fn local_maxima(x: &[f64]) -> Vec<usize> {
    (1..x.len().saturating_sub(1))
        .filter(|&i| x[i] > x[i - 1] && x[i] > x[i + 1])
        .collect()
}
