use super::evolve::{ensemble_metrics, run_unitary_ensemble};
use super::params::QubitParams;
use super::state::QuantumState;
use crate::analysis::{fit_gaussian_decay, DecayFit};
use crate::error::{Error, Result};
use crate::noise::NoisePath;

/// Gaussian-decay fit of the ensemble-mean fidelity for a given coupling.
pub fn ensemble_t2_star(
    params: &QubitParams,
    noise: &[NoisePath],
    psi0: &QuantumState,
    window: (f64, f64),
) -> Result<DecayFit> {
    let runs = run_unitary_ensemble(params, noise, psi0)?;
    let ens = ensemble_metrics(&runs)?;
    fit_gaussian_decay(&ens.grid, &ens.fidelity.mean, window)
}

/// Bisects the coupling `δ` until the fitted ensemble `T2*` equals `target`.
///
/// The bracket starts at `δ = 1e-3` and doubles until the fitted time drops
/// below the target; bisection then runs in log-space to relative width
/// `1e-9`.
pub fn calibrate_coupling(
    params: &QubitParams,
    noise: &[NoisePath],
    psi0: &QuantumState,
    window: (f64, f64),
    target: f64,
) -> Result<f64> {
    let t2 = |delta: f64| -> Result<f64> {
        let p = QubitParams { delta, ..*params };
        match ensemble_t2_star(&p, noise, psi0, window) {
            Ok(fit) => Ok(fit.t2_star),
            Err(Error::FitRejected(_)) => Ok(f64::INFINITY),
            Err(e) => Err(e),
        }
    };
    let mut lo = 1e-3;
    if t2(lo)? <= target {
        return Err(Error::FitRejected(format!(
            "T2* already below {target} at delta = {lo}"
        )));
    }
    let mut hi = 2.0 * lo;
    let mut doublings = 0;
    while t2(hi)? > target {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > 60 {
            return Err(Error::FitRejected(format!("T2* never reaches {target}")));
        }
    }
    while hi / lo - 1.0 > 1e-9 {
        let mid = (lo * hi).sqrt();
        if t2(mid)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo * hi).sqrt())
}
