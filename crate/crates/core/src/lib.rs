//! Simulation of charge-noise-driven qubit decoherence.
//!
//! * [`noise`]: Wiener increments, fBm and memory multifractional Brownian
//!   motion `M(t) = ∫ K(t,s) dB^{H(s)}(s)`.
//! * [`sde`]: Euler–Maruyama integration of the observable `χ(t)` and
//!   ensemble statistics.
//! * [`qubit`]: two-level evolution under `H = -ω₀σz/2 + δχ(t)σx`, unitary or
//!   with Lindblad T1/T2 channels.
//! * [`analysis`]: PSD estimation, spectral-exponent, Gaussian-decay and
//!   Hurst fits.

pub mod analysis;
pub mod error;
pub mod grid;
pub mod noise;
pub mod qubit;
pub mod sde;

pub use error::{Error, Result};
pub use grid::TimeGrid;
