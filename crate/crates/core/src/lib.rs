//! Tsallis q-exponential statistics and moment-constrained Boltzmann-Gibbs
//! statistics on finite discrete energy spectra.
//!
//! The two families meet through the multiplier map
//! `β_n = (1-q)^{n-1} β^n / n`: the Boltzmann-Gibbs distribution
//! `∝ exp(-Σ_n β_n E^n)` with those multipliers is the q-exponential
//! distribution `∝ [1 - (1-q) β E]^{1/(1-q)}` once all orders are kept.
//! Truncating at `N = 2` gives Clayton's quadratic correction
//! `exp[-βE - δ(βE)^2]` with `q = 1 - 2δ`.
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`spectrum`] | energy levels with degeneracies, per-level distributions, traces |
//! | [`qstat`] | q-exponential distribution, Tsallis entropy, escort energy |
//! | [`extbg`] | extended Boltzmann-Gibbs distribution, moments, centered multipliers |
//! | [`equivalence`] | the multiplier map, its inverse, truncation reports |
//! | [`maxent`] | Newton solver recovering multipliers from moments |
//! | [`cli`] | command-line front end writing CSV reports |
//!
//! ```
//! use tsallis_bg::{equivalence::q_to_multipliers, qstat::QParams};
//!
//! let m = q_to_multipliers(&QParams::new(0.98, 1.0).unwrap(), 2).unwrap();
//! assert_eq!(m.coeffs(), &[1.0, 0.01]);
//! ```
//!
//! All energies, multipliers and probabilities are `f64`; `k = 1`.

pub mod cli;
pub mod equivalence;
pub mod error;
pub mod extbg;
pub mod maxent;
mod numeric;
pub mod qstat;
pub mod spectrum;

pub use error::{Error, Result};
pub use extbg::{CenteredMultiplierVector, ClaytonParams, MomentVector, MultiplierVector};
pub use maxent::{SolverOptions, SolverReport};
pub use qstat::QParams;
pub use spectrum::{Distribution, EnergySpectrum};
