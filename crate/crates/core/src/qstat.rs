//! Tsallis statistics on a discrete spectrum: the q-exponential distribution
//! `P_i ∝ g_i [1 - (1-q) β E_i]^{1/(1-q)}`, its generalized partition function,
//! the Tsallis entropy and the escort energy.
//!
//! The Boltzmann constant is fixed to 1, so entropies are in nats.

use crate::error::{Error, Result};
use crate::extbg::bg_entropy;
use crate::numeric::one_minus;
use crate::spectrum::{Distribution, EnergySpectrum};

/// Below this distance from 1 the entropic index is treated as exactly 1.
pub const BOLTZMANN_BRANCH_TOL: f64 = 1e-12;

/// Entropic index and inverse temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QParams {
    q: f64,
    beta: f64,
}

impl QParams {
    /// `beta` must be finite and nonnegative (zero gives the uniform
    /// distribution), `q` finite.
    pub fn new(q: f64, beta: f64) -> Result<Self> {
        if !q.is_finite() {
            return Err(Error::InvalidParams(format!("q must be finite, got {q}")));
        }
        if !(beta >= 0.0 && beta.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "beta must be finite and nonnegative, got {beta}"
            )));
        }
        Ok(Self { q, beta })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `1 - q`, see [`deformation`].
    pub fn deformation(&self) -> f64 {
        deformation(self.q)
    }

    pub fn is_boltzmann(&self) -> bool {
        is_boltzmann(self.q)
    }
}

/// `1 - q`, computed on the decimal form of `q` so that `deformation(0.98)`
/// is exactly the double nearest 0.02.
pub fn deformation(q: f64) -> f64 {
    one_minus(q)
}

fn is_boltzmann(q: f64) -> bool {
    (q - 1.0).abs() < BOLTZMANN_BRANCH_TOL
}

/// Log of the unnormalized q-weight of a single state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QLogWeight {
    Finite(f64),
    /// `1 - (1-q) β E ≤ 0`: the state carries no weight.
    CutOff,
}

impl QLogWeight {
    pub fn is_cut_off(&self) -> bool {
        matches!(self, QLogWeight::CutOff)
    }

    /// Finite value, or `-inf` for a cut-off state.
    pub fn value(&self) -> f64 {
        match *self {
            QLogWeight::Finite(v) => v,
            QLogWeight::CutOff => f64::NEG_INFINITY,
        }
    }
}

/// `ln [1 - (1-q) β E]^{1/(1-q)}`.
///
/// Evaluated as `-βE · ln(1+x)/x` with `x = -(1-q)βE`, which stays accurate
/// as `q → 1`.
pub fn q_log_weight(params: &QParams, energy: f64) -> QLogWeight {
    let be = params.beta * energy;
    if params.is_boltzmann() {
        return QLogWeight::Finite(-be);
    }
    let x = -params.deformation() * be;
    if x <= -1.0 {
        return QLogWeight::CutOff;
    }
    if x == 0.0 {
        return QLogWeight::Finite(-be);
    }
    QLogWeight::Finite(-be * (x.ln_1p() / x))
}

/// The q-exponential distribution on `spectrum` together with
/// `ln Ẑ_q = ln Σ g_i [1 - (1-q) β E_i]^{1/(1-q)}`.
///
/// Cut-off levels get probability exactly 0.
pub fn q_distribution(spectrum: &EnergySpectrum, params: &QParams) -> Result<(Distribution, f64)> {
    let exponents: Vec<f64> = spectrum
        .levels()
        .iter()
        .map(|&e| q_log_weight(params, e).value())
        .collect();
    Distribution::from_exponents(spectrum, &exponents)?.ok_or(Error::AllLevelsCutOff)
}

/// Which levels of `spectrum` are cut off under `params`.
pub fn cutoff_mask(spectrum: &EnergySpectrum, params: &QParams) -> Vec<bool> {
    spectrum
        .levels()
        .iter()
        .map(|&e| q_log_weight(params, e).is_cut_off())
        .collect()
}

/// Tsallis entropy `(1 - Σ P_i^q) / (q - 1)` over the levels of `dist`.
///
/// Computed as `-Σ P_i expm1((q-1) ln P_i) / (q-1)`, which equals the usual
/// form on a normalized vector and has no cancellation near `q = 1`.
/// Zero-probability levels contribute nothing.
pub fn tsallis_entropy(dist: &Distribution, q: f64) -> f64 {
    if is_boltzmann(q) {
        return bg_entropy(dist);
    }
    let q_minus_one = -deformation(q);
    -dist
        .probs()
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * (q_minus_one * p.ln()).exp_m1())
        .sum::<f64>()
        / q_minus_one
}

/// `S_A + S_B + (1-q) S_A S_B`, the entropy of two independent systems.
pub fn pseudo_additive_sum(s_a: f64, s_b: f64, q: f64) -> f64 {
    s_a + s_b + deformation(q) * s_a * s_b
}

/// `Σ g_i^{1-q} P_i^q E_i`: the escort energy `Tr ρ^q H` with each level's
/// probability split equally over its `g_i` states.
pub fn escort_energy(dist: &Distribution, spectrum: &EnergySpectrum, q: f64) -> Result<f64> {
    dist.check_aligned(spectrum)?;
    let eps = deformation(q);
    Ok(dist
        .probs()
        .iter()
        .zip(spectrum.levels())
        .zip(spectrum.degeneracies())
        .filter(|((&p, _), _)| p > 0.0)
        .map(|((&p, &e), &g)| (g as f64).powf(eps) * p.powf(q) * e)
        .sum())
}

/// Joint distribution of two independent systems, row-major
/// (`index = i * b.len() + j`).
pub fn product_distribution(a: &Distribution, b: &Distribution) -> Distribution {
    let joint: Vec<f64> = a
        .probs()
        .iter()
        .flat_map(|&pa| b.probs().iter().map(move |&pb| pa * pb))
        .collect();
    Distribution::from_weights(joint).expect("product of normalized distributions")
}
