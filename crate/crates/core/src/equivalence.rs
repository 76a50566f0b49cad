//! Correspondence between Tsallis parameters and extended Boltzmann-Gibbs
//! multipliers.
//!
//! Expanding the log of the q-weight in powers of `βE`,
//!
//! ```text
//! ln [1 - (1-q) βE]^{1/(1-q)} = -Σ_{n≥1} (1-q)^{n-1} (βE)^n / n,
//! ```
//!
//! identifies the raw multipliers `β_n = (1-q)^{n-1} β^n / n`. The series
//! converges on a level iff `|(1-q) β E| < 1`; within that domain the
//! order-`N` truncation approaches the q-distribution as `N` grows.

use crate::error::{Error, Result};
use crate::extbg::{ext_distribution, MultiplierVector, MAX_ORDER};
use crate::numeric::{one_minus, powers};
use crate::qstat::{deformation, q_distribution, QParams};
use crate::spectrum::EnergySpectrum;

/// Predicted coefficients below this magnitude are compared absolutely.
const TINY_COEFF: f64 = 1e-300;
const TINY_COEFF_ABS_TOL: f64 = 1e-12;

/// `(1-q)^{n-1} / n` for `n = 1..=order`, times `β^n`.
fn series_coeffs(eps: f64, beta: f64, order: usize) -> Vec<f64> {
    let eps_pow = powers(eps, order);
    let beta_pow = powers(beta, order);
    (1..=order)
        .map(|n| eps_pow[n - 1] / n as f64 * beta_pow[n])
        .collect()
}

/// `β_n = (1-q)^{n-1} β^n / n` for `n = 1..=order`.
pub fn q_to_multipliers(params: &QParams, order: usize) -> Result<MultiplierVector> {
    if order == 0 {
        return Err(Error::ZeroOrder);
    }
    if order > MAX_ORDER {
        return Err(Error::OrderTooLarge(order));
    }
    MultiplierVector::new(series_coeffs(params.deformation(), params.beta(), order))
}

/// Recovers `(q, β)` from multipliers that follow the q-series.
///
/// The candidate is `β = β_1`, `q = 1 - 2β_2/β_1²`; it is returned only when
/// every coefficient matches the series within `tol` (relative). Returns
/// `Ok(None)` when the vector is not a truncated q-series or the implied `β`
/// is negative.
pub fn multipliers_to_q(m: &MultiplierVector, tol: f64) -> Result<Option<QParams>> {
    let beta = m.coeffs()[0];
    if beta == 0.0 {
        return Err(Error::ZeroLeadingMultiplier);
    }
    let q = match m.get(2) {
        None => 1.0,
        Some(0.0) => 1.0,
        Some(b2) => one_minus(2.0 * b2 / (beta * beta)),
    };
    let params = match QParams::new(q, beta) {
        Ok(p) => p,
        Err(_) => return Ok(None),
    };
    let predicted = series_coeffs(deformation(q), beta, m.order());
    let consistent = m
        .coeffs()
        .iter()
        .zip(&predicted)
        .skip(1)
        .all(|(&actual, &pred)| {
            let diff = (actual - pred).abs();
            if pred.abs() < TINY_COEFF {
                diff <= TINY_COEFF_ABS_TOL
            } else {
                diff <= tol * pred.abs()
            }
        });
    Ok(consistent.then_some(params))
}

/// `q = 1 - 2δ`.
pub fn clayton_to_q(delta: f64) -> f64 {
    one_minus(2.0 * delta)
}

/// `max_i |(1-q) β E_i|`.
pub fn convergence_domain_ratio(spectrum: &EnergySpectrum, params: &QParams) -> f64 {
    let scale = (params.deformation() * params.beta()).abs();
    spectrum
        .levels()
        .iter()
        .map(|e| (scale * e).abs())
        .fold(0.0, f64::max)
}

/// Sup-norm distance between the order-`N` extended distribution and the
/// q-distribution, for each `N = 1..=max_order`.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport {
    pub orders: Vec<usize>,
    pub sup_distances: Vec<f64>,
    pub domain_ratio: f64,
}

impl EquivalenceReport {
    pub fn rows(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.orders
            .iter()
            .copied()
            .zip(self.sup_distances.iter().copied())
    }
}

pub fn equivalence_report(
    spectrum: &EnergySpectrum,
    params: &QParams,
    max_order: usize,
) -> Result<EquivalenceReport> {
    if max_order == 0 {
        return Err(Error::ZeroOrder);
    }
    if max_order > MAX_ORDER {
        return Err(Error::OrderTooLarge(max_order));
    }
    let domain_ratio = convergence_domain_ratio(spectrum, params);
    // also rejects NaN
    if domain_ratio.partial_cmp(&1.0) != Some(std::cmp::Ordering::Less) {
        return Err(Error::OutsideConvergenceDomain {
            ratio: domain_ratio,
        });
    }
    let (exact, _) = q_distribution(spectrum, params)?;
    let mut orders = Vec::with_capacity(max_order);
    let mut sup_distances = Vec::with_capacity(max_order);
    for order in 1..=max_order {
        let m = q_to_multipliers(params, order)?;
        let (truncated, _) = ext_distribution(spectrum, &m)?;
        orders.push(order);
        sup_distances.push(truncated.sup_distance(&exact)?);
    }
    Ok(EquivalenceReport {
        orders,
        sup_distances,
        domain_ratio,
    })
}
