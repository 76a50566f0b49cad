//! Extended Boltzmann-Gibbs distributions `P_i = g_i exp(-Σ_n β_n E_i^n) / Z`,
//! their moments and entropy, and the translation between raw multipliers and
//! multipliers of powers of `(E - Ē)`.
//!
//! The zeroth multiplier is never stored; normalization absorbs it as `ln Z`.

use crate::error::{Error, Result};
use crate::numeric::{binomial, powers};
use crate::spectrum::{Distribution, EnergySpectrum};

/// Largest supported truncation order.
pub const MAX_ORDER: usize = 20;

fn check_order(order: usize) -> Result<()> {
    if order == 0 {
        return Err(Error::ZeroOrder);
    }
    if order > MAX_ORDER {
        return Err(Error::OrderTooLarge(order));
    }
    Ok(())
}

fn check_coeffs(coeffs: &[f64]) -> Result<()> {
    check_order(coeffs.len())?;
    if let Some(i) = coeffs.iter().position(|c| !c.is_finite()) {
        return Err(Error::NonFiniteMultiplier(i + 1));
    }
    Ok(())
}

/// `Σ_n coeffs[n-1] x^n` by Horner's rule.
fn polynomial(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c) * x
}

/// Raw multipliers `(β_1, ..., β_N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierVector {
    coeffs: Vec<f64>,
}

impl MultiplierVector {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        check_coeffs(&coeffs)?;
        Ok(Self { coeffs })
    }

    /// Order-1 vector `(beta)`.
    pub fn boltzmann(beta: f64) -> Result<Self> {
        Self::new(vec![beta])
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `β_n` for `n` in `1..=order`.
    pub fn get(&self, n: usize) -> Option<f64> {
        n.checked_sub(1).and_then(|i| self.coeffs.get(i)).copied()
    }

    /// `Σ_n β_n E^n`.
    pub fn exponent_at(&self, energy: f64) -> f64 {
        polynomial(&self.coeffs, energy)
    }

    /// Parses the `n,beta_n` text format (n ascending from 1, `#` comments).
    pub fn parse(text: &str) -> Result<Self> {
        let mut coeffs = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                line: line_no,
                message,
            };
            let mut fields = line.split(',');
            let (n, value) = match (fields.next(), fields.next(), fields.next()) {
                (Some(n), Some(v), None) => (n.trim(), v.trim()),
                _ => return Err(parse_err("expected \"n,beta_n\"".into())),
            };
            let n: usize = n
                .parse()
                .map_err(|_| parse_err(format!("invalid index {n:?}")))?;
            if n != coeffs.len() + 1 {
                return Err(parse_err(format!(
                    "expected index {}, found {n}",
                    coeffs.len() + 1
                )));
            }
            let value: f64 = value
                .parse()
                .map_err(|_| parse_err(format!("invalid multiplier {value:?}")))?;
            if !value.is_finite() {
                return Err(parse_err("multiplier is not finite".into()));
            }
            coeffs.push(value);
        }
        Self::new(coeffs)
    }
}

/// Multipliers of powers of `(E - center)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CenteredMultiplierVector {
    coeffs: Vec<f64>,
    center: f64,
}

impl CenteredMultiplierVector {
    pub fn new(coeffs: Vec<f64>, center: f64) -> Result<Self> {
        check_coeffs(&coeffs)?;
        if !center.is_finite() {
            return Err(Error::InvalidParams(format!(
                "center must be finite, got {center}"
            )));
        }
        Ok(Self { coeffs, center })
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    /// `Σ_n β̃_n (E - Ē)^n`.
    pub fn exponent_at(&self, energy: f64) -> f64 {
        polynomial(&self.coeffs, energy - self.center)
    }
}

/// Raw moments `(⟨E⟩, ⟨E^2⟩, ..., ⟨E^N⟩)`, or central moments when produced by
/// [`central_moments`].
#[derive(Debug, Clone, PartialEq)]
pub struct MomentVector {
    values: Vec<f64>,
}

impl MomentVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::ZeroOrder);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("moments must be finite".into()));
        }
        Ok(Self { values })
    }

    pub fn order(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Clayton's quadratic correction `exp[-βE - δ(βE)^2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClaytonParams {
    beta: f64,
    delta: f64,
}

impl ClaytonParams {
    pub fn new(beta: f64, delta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "beta must be positive and finite, got {beta}"
            )));
        }
        if !delta.is_finite() {
            return Err(Error::InvalidParams(format!(
                "delta must be finite, got {delta}"
            )));
        }
        Ok(Self { beta, delta })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
}

fn exponents_with(spectrum: &EnergySpectrum, f: impl Fn(f64) -> f64) -> Result<Vec<f64>> {
    spectrum
        .levels()
        .iter()
        .enumerate()
        .map(|(index, &e)| {
            let x = -f(e);
            if x.is_finite() {
                Ok(x)
            } else {
                Err(Error::NonFiniteExponent { index })
            }
        })
        .collect()
}

fn distribution_with(
    spectrum: &EnergySpectrum,
    f: impl Fn(f64) -> f64,
) -> Result<(Distribution, f64)> {
    let exponents = exponents_with(spectrum, f)?;
    Ok(Distribution::from_exponents(spectrum, &exponents)?
        .expect("finite exponents always give positive weight"))
}

/// `ln Σ_i g_i exp(-Σ_n β_n E_i^n)`.
pub fn log_partition(spectrum: &EnergySpectrum, m: &MultiplierVector) -> Result<f64> {
    let exponents = exponents_with(spectrum, |e| m.exponent_at(e))?;
    Ok(spectrum
        .log_trace_exp(&exponents)?
        .expect("finite exponents always give positive weight"))
}

/// The extended distribution and its `ln Z`.
pub fn ext_distribution(
    spectrum: &EnergySpectrum,
    m: &MultiplierVector,
) -> Result<(Distribution, f64)> {
    distribution_with(spectrum, |e| m.exponent_at(e))
}

/// Distribution `∝ g_i exp(-Σ_n β̃_n (E_i - Ē)^n)` and its `ln Z`.
pub fn centered_distribution(
    spectrum: &EnergySpectrum,
    c: &CenteredMultiplierVector,
) -> Result<(Distribution, f64)> {
    distribution_with(spectrum, |e| c.exponent_at(e))
}

/// `-Σ P_i ln P_i` over levels, with `0 ln 0 = 0`.
pub fn bg_entropy(dist: &Distribution) -> f64 {
    -dist
        .probs()
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.ln())
        .sum::<f64>()
}

/// `μ_n = Σ_i P_i E_i^n` for `n = 1..=order`.
pub fn raw_moments(
    dist: &Distribution,
    spectrum: &EnergySpectrum,
    order: usize,
) -> Result<MomentVector> {
    dist.check_aligned(spectrum)?;
    if order == 0 {
        return Err(Error::ZeroOrder);
    }
    let mut values = vec![0.0; order];
    for (&p, &e) in dist.probs().iter().zip(spectrum.levels()) {
        let mut pow = 1.0;
        for v in values.iter_mut() {
            pow *= e;
            *v += p * pow;
        }
    }
    MomentVector::new(values)
}

/// `⟨(E - μ_1)^n⟩` for `n = 1..=order`; the first entry is exactly 0.
pub fn central_moments(
    dist: &Distribution,
    spectrum: &EnergySpectrum,
    order: usize,
) -> Result<MomentVector> {
    let mean = raw_moments(dist, spectrum, 1)?.values()[0];
    let mut values = vec![0.0; order];
    for (&p, &e) in dist.probs().iter().zip(spectrum.levels()) {
        let d = e - mean;
        let mut pow = d;
        for v in values.iter_mut().skip(1) {
            pow *= d;
            *v += p * pow;
        }
    }
    MomentVector::new(values)
}

/// Expands `Σ_n β̃_n (E - Ē)^n` in powers of `E`.
///
/// Returns the raw multipliers `β_k = Σ_{n≥k} C(n,k) β̃_n (-Ē)^{n-k}` and the
/// constant term `Σ_n β̃_n (-Ē)^n`, which normalization absorbs.
pub fn uncenter_multipliers(c: &CenteredMultiplierVector) -> (MultiplierVector, f64) {
    let order = c.order();
    let pow = powers(-c.center, order);
    let shift: f64 = c
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, &b)| b * pow[i + 1])
        .sum();
    let raw = (1..=order)
        .map(|k| {
            (k..=order)
                .map(|n| binomial(n, k) * c.coeffs[n - 1] * pow[n - k])
                .sum()
        })
        .collect();
    (
        MultiplierVector::new(raw).expect("order is preserved"),
        shift,
    )
}

/// Inverse of [`uncenter_multipliers`]: `β̃_n = Σ_{k≥n} C(k,n) β_k Ē^{k-n}`.
pub fn center_multipliers(m: &MultiplierVector, center: f64) -> CenteredMultiplierVector {
    let order = m.order();
    let pow = powers(center, order);
    let coeffs = (1..=order)
        .map(|n| {
            (n..=order)
                .map(|k| binomial(k, n) * m.coeffs[k - 1] * pow[k - n])
                .sum()
        })
        .collect();
    CenteredMultiplierVector::new(coeffs, center).expect("order is preserved")
}

/// `(β, δβ²)`.
pub fn clayton_multipliers(p: &ClaytonParams) -> MultiplierVector {
    let beta_sq = powers(p.beta, 2)[2];
    MultiplierVector::new(vec![p.beta, p.delta * beta_sq]).expect("finite Clayton parameters")
}
