//! Finite discrete energy spectra and the per-level probability vectors that
//! live on them.
//!
//! A spectrum is a strictly increasing list of energy levels `E_i`, each with
//! an integer degeneracy `g_i`. The trace of a diagonal operator `f(H)` is the
//! degeneracy-weighted sum `Σ g_i f(E_i)`. Distributions store the *total*
//! probability of each level, so degeneracy is already folded in.

use crate::error::{Error, Result};
use crate::numeric;

#[derive(Debug, Clone, PartialEq)]
pub struct EnergySpectrum {
    levels: Vec<f64>,
    degeneracies: Vec<u64>,
}

impl EnergySpectrum {
    pub fn new(levels: Vec<f64>, degeneracies: Vec<u64>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::EmptySpectrum);
        }
        if levels.len() != degeneracies.len() {
            return Err(Error::LengthMismatch {
                expected: levels.len(),
                found: degeneracies.len(),
            });
        }
        for (index, &e) in levels.iter().enumerate() {
            if !e.is_finite() {
                return Err(Error::NonFiniteLevel { index });
            }
        }
        for (index, w) in levels.windows(2).enumerate() {
            if w[1] <= w[0] {
                return Err(Error::UnsortedLevels {
                    index: index + 1,
                    previous: w[0],
                    value: w[1],
                });
            }
        }
        if let Some(index) = degeneracies.iter().position(|&g| g == 0) {
            return Err(Error::NonPositiveDegeneracy { index });
        }
        Ok(Self {
            levels,
            degeneracies,
        })
    }

    /// Spectrum with every degeneracy equal to 1.
    pub fn nondegenerate(levels: Vec<f64>) -> Result<Self> {
        let n = levels.len();
        Self::new(levels, vec![1; n])
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn degeneracies(&self) -> &[u64] {
        &self.degeneracies
    }

    /// Number of distinct levels.
    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// Total number of states, `Σ g_i`.
    pub fn state_count(&self) -> u64 {
        self.degeneracies.iter().sum()
    }

    pub fn min_level(&self) -> f64 {
        self.levels[0]
    }

    pub fn max_level(&self) -> f64 {
        self.levels[self.levels.len() - 1]
    }

    /// `Σ g_i · values_i`.
    pub fn trace_of(&self, values: &[f64]) -> Result<f64> {
        self.check_len(values.len())?;
        Ok(self
            .degeneracies
            .iter()
            .zip(values)
            .map(|(&g, &v)| g as f64 * v)
            .sum())
    }

    /// `ln Σ g_i exp(exponents_i)`, evaluated with the max-shift.
    ///
    /// Entries equal to `-inf` are zero-weight levels. Returns `None` when
    /// every level has zero weight.
    pub fn log_trace_exp(&self, exponents: &[f64]) -> Result<Option<f64>> {
        self.check_len(exponents.len())?;
        let terms: Vec<f64> = self.log_weights(exponents);
        Ok(numeric::log_sum_exp(&terms))
    }

    /// Levels divided by `scale`; degeneracies unchanged.
    pub fn rescale(&self, scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::NonPositiveScale(scale));
        }
        Self::new(
            self.levels.iter().map(|e| e / scale).collect(),
            self.degeneracies.clone(),
        )
    }

    /// Levels moved by `offset`; degeneracies unchanged.
    pub fn translate(&self, offset: f64) -> Result<Self> {
        Self::new(
            self.levels.iter().map(|e| e + offset).collect(),
            self.degeneracies.clone(),
        )
    }

    /// Parses the `energy,degeneracy` text format. Blank lines and lines
    /// starting with `#` are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut levels = Vec::new();
        let mut degeneracies = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split(',');
            let (energy, degeneracy) = match (fields.next(), fields.next(), fields.next()) {
                (Some(e), Some(g), None) => (e.trim(), g.trim()),
                _ => return Err(parse_err(line_no, "expected \"energy,degeneracy\"")),
            };
            let energy: f64 = energy
                .parse()
                .map_err(|_| parse_err(line_no, &format!("invalid energy {energy:?}")))?;
            let degeneracy: u64 = degeneracy
                .parse()
                .map_err(|_| parse_err(line_no, &format!("invalid degeneracy {degeneracy:?}")))?;
            if !energy.is_finite() {
                return Err(parse_err(line_no, "energy is not finite"));
            }
            if degeneracy == 0 {
                return Err(parse_err(line_no, "degeneracy must be a positive integer"));
            }
            levels.push(energy);
            degeneracies.push(degeneracy);
        }
        Self::new(levels, degeneracies)
    }

    pub(crate) fn check_len(&self, found: usize) -> Result<()> {
        if found != self.levels.len() {
            return Err(Error::LengthMismatch {
                expected: self.levels.len(),
                found,
            });
        }
        Ok(())
    }

    /// `ln g_i + exponents_i`, with `-inf` preserved.
    fn log_weights(&self, exponents: &[f64]) -> Vec<f64> {
        self.degeneracies
            .iter()
            .zip(exponents)
            .map(|(&g, &x)| (g as f64).ln() + x)
            .collect()
    }
}

fn parse_err(line: usize, message: &str) -> Error {
    Error::Parse {
        line,
        message: message.to_string(),
    }
}

/// Validated convenience constructor.
pub fn make_spectrum(levels: &[f64], degeneracies: &[u64]) -> Result<EnergySpectrum> {
    EnergySpectrum::new(levels.to_vec(), degeneracies.to_vec())
}

pub fn trace_of(spectrum: &EnergySpectrum, per_level_values: &[f64]) -> Result<f64> {
    spectrum.trace_of(per_level_values)
}

pub fn rescale(spectrum: &EnergySpectrum, scale: f64) -> Result<EnergySpectrum> {
    spectrum.rescale(scale)
}

/// Per-level probabilities, nonnegative and summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    probs: Vec<f64>,
}

impl Distribution {
    /// Allowed deviation of `Σ P_i` from 1.
    pub const NORMALIZATION_TOL: f64 = 1e-12;

    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::EmptySpectrum);
        }
        for (index, &value) in probs.iter().enumerate() {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(Error::InvalidProbability { index, value });
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > Self::NORMALIZATION_TOL {
            return Err(Error::NotNormalized(sum));
        }
        Ok(Self { probs })
    }

    /// Normalizes nonnegative weights.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        for (index, &value) in weights.iter().enumerate() {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(Error::InvalidProbability { index, value });
            }
        }
        let sum: f64 = weights.iter().sum();
        if sum.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
            return Err(Error::NotNormalized(sum));
        }
        Self::new(weights.into_iter().map(|w| w / sum).collect())
    }

    /// Builds `P_i = g_i exp(exponents_i) / Z` on `spectrum` and returns it
    /// with `ln Z`. `-inf` exponents give probability exactly 0.
    pub(crate) fn from_exponents(
        spectrum: &EnergySpectrum,
        exponents: &[f64],
    ) -> Result<Option<(Self, f64)>> {
        spectrum.check_len(exponents.len())?;
        let terms = spectrum.log_weights(exponents);
        let max = terms
            .iter()
            .copied()
            .filter(|t| t.is_finite())
            .fold(f64::NEG_INFINITY, f64::max);
        if !max.is_finite() {
            return Ok(None);
        }
        let shifted: Vec<f64> = terms.iter().map(|&t| (t - max).exp()).collect();
        let sum: f64 = shifted.iter().sum();
        let probs = shifted.into_iter().map(|w| w / sum).collect();
        Ok(Some((Self::new(probs)?, max + sum.ln())))
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptySpectrum);
        }
        Self::new(vec![1.0 / n as f64; n])
    }

    pub fn point_mass(n: usize, index: usize) -> Result<Self> {
        if index >= n {
            return Err(Error::LengthMismatch {
                expected: n,
                found: index + 1,
            });
        }
        let mut probs = vec![0.0; n];
        probs[index] = 1.0;
        Self::new(probs)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// `max_i |P_i - Q_i|`.
    pub fn sup_distance(&self, other: &Distribution) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    pub(crate) fn check_aligned(&self, spectrum: &EnergySpectrum) -> Result<()> {
        spectrum.check_len(self.len())
    }
}
