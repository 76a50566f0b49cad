//! Small numeric helpers shared across modules.

use std::str::FromStr;

use rust_decimal::Decimal;

/// Exact binomial coefficient C(n, k) as an `f64`.
///
/// Computed in integer arithmetic; exact for every `n` up to 62, which covers
/// the order cap used throughout the crate.
pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut c: u64 = 1;
    for i in 0..k {
        // c * (n - i) is divisible by (i + 1) at every step
        c = c * (n - i) as u64 / (i as u64 + 1);
    }
    c as f64
}

/// `[1, x, x^2, ..., x^n]` by repeated multiplication.
pub(crate) fn powers(x: f64, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut p = 1.0;
    out.push(p);
    for _ in 0..n {
        p *= x;
        out.push(p);
    }
    out
}

/// `1 - x`, evaluated on the shortest decimal form of `x`.
///
/// The entropic index usually arrives as a short decimal literal (0.98, 1.1,
/// ...) that has no exact binary representation. Subtracting in decimal and
/// rounding once gives the double nearest to the intended `1 - x` (so
/// `one_minus(0.98) == 0.02`), where plain `1.0 - 0.98` would carry the
/// representation error of 0.98 into the deformation. Values whose decimal
/// form does not fit a 96-bit decimal fall back to binary subtraction.
pub(crate) fn one_minus(x: f64) -> f64 {
    if x == 1.0 {
        return 0.0;
    }
    let text = x.to_string();
    match Decimal::from_str(&text) {
        Ok(d) => match Decimal::ONE.checked_sub(d) {
            Some(diff) => f64::from_str(&diff.to_string()).unwrap_or(1.0 - x),
            None => 1.0 - x,
        },
        Err(_) => 1.0 - x,
    }
}

/// `ln Σ exp(a_i)` with the max-shift. Returns `None` if no term is finite.
///
/// `-inf` entries are allowed and contribute nothing.
pub(crate) fn log_sum_exp(terms: &[f64]) -> Option<f64> {
    let max = terms
        .iter()
        .copied()
        .filter(|t| t.is_finite())
        .fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return None;
    }
    let sum: f64 = terms.iter().map(|&t| (t - max).exp()).sum();
    Some(max + sum.ln())
}
