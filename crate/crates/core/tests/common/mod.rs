//! Random instance generators and brute-force oracles shared by the
//! integration tests. Nothing here calls into the library's numerics.

#![allow(dead_code)]

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` strictly increasing levels drawn from `[lo, hi]`.
pub fn random_levels(rng: &mut impl Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    loop {
        let mut levels: Vec<f64> = (0..n).map(|_| rng.gen_range(lo..=hi)).collect();
        levels.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if levels.windows(2).all(|w| w[1] - w[0] > 1e-6 * (hi - lo)) {
            return levels;
        }
    }
}

pub fn random_degeneracies(rng: &mut impl Rng, n: usize, max: u64) -> Vec<u64> {
    (0..n).map(|_| rng.gen_range(1..=max)).collect()
}

/// Normalized probability vector of length `n`, occasionally with zeros.
pub fn random_probs(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let mut w: Vec<f64> = (0..n)
        .map(|_| {
            if n > 1 && rng.gen_bool(0.1) {
                0.0
            } else {
                rng.gen_range(0.0..1.0)
            }
        })
        .collect();
    if w.iter().all(|&x| x == 0.0) {
        w[0] = 1.0;
    }
    let s: f64 = w.iter().sum();
    w.iter().map(|x| x / s).collect()
}

/// `g_i exp(-Σ_n c_n E_i^n)` normalized, evaluated term by term with `powi`.
pub fn direct_ext(levels: &[f64], degs: &[u64], coeffs: &[f64]) -> Vec<f64> {
    let logs: Vec<f64> = levels
        .iter()
        .zip(degs)
        .map(|(&e, &g)| {
            let poly: f64 = coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| c * e.powi(i as i32 + 1))
                .sum();
            (g as f64).ln() - poly
        })
        .collect();
    normalize_logs(&logs)
}

pub fn direct_boltzmann(levels: &[f64], degs: &[u64], beta: f64) -> Vec<f64> {
    direct_ext(levels, degs, &[beta])
}

/// `g_i [1 - (1-q) β E_i]^{1/(1-q)}` normalized, in power form.
pub fn direct_q(levels: &[f64], degs: &[u64], q: f64, beta: f64) -> Vec<f64> {
    let w: Vec<f64> = levels
        .iter()
        .zip(degs)
        .map(|(&e, &g)| {
            let bracket = 1.0 - (1.0 - q) * beta * e;
            if bracket > 0.0 {
                g as f64 * bracket.powf(1.0 / (1.0 - q))
            } else {
                0.0
            }
        })
        .collect();
    let s: f64 = w.iter().sum();
    w.iter().map(|x| x / s).collect()
}

fn normalize_logs(logs: &[f64]) -> Vec<f64> {
    let m = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = logs.iter().map(|l| (l - m).exp()).collect();
    let s: f64 = w.iter().sum();
    w.iter().map(|x| x / s).collect()
}

pub fn moments(levels: &[f64], probs: &[f64], order: usize) -> Vec<f64> {
    (1..=order)
        .map(|n| {
            levels
                .iter()
                .zip(probs)
                .map(|(e, p)| p * e.powi(n as i32))
                .sum()
        })
        .collect()
}

/// Coefficients of `Σ_n b_n ((E - c)/s)^n` in powers of `E`, by repeated
/// polynomial multiplication. Index 0 is the constant term.
pub fn expand_affine(b: &[f64], c: f64, s: f64) -> Vec<f64> {
    let order = b.len();
    let mut total = vec![0.0; order + 1];
    // running power of the linear factor (E - c)/s, lowest degree first
    let mut power = vec![1.0];
    for &bn in b {
        let mut next = vec![0.0; power.len() + 1];
        for (k, &p) in power.iter().enumerate() {
            next[k] += -c / s * p;
            next[k + 1] += p / s;
        }
        power = next;
        for (k, &p) in power.iter().enumerate() {
            total[k] += bn * p;
        }
    }
    total
}

pub fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub fn sup_norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

pub fn shannon(p: &[f64]) -> f64 {
    -p.iter()
        .filter(|&&x| x > 0.0)
        .map(|x| x * x.ln())
        .sum::<f64>()
}

/// Textbook Tsallis entropy `(1 - Σ p^q)/(q - 1)`.
pub fn tsallis_textbook(p: &[f64], q: f64) -> f64 {
    (1.0 - p
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|x| x.powf(q))
        .sum::<f64>())
        / (q - 1.0)
}
