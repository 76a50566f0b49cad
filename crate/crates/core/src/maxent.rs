//! Maximum-entropy recovery of raw multipliers from prescribed raw moments.
//!
//! Maximizing `-Σ P ln P` subject to `⟨E^n⟩ = μ_n` has the dual
//!
//! ```text
//! D(β) = ln Z(β) + Σ_n β_n μ_n,
//! ```
//!
//! which is strictly convex on a spectrum with more than `N` distinct levels.
//! Its gradient is `μ - μ(β)` and its Hessian is the covariance matrix of the
//! monomials `E^1..E^N` under the current distribution. [`dual_gradient`]
//! returns the moment residual `μ(β) - μ`, i.e. the *negative* dual gradient.
//!
//! The solver runs damped Newton on `D` in affinely rescaled energies
//! `E' = (E - c) / s` with `E' ∈ [-1, 1]`, then maps the multipliers back to
//! raw form.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::extbg::{
    ext_distribution, log_partition, raw_moments, uncenter_multipliers, CenteredMultiplierVector,
    MomentVector, MultiplierVector, MAX_ORDER,
};
use crate::numeric::{binomial, powers};
use crate::spectrum::EnergySpectrum;

/// Largest ridge tried before giving up on a factorization.
const MAX_RIDGE: f64 = 1e-6;
/// Line search gives up once the step falls below this.
const POLISH_STEPS: usize = 3;
const MIN_STEP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Threshold on the sup norm of the moment residual, in rescaled units.
    pub tol: f64,
    pub max_iter: usize,
    /// First ridge added when the Hessian does not factor; escalated ×10.
    pub ridge: f64,
    pub armijo_c: f64,
    pub backtrack_factor: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 200,
            ridge: 1e-12,
            armijo_c: 1e-4,
            backtrack_factor: 0.5,
        }
    }
}

impl SolverOptions {
    fn validate(&self) -> Result<()> {
        let ok = self.tol > 0.0
            && self.max_iter >= 1
            && self.ridge >= 0.0
            && self.ridge.is_finite()
            && self.armijo_c > 0.0
            && self.armijo_c < 1.0
            && self.backtrack_factor > 0.0
            && self.backtrack_factor < 1.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!(
                "invalid solver options {self:?}"
            )))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverReport {
    pub converged: bool,
    /// Newton steps taken.
    pub iterations: usize,
    /// Sup norm of the moment residual in rescaled units.
    pub residual_norm: f64,
    /// Step length of the last accepted step (0 if none was taken).
    pub final_step_size: f64,
    /// Half-width `s` of the spectrum used to rescale energies.
    pub rescale_factor: f64,
    /// Center `c` of the spectrum used to shift energies.
    pub rescale_center: f64,
    /// Dual objective at the start and after every accepted step.
    pub objective_history: Vec<f64>,
}

fn check_order_match(m: &MultiplierVector, found: usize) -> Result<()> {
    if m.order() != found {
        return Err(Error::OrderMismatch {
            expected: m.order(),
            found,
        });
    }
    Ok(())
}

/// `ln Z(β) + Σ_n β_n μ_n`.
pub fn dual_objective(
    spectrum: &EnergySpectrum,
    m: &MultiplierVector,
    targets: &MomentVector,
) -> Result<f64> {
    check_order_match(m, targets.order())?;
    let linear: f64 = m
        .coeffs()
        .iter()
        .zip(targets.values())
        .map(|(b, mu)| b * mu)
        .sum();
    Ok(log_partition(spectrum, m)? + linear)
}

/// Moment residual `μ_n(β) - μ_n(target)`.
pub fn dual_gradient(
    spectrum: &EnergySpectrum,
    m: &MultiplierVector,
    targets: &MomentVector,
) -> Result<Vec<f64>> {
    check_order_match(m, targets.order())?;
    let (dist, _) = ext_distribution(spectrum, m)?;
    let current = raw_moments(&dist, spectrum, m.order())?;
    Ok(current
        .values()
        .iter()
        .zip(targets.values())
        .map(|(c, t)| c - t)
        .collect())
}

/// Covariance matrix `Cov(E^j, E^k)`, `j, k = 1..=order`, under the extended
/// distribution. This is the Hessian of [`dual_objective`].
pub fn dual_hessian(
    spectrum: &EnergySpectrum,
    m: &MultiplierVector,
    order: usize,
) -> Result<DMatrix<f64>> {
    check_order_match(m, order)?;
    let (dist, _) = ext_distribution(spectrum, m)?;
    Ok(covariance(spectrum.levels(), dist.probs(), order))
}

fn covariance(levels: &[f64], probs: &[f64], order: usize) -> DMatrix<f64> {
    let pows: Vec<Vec<f64>> = levels.iter().map(|&e| powers(e, order)).collect();
    let means: Vec<f64> = (1..=order)
        .map(|n| probs.iter().zip(&pows).map(|(p, pw)| p * pw[n]).sum())
        .collect();
    let mut cov = DMatrix::zeros(order, order);
    for (p, pw) in probs.iter().zip(&pows) {
        for j in 0..order {
            let dj = pw[j + 1] - means[j];
            for k in 0..=j {
                cov[(j, k)] += p * dj * (pw[k + 1] - means[k]);
            }
        }
    }
    for j in 0..order {
        for k in 0..j {
            cov[(k, j)] = cov[(j, k)];
        }
    }
    cov
}

/// Raw moments of `(E - center) / scale` from raw moments of `E`.
fn transform_moments(targets: &[f64], center: f64, scale: f64) -> Vec<f64> {
    let order = targets.len();
    let neg_c = powers(-center, order);
    let inv_s = powers(1.0 / scale, order);
    (1..=order)
        .map(|n| {
            let shifted: f64 = (0..=n)
                .map(|k| {
                    let mu_k = if k == 0 { 1.0 } else { targets[k - 1] };
                    binomial(n, k) * mu_k * neg_c[n - k]
                })
                .sum();
            shifted * inv_s[n]
        })
        .collect()
}

fn prescreen(spectrum: &EnergySpectrum, targets: &MomentVector) -> Result<()> {
    let order = targets.order();
    if order > MAX_ORDER {
        return Err(Error::OrderTooLarge(order));
    }
    if spectrum.len() < order + 1 {
        return Err(Error::TooFewLevels {
            levels: spectrum.len(),
            order,
        });
    }
    let mu = targets.values();
    let (lo, hi) = (spectrum.min_level(), spectrum.max_level());
    if !(lo..=hi).contains(&mu[0]) {
        return Err(Error::InfeasibleTargets(format!(
            "mean {} lies outside [{lo}, {hi}]",
            mu[0]
        )));
    }
    if order >= 2 && mu[1] < mu[0] * mu[0] {
        return Err(Error::InfeasibleTargets(format!(
            "second moment {} is below the squared mean {}",
            mu[1],
            mu[0] * mu[0]
        )));
    }
    Ok(())
}

/// Solves `(H + λI) x = rhs` by Cholesky, escalating `λ` from `ridge` by ×10
/// up to [`MAX_RIDGE`] when the factorization fails.
fn newton_direction(
    hessian: &DMatrix<f64>,
    rhs: &DVector<f64>,
    ridge: f64,
) -> Option<DVector<f64>> {
    if let Some(chol) = hessian.clone().cholesky() {
        return Some(chol.solve(rhs));
    }
    let n = hessian.nrows();
    let mut lambda = ridge;
    while lambda > 0.0 && lambda <= MAX_RIDGE * (1.0 + 1e-9) {
        let shifted = hessian + DMatrix::identity(n, n) * lambda;
        if let Some(chol) = shifted.cholesky() {
            return Some(chol.solve(rhs));
        }
        lambda *= 10.0;
    }
    None
}

/// State of one Newton iterate on the rescaled problem.
struct Iterate {
    beta: MultiplierVector,
    objective: f64,
    residual: Vec<f64>,
}

impl Iterate {
    fn at(
        spectrum: &EnergySpectrum,
        beta: MultiplierVector,
        targets: &MomentVector,
    ) -> Result<Self> {
        let objective = dual_objective(spectrum, &beta, targets)?;
        let residual = dual_gradient(spectrum, &beta, targets)?;
        Ok(Self {
            beta,
            objective,
            residual,
        })
    }

    fn residual_norm(&self) -> f64 {
        self.residual.iter().fold(0.0, |acc, r| acc.max(r.abs()))
    }
}

/// Finds the multipliers whose extended distribution on `spectrum` has the
/// raw moments `targets`.
///
/// Starts from the uniform distribution (`β = 0`) and runs Newton steps with
/// Armijo backtracking on the dual. Fails with [`Error::NotConverged`] when the
/// residual cannot be brought below `opts.tol`, which is what happens for
/// targets on or outside the boundary of the achievable moment set.
pub fn solve_multipliers(
    spectrum: &EnergySpectrum,
    targets: &MomentVector,
    opts: &SolverOptions,
) -> Result<(MultiplierVector, SolverReport)> {
    opts.validate()?;
    prescreen(spectrum, targets)?;
    let order = targets.order();

    let center = 0.5 * (spectrum.min_level() + spectrum.max_level());
    let scale = 0.5 * (spectrum.max_level() - spectrum.min_level());
    let scaled = spectrum.translate(-center)?.rescale(scale)?;
    let scaled_targets = MomentVector::new(transform_moments(targets.values(), center, scale))?;

    let mut current = Iterate::at(
        &scaled,
        MultiplierVector::new(vec![0.0; order])?,
        &scaled_targets,
    )?;
    let mut report = SolverReport {
        converged: false,
        iterations: 0,
        residual_norm: current.residual_norm(),
        final_step_size: 0.0,
        rescale_factor: scale,
        rescale_center: center,
        objective_history: vec![current.objective],
    };

    while report.residual_norm > opts.tol && report.iterations < opts.max_iter {
        let hessian = dual_hessian(&scaled, &current.beta, order)?;
        let rhs = DVector::from_column_slice(&current.residual);
        let Some(direction) = newton_direction(&hessian, &rhs, opts.ridge) else {
            break;
        };
        // ∇D = -residual, so the directional derivative is -residual · direction
        let slope = -rhs.dot(&direction);
        let mut step = 1.0;
        let accepted = loop {
            let trial: Vec<f64> = current
                .beta
                .coeffs()
                .iter()
                .zip(direction.iter())
                .map(|(b, d)| b + step * d)
                .collect();
            let candidate = MultiplierVector::new(trial)
                .and_then(|beta| Iterate::at(&scaled, beta, &scaled_targets));
            if let Ok(candidate) = candidate {
                if candidate.objective <= current.objective + opts.armijo_c * step * slope {
                    break Some(candidate);
                }
            }
            step *= opts.backtrack_factor;
            if step < MIN_STEP {
                break None;
            }
        };
        let Some(next) = accepted else {
            break;
        };
        current = next;
        report.iterations += 1;
        report.final_step_size = step;
        report.residual_norm = current.residual_norm();
        report.objective_history.push(current.objective);
    }

    report.converged = report.residual_norm <= opts.tol;
    if !report.converged {
        return Err(Error::NotConverged(Box::new(report)));
    }

    // A residual at tolerance can still leave ~cond(H)·tol error in the
    // multipliers; a few full Newton steps take it down to round-off.
    for _ in 0..POLISH_STEPS {
        let hessian = dual_hessian(&scaled, &current.beta, order)?;
        let rhs = DVector::from_column_slice(&current.residual);
        let Some(direction) = newton_direction(&hessian, &rhs, opts.ridge) else {
            break;
        };
        let trial: Vec<f64> = current
            .beta
            .coeffs()
            .iter()
            .zip(direction.iter())
            .map(|(b, d)| b + d)
            .collect();
        let Ok(candidate) = MultiplierVector::new(trial)
            .and_then(|beta| Iterate::at(&scaled, beta, &scaled_targets))
        else {
            break;
        };
        if candidate.residual_norm() >= current.residual_norm()
            || candidate.objective > current.objective
        {
            break;
        }
        current = candidate;
        report.residual_norm = current.residual_norm();
        report.final_step_size = 1.0;
        report.objective_history.push(current.objective);
    }

    let inv_s = powers(1.0 / scale, order);
    let centered = CenteredMultiplierVector::new(
        current
            .beta
            .coeffs()
            .iter()
            .enumerate()
            .map(|(i, b)| b * inv_s[i + 1])
            .collect(),
        center,
    )?;
    let (raw, _) = uncenter_multipliers(&centered);
    Ok((raw, report))
}
