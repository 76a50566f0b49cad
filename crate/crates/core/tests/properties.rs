mod common;

use proptest::prelude::*;

use common::*;
use tsallis_bg::equivalence::{
    convergence_domain_ratio, equivalence_report, multipliers_to_q, q_to_multipliers,
};
use tsallis_bg::extbg::{
    bg_entropy, center_multipliers, centered_distribution, central_moments, ext_distribution,
    log_partition, raw_moments, uncenter_multipliers,
};
use tsallis_bg::maxent::{dual_gradient, dual_hessian, dual_objective, solve_multipliers};
use tsallis_bg::qstat::{
    product_distribution, pseudo_additive_sum, q_distribution, q_log_weight, tsallis_entropy,
};
use tsallis_bg::{
    CenteredMultiplierVector, Distribution, EnergySpectrum, MomentVector, MultiplierVector,
    QParams, SolverOptions,
};

fn spectrum_strategy(max_levels: usize) -> impl Strategy<Value = EnergySpectrum> {
    (1..=max_levels, any::<u64>()).prop_map(|(n, seed)| {
        let mut r = rng(seed);
        let levels = random_levels(&mut r, n, -3.0, 3.0);
        let degs = random_degeneracies(&mut r, n, 4);
        EnergySpectrum::new(levels, degs).unwrap()
    })
}

fn distribution_strategy(max_len: usize) -> impl Strategy<Value = Distribution> {
    (1..=max_len, any::<u64>())
        .prop_map(|(n, seed)| Distribution::new(random_probs(&mut rng(seed), n)).unwrap())
}

fn multipliers_strategy(max_order: usize, bound: f64) -> impl Strategy<Value = MultiplierVector> {
    prop::collection::vec(-bound..=bound, 1..=max_order)
        .prop_map(|c| MultiplierVector::new(c).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn trace_of_ones_counts_states(s in spectrum_strategy(30)) {
        let ones = vec![1.0; s.len()];
        prop_assert_eq!(s.trace_of(&ones).unwrap(), s.state_count() as f64);
    }

    #[test]
    fn rescale_round_trip(s in spectrum_strategy(30), a in 1e-3f64..1e3) {
        let back = s.rescale(a).unwrap().rescale(1.0 / a).unwrap();
        for (x, y) in back.levels().iter().zip(s.levels()) {
            prop_assert!((x - y).abs() <= 1e-15 * y.abs());
        }
        prop_assert_eq!(back.degeneracies(), s.degeneracies());
    }

    #[test]
    fn q_distribution_is_normalized(
        s in spectrum_strategy(30),
        q in 0.1f64..3.0,
        beta in 0.0f64..3.0,
    ) {
        let p = QParams::new(q, beta).unwrap();
        if let Ok((d, _)) = q_distribution(&s, &p) {
            let sum: f64 = d.probs().iter().sum();
            prop_assert!((sum - 1.0).abs() <= 1e-12);
            let oracle = direct_q(s.levels(), s.degeneracies(), q, beta);
            prop_assert!(sup_diff(d.probs(), &oracle) <= 1e-12);
        }
    }

    #[test]
    fn pseudo_additivity(
        a in distribution_strategy(12),
        b in distribution_strategy(12),
        qi in 0usize..5,
    ) {
        let q = [0.5, 0.9, 1.5, 2.0, 3.0][qi];
        let joint = tsallis_entropy(&product_distribution(&a, &b), q);
        let composed = pseudo_additive_sum(tsallis_entropy(&a, q), tsallis_entropy(&b, q), q);
        prop_assert!((joint - composed).abs() <= 1e-12 * joint.abs().max(1.0));
    }

    #[test]
    fn tsallis_entropy_is_continuous_at_one(d in distribution_strategy(20)) {
        let bg = bg_entropy(&d);
        for q in [1.0 - 1e-6, 1.0 + 1e-6] {
            prop_assert!((tsallis_entropy(&d, q) - bg).abs() <= 1e-5);
        }
    }

    #[test]
    fn tsallis_entropy_matches_textbook(d in distribution_strategy(20), q in 0.2f64..4.0) {
        prop_assume!((q - 1.0).abs() > 1e-3);
        let t = tsallis_textbook(d.probs(), q);
        prop_assert!((tsallis_entropy(&d, q) - t).abs() <= 1e-12 * t.abs().max(1.0));
    }

    #[test]
    fn boltzmann_limit(
        s in spectrum_strategy(30),
        beta in 0.0f64..3.0,
        sign in prop::bool::ANY,
    ) {
        let q = if sign { 1.0 + 1e-8 } else { 1.0 - 1e-8 };
        let (d, _) = q_distribution(&s, &QParams::new(q, beta).unwrap()).unwrap();
        let exact = direct_boltzmann(s.levels(), s.degeneracies(), beta);
        prop_assert!(sup_diff(d.probs(), &exact) <= 1e-6);
    }

    #[test]
    fn cutoff_is_monotone_below_one(
        s in spectrum_strategy(30),
        q in 0.0f64..1.0,
        beta in 0.01f64..5.0,
    ) {
        let p = QParams::new(q, beta).unwrap();
        let mask: Vec<bool> = s.levels().iter().map(|&e| q_log_weight(&p, e).is_cut_off()).collect();
        if let Some(first) = mask.iter().position(|&c| c) {
            prop_assert!(mask[first..].iter().all(|&c| c));
        }
    }

    #[test]
    fn shift_covariance(
        s in spectrum_strategy(20),
        coeffs in prop::collection::vec(-1.0f64..1.0, 1..=4),
        center in -1.0f64..1.0,
    ) {
        let c = CenteredMultiplierVector::new(coeffs, center).unwrap();
        let (raw, shift) = uncenter_multipliers(&c);
        let (d_c, z_c) = centered_distribution(&s, &c).unwrap();
        let (d_r, z_r) = ext_distribution(&s, &raw).unwrap();
        let gap = d_c.sup_distance(&d_r).unwrap();
        prop_assert!(gap <= 1e-14, "gap={:e}", gap);
        prop_assert!((z_c - (z_r - shift)).abs() <= 1e-12 * z_r.abs().max(1.0));
    }

    #[test]
    fn center_uncenter_round_trip(
        coeffs in prop::collection::vec(-10.0f64..10.0, 1..=8),
        center in -5.0f64..5.0,
    ) {
        // relative to the largest coefficient in either representation:
        // storing the intermediate form already costs eps times its size
        let m = MultiplierVector::new(coeffs).unwrap();
        let mid = center_multipliers(&m, center);
        let (back, _) = uncenter_multipliers(&mid);
        let scale = sup_norm(m.coeffs()).max(sup_norm(mid.coeffs()));
        prop_assert!(sup_diff(back.coeffs(), m.coeffs()) <= 1e-9 * scale);

        let c = CenteredMultiplierVector::new(m.coeffs().to_vec(), center).unwrap();
        let (raw, _) = uncenter_multipliers(&c);
        let again = center_multipliers(&raw, center);
        let scale = sup_norm(c.coeffs()).max(sup_norm(raw.coeffs()));
        prop_assert!(sup_diff(again.coeffs(), c.coeffs()) <= 1e-9 * scale);
    }

    #[test]
    fn uncenter_matches_polynomial_expansion(
        coeffs in prop::collection::vec(-2.0f64..2.0, 1..=8),
        center in -2.0f64..2.0,
    ) {
        let c = CenteredMultiplierVector::new(coeffs.clone(), center).unwrap();
        let (raw, shift) = uncenter_multipliers(&c);
        let expanded = expand_affine(&coeffs, center, 1.0);
        let scale = sup_norm(&expanded).max(1.0);
        prop_assert!((shift - expanded[0]).abs() <= 1e-12 * scale);
        prop_assert!(sup_diff(raw.coeffs(), &expanded[1..]) <= 1e-12 * scale);
    }

    #[test]
    fn pure_boltzmann_multipliers(s in spectrum_strategy(20), beta in -2.0f64..2.0, pad in 0usize..5) {
        let mut coeffs = vec![beta];
        coeffs.extend(std::iter::repeat_n(0.0, pad));
        let (a, _) = ext_distribution(&s, &MultiplierVector::new(coeffs).unwrap()).unwrap();
        let (b, _) = ext_distribution(&s, &MultiplierVector::boltzmann(beta).unwrap()).unwrap();
        prop_assert_eq!(&a, &b);
        let exact = direct_boltzmann(s.levels(), s.degeneracies(), beta);
        prop_assert!(sup_diff(a.probs(), &exact) <= 1e-14);
    }

    #[test]
    fn moment_binomial_identity(
        s in spectrum_strategy(20),
        m in multipliers_strategy(3, 1.0),
        order in 1usize..=6,
    ) {
        let (d, _) = ext_distribution(&s, &m).unwrap();
        let raw = raw_moments(&d, &s, order).unwrap();
        let central = central_moments(&d, &s, order).unwrap();
        let mean = raw.values()[0];
        for n in 1..=order {
            let mut sum = (-mean).powi(n as i32);
            for k in 1..=n {
                sum += binom(n, k) * raw.values()[k - 1] * (-mean).powi((n - k) as i32);
            }
            prop_assert!((central.values()[n - 1] - sum).abs() <= 1e-10);
        }
        if order >= 2 {
            prop_assert!(raw.values()[1] >= mean * mean - 1e-15);
        }
    }

    #[test]
    fn legendre_identity(
        n in 2usize..30,
        seed in any::<u64>(),
        m in multipliers_strategy(4, 1.0),
    ) {
        let mut r = rng(seed);
        let levels = random_levels(&mut r, n, -2.0, 2.0);
        let s = EnergySpectrum::nondegenerate(levels).unwrap();
        let (d, log_z) = ext_distribution(&s, &m).unwrap();
        let mu = raw_moments(&d, &s, m.order()).unwrap();
        let rhs = log_z + m.coeffs().iter().zip(mu.values()).map(|(b, x)| b * x).sum::<f64>();
        prop_assert!((bg_entropy(&d) - rhs).abs() <= 1e-10);
    }

    #[test]
    fn legendre_identity_with_degeneracy(s in spectrum_strategy(20), m in multipliers_strategy(3, 1.0)) {
        // state-level entropy adds Σ P_i ln g_i to the per-level entropy
        let (d, log_z) = ext_distribution(&s, &m).unwrap();
        let mu = raw_moments(&d, &s, m.order()).unwrap();
        let rhs = log_z + m.coeffs().iter().zip(mu.values()).map(|(b, x)| b * x).sum::<f64>();
        let degeneracy_term: f64 = d
            .probs()
            .iter()
            .zip(s.degeneracies())
            .map(|(p, &g)| p * (g as f64).ln())
            .sum();
        prop_assert!((bg_entropy(&d) + degeneracy_term - rhs).abs() <= 1e-10);
    }

    #[test]
    fn exact_at_q_one(s in spectrum_strategy(20), beta in 0.0f64..3.0, order in 1usize..=20) {
        let r = equivalence_report(&s, &QParams::new(1.0, beta).unwrap(), order).unwrap();
        prop_assert!(r.sup_distances.iter().all(|&d| d <= 1e-15));
    }

    #[test]
    fn truncation_error_is_bounded_by_series_remainder(
        n in 2usize..15,
        seed in any::<u64>(),
        q in 0.2f64..1.8,
        r_target in 0.05f64..0.5,
    ) {
        // the exponent remainder past order N is at most
        // ρ_N = r^{N+1} / (|1-q| (N+1) (1-r)), and a sup-norm exponent
        // perturbation ρ moves each probability by at most expm1(2ρ)
        prop_assume!((q - 1.0).abs() > 1e-3);
        let mut rg = rng(seed);
        let s = EnergySpectrum::nondegenerate(random_levels(&mut rg, n, 0.0, 1.0)).unwrap();
        let (report, ratio) = report_at_ratio(&s, q, r_target);
        for (order, d) in report.rows() {
            let rho = ratio.powi(order as i32 + 1)
                / ((1.0 - q).abs() * (order as f64 + 1.0) * (1.0 - ratio));
            let bound = (2.0 * rho).exp_m1();
            prop_assert!(d <= bound + 1e-15, "N={} d={:e} bound={:e}", order, d, bound);
        }
    }

    #[test]
    fn gradient_matches_finite_differences(
        n in 5usize..15,
        seed in any::<u64>(),
        m in multipliers_strategy(4, 2.0),
    ) {
        let mut r = rng(seed);
        let s = EnergySpectrum::nondegenerate(random_levels(&mut r, n, -1.0, 1.0)).unwrap();
        let targets = MomentVector::new(moments(s.levels(), &random_probs(&mut r, n), m.order())).unwrap();
        let g = dual_gradient(&s, &m, &targets).unwrap();
        let h = 1e-5;
        let fd: Vec<f64> = (0..m.order())
            .map(|i| {
                let shifted = |delta: f64| {
                    let mut c = m.coeffs().to_vec();
                    c[i] += delta;
                    dual_objective(&s, &MultiplierVector::new(c).unwrap(), &targets).unwrap()
                };
                (shifted(h) - shifted(-h)) / (2.0 * h)
            })
            .collect();
        // dual_gradient is the moment residual, the negative of ∇D
        let neg: Vec<f64> = g.iter().map(|x| -x).collect();
        prop_assert!(sup_diff(&fd, &neg) <= 1e-6 * sup_norm(&neg).max(1e-3));
    }

    #[test]
    fn hessian_is_psd_and_matches_jacobian(
        n in 5usize..15,
        seed in any::<u64>(),
        m in multipliers_strategy(4, 2.0),
    ) {
        let mut r = rng(seed);
        let s = EnergySpectrum::nondegenerate(random_levels(&mut r, n, -1.0, 1.0)).unwrap();
        let order = m.order();
        let targets = MomentVector::new(vec![0.0; order]).unwrap();
        let hess = dual_hessian(&s, &m, order).unwrap();
        let eig = hess.clone().symmetric_eigenvalues();
        prop_assert!(eig.iter().all(|&v| v >= -1e-10));
        let h = 1e-5;
        let mut worst: f64 = 0.0;
        for k in 0..order {
            let grad_at = |delta: f64| {
                let mut c = m.coeffs().to_vec();
                c[k] += delta;
                dual_gradient(&s, &MultiplierVector::new(c).unwrap(), &targets).unwrap()
            };
            let (plus, minus) = (grad_at(h), grad_at(-h));
            for j in 0..order {
                let jac = (plus[j] - minus[j]) / (2.0 * h);
                worst = worst.max((-jac - hess[(j, k)]).abs());
            }
        }
        let scale = hess.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        prop_assert!(worst <= 1e-5 * scale.max(1e-6));
    }
}

fn report_at_ratio(
    s: &EnergySpectrum,
    q: f64,
    r_target: f64,
) -> (tsallis_bg::equivalence::EquivalenceReport, f64) {
    let beta = r_target / ((1.0 - q).abs() * s.max_level());
    let p = QParams::new(q, beta).unwrap();
    let ratio = convergence_domain_ratio(s, &p);
    (equivalence_report(s, &p, 20).unwrap(), ratio)
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k)
        .fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
        .round()
}

#[test]
fn inverse_map_round_trip_grid() {
    for q in [0.5, 0.9, 0.98, 1.0, 1.02, 1.5, 2.0] {
        for beta in [0.1, 1.0, 10.0] {
            for order in 2..=8 {
                let p = QParams::new(q, beta).unwrap();
                let m = q_to_multipliers(&p, order).unwrap();
                let back = multipliers_to_q(&m, 1e-9)
                    .unwrap()
                    .expect("consistent series");
                assert!((back.beta() - beta).abs() <= 1e-15 * beta);
                assert!((back.q() - q).abs() <= 1e-12, "q={q} beta={beta} N={order}");
            }
        }
    }
}

#[test]
fn solver_round_trip_and_determinism() {
    let mut r = rng(7);
    for _ in 0..40 {
        let n = r.gen_range(5..=30);
        let order = r.gen_range(1..=4);
        let levels = random_levels(&mut r, n, -2.0, 2.0);
        let degs = random_degeneracies(&mut r, n, 3);
        let s = EnergySpectrum::new(levels.clone(), degs.clone()).unwrap();
        let truth: Vec<f64> = (0..order).map(|_| r.gen_range(-1.0..1.0)).collect();
        let p = direct_ext(&levels, &degs, &truth);
        let targets = MomentVector::new(moments(&levels, &p, order)).unwrap();
        let opts = SolverOptions::default();
        let (m, report) = solve_multipliers(&s, &targets, &opts).unwrap();
        assert!(report.converged);
        assert!(report.objective_history.windows(2).all(|w| w[1] <= w[0]));
        let c = (levels[0] + levels[n - 1]) / 2.0;
        let sc = (levels[n - 1] - levels[0]) / 2.0;
        let scale = sup_norm(&expand_affine(&vec![1.0; order], c, sc)).max(1.0);
        assert!(
            sup_diff(m.coeffs(), &truth) <= 1e-7 * scale,
            "{:?} vs {truth:?}",
            m.coeffs()
        );
        let (m2, report2) = solve_multipliers(&s, &targets, &opts).unwrap();
        assert_eq!(m, m2);
        assert_eq!(report, report2);
    }
}

#[test]
fn log_partition_survives_large_exponents() {
    let s = EnergySpectrum::nondegenerate(vec![0.0, 50.0, 100.0]).unwrap();
    // exponents reach -1e4 and 1e4
    for beta in [-100.0, 100.0] {
        let m = MultiplierVector::boltzmann(beta).unwrap();
        let z = log_partition(&s, &m).unwrap();
        assert!(z.is_finite());
        let (d, _) = ext_distribution(&s, &m).unwrap();
        assert!((d.probs().iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }
}

use rand::Rng;
