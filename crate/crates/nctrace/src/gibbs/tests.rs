use super::*;
use crate::algebra::{parse, Declaration, OperatorField};
use crate::calculus::Potential;
use crate::gibbs::oracle::power_moment;
use crate::randgen;

fn d(n: usize) -> Declaration {
    Declaration::scalar(n)
}

#[test]
fn catalan_values() {
    assert_eq!(catalan(0), 1.0);
    assert_eq!(catalan(2), 2.0);
    assert_eq!(catalan(3), 5.0);
    assert_eq!(catalan(6), 132.0);
}

#[test]
fn wick_oracle_matches_catalan_on_powers() {
    for n in 1..=6usize {
        let p = power_moment(&d(1), 1, 2 * n);
        assert_eq!(semicircle_wick(&p).unwrap(), catalan(n));
        let podd = power_moment(&d(1), 1, 2 * n - 1);
        assert_eq!(semicircle_wick(&podd).unwrap(), 0.0);
    }
}

#[test]
fn wick_oracle_crossing_moment_vanishes() {
    let p = parse("tr(x1*x2*x1*x2)", &d(2)).unwrap();
    assert_eq!(semicircle_wick(&p).unwrap(), 0.0);
    // the alternating word of length 2 pairs fine
    let q = parse("tr(x1*x2*x2*x1)", &d(2)).unwrap();
    assert_eq!(semicircle_wick(&q).unwrap(), 1.0);
}

#[test]
fn wick_oracle_factorizes_over_traces() {
    for a in 1..=3usize {
        for b in 1..=3usize {
            let p = parse(&format!("tr(x1^{})*tr(x2^{})", 2 * a, 2 * b), &d(2)).unwrap();
            assert_eq!(semicircle_wick(&p).unwrap(), catalan(a) * catalan(b));
        }
    }
}

#[test]
fn quartic_series_low_orders() {
    let m2 = quartic_m2_series(4).unwrap();
    assert_eq!(&m2[..3], &[1.0, -8.0, 144.0]);
    assert_eq!(m2[3], -3456.0);
    assert_eq!(m2[4], 96768.0);
    let all = quartic_moment_series(6, 1).unwrap();
    assert_eq!(all[4][0], 2.0);
    assert_eq!(all[4][1], -36.0);
    assert_eq!(all[6][0], 5.0);
    assert_eq!(all[6][1], -144.0);
}

#[test]
fn pade_evaluation_of_m2() {
    let c = quartic_m2_series(2).unwrap();
    let v = pade11(&c, 0.05).unwrap();
    assert!((v - 0.7894736842).abs() < 1e-9);
}

fn quick_v0_batch(n: usize, seed: u64) -> SampleBatch {
    let v0 = Potential::quadratic_base(1).unwrap();
    let cfg = EnsembleConfig::new(v0, n, seed).with_samples(600, 800, 2);
    sample_gibbs(&cfg).unwrap()
}

#[test]
fn mala_reaches_semicircle_moments_at_small_n() {
    let n = 48;
    let batch = quick_v0_batch(n, 1234);
    assert!(batch.acceptance_rate > 0.3 && batch.acceptance_rate < 0.8);
    let finite_n = 5.0 / (n * n) as f64;
    let m2 = batch.moment(&power_moment(&d(1), 1, 2), "m2").unwrap();
    assert!(
        (m2.mean.re - 1.0).abs() <= 3.0 * m2.stderr + finite_n,
        "m2 = {} +- {}",
        m2.mean.re,
        m2.stderr
    );
    let m4 = batch.moment(&power_moment(&d(1), 1, 4), "m4").unwrap();
    assert!((m4.mean.re - 2.0).abs() <= 3.0 * m4.stderr + 4.0 * finite_n);
}

#[test]
fn sampler_is_deterministic_for_fixed_seed() {
    let a = quick_v0_batch(16, 99);
    let b = quick_v0_batch(16, 99);
    let ma = a.moment(&power_moment(&d(1), 1, 2), "m2").unwrap();
    let mb = b.moment(&power_moment(&d(1), 1, 2), "m2").unwrap();
    assert_eq!(ma.mean, mb.mean);
    assert_eq!(ma.stderr, mb.stderr);
}

#[test]
fn chain_halves_agree() {
    let batch = quick_v0_batch(32, 7);
    let disc = batch.half_chain_discrepancy(&power_moment(&d(1), 1, 2)).unwrap();
    assert!(disc <= 3.0, "half-chain discrepancy {disc}");
}

#[test]
fn ds_residuals_vanish_for_v0() {
    let n = 32;
    let batch = quick_v0_batch(n, 2024);
    let v0 = Potential::quadratic_base(1).unwrap();
    // h = x: the limit residual is m2 - 1 in law
    let h = OperatorField::identity_vector(&d(1)).unwrap();
    let r = ds_residual(&batch, &h, &v0).unwrap();
    assert!(r.limit_residual.abs() <= 3.0 * r.limit_stderr + 5.0 / (n * n) as f64);
    assert!(r.exact_residual.abs() <= 3.0 * r.exact_stderr);

    // h = x^3 recovers the Catalan relation for m4
    let h3 = OperatorField::vector(vec![parse("x1^3", &d(1)).unwrap()]).unwrap();
    let r = ds_residual(&batch, &h3, &v0).unwrap();
    assert!(r.limit_residual.abs() <= 3.0 * r.limit_stderr + 20.0 / (n * n) as f64);
    assert!(r.exact_residual.abs() <= 3.0 * r.exact_stderr, "exact {:+.4} vs 3se {:.4}", r.exact_residual, 3.0 * r.exact_stderr);
}

#[test]
fn conditional_chain_of_product_measure_matches_unconditional() {
    // independent variables: conditioning on x2 leaves the x1 marginal alone
    let v = Potential::quadratic_base(2).unwrap();
    let n = 24;
    let mut rng = randgen::rng(5);
    let frozen = crate::matrix::HermTuple::gue(n, 1, &mut rng);
    let cfg = EnsembleConfig::new(v, n, 31)
        .with_samples(500, 600, 2)
        .with_conditioning(Conditioning {
            indices: vec![2],
            values: vec![frozen.mat(0).clone()],
        });
    let batch = sample_gibbs(&cfg).unwrap();
    let m2 = batch.moment(&power_moment(&d(2), 1, 2), "m2").unwrap();
    assert!((m2.mean.re - 1.0).abs() <= 3.0 * m2.stderr + 5.0 / (n * n) as f64);
    // the frozen component never moves
    for x in batch.samples.iter().step_by(100) {
        assert_eq!(x.mat(1), frozen.mat(0));
    }
}

#[test]
fn coupled_conditional_mean_is_linear_in_the_frozen_value() {
    // V = tr(x1^2)/2 + tr(x2^2)/2 + eps tr(x1 x2): conditionally Gaussian
    // with mean -eps X'
    let eps = 0.1;
    let w = parse("tr(x1*x2)", &d(2)).unwrap().scale_re(eps);
    let v = Potential::base_plus(&w).unwrap();
    let n = 24;
    let mut rng = randgen::rng(8);
    let frozen = crate::matrix::HermTuple::gue(n, 1, &mut rng);
    let cfg = EnsembleConfig::new(v, n, 77)
        .with_samples(800, 4000, 6)
        .with_conditioning(Conditioning {
            indices: vec![2],
            values: vec![frozen.mat(0).clone()],
        });
    let batch = sample_gibbs(&cfg).unwrap();
    let mean = super::marginal::matrix_mean(&batch, |x| Ok(x.mat(0).clone())).unwrap();
    let target = frozen.mat(0).scale(-eps);
    let dev = (&mean - &target).norm() / (n as f64).sqrt();
    assert!(dev < 0.05, "conditional mean deviation {dev}");
}

#[test]
fn marginal_gradient_of_independent_potential_is_identity() {
    let v = Potential::quadratic_base(2).unwrap();
    let n = 16;
    let mut rng = randgen::rng(13);
    let xp = crate::matrix::HermTuple::gue(n, 1, &mut rng);
    let base = EnsembleConfig::new(v.clone(), n, 5).with_samples(400, 500, 2);
    let est = marginal_gradient_estimate(&v, &base, &[2], &[xp.mat(0).clone()]).unwrap();
    let dev = (&est[0].0 - xp.mat(0)).norm() / (n as f64).sqrt();
    assert!(dev < 0.05, "marginal gradient deviation {dev}");
}

#[test]
fn marginal_gradient_of_coupled_quadratic_shrinks() {
    let eps = 0.1;
    let w = parse("tr(x1*x2)", &d(2)).unwrap().scale_re(eps);
    let v = Potential::base_plus(&w).unwrap();
    let n = 24;
    let mut rng = randgen::rng(17);
    let xp = crate::matrix::HermTuple::gue(n, 1, &mut rng);
    let base = EnsembleConfig::new(v.clone(), n, 6).with_samples(600, 800, 2);
    let est = marginal_gradient_estimate(&v, &base, &[2], &[xp.mat(0).clone()]).unwrap();
    let target = xp.mat(0).scale(1.0 - eps * eps);
    let dev = (&est[0].0 - &target).norm() / (n as f64).sqrt();
    assert!(dev < 0.05, "marginal gradient deviation {dev}");
}

#[test]
fn spectral_support_of_semicircle() {
    let batch = quick_v0_batch(64, 55);
    let edges = spectral_support_check(&batch);
    let (lo, hi) = edges[0];
    assert!(hi > 1.75 && hi < 2.35, "upper edge {hi}");
    assert!(lo < -1.75 && lo > -2.35, "lower edge {lo}");
    assert!((hi + lo).abs() < 0.2, "edges not symmetric: {lo} {hi}");
}

#[test]
fn quartic_confinement_shrinks_support() {
    let n = 48;
    let v0_edges = {
        let batch = quick_v0_batch(n, 91);
        spectral_support_check(&batch)[0]
    };
    let w = parse("tr(x1^4)", &d(1)).unwrap().scale_re(0.1);
    let v = Potential::base_plus(&w).unwrap();
    let cfg = EnsembleConfig::new(v, n, 91).with_samples(600, 800, 2);
    let batch = sample_gibbs(&cfg).unwrap();
    let (lo, hi) = spectral_support_check(&batch)[0];
    assert!(hi < v0_edges.1 && lo > v0_edges.0, "quartic support not inside: {lo},{hi} vs {v0_edges:?}");
}
