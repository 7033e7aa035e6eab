//! The acceptance suite: twelve numbered criteria covering the exact
//! finite-N identities, the symbolic operator calculus, the exact semigroup
//! backend, the sampler against combinatorial oracles, and the transport
//! experiments. Each criterion reports one pass/fail line; tolerances are
//! pinned here.
//!
//! Seeds are fixed; the runtime of the full suite is kept within desk scale.

use crate::algebra::{parse, Declaration, OperatorField, TracePolynomial};
use crate::calculus::{
    cyclic_gradient, differential, gibbs_laplacian, laplacian, lie_bracket, partial_derivative,
    weighted_divergence, Potential,
};
use crate::error::Result;
use crate::gibbs::{
    ds_residual, pade11, power_moment, quartic_m2_series, sample_gibbs, semicircle_wick,
    spectral_support_check, EnsembleConfig, SampleBatch,
};
use crate::matrix::{
    classical_laplacian, evaluate_scalar, evaluate_scalar_ctx, magic_formula_check, EvalCtx,
    HermTuple, LaplacianMode,
};
use crate::randgen;
use crate::semigroup::{
    expectation_base, psi_base, run_transport, semigroup_exact, semigroup_mc, DegreeBasis,
    TransportPlan, TriangularPlan,
};
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::sync::OnceLock;
use std::time::Instant;

/// Outcome of one acceptance criterion.
#[derive(Clone, Debug)]
pub struct CriterionOutcome {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl CriterionOutcome {
    pub fn line(&self) -> String {
        format!(
            "[{}] criterion {:2} {:<30} {:7.1}s  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.seconds,
            self.detail
        )
    }
}

const NAMES: [&str; 12] = [
    "magic-formula-exactness",
    "symbolic-identity-suite",
    "finite-difference-consistency",
    "asymptotic-laplacian",
    "exact-semigroup-backend",
    "semicircle-law",
    "dyson-schwinger-residuals",
    "quartic-oracle-match",
    "mc-semigroup-closed-form",
    "derivative-of-expectation",
    "transport-end-to-end",
    "triangular-transport",
];

/// Runs the requested criteria (1-based ids); empty slice = all twelve.
pub fn run(ids: &[usize], seed: u64, tol_scale: f64) -> Vec<CriterionOutcome> {
    let all: Vec<usize> = if ids.is_empty() { (1..=12).collect() } else { ids.to_vec() };
    all.into_iter().map(|id| run_one(id, seed, tol_scale)).collect()
}

pub fn run_one(id: usize, seed: u64, tol_scale: f64) -> CriterionOutcome {
    let start = Instant::now();
    let res: Result<(bool, String)> = match id {
        1 => c1_magic(seed),
        2 => c2_symbolic(seed),
        3 => c3_finite_difference(seed),
        4 => c4_asymptotic_laplacian(seed),
        5 => c5_exact_backend(seed),
        6 => c6_semicircle(seed, tol_scale),
        7 => c7_dse(seed, tol_scale),
        8 => c8_quartic_oracle(seed, tol_scale),
        9 => c9_mc_semigroup(seed, tol_scale),
        10 => c10_derivative_of_expectation(seed, tol_scale),
        11 => c11_transport(seed, tol_scale),
        12 => c12_triangular(seed, tol_scale),
        _ => Ok((false, format!("unknown criterion {id}"))),
    };
    let (passed, detail) = match res {
        Ok(x) => x,
        Err(e) => (false, format!("error: {e}")),
    };
    CriterionOutcome {
        id,
        name: NAMES[id.saturating_sub(1).min(11)],
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn d(n: usize) -> Declaration {
    Declaration::scalar(n)
}

fn p(text: &str, n: usize) -> TracePolynomial {
    parse(text, &d(n)).expect("static expression")
}

// 1 -------------------------------------------------------------------------

fn c1_magic(seed: u64) -> Result<(bool, String)> {
    let mut rng = randgen::rng(seed ^ 0x01);
    let n = 8;
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let a = HermTuple::gue(n, 1, &mut rng).mat(0).clone();
        let b = HermTuple::gue(n, 1, &mut rng).mat(0).clone();
        let c = HermTuple::gue(n, 1, &mut rng).mat(0).clone();
        let scale = (1.0 + a.norm()) * (1.0 + b.norm()) * (1.0 + c.norm());
        for i in 0..2 {
            for j in 0..2 {
                let r = magic_formula_check(&a, &b, &c, i, j);
                worst = worst.max(r.max() / scale);
            }
        }
    }
    Ok((worst <= 1e-12, format!("worst relative residual {worst:.2e} (tol 1e-12)")))
}

// 2 -------------------------------------------------------------------------

fn c2_symbolic(seed: u64) -> Result<(bool, String)> {
    let mut rng = randgen::rng(seed ^ 0x02);
    let tol = 1e-9;
    let mut failures: Vec<String> = Vec::new();

    // Leibniz rule and mixed-partial symmetry, 100 random f of degree <= 5
    for _ in 0..100 {
        let f = randgen::random_scalar(&mut rng, 2, 5, 2);
        let g = randgen::random_scalar(&mut rng, 2, 5, 2);
        let fg = f.try_mul(&g)?;
        let (dfg, _) = differential(&fg)?;
        let (df, _) = differential(&f)?;
        let (dg, _) = differential(&g)?;
        let rhs = df
            .try_mul(&g.with_declaration(df.decl.clone())?)?
            .try_add(&f.with_declaration(dg.decl.clone())?.try_mul(&dg)?)?;
        if !dfg.approx_eq(&rhs, tol) {
            failures.push("leibniz".into());
            break;
        }
        let (ddf, s2) = differential(&df)?;
        let s1 = 1usize;
        let mut b = crate::algebra::Bindings::new();
        for i in 1..=2 {
            b.insert(
                crate::algebra::Letter::y(s1, i),
                TracePolynomial::letter(ddf.decl.clone(), crate::algebra::Letter::y(s2, i))?,
            );
            b.insert(
                crate::algebra::Letter::y(s2, i),
                TracePolynomial::letter(ddf.decl.clone(), crate::algebra::Letter::y(s1, i))?,
            );
        }
        if !ddf.approx_eq(&ddf.substitute(&b, &ddf.decl)?, tol) {
            failures.push("mixed-partials".into());
            break;
        }
    }

    // traciality of the field trace under composition, 50 random pairs
    for _ in 0..50 {
        let f = randgen::random_slot_field(&mut rng, 2, 3, 2);
        let g = randgen::random_slot_field(&mut rng, 2, 3, 2);
        let a = crate::calculus::field_trace(&f.compose(&g)?)?;
        let b = crate::calculus::field_trace(&g.compose(&f)?)?;
        if a.max_coeff_distance(&b.with_declaration(a.decl.clone())?) > tol {
            failures.push("traciality".into());
            break;
        }
    }

    // weighted divergence of a gradient is minus the generator, 50 random
    for _ in 0..50 {
        let f = randgen::random_scalar(&mut rng, 2, 4, 2);
        let w = randgen::random_self_adjoint(&mut rng, 2, 4, 2).scale_re(0.2);
        let v = Potential::base_plus(&w)?;
        let lhs = weighted_divergence(&cyclic_gradient(&f)?, &v)?;
        let rhs = gibbs_laplacian(&f, &v)?.scale_re(-1.0);
        if !lhs.approx_eq(&rhs, tol) {
            failures.push("divergence-of-gradient".into());
            break;
        }
    }

    // bracket-divergence identity, 50 random triples
    for _ in 0..50 {
        let h1 = randgen::random_vector_field(&mut rng, 2, 3, 2);
        let h2 = randgen::random_vector_field(&mut rng, 2, 3, 2);
        let w = randgen::random_self_adjoint(&mut rng, 2, 3, 2).scale_re(0.2);
        let v = Potential::base_plus(&w)?;
        let lhs = weighted_divergence(&lie_bracket(&h1, &h2)?, &v)?;
        let (g1, s1) = differential(&weighted_divergence(&h1, &v)?)?;
        let d1 = g1.bind_slot(s1, h2.components(), h2.decl())?;
        let (g2, s2) = differential(&weighted_divergence(&h2, &v)?)?;
        let d2 = g2.bind_slot(s2, h1.components(), h1.decl())?;
        if !lhs.approx_eq(&d1.try_sub(&d2)?, 1e-8) {
            failures.push("bracket-identity".into());
            break;
        }
    }

    // closed form of the flat Laplacian on powers up to 8
    for n in 2..=8usize {
        let lf = laplacian(&p(&format!("tr(x1^{n})"), 1))?;
        let mut expect = TracePolynomial::zero(d(1));
        for i in 0..=(n - 2) {
            let a = if i == 0 { "1".into() } else { format!("tr(x1^{i})") };
            let b = if n - 2 - i == 0 { "1".into() } else { format!("tr(x1^{})", n - 2 - i) };
            expect = expect.try_add(&p(&format!("{a}*{b}"), 1).scale_re(n as f64))?;
        }
        if !lf.approx_eq(&expect, 1e-10) {
            failures.push(format!("power-laplacian n={n}"));
            break;
        }
    }

    if failures.is_empty() {
        Ok((true, "all five identity families hold in canonical form".into()))
    } else {
        Ok((false, format!("failed: {failures:?}")))
    }
}

// 3 -------------------------------------------------------------------------

fn c3_finite_difference(seed: u64) -> Result<(bool, String)> {
    let mut rng = randgen::rng(seed ^ 0x03);
    let n = 8;
    let mut worst_err: f64 = 0.0;
    let mut ratios = Vec::new();
    for trial in 0..50 {
        let f = randgen::random_scalar(&mut rng, 2, 4, 2);
        if f.degree() < 3 {
            continue;
        }
        let x = HermTuple::gue(n, 2, &mut rng);
        let y = HermTuple::gue(n, 2, &mut rng);
        let j = 1 + (trial % 2);
        let (df, slot) = partial_derivative(&f, j)?;
        let sym = evaluate_scalar_ctx(
            &df,
            &EvalCtx::new(&x).with_slot(slot, vec![y.mat(j - 1).clone()]),
        )?;
        let fd = |h: f64| -> Result<Complex64> {
            let mut xp = x.clone();
            xp.mats_mut()[j - 1] += y.mat(j - 1).scale(h);
            let mut xm = x.clone();
            xm.mats_mut()[j - 1] -= y.mat(j - 1).scale(h);
            Ok((evaluate_scalar(&f, &xp)? - evaluate_scalar(&f, &xm)?) / (2.0 * h))
        };
        let scale = 1.0 + sym.norm();
        let e1 = (fd(1e-3)? - sym).norm() / scale;
        let e2 = (fd(5e-4)? - sym).norm() / scale;
        worst_err = worst_err.max(e2);
        if e1 > 1e-9 {
            ratios.push(e1 / e2.max(1e-300));
        }
    }
    let ratio_ok = ratios.iter().all(|r| (2.8..=5.5).contains(r));
    let pass = worst_err <= 1e-6 && ratio_ok && !ratios.is_empty();
    let rmin = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let rmax = ratios.iter().cloned().fold(0.0_f64, f64::max);
    Ok((
        pass,
        format!(
            "final relative error {worst_err:.2e} (tol 1e-6), halving ratios in [{rmin:.2}, {rmax:.2}]"
        ),
    ))
}

// 4 -------------------------------------------------------------------------

fn c4_asymptotic_laplacian(seed: u64) -> Result<(bool, String)> {
    let mut rng = randgen::rng(seed ^ 0x04);
    // Part (a): for tr(x^4) the finite-N correction vanishes identically,
    // so the stated bound <= C/N^2 holds with C = 0; assert exact agreement.
    let f4 = p("tr(x1^4)", 1);
    let lf4 = laplacian(&f4)?;
    let mut worst4: f64 = 0.0;
    for n in [16usize, 32] {
        for _ in 0..10 {
            let x = HermTuple::gue(n, 1, &mut rng).spectral_clamp(2.0);
            let num = classical_laplacian(&f4, &x, LaplacianMode::ExactBasis, &mut rng)?;
            let sym = evaluate_scalar(&lf4, &x)?;
            worst4 = worst4.max((num - sym).norm());
        }
    }
    // Part (b): the 1/N^2 rate of the limit statement is exhibited on
    // tr(x^2)^2, whose finite-N correction is exactly 8 tr(x^2) / N^2.
    let f22 = p("tr(x1^2)^2", 1);
    let lf22 = laplacian(&f22)?;
    let mut sup = [0.0_f64; 2];
    for (k, n) in [16usize, 32].into_iter().enumerate() {
        for _ in 0..20 {
            let x = HermTuple::gue(n, 1, &mut rng).spectral_clamp(2.0);
            let num = classical_laplacian(&f22, &x, LaplacianMode::ExactBasis, &mut rng)?;
            let sym = evaluate_scalar(&lf22, &x)?;
            sup[k] = sup[k].max((num - sym).norm());
        }
    }
    let ratio = sup[0] / sup[1].max(1e-300);
    let pass = worst4 <= 1e-8 && (3.0..=5.0).contains(&ratio);
    Ok((
        pass,
        format!(
            "tr(x^4) correction {worst4:.1e} (vanishes identically); \
             tr(x^2)^2 error ratio N16/N32 = {ratio:.3} in [3,5]"
        ),
    ))
}

// 5 -------------------------------------------------------------------------

fn c5_exact_backend(seed: u64) -> Result<(bool, String)> {
    let mut rng = randgen::rng(seed ^ 0x05);
    let v0 = Potential::quadratic_base(1)?;
    let basis = DegreeBasis::new(1, 8, 1.0)?;
    let mut worst: f64 = 0.0;
    let (s, t) = (0.31, 0.57);
    for key in basis.monomials() {
        let f = TracePolynomial::from_terms(d(1), [(key.clone(), Complex64::new(1.0, 0.0))]);
        // (-L Psi + E) f = f
        let (g, e) = psi_base(&f, 1.0)?;
        let back = gibbs_laplacian(&g, &v0)?
            .scale_re(-1.0)
            .try_add(&TracePolynomial::constant(d(1), e))?;
        worst = worst.max(back.max_coeff_distance(&f));
        // semigroup law and the t = 0 identity
        let a = semigroup_exact(&semigroup_exact(&f, t, &basis)?, s, &basis)?;
        let b = semigroup_exact(&f, s + t, &basis)?;
        worst = worst.max(a.max_coeff_distance(&b));
        worst = worst.max(semigroup_exact(&f, 0.0, &basis)?.max_coeff_distance(&f));
    }
    let relations_ok = worst <= 1e-12;
    // kernel projection against the non-crossing oracle, 30 random monomials
    let mut wick_worst: f64 = 0.0;
    for _ in 0..30 {
        let f = randgen::random_scalar(&mut rng, 2, 8, 2);
        let e = expectation_base(&f, 1.0)?;
        let w = semicircle_wick(&f)?;
        wick_worst = wick_worst.max((e.re - w).abs());
    }
    let pass = relations_ok && wick_worst <= 1e-9;
    Ok((
        pass,
        format!(
            "relation residual {worst:.1e} (tol 1e-12), wick agreement {wick_worst:.1e} (tol 1e-9)"
        ),
    ))
}

// 6 -------------------------------------------------------------------------

fn c6_semicircle(seed: u64, tol_scale: f64) -> Result<(bool, String)> {
    let v0 = Potential::quadratic_base(1)?;
    let n = 128;
    let cfg = EnsembleConfig::new(v0.clone(), n, seed ^ 0x06)
        .with_samples(800, 2000, 2)
        .with_chains(4);
    let batch = sample_gibbs(&cfg)?;
    let finite_n = 5.0 / (n * n) as f64;
    let mut detail = String::new();
    let mut pass = true;
    for (k, target) in [(2usize, 1.0), (4, 2.0), (6, 5.0)] {
        let m = batch.moment(&power_moment(&d(1), 1, k), &format!("m{k}"))?;
        let tol = (3.0 * m.stderr + finite_n) * tol_scale;
        let ok = (m.mean.re - target).abs() <= tol;
        pass &= ok;
        detail.push_str(&format!("m{k}={:.4} (target {target}, tol {tol:.4}); ", m.mean.re));
    }
    // spectral edge at N = 256
    let edge_cfg = EnsembleConfig::new(v0, 256, seed ^ 0x66)
        .with_samples(600, 400, 3)
        .with_chains(2);
    let edge_batch = sample_gibbs(&edge_cfg)?;
    let (_, hi) = spectral_support_check(&edge_batch)[0];
    let edge_ok = (1.9..=2.2).contains(&hi);
    pass &= edge_ok;
    detail.push_str(&format!("max eig {hi:.3} in [1.9, 2.2]"));
    Ok((pass, detail))
}

// 7 / 8 ----------------------------------------------------------------------

fn quartic_batch(seed: u64) -> Result<&'static (SampleBatch, Potential)> {
    static CELL: OnceLock<std::result::Result<(SampleBatch, Potential), String>> = OnceLock::new();
    let out = CELL.get_or_init(|| {
        let make = || -> Result<(SampleBatch, Potential)> {
            let w = p("tr(x1^4)", 1).scale_re(0.05);
            let v = Potential::base_plus(&w)?;
            let cfg = EnsembleConfig::new(v.clone(), 128, seed ^ 0x07)
                .with_samples(700, 1800, 2)
                .with_chains(4);
            Ok((sample_gibbs(&cfg)?, v))
        };
        make().map_err(|e| e.to_string())
    });
    out.as_ref().map_err(|e| crate::NcError::Numerical(e.clone()))
}

fn c7_dse(seed: u64, tol_scale: f64) -> Result<(bool, String)> {
    let (batch, v) = quartic_batch(seed)?;
    let n = 128;
    let mut pass = true;
    let mut detail = String::new();
    for pow in [1usize, 3, 5] {
        let h = OperatorField::vector(vec![p(&format!("x1^{pow}"), 1)])?;
        let r = ds_residual(batch, &h, v)?;
        let tol_limit = (3.0 * r.limit_stderr + 5.0 / (n * n) as f64) * tol_scale;
        let tol_exact = 3.0 * r.exact_stderr * tol_scale;
        let ok = r.limit_residual.abs() <= tol_limit && r.exact_residual.abs() <= tol_exact;
        pass &= ok;
        detail.push_str(&format!(
            "h=x^{pow}: limit {:+.5} (tol {:.5}), exact {:+.5} (tol {:.5}); ",
            r.limit_residual, tol_limit, r.exact_residual, tol_exact
        ));
    }
    Ok((pass, detail))
}

fn c8_quartic_oracle(seed: u64, tol_scale: f64) -> Result<(bool, String)> {
    let (batch, _) = quartic_batch(seed)?;
    let m2 = batch.moment(&power_moment(&d(1), 1, 2), "m2")?;
    let series = quartic_m2_series(2)?;
    let g = 0.05;
    // raw partial sums of the order-2 data, and its diagonal Pade value: the
    // coupling exceeds the series' radius of convergence (1/48), so the Pade
    // evaluation is the faithful reading of the same perturbative data
    let s1 = series[0] + series[1] * g;
    let s2 = s1 + series[2] * g * g;
    let oracle = pade11(&series, g)?;
    let tol = 0.02 * tol_scale;
    let pass = (m2.mean.re - oracle).abs() <= tol;
    Ok((
        pass,
        format!(
            "sampled m2 {:.4} vs pade[1/1] of the O(g^2) recursion {oracle:.4} (tol {tol}); \
             raw partial sums {s1:.3} / {s2:.3} sit outside the radius 1/48",
            m2.mean.re
        ),
    ))
}

// 9 -------------------------------------------------------------------------

fn c9_mc_semigroup(seed: u64, tol_scale: f64) -> Result<(bool, String)> {
    let mut rng = randgen::rng(seed ^ 0x09);
    let v0 = Potential::quadratic_base(1)?;
    let f = p("tr(x1^2)", 1);
    let x0 = HermTuple::gue(100, 1, &mut rng);
    let m2_0 = evaluate_scalar(&f, &x0)?.re;
    let mut pass = true;
    let mut detail = String::new();
    for (k, t) in [0.25_f64, 0.5, 1.0].into_iter().enumerate() {
        let est = semigroup_mc(&f, &v0, t, &x0, 200, 0.01, seed ^ (0x90 + k as u64))?;
        let expect = 1.0 + (-2.0 * t).exp() * (m2_0 - 1.0);
        let tol = 0.02 * tol_scale;
        let ok = (est.mean - expect).abs() <= tol;
        pass &= ok;
        detail.push_str(&format!("t={t}: {:.4} vs {expect:.4}; ", est.mean));
    }
    Ok((pass, detail))
}

// 10 ------------------------------------------------------------------------

fn c10_derivative_of_expectation(seed: u64, tol_scale: f64) -> Result<(bool, String)> {
    // symbolic side: -E0 <grad tr(x^4), grad Psi0 tr(x^2)> = -E0 tr(4 x^4)
    let (g_psi, _) = psi_base(&p("tr(x1^2)", 1), 1.0)?;
    let pair = cyclic_gradient(&p("tr(x1^4)", 1))?.pair_trace(&cyclic_gradient(&g_psi)?)?;
    let sym = -expectation_base(&pair, 1.0)?.re;
    let oracle_slope = quartic_m2_series(1)?[1];
    let exact_ok = (sym - oracle_slope).abs() < 1e-10 && (oracle_slope + 8.0).abs() < 1e-12;

    // sampled side: secants at g = 0.02 and 0.01 with Richardson
    // extrapolation (the single secant at 0.02 carries the curvature bias of
    // the 144 g^2 term and sits 25% off the slope by exact computation)
    let n = 128;
    let sample_m2 = |g: f64, tag: u64| -> Result<f64> {
        let v = if g == 0.0 {
            Potential::quadratic_base(1)?
        } else {
            Potential::base_plus(&p("tr(x1^4)", 1).scale_re(g))?
        };
        let cfg = EnsembleConfig::new(v, n, seed ^ tag)
            .with_samples(600, 1500, 2)
            .with_chains(4);
        let batch = sample_gibbs(&cfg)?;
        Ok(batch.moment(&power_moment(&d(1), 1, 2), "m2")?.mean.re)
    };
    let m0 = sample_m2(0.0, 0xa0)?;
    let m1 = sample_m2(0.01, 0xa1)?;
    let m2v = sample_m2(0.02, 0xa2)?;
    let s1 = (m1 - m0) / 0.01;
    let s2 = (m2v - m0) / 0.02;
    let richardson = 2.0 * s1 - s2;
    let rel = (richardson - oracle_slope).abs() / oracle_slope.abs();
    let pass = exact_ok && rel <= 0.15 * tol_scale;
    Ok((
        pass,
        format!(
            "symbolic {sym:.6} = oracle {oracle_slope} exactly; secants {s2:.2} (g=.02) / {s1:.2} \
             (g=.01), extrapolated slope {richardson:.2} within {:.1}% of -8 (tol 15%)",
            rel * 100.0
        ),
    ))
}

// 11 ------------------------------------------------------------------------

fn c11_transport(seed: u64, tol_scale: f64) -> Result<(bool, String)> {
    let n = 128;
    let v0 = Potential::quadratic_base(1)?;
    let src_cfg = EnsembleConfig::new(v0, n, seed ^ 0x0b)
        .with_samples(600, 48, 40)
        .with_chains(2);
    let source = sample_gibbs(&src_cfg)?;
    let w = p("tr(x1^4)", 1).scale_re(0.1);
    let plan = TransportPlan {
        w: w.clone(),
        grid_steps: 100,
        iterations: 1,
        cutoff: 12,
        adaptive_base: true,
        residual_limit: 5.0,
        observables: vec![
            ("m2".into(), power_moment(&d(1), 1, 2)),
            ("m4".into(), power_moment(&d(1), 1, 4)),
        ],
    };
    let target_cfg = EnsembleConfig::new(Potential::base_plus(&w)?, n, seed ^ 0xb1)
        .with_samples(700, 1500, 2)
        .with_chains(4);
    let report = run_transport(&plan, &source, &target_cfg)?;
    let mut pass = true;
    let mut detail = String::new();
    for r in &report.rows {
        let comb = (r.pushed_stderr.powi(2) + r.direct_stderr.powi(2)).sqrt();
        let tol = (3.0 * comb + 0.05) * tol_scale;
        let ok = (r.pushed_mean - r.direct_mean).abs() <= tol;
        pass &= ok;
        detail.push_str(&format!(
            "{}: pushed {:.4} vs direct {:.4} (tol {:.4}); ",
            r.name, r.pushed_mean, r.direct_mean, tol
        ));
    }

    // Gaussian-scaling path: V_t = (1+t)/2 tr(x^2) transports by
    // (1+t)^{-1/2} id; the recovered flow must match pointwise to 1e-3.
    let mut rng = randgen::rng(seed ^ 0xb2);
    let x0 = HermTuple::gue(16, 1, &mut rng);
    let gplan = TransportPlan {
        w: p("tr(x1^2)", 1).scale_re(0.5),
        grid_steps: 100,
        iterations: 2,
        cutoff: 8,
        adaptive_base: true,
        residual_limit: 1.0,
        observables: vec![],
    };
    let mut x = x0.clone();
    let dt = 1.0 / gplan.grid_steps as f64;
    let ones = |_: usize, _: usize| 1.0;
    for step in 0..gplan.grid_steps {
        let t = step as f64 * dt;
        let (h0, _) = crate::semigroup::transport_field(&gplan, t, &ones)?;
        let (hh, _) = crate::semigroup::transport_field(&gplan, t + 0.5 * dt, &ones)?;
        let (h1, _) = crate::semigroup::transport_field(&gplan, t + dt, &ones)?;
        x = crate::semigroup::rk4_step(&x, dt, &h0, &hh, &h1)?;
    }
    let lin_dev = x.axpy(-1.0, &x0.scale(1.0 / 2.0_f64.sqrt())).norm2_trn();
    pass &= lin_dev <= 1e-3;
    detail.push_str(&format!("gaussian path deviation {lin_dev:.2e} (tol 1e-3)"));
    Ok((pass, detail))
}

// 12 ------------------------------------------------------------------------

fn c12_triangular(seed: u64, tol_scale: f64) -> Result<(bool, String)> {
    let n = 96;
    let eps = 0.05;
    let v0 = Potential::quadratic_base(2)?;
    let src_cfg = EnsembleConfig::new(v0, n, seed ^ 0x0c)
        .with_samples(600, 64, 30)
        .with_chains(2);
    let source = sample_gibbs(&src_cfg)?;

    // structural triangularity is asserted symbolically on a built field
    let coupling = DMatrix::from_row_slice(2, 2, &[0.0, eps, eps, 0.0]);
    let fam = crate::semigroup::QuadraticFamily::new(
        DMatrix::identity(2, 2) + coupling.scale(0.6),
    )?;
    let phi = p("tr(x1*x2)", 2).scale_re(eps);
    let h = crate::semigroup::triangular_field(&fam, &phi, &d(2))?;
    let structural = crate::semigroup::is_triangular(&h)
        && h.component(0).is_free_of_letter(&crate::algebra::Letter::x(2));

    let plan = TriangularPlan {
        // 1/2 <x, C x> with C = eps off-diagonal gives eps tr(x1 x2)
        coupling: coupling.clone(),
        grid_steps: 50,
        observables: vec![
            ("tr(x1*x2)".into(), p("tr(x1*x2)", 2)),
            ("tr(x1^2)".into(), p("tr(x1^2)", 2)),
            ("tr(x2^2)".into(), p("tr(x2^2)", 2)),
        ],
    };
    let w = p("tr(x1*x2)", 2).scale_re(eps);
    let target_cfg = EnsembleConfig::new(Potential::base_plus(&w)?, n, seed ^ 0xc1)
        .with_samples(700, 1600, 2)
        .with_chains(4);
    let report = crate::semigroup::triangular_transport(&plan, &source, &target_cfg)?;
    let mut pass = structural && report.triangular_ok;
    let mut detail = format!("triangularity exact: {}; ", structural && report.triangular_ok);
    for r in &report.rows {
        let comb = (r.pushed_stderr.powi(2) + r.direct_stderr.powi(2)).sqrt();
        let tol = (3.0 * comb + 0.05) * tol_scale;
        let ok = (r.pushed_mean - r.direct_mean).abs() <= tol;
        pass &= ok;
        detail.push_str(&format!(
            "{}: pushed {:.4} vs direct {:.4} (tol {:.4}); ",
            r.name, r.pushed_mean, r.direct_mean, tol
        ));
    }
    Ok((pass, detail))
}
