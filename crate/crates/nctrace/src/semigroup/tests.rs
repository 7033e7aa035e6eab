use super::*;
use crate::algebra::{parse, Declaration, OperatorField, TracePolynomial};
use crate::calculus::{cyclic_gradient, gibbs_laplacian, weighted_divergence, Potential};
use crate::gibbs::{catalan, power_moment, semicircle_wick};
use crate::matrix::{evaluate_scalar, HermTuple};
use crate::randgen;
use nalgebra::DMatrix;
use num_complex::Complex64;

fn d(n: usize) -> Declaration {
    Declaration::scalar(n)
}

fn p(text: &str, n: usize) -> TracePolynomial {
    parse(text, &d(n)).unwrap()
}

#[test]
fn expectation_of_powers_is_catalan() {
    for (k, want) in [(2usize, 1.0), (4, 2.0), (6, 5.0), (8, 14.0)] {
        let e = expectation_base(&p(&format!("tr(x1^{k})"), 1), 1.0).unwrap();
        assert!((e.re - want).abs() < 1e-11, "moment {k}: {e}");
    }
    // constants map to themselves
    let e = expectation_base(&p("3.5", 2), 1.0).unwrap();
    assert!((e.re - 3.5).abs() < 1e-14);
    // crossing mixed moment vanishes
    let e = expectation_base(&p("tr(x1*x2*x1*x2)", 2), 1.0).unwrap();
    assert!(e.norm() < 1e-11);
}

#[test]
fn expectation_matches_wick_oracle_on_random_monomials() {
    let mut rng = randgen::rng(71);
    for _ in 0..30 {
        let f = randgen::random_scalar(&mut rng, 2, 8, 2);
        let e = expectation_base(&f, 1.0).unwrap();
        let w = semicircle_wick(&f).unwrap();
        assert!((e.re - w).abs() < 1e-9, "wick {w} vs expectation {e}");
    }
}

#[test]
fn psi_base_solves_the_poisson_problem() {
    let (g, e) = psi_base(&p("tr(x1^2)", 1), 1.0).unwrap();
    assert!((e.re - 1.0).abs() < 1e-12);
    assert!(g.approx_eq(&p("0.5*tr(x1^2) - 0.5", 1), 1e-12));

    let (g, _) = psi_base(&p("2", 1), 1.0).unwrap();
    assert!(g.is_zero());

    // -L0 psi0 f + E0 f = f on every basis monomial of degree <= 8
    let v0 = Potential::quadratic_base(1).unwrap();
    let basis = DegreeBasis::new(1, 8, 1.0).unwrap();
    for key in basis.monomials() {
        let f = TracePolynomial::from_terms(
            d(1),
            [(key.clone(), Complex64::new(1.0, 0.0))],
        );
        let (g, e) = psi_base(&f, 1.0).unwrap();
        let back = gibbs_laplacian(&g, &v0)
            .unwrap()
            .scale_re(-1.0)
            .try_add(&TracePolynomial::constant(d(1), e))
            .unwrap();
        assert!(back.approx_eq(&f, 1e-9), "relation failed on {key:?}");
        // the generator's image is centered
        let lf = gibbs_laplacian(&f, &v0).unwrap();
        let elf = expectation_base(&lf, 1.0).unwrap();
        assert!(elf.norm() < 1e-9, "E0 L0 != 0 on {key:?}");
    }
}

#[test]
fn psi_quartic_closed_form() {
    let (g, e) = psi_base(&p("tr(x1^4)", 1), 1.0).unwrap();
    assert!((e.re - 2.0).abs() < 1e-12);
    let expect = p("0.25*tr(x1^4) + tr(x1^2) + 0.5*tr(x1)^2 - 1.5", 1);
    assert!(g.approx_eq(&expect, 1e-12));
}

#[test]
fn semigroup_exact_matches_closed_form() {
    let basis = DegreeBasis::new(1, 8, 1.0).unwrap();
    for &t in &[0.1, 0.5, 1.3] {
        let out = semigroup_exact(&p("tr(x1^2)", 1), t, &basis).unwrap();
        let expect = p("tr(x1^2)", 1)
            .scale_re((-2.0 * t).exp())
            .try_add(&TracePolynomial::constant(
                d(1),
                Complex64::new(1.0 - (-2.0 * t).exp(), 0.0),
            ))
            .unwrap();
        assert!(out.approx_eq(&expect, 1e-12), "t = {t}");
    }
    // t = 0 is the identity
    let f = p("tr(x1^4) + 2*tr(x1)^2", 1);
    assert!(semigroup_exact(&f, 0.0, &basis).unwrap().approx_eq(&f, 1e-12));
    // long-time limit is the constant E0 f
    let late = semigroup_exact(&p("tr(x1^4)", 1), 40.0, &basis).unwrap();
    assert!(late.approx_eq(&TracePolynomial::constant(d(1), Complex64::new(2.0, 0.0)), 1e-10));
}

#[test]
fn semigroup_law_on_all_basis_monomials() {
    let basis = DegreeBasis::new(1, 8, 1.0).unwrap();
    let (s, t) = (0.23, 0.41);
    for key in basis.monomials() {
        let f = TracePolynomial::from_terms(d(1), [(key.clone(), Complex64::new(1.0, 0.0))]);
        let a = semigroup_exact(&semigroup_exact(&f, t, &basis).unwrap(), s, &basis).unwrap();
        let b = semigroup_exact(&f, s + t, &basis).unwrap();
        assert!(a.approx_eq(&b, 1e-12), "semigroup law failed on {key:?}");
    }
}

#[test]
fn psi_perturbative_reduces_to_base_at_zero_perturbation() {
    let v0 = Potential::quadratic_base(1).unwrap();
    let f = p("tr(x1^4)", 1);
    let sol = psi_perturbative(&f, &v0, 1.0, 3, 10).unwrap();
    let (g, _) = psi_base(&f, 1.0).unwrap();
    assert!(sol.g.approx_eq(&g, 1e-12));
    assert!(sol.final_residual() < 1e-12);
}

#[test]
fn psi_perturbative_residual_decreases_with_adapted_base() {
    // quartic coupling 0.1, f = tr(x^2): with the curvature matched to the
    // semicircle's second moment the iteration residuals decrease
    let w = p("tr(x1^4)", 1).scale_re(0.1);
    let v = Potential::base_plus(&w).unwrap();
    let c = scha_curvature(&w, &|_, k| catalan(k / 2));
    assert!((c - 2.2).abs() < 1e-12);
    let f = p("tr(x1^2)", 1);
    let sol = psi_perturbative(&f, &v, c, 4, 14).unwrap();
    let h = &sol.residual_history;
    for i in 1..h.len() {
        assert!(h[i] < h[i - 1], "residuals not decreasing: {h:?}");
    }
}

#[test]
fn psi_perturbative_rejects_degree_overflow() {
    let w = p("tr(x1^4)", 1).scale_re(0.1);
    let v = Potential::base_plus(&w).unwrap();
    let err = psi_perturbative(&p("tr(x1^4)", 1), &v, 1.0, 4, 10);
    assert!(matches!(err, Err(crate::NcError::DegreeOverflow { .. })));
}

#[test]
fn transport_field_at_zero_iterations_matches_hand_solve() {
    // h = -grad Psi0 (tr(x^4) - 2) = -(x^3 + 2x + tr(x) 1)
    let v0 = Potential::quadratic_base(1).unwrap();
    let sol = psi_perturbative(&p("tr(x1^4)", 1), &v0, 1.0, 0, 8).unwrap();
    let h = cyclic_gradient(&sol.g).unwrap().scale_re(-1.0);
    let expect = p("-x1^3 - 2*x1 - tr(x1)", 1);
    assert!(h.component(0).approx_eq(&expect, 1e-12));
}

#[test]
fn scha_curvature_matches_quadratic_path_exactly() {
    // W = t/2 tr(x^2): curvature 1 + t regardless of the moments
    let t = 0.7;
    let w = p("tr(x1^2)", 1).scale_re(0.5 * t);
    let c = scha_curvature(&w, &|_, _| 123.0);
    assert!((c - (1.0 + t)).abs() < 1e-12);
}

#[test]
fn semigroup_mc_tracks_the_exact_quadratic_flow() {
    let mut rng = randgen::rng(83);
    let x0 = HermTuple::gue(64, 1, &mut rng);
    let v0 = Potential::quadratic_base(1).unwrap();
    let f = p("tr(x1^2)", 1);
    let m2_0 = evaluate_scalar(&f, &x0).unwrap().re;
    // t = 0 returns the evaluation exactly
    let e0 = semigroup_mc(&f, &v0, 0.0, &x0, 60, 0.01, 7).unwrap();
    assert!((e0.mean - m2_0).abs() < 1e-12);
    for &t in &[0.25, 0.5] {
        let est = semigroup_mc(&f, &v0, t, &x0, 200, 0.01, 11).unwrap();
        let expect = 1.0 + (-2.0 * t).exp() * (m2_0 - 1.0);
        assert!(
            (est.mean - expect).abs() <= 0.02,
            "t={t}: {} vs {expect} (se {})",
            est.mean,
            est.stderr
        );
    }
}

#[test]
fn semigroup_mc_forgets_the_initial_point() {
    let mut rng = randgen::rng(89);
    let a = HermTuple::gue(32, 1, &mut rng).scale(0.2);
    let b = HermTuple::gue(32, 1, &mut rng).scale(2.0);
    let v0 = Potential::quadratic_base(1).unwrap();
    let f = p("tr(x1^2)", 1);
    let ea = semigroup_mc(&f, &v0, 4.0, &a, 150, 0.01, 13).unwrap();
    let eb = semigroup_mc(&f, &v0, 4.0, &b, 150, 0.01, 17).unwrap();
    let comb = (ea.stderr.powi(2) + eb.stderr.powi(2)).sqrt();
    assert!((ea.mean - eb.mean).abs() <= 3.0 * comb + 0.02);
    assert!((ea.mean - 1.0).abs() <= 3.0 * ea.stderr + 0.02);
}

#[test]
fn psi_mc_matches_quadratic_closed_form() {
    let mut rng = randgen::rng(97);
    let x0 = HermTuple::gue(48, 1, &mut rng);
    let v0 = Potential::quadratic_base(1).unwrap();
    let f = p("tr(x1^2)", 1);
    let m2_0 = evaluate_scalar(&f, &x0).unwrap().re;
    let (est, tail) = psi_mc(&f, &v0, &x0, Some(1.0), 1.0, 8.0, 0.05, 120, 0.01, 19).unwrap();
    let expect = 0.5 * (m2_0 - 1.0);
    assert!(tail < 1e-3);
    assert!(
        (est.mean - expect).abs() <= 0.03,
        "psi_mc {} vs {expect} (se {})",
        est.mean,
        est.stderr
    );
    // constants integrate to zero
    let (z, _) = psi_mc(&p("2", 1), &v0, &x0, Some(2.0), 1.0, 4.0, 0.1, 60, 0.01, 23).unwrap();
    assert!(z.mean.abs() <= 3.0 * z.stderr + 1e-9);
}

#[test]
fn psi_mc_cross_checks_perturbative_solution_for_quartic() {
    // The two backends fix different additive constants (base-law versus
    // Gibbs-law centering), so compare differences between sample points.
    let mut rng = randgen::rng(101);
    let w = p("tr(x1^4)", 1).scale_re(0.1);
    let v = Potential::base_plus(&w).unwrap();
    let f = p("tr(x1^2)", 1);
    let c = scha_curvature(&w, &|_, k| catalan(k / 2));
    let sol = psi_perturbative(&f, &v, c, 3, 14).unwrap();
    let points: Vec<HermTuple> = (0..3)
        .map(|i| HermTuple::gue(24, 1, &mut rng).spectral_clamp(1.0).scale(0.4 + 0.3 * i as f64))
        .collect();
    let mut mc = Vec::new();
    let mut sym = Vec::new();
    for (i, x0) in points.iter().enumerate() {
        // decay proxy >= 1 for the convex quartic
        let (est, _) =
            psi_mc(&f, &v, x0, None, 1.0, 7.0, 0.05, 200, 0.01, 29 + i as u64).unwrap();
        mc.push(est.mean);
        sym.push(evaluate_scalar(&sol.g, x0).unwrap().re);
    }
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            let dmc = mc[i] - mc[j];
            let dsym = sym[i] - sym[j];
            assert!(
                (dmc - dsym).abs() <= 0.05,
                "pair ({i},{j}): mc diff {dmc} vs symbolic diff {dsym}"
            );
        }
    }
}

#[test]
fn metric_examples() {
    let v0 = Potential::quadratic_base(1).unwrap();
    let f = p("tr(x1^2)", 1);
    let m = riemannian_metric(&v0, &f, &f).unwrap();
    assert!((m - 1.0).abs() < 1e-12);
    let c = p("5", 1);
    assert!(riemannian_metric(&v0, &f, &c).unwrap().abs() < 1e-12);
    // symmetry
    let g = p("tr(x1^4)", 1);
    let a = riemannian_metric(&v0, &f, &g).unwrap();
    let b = riemannian_metric(&v0, &g, &f).unwrap();
    assert!((a - b).abs() < 1e-12);
}

#[test]
fn flow_integrates_linear_field_exactly() {
    let mut rng = randgen::rng(103);
    let x0 = HermTuple::gue(12, 1, &mut rng);
    let h = OperatorField::vector(vec![p("-x1", 1)]).unwrap();
    let mut field = |_t: f64| Ok(h.clone());
    let out = flow_integrate(&mut field, &x0, 0.0, 1.0, 0.01).unwrap();
    let expect = x0.scale((-1.0_f64).exp());
    assert!(out.axpy(-1.0, &expect).norm2_trn() < 1e-8);

    let z = OperatorField::vector(vec![TracePolynomial::zero(d(1))]).unwrap();
    let mut zf = |_t: f64| Ok(z.clone());
    let out = flow_integrate(&mut zf, &x0, 0.0, 1.0, 0.05).unwrap();
    assert!(out.axpy(-1.0, &x0).norm2_trn() < 1e-14);
}

#[test]
fn flow_error_drops_fourth_order_under_step_halving() {
    let mut rng = randgen::rng(107);
    let x0 = HermTuple::gue(10, 1, &mut rng).spectral_clamp(1.0);
    // h = -grad Psi0(tr(x^4) - 2), frozen from the hand solve
    let h = OperatorField::vector(vec![p("-x1^3 - 2*x1 - tr(x1)", 1)]).unwrap();
    let run = |step: f64| {
        let mut field = |_t: f64| Ok(h.clone());
        flow_integrate(&mut field, &x0, 0.0, 0.5, step).unwrap()
    };
    let fine = run(0.003125);
    let e1 = run(0.05).axpy(-1.0, &fine).norm2_trn();
    let e2 = run(0.025).axpy(-1.0, &fine).norm2_trn();
    assert!(e1 / e2 >= 12.0, "step halving gained only {}x", e1 / e2);
}

#[test]
fn quadratic_family_marginals_and_conditionals() {
    let eps = 0.3;
    let a = DMatrix::from_row_slice(2, 2, &[1.0, eps, eps, 1.0]);
    let fam = QuadraticFamily::new(a).unwrap();
    let m1 = fam.marginal(1).unwrap();
    assert!((m1.precision[(0, 0)] - (1.0 - eps * eps)).abs() < 1e-14);
    let b = fam.conditional_mean_bindings(1, &d(2)).unwrap();
    let target = b.get(&crate::algebra::Letter::x(2)).unwrap();
    assert!(target.approx_eq(&p("x1", 2).scale_re(-eps), 1e-14));
}

#[test]
fn triangular_field_matches_hand_solution_in_first_component() {
    let s = 0.12; // t * eps along the path
    let a = DMatrix::from_row_slice(2, 2, &[1.0, s, s, 1.0]);
    let fam = QuadraticFamily::new(a).unwrap();
    let eps = 0.05;
    let phi = p("tr(x1*x2)", 2).scale_re(eps);
    let h = triangular_field(&fam, &phi, &d(2)).unwrap();
    let c1 = 1.0 - s * s;
    let expect = p("x1", 2).scale_re(-eps * s / c1);
    assert!(h.component(0).approx_eq(&expect, 1e-12), "got {}", h.component(0));
    assert!(is_triangular(&h));
}

#[test]
fn triangular_field_inverts_the_weighted_divergence() {
    // div_V h = phi - E_V(phi) exactly, for random small quadratic families
    let mut rng = randgen::rng(109);
    for _ in 0..10 {
        use rand::Rng;
        let e12: f64 = rng.gen_range(-0.2..0.2);
        let a = DMatrix::from_row_slice(2, 2, &[1.0, e12, e12, 1.0]);
        let fam = QuadraticFamily::new(a).unwrap();
        let c1: f64 = rng.gen_range(-0.5..0.5);
        let phi = p("tr(x1*x2)", 2)
            .scale_re(c1)
            .try_add(&p("tr(x1^2)", 2).scale_re(rng.gen_range(-0.3..0.3)))
            .unwrap();
        let h = triangular_field(&fam, &phi, &d(2)).unwrap();
        assert!(is_triangular(&h));
        let v = Potential::new(fam.potential(&d(2)).unwrap()).unwrap();
        let div = weighted_divergence(&h, &v).unwrap();
        let resid = div.try_sub(&phi).unwrap();
        // the difference must be a constant
        let nonconst = resid.filter_terms(|k| !(k.factors.is_empty() && k.outer.is_empty()));
        assert!(
            nonconst.coeff_norm() < 1e-9,
            "divergence identity failed: {}",
            nonconst.coeff_norm()
        );
    }
}

#[test]
fn identity_transport_leaves_moments_alone() {
    let v0 = Potential::quadratic_base(1).unwrap();
    let cfg = crate::gibbs::EnsembleConfig::new(v0.clone(), 24, 404).with_samples(300, 40, 3);
    let source = crate::gibbs::sample_gibbs(&cfg).unwrap();
    let plan = TransportPlan {
        w: TracePolynomial::zero(d(1)),
        grid_steps: 4,
        iterations: 1,
        cutoff: 8,
        adaptive_base: true,
        residual_limit: 1.0,
        observables: vec![("m2".into(), power_moment(&d(1), 1, 2))],
    };
    let report = run_transport(&plan, &source, &cfg).unwrap();
    // the flow is identically zero: pushed samples equal the source samples
    let m_src = source.moment(&power_moment(&d(1), 1, 2), "m2").unwrap();
    assert!((report.rows[0].pushed_mean - m_src.mean.re).abs() < 1e-12);
    assert!(report.max_psi_residual < 1e-12);
}

#[test]
fn gaussian_scaling_path_recovers_the_linear_flow() {
    // V_t = (1+t)/2 tr(x^2): the exact transport is X -> (1+t)^{-1/2} X
    let mut rng = randgen::rng(211);
    let x0 = HermTuple::gue(16, 1, &mut rng);
    let plan = TransportPlan {
        w: p("tr(x1^2)", 1).scale_re(0.5),
        grid_steps: 100,
        iterations: 2,
        cutoff: 8,
        adaptive_base: true,
        residual_limit: 1.0,
        observables: vec![],
    };
    let mut x = x0.clone();
    let dt = 1.0 / plan.grid_steps as f64;
    let moment_of = |_: usize, _: usize| 1.0; // unused by the quadratic rule
    for step in 0..plan.grid_steps {
        let t = step as f64 * dt;
        let (h0, _) = transport_field(&plan, t, &moment_of).unwrap();
        let (hh, _) = transport_field(&plan, t + 0.5 * dt, &moment_of).unwrap();
        let (h1, _) = transport_field(&plan, t + dt, &moment_of).unwrap();
        x = super::flow::rk4_step(&x, dt, &h0, &hh, &h1).unwrap();
    }
    let expect = x0.scale(1.0 / 2.0_f64.sqrt());
    let dev = x.axpy(-1.0, &expect).norm2_trn();
    assert!(dev < 1e-3, "deviation {dev}");
}
