use super::*;
use crate::algebra::{parse, Declaration, OperatorField, TracePolynomial};
use crate::calculus::{
    cyclic_gradient, differential, divergence_correction, field_differential, field_trace,
    log_det_series,
};
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
fn evaluate_matches_direct_trace() {
    let mut rng = randgen::rng(3);
    let x = HermTuple::gue(8, 2, &mut rng);
    let v = evaluate_scalar(&p("tr(x1^2)", 2), &x).unwrap();
    let direct = (x.mat(0) * x.mat(0)).trace() / 8.0;
    assert!((v - direct).norm() < 1e-13);

    // trace cyclicity
    let a = evaluate_scalar(&p("tr(x1*x2)", 2), &x).unwrap();
    let b = evaluate_scalar(&p("tr(x2*x1)", 2), &x).unwrap();
    assert!((a - b).norm() < 1e-14);
}

#[test]
fn evaluate_respects_star() {
    let mut rng = randgen::rng(5);
    let x = HermTuple::gue(6, 2, &mut rng);
    for _ in 0..10 {
        let q = randgen::random_operator_poly(&mut rng, 2, 4, 3)
            .scale(Complex64::new(0.7, 0.3));
        let ctx = EvalCtx::new(&x);
        let m = evaluate_matrix(&q, &ctx).unwrap();
        let ms = evaluate_matrix(&q.star(), &ctx).unwrap();
        assert!((ms - m.adjoint()).norm() < 1e-10);
    }
}

#[test]
fn differential_matches_central_differences() {
    let mut rng = randgen::rng(7);
    let mut worst_ratio: (f64, f64) = (f64::INFINITY, 0.0);
    for trial in 0..50 {
        let f = randgen::random_scalar(&mut rng, 2, 4, 2);
        if f.degree() < 2 {
            continue;
        }
        let n = 6;
        let x = HermTuple::gue(n, 2, &mut rng);
        let y = HermTuple::gue(n, 2, &mut rng);
        let j = 1 + (trial % 2);
        let (df, slot) = crate::calculus::partial_derivative(&f, j).unwrap();
        let dir: Vec<DMatrix<Complex64>> = vec![y.mat(j - 1).clone()];
        let sym = evaluate_scalar_ctx(&df, &EvalCtx::new(&x).with_slot(slot, dir)).unwrap();
        let fd = |h: f64| {
            let mut xp = x.clone();
            xp.mats_mut()[j - 1] += y.mat(j - 1).scale(h);
            let mut xm = x.clone();
            xm.mats_mut()[j - 1] -= y.mat(j - 1).scale(h);
            (evaluate_scalar(&f, &xp).unwrap() - evaluate_scalar(&f, &xm).unwrap()) / (2.0 * h)
        };
        let e1 = (fd(1e-3) - sym).norm();
        let e2 = (fd(5e-4) - sym).norm();
        if e1 > 1e-9 {
            let r = e1 / e2.max(1e-300);
            worst_ratio = (worst_ratio.0.min(r), worst_ratio.1.max(r));
        }
        assert!(e2 < 1e-6 * (1.0 + sym.norm()), "fd error too large: {e2}");
    }
    // quadratic error scaling: halving h divides the error by about 4
    assert!(worst_ratio.0 > 2.5 && worst_ratio.1 < 6.0, "ratios {worst_ratio:?}");
}

#[test]
fn gradient_is_dual_to_differential() {
    let mut rng = randgen::rng(11);
    for _ in 0..10 {
        let f = randgen::random_scalar(&mut rng, 2, 4, 3);
        let x = HermTuple::gue(8, 2, &mut rng);
        let y = HermTuple::gue(8, 2, &mut rng);
        let (df, slot) = differential(&f).unwrap();
        let args: Vec<DMatrix<Complex64>> = y.mats().to_vec();
        let lhs = evaluate_scalar_ctx(&df, &EvalCtx::new(&x).with_slot(slot, args)).unwrap();
        let grad = cyclic_gradient(&f).unwrap();
        let gx = apply_vector_field(&grad, &x).unwrap();
        let rhs = y.inner_trn(&gx);
        assert!((lhs.re - rhs).abs() < 1e-10 && lhs.im.abs() < 1e-10);
    }
}

#[test]
fn coordinate_gradient_matches_cyclic_gradient() {
    let mut rng = randgen::rng(13);
    let f = p("tr(x1^3) + tr(x1*x2)*tr(x2)", 2);
    let x = HermTuple::gue(6, 2, &mut rng);
    let fd = classical_gradient_fd(&f, &x, 1e-4).unwrap();
    let sym = apply_vector_field(&cyclic_gradient(&f).unwrap(), &x).unwrap();
    let dev = fd.axpy(-1.0, &sym).norm2_trn();
    assert!(dev < 1e-7, "gradient deviation {dev}");
}

#[test]
fn magic_formulas_are_exact() {
    let mut rng = randgen::rng(17);
    let n = 8;
    for _ in 0..20 {
        let a = HermTuple::gue(n, 1, &mut rng).mat(0).clone();
        let b = HermTuple::gue(n, 1, &mut rng).mat(0).clone();
        let c = HermTuple::gue(n, 1, &mut rng).mat(0).clone();
        let scale = a.norm() * b.norm() * c.norm();
        for i in 0..2 {
            for j in 0..2 {
                let r = magic_formula_check(&a, &b, &c, i, j);
                assert!(r.max() < 1e-12 * (1.0 + scale), "residual {:?}", r.max());
            }
        }
    }
    // A = B = C = I: the sandwich sum is the identity
    let id = DMatrix::<Complex64>::identity(n, n);
    let r = magic_formula_check(&id, &id, &id, 0, 0);
    assert!(r.max() < 1e-12);
}

#[test]
fn exact_divergence_matches_symbolic_trace_plus_correction() {
    let mut rng = randgen::rng(19);
    for _ in 0..8 {
        let h = randgen::random_vector_field(&mut rng, 2, 3, 2);
        let n = 6;
        let x = HermTuple::gue(n, 2, &mut rng);
        let brute = classical_divergence(&h, &x).unwrap();
        let dh = field_differential(&h).unwrap();
        let t = evaluate_scalar(
            &field_trace(&dh).unwrap().with_declaration(d(2)).unwrap(),
            &x,
        )
        .unwrap();
        let corr = evaluate_scalar(
            &divergence_correction(&dh).unwrap().with_declaration(d(2)).unwrap(),
            &x,
        )
        .unwrap();
        let nn = (n * n) as f64;
        let predicted = t * nn + corr;
        assert!(
            (brute - predicted).norm() < 1e-8 * (1.0 + brute.norm()),
            "divergence mismatch: brute {brute}, predicted {predicted}"
        );
    }
}

#[test]
fn classical_laplacian_of_quadratic_is_dimension() {
    let mut rng = randgen::rng(23);
    for dim in 1..=2usize {
        let f = crate::calculus::quadratic_term(&d(dim), 1.0).unwrap();
        let x = HermTuple::gue(6, dim, &mut rng);
        let v = classical_laplacian(&f, &x, LaplacianMode::ExactBasis, &mut rng).unwrap();
        // (1/N^2) Delta sum tr(x_j^2) = 2 d exactly
        assert!((v.re - 2.0 * dim as f64).abs() < 1e-10);
    }
}

#[test]
fn classical_laplacian_identities_for_quartic_and_square() {
    let mut rng = randgen::rng(29);
    for n in [6, 10] {
        let x = HermTuple::gue(n, 1, &mut rng);
        // tr(x^4): the finite-N correction vanishes identically
        let f4 = p("tr(x1^4)", 1);
        let lap = classical_laplacian(&f4, &x, LaplacianMode::ExactBasis, &mut rng).unwrap();
        let sym = evaluate_scalar(&crate::calculus::laplacian(&f4).unwrap(), &x).unwrap();
        assert!((lap - sym).norm() < 1e-10, "tr(x^4) correction should vanish");

        // tr(x^2)^2: correction is exactly 8 tr(x^2) / N^2
        let f22 = p("tr(x1^2)^2", 1);
        let lap = classical_laplacian(&f22, &x, LaplacianMode::ExactBasis, &mut rng).unwrap();
        let sym = evaluate_scalar(&crate::calculus::laplacian(&f22).unwrap(), &x).unwrap();
        let m2 = evaluate_scalar(&p("tr(x1^2)", 1), &x).unwrap();
        let corr = 8.0 * m2.re / (n * n) as f64;
        assert!(
            ((lap - sym).re - corr).abs() < 1e-10,
            "expected correction {corr}, got {}",
            (lap - sym).re
        );
    }
}

#[test]
fn hutchinson_estimates_exact_basis_laplacian() {
    let mut rng = randgen::rng(31);
    let n = 8;
    let x = HermTuple::gue(n, 1, &mut rng);
    let f = p("tr(x1^4)", 1);
    let exact = classical_laplacian(&f, &x, LaplacianMode::ExactBasis, &mut rng).unwrap();
    // estimate the probe variance from batches to form a stderr
    let batches = 10;
    let per = 1000;
    let mut means = Vec::new();
    for _ in 0..batches {
        let v = classical_laplacian(&f, &x, LaplacianMode::Hutchinson(per), &mut rng).unwrap();
        means.push(v.re);
    }
    let mean: f64 = means.iter().sum::<f64>() / batches as f64;
    let var: f64 =
        means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (batches - 1) as f64;
    let stderr = (var / batches as f64).sqrt();
    assert!(
        (mean - exact.re).abs() <= 3.0 * stderr + 1e-9,
        "hutchinson {mean} vs exact {} (stderr {stderr})",
        exact.re
    );
}

#[test]
fn numeric_log_det_scalar_case() {
    let mut rng = randgen::rng(37);
    let x = HermTuple::gue(6, 2, &mut rng);
    let decl = Declaration::with_slot(2, 2);
    let id = OperatorField::identity(&decl, 1).unwrap();
    let c = 1.3;
    let v = log_det_numeric(&id.scale_re(c), &x).unwrap();
    assert!((v - 2.0 * c.ln()).abs() < 1e-12);
}

#[test]
fn numeric_log_det_matches_series() {
    // F = Id + 0.1 (y -> x y x) on a clamped tuple
    let mut rng = randgen::rng(41);
    let x = HermTuple::gue(8, 1, &mut rng).spectral_clamp(1.0);
    let (decl, slot) = Declaration::scalar(1).push_y_slot(1);
    let sandwich = {
        let w = crate::algebra::Word(vec![
            crate::algebra::Letter::x(1),
            crate::algebra::Letter::y(slot, 1),
            crate::algebra::Letter::x(1),
        ]);
        TracePolynomial::from_terms(
            decl.clone(),
            [(crate::algebra::MonomialKey::new(vec![], w), Complex64::new(0.1, 0.0))],
        )
    };
    let id = OperatorField::identity(&decl, slot).unwrap();
    let f = id
        .try_add(&OperatorField::new(vec![sandwich], Some(slot)).unwrap())
        .unwrap();
    let numeric = log_det_numeric(&f, &x).unwrap();
    let series = evaluate_scalar(
        &log_det_series(&f, 40).unwrap().with_declaration(d(1)).unwrap(),
        &x,
    )
    .unwrap();
    assert!((numeric - series.re).abs() < 1e-8, "numeric {numeric} vs series {}", series.re);
}

#[test]
fn numeric_log_det_is_additive() {
    let mut rng = randgen::rng(43);
    let x = HermTuple::gue(6, 1, &mut rng).spectral_clamp(1.0);
    let (decl, slot) = Declaration::scalar(1).push_y_slot(1);
    let id = OperatorField::identity(&decl, slot).unwrap();
    let mk = |c: f64, scale_id: f64| {
        let w = crate::algebra::Word(vec![
            crate::algebra::Letter::x(1),
            crate::algebra::Letter::y(slot, 1),
            crate::algebra::Letter::x(1),
        ]);
        let s = TracePolynomial::from_terms(
            decl.clone(),
            [(crate::algebra::MonomialKey::new(vec![], w), Complex64::new(c, 0.0))],
        );
        id.scale_re(scale_id)
            .try_add(&OperatorField::new(vec![s], Some(slot)).unwrap())
            .unwrap()
    };
    let f = mk(0.15, 1.0);
    let g = mk(-0.1, 1.2);
    let fg = f.compose(&g).unwrap();
    let lhs = log_det_numeric(&fg, &x).unwrap();
    let rhs = log_det_numeric(&f, &x).unwrap() + log_det_numeric(&g, &x).unwrap();
    assert!((lhs - rhs).abs() < 1e-10, "additivity: {lhs} vs {rhs}");
}

#[test]
fn numeric_trace_matches_field_trace_with_correction() {
    let mut rng = randgen::rng(47);
    let h = randgen::random_vector_field(&mut rng, 2, 3, 2);
    let x = HermTuple::gue(6, 2, &mut rng);
    let dh = field_differential(&h).unwrap();
    let num = trace_numeric(&dh, &x).unwrap();
    let sym = evaluate_scalar(
        &field_trace(&dh).unwrap().with_declaration(d(2)).unwrap(),
        &x,
    )
    .unwrap();
    let corr = evaluate_scalar(
        &divergence_correction(&dh).unwrap().with_declaration(d(2)).unwrap(),
        &x,
    )
    .unwrap();
    let predicted = sym.re + corr.re / 36.0;
    assert!((num - predicted).abs() < 1e-9);
}

#[test]
fn invert_identity_and_linear_maps() {
    let mut rng = randgen::rng(53);
    let x = HermTuple::gue(8, 1, &mut rng);
    let id = OperatorField::identity_vector(&d(1)).unwrap();
    let y = invert_map(&id, &x, 0.0, 1.0, 1e-12, 5).unwrap();
    assert!(y.axpy(-1.0, &x).norm2_trn() < 1e-12);

    // f = 2 id with rescaling k' = 2 returns x/2
    let f2 = id.scale_re(2.0);
    let y = invert_map(&f2, &x, 0.5, 2.0, 1e-12, 50).unwrap();
    assert!(y.axpy(-0.5, &x).norm2_trn() < 1e-10);
}

#[test]
fn invert_cubic_perturbation() {
    let mut rng = randgen::rng(59);
    let n = 16;
    let x_target = HermTuple::gue(n, 1, &mut rng).spectral_clamp(0.8);
    let id = OperatorField::identity_vector(&d(1)).unwrap();
    let f = {
        let cubic = OperatorField::vector(vec![p("x1^3", 1).scale_re(0.3)]).unwrap();
        id.try_add(&cubic).unwrap()
    };
    let y = invert_map(&f, &x_target, 0.9, 1.0, 1e-10, 60).unwrap();
    let resid = apply_vector_field(&f, &y).unwrap().axpy(-1.0, &x_target).norm2_trn();
    assert!(resid < 1e-10, "residual {resid}");
}

#[test]
fn herm_tuple_binary_roundtrip() {
    let mut rng = randgen::rng(61);
    let x = HermTuple::gue(5, 3, &mut rng);
    let mut buf = Vec::new();
    x.write_to(&mut buf).unwrap();
    assert_eq!(buf.len(), 16 + 3 * 5 * 5 * 16);
    let y = HermTuple::read_from(&mut buf.as_slice()).unwrap();
    assert_eq!(x, y);
}

#[test]
fn spectral_clamp_bounds_eigenvalues() {
    let mut rng = randgen::rng(67);
    let x = HermTuple::gue(12, 1, &mut rng).scale(3.0);
    let c = x.spectral_clamp(1.5);
    let (lo, hi) = c.spectral_ranges()[0];
    assert!(lo >= -1.5 - 1e-10 && hi <= 1.5 + 1e-10);
}
