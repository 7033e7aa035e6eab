use super::*;
use crate::randgen;
use num_complex::Complex64;

fn d(n: usize) -> Declaration {
    Declaration::scalar(n)
}

fn p(text: &str, n: usize) -> TracePolynomial {
    parse(text, &d(n)).unwrap()
}

#[test]
fn parse_basic_forms() {
    let one = p("tr(x1*x2)", 2);
    assert_eq!(one.num_terms(), 1);
    let (key, c) = one.terms().next().unwrap();
    assert_eq!(key.factors.len(), 1);
    assert!(key.outer.is_empty());
    assert_eq!(*c, Complex64::new(1.0, 0.0));

    let two = p("2*tr(x1)^2*x2 + tr(x2)", 2);
    assert_eq!(two.num_terms(), 2);
    let coeffs: Vec<f64> = two.terms().map(|(_, c)| c.re).collect();
    assert!(coeffs.contains(&2.0) && coeffs.contains(&1.0));
}

#[test]
fn parse_canonicalizes_cyclic_rotations() {
    assert_eq!(p("tr(x2*x1)", 2), p("tr(x1*x2)", 2));
    assert_eq!(p("tr(x2*x1*x1)", 2), p("tr(x1*x1*x2)", 2));
    assert_eq!(p("tr(x1*x2) + tr(x2*x1)", 2), p("2*tr(x1*x2)", 2));
}

#[test]
fn cancellation_gives_empty_polynomial() {
    let q = p("tr(x1)*x2 - tr(x1)*x2", 2);
    assert!(q.is_zero());
}

#[test]
fn print_parse_roundtrip_is_identity() {
    let cases = [
        "tr(x1*x2)",
        "2*tr(x1)^2*x2 + tr(x2)",
        "tr(x1^2)*x1 - 3*tr(x2)",
        "tr(x1*x2*x1*x2) + x1^3",
    ];
    for s in cases {
        let q = p(s, 2);
        let printed = q.to_string();
        assert_eq!(p(&printed, 2), q, "roundtrip failed for {s} -> {printed}");
    }
    let mut rng = randgen::rng(41);
    for _ in 0..50 {
        let q = randgen::random_operator_poly(&mut rng, 2, 4, 3);
        let printed = q.to_string();
        assert_eq!(p(&printed, 2), q, "random roundtrip failed: {printed}");
    }
}

#[test]
fn undeclared_variable_is_rejected() {
    assert!(parse("tr(x3)", &d(2)).is_err());
    assert!(parse("y1", &d(2)).is_err());
}

#[test]
fn multilinear_slot_violations_are_rejected() {
    let decl = Declaration::with_slot(1, 1);
    assert!(parse("y1*x1*y1", &decl).is_err());
    assert!(parse("tr(y1*x1) + x1", &decl).is_err());
    assert!(parse("tr(y1*x1) + y1", &decl).is_ok());
}

#[test]
fn product_of_traces_and_words() {
    let q = p("tr(x1)", 2).try_mul(&p("tr(x2)", 2)).unwrap();
    assert_eq!(q.num_terms(), 1);
    assert_eq!(q.terms().next().unwrap().0.factors.len(), 2);

    let w = p("x1", 1).try_mul(&p("x1", 1)).unwrap();
    assert_eq!(w, p("x1^2", 1));

    assert!(p("tr(x1)", 1).scale_re(0.0).is_zero());
}

#[test]
fn multiplication_is_associative_and_distributive() {
    let mut rng = randgen::rng(7);
    for _ in 0..200 {
        let a = randgen::random_operator_poly(&mut rng, 2, 4, 2);
        let b = randgen::random_operator_poly(&mut rng, 2, 4, 2);
        let c = randgen::random_operator_poly(&mut rng, 2, 4, 2);
        let ab_c = a.try_mul(&b).unwrap().try_mul(&c).unwrap();
        let a_bc = a.try_mul(&b.try_mul(&c).unwrap()).unwrap();
        assert!(ab_c.approx_eq(&a_bc, 1e-9), "associativity failed");
        let lhs = a.try_mul(&b.try_add(&c).unwrap()).unwrap();
        let rhs = a.try_mul(&b).unwrap().try_add(&a.try_mul(&c).unwrap()).unwrap();
        assert!(lhs.approx_eq(&rhs, 1e-9), "distributivity failed");
    }
}

#[test]
fn star_reverses_words_and_conjugates() {
    assert_eq!(p("x1*x2", 2).star(), p("x2*x1", 2));
    let q = p("tr(x1*x2*x3)", 3).scale(Complex64::new(0.0, 1.0));
    let expected = p("tr(x3*x2*x1)", 3).scale(Complex64::new(0.0, -1.0));
    assert_eq!(q.star(), expected);
    let sa = p("2*tr(x1*x2) + 2*tr(x2*x1)", 2);
    assert_eq!(sa.star(), sa);
}

#[test]
fn star_is_involutive_antihomomorphism() {
    let mut rng = randgen::rng(11);
    for _ in 0..100 {
        let a = randgen::random_operator_poly(&mut rng, 2, 4, 2);
        let b = randgen::random_operator_poly(&mut rng, 2, 4, 2);
        assert!(a.star().star().approx_eq(&a, 1e-12));
        let lhs = a.try_mul(&b).unwrap().star();
        let rhs = b.star().try_mul(&a.star()).unwrap();
        assert!(lhs.approx_eq(&rhs, 1e-9));
    }
}

#[test]
fn substitute_slot_into_trace() {
    let decl = Declaration::with_slot(2, 1);
    let q = parse("tr(y1*x2)", &decl).unwrap();
    let target = TracePolynomial::var_x(&d(2), 1).unwrap();
    let r = q.bind_slot(1, &[target], &d(2)).unwrap();
    assert_eq!(r, p("tr(x1*x2)", 2));
}

#[test]
fn identity_field_composes_to_itself() {
    let decl = Declaration::with_slot(2, 2);
    let id = OperatorField::identity(&decl, 1).unwrap();
    let composed = id.compose(&id).unwrap();
    assert!(composed.approx_eq(&id, 1e-14));
}

#[test]
fn substitute_expands_all_occurrences() {
    // y -> x1 + x2 in y*x1*y gives the four-term expansion
    let decl = Declaration {
        dim_x: 2,
        dim_xp: 0,
        y_slots: vec![1],
        s_slots: vec![],
    };
    let mut b = Bindings::new();
    b.insert(Letter::y(1, 1), p("x1 + x2", 2));
    let expr = {
        let w = Word(vec![Letter::y(1, 1), Letter::x(1), Letter::y(1, 1)]);
        TracePolynomial::from_terms(
            decl.clone(),
            [(MonomialKey::new(vec![], w), Complex64::new(1.0, 0.0))],
        )
    };
    let r = expr.substitute(&b, &d(2)).unwrap();
    assert_eq!(r, p("x1*x1*x1 + x1*x1*x2 + x2*x1*x1 + x2*x1*x2", 2));
    assert_eq!(r.num_terms(), 4);
}

#[test]
fn degree_counts_x_letters() {
    assert_eq!(p("tr(x1^2)*x1", 1).degree(), 3);
    assert_eq!(p("5", 1).degree(), 0);
    assert_eq!(p("tr(x1*x2)*tr(x2)", 2).degree(), 3);
}

#[test]
fn normal_form_merges_equivalent_strings() {
    let a = p("tr(x1*x2*x1*x2) + 2*tr(x2)*tr(x1)", 2);
    let b = p("tr(x2*x1*x2*x1) + tr(x1)*tr(x2) + tr(x2)*tr(x1)", 2);
    assert_eq!(a, b);
}
