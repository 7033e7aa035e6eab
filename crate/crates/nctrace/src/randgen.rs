//! Seeded random generators for symbolic property checks. Coefficients are
//! small integers so identities can be asserted at tight tolerances; the
//! acceptance suite and the unit tests share these.

use crate::algebra::{Declaration, Letter, MonomialKey, OperatorField, TracePolynomial, Word};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_word(rng: &mut impl Rng, d: usize, len: usize) -> Word {
    Word((0..len).map(|_| Letter::x(rng.gen_range(1..=d))).collect())
}

/// Random scalar-valued trace polynomial with integer coefficients.
pub fn random_scalar(rng: &mut impl Rng, d: usize, max_deg: usize, terms: usize) -> TracePolynomial {
    let decl = Declaration::scalar(d);
    let mut p = TracePolynomial::zero(decl.clone());
    for _ in 0..terms {
        let budget = rng.gen_range(0..=max_deg);
        let nfac = if budget == 0 { 0 } else { rng.gen_range(1..=2.min(budget)) };
        let mut lens = Vec::new();
        let mut left = budget;
        for i in 0..nfac {
            let take = if i + 1 == nfac { left } else { rng.gen_range(1..=left.max(1)) };
            if take > 0 {
                lens.push(take);
            }
            left -= take.min(left);
        }
        let factors = lens
            .iter()
            .map(|&l| crate::algebra::CyclicWord::new(random_word(rng, d, l)))
            .collect();
        let c = Complex64::new(rng.gen_range(-3..=3) as f64, 0.0);
        let key = MonomialKey::new(factors, Word::one());
        p = p
            .try_add(&TracePolynomial::from_terms(decl.clone(), [(key, c)]))
            .unwrap();
    }
    p
}

/// Random self-adjoint scalar polynomial (p + p*)/1.
pub fn random_self_adjoint(
    rng: &mut impl Rng,
    d: usize,
    max_deg: usize,
    terms: usize,
) -> TracePolynomial {
    let p = random_scalar(rng, d, max_deg, terms);
    p.try_add(&p.star()).unwrap().scale_re(0.5)
}

/// Random polynomial that may carry an outer word (operator-valued terms).
pub fn random_operator_poly(
    rng: &mut impl Rng,
    d: usize,
    max_deg: usize,
    terms: usize,
) -> TracePolynomial {
    let decl = Declaration::scalar(d);
    let mut p = TracePolynomial::zero(decl.clone());
    for _ in 0..terms {
        let budget = rng.gen_range(0..=max_deg);
        let outer_len = rng.gen_range(0..=budget);
        let fac_len = budget - outer_len;
        let mut factors = Vec::new();
        if fac_len > 0 {
            factors.push(crate::algebra::CyclicWord::new(random_word(rng, d, fac_len)));
        }
        let key = MonomialKey::new(factors, random_word(rng, d, outer_len));
        let c = Complex64::new(rng.gen_range(-3..=3) as f64, 0.0);
        p = p
            .try_add(&TracePolynomial::from_terms(decl.clone(), [(key, c)]))
            .unwrap();
    }
    p
}

/// Random self-adjoint plain vector field of the given degree.
pub fn random_vector_field(
    rng: &mut impl Rng,
    d: usize,
    max_deg: usize,
    terms: usize,
) -> OperatorField {
    let comps: Vec<TracePolynomial> = (0..d)
        .map(|_| {
            let p = random_operator_poly(rng, d, max_deg, terms);
            p.try_add(&p.star()).unwrap().scale_re(0.5)
        })
        .collect();
    OperatorField::vector(comps).unwrap()
}

/// Random operator field linear in a fresh slot: sums of sandwich terms
/// `p y_j q` and trace terms `tr(q y_j) p`.
pub fn random_slot_field(
    rng: &mut impl Rng,
    d: usize,
    max_deg: usize,
    terms: usize,
) -> OperatorField {
    let (decl, slot) = Declaration::scalar(d).push_y_slot(d);
    let comps: Vec<TracePolynomial> = (0..d)
        .map(|_| {
            let mut p = TracePolynomial::zero(decl.clone());
            for _ in 0..terms {
                let j = rng.gen_range(1..=d);
                let la = rng.gen_range(0..=max_deg);
                let lb = rng.gen_range(0..=max_deg.saturating_sub(la));
                let a = random_word(rng, d, la);
                let b = random_word(rng, d, lb);
                let c = Complex64::new(rng.gen_range(-2..=2) as f64, 0.0);
                let key = if rng.gen_bool(0.7) {
                    // sandwich term a y_j b
                    let mut w = a.clone();
                    w.0.push(Letter::y(slot, j));
                    w.0.extend_from_slice(&b.0);
                    MonomialKey::new(Vec::new(), w)
                } else {
                    // trace term tr(a y_j) b
                    let mut tw = a.clone();
                    tw.0.push(Letter::y(slot, j));
                    MonomialKey::new(vec![crate::algebra::CyclicWord::new(tw)], b)
                };
                p = p
                    .try_add(&TracePolynomial::from_terms(decl.clone(), [(key, c)]))
                    .unwrap();
            }
            p
        })
        .collect();
    OperatorField::new(comps, Some(slot)).unwrap()
}
