use crate::algebra::{Letter, MonomialKey, OperatorField, TracePolynomial, Word};
use crate::error::Result;
use crate::ZERO_EPS;

/// Cyclic gradient of a scalar-valued trace polynomial.
///
/// Component `j` collects, for each occurrence of `x_j` inside each trace
/// factor, the factor opened at that occurrence (the rotation starting after
/// the occurrence, with the occurrence removed) times the remaining scalar
/// factors. It is the vector field dual to the differential under the
/// normalized trace pairing.
pub fn cyclic_gradient(f: &TracePolynomial) -> Result<OperatorField> {
    let d = f.decl.dim_x;
    let vars: Vec<usize> = (1..=d).collect();
    cyclic_gradient_on(f, &vars)
}

/// Cyclic gradient over an active subset; component `i` corresponds to
/// `active[i]`.
pub fn cyclic_gradient_on(f: &TracePolynomial, active: &[usize]) -> Result<OperatorField> {
    f.require_scalar("cyclic gradient")?;
    let mut comps: Vec<TracePolynomial> =
        active.iter().map(|_| TracePolynomial::zero(f.decl.clone())).collect();
    for (key, coeff) in f.terms() {
        for (fi, factor) in key.factors.iter().enumerate() {
            let w = factor.word();
            let n = w.len();
            for (pos, letter) in w.0.iter().enumerate() {
                let Some(ci) = active.iter().position(|&j| *letter == Letter::x(j)) else {
                    continue;
                };
                // open the factor: word after the occurrence, wrapping around
                let opened: Vec<Letter> =
                    (1..n).map(|k| w.0[(pos + k) % n]).collect();
                let mut factors = key.factors.clone();
                factors.remove(fi);
                comps[ci].accumulate(
                    MonomialKey::new(factors, Word(opened)),
                    *coeff,
                );
            }
        }
    }
    for c in &mut comps {
        c.prune(ZERO_EPS);
    }
    OperatorField::vector(comps)
}
