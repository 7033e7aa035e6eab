use crate::algebra::{CyclicWord, Letter, MonomialKey, OperatorField, TracePolynomial, VarClass, Word};
use crate::error::{NcError, Result};
use crate::ZERO_EPS;

/// Adjoint of an operator field with respect to the trace inner product:
/// `<F*(X)[Y1], Y2> = <Y1, F(X)[Y2]>`.
///
/// Sandwich terms `sigma * p y_j q` of component `i` map to
/// `sigma^* p^* y_i q^*` in component `j`; trace-type terms
/// `sigma * tr(q1 y_j q2) * p` of component `i` map to
/// `sigma^* (q2 q1)^* tr(p^* y_i)` in component `j`. This is an involution
/// and an anti-homomorphism for `#`-composition.
pub fn star_transpose(field: &OperatorField) -> Result<OperatorField> {
    let slot = field
        .slot()
        .ok_or_else(|| NcError::Grading("adjoint needs a designated slot".into()))?;
    let dim = field.decl().y_dim(slot).unwrap_or(0);
    if dim != field.len() {
        return Err(NcError::Dimension(format!(
            "field has {} components but slot y{slot} has dimension {dim}",
            field.len()
        )));
    }
    let decl = field.decl().clone();
    let mut comps: Vec<TracePolynomial> =
        (0..dim).map(|_| TracePolynomial::zero(decl.clone())).collect();

    for (ci, comp) in field.components().iter().enumerate() {
        for (key, coeff) in comp.terms() {
            let mut probe: Option<(Option<usize>, usize, usize)> = None;
            for (fi, f) in key.factors.iter().enumerate() {
                for (pos, l) in f.word().0.iter().enumerate() {
                    if matches!(l.class, VarClass::Y(s) if s == slot) {
                        probe = Some((Some(fi), pos, l.index));
                    }
                }
            }
            for (pos, l) in key.outer.0.iter().enumerate() {
                if matches!(l.class, VarClass::Y(s) if s == slot) {
                    probe = Some((None, pos, l.index));
                }
            }
            let (where_, pos, j) =
                probe.ok_or_else(|| NcError::Grading("monomial misses its probe".into()))?;
            // star of the scalar trace factors (excluding the probe-bearing one)
            let scalar_factors = |skip: Option<usize>| -> Vec<CyclicWord> {
                key.factors
                    .iter()
                    .enumerate()
                    .filter(|(fi, _)| Some(*fi) != skip)
                    .map(|(_, f)| CyclicWord::new(f.word().reversed()))
                    .collect()
            };
            let c = coeff.conj();
            match where_ {
                None => {
                    // sandwich: p y_j q -> p* y_i q* in component j
                    let w = &key.outer.0;
                    let p = Word(w[..pos].to_vec()).reversed();
                    let q = Word(w[pos + 1..].to_vec()).reversed();
                    let mut outer = p;
                    outer.0.push(Letter::y(slot, ci + 1));
                    outer.0.extend_from_slice(&q.0);
                    comps[j - 1]
                        .accumulate(MonomialKey::new(scalar_factors(None), outer), c);
                }
                Some(fi) => {
                    // trace type: tr(q1 y_j q2) * p -> (q2 q1)* tr(p* y_i)
                    let w = key.factors[fi].word();
                    let q1 = Word(w.0[..pos].to_vec());
                    let q2 = Word(w.0[pos + 1..].to_vec());
                    let new_outer = q2.concat(&q1).reversed();
                    let mut trace_word = key.outer.reversed();
                    trace_word.0.push(Letter::y(slot, ci + 1));
                    let mut factors = scalar_factors(Some(fi));
                    factors.push(CyclicWord::new(trace_word));
                    comps[j - 1].accumulate(MonomialKey::new(factors, new_outer), c);
                }
            }
        }
    }
    for c in &mut comps {
        c.prune(ZERO_EPS);
    }
    OperatorField::new(comps, Some(slot))
}
