use crate::algebra::{CyclicWord, MonomialKey, OperatorField, TracePolynomial, VarClass, Word};
use crate::error::{NcError, Result};
use crate::ZERO_EPS;

#[derive(Clone, Copy, PartialEq)]
enum ProbeClass {
    Y,
    S,
}

fn is_probe(class: &VarClass, kind: ProbeClass, slot: usize) -> bool {
    match kind {
        ProbeClass::Y => matches!(class, VarClass::Y(s) if *s == slot),
        ProbeClass::S => matches!(class, VarClass::S(s) if *s == slot),
    }
}

/// Locates the unique probe letter of `slot` in a monomial. Returns
/// `(factor index or None for outer, position, letter index)`.
fn locate_probe(
    key: &MonomialKey,
    kind: ProbeClass,
    slot: usize,
) -> Result<(Option<usize>, usize, usize)> {
    let mut found: Option<(Option<usize>, usize, usize)> = None;
    for (fi, f) in key.factors.iter().enumerate() {
        for (pos, l) in f.word().0.iter().enumerate() {
            if is_probe(&l.class, kind, slot) {
                if found.is_some() {
                    return Err(NcError::Grading(format!("monomial not linear in slot {slot}")));
                }
                found = Some((Some(fi), pos, l.index));
            }
        }
    }
    for (pos, l) in key.outer.0.iter().enumerate() {
        if is_probe(&l.class, kind, slot) {
            if found.is_some() {
                return Err(NcError::Grading(format!("monomial not linear in slot {slot}")));
            }
            found = Some((None, pos, l.index));
        }
    }
    found.ok_or_else(|| NcError::Grading(format!("monomial has no letter of slot {slot}")))
}

/// Trace of an operator-valued field, by free Wick contraction of a
/// semicircular probe into the slot and the component index.
///
/// Per monomial of component `i`: an outer word `p y_{slot,j} q` contributes
/// `tr(p) tr(q)` times the remaining scalar factors when `i == j`, and zero
/// otherwise; a probe inside a trace factor contributes zero.
pub fn field_trace(field: &OperatorField) -> Result<TracePolynomial> {
    let slot = field
        .slot()
        .ok_or_else(|| NcError::Grading("field trace needs a designated slot".into()))?;
    let dim = field.decl().y_dim(slot).unwrap_or(0);
    if dim != field.len() {
        return Err(NcError::Dimension(format!(
            "field has {} components but slot y{slot} has dimension {dim}",
            field.len()
        )));
    }
    let mut out = TracePolynomial::zero(field.decl().clone());
    for (ci, comp) in field.components().iter().enumerate() {
        for (key, coeff) in comp.terms() {
            let (where_, pos, index) = locate_probe(key, ProbeClass::Y, slot)?;
            match where_ {
                Some(_) => {} // probe inside a trace factor: vanishes
                None => {
                    if index == ci + 1 {
                        let w = &key.outer.0;
                        let p = Word(w[..pos].to_vec());
                        let q = Word(w[pos + 1..].to_vec());
                        let mut factors = key.factors.clone();
                        factors.push(CyclicWord::new(p));
                        factors.push(CyclicWord::new(q));
                        out.accumulate(MonomialKey::new(factors, Word::one()), *coeff);
                    }
                }
            }
        }
    }
    out.prune(ZERO_EPS);
    Ok(out)
}

/// Finite-N correction to the coordinate divergence.
///
/// For a field `F` linear in its slot, the exact divergence of the evaluated
/// map at matrix size `N` is `N^2 (field_trace(F) + correction / N^2)`; the
/// correction collects the probe-in-trace-factor terms through the exact
/// second contraction identity: a term `sigma * tr(q1 y_{slot,i} q2) * p`
/// of component `i` contributes `sigma * tr(q2 q1 p)`.
pub fn divergence_correction(field: &OperatorField) -> Result<TracePolynomial> {
    let slot = field
        .slot()
        .ok_or_else(|| NcError::Grading("divergence needs a designated slot".into()))?;
    let mut out = TracePolynomial::zero(field.decl().clone());
    for (ci, comp) in field.components().iter().enumerate() {
        for (key, coeff) in comp.terms() {
            let (where_, pos, index) = locate_probe(key, ProbeClass::Y, slot)?;
            if index != ci + 1 {
                continue;
            }
            if let Some(fi) = where_ {
                let w = key.factors[fi].word();
                let q1 = Word(w.0[..pos].to_vec());
                let q2 = Word(w.0[pos + 1..].to_vec());
                let mut factors = key.factors.clone();
                factors.remove(fi);
                let closed = q2.concat(&q1).concat(&key.outer);
                factors.push(CyclicWord::new(closed));
                out.accumulate(MonomialKey::new(factors, Word::one()), *coeff);
            }
        }
    }
    out.prune(ZERO_EPS);
    Ok(out)
}

/// Contracts one semicircular probe into two designated S-slots.
///
/// Both slots must occur exactly once per monomial. Matching indices inside
/// one trace factor `tr(g1 s g2 s g3)` give `tr(g3 g1) tr(g2)`; matching
/// indices in the outer word `g1 s g2 s g3` give `g1 tr(g2) g3`; mismatched
/// indices, or probes split across factors, vanish by free independence.
pub fn wick_contract(
    f: &TracePolynomial,
    slot_a: usize,
    slot_b: usize,
) -> Result<TracePolynomial> {
    let mut out = TracePolynomial::zero(f.decl.clone());
    for (key, coeff) in f.terms() {
        let (wa, pa, ia) = locate_probe(key, ProbeClass::S, slot_a)?;
        let (wb, pb, ib) = locate_probe(key, ProbeClass::S, slot_b)?;
        if ia != ib {
            continue;
        }
        match (wa, wb) {
            (Some(fa), Some(fb)) if fa == fb => {
                let w = key.factors[fa].word();
                let (p, q) = if pa < pb { (pa, pb) } else { (pb, pa) };
                let g1 = Word(w.0[..p].to_vec());
                let g2 = Word(w.0[p + 1..q].to_vec());
                let g3 = Word(w.0[q + 1..].to_vec());
                let mut factors = key.factors.clone();
                factors.remove(fa);
                factors.push(CyclicWord::new(g3.concat(&g1)));
                factors.push(CyclicWord::new(g2));
                out.accumulate(MonomialKey::new(factors, key.outer.clone()), *coeff);
            }
            (None, None) => {
                let w = &key.outer;
                let (p, q) = if pa < pb { (pa, pb) } else { (pb, pa) };
                let g1 = Word(w.0[..p].to_vec());
                let g2 = Word(w.0[p + 1..q].to_vec());
                let g3 = Word(w.0[q + 1..].to_vec());
                let mut factors = key.factors.clone();
                factors.push(CyclicWord::new(g2));
                out.accumulate(MonomialKey::new(factors, g1.concat(&g3)), *coeff);
            }
            _ => {} // split across factors, or factor/outer: vanishes
        }
    }
    out.prune(ZERO_EPS);
    Ok(out)
}
