use crate::algebra::{
    CyclicWord, Declaration, Letter, MonomialKey, OperatorField, TracePolynomial,
};
use crate::error::{NcError, Result};
use crate::ZERO_EPS;

/// Replaces, one occurrence at a time, letters according to `pairs`
/// (source letter, direction letter) and sums the results. This is the common
/// engine behind all first-order derivatives.
fn replace_linear(f: &TracePolynomial, pairs: &[(Letter, Letter)], decl: &Declaration) -> TracePolynomial {
    let mut out = TracePolynomial::zero(decl.clone());
    for (key, coeff) in f.terms() {
        // occurrences inside each trace factor
        for (fi, factor) in key.factors.iter().enumerate() {
            let w = factor.word();
            for (src, dir) in pairs {
                for pos in w.positions_of(src) {
                    let mut nw = w.clone();
                    nw.0[pos] = *dir;
                    let mut factors = key.factors.clone();
                    factors[fi] = CyclicWord::new(nw);
                    out.accumulate(MonomialKey::new(factors, key.outer.clone()), *coeff);
                }
            }
        }
        // occurrences in the outer word
        for (src, dir) in pairs {
            for pos in key.outer.positions_of(src) {
                let mut nw = key.outer.clone();
                nw.0[pos] = *dir;
                out.accumulate(MonomialKey::new(key.factors.clone(), nw), *coeff);
            }
        }
    }
    out.prune(ZERO_EPS);
    out
}

/// Directional derivative in the single variable `x_j`.
///
/// A fresh 1-dimensional Y-slot is appended to the declaration; the result is
/// linear in its letter and satisfies the Leibniz rule and commutation with
/// the trace. Returns the derivative and the new slot id.
pub fn partial_derivative(f: &TracePolynomial, j: usize) -> Result<(TracePolynomial, usize)> {
    if j == 0 || j > f.decl.dim_x {
        return Err(NcError::Dimension(format!("x{j} out of range")));
    }
    let (decl, slot) = f.decl.push_y_slot(1);
    let pairs = [(Letter::x(j), Letter::y(slot, 1))];
    Ok((replace_linear(f, &pairs, &decl), slot))
}

/// Total differential: every `x_i` is replaced (occurrence by occurrence) by
/// `y_{slot,i}` for a fresh slot of dimension `dim_x`.
pub fn differential(f: &TracePolynomial) -> Result<(TracePolynomial, usize)> {
    let d = f.decl.dim_x;
    let (decl, slot) = f.decl.push_y_slot(d);
    let pairs: Vec<_> = (1..=d).map(|i| (Letter::x(i), Letter::y(slot, i))).collect();
    Ok((replace_linear(f, &pairs, &decl), slot))
}

/// Differential with respect to the subset `active` of primary variables;
/// the fresh slot has dimension `active.len()` and its component `i`
/// corresponds to `active[i-1]`.
pub fn differential_on(f: &TracePolynomial, active: &[usize]) -> Result<(TracePolynomial, usize)> {
    for &j in active {
        if j == 0 || j > f.decl.dim_x {
            return Err(NcError::Dimension(format!("x{j} out of range")));
        }
    }
    let (decl, slot) = f.decl.push_y_slot(active.len());
    let pairs: Vec<_> = active
        .iter()
        .enumerate()
        .map(|(i, &j)| (Letter::x(j), Letter::y(slot, i + 1)))
        .collect();
    Ok((replace_linear(f, &pairs, &decl), slot))
}

/// Differential of a plain vector field: all components are differentiated
/// against one shared fresh slot, producing an operator field linear in it.
pub fn field_differential(h: &OperatorField) -> Result<OperatorField> {
    if h.slot().is_some() {
        return Err(NcError::Grading("field differential expects a plain vector field".into()));
    }
    let decl0 = h.decl().clone();
    let d = decl0.dim_x;
    let (decl, slot) = decl0.push_y_slot(d);
    let pairs: Vec<_> = (1..=d).map(|i| (Letter::x(i), Letter::y(slot, i))).collect();
    let comps: Vec<_> = h.components().iter().map(|c| replace_linear(c, &pairs, &decl)).collect();
    OperatorField::new(comps, Some(slot))
}

/// Differential of a vector field over an active subset of the variables.
pub fn field_differential_on(h: &OperatorField, active: &[usize]) -> Result<OperatorField> {
    if h.slot().is_some() {
        return Err(NcError::Grading("field differential expects a plain vector field".into()));
    }
    let decl0 = h.decl().clone();
    let (decl, slot) = decl0.push_y_slot(active.len());
    let pairs: Vec<_> = active
        .iter()
        .enumerate()
        .map(|(i, &j)| (Letter::x(j), Letter::y(slot, i + 1)))
        .collect();
    let comps: Vec<_> = h.components().iter().map(|c| replace_linear(c, &pairs, &decl)).collect();
    OperatorField::new(comps, Some(slot))
}

/// Euler pairing: substituting `y_{slot,i} -> x_i` in a differential returns
/// `degree * f` termwise; exposed for tests.
#[allow(dead_code)]
pub(crate) fn euler_check(f: &TracePolynomial) -> Result<TracePolynomial> {
    let (df, slot) = differential(f)?;
    let targets: Vec<_> = (1..=f.decl.dim_x)
        .map(|i| TracePolynomial::var_x(&f.decl, i))
        .collect::<Result<Vec<_>>>()?;
    df.bind_slot(slot, &targets, &f.decl)
}
