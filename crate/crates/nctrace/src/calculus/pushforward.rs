use super::derive::field_differential;
use super::logdet::log_det_series;
use super::potential::Potential;
use crate::algebra::{Bindings, Letter, OperatorField, TracePolynomial};
use crate::error::{NcError, Result};

/// Composition of plain vector fields: `(f o g)_j = f_j(g_1, ..., g_d)`.
pub fn compose_vector(f: &OperatorField, g: &OperatorField) -> Result<OperatorField> {
    if f.slot().is_some() || g.slot().is_some() {
        return Err(NcError::Grading("vector composition expects plain fields".into()));
    }
    if f.len() != g.len() {
        return Err(NcError::Dimension("vector composition length mismatch".into()));
    }
    let decl = g.decl();
    let mut bindings = Bindings::new();
    for (j, gj) in g.components().iter().enumerate() {
        bindings.insert(Letter::x(j + 1), gj.clone());
    }
    let comps = f
        .components()
        .iter()
        .map(|c| c.substitute(&bindings, decl))
        .collect::<Result<Vec<_>>>()?;
    OperatorField::vector(comps)
}

/// Substitutes a vector field into a scalar polynomial: `V o f`.
pub fn compose_scalar(v: &TracePolynomial, f: &OperatorField) -> Result<TracePolynomial> {
    let decl = f.decl();
    let mut bindings = Bindings::new();
    for (j, fj) in f.components().iter().enumerate() {
        bindings.insert(Letter::x(j + 1), fj.clone());
    }
    v.substitute(&bindings, decl)
}

/// Push-forward of a potential along a diffeomorphism with supplied symbolic
/// inverse: `f_* V = V o f^{-1} - logdet(d f^{-1})`.
///
/// The inverse is verified symbolically (`f o f_inv = f_inv o f = id` up to
/// coefficient tolerance) before use.
pub fn pushforward(
    v: &Potential,
    f: &OperatorField,
    f_inv: &OperatorField,
    logdet_truncation: usize,
) -> Result<Potential> {
    let id = OperatorField::identity_vector(f.decl())?;
    let fo = compose_vector(f, f_inv)?;
    let of = compose_vector(f_inv, f)?;
    if !fo.approx_eq(&id, 1e-10) || !of.approx_eq(&id, 1e-10) {
        return Err(NcError::InverseCheck(
            "supplied field is not a two-sided inverse".into(),
        ));
    }
    let moved = compose_scalar(v.value(), f_inv)?;
    let jac = field_differential(f_inv)?;
    let ld = log_det_series(&jac, logdet_truncation)?.with_declaration(f.decl().clone())?;
    Potential::new(moved.try_sub(&ld)?)
}
