use super::contract::field_trace;
use super::derive::{field_differential, field_differential_on};
use super::gradient::{cyclic_gradient, cyclic_gradient_on};
use super::potential::Potential;
use crate::algebra::{OperatorField, TracePolynomial};
use crate::error::Result;

/// Flat Laplacian of a scalar trace polynomial, computed as the field trace
/// of the differentiated gradient. Drops the total degree by two.
pub fn laplacian(f: &TracePolynomial) -> Result<TracePolynomial> {
    f.require_scalar("laplacian")?;
    let grad = cyclic_gradient(f)?;
    let dgrad = field_differential(&grad)?;
    field_trace(&dgrad)?.with_declaration(f.decl.clone())
}

/// Flat Laplacian with respect to the active subset of variables only.
pub fn laplacian_on(f: &TracePolynomial, active: &[usize]) -> Result<TracePolynomial> {
    f.require_scalar("laplacian")?;
    let grad = cyclic_gradient_on(f, active)?;
    let dgrad = field_differential_on(&grad, active)?;
    field_trace(&dgrad)?.with_declaration(f.decl.clone())
}

/// Gibbs generator `L_V f = L f - <grad f, grad V>`.
pub fn gibbs_laplacian(f: &TracePolynomial, v: &Potential) -> Result<TracePolynomial> {
    let flat = laplacian(f)?;
    let grad = cyclic_gradient(f)?;
    let drift = grad.pair_trace(v.gradient())?;
    flat.try_sub(&drift)
}

/// Gibbs generator over an active variable subset: the Laplacian and the
/// drift pairing both restrict to the active components.
pub fn gibbs_laplacian_on(
    f: &TracePolynomial,
    v: &Potential,
    active: &[usize],
) -> Result<TracePolynomial> {
    let flat = laplacian_on(f, active)?;
    let grad = cyclic_gradient_on(f, active)?;
    let vgrad_active: Vec<TracePolynomial> = active
        .iter()
        .map(|&j| v.gradient().component(j - 1).clone())
        .collect();
    let drift = grad.pair_trace(&OperatorField::vector(vgrad_active)?)?;
    flat.try_sub(&drift)
}

/// Weighted divergence `-Tr(dh) + <grad V, h>`; satisfies
/// `weighted_divergence(grad f, V) = -gibbs_laplacian(f, V)` exactly.
pub fn weighted_divergence(h: &OperatorField, v: &Potential) -> Result<TracePolynomial> {
    let dh = field_differential(h)?;
    let tr = field_trace(&dh)?.with_declaration(h.decl().clone())?;
    let drift = v.gradient().pair_trace(h)?;
    drift.try_sub(&tr)
}
