use super::exact::{expectation_base, psi_base};
use crate::algebra::TracePolynomial;
use crate::calculus::{cyclic_gradient, Potential};
use crate::error::{NcError, Result};
use crate::gibbs::SampleBatch;
use crate::matrix::evaluate_scalar;

/// Riemannian pairing of two tangent directions at a potential:
/// `E_V <grad Psi_V vdot1, grad Psi_V vdot2>`.
///
/// The exact backend requires the quadratic base (any curvature); the
/// sampled backend evaluates the same observable over a batch from the
/// target ensemble with a supplied pseudo-inverse solution.
pub fn riemannian_metric(
    v: &Potential,
    vdot1: &TracePolynomial,
    vdot2: &TracePolynomial,
) -> Result<f64> {
    if !v.is_quadratic_base() {
        return Err(NcError::Config(
            "exact metric backend requires the quadratic base potential".into(),
        ));
    }
    let (g1, _) = psi_base(vdot1, 1.0)?;
    let (g2, _) = psi_base(vdot2, 1.0)?;
    let pair = cyclic_gradient(&g1)?.pair_trace(&cyclic_gradient(&g2)?)?;
    Ok(expectation_base(&pair, 1.0)?.re)
}

/// Sampled metric: averages `<grad g1, grad g2>` over the batch, with the
/// pseudo-inverse solutions supplied by any backend.
pub fn riemannian_metric_sampled(
    batch: &SampleBatch,
    g1: &TracePolynomial,
    g2: &TracePolynomial,
) -> Result<(f64, f64)> {
    let pair = cyclic_gradient(g1)?.pair_trace(&cyclic_gradient(g2)?)?;
    let mut vals = Vec::with_capacity(batch.samples.len());
    for x in &batch.samples {
        vals.push(num_complex::Complex64::new(evaluate_scalar(&pair, x)?.re, 0.0));
    }
    let s = crate::gibbs::stat_from_series("metric", &vals);
    Ok((s.mean.re, s.stderr))
}
