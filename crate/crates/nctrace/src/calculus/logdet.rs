use super::adjoint::star_transpose;
use super::contract::field_trace;
use crate::algebra::{OperatorField, TracePolynomial};
use crate::error::{NcError, Result};
use crate::matrix::HermTuple;

/// Log-determinant power series of an invertible field:
/// `-1/2 sum_{m=1..M} (1/m) Tr[(Id - F* # F)^{#m}]`.
///
/// The caller asserts contractivity of `Id - F* # F` on the evaluation
/// region; see [`log_det_series_checked`] for the sampled divergence guard.
pub fn log_det_series(field: &OperatorField, truncation: usize) -> Result<TracePolynomial> {
    Ok(log_det_terms(field, truncation)?.0)
}

fn log_det_terms(
    field: &OperatorField,
    truncation: usize,
) -> Result<(TracePolynomial, Vec<TracePolynomial>)> {
    let slot = field
        .slot()
        .ok_or_else(|| NcError::Grading("log-determinant needs a designated slot".into()))?;
    let id = OperatorField::identity(field.decl(), slot)?;
    let a = id.try_sub(&star_transpose(field)?.compose(field)?)?;
    let mut acc = TracePolynomial::zero(field.decl().clone());
    let mut power = a.clone();
    let mut terms = Vec::with_capacity(truncation);
    for m in 1..=truncation {
        let term = field_trace(&power)?.scale_re(-0.5 / m as f64);
        acc = acc.try_add(&term)?;
        terms.push(term);
        if m < truncation {
            power = power.compose(&a)?;
        }
    }
    Ok((acc, terms))
}

/// Same series with an empirical divergence detector: the magnitude of each
/// series term is sampled at the supplied matrix points, and sustained growth
/// of the tail is rejected. Returns the partial sum and the sampled
/// per-order magnitudes.
pub fn log_det_series_checked(
    field: &OperatorField,
    truncation: usize,
    probes: &[HermTuple],
) -> Result<(TracePolynomial, Vec<f64>)> {
    let (sum, terms) = log_det_terms(field, truncation)?;
    let mut mags = Vec::with_capacity(terms.len());
    for t in &terms {
        let mut worst = 0.0_f64;
        for x in probes {
            let v = crate::matrix::evaluate_scalar(t, x)?;
            worst = worst.max(v.norm());
        }
        mags.push(worst);
    }
    // growth of the sampled tail signals a non-contractive argument
    if mags.len() >= 4 {
        let tail = &mags[mags.len() - 3..];
        if tail[2] > tail[1] && tail[1] > tail[0] && tail[2] > 1e-12 {
            return Err(NcError::Divergence(format!(
                "log-determinant series terms grow at sampled points: {:?}",
                &mags[mags.len().saturating_sub(5)..]
            )));
        }
    }
    Ok((sum, mags))
}
