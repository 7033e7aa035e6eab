use super::batch::{stat_from_series, SampleBatch};
use crate::algebra::OperatorField;
use crate::calculus::{divergence_correction, field_differential, field_trace, Potential};
use crate::error::Result;
use crate::matrix::evaluate_scalar;
use crate::parallel::par_map;
use num_complex::Complex64;

/// Empirical integration-by-parts residuals for a test vector field.
#[derive(Clone, Debug)]
pub struct DsResidual {
    /// Mean of `<grad V, h> - Tr(dh)` over the batch (limit form).
    pub limit_residual: f64,
    pub limit_stderr: f64,
    /// Mean of `<grad V, h> - (1/N^2) Div h` (exact finite-N form).
    pub exact_residual: f64,
    pub exact_stderr: f64,
}

/// Evaluates the loop-equation observable over the batch: the limit form
/// replaces the coordinate divergence by the field trace; the exact form
/// adds back the `1/N^2` trace-type correction, making the expectation zero
/// at any matrix size under the stationary law.
pub fn ds_residual(
    batch: &SampleBatch,
    h: &OperatorField,
    v: &Potential,
) -> Result<DsResidual> {
    let drift = v.gradient().pair_trace(h)?;
    let dh = field_differential(h)?;
    let tr = field_trace(&dh)?.with_declaration(v.decl().clone())?;
    let corr = divergence_correction(&dh)?.with_declaration(v.decl().clone())?;
    let limit_obs = drift.try_sub(&tr)?;

    let vals = par_map(batch.samples.iter().collect::<Vec<_>>(), |x| {
        let nn = (x.n() * x.n()) as f64;
        let l = evaluate_scalar(&limit_obs, x)?;
        let c = evaluate_scalar(&corr, x)?;
        Ok::<(Complex64, Complex64), crate::NcError>((l, l - c / nn))
    });
    let mut limit_vals = Vec::with_capacity(batch.samples.len());
    let mut exact_vals = Vec::with_capacity(batch.samples.len());
    for v in vals {
        let (l, e) = v?;
        limit_vals.push(l);
        exact_vals.push(e);
    }
    let ls = stat_from_series("limit", &limit_vals);
    let es = stat_from_series("exact", &exact_vals);
    Ok(DsResidual {
        limit_residual: ls.mean.re,
        limit_stderr: ls.stderr,
        exact_residual: es.mean.re,
        exact_stderr: es.stderr,
    })
}
