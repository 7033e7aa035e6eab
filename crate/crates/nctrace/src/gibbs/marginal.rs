use super::batch::stat_from_series;
use super::config::{Conditioning, EnsembleConfig};
use super::mala::sample_gibbs;
use crate::calculus::Potential;
use crate::error::Result;
use crate::matrix::HermTuple;
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Monte-Carlo estimate of the marginal-potential gradient at a frozen
/// sub-tuple: the conditional expectation of the frozen-variable components
/// of `grad V` under the conditional law.
///
/// Returns, per frozen index, the averaged gradient matrix and a scalar
/// stderr proxy (batch means of the matrix 2-norm deviations).
pub fn marginal_gradient_estimate(
    v: &Potential,
    base: &EnsembleConfig,
    frozen_indices: &[usize],
    frozen_values: &[DMatrix<Complex64>],
) -> Result<Vec<(DMatrix<Complex64>, f64)>> {
    let cfg = base.clone().with_conditioning(Conditioning {
        indices: frozen_indices.to_vec(),
        values: frozen_values.to_vec(),
    });
    let batch = sample_gibbs(&cfg)?;
    let n = cfg.n;
    let mut out = Vec::with_capacity(frozen_indices.len());
    for &j in frozen_indices {
        let comp = v.gradient().component(j - 1);
        let mut acc = DMatrix::<Complex64>::zeros(n, n);
        let mut series = Vec::with_capacity(batch.samples.len());
        for x in &batch.samples {
            let ctx = crate::matrix::EvalCtx::new(x);
            let m = crate::matrix::evaluate_matrix(comp, &ctx)?;
            acc += &m;
            // project onto the frozen value direction for an error series
            series.push(crate::matrix::trace_product(&m, &m) / (n * n) as f64);
        }
        let mean = acc.map(|z| z / batch.samples.len() as f64);
        let stat = stat_from_series("norm", &series);
        out.push((mean, stat.stderr.sqrt()));
    }
    Ok(out)
}

/// Conditional-mean estimate of selected observables under the conditional
/// chain; convenience wrapper returning the sampled batch as well.
pub fn conditional_sample(cfg: &EnsembleConfig) -> Result<super::batch::SampleBatch> {
    sample_gibbs(cfg)
}

/// Average of a per-sample matrix-valued function over a batch.
pub fn matrix_mean(
    batch: &super::batch::SampleBatch,
    f: impl Fn(&HermTuple) -> Result<DMatrix<Complex64>>,
) -> Result<DMatrix<Complex64>> {
    let n = batch.samples[0].n();
    let mut acc = DMatrix::<Complex64>::zeros(n, n);
    for x in &batch.samples {
        acc += f(x)?;
    }
    Ok(acc.map(|z| z / batch.samples.len() as f64))
}
