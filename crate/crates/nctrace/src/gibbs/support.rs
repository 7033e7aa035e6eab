use super::batch::SampleBatch;
use crate::parallel::par_map;

/// Empirical spectral edges: per variable, the extreme eigenvalues across
/// all samples of the batch.
pub fn spectral_support_check(batch: &SampleBatch) -> Vec<(f64, f64)> {
    let d = batch.samples.first().map(|x| x.d()).unwrap_or(0);
    let ranges = par_map(batch.samples.iter().collect::<Vec<_>>(), |x| x.spectral_ranges());
    let mut out = vec![(f64::INFINITY, f64::NEG_INFINITY); d];
    for r in ranges {
        for (j, (lo, hi)) in r.into_iter().enumerate() {
            out[j].0 = out[j].0.min(lo);
            out[j].1 = out[j].1.max(hi);
        }
    }
    out
}
