use crate::algebra::TracePolynomial;
use crate::error::Result;
use crate::matrix::{evaluate_scalar, HermTuple};
use crate::parallel::par_map;
use num_complex::Complex64;
use std::io::Write;

/// Mean / batch-means standard error of one observable over a chain.
#[derive(Clone, Debug)]
pub struct MomentStat {
    pub name: String,
    pub mean: Complex64,
    pub stderr: f64,
    pub n_eff: f64,
}

/// The retained samples of a (multi-chain) run with acceptance diagnostics.
#[derive(Clone, Debug)]
pub struct SampleBatch {
    pub samples: Vec<HermTuple>,
    pub acceptance_rate: f64,
    pub final_step: f64,
    /// Index ranges of the individual chains inside `samples`.
    pub chain_bounds: Vec<(usize, usize)>,
}

impl SampleBatch {
    /// Evaluates an observable on every sample (parallel over samples).
    pub fn evaluate(&self, obs: &TracePolynomial) -> Result<Vec<Complex64>> {
        let vals = par_map(self.samples.iter().collect::<Vec<_>>(), |x| {
            evaluate_scalar(obs, x)
        });
        vals.into_iter().collect()
    }

    /// Mean and batch-means stderr of an observable.
    pub fn moment(&self, obs: &TracePolynomial, name: &str) -> Result<MomentStat> {
        let vals = self.evaluate(obs)?;
        Ok(stat_from_series(name, &vals))
    }

    pub fn moment_table(
        &self,
        observables: &[(String, TracePolynomial)],
    ) -> Result<Vec<MomentStat>> {
        observables
            .iter()
            .map(|(name, obs)| self.moment(obs, name))
            .collect()
    }

    /// Splits the batch in halves (per chain) and reports the per-observable
    /// discrepancy in units of the combined stderr; a stationarity check.
    pub fn half_chain_discrepancy(&self, obs: &TracePolynomial) -> Result<f64> {
        let vals = self.evaluate(obs)?;
        let mid = vals.len() / 2;
        let a = stat_from_series("a", &vals[..mid]);
        let b = stat_from_series("b", &vals[mid..]);
        let comb = (a.stderr.powi(2) + b.stderr.powi(2)).sqrt().max(1e-300);
        Ok((a.mean - b.mean).norm() / comb)
    }

    /// CSV with columns `observable,mean_re,mean_im,stderr,n_eff`.
    pub fn write_moments_csv(
        &self,
        observables: &[(String, TracePolynomial)],
        w: &mut impl Write,
    ) -> Result<()> {
        writeln!(w, "observable,mean_re,mean_im,stderr,n_eff")?;
        for stat in self.moment_table(observables)? {
            writeln!(
                w,
                "{},{},{},{},{}",
                stat.name, stat.mean.re, stat.mean.im, stat.stderr, stat.n_eff
            )?;
        }
        Ok(())
    }
}

/// Batch-means statistics: the series is cut into `floor(sqrt(n))` batches;
/// the stderr is the standard deviation of batch means over `sqrt(B)`, which
/// absorbs autocorrelation up to the batch length.
pub fn stat_from_series(name: &str, vals: &[Complex64]) -> MomentStat {
    let n = vals.len();
    if n == 0 {
        return MomentStat { name: name.into(), mean: Complex64::default(), stderr: 0.0, n_eff: 0.0 };
    }
    let mean = vals.iter().sum::<Complex64>() / n as f64;
    let nb = (n as f64).sqrt().floor() as usize;
    if nb < 2 {
        return MomentStat { name: name.into(), mean, stderr: 0.0, n_eff: n as f64 };
    }
    let blen = n / nb;
    let mut bm = Vec::with_capacity(nb);
    for b in 0..nb {
        let s = &vals[b * blen..(b + 1) * blen];
        bm.push(s.iter().sum::<Complex64>() / blen as f64);
    }
    let bmean = bm.iter().sum::<Complex64>() / nb as f64;
    let bvar = bm.iter().map(|v| (v - bmean).norm_sqr()).sum::<f64>() / (nb - 1) as f64;
    let stderr = (bvar / nb as f64).sqrt();
    let svar = vals.iter().map(|v| (v - mean).norm_sqr()).sum::<f64>() / (n - 1) as f64;
    let n_eff = if stderr > 0.0 { (svar / stderr.powi(2)).clamp(1.0, n as f64) } else { n as f64 };
    MomentStat { name: name.into(), mean, stderr, n_eff }
}
