//! Monte-Carlo sampling of the matrix ensembles `exp(-N^2 V)`, moment
//! estimation with batch-means errors, integration-by-parts diagnostics,
//! conditional chains, and the independent combinatorial moment oracles.

mod batch;
mod config;
mod dse;
mod mala;
mod marginal;
mod oracle;
mod support;
#[cfg(test)]
mod tests;

pub use batch::{stat_from_series, MomentStat, SampleBatch};
pub use config::{Conditioning, EnsembleConfig};
pub use dse::{ds_residual, DsResidual};
pub use mala::sample_gibbs;
pub use marginal::{conditional_sample, marginal_gradient_estimate, matrix_mean};
pub use oracle::{
    catalan, pade11, power_moment, quartic_m2_series, quartic_moment_series, semicircle_wick,
    wick_of_word,
};
pub use support::spectral_support_check;
