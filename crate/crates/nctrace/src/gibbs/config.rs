use crate::calculus::Potential;
use crate::error::{NcError, Result};
use crate::matrix::HermTuple;

/// Conditioning data: the listed variable indices are held fixed at the
/// supplied matrices while the chain moves the free ones.
#[derive(Clone, Debug)]
pub struct Conditioning {
    /// 1-based indices of the frozen variables.
    pub indices: Vec<usize>,
    /// Values for the frozen variables, in the order of `indices`.
    pub values: Vec<nalgebra::DMatrix<num_complex::Complex64>>,
}

/// Specification of a MALA run targeting `exp(-N^2 V)`.
#[derive(Clone, Debug)]
pub struct EnsembleConfig {
    pub v: Potential,
    pub n: usize,
    /// Initial step size; auto-tuned during burn-in toward 0.574 acceptance.
    pub step: f64,
    pub burn_in: usize,
    pub n_samples: usize,
    pub thinning: usize,
    pub chains: usize,
    pub seed: u64,
    pub conditioned: Option<Conditioning>,
}

impl EnsembleConfig {
    pub fn new(v: Potential, n: usize, seed: u64) -> Self {
        EnsembleConfig {
            v,
            n,
            step: 0.0, // 0 = pick the 1/(2N) default at run time
            burn_in: 500,
            n_samples: 1000,
            thinning: 2,
            chains: 1,
            seed,
            conditioned: None,
        }
    }

    pub fn with_samples(mut self, burn_in: usize, n_samples: usize, thinning: usize) -> Self {
        self.burn_in = burn_in;
        self.n_samples = n_samples;
        self.thinning = thinning;
        self
    }

    pub fn with_chains(mut self, chains: usize) -> Self {
        self.chains = chains;
        self
    }

    pub fn with_conditioning(mut self, c: Conditioning) -> Self {
        self.conditioned = Some(c);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n_samples == 0 || self.chains == 0 {
            return Err(NcError::Config("n, n_samples and chains must be positive".into()));
        }
        if self.step < 0.0 {
            return Err(NcError::Config("step must be nonnegative".into()));
        }
        if let Some(c) = &self.conditioned {
            if c.indices.len() != c.values.len() {
                return Err(NcError::Config("conditioning indices/values differ".into()));
            }
            for &i in &c.indices {
                if i == 0 || i > self.v.dim() {
                    return Err(NcError::Config(format!("conditioned index {i} out of range")));
                }
            }
            for v in &c.values {
                if v.nrows() != self.n || v.ncols() != self.n {
                    return Err(NcError::Config("conditioning values have wrong size".into()));
                }
            }
        }
        Ok(())
    }

    /// The initial tuple honoring any conditioning.
    pub(crate) fn initial_state(&self, rng: &mut impl rand::Rng) -> HermTuple {
        let mut x = HermTuple::gue(self.n, self.v.dim(), rng);
        if let Some(c) = &self.conditioned {
            for (slot, &i) in c.indices.iter().enumerate() {
                x.mats_mut()[i - 1] = c.values[slot].clone();
            }
        }
        x
    }

    pub(crate) fn free_indices(&self) -> Vec<usize> {
        let frozen: Vec<usize> =
            self.conditioned.as_ref().map(|c| c.indices.clone()).unwrap_or_default();
        (1..=self.v.dim()).filter(|i| !frozen.contains(i)).collect()
    }
}
