//! JSON-facing configuration schemas for the sampler and the transport
//! experiments.

use nctrace::algebra::{parse, Declaration, TracePolynomial};
use nctrace::calculus::Potential;
use nctrace::gibbs::{sample_gibbs, Conditioning, EnsembleConfig};
use nctrace::matrix::HermTuple;
use nctrace::semigroup::{run_transport, MomentRow, TransportPlan, TriangularPlan};
use nctrace::NcError;
use serde::Deserialize;

fn default_thinning() -> usize {
    2
}
fn default_chains() -> usize {
    1
}

/// Sampler configuration document.
///
/// ```json
/// {
///   "potential": "0.5*tr(x1^2) + 0.05*tr(x1^4)",
///   "d": 1, "n": 64,
///   "burn_in": 500, "n_samples": 1000, "thinning": 2, "chains": 2,
///   "observables": ["tr(x1^2)", "tr(x1^4)"],
///   "conditioned": { "indices": [2], "value_files": ["x2.bin"] }
/// }
/// ```
#[derive(Deserialize)]
pub struct SampleConfig {
    pub potential: String,
    pub d: usize,
    pub n: usize,
    #[serde(default)]
    pub step: f64,
    pub burn_in: usize,
    pub n_samples: usize,
    #[serde(default = "default_thinning")]
    pub thinning: usize,
    #[serde(default = "default_chains")]
    pub chains: usize,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub observables: Vec<String>,
    #[serde(default)]
    pub conditioned: Option<ConditioningDto>,
}

#[derive(Deserialize)]
pub struct ConditioningDto {
    pub indices: Vec<usize>,
    pub value_files: Vec<String>,
}

impl SampleConfig {
    pub fn build(
        &self,
        cli_seed: u64,
    ) -> Result<(EnsembleConfig, Vec<(String, TracePolynomial)>), NcError> {
        let decl = Declaration::scalar(self.d);
        let v = Potential::new(parse(&self.potential, &decl)?)?;
        let mut cfg = EnsembleConfig::new(v, self.n, self.seed.unwrap_or(cli_seed))
            .with_samples(self.burn_in, self.n_samples, self.thinning)
            .with_chains(self.chains);
        cfg.step = self.step;
        if let Some(c) = &self.conditioned {
            let mut values = Vec::new();
            for f in &c.value_files {
                let mut r = std::fs::File::open(f)?;
                let t = HermTuple::read_from(&mut r)?;
                values.push(t.mat(0).clone());
            }
            cfg = cfg.with_conditioning(Conditioning { indices: c.indices.clone(), values });
        }
        let mut observables = Vec::new();
        if self.observables.is_empty() {
            for j in 1..=self.d {
                for k in [2usize, 4, 6] {
                    observables.push((
                        format!("tr(x{j}^{k})"),
                        nctrace::gibbs::power_moment(&decl, j, k),
                    ));
                }
            }
        } else {
            for s in &self.observables {
                observables.push((s.clone(), parse(s, &decl)?));
            }
        }
        Ok((cfg, observables))
    }
}

/// Transport plan document; `triangular` switches to the marginal /
/// conditional construction with the given quadratic `coupling` matrix.
///
/// ```json
/// {
///   "w": "0.1*tr(x1^4)", "d": 1,
///   "grid_steps": 100, "iterations": 1, "cutoff": 12,
///   "observables": ["tr(x1^2)", "tr(x1^4)"],
///   "source": { ...sampler fields for the base ensemble... },
///   "target": { ...sampler fields for the endpoint ensemble... },
///   "triangular": false
/// }
/// ```
#[derive(Deserialize)]
pub struct TransportConfig {
    pub w: String,
    pub d: usize,
    #[serde(default = "default_grid")]
    pub grid_steps: usize,
    #[serde(default = "default_iters")]
    pub iterations: usize,
    #[serde(default = "default_cutoff")]
    pub cutoff: usize,
    #[serde(default = "default_true")]
    pub adaptive_base: bool,
    #[serde(default)]
    pub triangular: bool,
    #[serde(default)]
    pub coupling: Option<Vec<Vec<f64>>>,
    pub observables: Vec<String>,
    pub source: SampleConfig,
    pub target: SampleConfig,
}

fn default_grid() -> usize {
    50
}
fn default_iters() -> usize {
    1
}
fn default_cutoff() -> usize {
    12
}
fn default_true() -> bool {
    true
}

impl TransportConfig {
    pub fn run(&self, cli_seed: u64) -> Result<Vec<MomentRow>, NcError> {
        let decl = Declaration::scalar(self.d);
        let observables: Vec<(String, TracePolynomial)> = self
            .observables
            .iter()
            .map(|s| Ok((s.clone(), parse(s, &decl)?)))
            .collect::<Result<_, NcError>>()?;
        let (src_cfg, _) = self.source.build(cli_seed ^ 0x11)?;
        let (tgt_cfg, _) = self.target.build(cli_seed ^ 0x22)?;
        let source = sample_gibbs(&src_cfg)?;
        if self.triangular {
            let rows = self
                .coupling
                .as_ref()
                .ok_or_else(|| NcError::Config("triangular plan needs a coupling matrix".into()))?;
            let mut m = nalgebra::DMatrix::<f64>::zeros(self.d, self.d);
            for (i, row) in rows.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    m[(i, j)] = *v;
                }
            }
            let plan = TriangularPlan {
                coupling: m,
                grid_steps: self.grid_steps,
                observables,
            };
            let report = nctrace::semigroup::triangular_transport(&plan, &source, &tgt_cfg)?;
            if !report.triangular_ok {
                return Err(NcError::Grading("triangular structure violated".into()));
            }
            Ok(report.rows)
        } else {
            let plan = TransportPlan {
                w: parse(&self.w, &decl)?,
                grid_steps: self.grid_steps,
                iterations: self.iterations,
                cutoff: self.cutoff,
                adaptive_base: self.adaptive_base,
                residual_limit: 5.0,
                observables,
            };
            let report = run_transport(&plan, &source, &tgt_cfg)?;
            Ok(report.rows)
        }
    }
}
