use super::flow::rk4_step;
use super::pert::{psi_perturbative, scha_curvature};
use crate::algebra::{OperatorField, TracePolynomial};
use crate::calculus::{cyclic_gradient, Potential};
use crate::error::{NcError, Result};
use crate::gibbs::{sample_gibbs, stat_from_series, EnsembleConfig, SampleBatch};
use crate::matrix::{evaluate_scalar, HermTuple};
use crate::parallel::par_map;
use std::io::Write;

/// Transport experiment along the affine path `V_t = V0 + t W`.
#[derive(Clone, Debug)]
pub struct TransportPlan {
    /// Perturbation direction; also the path velocity.
    pub w: TracePolynomial,
    /// Number of RK4 steps across `t` in `[0, 1]`.
    pub grid_steps: usize,
    /// Neumann iterations inside the pseudo-inverse per grid node.
    pub iterations: usize,
    /// Degree cutoff for the perturbative solve.
    pub cutoff: usize,
    /// Adapt the quadratic base curvature to the pushed ensemble's moments.
    pub adaptive_base: bool,
    /// Abort when the coefficient-space residual exceeds this bound.
    pub residual_limit: f64,
    /// Observables compared between pushed and direct samples.
    pub observables: Vec<(String, TracePolynomial)>,
}

impl TransportPlan {
    pub fn new(w: TracePolynomial, observables: Vec<(String, TracePolynomial)>) -> Self {
        TransportPlan {
            w,
            grid_steps: 50,
            iterations: 1,
            cutoff: 12,
            adaptive_base: true,
            residual_limit: 5.0,
            observables,
        }
    }
}

/// One row of the moment-comparison report.
#[derive(Clone, Debug)]
pub struct MomentRow {
    pub name: String,
    pub pushed_mean: f64,
    pub pushed_stderr: f64,
    pub direct_mean: f64,
    pub direct_stderr: f64,
    pub z: f64,
}

#[derive(Clone, Debug)]
pub struct TransportReport {
    pub rows: Vec<MomentRow>,
    /// Worst coefficient-space pseudo-inverse residual along the path.
    pub max_psi_residual: f64,
    /// Final pushed samples (for downstream inspection).
    pub pushed: Vec<HermTuple>,
}

impl TransportReport {
    pub fn max_abs_z(&self) -> f64 {
        self.rows.iter().map(|r| r.z.abs()).fold(0.0, f64::max)
    }

    /// CSV with columns
    /// `observable,pushed_mean,direct_mean,stderr_pushed,stderr_direct,z`.
    pub fn write_csv(&self, w: &mut impl Write) -> Result<()> {
        writeln!(w, "observable,pushed_mean,direct_mean,stderr_pushed,stderr_direct,z")?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                r.name, r.pushed_mean, r.direct_mean, r.pushed_stderr, r.direct_stderr, r.z
            )?;
        }
        Ok(())
    }
}

/// Builds the transport field at path time `t`:
/// `h_t = -grad Psi_{V_t} W`, with the pseudo-inverse taken perturbatively
/// around a quadratic base whose curvature tracks the pushed ensemble.
pub fn transport_field(
    plan: &TransportPlan,
    t: f64,
    moment_of: &dyn Fn(usize, usize) -> f64,
) -> Result<(OperatorField, f64)> {
    let wt = plan.w.scale_re(t);
    let v_t = Potential::base_plus(&wt)?;
    let c = if plan.adaptive_base { scha_curvature(&wt, moment_of) } else { 1.0 };
    if c <= 0.0 {
        return Err(NcError::Numerical(format!("adapted base curvature {c} not positive")));
    }
    let sol = psi_perturbative(&plan.w, &v_t, c, plan.iterations, plan.cutoff)?;
    if sol.final_residual() > plan.residual_limit {
        return Err(NcError::Numerical(format!(
            "perturbative residual {:.3} above the limit",
            sol.final_residual()
        )));
    }
    let h = cyclic_gradient(&sol.g)?.scale_re(-1.0);
    Ok((h, sol.final_residual()))
}

/// Per-variable power moments of a sample set, cached for the curvature rule.
fn batch_power_moments(samples: &[HermTuple], d: usize, kmax: usize) -> Vec<Vec<f64>> {
    let sums = par_map(samples.iter().collect::<Vec<_>>(), |x| {
        let mut m = vec![vec![0.0_f64; kmax + 1]; d];
        for j in 0..d {
            let mut p = nalgebra::DMatrix::<num_complex::Complex64>::identity(x.n(), x.n());
            for item in m[j].iter_mut().take(kmax + 1) {
                *item = p.trace().re / x.n() as f64;
                p = &p * x.mat(j);
            }
        }
        m
    });
    let mut acc = vec![vec![0.0_f64; kmax + 1]; d];
    for m in &sums {
        for j in 0..d {
            for k in 0..=kmax {
                acc[j][k] += m[j][k];
            }
        }
    }
    let nsamp = samples.len().max(1) as f64;
    for j in 0..d {
        for k in 0..=kmax {
            acc[j][k] /= nsamp;
        }
    }
    acc
}

/// Flows every source sample to `t = 1` along the transport field and
/// compares the pushed observables against an independent direct sample of
/// the endpoint ensemble.
pub fn run_transport(
    plan: &TransportPlan,
    source: &SampleBatch,
    target_cfg: &EnsembleConfig,
) -> Result<TransportReport> {
    let d = plan.w.decl.dim_x;
    let kmax = plan.w.degree().max(2);
    let dt = 1.0 / plan.grid_steps as f64;
    let mut samples = source.samples.clone();
    let mut max_resid = 0.0_f64;

    for step in 0..plan.grid_steps {
        let t = step as f64 * dt;
        let moments = batch_power_moments(&samples, d, kmax);
        let moment_of = |j: usize, k: usize| moments[j - 1][k];
        let (h0, r0) = transport_field(plan, t, &moment_of)?;
        let (hh, rh) = transport_field(plan, t + 0.5 * dt, &moment_of)?;
        let (h1, r1) = transport_field(plan, t + dt, &moment_of)?;
        max_resid = max_resid.max(r0).max(rh).max(r1);
        let stepped = par_map(samples, |x| rk4_step(&x, dt, &h0, &hh, &h1));
        samples = stepped.into_iter().collect::<Result<Vec<_>>>()?;
    }

    let direct = sample_gibbs(target_cfg)?;
    let mut rows = Vec::new();
    for (name, obs) in &plan.observables {
        let pushed_vals = par_map(samples.iter().collect::<Vec<_>>(), |x| {
            evaluate_scalar(obs, x)
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
        let ps = stat_from_series(name, &pushed_vals);
        let ds = direct.moment(obs, name)?;
        let comb = (ps.stderr.powi(2) + ds.stderr.powi(2)).sqrt().max(1e-300);
        rows.push(MomentRow {
            name: name.clone(),
            pushed_mean: ps.mean.re,
            pushed_stderr: ps.stderr,
            direct_mean: ds.mean.re,
            direct_stderr: ds.stderr,
            z: (ps.mean.re - ds.mean.re) / comb,
        });
    }
    Ok(TransportReport { rows, max_psi_residual: max_resid, pushed: samples })
}
