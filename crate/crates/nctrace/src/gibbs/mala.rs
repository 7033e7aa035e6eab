use super::batch::SampleBatch;
use super::config::EnsembleConfig;
use crate::calculus::Potential;
use crate::error::{NcError, Result};
use crate::matrix::{EvalCtx, HermTuple, SharedEval};
use crate::parallel::par_map;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Target acceptance rate for the step-size tuner (optimal MALA scaling).
const TARGET_ACCEPTANCE: f64 = 0.574;

/// Energy `N^2 Re V(X)` and its gradient with respect to the unnormalized
/// trace inner product, `N * eval(grad V)(X)`. One shared word cache serves
/// both evaluations.
fn energy_and_grad(v: &Potential, x: &HermTuple) -> Result<(f64, HermTuple)> {
    let ctx = EvalCtx::new(x);
    let mut ev = SharedEval::new(&ctx);
    let n = x.n() as f64;
    let u = ev.scalar(v.value())?.re * n * n;
    let mut grad = HermTuple::zeros(x.n(), x.d());
    for (j, comp) in v.gradient().components().iter().enumerate() {
        let m = ev.matrix(comp)?;
        let h = (&m + m.adjoint()).scale(0.5 * n);
        if h.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(NcError::Numerical("NaN in potential gradient".into()));
        }
        grad.mats_mut()[j] = h;
    }
    Ok((u, grad))
}

struct ChainOutput {
    samples: Vec<HermTuple>,
    accepted: usize,
    steps: usize,
    final_step: f64,
}

fn run_chain(cfg: &EnsembleConfig, chain: usize) -> Result<ChainOutput> {
    let seed = cfg.seed.wrapping_add((chain as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let free = cfg.free_indices();
    let mut x = cfg.initial_state(&mut rng);
    let mut step = if cfg.step > 0.0 { cfg.step } else { 0.5 / cfg.n as f64 };

    let (mut u, mut gu) = energy_and_grad(&cfg.v, &x)?;
    let mut accepted = 0usize;
    let mut recent = 0usize;
    let mut steps = 0usize;
    let mut samples = Vec::with_capacity(cfg.n_samples);
    let total = cfg.burn_in + cfg.n_samples * cfg.thinning;
    let sq_tr = |t: &HermTuple| t.inner_tr(t);

    for it in 0..total {
        // propose on the free components only
        let noise = HermTuple::gaussian_tr(cfg.n, cfg.v.dim(), &mut rng);
        let mut y = x.clone();
        for &j in &free {
            y.mats_mut()[j - 1] = x.mat(j - 1) - gu.mat(j - 1).scale(step)
                + noise.mat(j - 1).scale((2.0 * step).sqrt());
        }
        y.hermitize();
        let (uy, gy) = energy_and_grad(&cfg.v, &y)?;

        // Metropolis-Hastings correction with the Langevin proposal density,
        // restricted to the moving components
        let mut fwd = HermTuple::zeros(cfg.n, free.len());
        let mut bwd = HermTuple::zeros(cfg.n, free.len());
        for (s, &j) in free.iter().enumerate() {
            fwd.mats_mut()[s] =
                y.mat(j - 1) - x.mat(j - 1) + gu.mat(j - 1).scale(step);
            bwd.mats_mut()[s] =
                x.mat(j - 1) - y.mat(j - 1) + gy.mat(j - 1).scale(step);
        }
        let log_alpha = u - uy - sq_tr(&bwd) / (4.0 * step) + sq_tr(&fwd) / (4.0 * step);
        if rng.gen_range(0.0..1.0_f64).ln() < log_alpha {
            x = y;
            u = uy;
            gu = gy;
            accepted += 1;
            recent += 1;
        }
        steps += 1;

        // step-size adaptation during burn-in
        if it < cfg.burn_in && (it + 1) % 50 == 0 {
            let rate = recent as f64 / 50.0;
            step *= (0.6 * (rate - TARGET_ACCEPTANCE)).exp();
            step = step.clamp(1e-7 / cfg.n as f64, 10.0);
            recent = 0;
        }
        if it >= cfg.burn_in && (it - cfg.burn_in) % cfg.thinning == 0 {
            samples.push(x.clone());
        }
    }
    let rate = accepted as f64 / steps as f64;
    if rate < 0.05 {
        return Err(NcError::Numerical(format!(
            "acceptance collapsed to {rate:.3}; the step size is too large for this target"
        )));
    }
    Ok(ChainOutput { samples, accepted, steps, final_step: step })
}

/// Runs the configured chains (in parallel, one seed stream each) and merges
/// the retained samples. Deterministic for a fixed configuration.
pub fn sample_gibbs(cfg: &EnsembleConfig) -> Result<SampleBatch> {
    cfg.validate()?;
    let outs = par_map((0..cfg.chains).collect::<Vec<_>>(), |chain| run_chain(cfg, chain));
    let mut samples = Vec::with_capacity(cfg.chains * cfg.n_samples);
    let mut accepted = 0;
    let mut steps = 0;
    let mut final_step = 0.0;
    let mut bounds = Vec::new();
    for out in outs {
        let o = out?;
        bounds.push((samples.len(), samples.len() + o.samples.len()));
        samples.extend(o.samples);
        accepted += o.accepted;
        steps += o.steps;
        final_step += o.final_step / cfg.chains as f64;
    }
    Ok(SampleBatch {
        samples,
        acceptance_rate: accepted as f64 / steps as f64,
        final_step,
        chain_bounds: bounds,
    })
}
