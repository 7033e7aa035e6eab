use crate::algebra::TracePolynomial;
use crate::calculus::Potential;
use crate::error::{NcError, Result};
use crate::matrix::{apply_vector_field, evaluate_scalar, HermTuple};
use crate::parallel::par_map;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Monte-Carlo estimate with its standard error.
#[derive(Clone, Copy, Debug)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
}

/// One Euler-Maruyama path of `dX = dS - 1/2 grad V(X) du` up to time
/// `s_end`, recording `f(X(s))` at the requested observation times.
fn one_path(
    f: &TracePolynomial,
    v: &Potential,
    x0: &HermTuple,
    s_obs: &[f64],
    dt: f64,
    seed: u64,
) -> Result<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = x0.n();
    let d = x0.d();
    let mut x = x0.clone();
    let mut out = Vec::with_capacity(s_obs.len());
    let mut s = 0.0_f64;
    let mut next = 0usize;
    let s_end = s_obs.last().copied().unwrap_or(0.0);
    if s_obs.first().copied() == Some(0.0) {
        out.push(evaluate_scalar(f, &x)?.re);
        next = 1;
    }
    let sqrt_scale = |dt: f64| (dt / n as f64).sqrt();
    while s < s_end - 1e-12 {
        let step = dt.min(s_end - s);
        let grad = apply_vector_field(v.gradient(), &x)?;
        let noise = HermTuple::gaussian_tr(n, d, &mut rng).scale(sqrt_scale(step));
        x = x.axpy(-0.5 * step, &grad).axpy(1.0, &noise);
        x.hermitize();
        s += step;
        if x.norm2_trn() > 1e6 {
            return Err(NcError::Divergence("Euler path norm blow-up".into()));
        }
        while next < s_obs.len() && s >= s_obs[next] - 1e-12 {
            out.push(evaluate_scalar(f, &x)?.re);
            next += 1;
        }
    }
    while next < s_obs.len() {
        out.push(evaluate_scalar(f, &x)?.re);
        next += 1;
    }
    Ok(out)
}

/// Heat-semigroup value `e^{t L_V} f (x0)` by path averaging: the driving
/// process is Hermitian matrix Brownian motion (increment variance `dt/N`
/// in `tr_N`), the drift is `-1/2 grad V`, and `f` is read off at process
/// time `2 t`.
pub fn semigroup_mc(
    f: &TracePolynomial,
    v: &Potential,
    t: f64,
    x0: &HermTuple,
    paths: usize,
    dt: f64,
    seed: u64,
) -> Result<McEstimate> {
    if dt > 0.01 + 1e-12 {
        return Err(NcError::Config("Euler step must be at most 0.01".into()));
    }
    if paths < 50 {
        return Err(NcError::Config("at least 50 paths are required".into()));
    }
    let vals = par_map((0..paths as u64).collect::<Vec<_>>(), |p| {
        one_path(f, v, x0, &[2.0 * t], dt, seed.wrapping_add(p.wrapping_mul(0x9E37)))
            .map(|v| v[0])
    });
    let mut xs = Vec::with_capacity(paths);
    for v in vals {
        xs.push(v?);
    }
    Ok(mean_stderr(&xs))
}

/// Pseudo-inverse value `Psi_V f (x0)` by time quadrature of the semigroup
/// along shared paths: `int_0^{T} (e^{tL} f - Ef) dt` with trapezoids on a
/// grid of spacing `quad_dt`, truncated at `t_max` chosen from the decay
/// proxy `c`. When `e_v` is `None`, the kernel projection is estimated from
/// the terminal time slice of the same paths (the chain is then nearly
/// stationary). Returns the estimate and the reported tail bound
/// `exp(-c t_max) * scale / c`.
pub fn psi_mc(
    f: &TracePolynomial,
    v: &Potential,
    x0: &HermTuple,
    e_v: Option<f64>,
    c_proxy: f64,
    t_max: f64,
    quad_dt: f64,
    paths: usize,
    dt: f64,
    seed: u64,
) -> Result<(McEstimate, f64)> {
    if c_proxy <= 0.0 {
        return Err(NcError::Config(
            "nonpositive decay proxy: the pseudo-inverse quadrature needs c > 0".into(),
        ));
    }
    let mut ts = Vec::new();
    let mut t = 0.0;
    while t < t_max - 1e-12 {
        ts.push(t);
        t += quad_dt;
    }
    ts.push(t_max);
    // extend the horizon when the kernel projection must be self-estimated
    let est_e = e_v.is_none();
    if est_e {
        ts.push(1.5 * t_max);
        ts.push(2.0 * t_max);
    }
    let s_obs: Vec<f64> = ts.iter().map(|t| 2.0 * t).collect();
    let trajs = par_map((0..paths as u64).collect::<Vec<_>>(), |p| {
        one_path(f, v, x0, &s_obs, dt, seed.wrapping_add(p.wrapping_mul(0x7C15)))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let e_hat = match e_v {
        Some(e) => e,
        None => {
            // average the last two (well-decorrelated) slices across paths
            let m = ts.len();
            trajs.iter().map(|tr| 0.5 * (tr[m - 1] + tr[m - 2])).sum::<f64>() / paths as f64
        }
    };
    let quad_len = if est_e { ts.len() - 2 } else { ts.len() };
    let xs: Vec<f64> = trajs
        .iter()
        .map(|traj| {
            let mut acc = 0.0;
            for i in 1..quad_len {
                let w = ts[i] - ts[i - 1];
                acc += 0.5 * w * ((traj[i - 1] - e_hat) + (traj[i] - e_hat));
            }
            acc
        })
        .collect();
    let scale0 = evaluate_scalar(f, x0)?.re.abs().max(1.0);
    let tail = (-c_proxy * t_max).exp() * scale0 / c_proxy;
    Ok((mean_stderr(&xs), tail))
}

fn mean_stderr(xs: &[f64]) -> McEstimate {
    let n = xs.len().max(1);
    let mean = xs.iter().sum::<f64>() / n as f64;
    let var = if n > 1 {
        xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
    } else {
        0.0
    };
    McEstimate { mean, stderr: (var / n as f64).sqrt() }
}
