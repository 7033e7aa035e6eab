use super::exact::psi_base;
use crate::algebra::{TracePolynomial, VarClass};
use crate::calculus::{cyclic_gradient, gibbs_laplacian, quadratic_term, Potential};
use crate::error::{NcError, Result};

/// Result of the perturbative pseudo-inverse: the approximate solution of
/// `-L_V g = f - e` and the coefficient-norm residual history.
#[derive(Clone, Debug)]
pub struct PsiSolution {
    pub g: TracePolynomial,
    pub expectation: f64,
    /// `|| -L_V g_k - (f - e_k) ||` in coefficient norm after each iterate.
    pub residual_history: Vec<f64>,
}

impl PsiSolution {
    pub fn final_residual(&self) -> f64 {
        self.residual_history.last().copied().unwrap_or(0.0)
    }
}

/// Pseudo-inverse of the Gibbs generator by iteration around a quadratic
/// base of curvature `base_c`:
///
/// `g_0 = Psi_base(f)`, then
/// `g_{k+1} = Psi_base(f - <grad Wt, grad g_k>)` where
/// `Wt = V - base_c/2 sum tr(x_j^2)` is the residual perturbation, each
/// step re-centered by the base expectation. `K` iterations are taken; each
/// raises the degree by `deg(W) - 2`, and `K (deg W - 2) + deg f` must stay
/// within the cutoff `D`.
///
/// The iteration contracts when the residual curvature is small on the
/// support; beyond that regime it is an asymptotic scheme and small `K`
/// with a base curvature matched to the sampled second moments gives the
/// accurate truncation (see `scha_curvature`).
pub fn psi_perturbative(
    f: &TracePolynomial,
    v: &Potential,
    base_c: f64,
    iterations: usize,
    cutoff: usize,
) -> Result<PsiSolution> {
    f.require_scalar("pseudo-inverse")?;
    let decl = f.decl.clone();
    let wt = v.value().try_sub(&quadratic_term(&decl, 0.5 * base_c)?)?;
    let w_deg = wt.degree();
    let raise = w_deg.saturating_sub(2);
    if iterations * raise + f.degree() > cutoff {
        return Err(NcError::DegreeOverflow {
            got: iterations * raise + f.degree(),
            cutoff,
        });
    }
    let wt_grad = cyclic_gradient(&wt)?;

    let (mut g, mut e) = psi_base(f, base_c)?;
    let mut history = vec![residual_norm(f, v, &g)?];
    for _ in 0..iterations {
        let coupling = wt_grad.pair_trace(&cyclic_gradient(&g)?)?;
        let rhs = f.try_sub(&coupling)?;
        let (gn, en) = psi_base(&rhs, base_c)?;
        g = gn;
        e = en;
        history.push(residual_norm(f, v, &g)?);
    }
    Ok(PsiSolution { g, expectation: e.re, residual_history: history })
}

/// Coefficient norm of `-L_V g - (f - e)` with the constant removed.
fn residual_norm(f: &TracePolynomial, v: &Potential, g: &TracePolynomial) -> Result<f64> {
    let lg = gibbs_laplacian(g, v)?;
    let mut r = lg.scale_re(-1.0).try_sub(f)?;
    r = r.filter_terms(|k| !(k.factors.is_empty() && k.outer.is_empty()));
    Ok(r.coeff_norm())
}

/// Self-consistent base curvature: `1 + sum` over the pure-power trace terms
/// `a tr(x_j^k)` of the perturbation of `a k (k-1) m_{k-2}` averaged over
/// the variables, where `m` are supplied moments of the current ensemble.
/// This is the spectral curvature of the effective one-variable force; for a
/// quadratic path it reproduces the exact curvature, and for the quartic it
/// gives `1 + 12 g m_2`.
///
/// Mixed-variable terms (small couplings) are left out of the adaptation.
pub fn scha_curvature(
    w: &TracePolynomial,
    moment_of: &dyn Fn(usize, usize) -> f64,
) -> f64 {
    let d = w.decl.dim_x.max(1);
    let mut acc = vec![0.0_f64; d];
    for (key, coeff) in w.terms() {
        if key.factors.len() != 1 || !key.outer.is_empty() {
            continue;
        }
        let word = key.factors[0].word();
        let Some(first) = word.0.first() else { continue };
        let j = match first.class {
            VarClass::X => first.index,
            _ => continue,
        };
        if !word.0.iter().all(|l| matches!(l.class, VarClass::X) && l.index == j) {
            continue;
        }
        let k = word.len();
        if k >= 2 {
            let m = if k == 2 { 1.0 } else { moment_of(j, k - 2) };
            acc[j - 1] += coeff.re * (k * (k - 1)) as f64 * m;
        }
    }
    1.0 + acc.iter().sum::<f64>() / d as f64
}
