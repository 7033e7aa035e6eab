use super::exact::psi_base_active;
use super::flow::rk4_step;
use crate::algebra::{
    Bindings, CyclicWord, Declaration, Letter, MonomialKey, OperatorField, TracePolynomial, Word,
};
use crate::calculus::cyclic_gradient_on;
use crate::error::{NcError, Result};
use crate::gibbs::{sample_gibbs, stat_from_series, EnsembleConfig, SampleBatch};
use crate::matrix::evaluate_scalar;
use crate::parallel::par_map;
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Quadratic potential family `V = 1/2 <x, A x>` given by a symmetric
/// positive-definite precision matrix; marginals and conditional means are
/// exact Schur-complement algebra.
#[derive(Clone, Debug)]
pub struct QuadraticFamily {
    pub precision: DMatrix<f64>,
}

impl QuadraticFamily {
    pub fn new(precision: DMatrix<f64>) -> Result<Self> {
        if precision.nrows() != precision.ncols() {
            return Err(NcError::Dimension("precision matrix must be square".into()));
        }
        if (precision.transpose() - &precision).norm() > 1e-12 {
            return Err(NcError::Config("precision matrix must be symmetric".into()));
        }
        Ok(QuadraticFamily { precision })
    }

    pub fn dim(&self) -> usize {
        self.precision.nrows()
    }

    /// The potential `1/2 sum a_ii tr(x_i^2) + sum_{i<j} a_ij tr(x_i x_j)`.
    pub fn potential(&self, decl: &Declaration) -> Result<TracePolynomial> {
        let d = self.dim();
        let mut acc = TracePolynomial::zero(decl.clone());
        for i in 0..d {
            for j in i..d {
                let a = self.precision[(i, j)];
                if a.abs() < 1e-15 {
                    continue;
                }
                let coeff = if i == j { 0.5 * a } else { a };
                let w = Word(vec![Letter::x(i + 1), Letter::x(j + 1)]);
                let key = MonomialKey::new(vec![CyclicWord::new(w)], Word::one());
                acc = acc.try_add(&TracePolynomial::from_terms(
                    decl.clone(),
                    [(key, Complex64::new(coeff, 0.0))],
                ))?;
            }
        }
        Ok(acc)
    }

    /// Marginal precision on the first `j` variables: the Schur complement
    /// over the remaining block.
    pub fn marginal(&self, j: usize) -> Result<QuadraticFamily> {
        let d = self.dim();
        if j == 0 || j > d {
            return Err(NcError::Dimension("marginal block out of range".into()));
        }
        if j == d {
            return Ok(self.clone());
        }
        let a = self.precision.view((0, 0), (j, j)).into_owned();
        let b = self.precision.view((0, j), (j, d - j)).into_owned();
        let c = self.precision.view((j, j), (d - j, d - j)).into_owned();
        let c_inv = c
            .try_inverse()
            .ok_or_else(|| NcError::Numerical("conditioned block is singular".into()))?;
        Ok(QuadraticFamily { precision: a - &b * c_inv * b.transpose() })
    }

    /// Conditional-mean substitution of the frozen block `x_{j+1..d}` given
    /// the first `j` variables: each frozen letter is replaced by the linear
    /// combination `-(A_BB)^{-1} A_BA x_A` of active letters.
    pub fn conditional_mean_bindings(&self, j: usize, decl: &Declaration) -> Result<Bindings> {
        let d = self.dim();
        let mut out = Bindings::new();
        if j >= d {
            return Ok(out);
        }
        let b = self.precision.view((j, 0), (d - j, j)).into_owned();
        let c = self.precision.view((j, j), (d - j, d - j)).into_owned();
        let c_inv = c
            .try_inverse()
            .ok_or_else(|| NcError::Numerical("conditioned block is singular".into()))?;
        let coeffs = -(c_inv * b); // (d-j) x j
        for row in 0..(d - j) {
            let mut target = TracePolynomial::zero(decl.clone());
            for col in 0..j {
                let a = coeffs[(row, col)];
                if a.abs() > 1e-15 {
                    target = target.try_add(
                        &TracePolynomial::var_x(decl, col + 1)?.scale_re(a),
                    )?;
                }
            }
            out.insert(Letter::x(j + 1 + row), target);
        }
        Ok(out)
    }
}

/// Triangular transport along `A(t) = I + t C` for a quadratic coupling
/// `phi = sum c_ik tr(x_i x_k)`.
#[derive(Clone, Debug)]
pub struct TriangularPlan {
    /// Symmetric coupling matrix of the perturbation (zero diagonal allowed).
    pub coupling: DMatrix<f64>,
    pub grid_steps: usize,
    pub observables: Vec<(String, TracePolynomial)>,
}

#[derive(Clone, Debug)]
pub struct TriangularReport {
    pub rows: Vec<super::transport::MomentRow>,
    /// Per-component verification that `h_j` only mentions `x_1..x_j`.
    pub triangular_ok: bool,
}

/// Builds the lower-triangular field at path time `t` by the marginal /
/// conditional pseudo-inverse recursion:
/// `h_j = grad_{x_j} Psi_{x_j, V_j}( E_{x_{j+1..d}, V}(phi) - sum_{i<j}
/// <grad_{x_i} V_j, h_i> )`.
pub fn triangular_field(
    family: &QuadraticFamily,
    phi: &TracePolynomial,
    decl: &Declaration,
) -> Result<OperatorField> {
    let d = family.dim();
    let mut comps: Vec<TracePolynomial> = Vec::with_capacity(d);
    for j in 1..=d {
        let v_j = family.marginal(j)?;
        // conditional expectation of phi over the frozen block
        let bindings = family.conditional_mean_bindings(j, decl)?;
        let mut arg = phi.substitute(&bindings, decl)?;
        // subtract the couplings to the already-built components
        for (i, h_i) in comps.iter().enumerate() {
            // grad_{x_i} V_j = sum_k (S_j)_{ik} x_k over k <= j
            let mut grad_i = TracePolynomial::zero(decl.clone());
            for k in 0..j {
                let a = v_j.precision[(i, k)];
                if a.abs() > 1e-15 {
                    grad_i = grad_i.try_add(&TracePolynomial::var_x(decl, k + 1)?.scale_re(a))?;
                }
            }
            arg = arg.try_sub(&grad_i.try_mul(h_i)?.close_trace())?;
        }
        // complete the square in x_j: shift by the conditional mean within V_j
        let c_j = v_j.precision[(j - 1, j - 1)];
        if c_j <= 0.0 {
            return Err(NcError::Numerical("marginal curvature not positive".into()));
        }
        let mut mu = TracePolynomial::zero(decl.clone());
        for i in 0..j - 1 {
            let a = v_j.precision[(j - 1, i)];
            if a.abs() > 1e-15 {
                mu = mu.try_add(&TracePolynomial::var_x(decl, i + 1)?.scale_re(-a / c_j))?;
            }
        }
        let shift_in = {
            let mut b = Bindings::new();
            b.insert(
                Letter::x(j),
                TracePolynomial::var_x(decl, j)?.try_add(&mu)?,
            );
            b
        };
        let shift_out = {
            let mut b = Bindings::new();
            b.insert(
                Letter::x(j),
                TracePolynomial::var_x(decl, j)?.try_sub(&mu)?,
            );
            b
        };
        let shifted = arg.substitute(&shift_in, decl)?;
        let (g_shifted, _e) = psi_base_active(&shifted, j, c_j)?;
        let g = g_shifted.substitute(&shift_out, decl)?;
        let h_j = cyclic_gradient_on(&g, &[j])?.component(0).clone();
        comps.push(h_j);
    }
    OperatorField::vector(comps)
}

/// Checks the structural triangularity: component `j` mentions no letter
/// `x_k` with `k > j`.
pub fn is_triangular(h: &OperatorField) -> bool {
    let d = h.len();
    for (j, comp) in h.components().iter().enumerate() {
        for k in (j + 2)..=d {
            if !comp.is_free_of_letter(&Letter::x(k)) {
                return false;
            }
        }
    }
    true
}

/// Runs the triangular transport experiment: builds `h_t` per grid node
/// from the exact quadratic marginals, asserts triangularity, flows the
/// source samples, and compares moments against a direct endpoint sample.
pub fn triangular_transport(
    plan: &TriangularPlan,
    source: &SampleBatch,
    target_cfg: &EnsembleConfig,
) -> Result<TriangularReport> {
    let d = plan.coupling.nrows();
    let decl = Declaration::scalar(d);
    let dt = 1.0 / plan.grid_steps as f64;
    // phi = Vdot = 1/2 <x, C x> written out per entry
    let phi = {
        let mut acc = TracePolynomial::zero(decl.clone());
        for i in 0..d {
            for k in i..d {
                let a = plan.coupling[(i, k)];
                if a.abs() < 1e-15 {
                    continue;
                }
                let coeff = if i == k { 0.5 * a } else { a };
                let w = Word(vec![Letter::x(i + 1), Letter::x(k + 1)]);
                acc = acc.try_add(&TracePolynomial::from_terms(
                    decl.clone(),
                    [(
                        MonomialKey::new(vec![CyclicWord::new(w)], Word::one()),
                        Complex64::new(coeff, 0.0),
                    )],
                ))?;
            }
        }
        acc
    };

    let mut samples = source.samples.clone();
    let mut triangular_ok = true;
    for step in 0..plan.grid_steps {
        let t = step as f64 * dt;
        let field_at = |tau: f64| -> Result<OperatorField> {
            let a = DMatrix::<f64>::identity(d, d) + plan.coupling.scale(tau);
            let h = triangular_field(&QuadraticFamily::new(a)?, &phi, &decl)?;
            Ok(h.scale_re(-1.0))
        };
        let h0 = field_at(t)?;
        let hh = field_at(t + 0.5 * dt)?;
        let h1 = field_at(t + dt)?;
        triangular_ok &= is_triangular(&h0) && is_triangular(&hh) && is_triangular(&h1);
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
        rows.push(super::transport::MomentRow {
            name: name.clone(),
            pushed_mean: ps.mean.re,
            pushed_stderr: ps.stderr,
            direct_mean: ds.mean.re,
            direct_stderr: ds.stderr,
            z: (ps.mean.re - ds.mean.re) / comb,
        });
    }
    Ok(TriangularReport { rows, triangular_ok })
}
