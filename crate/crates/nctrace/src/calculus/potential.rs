use super::gradient::cyclic_gradient;
use crate::algebra::{Declaration, OperatorField, TracePolynomial, Word};
use crate::error::{NcError, Result};
use num_complex::Complex64;

/// A self-adjoint scalar potential together with its cached cyclic gradient.
#[derive(Clone, Debug)]
pub struct Potential {
    v: TracePolynomial,
    grad: OperatorField,
    quadratic_base: bool,
}

impl Potential {
    /// Builds a potential from a scalar-valued self-adjoint polynomial.
    pub fn new(v: TracePolynomial) -> Result<Self> {
        v.require_scalar("potential")?;
        if !v.is_self_adjoint(1e-10) {
            return Err(NcError::Grading("potential is not self-adjoint".into()));
        }
        let grad = cyclic_gradient(&v)?;
        let quadratic_base = v.approx_eq(&quadratic_term(&v.decl, 0.5)?, 1e-14);
        Ok(Potential { v, grad, quadratic_base })
    }

    /// The quadratic base `1/2 sum_j tr(x_j^2)` in `d` variables.
    pub fn quadratic_base(d: usize) -> Result<Self> {
        Self::new(quadratic_term(&Declaration::scalar(d), 0.5)?)
    }

    /// Scaled quadratic `c/2 sum_j tr(x_j^2)`.
    pub fn scaled_quadratic(d: usize, c: f64) -> Result<Self> {
        Self::new(quadratic_term(&Declaration::scalar(d), 0.5 * c)?)
    }

    /// Quadratic base plus a polynomial perturbation.
    pub fn base_plus(w: &TracePolynomial) -> Result<Self> {
        let base = quadratic_term(&w.decl, 0.5)?;
        Self::new(base.try_add(w)?)
    }

    pub fn value(&self) -> &TracePolynomial {
        &self.v
    }

    pub fn gradient(&self) -> &OperatorField {
        &self.grad
    }

    pub fn decl(&self) -> &Declaration {
        &self.v.decl
    }

    pub fn dim(&self) -> usize {
        self.v.decl.dim_x
    }

    pub fn is_quadratic_base(&self) -> bool {
        self.quadratic_base
    }

    /// The perturbation `V - 1/2 sum tr(x_j^2)`.
    pub fn perturbation(&self) -> Result<TracePolynomial> {
        self.v.try_sub(&quadratic_term(&self.v.decl, 0.5)?)
    }
}

/// `a * sum_j tr(x_j^2)` in the given declaration.
pub fn quadratic_term(decl: &Declaration, a: f64) -> Result<TracePolynomial> {
    let mut acc = TracePolynomial::zero(decl.clone());
    for j in 1..=decl.dim_x {
        let w = Word(vec![crate::algebra::Letter::x(j), crate::algebra::Letter::x(j)]);
        acc = acc.try_add(&TracePolynomial::trace_of(decl.clone(), w)?)?;
    }
    Ok(acc.scale(Complex64::new(a, 0.0)))
}
