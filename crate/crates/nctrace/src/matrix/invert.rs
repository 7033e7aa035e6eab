use super::eval::apply_vector_field;
use super::herm::HermTuple;
use crate::algebra::OperatorField;
use crate::error::{NcError, Result};

/// Numeric inversion of a vector field by fixed-point iteration
/// `y_{n+1} = x_target + (y_n - f(y_n))`, valid when `df` is within
/// contraction distance `k < 1` of `k_prime * Id` after rescaling.
///
/// Solves `f(y) = x_target` to tolerance `tol` in the `tr_N` 2-norm;
/// convergence is geometric with rate `k / k_prime`, and failure to converge
/// within `max_iter` reports a violated contraction assumption.
pub fn invert_map(
    f: &OperatorField,
    x_target: &HermTuple,
    k: f64,
    k_prime: f64,
    tol: f64,
    max_iter: usize,
) -> Result<HermTuple> {
    if !(k < k_prime) {
        return Err(NcError::Config("contraction constant must satisfy k < k_prime".into()));
    }
    let scaled_target = x_target.scale(1.0 / k_prime);
    let mut y = scaled_target.clone();
    for _ in 0..max_iter {
        let fy = apply_vector_field(f, &y)?.scale(1.0 / k_prime);
        let resid = fy.axpy(-1.0, &scaled_target);
        if resid.norm2_trn() <= tol {
            return Ok(y);
        }
        // y <- target/k' + y - f(y)/k'
        y = scaled_target.axpy(1.0, &y).axpy(-1.0, &fy);
        y.hermitize();
    }
    // final residual check against the unscaled equation
    let fy = apply_vector_field(f, &y)?;
    let resid = fy.axpy(-1.0, x_target).norm2_trn();
    if resid <= tol * k_prime {
        Ok(y)
    } else {
        Err(NcError::Numerical(format!(
            "fixed-point inversion did not converge (residual {resid:.3e}); \
             the contraction bound k={k} appears violated"
        )))
    }
}
