use crate::algebra::OperatorField;
use crate::error::{NcError, Result};
use crate::matrix::{apply_vector_field, HermTuple};

/// Integrates `dX/dt = h_t(X)` from `t0` to `t1` with classical RK4.
///
/// `field_at` supplies the (plain) vector field at a given time; the caller
/// may cache repeated stage times. Global error is `O(step^4)` for smooth
/// fields; trajectories exceeding the blow-up bound abort.
pub fn flow_integrate(
    field_at: &mut dyn FnMut(f64) -> Result<OperatorField>,
    x0: &HermTuple,
    t0: f64,
    t1: f64,
    step: f64,
) -> Result<HermTuple> {
    if step <= 0.0 {
        return Err(NcError::Config("flow step must be positive".into()));
    }
    let mut x = x0.clone();
    let mut t = t0;
    let norm_limit = 1e4 * (1.0 + x0.norm2_trn());
    while t < t1 - 1e-12 {
        let h = step.min(t1 - t);
        let h0 = field_at(t)?;
        let h_half = field_at(t + 0.5 * h)?;
        let h1 = field_at(t + h)?;
        x = rk4_step(&x, h, &h0, &h_half, &h1)?;
        t += h;
        if x.norm2_trn() > norm_limit {
            return Err(NcError::Divergence(format!(
                "flow trajectory norm blow-up at t = {t:.4}"
            )));
        }
    }
    Ok(x)
}

/// One RK4 step with the three stage fields already built.
pub fn rk4_step(
    x: &HermTuple,
    h: f64,
    f_t: &OperatorField,
    f_half: &OperatorField,
    f_t1: &OperatorField,
) -> Result<HermTuple> {
    let k1 = apply_vector_field(f_t, x)?;
    let k2 = apply_vector_field(f_half, &x.axpy(0.5 * h, &k1))?;
    let k3 = apply_vector_field(f_half, &x.axpy(0.5 * h, &k2))?;
    let k4 = apply_vector_field(f_t1, &x.axpy(h, &k3))?;
    let mut out = x
        .axpy(h / 6.0, &k1)
        .axpy(h / 3.0, &k2)
        .axpy(h / 3.0, &k3)
        .axpy(h / 6.0, &k4);
    out.hermitize();
    Ok(out)
}
