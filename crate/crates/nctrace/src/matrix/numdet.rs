use super::basis::hermitian_basis;
use super::eval::apply_field;
use super::herm::HermTuple;
use crate::algebra::OperatorField;
use crate::error::{NcError, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Assembles the `d N^2 x d N^2` real matrix of the linear map
/// `Y -> F(X)[Y]` on the Hermitian tuple space in the orthonormal basis.
///
/// `F` must preserve Hermitian tuples (true for differentials of
/// self-adjoint vector fields); the imaginary parts of the assembled entries
/// are checked against a loose tolerance.
pub fn field_matrix(field: &OperatorField, x: &HermTuple) -> Result<DMatrix<f64>> {
    let slot = field
        .slot()
        .ok_or_else(|| NcError::Grading("matrix assembly needs a designated slot".into()))?;
    let _ = slot;
    let n = x.n();
    let d = field.len();
    let basis = hermitian_basis(n);
    let dim = d * basis.len();
    let mut m = DMatrix::<f64>::zeros(dim, dim);
    let mut max_imag = 0.0_f64;
    for (col_j, col_b) in (0..d).flat_map(|j| (0..basis.len()).map(move |b| (j, b))) {
        let mut arg: Vec<DMatrix<Complex64>> = (0..d).map(|_| DMatrix::zeros(n, n)).collect();
        arg[col_j] = basis[col_b].clone();
        let img = apply_field(field, x, Some(&arg))?;
        for (row_j, comp) in img.iter().enumerate() {
            for (row_b, bas) in basis.iter().enumerate() {
                let ip = super::herm::trace_product(bas, comp) / n as f64;
                max_imag = max_imag.max(ip.im.abs());
                m[(row_j * basis.len() + row_b, col_j * basis.len() + col_b)] = ip.re;
            }
        }
    }
    if max_imag > 1e-8 {
        return Err(NcError::Numerical(format!(
            "field does not preserve Hermitian tuples (imag {max_imag:.2e})"
        )));
    }
    Ok(m)
}

/// `(1/N^2) Tr` of the assembled linear map.
pub fn trace_numeric(field: &OperatorField, x: &HermTuple) -> Result<f64> {
    let m = field_matrix(field, x)?;
    Ok(m.trace() / (x.n() * x.n()) as f64)
}

/// `(1/N^2) log |det|` of the assembled linear map, via the LU factorization;
/// fails when a pivot magnitude falls below `1e-280`.
pub fn log_det_numeric(field: &OperatorField, x: &HermTuple) -> Result<f64> {
    let m = field_matrix(field, x)?;
    let dim = m.nrows();
    let lu = m.lu();
    let u = lu.u();
    let mut acc = 0.0;
    for i in 0..dim {
        let p = u[(i, i)].abs();
        if p < 1e-280 {
            return Err(NcError::Numerical("singular linear map in log-determinant".into()));
        }
        acc += p.ln();
    }
    Ok(acc / (x.n() * x.n()) as f64)
}
