//! Evaluation of trace polynomials on Hermitian matrix tuples and the exact
//! finite-N ground-truth identities used to validate the symbolic layer.

mod basis;
mod classical;
mod eval;
mod herm;
mod invert;
mod magic;
mod numdet;
#[cfg(test)]
mod tests;

pub use basis::hermitian_basis;
pub use classical::{
    classical_divergence, classical_gradient_fd, classical_laplacian, LaplacianMode,
};
pub use eval::{
    apply_field, apply_vector_field, evaluate_matrix, evaluate_scalar, evaluate_scalar_ctx,
    EvalCtx, SharedEval,
};
pub use herm::{fast_mul, gaussian_tr_matrix, gue_matrix, trace_product, HermTuple};
pub use invert::invert_map;
pub use magic::{magic_formula_check, MagicResiduals};
pub use numdet::{field_matrix, log_det_numeric, trace_numeric};
