//! Differential operators on trace polynomials.
//!
//! The operators come in dual pairs: the directional derivative `differential`
//! and the `cyclic_gradient` are related through the trace pairing, while
//! `field_trace` and `wick_contract` contract semicircular probes into the
//! argument slots of operator-valued fields. On top of these sit the
//! Laplacian, its Gibbs-weighted variant, the weighted divergence, Lie
//! brackets, the field adjoint, the log-determinant power series, and the
//! push-forward of potentials along diffeomorphisms.

mod adjoint;
mod bracket;
mod contract;
mod derive;
mod gradient;
mod laplacian;
mod logdet;
mod potential;
mod pushforward;

pub use adjoint::star_transpose;
pub use bracket::lie_bracket;
pub use contract::{divergence_correction, field_trace, wick_contract};
pub use derive::{differential, differential_on, field_differential, partial_derivative};
pub use gradient::{cyclic_gradient, cyclic_gradient_on};
pub use laplacian::{
    gibbs_laplacian, gibbs_laplacian_on, laplacian, laplacian_on, weighted_divergence,
};
pub use logdet::{log_det_series, log_det_series_checked};
pub use potential::{quadratic_term, Potential};
pub use pushforward::{compose_scalar, compose_vector, pushforward};
