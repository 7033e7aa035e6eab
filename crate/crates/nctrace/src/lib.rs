//! Symbolic trace-polynomial calculus with finite-N random matrix backends.
//!
//! The crate has three layers:
//!
//! * [`algebra`] — canonical trace polynomials in self-adjoint variables
//!   (cyclic trace factors times an outer word), their arithmetic, parsing
//!   and printing, and operator-valued fields.
//! * [`calculus`] — the differential operators on that algebra: directional
//!   derivatives, the cyclic gradient, the trace of operator fields, the
//!   semicircular contraction, Laplacians and their Gibbs-weighted variants,
//!   Lie brackets, adjoints, and the log-determinant power series.
//! * numerics — [`matrix`] evaluates everything on tuples of Hermitian
//!   matrices and provides exact finite-N identities; [`gibbs`] samples
//!   matrix ensembles with MALA and carries independent combinatorial moment
//!   oracles; [`semigroup`] implements the heat semigroup, the pseudo-inverse
//!   of the generator, flows, and the transport experiments.
//!
//! Everything downstream of [`algebra`] treats trace polynomials as immutable
//! values, so the data-parallel loops (chains, paths, per-sample flows, basis
//! sums) distribute over threads freely. The `parallel` feature (default)
//! backs those loops with rayon; without it the same code runs sequentially.

pub mod algebra;
pub mod calculus;
pub mod error;
pub mod gibbs;
pub mod matrix;
pub mod parallel;
pub mod semigroup;

pub mod acceptance;
pub mod randgen;

pub use error::NcError;

/// Coefficients below this magnitude are dropped during canonicalization.
pub const ZERO_EPS: f64 = 1e-14;
