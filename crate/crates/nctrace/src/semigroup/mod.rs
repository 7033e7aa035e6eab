//! Heat semigroup of the Gibbs generator, its kernel projection and
//! pseudo-inverse (exact at quadratic bases, perturbative and Monte-Carlo
//! otherwise), flow integration, and the transport experiments.

mod basis;
mod exact;
mod flow;
mod mc;
mod metric;
mod pert;
#[cfg(test)]
mod tests;
mod transport;
mod triangular;

pub use basis::DegreeBasis;
pub use exact::{expectation_base, psi_base, psi_base_active, semigroup_exact};
pub use flow::{flow_integrate, rk4_step};
pub use mc::{psi_mc, semigroup_mc, McEstimate};
pub use metric::{riemannian_metric, riemannian_metric_sampled};
pub use pert::{psi_perturbative, scha_curvature, PsiSolution};
pub use transport::{run_transport, transport_field, MomentRow, TransportPlan, TransportReport};
pub use triangular::{
    is_triangular, triangular_field, triangular_transport, QuadraticFamily, TriangularPlan,
    TriangularReport,
};
