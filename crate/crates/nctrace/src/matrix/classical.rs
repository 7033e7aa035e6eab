use super::basis::hermitian_basis;
use super::eval::{evaluate_scalar, evaluate_scalar_ctx, EvalCtx};
use super::herm::HermTuple;
use crate::algebra::{OperatorField, TracePolynomial};
use crate::calculus::differential;
use crate::error::Result;
use crate::parallel::par_map;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

/// Backend for the finite-N Laplacian of an evaluated scalar polynomial.
#[derive(Clone, Copy, Debug)]
pub enum LaplacianMode {
    /// Sum of second directional derivatives over the orthonormal basis of
    /// the tuple space; exact up to rounding, cost `O(d N^2)` evaluations.
    ExactBasis,
    /// Gaussian-probe average with the given number of probes (unbiased).
    Hutchinson(usize),
}

/// `(1/N^2) * Delta f(X)` for a scalar polynomial: the classical Laplacian
/// on the `d N^2`-dimensional real inner product space.
///
/// The second directional derivative is evaluated symbolically (the second
/// differential contracted with the direction twice), so `ExactBasis` has no
/// finite-difference error.
pub fn classical_laplacian(
    f: &TracePolynomial,
    x: &HermTuple,
    mode: LaplacianMode,
    rng: &mut impl Rng,
) -> Result<Complex64> {
    f.require_scalar("classical laplacian")?;
    let (df, s1) = differential(f)?;
    let (ddf, s2) = differential(&df)?;
    let n = x.n();
    let d = x.d();
    let nn = (n * n) as f64;
    match mode {
        LaplacianMode::ExactBasis => {
            let basis = hermitian_basis(n);
            // tuple directions: one basis matrix in one component
            let jobs: Vec<(usize, usize)> =
                (0..d).flat_map(|j| (0..basis.len()).map(move |b| (j, b))).collect();
            let vals = par_map(jobs, |(j, b)| {
                let mut dir: Vec<DMatrix<Complex64>> =
                    (0..d).map(|_| DMatrix::zeros(n, n)).collect();
                dir[j] = basis[b].clone();
                let ctx = EvalCtx::new(x)
                    .with_slot(s1, dir.clone())
                    .with_slot(s2, dir);
                evaluate_scalar_ctx(&ddf, &ctx)
            });
            let mut acc = Complex64::default();
            for v in vals {
                acc += v?;
            }
            Ok(acc / nn)
        }
        LaplacianMode::Hutchinson(probes) => {
            let seeds: Vec<u64> = (0..probes).map(|_| rng.gen()).collect();
            let vals = par_map(seeds, |seed| {
                use rand::SeedableRng;
                let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                // standard Gaussian in the tr_N geometry is sqrt(N) times the
                // Tr-standard Gaussian
                let z = HermTuple::gaussian_tr(n, d, &mut r);
                let zs: Vec<DMatrix<Complex64>> =
                    z.mats().iter().map(|m| m.scale((n as f64).sqrt())).collect();
                let ctx = EvalCtx::new(x)
                    .with_slot(s1, zs.clone())
                    .with_slot(s2, zs);
                evaluate_scalar_ctx(&ddf, &ctx)
            });
            let mut acc = Complex64::default();
            for v in vals {
                acc += v?;
            }
            Ok(acc / probes as f64 / nn)
        }
    }
}

/// Coordinate gradient of the evaluated function by central finite
/// differences, as a Hermitian tuple with respect to the `tr_N` geometry.
pub fn classical_gradient_fd(f: &TracePolynomial, x: &HermTuple, h: f64) -> Result<HermTuple> {
    let n = x.n();
    let d = x.d();
    let basis = hermitian_basis(n);
    let mut out = HermTuple::zeros(n, d);
    for j in 0..d {
        let mut grad_j = DMatrix::<Complex64>::zeros(n, n);
        for b in &basis {
            let mut xp = x.clone();
            xp.mats_mut()[j] += b.scale(h);
            let mut xm = x.clone();
            xm.mats_mut()[j] -= b.scale(h);
            let der = (evaluate_scalar(f, &xp)? - evaluate_scalar(f, &xm)?) / (2.0 * h);
            grad_j += b.scale_complex_local(der);
        }
        out.mats_mut()[j] = grad_j;
    }
    out.hermitize();
    Ok(out)
}

/// Exact coordinate divergence of an evaluated vector field, as a basis sum
/// of symbolic first derivatives: `Div h (X) = sum_E <E, dh(X)[E]>`.
pub fn classical_divergence(h: &OperatorField, x: &HermTuple) -> Result<Complex64> {
    let dh = crate::calculus::field_differential(h)?;
    let slot = dh.slot().expect("field differential carries a slot");
    let n = x.n();
    let d = x.d();
    let basis = hermitian_basis(n);
    let mut acc = Complex64::default();
    for j in 0..d {
        for b in &basis {
            let mut dir: Vec<DMatrix<Complex64>> =
                (0..d).map(|_| DMatrix::zeros(n, n)).collect();
            dir[j] = b.clone();
            let ctx = EvalCtx::new(x).with_slot(slot, dir);
            let img = super::eval::evaluate_matrix(dh.component(j), &ctx)?;
            acc += super::herm::trace_product(b, &img) / n as f64;
        }
    }
    Ok(acc)
}

trait ScaleComplexLocal {
    fn scale_complex_local(&self, c: Complex64) -> Self;
}

impl ScaleComplexLocal for DMatrix<Complex64> {
    fn scale_complex_local(&self, c: Complex64) -> Self {
        self.map(|z| z * c)
    }
}
