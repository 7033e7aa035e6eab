use crate::error::{NcError, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use std::io::{Read, Write};

/// A `d`-tuple of `N x N` Hermitian matrices with the normalized-trace
/// geometry: `<X, Y> = sum_j tr_N(X_j Y_j)` where `tr_N = Tr / N`.
#[derive(Clone, Debug, PartialEq)]
pub struct HermTuple {
    n: usize,
    mats: Vec<DMatrix<Complex64>>,
}

impl HermTuple {
    /// Wraps matrices, verifying squareness, common size, and Hermitianity.
    pub fn new(mats: Vec<DMatrix<Complex64>>) -> Result<Self> {
        let n = mats
            .first()
            .map(|m| m.nrows())
            .ok_or_else(|| NcError::Dimension("empty tuple".into()))?;
        for m in &mats {
            if m.nrows() != n || m.ncols() != n {
                return Err(NcError::Dimension("matrices must be square of equal size".into()));
            }
            let dev = (m - m.adjoint()).norm();
            if dev > 1e-12 * (1.0 + m.norm()) {
                return Err(NcError::Numerical(format!(
                    "matrix is not Hermitian (deviation {dev:.3e})"
                )));
            }
        }
        Ok(HermTuple { n, mats })
    }

    /// Zero tuple.
    pub fn zeros(n: usize, d: usize) -> Self {
        HermTuple { n, mats: (0..d).map(|_| DMatrix::zeros(n, n)).collect() }
    }

    /// GUE-normalized random tuple: entry variance `1/N`, so that spectra
    /// concentrate on `[-2, 2]` and `tr_N(X^2) ~ 1`.
    pub fn gue(n: usize, d: usize, rng: &mut impl Rng) -> Self {
        let mats = (0..d).map(|_| gue_matrix(n, rng, 1.0)).collect();
        HermTuple { n, mats }
    }

    /// Standard Gaussian tuple with respect to the unnormalized trace inner
    /// product `sum_j Tr(A_j B_j)`; used as MALA noise and Brownian steps.
    pub fn gaussian_tr(n: usize, d: usize, rng: &mut impl Rng) -> Self {
        let mats = (0..d).map(|_| gaussian_tr_matrix(n, rng)).collect();
        HermTuple { n, mats }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.mats.len()
    }

    pub fn mats(&self) -> &[DMatrix<Complex64>] {
        &self.mats
    }

    pub fn mat(&self, j: usize) -> &DMatrix<Complex64> {
        &self.mats[j]
    }

    pub fn mats_mut(&mut self) -> &mut [DMatrix<Complex64>] {
        &mut self.mats
    }

    pub fn map(&self, f: impl Fn(&DMatrix<Complex64>) -> DMatrix<Complex64>) -> Self {
        HermTuple { n: self.n, mats: self.mats.iter().map(f).collect() }
    }

    pub fn axpy(&self, a: f64, other: &Self) -> Self {
        HermTuple {
            n: self.n,
            mats: self
                .mats
                .iter()
                .zip(&other.mats)
                .map(|(x, y)| x + y.scale(a))
                .collect(),
        }
    }

    pub fn scale(&self, a: f64) -> Self {
        self.map(|m| m.scale(a))
    }

    /// `sum_j tr_N(X_j Y_j)` (real part; exact for Hermitian inputs).
    pub fn inner_trn(&self, other: &Self) -> f64 {
        let n = self.n as f64;
        self.mats
            .iter()
            .zip(&other.mats)
            .map(|(x, y)| trace_product(x, y).re / n)
            .sum()
    }

    /// `sum_j Tr(X_j Y_j)` — the unnormalized (coordinate) inner product.
    pub fn inner_tr(&self, other: &Self) -> f64 {
        self.inner_trn(other) * self.n as f64
    }

    pub fn norm2_trn(&self) -> f64 {
        self.inner_trn(self).max(0.0).sqrt()
    }

    /// Largest operator norm across the tuple (via eigenvalues).
    pub fn op_norm(&self) -> f64 {
        self.mats
            .iter()
            .map(|m| {
                nalgebra::SymmetricEigen::new(m.clone())
                    .eigenvalues
                    .iter()
                    .fold(0.0_f64, |a, &l| a.max(l.abs()))
            })
            .fold(0.0, f64::max)
    }

    /// Per-variable spectral range `(min eigenvalue, max eigenvalue)`.
    pub fn spectral_ranges(&self) -> Vec<(f64, f64)> {
        self.mats
            .iter()
            .map(|m| {
                let ev = nalgebra::SymmetricEigen::new(m.clone()).eigenvalues;
                let lo = ev.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = ev.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                (lo, hi)
            })
            .collect()
    }

    /// Eigenvalue clipping to `[-r, r]`, applied per matrix. Used to build
    /// bounded test fields in place of bump-function truncation.
    pub fn spectral_clamp(&self, r: f64) -> Self {
        self.map(|m| {
            let eig = nalgebra::SymmetricEigen::new(m.clone());
            let clipped = eig.eigenvalues.map(|l| l.clamp(-r, r));
            let mut diag = DMatrix::<Complex64>::zeros(self.n, self.n);
            for i in 0..self.n {
                diag[(i, i)] = Complex64::new(clipped[i], 0.0);
            }
            &eig.eigenvectors * diag * eig.eigenvectors.adjoint()
        })
    }

    /// Re-symmetrizes after floating-point drift.
    pub fn hermitize(&mut self) {
        for m in &mut self.mats {
            let h = (&*m + m.adjoint()).scale(0.5);
            *m = h;
        }
    }

    /// Binary serialization: little-endian `u64` header `(N, d)` followed by
    /// row-major complex128 blocks per matrix.
    pub fn write_to(&self, w: &mut impl Write) -> Result<()> {
        w.write_all(&(self.n as u64).to_le_bytes())?;
        w.write_all(&(self.d() as u64).to_le_bytes())?;
        for m in &self.mats {
            for i in 0..self.n {
                for j in 0..self.n {
                    let z = m[(i, j)];
                    w.write_all(&z.re.to_le_bytes())?;
                    w.write_all(&z.im.to_le_bytes())?;
                }
            }
        }
        Ok(())
    }

    pub fn read_from(r: &mut impl Read) -> Result<Self> {
        let mut b8 = [0u8; 8];
        r.read_exact(&mut b8)?;
        let n = u64::from_le_bytes(b8) as usize;
        r.read_exact(&mut b8)?;
        let d = u64::from_le_bytes(b8) as usize;
        let mut mats = Vec::with_capacity(d);
        for _ in 0..d {
            let mut m = DMatrix::<Complex64>::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    r.read_exact(&mut b8)?;
                    let re = f64::from_le_bytes(b8);
                    r.read_exact(&mut b8)?;
                    let im = f64::from_le_bytes(b8);
                    m[(i, j)] = Complex64::new(re, im);
                }
            }
            mats.push(m);
        }
        HermTuple::new(mats)
    }
}

/// Hermitian matrix with independent Gaussian entries of variance `scale/N`
/// (diagonal) and `scale/2N` per real part (off-diagonal).
pub fn gue_matrix(n: usize, rng: &mut impl Rng, scale: f64) -> DMatrix<Complex64> {
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    let sd_diag = (scale / n as f64).sqrt();
    let sd_off = (scale / (2.0 * n as f64)).sqrt();
    for i in 0..n {
        m[(i, i)] = Complex64::new(sd_diag * normal(rng), 0.0);
        for j in (i + 1)..n {
            let z = Complex64::new(sd_off * normal(rng), sd_off * normal(rng));
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

/// Standard Gaussian with respect to `Tr(A B)`: diagonal variance 1,
/// off-diagonal real/imaginary variance 1/2.
pub fn gaussian_tr_matrix(n: usize, rng: &mut impl Rng) -> DMatrix<Complex64> {
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..n {
        m[(i, i)] = Complex64::new(normal(rng), 0.0);
        for j in (i + 1)..n {
            let z = Complex64::new(s * normal(rng), s * normal(rng));
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

fn normal(rng: &mut impl Rng) -> f64 {
    // Box-Muller; two uniforms per call keeps the stream layout simple and
    // reproducible across platforms.
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// `Tr(X Y)` without forming the product.
pub fn trace_product(x: &DMatrix<Complex64>, y: &DMatrix<Complex64>) -> Complex64 {
    let n = x.nrows();
    let mut acc = Complex64::default();
    for i in 0..n {
        for j in 0..n {
            acc += x[(i, j)] * y[(j, i)];
        }
    }
    acc
}

/// Complex matrix product through three real products, which route to the
/// optimized real gemm kernels; the naive complex path does not.
pub fn fast_mul(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = a.nrows();
    let k = a.ncols();
    let m = b.ncols();
    if n * k * m < 8192 {
        return a * b;
    }
    let ar = a.map(|z| z.re);
    let ai = a.map(|z| z.im);
    let br = b.map(|z| z.re);
    let bi = b.map(|z| z.im);
    let rr = &ar * &br;
    let ii = &ai * &bi;
    let mixed = (ar + ai) * (br + bi);
    DMatrix::from_fn(n, m, |i, j| {
        let re = rr[(i, j)] - ii[(i, j)];
        let im = mixed[(i, j)] - rr[(i, j)] - ii[(i, j)];
        Complex64::new(re, im)
    })
}

#[cfg(test)]
mod fastmul_tests {
    use super::*;

    #[test]
    fn fast_mul_matches_naive() {
        let mut rng = crate::randgen::rng(2);
        for n in [5usize, 33, 64] {
            let a = gue_matrix(n, &mut rng, 1.0);
            let b = gue_matrix(n, &mut rng, 1.0);
            let c1 = &a * &b;
            let c2 = fast_mul(&a, &b);
            assert!((c1 - c2).norm() < 1e-10);
        }
    }

    #[test]
    fn fast_mul_speed_probe() {
        use std::time::Instant;
        let mut rng = crate::randgen::rng(3);
        let n = 128;
        let a = gue_matrix(n, &mut rng, 1.0);
        let b = gue_matrix(n, &mut rng, 1.0);
        let t0 = Instant::now();
        for _ in 0..10 { let _ = &a * &b; }
        let naive = t0.elapsed();
        let t0 = Instant::now();
        for _ in 0..10 { let _ = fast_mul(&a, &b); }
        let fast = t0.elapsed();
        eprintln!("naive {naive:?} vs split {fast:?} at N={n}");
    }
}
