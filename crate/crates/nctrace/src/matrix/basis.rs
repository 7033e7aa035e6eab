use nalgebra::DMatrix;
use num_complex::Complex64;

/// Orthonormal basis of the real vector space of `n x n` Hermitian matrices
/// with respect to `<A, B> = tr_N(A B)`:
/// `sqrt(N) E_jj`, `sqrt(N/2)(E_jk + E_kj)`, `sqrt(N/2)(i E_jk - i E_kj)`.
pub fn hermitian_basis(n: usize) -> Vec<DMatrix<Complex64>> {
    let mut out = Vec::with_capacity(n * n);
    let sn = (n as f64).sqrt();
    let sh = (n as f64 / 2.0).sqrt();
    for j in 0..n {
        let mut m = DMatrix::<Complex64>::zeros(n, n);
        m[(j, j)] = Complex64::new(sn, 0.0);
        out.push(m);
    }
    for j in 0..n {
        for k in (j + 1)..n {
            let mut m = DMatrix::<Complex64>::zeros(n, n);
            m[(j, k)] = Complex64::new(sh, 0.0);
            m[(k, j)] = Complex64::new(sh, 0.0);
            out.push(m);
            let mut m = DMatrix::<Complex64>::zeros(n, n);
            m[(j, k)] = Complex64::new(0.0, sh);
            m[(k, j)] = Complex64::new(0.0, -sh);
            out.push(m);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_is_orthonormal() {
        let n = 4;
        let b = hermitian_basis(n);
        assert_eq!(b.len(), n * n);
        for (i, a) in b.iter().enumerate() {
            for (j, c) in b.iter().enumerate() {
                let ip = (a * c).trace().re / n as f64;
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((ip - target).abs() < 1e-12, "({i},{j}) -> {ip}");
            }
        }
    }
}
