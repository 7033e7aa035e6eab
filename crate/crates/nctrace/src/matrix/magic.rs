use super::basis::hermitian_basis;
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Residual norms of the three exact basis-summation identities at finite N.
#[derive(Clone, Copy, Debug)]
pub struct MagicResiduals {
    /// `(1/N^2) sum_E A E_i B E_j C  -  delta_{i=j} A tr_N(B) C`
    pub sandwich: f64,
    /// `(1/N^2) sum_E tr_N(A E_i) tr_N(B E_j C)  -  (1/N^2) delta_{i=j} tr_N(B A C)`
    pub double_trace: f64,
    /// `(1/N^2) sum_E tr_N(A E_i) B E_j C  -  (1/N^2) delta_{i=j} B A C`
    pub mixed: f64,
}

impl MagicResiduals {
    pub fn max(&self) -> f64 {
        self.sandwich.max(self.double_trace).max(self.mixed)
    }
}

/// Checks the exact finite-N contraction identities for a `d`-tuple basis.
///
/// The basis of the tuple space consists of single-component embeddings of
/// the Hermitian basis; summing over it reduces to a sum over the matrix
/// basis when the component indices agree and vanishes otherwise.
pub fn magic_formula_check(
    a: &DMatrix<Complex64>,
    b: &DMatrix<Complex64>,
    c: &DMatrix<Complex64>,
    i: usize,
    j: usize,
) -> MagicResiduals {
    let n = a.nrows();
    let nn = (n * n) as f64;
    let trn = |m: &DMatrix<Complex64>| m.trace() / n as f64;

    let mut sum1 = DMatrix::<Complex64>::zeros(n, n);
    let mut sum2 = Complex64::default();
    let mut sum3 = DMatrix::<Complex64>::zeros(n, n);
    if i == j {
        // same component: every basis element contributes with E_i = E_j = E
        for e in hermitian_basis(n) {
            let ae = a * &e;
            sum1 += &ae * b * &e * c;
            sum2 += trn(&ae) * trn(&(b * &e * c));
            sum3 += (b * &e * c).map(|z| z * trn(&ae));
        }
    }
    // i != j: the tuple basis has a zero in one of the two components for
    // every element, so all three sums vanish identically and the sums above
    // (initialized to zero) are already correct.

    let t1 = if i == j {
        a.map(|z| z * trn(b)) * c
    } else {
        DMatrix::zeros(n, n)
    };
    let t2 = if i == j { trn(&(b * a * c)) } else { Complex64::default() };
    let t3 = if i == j { b * a * c } else { DMatrix::zeros(n, n) };

    MagicResiduals {
        sandwich: (sum1.map(|z| z / nn) - t1).norm(),
        double_trace: (sum2 / nn - t2 / nn).norm(),
        mixed: (sum3.map(|z| z / nn) - t3.map(|z| z / nn)).norm(),
    }
}
