use crate::algebra::{CyclicWord, Declaration, Letter, MonomialKey, TracePolynomial, Word};
use crate::calculus::laplacian;
use crate::error::{NcError, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::collections::BTreeMap;

/// Finite basis of scalar trace monomials of total degree at most `D`,
/// together with the matrix of the base generator `L - c * degree` on it.
///
/// The generator maps the span into itself (the flat Laplacian lowers degree
/// by two, the Euler drift is diagonal), block-triangular in degree with
/// diagonal `-c n` on degree-`n` monomials.
pub struct DegreeBasis {
    pub decl: Declaration,
    pub cutoff: usize,
    pub curvature: f64,
    monomials: Vec<MonomialKey>,
    index: BTreeMap<MonomialKey, usize>,
    l_matrix: DMatrix<f64>,
}

impl DegreeBasis {
    pub fn new(d: usize, cutoff: usize, curvature: f64) -> Result<Self> {
        let decl = Declaration::scalar(d);
        let monomials = scalar_monomials(d, cutoff);
        if monomials.len() > 4000 {
            return Err(NcError::Config(format!(
                "degree basis would have {} monomials; lower the cutoff",
                monomials.len()
            )));
        }
        let index: BTreeMap<MonomialKey, usize> =
            monomials.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        let m = monomials.len();
        let mut l_matrix = DMatrix::<f64>::zeros(m, m);
        for (col, key) in monomials.iter().enumerate() {
            let mono = TracePolynomial::from_terms(
                decl.clone(),
                [(key.clone(), Complex64::new(1.0, 0.0))],
            );
            let img = laplacian(&mono)?;
            for (k, c) in img.terms() {
                let row = *index
                    .get(k)
                    .ok_or_else(|| NcError::Numerical("generator left the basis".into()))?;
                l_matrix[(row, col)] += c.re;
            }
            let deg = degree_of(key);
            l_matrix[(col, col)] -= curvature * deg as f64;
        }
        Ok(DegreeBasis { decl, cutoff, curvature, monomials, index, l_matrix })
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn monomials(&self) -> &[MonomialKey] {
        &self.monomials
    }

    pub fn l_matrix(&self) -> &DMatrix<f64> {
        &self.l_matrix
    }

    /// Coefficient vector of a polynomial in this basis.
    pub fn project(&self, f: &TracePolynomial) -> Result<nalgebra::DVector<Complex64>> {
        f.require_scalar("degree basis")?;
        let mut v = nalgebra::DVector::<Complex64>::zeros(self.len());
        for (k, c) in f.terms() {
            let i = self.index.get(k).ok_or(NcError::DegreeOverflow {
                got: degree_of(k),
                cutoff: self.cutoff,
            })?;
            v[*i] = *c;
        }
        Ok(v)
    }

    pub fn reconstruct(&self, v: &nalgebra::DVector<Complex64>) -> TracePolynomial {
        TracePolynomial::from_terms(
            self.decl.clone(),
            v.iter()
                .enumerate()
                .map(|(i, c)| (self.monomials[i].clone(), *c)),
        )
    }
}

pub(crate) fn degree_of(key: &MonomialKey) -> usize {
    key.factors.iter().map(|f| f.len()).sum()
}

/// All scalar trace monomials (multisets of necklaces in the X letters) of
/// total degree at most `cutoff`.
fn scalar_monomials(d: usize, cutoff: usize) -> Vec<MonomialKey> {
    // distinct cyclic words per length
    let mut necklaces: Vec<Vec<CyclicWord>> = vec![Vec::new(); cutoff + 1];
    for len in 1..=cutoff {
        let mut seen = std::collections::BTreeSet::new();
        let mut word = vec![1usize; len];
        loop {
            let w = CyclicWord::new(Word(word.iter().map(|&j| Letter::x(j)).collect()));
            seen.insert(w);
            // advance odometer
            let mut pos = len;
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                if word[pos] < d {
                    word[pos] += 1;
                    for w in word.iter_mut().skip(pos + 1) {
                        *w = 1;
                    }
                    break;
                }
            }
            if pos == 0 && word[0] == 1 {
                break;
            }
        }
        necklaces[len] = seen.into_iter().collect();
    }
    // multisets with total degree <= cutoff, nondecreasing pick to avoid dups
    let mut out = vec![MonomialKey::unit()];
    let flat: Vec<CyclicWord> = necklaces.into_iter().flatten().collect();
    fn rec(
        flat: &[CyclicWord],
        start: usize,
        budget: usize,
        acc: &mut Vec<CyclicWord>,
        out: &mut Vec<MonomialKey>,
    ) {
        for i in start..flat.len() {
            let len = flat[i].len();
            if len > budget {
                continue;
            }
            acc.push(flat[i].clone());
            out.push(MonomialKey::new(acc.clone(), Word::one()));
            rec(flat, i, budget - len, acc, out);
            acc.pop();
        }
    }
    let mut acc = Vec::new();
    rec(&flat, 0, cutoff, &mut acc, &mut out);
    out.sort_by_key(|k| (degree_of(k), format!("{k:?}")));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_counts_match_partitions_for_one_variable() {
        // degree <= 8, d = 1: multisets of powers = partitions; cumulative
        // p(0..8) = 1+1+2+3+5+7+11+15+22 = 67
        let m = scalar_monomials(1, 8);
        assert_eq!(m.len(), 67);
    }

    #[test]
    fn generator_matrix_is_degree_triangular_with_euler_diagonal() {
        let b = DegreeBasis::new(1, 6, 1.0).unwrap();
        for (i, k) in b.monomials().iter().enumerate() {
            let n = degree_of(k);
            assert!((b.l_matrix()[(i, i)] + n as f64).abs() < 1e-12);
            for (j, kj) in b.monomials().iter().enumerate() {
                if b.l_matrix()[(i, j)].abs() > 1e-14 && i != j {
                    assert!(
                        degree_of(kj) == degree_of(k) + 2,
                        "off-diagonal entry outside the degree structure"
                    );
                }
            }
        }
    }
}
