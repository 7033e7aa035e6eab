//! Combinatorial moment oracles, independent of the sampler and of the
//! symbolic semigroup backend.

use crate::algebra::{Letter, MonomialKey, TracePolynomial, VarClass};
use crate::error::{NcError, Result};

/// Catalan numbers by the recursion `C_{n+1} = sum_j C_j C_{n-j}`.
pub fn catalan(n: usize) -> f64 {
    let mut c = vec![0.0_f64; n + 1];
    c[0] = 1.0;
    for m in 1..=n {
        let mut acc = 0.0;
        for j in 0..m {
            acc += c[j] * c[m - 1 - j];
        }
        c[m] = acc;
    }
    c[n]
}

/// Moment of a standard free semicircular tuple on a scalar trace monomial,
/// by enumeration of non-crossing pair partitions that match variable
/// indices. Products of trace factors factorize by freeness.
pub fn semicircle_wick(p: &TracePolynomial) -> Result<f64> {
    p.require_scalar("wick oracle")?;
    let mut acc = 0.0;
    for (key, coeff) in p.terms() {
        let mut val = coeff.re;
        if coeff.im.abs() > 1e-12 {
            return Err(NcError::Numerical("wick oracle expects real coefficients".into()));
        }
        for f in &key.factors {
            let letters: Vec<usize> = f
                .word()
                .0
                .iter()
                .map(|l| match l.class {
                    VarClass::X => Ok(l.index),
                    _ => Err(NcError::Grading("wick oracle expects X letters only".into())),
                })
                .collect::<Result<Vec<_>>>()?;
            val *= non_crossing_pairings(&letters) as f64;
        }
        acc += val;
    }
    Ok(acc)
}

/// Counts non-crossing pairings of a letter-index sequence where paired
/// positions must carry the same index.
fn non_crossing_pairings(letters: &[usize]) -> u64 {
    if letters.is_empty() {
        return 1;
    }
    if letters.len() % 2 == 1 {
        return 0;
    }
    let mut acc = 0;
    // pair position 0 with an odd position carrying the same index; the
    // partition splits into two independent non-crossing segments
    for j in (1..letters.len()).step_by(2) {
        if letters[j] == letters[0] {
            acc += non_crossing_pairings(&letters[1..j])
                * non_crossing_pairings(&letters[j + 1..]);
        }
    }
    acc
}

/// Convenience: the Wick value of a single cyclic word given by indices.
pub fn wick_of_word(indices: &[usize]) -> u64 {
    non_crossing_pairings(indices)
}

/// Taylor coefficients in `g` of the moments of the quartic ensemble
/// `V = tr(x^2)/2 + g tr(x^4)`, from the loop-equation recursion
/// `m_{k+1} + 4 g m_{k+3} = sum_{i=0}^{k-1} m_i m_{k-1-i}`.
///
/// Returns `series[k][p]` = coefficient of `g^p` in the `k`-th moment, for
/// `k <= max_moment` and `p <= order`.
pub fn quartic_moment_series(max_moment: usize, order: usize) -> Result<Vec<Vec<f64>>> {
    if max_moment > 40 || order > 12 {
        return Err(NcError::Config("quartic oracle order too large".into()));
    }
    // internally carry extra moments so the requested ones close
    let kmax = max_moment + 2 * order + 4;
    let mut m = vec![vec![0.0_f64; order + 1]; kmax + 4];
    m[0][0] = 1.0;
    for p in 0..=order {
        for k in (1..=kmax + 1).step_by(2) {
            if k + 3 >= m.len() {
                continue;
            }
            let mut rhs = 0.0;
            for i in 0..k {
                for a in 0..=p {
                    rhs += m[i][a] * m[k - 1 - i][p - a];
                }
            }
            let prev = if p >= 1 { 4.0 * m[k + 3][p - 1] } else { 0.0 };
            m[k + 1][p] = rhs - prev;
        }
    }
    m.truncate(max_moment + 1);
    Ok(m)
}

/// The second-moment series `1 - 8 g + 144 g^2 - ...` to the given order.
pub fn quartic_m2_series(order: usize) -> Result<Vec<f64>> {
    Ok(quartic_moment_series(2, order)?[2].clone())
}

/// Diagonal Pade [1/1] evaluation of a series `c0 + c1 g + c2 g^2` at `g`.
///
/// For couplings beyond the series' radius of convergence this is the
/// faithful evaluation of the order-2 perturbative data; the raw partial sum
/// is not.
pub fn pade11(c: &[f64], g: f64) -> Result<f64> {
    if c.len() < 3 {
        return Err(NcError::Config("pade [1/1] needs three coefficients".into()));
    }
    if c[1].abs() < 1e-300 {
        return Ok(c[0] + c[2] * g * g);
    }
    let b1 = -c[2] / c[1];
    let a0 = c[0];
    let a1 = c[1] + c[0] * b1;
    let den = 1.0 + b1 * g;
    if den.abs() < 1e-12 {
        return Err(NcError::Numerical("pade pole at evaluation point".into()));
    }
    Ok((a0 + a1 * g) / den)
}

/// Builds the scalar monomial `tr(x_j^k)` used when reporting moments.
pub fn power_moment(decl: &crate::algebra::Declaration, j: usize, k: usize) -> TracePolynomial {
    let w = crate::algebra::Word(vec![Letter::x(j); k]);
    TracePolynomial::from_terms(
        decl.clone(),
        [(
            MonomialKey::new(vec![crate::algebra::CyclicWord::new(w)], crate::algebra::Word::one()),
            num_complex::Complex64::new(1.0, 0.0),
        )],
    )
}
