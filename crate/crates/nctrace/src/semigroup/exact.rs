use super::basis::{degree_of, DegreeBasis};
use crate::algebra::{MonomialKey, TracePolynomial, VarClass};
use crate::calculus::{laplacian, laplacian_on};
use crate::error::{NcError, Result};
use crate::gibbs::semicircle_wick;
use crate::ZERO_EPS;
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Kernel projection at the scaled quadratic base `c/2 sum tr(x_j^2)`: the
/// unique constant `e` with `f - e` in the range of the generator, equal to
/// the moment of a free semicircular tuple of variance `1/c`.
pub fn expectation_base(f: &TracePolynomial, c: f64) -> Result<Complex64> {
    Ok(psi_base(f, c)?.1)
}

/// Pseudo-inverse at the scaled quadratic base: solves
/// `-(L - c deg) g = f - e` with `E_base g = 0`, by back-substitution from
/// the top degree. Returns `(g, e)`.
pub fn psi_base(f: &TracePolynomial, c: f64) -> Result<(TracePolynomial, Complex64)> {
    f.require_scalar("pseudo-inverse")?;
    if c <= 0.0 {
        return Err(NcError::Config("base curvature must be positive".into()));
    }
    let decl = f.decl.clone();
    let mut resid = f.clone();
    let mut g = TracePolynomial::zero(decl.clone());
    loop {
        let nonconst: Vec<(MonomialKey, Complex64)> = resid
            .terms()
            .filter(|(k, _)| degree_of(k) > 0)
            .map(|(k, v)| (k.clone(), *v))
            .collect();
        if nonconst.is_empty() {
            break;
        }
        let dmax = nonconst.iter().map(|(k, _)| degree_of(k)).max().unwrap();
        let mut delta = TracePolynomial::zero(decl.clone());
        for (k, v) in nonconst.into_iter().filter(|(k, _)| degree_of(k) == dmax) {
            delta = delta.try_add(&TracePolynomial::from_terms(
                decl.clone(),
                [(k, v / (c * dmax as f64))],
            ))?;
        }
        // -(L - c deg)(delta) = c dmax delta - L delta; subtract from resid
        let l_delta = laplacian(&delta)?;
        resid = resid
            .try_sub(&delta.scale_re(c * dmax as f64))?
            .try_add(&l_delta)?;
        resid.prune(ZERO_EPS * 10.0);
        g = g.try_add(&delta)?;
    }
    let e = resid.constant_term();
    // recentre
    let e_g = base_expectation_value(&g, c)?;
    let g = g.try_sub(&TracePolynomial::constant(decl, e_g))?;
    Ok((g, e))
}

/// Moment of the base law (free semicircular tuple of variance `1/c`) on a
/// polynomial: non-crossing pairings weighted by `1/c` per pair, factorized
/// over trace factors.
fn base_expectation_value(p: &TracePolynomial, c: f64) -> Result<Complex64> {
    let mut acc = Complex64::default();
    for (key, coeff) in p.terms() {
        let mut val = *coeff;
        for f in &key.factors {
            let len = f.len();
            if len % 2 == 1 {
                val = Complex64::default();
                break;
            }
            let single = TracePolynomial::from_terms(
                p.decl.clone(),
                [(
                    MonomialKey::new(vec![f.clone()], crate::algebra::Word::one()),
                    Complex64::new(1.0, 0.0),
                )],
            );
            let w = semicircle_wick(&single)?;
            val *= w / c.powi((len / 2) as i32);
        }
        acc += val;
    }
    Ok(acc)
}

/// Pseudo-inverse in the single active variable `x_j` at curvature `c`,
/// with the other variables as spectators: solves
/// `-(L_{x_j} - c deg_j) g = f - e(x_others)` where the "constant" part `e`
/// is the polynomial in the spectator variables. Returns `(g, e)` with the
/// base conditional expectation of `g` in `x_j` removed.
pub fn psi_base_active(
    f: &TracePolynomial,
    j: usize,
    c: f64,
) -> Result<(TracePolynomial, TracePolynomial)> {
    f.require_scalar("pseudo-inverse")?;
    if c <= 0.0 {
        return Err(NcError::Config("base curvature must be positive".into()));
    }
    let decl = f.decl.clone();
    let deg_j = |k: &MonomialKey| k.count_class(|cl| matches!(cl, VarClass::X)) - degree_without(k, j);
    let mut resid = f.clone();
    let mut g = TracePolynomial::zero(decl.clone());
    loop {
        let active: Vec<(MonomialKey, Complex64)> = resid
            .terms()
            .filter(|(k, _)| deg_j(k) > 0)
            .map(|(k, v)| (k.clone(), *v))
            .collect();
        if active.is_empty() {
            break;
        }
        let dmax = active.iter().map(|(k, _)| deg_j(k)).max().unwrap();
        let mut delta = TracePolynomial::zero(decl.clone());
        for (k, v) in active.into_iter().filter(|(k, _)| deg_j(k) == dmax) {
            delta = delta.try_add(&TracePolynomial::from_terms(
                decl.clone(),
                [(k, v / (c * dmax as f64))],
            ))?;
        }
        let l_delta = laplacian_on(&delta, &[j])?;
        resid = resid
            .try_sub(&delta.scale_re(c * dmax as f64))?
            .try_add(&l_delta)?;
        resid.prune(ZERO_EPS * 10.0);
        g = g.try_add(&delta)?;
    }
    // conditional expectation of g in x_j: contract x_j pairs with weight 1/c
    let e_g = conditional_base_expectation(&g, j, c)?;
    let g = g.try_sub(&e_g)?;
    Ok((g, resid))
}

fn degree_without(k: &MonomialKey, j: usize) -> usize {
    k.count_class(|cl| matches!(cl, VarClass::X))
        - k.factors
            .iter()
            .map(|f| {
                f.word()
                    .0
                    .iter()
                    .filter(|l| matches!(l.class, VarClass::X) && l.index == j)
                    .count()
            })
            .sum::<usize>()
        - k.outer
            .0
            .iter()
            .filter(|l| matches!(l.class, VarClass::X) && l.index == j)
            .count()
}

/// Conditional expectation over `x_j` alone under the base law, leaving the
/// spectator variables in place. Supported factor shapes: no occurrence of
/// `x_j` (kept), pure powers of `x_j` (scaled Catalan), an odd number of
/// occurrences mixed with spectators (zero by centering), and exactly two
/// mixed occurrences `tr(a x_j b x_j)` (one free pair, `(1/c) tr(a) tr(b)`).
/// Deeper mixing is outside the quadratic-family machinery and rejected.
fn conditional_base_expectation(
    p: &TracePolynomial,
    j: usize,
    c: f64,
) -> Result<TracePolynomial> {
    let decl = p.decl.clone();
    let is_mine = |l: &crate::algebra::Letter| matches!(l.class, VarClass::X) && l.index == j;
    let mut out = TracePolynomial::zero(decl.clone());
    'terms: for (key, coeff) in p.terms() {
        let mut val = *coeff;
        let mut kept = Vec::new();
        for f in &key.factors {
            let total = f.len();
            let mine = f.word().0.iter().filter(|l| is_mine(l)).count();
            if mine == 0 {
                kept.push(f.clone());
            } else if mine % 2 == 1 {
                continue 'terms;
            } else if mine == total {
                let single = TracePolynomial::from_terms(
                    decl.clone(),
                    [(
                        MonomialKey::new(vec![f.clone()], crate::algebra::Word::one()),
                        Complex64::new(1.0, 0.0),
                    )],
                );
                val *= semicircle_wick(&single)? / c.powi((total / 2) as i32);
            } else if mine == 2 {
                let pos: Vec<usize> = f
                    .word()
                    .0
                    .iter()
                    .enumerate()
                    .filter_map(|(i, l)| is_mine(l).then_some(i))
                    .collect();
                let w = f.word();
                let between = crate::algebra::Word(w.0[pos[0] + 1..pos[1]].to_vec());
                let around = crate::algebra::Word(
                    w.0[pos[1] + 1..].iter().chain(&w.0[..pos[0]]).copied().collect(),
                );
                kept.push(crate::algebra::CyclicWord::new(between));
                kept.push(crate::algebra::CyclicWord::new(around));
                val /= c;
            } else {
                return Err(NcError::Grading(
                    "conditional expectation of a factor mixing the active variable \
                     more than twice with spectators is not supported symbolically"
                        .into(),
                ));
            }
        }
        out = out.try_add(&TracePolynomial::from_terms(
            decl.clone(),
            [(MonomialKey::new(kept, key.outer.clone()), val)],
        ))?;
    }
    Ok(out)
}

/// Exact heat semigroup on the degree basis: `exp(t L_base)` applied to the
/// coefficient vector of `f`.
pub fn semigroup_exact(
    f: &TracePolynomial,
    t: f64,
    basis: &DegreeBasis,
) -> Result<TracePolynomial> {
    let v = basis.project(f)?;
    let m = expm(&basis.l_matrix().scale(t));
    let mv = {
        let mut out = nalgebra::DVector::<Complex64>::zeros(v.len());
        for i in 0..v.len() {
            let mut acc = Complex64::default();
            for j in 0..v.len() {
                acc += Complex64::new(m[(i, j)], 0.0) * v[j];
            }
            out[i] = acc;
        }
        out
    };
    Ok(basis.reconstruct(&mv))
}

/// Scaling-and-squaring Taylor exponential; adequate for the block
/// triangular generator whose spectrum lies in `[-cD, 0]`.
fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let norm = a.norm();
    let s = norm.log2().ceil().max(0.0) as usize + 1;
    let b = a.scale(1.0 / (1 << s) as f64);
    let mut acc = DMatrix::<f64>::identity(n, n);
    let mut term = DMatrix::<f64>::identity(n, n);
    for k in 1..=24 {
        term = (&term * &b).scale(1.0 / k as f64);
        acc += &term;
        if term.norm() < 1e-18 {
            break;
        }
    }
    let mut out = acc;
    for _ in 0..s {
        out = &out * &out;
    }
    out
}
