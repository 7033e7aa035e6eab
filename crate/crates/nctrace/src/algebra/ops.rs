use super::decl::Letter;
use super::poly::{MonomialKey, TracePolynomial};
use super::word::{CyclicWord, Word};
use crate::error::Result;
use crate::ZERO_EPS;
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

/// Letter-to-polynomial substitution map.
pub type Bindings = BTreeMap<Letter, TracePolynomial>;

impl TracePolynomial {
    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.decl.require_same(&other.decl)?;
        let mut out = self.clone();
        for (k, c) in other.terms() {
            out.accumulate(k.clone(), *c);
        }
        out.prune(ZERO_EPS);
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = Self::zero(self.decl.clone());
        for (k, v) in self.terms() {
            out.accumulate(k.clone(), v * c);
        }
        out.prune(ZERO_EPS);
        out
    }

    pub fn scale_re(&self, c: f64) -> Self {
        self.scale(Complex64::new(c, 0.0))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.decl.require_same(&other.decl)?;
        let mut out = Self::zero(self.decl.clone());
        for (ka, ca) in self.terms() {
            for (kb, cb) in other.terms() {
                let mut factors = ka.factors.clone();
                factors.extend(kb.factors.iter().cloned());
                let outer = ka.outer.concat(&kb.outer);
                out.accumulate(MonomialKey::new(factors, outer), ca * cb);
            }
        }
        out.prune(ZERO_EPS);
        Ok(out)
    }

    /// The *-operation: coefficients conjugated, every word reversed.
    pub fn star(&self) -> Self {
        let mut out = Self::zero(self.decl.clone());
        for (k, c) in self.terms() {
            let factors =
                k.factors.iter().map(|f| CyclicWord::new(f.word().reversed())).collect();
            let outer = k.outer.reversed();
            out.accumulate(MonomialKey::new(factors, outer), c.conj());
        }
        out.prune(ZERO_EPS);
        out
    }

    pub fn is_self_adjoint(&self, tol: f64) -> bool {
        self.approx_eq(&self.star(), tol)
    }

    /// Full distributive substitution of letters by polynomials.
    ///
    /// Bound letters are replaced everywhere they occur, inside trace factors
    /// and in the outer word; scalar trace factors of the replacement float
    /// out of the enclosing trace. The result is re-declared in `decl`.
    pub fn substitute(
        &self,
        bindings: &Bindings,
        decl: &super::decl::Declaration,
    ) -> Result<Self> {
        for target in bindings.values() {
            target.decl.require_same(decl)?;
        }
        let mut out = Self::zero(decl.clone());
        for (k, c) in self.terms() {
            // Expand each trace factor and the outer word independently,
            // then take the cartesian product of the alternatives.
            let mut partials: Vec<(Complex64, Vec<CyclicWord>)> = vec![(*c, Vec::new())];
            for f in &k.factors {
                let alts = expand_word(f.word(), bindings, decl)?;
                let mut next = Vec::with_capacity(partials.len() * alts.len());
                for (pc, pf) in &partials {
                    for (ac, af, aw) in &alts {
                        let mut nf = pf.clone();
                        nf.extend(af.iter().cloned());
                        nf.push(CyclicWord::new(aw.clone()));
                        next.push((pc * ac, nf));
                    }
                }
                partials = next;
            }
            let outer_alts = expand_word(&k.outer, bindings, decl)?;
            for (pc, pf) in &partials {
                for (ac, af, aw) in &outer_alts {
                    let mut nf = pf.clone();
                    nf.extend(af.iter().cloned());
                    out.accumulate(MonomialKey::new(nf, aw.clone()), pc * ac);
                }
            }
        }
        out.prune(ZERO_EPS);
        Ok(out)
    }
}

/// Expands a single word under the bindings. Each alternative is a
/// coefficient, a multiset of scalar trace factors contributed by the
/// replacement terms, and the rebuilt word.
fn expand_word(
    word: &Word,
    bindings: &Bindings,
    decl: &super::decl::Declaration,
) -> Result<Vec<(Complex64, Vec<CyclicWord>, Word)>> {
    let mut alts: Vec<(Complex64, Vec<CyclicWord>, Word)> =
        vec![(Complex64::new(1.0, 0.0), Vec::new(), Word::one())];
    for letter in &word.0 {
        match bindings.get(letter) {
            None => {
                decl.check(letter)?;
                for a in &mut alts {
                    a.2 .0.push(*letter);
                }
            }
            Some(target) => {
                let mut next = Vec::with_capacity(alts.len() * target.num_terms().max(1));
                for (c, f, w) in &alts {
                    for (tk, tc) in target.terms() {
                        let mut nf = f.clone();
                        nf.extend(tk.factors.iter().cloned());
                        let nw = w.concat(&tk.outer);
                        next.push((c * tc, nf, nw));
                    }
                }
                alts = next;
            }
        }
    }
    Ok(alts)
}

impl Add for &TracePolynomial {
    type Output = TracePolynomial;
    fn add(self, rhs: &TracePolynomial) -> TracePolynomial {
        self.try_add(rhs).expect("declaration mismatch in +")
    }
}

impl Sub for &TracePolynomial {
    type Output = TracePolynomial;
    fn sub(self, rhs: &TracePolynomial) -> TracePolynomial {
        self.try_sub(rhs).expect("declaration mismatch in -")
    }
}

impl Mul for &TracePolynomial {
    type Output = TracePolynomial;
    fn mul(self, rhs: &TracePolynomial) -> TracePolynomial {
        self.try_mul(rhs).expect("declaration mismatch in *")
    }
}

impl Neg for &TracePolynomial {
    type Output = TracePolynomial;
    fn neg(self) -> TracePolynomial {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}
