use super::decl::{Declaration, Letter, VarClass};
use super::word::{CyclicWord, Word};
use crate::error::{NcError, Result};
use crate::ZERO_EPS;
use num_complex::Complex64;
use std::collections::BTreeMap;

/// Canonical key of a monomial: the sorted multiset of trace factors plus the
/// outer word. Empty trace factors `tr(1) = 1` are never stored.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MonomialKey {
    pub factors: Vec<CyclicWord>,
    pub outer: Word,
}

impl MonomialKey {
    pub fn new(mut factors: Vec<CyclicWord>, outer: Word) -> Self {
        factors.retain(|f| !f.is_empty());
        factors.sort();
        MonomialKey { factors, outer }
    }

    pub fn unit() -> Self {
        MonomialKey { factors: Vec::new(), outer: Word::one() }
    }

    pub fn is_scalar(&self) -> bool {
        self.outer.is_empty()
    }

    /// Total count of letters matching `pred` across trace factors and the
    /// outer word.
    pub fn count_class(&self, pred: impl Fn(&VarClass) -> bool + Copy) -> usize {
        self.factors.iter().map(|f| f.word().count_class(pred)).sum::<usize>()
            + self.outer.count_class(pred)
    }
}

/// A trace polynomial in canonical form: a map from monomial keys to nonzero
/// complex coefficients, together with the variable declaration.
#[derive(Clone, Debug, PartialEq)]
pub struct TracePolynomial {
    pub decl: Declaration,
    terms: BTreeMap<MonomialKey, Complex64>,
}

impl TracePolynomial {
    pub fn zero(decl: Declaration) -> Self {
        TracePolynomial { decl, terms: BTreeMap::new() }
    }

    pub fn constant(decl: Declaration, c: Complex64) -> Self {
        let mut p = Self::zero(decl);
        p.accumulate(MonomialKey::unit(), c);
        p.prune(ZERO_EPS);
        p
    }

    pub fn one(decl: Declaration) -> Self {
        Self::constant(decl, Complex64::new(1.0, 0.0))
    }

    /// Single letter as a polynomial (outer word of length one).
    pub fn letter(decl: Declaration, letter: Letter) -> Result<Self> {
        decl.check(&letter)?;
        let mut p = Self::zero(decl);
        p.accumulate(
            MonomialKey::new(Vec::new(), Word::single(letter)),
            Complex64::new(1.0, 0.0),
        );
        Ok(p)
    }

    /// The j-th primary variable.
    pub fn var_x(decl: &Declaration, j: usize) -> Result<Self> {
        Self::letter(decl.clone(), Letter::x(j))
    }

    /// `tr(w)` for a word `w`.
    pub fn trace_of(decl: Declaration, word: Word) -> Result<Self> {
        for l in &word.0 {
            decl.check(l)?;
        }
        let mut p = Self::zero(decl);
        p.accumulate(
            MonomialKey::new(vec![CyclicWord::new(word)], Word::one()),
            Complex64::new(1.0, 0.0),
        );
        Ok(p)
    }

    pub fn from_terms(
        decl: Declaration,
        terms: impl IntoIterator<Item = (MonomialKey, Complex64)>,
    ) -> Self {
        let mut p = Self::zero(decl);
        for (k, c) in terms {
            p.accumulate(k, c);
        }
        p.prune(ZERO_EPS);
        p
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MonomialKey, &Complex64)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, key: &MonomialKey) -> Complex64 {
        self.terms.get(key).copied().unwrap_or_default()
    }

    /// Coefficient of the constant monomial.
    pub fn constant_term(&self) -> Complex64 {
        self.coefficient(&MonomialKey::unit())
    }

    pub(crate) fn accumulate(&mut self, key: MonomialKey, c: Complex64) {
        let e = self.terms.entry(key).or_insert_with(Complex64::default);
        *e += c;
    }

    /// Drops coefficients with magnitude at most `eps`.
    pub fn prune(&mut self, eps: f64) {
        self.terms.retain(|_, c| c.norm() > eps);
    }

    /// Every monomial has an empty outer word.
    pub fn is_scalar_valued(&self) -> bool {
        self.terms.keys().all(MonomialKey::is_scalar)
    }

    /// Total degree in the primary X letters, maximized over monomials.
    pub fn degree(&self) -> usize {
        self.terms
            .keys()
            .map(|k| k.count_class(|c| matches!(c, VarClass::X)))
            .max()
            .unwrap_or(0)
    }

    /// Total degree counting X and XPrime letters.
    pub fn degree_all_x(&self) -> usize {
        self.terms
            .keys()
            .map(|k| k.count_class(|c| matches!(c, VarClass::X | VarClass::XPrime)))
            .max()
            .unwrap_or(0)
    }

    /// True iff every monomial contains exactly one Y-letter of slot `slot`.
    pub fn is_linear_in_slot(&self, slot: usize) -> bool {
        self.terms
            .keys()
            .all(|k| k.count_class(|c| matches!(c, VarClass::Y(s) if *s == slot)) == 1)
    }

    /// True iff no monomial mentions slot `slot`.
    pub fn is_free_of_slot(&self, slot: usize) -> bool {
        self.terms
            .keys()
            .all(|k| k.count_class(|c| matches!(c, VarClass::Y(s) if *s == slot)) == 0)
    }

    /// True iff no monomial mentions the exact letter.
    pub fn is_free_of_letter(&self, letter: &Letter) -> bool {
        self.terms.keys().all(|k| {
            k.factors.iter().all(|f| f.word().positions_of(letter).is_empty())
                && k.outer.positions_of(letter).is_empty()
        })
    }

    pub fn require_scalar(&self, what: &str) -> Result<()> {
        if self.is_scalar_valued() {
            Ok(())
        } else {
            Err(NcError::NotScalar(what.to_string()))
        }
    }

    /// Max absolute difference of coefficients against `other` (union of keys).
    pub fn max_coeff_distance(&self, other: &Self) -> f64 {
        let mut worst = 0.0_f64;
        for (k, c) in &self.terms {
            worst = worst.max((c - other.coefficient(k)).norm());
        }
        for (k, c) in &other.terms {
            if !self.terms.contains_key(k) {
                worst = worst.max(c.norm());
            }
        }
        worst
    }

    /// Euclidean norm of the coefficient vector.
    pub fn coeff_norm(&self) -> f64 {
        self.terms.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Canonical-form equality up to coefficient tolerance `tol`.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.decl == other.decl && self.max_coeff_distance(other) <= tol
    }

    /// Keeps only monomials selected by the predicate.
    pub fn filter_terms(&self, pred: impl Fn(&MonomialKey) -> bool) -> Self {
        TracePolynomial {
            decl: self.decl.clone(),
            terms: self.terms.iter().filter(|(k, _)| pred(k)).map(|(k, c)| (k.clone(), *c)).collect(),
        }
    }

    /// Re-declares the polynomial in `decl`, which must contain every letter
    /// already present.
    pub fn with_declaration(&self, decl: Declaration) -> Result<Self> {
        for k in self.terms.keys() {
            for f in &k.factors {
                for l in &f.word().0 {
                    decl.check(l)?;
                }
            }
            for l in &k.outer.0 {
                decl.check(l)?;
            }
        }
        Ok(TracePolynomial { decl, terms: self.terms.clone() })
    }
}
