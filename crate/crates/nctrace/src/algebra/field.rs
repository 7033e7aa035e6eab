use super::decl::{Declaration, Letter};
use super::ops::Bindings;
use super::poly::{MonomialKey, TracePolynomial};
use super::word::{CyclicWord, Word};
use crate::error::{NcError, Result};
use num_complex::Complex64;

impl TracePolynomial {
    /// Moves the outer word into a trace factor: `sigma * w  ->  sigma * tr(w)`.
    pub fn close_trace(&self) -> TracePolynomial {
        let mut out = TracePolynomial::zero(self.decl.clone());
        for (k, c) in self.terms() {
            let mut factors = k.factors.clone();
            if !k.outer.is_empty() {
                factors.push(CyclicWord::new(k.outer.clone()));
            }
            out.accumulate(MonomialKey::new(factors, Word::one()), *c);
        }
        out.prune(crate::ZERO_EPS);
        out
    }

    /// Binds the letters of Y-slot `slot` to the given component polynomials.
    pub fn bind_slot(
        &self,
        slot: usize,
        targets: &[TracePolynomial],
        decl: &Declaration,
    ) -> Result<TracePolynomial> {
        let dim = self
            .decl
            .y_dim(slot)
            .ok_or_else(|| NcError::Dimension(format!("slot y{slot} not declared")))?;
        if targets.len() != dim {
            return Err(NcError::Dimension(format!(
                "slot y{slot} has dimension {dim} but {} targets were supplied",
                targets.len()
            )));
        }
        let mut bindings = Bindings::new();
        for (i, t) in targets.iter().enumerate() {
            bindings.insert(Letter::y(slot, i + 1), t.clone());
        }
        self.substitute(&bindings, decl)
    }
}

/// A `d'`-tuple of trace polynomials, optionally multilinear in one
/// designated Y-slot. With `slot == None` this is a plain vector field.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorField {
    components: Vec<TracePolynomial>,
    slot: Option<usize>,
}

impl OperatorField {
    pub fn new(components: Vec<TracePolynomial>, slot: Option<usize>) -> Result<Self> {
        let decl = components
            .first()
            .map(|c| c.decl.clone())
            .ok_or_else(|| NcError::Dimension("field needs at least one component".into()))?;
        for c in &components {
            c.decl.require_same(&decl)?;
        }
        if let Some(s) = slot {
            if decl.y_dim(s).is_none() {
                return Err(NcError::Dimension(format!("slot y{s} not declared")));
            }
            for (i, c) in components.iter().enumerate() {
                if !c.is_zero() && !c.is_linear_in_slot(s) {
                    return Err(NcError::Grading(format!(
                        "component {} is not linear in slot y{s}",
                        i + 1
                    )));
                }
            }
        }
        Ok(OperatorField { components, slot })
    }

    /// Plain vector field (no multilinear slot).
    pub fn vector(components: Vec<TracePolynomial>) -> Result<Self> {
        Self::new(components, None)
    }

    /// The identity map `Id(x)[y] = y` on slot `slot`.
    pub fn identity(decl: &Declaration, slot: usize) -> Result<Self> {
        let dim = decl
            .y_dim(slot)
            .ok_or_else(|| NcError::Dimension(format!("slot y{slot} not declared")))?;
        let comps = (1..=dim)
            .map(|i| TracePolynomial::letter(decl.clone(), Letter::y(slot, i)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(comps, Some(slot))
    }

    /// The identity vector field `id(x) = x`.
    pub fn identity_vector(decl: &Declaration) -> Result<Self> {
        let comps = (1..=decl.dim_x)
            .map(|j| TracePolynomial::var_x(decl, j))
            .collect::<Result<Vec<_>>>()?;
        Self::vector(comps)
    }

    pub fn zero_like(&self) -> Self {
        OperatorField {
            components: self
                .components
                .iter()
                .map(|c| TracePolynomial::zero(c.decl.clone()))
                .collect(),
            slot: self.slot,
        }
    }

    pub fn components(&self) -> &[TracePolynomial] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &TracePolynomial {
        &self.components[i]
    }

    pub fn into_components(self) -> Vec<TracePolynomial> {
        self.components
    }

    pub fn slot(&self) -> Option<usize> {
        self.slot
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn decl(&self) -> &Declaration {
        &self.components[0].decl
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() || self.slot != other.slot {
            return Err(NcError::Dimension("field shapes differ in +".into()));
        }
        let comps = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.try_add(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(OperatorField { components: comps, slot: self.slot })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        OperatorField {
            components: self.components.iter().map(|p| p.scale(c)).collect(),
            slot: self.slot,
        }
    }

    pub fn scale_re(&self, c: f64) -> Self {
        self.scale(Complex64::new(c, 0.0))
    }

    /// `#`-composition: substitutes this field's slot letters with `other`'s
    /// components. The result carries `other`'s slot (if any).
    pub fn compose(&self, other: &Self) -> Result<Self> {
        let slot = self
            .slot
            .ok_or_else(|| NcError::Grading("left factor of # has no slot".into()))?;
        let decl = &other.components[0].decl;
        let comps = self
            .components
            .iter()
            .map(|c| c.bind_slot(slot, &other.components, decl))
            .collect::<Result<Vec<_>>>()?;
        OperatorField::new(comps, other.slot)
    }

    /// Pointwise trace pairing `sum_j tr(a_j b_j)` of two plain fields.
    pub fn pair_trace(&self, other: &Self) -> Result<TracePolynomial> {
        if self.len() != other.len() {
            return Err(NcError::Dimension("field lengths differ in pairing".into()));
        }
        let mut acc = TracePolynomial::zero(self.components[0].decl.clone());
        for (a, b) in self.components.iter().zip(&other.components) {
            acc = acc.try_add(&a.try_mul(b)?.close_trace())?;
        }
        Ok(acc)
    }

    pub fn star_components(&self) -> Self {
        OperatorField {
            components: self.components.iter().map(|c| c.star()).collect(),
            slot: self.slot,
        }
    }

    /// Max coefficient distance across components.
    pub fn max_coeff_distance(&self, other: &Self) -> f64 {
        self.components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.max_coeff_distance(b))
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.len() == other.len() && self.max_coeff_distance(other) <= tol
    }
}
