use super::herm::HermTuple;
use crate::algebra::{OperatorField, TracePolynomial, VarClass, Word};
use crate::error::{NcError, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::collections::BTreeMap;

/// Evaluation context: the primary tuple, an optional auxiliary tuple, and
/// matrix arguments for any Y- or S-slots.
pub struct EvalCtx<'a> {
    pub x: &'a HermTuple,
    pub xp: Option<&'a HermTuple>,
    pub slots: BTreeMap<usize, Vec<DMatrix<Complex64>>>,
}

impl<'a> EvalCtx<'a> {
    pub fn new(x: &'a HermTuple) -> Self {
        EvalCtx { x, xp: None, slots: BTreeMap::new() }
    }

    pub fn with_xp(mut self, xp: &'a HermTuple) -> Self {
        self.xp = Some(xp);
        self
    }

    pub fn with_slot(mut self, slot: usize, args: Vec<DMatrix<Complex64>>) -> Self {
        self.slots.insert(slot, args);
        self
    }

    fn letter(&self, l: &crate::algebra::Letter) -> Result<&DMatrix<Complex64>> {
        match l.class {
            VarClass::X => self
                .x
                .mats()
                .get(l.index - 1)
                .ok_or_else(|| NcError::Dimension(format!("x{} out of range", l.index))),
            VarClass::XPrime => self
                .xp
                .and_then(|t| t.mats().get(l.index - 1))
                .ok_or_else(|| NcError::Dimension(format!("xp{} not supplied", l.index))),
            VarClass::Y(s) | VarClass::S(s) => self
                .slots
                .get(&s)
                .and_then(|v| v.get(l.index - 1))
                .ok_or_else(|| NcError::Dimension(format!("slot {s} argument {} missing", l.index))),
        }
    }
}

/// Evaluator with a word-product cache that persists across polynomial
/// evaluations at the same point; prefix reuse makes repeated powers cheap.
pub struct SharedEval<'a, 'b> {
    ctx: &'b EvalCtx<'a>,
    n: usize,
    word_cache: BTreeMap<Word, DMatrix<Complex64>>,
}

impl<'a, 'b> SharedEval<'a, 'b> {
    pub fn new(ctx: &'b EvalCtx<'a>) -> Self {
        SharedEval { ctx, n: ctx.x.n(), word_cache: BTreeMap::new() }
    }

    fn word(&mut self, w: &Word) -> Result<DMatrix<Complex64>> {
        if w.is_empty() {
            return Ok(DMatrix::identity(self.n, self.n));
        }
        if w.len() == 1 {
            return Ok(self.ctx.letter(&w.0[0])?.clone());
        }
        if let Some(m) = self.word_cache.get(w) {
            return Ok(m.clone());
        }
        let prefix = Word(w.0[..w.len() - 1].to_vec());
        let head = self.word(&prefix)?;
        let m = super::herm::fast_mul(&head, self.ctx.letter(&w.0[w.len() - 1])?);
        self.word_cache.insert(w.clone(), m.clone());
        Ok(m)
    }

    fn trace_of_word(&mut self, w: &Word) -> Result<Complex64> {
        if w.is_empty() {
            return Ok(Complex64::new(1.0, 0.0));
        }
        if w.len() == 1 {
            return Ok(self.ctx.letter(&w.0[0])?.trace() / self.n as f64);
        }
        // split at the middle: one O(N^2) pairing instead of a final matmul
        let mid = w.len() / 2;
        let a = self.word(&Word(w.0[..mid].to_vec()))?;
        let b = self.word(&Word(w.0[mid..].to_vec()))?;
        Ok(super::herm::trace_product(&a, &b) / self.n as f64)
    }

    /// Value of a scalar-valued polynomial.
    pub fn scalar(&mut self, p: &TracePolynomial) -> Result<Complex64> {
        p.require_scalar("matrix evaluation")?;
        let mut acc = Complex64::default();
        for (key, coeff) in p.terms() {
            let mut val = *coeff;
            for f in &key.factors {
                val *= self.trace_of_word(f.word())?;
            }
            acc += val;
        }
        Ok(acc)
    }

    /// Matrix value of a general polynomial; scalar terms contribute
    /// multiples of the identity.
    pub fn matrix(&mut self, p: &TracePolynomial) -> Result<DMatrix<Complex64>> {
        let n = self.n;
        let mut acc = DMatrix::<Complex64>::zeros(n, n);
        for (key, coeff) in p.terms() {
            let mut scal = *coeff;
            for f in &key.factors {
                scal *= self.trace_of_word(f.word())?;
            }
            if key.outer.is_empty() {
                for i in 0..n {
                    acc[(i, i)] += scal;
                }
            } else {
                let w = self.word(&key.outer)?;
                acc.zip_apply(&w, |a, b| *a += b * scal);
            }
        }
        Ok(acc)
    }
}

/// Evaluates a scalar-valued polynomial to a complex number.
pub fn evaluate_scalar(p: &TracePolynomial, x: &HermTuple) -> Result<Complex64> {
    evaluate_scalar_ctx(p, &EvalCtx::new(x))
}

pub fn evaluate_scalar_ctx(p: &TracePolynomial, ctx: &EvalCtx) -> Result<Complex64> {
    SharedEval::new(ctx).scalar(p)
}

/// Evaluates a general polynomial to a matrix.
pub fn evaluate_matrix(p: &TracePolynomial, ctx: &EvalCtx) -> Result<DMatrix<Complex64>> {
    SharedEval::new(ctx).matrix(p)
}

/// Applies an operator field (or plain vector field) at `x`, binding its
/// slot to `args` when present. Returns the evaluated component matrices.
pub fn apply_field(
    field: &OperatorField,
    x: &HermTuple,
    args: Option<&[DMatrix<Complex64>]>,
) -> Result<Vec<DMatrix<Complex64>>> {
    let mut ctx = EvalCtx::new(x);
    if let Some(slot) = field.slot() {
        let a = args.ok_or_else(|| {
            NcError::Dimension("field has a slot but no arguments were supplied".into())
        })?;
        ctx = ctx.with_slot(slot, a.to_vec());
    }
    let mut ev = SharedEval::new(&ctx);
    field.components().iter().map(|c| ev.matrix(c)).collect()
}

/// Applies a plain vector field to a tuple, returning a Hermitian tuple
/// (re-symmetrized against floating point drift).
pub fn apply_vector_field(field: &OperatorField, x: &HermTuple) -> Result<HermTuple> {
    let mats = apply_field(field, x, None)?;
    let mut out = HermTuple::zeros(x.n(), mats.len());
    for (j, m) in mats.into_iter().enumerate() {
        out.mats_mut()[j] = (&m + m.adjoint()).scale(0.5);
    }
    Ok(out)
}
