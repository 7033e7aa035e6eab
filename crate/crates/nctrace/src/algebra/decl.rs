use crate::error::{NcError, Result};
use serde::{Deserialize, Serialize};

/// Variable class of a formal letter.
///
/// `X` are the primary self-adjoint variables, `XPrime` an auxiliary tuple
/// (used for conditional constructions), `Y(k)` the k-th multilinear argument
/// slot, and `S(k)` the k-th semicircular probe slot consumed by the
/// contraction operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum VarClass {
    X,
    XPrime,
    Y(usize),
    S(usize),
}

/// One formal letter: a class plus a 1-based index within the class tuple.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Letter {
    pub class: VarClass,
    pub index: usize,
}

impl Letter {
    pub fn x(index: usize) -> Self {
        Letter { class: VarClass::X, index }
    }
    pub fn xp(index: usize) -> Self {
        Letter { class: VarClass::XPrime, index }
    }
    pub fn y(slot: usize, index: usize) -> Self {
        Letter { class: VarClass::Y(slot), index }
    }
    pub fn s(slot: usize, index: usize) -> Self {
        Letter { class: VarClass::S(slot), index }
    }
}

/// Declared shape of the variable universe a polynomial lives in.
///
/// `y_slots[k-1]` / `s_slots[k-1]` give the tuple dimension of slot `k`.
/// Y-slots are multilinear argument slots; the grading checks of the
/// operator layer rely on the declaration rather than inference.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Declaration {
    pub dim_x: usize,
    pub dim_xp: usize,
    pub y_slots: Vec<usize>,
    pub s_slots: Vec<usize>,
}

impl Declaration {
    /// Plain declaration with `d` primary variables and no slots.
    pub fn scalar(d: usize) -> Self {
        Declaration { dim_x: d, dim_xp: 0, y_slots: Vec::new(), s_slots: Vec::new() }
    }

    /// Declaration with one Y-slot of dimension `dim`.
    pub fn with_slot(d: usize, dim: usize) -> Self {
        Declaration { dim_x: d, dim_xp: 0, y_slots: vec![dim], s_slots: Vec::new() }
    }

    /// Returns a copy extended by a fresh Y-slot of dimension `dim`; the new
    /// slot id is returned alongside.
    pub fn push_y_slot(&self, dim: usize) -> (Self, usize) {
        let mut d = self.clone();
        d.y_slots.push(dim);
        let id = d.y_slots.len();
        (d, id)
    }

    pub fn y_dim(&self, slot: usize) -> Option<usize> {
        self.y_slots.get(slot.checked_sub(1)?).copied()
    }

    pub fn s_dim(&self, slot: usize) -> Option<usize> {
        self.s_slots.get(slot.checked_sub(1)?).copied()
    }

    /// Validates that `letter` is inside the declared ranges.
    pub fn check(&self, letter: &Letter) -> Result<()> {
        let ok = match letter.class {
            VarClass::X => letter.index >= 1 && letter.index <= self.dim_x,
            VarClass::XPrime => letter.index >= 1 && letter.index <= self.dim_xp,
            VarClass::Y(slot) => {
                self.y_dim(slot).is_some_and(|d| letter.index >= 1 && letter.index <= d)
            }
            VarClass::S(slot) => {
                self.s_dim(slot).is_some_and(|d| letter.index >= 1 && letter.index <= d)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(NcError::UndeclaredVariable(crate::algebra::display::letter_string(letter)))
        }
    }

    /// Declarations must agree exactly for arithmetic to combine terms.
    pub fn require_same(&self, other: &Self) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(NcError::DeclMismatch(format!("{self:?} vs {other:?}")))
        }
    }
}
