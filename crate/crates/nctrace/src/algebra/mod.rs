//! Canonical symbolic representation of trace polynomials.
//!
//! An element is a sum of monomials `c * tr(w_1) ... tr(w_n) * w_0` where the
//! `w_i` are words in the declared variables, each trace factor is stored as
//! the lexicographically minimal rotation of its word, the factor multiset is
//! sorted, and like terms are merged. This makes the stored form a normal
//! form: two expressions denote the same element iff their stored
//! representations are identical.

mod decl;
mod display;
mod field;
mod ops;
mod parse;
mod poly;
#[cfg(test)]
mod tests;
mod word;

pub use decl::{Declaration, Letter, VarClass};
pub use field::OperatorField;
pub use ops::Bindings;
pub use parse::parse;
pub use poly::{MonomialKey, TracePolynomial};
pub use word::{CyclicWord, Word};
