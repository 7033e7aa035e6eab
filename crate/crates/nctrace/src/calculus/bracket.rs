use super::derive::field_differential;
use crate::algebra::OperatorField;
use crate::error::{NcError, Result};

/// Lie bracket of two plain vector fields: `dh1 # h2 - dh2 # h1`.
pub fn lie_bracket(h1: &OperatorField, h2: &OperatorField) -> Result<OperatorField> {
    if h1.len() != h2.len() {
        return Err(NcError::Dimension("bracket operands differ in length".into()));
    }
    let a = field_differential(h1)?.compose(h2)?;
    let b = field_differential(h2)?.compose(h1)?;
    a.try_sub(&b)
}
