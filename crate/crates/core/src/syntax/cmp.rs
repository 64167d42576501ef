//! Comparison operators and their algebra.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::Rational;

/// One of `<`, `<=`, `>`, `>=`.
///
/// The declaration order is the canonical one used when sorting sequents:
/// less-direction before greater-direction, strict before non-strict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CmpOp {
    Lt,
    Le,
    Gt,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("blacktriangle expects a less-direction and a greater-direction operator, got ({lt}, {gt})")]
pub struct DirectionError {
    pub lt: CmpOp,
    pub gt: CmpOp,
}

impl CmpOp {
    pub const ALL: [CmpOp; 4] = [CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge];

    /// True for `<` and `<=`.
    pub fn is_less(self) -> bool {
        matches!(self, CmpOp::Lt | CmpOp::Le)
    }

    pub fn is_greater(self) -> bool {
        !self.is_less()
    }

    pub fn is_strict(self) -> bool {
        matches!(self, CmpOp::Lt | CmpOp::Gt)
    }

    /// Reverses the direction and keeps strictness: `>` becomes `<`.
    pub fn flip(self) -> CmpOp {
        match self {
            CmpOp::Lt => CmpOp::Gt,
            CmpOp::Le => CmpOp::Ge,
            CmpOp::Gt => CmpOp::Lt,
            CmpOp::Ge => CmpOp::Le,
        }
    }

    /// Toggles strictness and keeps the direction: `>` becomes `>=`.
    pub fn toggle(self) -> CmpOp {
        match self {
            CmpOp::Lt => CmpOp::Le,
            CmpOp::Le => CmpOp::Lt,
            CmpOp::Gt => CmpOp::Ge,
            CmpOp::Ge => CmpOp::Gt,
        }
    }

    /// The operator whose truth is the negation of this one: `a op b` fails
    /// exactly when `a op.negate() b` holds.
    pub fn negate(self) -> CmpOp {
        self.toggle().flip()
    }

    /// Evaluates `a op b` exactly.
    pub fn holds(self, a: &Rational, b: &Rational) -> bool {
        match self {
            CmpOp::Lt => a < b,
            CmpOp::Le => a <= b,
            CmpOp::Gt => a > b,
            CmpOp::Ge => a >= b,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }
}

impl fmt::Display for CmpOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// `flip` as a free function.
pub fn flip(op: CmpOp) -> CmpOp {
    op.flip()
}

/// `toggle` as a free function.
pub fn toggle(op: CmpOp) -> CmpOp {
    op.toggle()
}

/// `a op b`.
pub fn eval_cmp(a: &Rational, op: CmpOp, b: &Rational) -> bool {
    op.holds(a, b)
}

/// The solvability operator for a pair of bounds.
///
/// For `lt` in `{<, <=}` and `gt` in `{>, >=}` this is `<` on `(<=, >=)` and
/// `<=` otherwise. `d blacktriangle c` holds exactly when no rational `e`
/// satisfies both `e gt c` and `e lt d`.
pub fn blacktriangle(lt: CmpOp, gt: CmpOp) -> Result<CmpOp, DirectionError> {
    if !lt.is_less() || !gt.is_greater() {
        return Err(DirectionError { lt, gt });
    }
    Ok(if lt == CmpOp::Le && gt == CmpOp::Ge {
        CmpOp::Lt
    } else {
        CmpOp::Le
    })
}

/// `true` when the bounds `e lt upper` and `e gt lower` admit no common
/// rational `e`.
pub fn bounds_disjoint(lt: CmpOp, upper: &Rational, gt: CmpOp, lower: &Rational) -> bool {
    match blacktriangle(lt, gt) {
        Ok(op) => op.holds(upper, lower),
        Err(e) => panic!("{e}"),
    }
}
