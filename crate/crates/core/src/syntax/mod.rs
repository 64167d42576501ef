//! Abstract syntax, comparison operators, parsing and printing.

pub mod cmp;
pub mod concept;
pub mod parser;
mod print;

pub use cmp::{blacktriangle, eval_cmp, flip, toggle, CmpOp};
pub use concept::{
    constant_size, ABox, Concept, ConceptAssertion, Gci, IndividualAssertion, Kb, Name,
    RoleAssertion, Sequent, TBox,
};
pub use parser::{parse_assertion, parse_concept, parse_gci, parse_kb, ParseError, Statement};
