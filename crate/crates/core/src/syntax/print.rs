//! Text rendering. The output is accepted by the parser and parses back to
//! the same tree.

use std::fmt::{self, Display, Formatter, Write};

use crate::syntax::concept::{
    Concept, ConceptAssertion, Gci, IndividualAssertion, Kb, RoleAssertion, Sequent, TBox,
};

/// Binding strength, loosest first.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Level {
    Or,
    And,
    Shift,
    Unary,
}

fn level(c: &Concept) -> Level {
    match c {
        Concept::Or(..) => Level::Or,
        Concept::And(..) => Level::And,
        Concept::Minus(..) | Concept::Plus(..) => Level::Shift,
        _ => Level::Unary,
    }
}

fn write_at(c: &Concept, need: Level, out: &mut Formatter<'_>) -> fmt::Result {
    if level(c) < need {
        out.write_char('(')?;
        write_concept(c, out)?;
        out.write_char(')')
    } else {
        write_concept(c, out)
    }
}

fn write_concept(c: &Concept, out: &mut Formatter<'_>) -> fmt::Result {
    match c {
        Concept::Atom(a) => out.write_str(a),
        Concept::Const(k) => write!(out, "{k}"),
        Concept::Not(x) => {
            out.write_char('!')?;
            write_at(x, Level::Unary, out)
        }
        Concept::Exists(r, x) => {
            write!(out, "some {r} . ")?;
            write_at(x, Level::Unary, out)
        }
        Concept::Forall(r, x) => {
            write!(out, "all {r} . ")?;
            write_at(x, Level::Unary, out)
        }
        Concept::Minus(x, k) => {
            write_at(x, Level::Shift, out)?;
            write!(out, " (-) {k}")
        }
        Concept::Plus(x, k) => {
            write_at(x, Level::Shift, out)?;
            write!(out, " (+) {k}")
        }
        Concept::And(a, b) => {
            write_at(a, Level::And, out)?;
            out.write_str(" & ")?;
            write_at(b, Level::Shift, out)
        }
        Concept::Or(a, b) => {
            write_at(a, Level::Or, out)?;
            out.write_str(" | ")?;
            write_at(b, Level::And, out)
        }
    }
}

impl Display for Concept {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write_concept(self, f)
    }
}

impl Display for ConceptAssertion {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.concept, self.op, self.threshold)
    }
}

impl Display for Sequent {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        f.write_char('{')?;
        for (i, a) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        f.write_char('}')
    }
}

impl Display for Gci {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "{} [= {}", self.lhs, self.rhs)
    }
}

impl Display for IndividualAssertion {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "{} : {}", self.individual, self.assertion)
    }
}

impl Display for RoleAssertion {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}({}, {}) {} {}",
            self.role, self.from, self.to, self.op, self.threshold
        )
    }
}

impl Display for TBox {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        for g in &self.gcis {
            writeln!(f, "{g}")?;
        }
        Ok(())
    }
}

/// One statement per line; parses back to an equal [`Kb`].
impl Display for Kb {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.tbox)?;
        for a in &self.abox.concept_assertions {
            writeln!(f, "{a}")?;
        }
        for r in &self.abox.role_assertions {
            writeln!(f, "{r}")?;
        }
        for q in &self.query {
            writeln!(f, "{q}")?;
        }
        Ok(())
    }
}
