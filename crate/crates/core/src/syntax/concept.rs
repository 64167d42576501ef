//! Concepts, assertions, sequents and knowledge bases.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::rational::Rational;
use crate::syntax::cmp::CmpOp;

pub type Name = Arc<str>;

/// A concept of the logic.
///
/// The core constructors are `Atom`, `Const`, `Not`, `Minus` (truncated
/// subtraction of a constant), `And` and `Exists`. `Or`, `Plus` and `Forall`
/// are surface syntax and are removed by [`Concept::desugar`].
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Concept {
    Atom(Name),
    Const(Rational),
    Not(Arc<Concept>),
    Minus(Arc<Concept>, Rational),
    And(Arc<Concept>, Arc<Concept>),
    Exists(Name, Arc<Concept>),
    Or(Arc<Concept>, Arc<Concept>),
    Plus(Arc<Concept>, Rational),
    Forall(Name, Arc<Concept>),
}

impl Concept {
    pub fn atom(name: &str) -> Concept {
        Concept::Atom(name.into())
    }

    pub fn constant(c: Rational) -> Concept {
        Concept::Const(c)
    }

    pub fn not(self) -> Concept {
        Concept::Not(Arc::new(self))
    }

    pub fn minus(self, c: Rational) -> Concept {
        Concept::Minus(Arc::new(self), c)
    }

    pub fn plus(self, c: Rational) -> Concept {
        Concept::Plus(Arc::new(self), c)
    }

    pub fn and(self, other: Concept) -> Concept {
        Concept::And(Arc::new(self), Arc::new(other))
    }

    pub fn or(self, other: Concept) -> Concept {
        Concept::Or(Arc::new(self), Arc::new(other))
    }

    pub fn exists(role: &str, body: Concept) -> Concept {
        Concept::Exists(role.into(), Arc::new(body))
    }

    pub fn forall(role: &str, body: Concept) -> Concept {
        Concept::Forall(role.into(), Arc::new(body))
    }

    /// True when no surface-syntax constructor occurs.
    pub fn is_core(&self) -> bool {
        match self {
            Concept::Atom(_) | Concept::Const(_) => true,
            Concept::Not(c) | Concept::Minus(c, _) | Concept::Exists(_, c) => c.is_core(),
            Concept::And(a, b) => a.is_core() && b.is_core(),
            Concept::Or(..) | Concept::Plus(..) | Concept::Forall(..) => false,
        }
    }

    /// Rewrites surface syntax into core constructors:
    /// `C | D = !(!C & !D)`, `C (+) c = !((!C) (-) c)`, `all R . C = !some R . !C`.
    pub fn desugar(&self) -> Concept {
        match self {
            Concept::Atom(_) | Concept::Const(_) => self.clone(),
            Concept::Not(c) => c.desugar().not(),
            Concept::Minus(c, k) => c.desugar().minus(k.clone()),
            Concept::And(a, b) => a.desugar().and(b.desugar()),
            Concept::Exists(r, c) => Concept::Exists(r.clone(), Arc::new(c.desugar())),
            Concept::Or(a, b) => a.desugar().not().and(b.desugar().not()).not(),
            Concept::Plus(c, k) => c.desugar().not().minus(k.clone()).not(),
            Concept::Forall(r, c) => Concept::Exists(r.clone(), Arc::new(c.desugar().not())).not(),
        }
    }

    /// Syntactic size. Surface constructors are measured through their
    /// desugared form.
    pub fn size(&self) -> u64 {
        match self {
            Concept::Atom(_) => 1,
            Concept::Const(c) => constant_size(c),
            Concept::Not(c) => c.size() + 1,
            Concept::Minus(c, k) => c.size() + constant_size(k) + 1,
            Concept::And(a, b) => a.size() + b.size() + 1,
            Concept::Exists(_, c) => c.size() + 1,
            Concept::Or(..) | Concept::Plus(..) | Concept::Forall(..) => self.desugar().size(),
        }
    }

    /// Nesting depth of constructors; atoms and constants have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Concept::Atom(_) | Concept::Const(_) => 0,
            Concept::Not(c)
            | Concept::Minus(c, _)
            | Concept::Plus(c, _)
            | Concept::Exists(_, c)
            | Concept::Forall(_, c) => c.depth() + 1,
            Concept::And(a, b) | Concept::Or(a, b) => a.depth().max(b.depth()) + 1,
        }
    }

    /// Calls `f` on this concept and every subconcept, parents first.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Concept)) {
        f(self);
        match self {
            Concept::Atom(_) | Concept::Const(_) => {}
            Concept::Not(c)
            | Concept::Minus(c, _)
            | Concept::Plus(c, _)
            | Concept::Exists(_, c)
            | Concept::Forall(_, c) => c.walk(f),
            Concept::And(a, b) | Concept::Or(a, b) => {
                a.walk(f);
                b.walk(f);
            }
        }
    }

    pub fn subconcepts(&self) -> BTreeSet<Concept> {
        let mut out = BTreeSet::new();
        self.walk(&mut |c| {
            out.insert(c.clone());
        });
        out
    }

    /// Constants occurring in the concept, both as `Const` leaves and as
    /// shift amounts.
    pub fn constants(&self, out: &mut Vec<Rational>) {
        self.walk(&mut |c| match c {
            Concept::Const(k) | Concept::Minus(_, k) | Concept::Plus(_, k) => out.push(k.clone()),
            _ => {}
        });
    }

    pub fn atoms(&self, out: &mut BTreeSet<Name>) {
        self.walk(&mut |c| {
            if let Concept::Atom(a) = c {
                out.insert(a.clone());
            }
        });
    }

    pub fn roles(&self, out: &mut BTreeSet<Name>) {
        self.walk(&mut |c| {
            if let Concept::Exists(r, _) | Concept::Forall(r, _) = c {
                out.insert(r.clone());
            }
        });
    }
}

/// `|a/b| = ceil(log2 max(a,1)) + ceil(log2 b)` for the reduced fraction.
pub fn constant_size(c: &Rational) -> u64 {
    let a = c.numer().magnitude().clone().into();
    Rational::ceil_log2(&a) + Rational::ceil_log2(c.denom())
}

/// `C op c`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ConceptAssertion {
    pub concept: Concept,
    pub op: CmpOp,
    pub threshold: Rational,
}

impl ConceptAssertion {
    pub fn new(concept: Concept, op: CmpOp, threshold: Rational) -> Self {
        ConceptAssertion {
            concept,
            op,
            threshold,
        }
    }

    pub fn size(&self) -> u64 {
        self.concept.size() + constant_size(&self.threshold)
    }

    pub fn desugar(&self) -> ConceptAssertion {
        ConceptAssertion::new(self.concept.desugar(), self.op, self.threshold.clone())
    }

    /// The assertion that fails exactly when this one holds.
    pub fn negated(&self) -> ConceptAssertion {
        ConceptAssertion::new(self.concept.clone(), self.op.negate(), self.threshold.clone())
    }

    fn sort_key(&self) -> (String, CmpOp, Rational) {
        (self.concept.desugar().to_string(), self.op, self.threshold.clone())
    }
}

/// A finite set of concept assertions in canonical order.
///
/// Canonical order compares the printed core form of the concept, then the
/// operator (less before greater, strict before non-strict), then the
/// threshold.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Sequent {
    assertions: Vec<ConceptAssertion>,
}

impl Sequent {
    pub fn new(assertions: impl IntoIterator<Item = ConceptAssertion>) -> Sequent {
        let mut v: Vec<ConceptAssertion> = assertions.into_iter().collect();
        v.sort_by_cached_key(ConceptAssertion::sort_key);
        v.dedup();
        Sequent { assertions: v }
    }

    pub fn empty() -> Sequent {
        Sequent::default()
    }

    pub fn assertions(&self) -> &[ConceptAssertion] {
        &self.assertions
    }

    pub fn iter(&self) -> impl Iterator<Item = &ConceptAssertion> {
        self.assertions.iter()
    }

    pub fn len(&self) -> usize {
        self.assertions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assertions.is_empty()
    }

    pub fn size(&self) -> u64 {
        self.assertions.iter().map(ConceptAssertion::size).sum()
    }

    pub fn with(&self, extra: impl IntoIterator<Item = ConceptAssertion>) -> Sequent {
        Sequent::new(self.assertions.iter().cloned().chain(extra))
    }

    pub fn desugar(&self) -> Sequent {
        Sequent::new(self.assertions.iter().map(ConceptAssertion::desugar))
    }

    pub fn constants(&self, out: &mut Vec<Rational>) {
        for a in &self.assertions {
            a.concept.constants(out);
            out.push(a.threshold.clone());
        }
    }
}

impl FromIterator<ConceptAssertion> for Sequent {
    fn from_iter<T: IntoIterator<Item = ConceptAssertion>>(iter: T) -> Self {
        Sequent::new(iter)
    }
}

/// General concept inclusion `lhs [= rhs`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Gci {
    pub lhs: Concept,
    pub rhs: Concept,
}

impl Gci {
    pub fn new(lhs: Concept, rhs: Concept) -> Gci {
        Gci { lhs, rhs }
    }

    pub fn size(&self) -> u64 {
        self.lhs.size() + self.rhs.size()
    }

    pub fn desugar(&self) -> Gci {
        Gci::new(self.lhs.desugar(), self.rhs.desugar())
    }
}

#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct TBox {
    pub gcis: Vec<Gci>,
}

impl TBox {
    pub fn new(gcis: Vec<Gci>) -> TBox {
        TBox { gcis }
    }

    pub fn empty() -> TBox {
        TBox::default()
    }

    pub fn is_empty(&self) -> bool {
        self.gcis.is_empty()
    }

    pub fn size(&self) -> u64 {
        self.gcis.iter().map(Gci::size).sum()
    }

    pub fn desugar(&self) -> TBox {
        TBox::new(self.gcis.iter().map(Gci::desugar).collect())
    }

    pub fn constants(&self, out: &mut Vec<Rational>) {
        for g in &self.gcis {
            g.lhs.constants(out);
            g.rhs.constants(out);
        }
    }
}

/// `R(from, to) op threshold`; only greater-direction operators are allowed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RoleAssertion {
    pub role: Name,
    pub from: Name,
    pub to: Name,
    pub op: CmpOp,
    pub threshold: Rational,
}

/// `individual : C op c`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IndividualAssertion {
    pub individual: Name,
    pub assertion: ConceptAssertion,
}

#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct ABox {
    pub concept_assertions: Vec<IndividualAssertion>,
    pub role_assertions: Vec<RoleAssertion>,
}

impl ABox {
    pub fn is_empty(&self) -> bool {
        self.concept_assertions.is_empty() && self.role_assertions.is_empty()
    }

    /// Individual names in order of first mention.
    pub fn individuals(&self) -> Vec<Name> {
        let mut seen: Vec<Name> = Vec::new();
        let mut push = |n: &Name| {
            if !seen.contains(n) {
                seen.push(n.clone());
            }
        };
        for a in &self.concept_assertions {
            push(&a.individual);
        }
        for r in &self.role_assertions {
            push(&r.from);
            push(&r.to);
        }
        seen
    }

    pub fn constants(&self, out: &mut Vec<Rational>) {
        for a in &self.concept_assertions {
            a.assertion.concept.constants(out);
            out.push(a.assertion.threshold.clone());
        }
        for r in &self.role_assertions {
            out.push(r.threshold.clone());
        }
    }
}

/// Everything a knowledge-base file can contain.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Kb {
    pub tbox: TBox,
    pub abox: ABox,
    pub query: Vec<ConceptAssertion>,
}

impl fmt::Debug for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Debug for ConceptAssertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Debug for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Debug for Gci {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Debug for TBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.gcis).finish()
    }
}

impl fmt::Debug for IndividualAssertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Debug for ABox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ABox")
            .field("concept_assertions", &self.concept_assertions)
            .field("role_assertions", &self.role_assertions)
            .finish()
    }
}

impl fmt::Debug for Kb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Kb")
            .field("tbox", &self.tbox)
            .field("abox", &self.abox)
            .field("query", &self.query)
            .finish()
    }
}
