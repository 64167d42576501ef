//! The unlabelled tableau calculus: rules on labels and the globally cached
//! and-or graph.
//!
//! Every threshold a rule can produce is an integer multiple of the grid's
//! half step, so the engine stores thresholds as `i64` counts of that unit
//! and concepts as arena ids. Labels are sorted slices of [`Asn`], which
//! makes the canonical order a plain integer order.

mod arena;
mod graph;

use std::sync::Arc;

use thiserror::Error;

pub use arena::{ConceptArena, ConceptId, Node};
pub use graph::{build_tableau, GraphNode, NodeId, NodeKind, NodeLabel, Stats, TableauGraph, Tuple};

use crate::grid::{associated_concept, Grid};
use crate::rational::Rational;
use crate::syntax::{ABox, CmpOp, ConceptAssertion, Name, Sequent, TBox};
use arena::ArenaBuilder;

/// Order in which propositional rules are tried on a label.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Policy {
    /// Axioms, then non-branching rules, then branching rules; canonical
    /// order within each group.
    #[default]
    DeterministicFirst,
    /// Axioms, then the first applicable rule in canonical order.
    Canonical,
}

/// A concept assertion in engine form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Asn {
    pub concept: ConceptId,
    pub op: CmpOp,
    pub threshold: i64,
}

/// A canonical, ⊥-free label.
pub type Label = Arc<[Asn]>;

/// Which rule produced the children of a node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    Axiom,
    AndGreater,
    AndLess,
    Not,
    MinusLess,
    MinusGreater,
    Exists,
    AboxEdge,
    AboxSplit,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Axiom => "axiom",
            Rule::AndGreater => "and-greater",
            Rule::AndLess => "and-less",
            Rule::Not => "not",
            Rule::MinusLess => "minus-less",
            Rule::MinusGreater => "minus-greater",
            Rule::Exists => "exists",
            Rule::AboxEdge => "abox-edge",
            Rule::AboxSplit => "abox-split",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("role assertion {0} must use > or >=")]
    RoleDirection(String),
    #[error("grid step {0} is too fine for the engine's threshold range")]
    GridTooFine(Rational),
    #[error("label is not saturated")]
    NotSaturated,
}

#[inline]
fn holds(op: CmpOp, a: i64, b: i64) -> bool {
    match op {
        CmpOp::Lt => a < b,
        CmpOp::Le => a <= b,
        CmpOp::Gt => a > b,
        CmpOp::Ge => a >= b,
    }
}

/// `R(from, to) op threshold` with individuals as indices.
#[derive(Clone, Debug)]
pub struct RoleEdge {
    pub role: Name,
    pub role_id: Option<u32>,
    pub from: usize,
    pub to: usize,
    pub op: CmpOp,
    pub threshold: i64,
}

#[derive(Clone, Debug)]
pub struct AboxSeed {
    pub individuals: Vec<Name>,
    pub labels: Vec<Option<Label>>,
    pub edges: Vec<RoleEdge>,
}

/// Everything needed to expand labels for one problem: the concept arena,
/// the threshold unit, the TBox assertion and the initial labels.
#[derive(Debug)]
pub struct Engine {
    arena: ConceptArena,
    grid: Grid,
    /// Value of 1 in threshold units.
    one: i64,
    policy: Policy,
    tassert: Asn,
    query: Option<Label>,
    abox: Option<AboxSeed>,
}

impl Engine {
    /// Compiles the TBox against the grid of all constants of the input and
    /// interns every concept that can occur in a label.
    pub fn new(tbox: &TBox, query: &Sequent, abox: &ABox) -> Result<Engine, EngineError> {
        let mut constants = Vec::new();
        tbox.constants(&mut constants);
        query.constants(&mut constants);
        abox.constants(&mut constants);
        let grid = Grid::from_constants(&constants);
        Self::with_grid(tbox, query, abox, grid)
    }

    /// As [`Engine::new`] with an explicit grid; the grid must contain every
    /// constant of the input.
    pub fn with_grid(
        tbox: &TBox,
        query: &Sequent,
        abox: &ABox,
        grid: Grid,
    ) -> Result<Engine, EngineError> {
        for r in &abox.role_assertions {
            if !r.op.is_greater() {
                return Err(EngineError::RoleDirection(r.to_string()));
            }
        }
        let unit = grid.epsilon.clone();
        let t_concept = associated_concept(tbox, &grid);
        let query = query.desugar();
        let abox_asns: Vec<(Name, ConceptAssertion)> = abox
            .concept_assertions
            .iter()
            .map(|a| (a.individual.clone(), a.assertion.desugar()))
            .collect();

        // Thresholds move by at most one shift constant (or a complement)
        // per rule along a branch, bounded by the nesting depth.
        let depth = std::iter::once(&t_concept)
            .chain(query.iter().map(|a| &a.concept))
            .chain(abox_asns.iter().map(|(_, a)| &a.concept))
            .map(|c| c.depth() as i64)
            .max()
            .unwrap_or(0);
        let to_units_checked = |r: &Rational| -> Option<i64> {
            r.exact_quotient(&unit).and_then(|q| i64::try_from(q).ok())
        };
        let one = to_units_checked(&Rational::one())
            .filter(|&n| n.checked_mul(4 * (depth + 4)).is_some_and(|m| m < (1 << 60)))
            .ok_or_else(|| EngineError::GridTooFine(grid.step.clone()))?;
        let mut bound = one;
        let mut fits = |r: &Rational| match to_units_checked(r) {
            Some(v) if v.abs() <= (1 << 58) => {
                bound = bound.max(v.abs());
                true
            }
            _ => false,
        };
        let all_fit = query.iter().all(|a| fits(&a.threshold))
            && abox_asns.iter().all(|(_, a)| fits(&a.threshold))
            && abox.role_assertions.iter().all(|r| fits(&r.threshold));
        if !all_fit || bound.checked_mul(4 * (depth + 4)).is_none_or(|m| m >= (1 << 61)) {
            return Err(EngineError::GridTooFine(grid.step.clone()));
        }
        let to_units = |r: &Rational| to_units_checked(r).expect("constant lies on the grid");

        let mut builder = ArenaBuilder::new(&to_units);
        let t_id = builder.intern(&t_concept);
        let q_ids: Vec<ConceptId> = query.iter().map(|a| builder.intern(&a.concept)).collect();
        let a_ids: Vec<ConceptId> = abox_asns.iter().map(|(_, a)| builder.intern(&a.concept)).collect();
        let (arena, remap) = builder.freeze();
        let fix = |id: ConceptId| remap[id as usize];

        let tassert = Asn {
            concept: fix(t_id),
            op: CmpOp::Ge,
            threshold: one,
        };
        let mut engine = Engine {
            arena,
            grid,
            one,
            policy: Policy::default(),
            tassert,
            query: None,
            abox: None,
        };
        let root: Vec<Asn> = query
            .iter()
            .zip(&q_ids)
            .map(|(a, &id)| Asn {
                concept: fix(id),
                op: a.op,
                threshold: to_units(&a.threshold),
            })
            .chain(std::iter::once(tassert))
            .collect();
        engine.query = engine.canonical(root);

        if !abox.is_empty() {
            let individuals = abox.individuals();
            let index = |n: &Name| individuals.iter().position(|m| m == n).expect("individual listed");
            let mut per: Vec<Vec<Asn>> = vec![vec![tassert]; individuals.len()];
            for ((name, a), &id) in abox_asns.iter().zip(&a_ids) {
                per[index(name)].push(Asn {
                    concept: fix(id),
                    op: a.op,
                    threshold: to_units(&a.threshold),
                });
            }
            let labels = per.into_iter().map(|v| engine.canonical(v)).collect();
            let edges = abox
                .role_assertions
                .iter()
                .map(|r| RoleEdge {
                    role: r.role.clone(),
                    role_id: engine.arena.roles().iter().position(|n| *n == r.role).map(|i| i as u32),
                    from: index(&r.from),
                    to: index(&r.to),
                    op: r.op,
                    threshold: to_units(&r.threshold),
                })
                .collect();
            engine.abox = Some(AboxSeed {
                individuals,
                labels,
                edges,
            });
        }
        Ok(engine)
    }

    pub fn with_policy(mut self, policy: Policy) -> Engine {
        self.policy = policy;
        self
    }

    pub fn policy(&self) -> Policy {
        self.policy
    }

    pub fn arena(&self) -> &ConceptArena {
        &self.arena
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn one(&self) -> i64 {
        self.one
    }

    pub fn tassert(&self) -> Asn {
        self.tassert
    }

    /// The query root label, `None` when it is ⊥ already.
    pub fn query_label(&self) -> Option<&Label> {
        self.query.as_ref()
    }

    pub fn abox(&self) -> Option<&AboxSeed> {
        self.abox.as_ref()
    }

    /// Exact value of a threshold given in units.
    pub fn value(&self, units: i64) -> Rational {
        self.grid.epsilon.mul_int(units)
    }

    pub fn to_assertion(&self, a: Asn) -> ConceptAssertion {
        ConceptAssertion::new(
            (**self.arena.concept(a.concept)).clone(),
            a.op,
            self.value(a.threshold),
        )
    }

    pub fn to_sequent(&self, label: &[Asn]) -> Sequent {
        Sequent::new(label.iter().map(|&a| self.to_assertion(a)))
    }

    /// Converts a sequent whose concepts all occur in the arena and whose
    /// thresholds lie on the unit grid. `Ok(None)` means the sequent
    /// canonicalizes to ⊥.
    pub fn from_sequent(&self, s: &Sequent) -> Option<Option<Label>> {
        let mut v = Vec::with_capacity(s.len());
        for a in s.iter() {
            let concept = self.arena.id_of(&a.concept.desugar())?;
            let threshold = a
                .threshold
                .exact_quotient(&self.grid.epsilon)
                .and_then(|q| i64::try_from(q).ok())?;
            v.push(Asn {
                concept,
                op: a.op,
                threshold,
            });
        }
        Some(self.canonical(v))
    }

    /// Sorts, removes duplicates and evaluates ground assertions: a false
    /// one turns the whole label into ⊥, true ones are dropped.
    pub fn canonical(&self, mut v: Vec<Asn>) -> Option<Label> {
        let mut ok = true;
        v.retain(|a| match self.arena.node(a.concept) {
            Node::Const(k) => {
                ok &= holds(a.op, k, a.threshold);
                false
            }
            _ => true,
        });
        if !ok {
            return None;
        }
        v.sort_unstable();
        v.dedup();
        Some(v.into())
    }

    /// The axioms, applied to atoms and to restrictions `∃R.C` alike: a
    /// bound outside `[0,1]`, or an upper and a lower bound on the same
    /// concept that admit no common value. Ground assertions never survive
    /// canonicalization.
    pub fn is_clashing(&self, label: &[Asn]) -> bool {
        let mut i = 0;
        while i < label.len() {
            let c = label[i].concept;
            let mut j = i;
            while j < label.len() && label[j].concept == c {
                j += 1;
            }
            let run = &label[i..j];
            if matches!(self.arena.node(c), Node::Atom(_) | Node::Exists(..)) {
                if run.iter().any(|a| self.out_of_range(a)) {
                    return true;
                }
                for u in run.iter().filter(|a| a.op.is_less()) {
                    for l in run.iter().filter(|a| a.op.is_greater()) {
                        let bt = crate::syntax::blacktriangle(u.op, l.op).expect("directions");
                        if holds(bt, u.threshold, l.threshold) {
                            return true;
                        }
                    }
                }
            }
            i = j;
        }
        false
    }

    /// `C ▷ c` with `c ▷̄ 1`, or `C ◁ c` with `c ◁̄ 0`.
    fn out_of_range(&self, a: &Asn) -> bool {
        if a.op.is_greater() {
            holds(a.op.toggle(), a.threshold, self.one)
        } else {
            holds(a.op.toggle(), a.threshold, 0)
        }
    }

    /// Which rule the policy applies to `label`, if any: the axioms first,
    /// then the first non-branching rule in canonical order, then the first
    /// branching one (or simply the first rule in canonical order under
    /// [`Policy::Canonical`]).
    pub fn select_rule(&self, label: &[Asn]) -> Option<(usize, Rule)> {
        if self.is_clashing(label) {
            return Some((usize::MAX, Rule::Axiom));
        }
        let mut branching = None;
        for (i, a) in label.iter().enumerate() {
            let rule = match self.arena.node(a.concept) {
                Node::Not(_) => Rule::Not,
                Node::And(..) if a.op.is_greater() => Rule::AndGreater,
                Node::And(..) => {
                    if self.policy == Policy::Canonical {
                        return Some((i, Rule::AndLess));
                    }
                    branching.get_or_insert((i, Rule::AndLess));
                    continue;
                }
                Node::Minus(..) if a.op.is_less() => Rule::MinusLess,
                Node::Minus(..) if holds(a.op.toggle(), a.threshold, 0) => Rule::MinusGreater,
                _ => continue,
            };
            return Some((i, rule));
        }
        branching
    }

    /// The conclusions of the rule chosen by [`Engine::select_rule`].
    /// `None` means the label is saturated; a `None` conclusion is ⊥.
    pub fn apply_propositional(&self, label: &[Asn]) -> Option<(Rule, Vec<Option<Label>>)> {
        let (i, rule) = self.select_rule(label)?;
        if rule == Rule::Axiom {
            return Some((Rule::Axiom, vec![None]));
        }
        let a = label[i];
        let step = |extra: &[Asn]| -> Option<Label> {
            let mut v = Vec::with_capacity(label.len() + 1);
            v.extend_from_slice(&label[..i]);
            v.extend_from_slice(&label[i + 1..]);
            v.extend_from_slice(extra);
            debug_assert!(extra
                .iter()
                .all(|e| self.arena.weight(e.concept) < self.arena.weight(a.concept)));
            self.canonical(v)
        };
        let (op, t) = (a.op, a.threshold);
        let conclusions = match (self.arena.node(a.concept), rule) {
            (Node::Not(d), _) => vec![step(&[Asn {
                concept: d,
                op: op.flip(),
                threshold: self.one - t,
            }])],
            (Node::And(x, y), Rule::AndGreater) => {
                vec![step(&[Asn { concept: x, ..a }, Asn { concept: y, ..a }])]
            }
            (Node::And(x, y), _) => vec![step(&[Asn { concept: x, ..a }]), step(&[Asn { concept: y, ..a }])],
            (Node::Minus(d, k), Rule::MinusLess) => {
                // side condition d ◁° 0, evaluated on the spot
                let c = Asn {
                    concept: d,
                    op,
                    threshold: t + k,
                };
                vec![if holds(op.flip(), t, 0) { step(&[c]) } else { None }]
            }
            (Node::Minus(d, k), _) => vec![step(&[Asn {
                concept: d,
                op,
                threshold: t + k,
            }])],
            _ => unreachable!("select_rule only returns applicable rules"),
        };
        Some((rule, conclusions))
    }

    /// The (∃R) conclusions of a saturated label, one per existential
    /// restriction `∃R.C ▷ c` with `c ▷̄ 0`, paired with that restriction.
    pub fn exists_children(&self, label: &[Asn]) -> Vec<(Asn, Option<Label>)> {
        let mut out = Vec::new();
        for &e in label {
            if !e.op.is_greater() || !holds(e.op.toggle(), e.threshold, 0) {
                continue;
            }
            let Node::Exists(role, body) = self.arena.node(e.concept) else {
                continue;
            };
            let mut v = vec![
                Asn {
                    concept: body,
                    ..e
                },
                self.tassert,
            ];
            v.extend(self.kept_universals(label, role, e.op, e.threshold));
            out.push((e, self.canonical(v)));
        }
        out
    }

    /// Bodies `D ◁ d` of universal restrictions `∃R.D ◁ d` in `label` that
    /// a successor reached with degree `▷ c` has to satisfy (`d ⯇ c`).
    pub fn kept_universals<'a>(
        &'a self,
        label: &'a [Asn],
        role: u32,
        gt: CmpOp,
        c: i64,
    ) -> impl Iterator<Item = Asn> + 'a {
        label.iter().filter_map(move |u| {
            if !u.op.is_less() {
                return None;
            }
            match self.arena.node(u.concept) {
                Node::Exists(r, d) if r == role => {
                    let bt = crate::syntax::blacktriangle(u.op, gt).expect("directions");
                    holds(bt, u.threshold, c).then_some(Asn {
                        concept: d,
                        op: u.op,
                        threshold: u.threshold,
                    })
                }
                _ => None,
            }
        })
    }

    /// `exists_children` for callers holding a possibly unsaturated label.
    pub fn try_exists_children(&self, label: &[Asn]) -> Result<Vec<(Asn, Option<Label>)>, EngineError> {
        if self.apply_propositional(label).is_some() {
            return Err(EngineError::NotSaturated);
        }
        Ok(self.exists_children(label))
    }

    pub fn label_to_string(&self, label: &[Asn]) -> String {
        let parts: Vec<String> = label.iter().map(|&a| self.to_assertion(a).to_string()).collect();
        format!("{{{}}}", parts.join(", "))
    }
}
