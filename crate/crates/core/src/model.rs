//! Model extraction from a consistent marking.
//!
//! The individuals are the AND-nodes of the marking (plus one copy per
//! named ABox individual). Following the chosen child of each OR-node
//! leads every sequent node to a unique AND-node, its saturation endpoint;
//! `Y(x)` collects the labels of all nodes ending at `x`. Atomic values are
//! read off the atomic bounds in `Y(x)`, role values off the existential
//! restrictions that produced each successor and the universal restrictions
//! the successor does not already discharge. The result is verified against
//! [`crate::semantics`] before it is returned.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::rational::Rational;
use crate::semantics::{check_tbox, Evaluator, Interpretation, SemanticsError};
use crate::solver::{Marking, Solution};
use crate::syntax::{CmpOp, ConceptAssertion, Name};
use crate::tableau::{Asn, Engine, NodeId, NodeKind, NodeLabel, TableauGraph};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("no consistent marking: the problem is unsatisfiable")]
    NoMarking,
    #[error("marking is not consistent")]
    InconsistentMarking,
    #[error("no value satisfies {0}")]
    Infeasible(String),
    #[error("saturation path from node {from} to {to} loses {assertion}")]
    SatPath {
        from: NodeId,
        to: NodeId,
        assertion: String,
    },
    #[error("extracted model fails verification: {0}")]
    Verification(String),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

/// A verified model together with where the query and the ABox
/// individuals live in it.
#[derive(Debug, Clone)]
pub struct ExtractedModel {
    pub interpretation: Interpretation,
    /// The individual satisfying the query.
    pub designated: usize,
    /// Named ABox individuals and their domain index.
    pub named: Vec<(Name, usize)>,
}

/// A closed or open bound `op c` on a single value.
pub type Bound = (CmpOp, Rational);

fn describe(bounds: &[Bound]) -> String {
    let parts: Vec<String> = bounds.iter().map(|(op, c)| format!("{op} {c}")).collect();
    format!("{{{}}}", parts.join(", "))
}

/// The deterministic value choice: intersect `[0,1]` with all bounds, then
/// take the lower end if it is attained, else the upper end if attained,
/// else the midpoint.
pub fn choose_value(bounds: &[Bound]) -> Result<Rational, ModelError> {
    let (mut lo, mut lo_strict) = (Rational::zero(), false);
    let (mut hi, mut hi_strict) = (Rational::one(), false);
    for (op, c) in bounds {
        let strict = op.is_strict();
        if op.is_greater() {
            if *c > lo || (*c == lo && strict) {
                lo = c.clone();
                lo_strict = strict;
            }
        } else if *c < hi || (*c == hi && strict) {
            hi = c.clone();
            hi_strict = strict;
        }
    }
    let feasible = lo < hi || (lo == hi && !lo_strict && !hi_strict);
    if !feasible {
        return Err(ModelError::Infeasible(describe(bounds)));
    }
    let v = if !lo_strict {
        lo
    } else if !hi_strict {
        hi
    } else {
        lo.midpoint(&hi)
    };
    debug_assert!(bounds.iter().all(|(op, c)| op.holds(&v, c)));
    Ok(v)
}

/// Value of an atomic concept at an individual from the bounds on it.
pub fn choose_atomic_value(bounds: &[Bound]) -> Result<Rational, ModelError> {
    choose_value(bounds)
}

/// Degree of a role edge: at least the existential bounds it has to carry,
/// at most the universal bounds the successor does not discharge itself.
pub fn choose_role_value(lower: &[Bound], upper: &[Bound]) -> Result<Rational, ModelError> {
    let all: Vec<Bound> = lower.iter().chain(upper).cloned().collect();
    choose_value(&all)
}

/// Endpoint of every sequent node of the marking: follow chosen OR-children
/// until an AND-node.
pub fn saturation_endpoints(g: &TableauGraph, m: &Marking) -> BTreeMap<NodeId, NodeId> {
    let mut end: BTreeMap<NodeId, NodeId> = BTreeMap::new();
    for &v in &m.nodes {
        if !matches!(g.node(v).label, NodeLabel::Seq(_)) || end.contains_key(&v) {
            continue;
        }
        let mut path = vec![v];
        let mut u = v;
        let target = loop {
            if let Some(&e) = end.get(&u) {
                break e;
            }
            match g.node(u).kind {
                NodeKind::And => break u,
                NodeKind::Or => {
                    u = m.choice[&u];
                    path.push(u);
                }
                NodeKind::Bottom | NodeKind::Pending => unreachable!("consistent marking"),
            }
        };
        for p in path {
            end.insert(p, target);
        }
    }
    end
}

fn seq_label(g: &TableauGraph, v: NodeId) -> &[Asn] {
    match &g.node(v).label {
        NodeLabel::Seq(l) => l,
        _ => panic!("node {v} is not a sequent node"),
    }
}

/// Atomic and restriction assertions are never consumed by a rule, so they
/// must reappear at the endpoint of every saturation path.
fn check_sat_paths(
    engine: &Engine,
    g: &TableauGraph,
    end: &BTreeMap<NodeId, NodeId>,
) -> Result<(), ModelError> {
    use crate::tableau::Node;
    for (&v, &x) in end {
        let target = seq_label(g, x);
        for &a in seq_label(g, v) {
            let kept = matches!(engine.arena().node(a.concept), Node::Atom(_) | Node::Exists(..));
            if kept && target.binary_search(&a).is_err() {
                return Err(ModelError::SatPath {
                    from: v,
                    to: x,
                    assertion: engine.to_assertion(a).to_string(),
                });
            }
        }
    }
    Ok(())
}

struct Element {
    node: NodeId,
    name: Option<Name>,
    y: BTreeSet<Asn>,
}

/// Builds and verifies the model of a satisfiable solution.
pub fn extract_model(sol: &Solution) -> Result<ExtractedModel, ModelError> {
    let m = sol.marking.as_ref().ok_or(ModelError::NoMarking)?;
    let (engine, g) = (&sol.engine, &sol.graph);
    if !m.is_consistent(g) {
        return Err(ModelError::InconsistentMarking);
    }
    let end = saturation_endpoints(g, m);
    check_sat_paths(engine, g, &end)?;

    let mut y_of: HashMap<NodeId, BTreeSet<Asn>> = HashMap::new();
    for (&v, &x) in &end {
        y_of.entry(x).or_default().extend(seq_label(g, v).iter().copied());
    }

    let mut elements: Vec<Element> = Vec::new();
    let mut unnamed: HashMap<NodeId, usize> = HashMap::new();
    let mut add_unnamed = |elements: &mut Vec<Element>, x: NodeId| -> usize {
        *unnamed.entry(x).or_insert_with(|| {
            elements.push(Element {
                node: x,
                name: None,
                y: y_of[&x].clone(),
            });
            elements.len() - 1
        })
    };
    let designated = add_unnamed(&mut elements, end[&g.query_root()]);

    // named individuals: follow the tuple chain, collecting each
    // individual's labels along the way
    let mut named = Vec::new();
    if let (Some(root), Some(seed)) = (g.abox_root(), engine.abox()) {
        let mut ys: Vec<BTreeSet<Asn>> = vec![BTreeSet::new(); seed.individuals.len()];
        let mut u = root;
        loop {
            let NodeLabel::Tuple(t) = &g.node(u).label else {
                unreachable!("tuple chain")
            };
            for (y, l) in ys.iter_mut().zip(t.labels.iter()) {
                y.extend(l.iter().copied());
            }
            match g.node(u).kind {
                NodeKind::Or => u = m.choice[&u],
                NodeKind::And => break,
                _ => unreachable!("consistent marking"),
            }
        }
        let kids = g.node(u).children.clone();
        for ((name, mut y), kid) in seed.individuals.iter().zip(ys).zip(kids) {
            // the split child is a sequent whose own saturation gives the
            // individual's successors
            let node = end[&kid];
            y.extend(y_of[&node].iter().copied());
            named.push((name.clone(), elements.len()));
            elements.push(Element {
                node,
                name: Some(name.clone()),
                y,
            });
        }
    }

    // successors, breadth first; role edges as (role, from, to) -> bounds
    let mut lower: BTreeMap<(Name, usize, usize), Vec<Bound>> = BTreeMap::new();
    let mut i = 0;
    while i < elements.len() {
        let x = elements[i].node;
        let node = g.node(x);
        for (&child, w) in node.children.iter().zip(&node.witnesses) {
            let j = add_unnamed(&mut elements, end[&child]);
            let crate::tableau::Node::Exists(role, _) = engine.arena().node(w.concept) else {
                unreachable!("witnesses are existential restrictions")
            };
            lower
                .entry((engine.arena().role_name(role).clone(), i, j))
                .or_default()
                .push((w.op, engine.value(w.threshold)));
        }
        i += 1;
    }
    if let Some(seed) = engine.abox() {
        for e in &seed.edges {
            let (from, to) = (named[e.from].1, named[e.to].1);
            lower
                .entry((e.role.clone(), from, to))
                .or_default()
                .push((e.op, engine.value(e.threshold)));
        }
    }

    // domain names: ABox names, then fresh names for the rest
    let taken: BTreeSet<&str> = elements.iter().filter_map(|e| e.name.as_deref()).collect();
    let names: Vec<String> = elements
        .iter()
        .map(|e| match &e.name {
            Some(n) => n.to_string(),
            None => {
                let mut n = format!("n{}", e.node);
                while taken.contains(n.as_str()) {
                    n.push('_');
                }
                n
            }
        })
        .collect();
    let mut interp = Interpretation::new(&names)?;

    let arena = engine.arena();
    let mut atoms: BTreeSet<Name> = arena.atoms().iter().cloned().collect();
    {
        let p = &sol.problem;
        let mut collect = |c: &crate::syntax::Concept| c.atoms(&mut atoms);
        p.query.iter().for_each(|a| collect(&a.concept));
        p.tbox.gcis.iter().for_each(|gci| {
            collect(&gci.lhs);
            collect(&gci.rhs);
        });
        p.abox.concept_assertions.iter().for_each(|a| collect(&a.assertion.concept));
    }
    for a in &atoms {
        interp.declare_atom(a);
    }
    for (x, e) in elements.iter().enumerate() {
        let mut per_atom: BTreeMap<&Name, Vec<Bound>> = BTreeMap::new();
        for a in &e.y {
            if let crate::tableau::Node::Atom(p) = arena.node(a.concept) {
                per_atom
                    .entry(arena.atom_name(p))
                    .or_default()
                    .push((a.op, engine.value(a.threshold)));
            }
        }
        for (p, bounds) in per_atom {
            interp.set_atom(p, x, choose_atomic_value(&bounds)?)?;
        }
    }
    for ((role, x, y), lows) in &lower {
        let role_id = arena.roles().iter().position(|r| r == role);
        let mut ups = Vec::new();
        for u in &elements[*x].y {
            if !u.op.is_less() {
                continue;
            }
            if let crate::tableau::Node::Exists(r, d) = arena.node(u.concept) {
                let body = Asn {
                    concept: d,
                    op: u.op,
                    threshold: u.threshold,
                };
                if Some(r as usize) == role_id && !elements[*y].y.contains(&body) {
                    ups.push((u.op, engine.value(u.threshold)));
                }
            }
        }
        interp.set_role(role, *x, *y, choose_role_value(lows, &ups)?)?;
    }

    verify(sol, &elements, &interp, designated, &named)?;
    Ok(ExtractedModel {
        interpretation: interp,
        designated,
        named,
    })
}

fn verify(
    sol: &Solution,
    elements: &[Element],
    interp: &Interpretation,
    designated: usize,
    named: &[(Name, usize)],
) -> Result<(), ModelError> {
    let engine = &sol.engine;
    let fail = |what: String| Err(ModelError::Verification(what));
    let ys: Vec<Vec<ConceptAssertion>> = elements
        .iter()
        .map(|e| e.y.iter().map(|&a| engine.to_assertion(a)).collect())
        .collect();
    let mut ev = Evaluator::new(interp);
    for (x, y) in ys.iter().enumerate() {
        for a in y {
            if !ev.holds(x, a) {
                return fail(format!("{a} at {}", interp.name(x)));
            }
        }
    }
    let p = &sol.problem;
    for a in p.query.iter() {
        if !interp.satisfies_assertion(designated, a) {
            return fail(format!("query {a} at {}", interp.name(designated)));
        }
    }
    let index: HashMap<&str, usize> = named.iter().map(|(n, i)| (&**n, *i)).collect();
    for a in &p.abox.concept_assertions {
        if !interp.satisfies_assertion(index[&*a.individual], &a.assertion) {
            return fail(a.to_string());
        }
    }
    for r in &p.abox.role_assertions {
        let v = interp.role_value(&r.role, index[&*r.from], index[&*r.to]);
        if !r.op.holds(&v, &r.threshold) {
            return fail(r.to_string());
        }
    }
    if !check_tbox(interp, &p.tbox) {
        return fail("TBox".to_string());
    }
    Ok(())
}
