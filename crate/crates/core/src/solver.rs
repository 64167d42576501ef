//! Deciding a tableau graph: least-fixpoint propagation of unsatisfiability
//! (batch), the interleaved on-the-fly variant, and markings.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::syntax::{ABox, ConceptAssertion, Sequent, TBox};
use crate::tableau::{build_tableau, EngineError, Engine, NodeId, NodeKind, TableauGraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Sat,
    Unsat,
}

/// Per-node outcome of on-the-fly solving.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Status {
    Unknown,
    Sat,
    Unsat,
}

/// A sub-graph containing the roots, all children of its AND-nodes and one
/// chosen child of each of its OR-nodes.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Marking {
    pub nodes: BTreeSet<NodeId>,
    pub choice: BTreeMap<NodeId, NodeId>,
}

impl Marking {
    /// The closure conditions, plus absence of ⊥ and of unexpanded nodes.
    pub fn is_consistent(&self, g: &TableauGraph) -> bool {
        g.roots().iter().all(|r| self.nodes.contains(r))
            && self.nodes.iter().all(|&v| {
                let n = g.node(v);
                match n.kind {
                    NodeKind::Pending | NodeKind::Bottom => false,
                    NodeKind::And => n.children.iter().all(|c| self.nodes.contains(c)),
                    NodeKind::Or => self
                        .choice
                        .get(&v)
                        .is_some_and(|c| n.children.contains(c) && self.nodes.contains(c)),
                }
            })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub nodes: usize,
    pub expansions: usize,
    pub cache_hits: usize,
    pub queue_ops: usize,
}

/// The input of one run: a query sequent, a TBox and an optional ABox.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Problem {
    pub query: Sequent,
    pub tbox: TBox,
    pub abox: ABox,
}

impl Problem {
    pub fn new(query: Sequent, tbox: TBox) -> Problem {
        Problem {
            query,
            tbox,
            abox: ABox::default(),
        }
    }

    pub fn with_abox(mut self, abox: ABox) -> Problem {
        self.abox = abox;
        self
    }
}

/// Batch construction followed by propagation, or interleaved expansion.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Mode {
    #[default]
    Batch,
    OnTheFly,
}

/// Result of one solver run. The graph is kept for model extraction and
/// diagnostics.
#[derive(Debug)]
pub struct Solution {
    pub verdict: Verdict,
    pub problem: Problem,
    pub engine: Engine,
    pub graph: TableauGraph,
    pub marking: Option<Marking>,
    pub stats: SolveStats,
}

/// Algorithm 1: the least set containing ⊥ and closed under "an AND-node
/// with an unsatisfiable child" and "an OR-node whose children are all
/// unsatisfiable". Returns membership per node and the number of queue
/// operations.
pub fn compute_unsat(g: &TableauGraph) -> (Vec<bool>, usize) {
    let n = g.len();
    let mut unsat = vec![false; n];
    let mut remaining: Vec<usize> = g
        .nodes()
        .iter()
        .map(|node| {
            let mut kids = node.children.clone();
            kids.sort_unstable();
            kids.dedup();
            kids.len()
        })
        .collect();
    let mut queue = VecDeque::new();
    let mut ops = 0;
    if let Some(b) = g.bottom() {
        unsat[b] = true;
        queue.push_back(b);
        ops += 1;
    }
    while let Some(u) = queue.pop_front() {
        ops += 1;
        for &p in g.parents(u) {
            if unsat[p] {
                continue;
            }
            let joins = match g.node(p).kind {
                NodeKind::And => true,
                NodeKind::Or => {
                    remaining[p] -= 1;
                    remaining[p] == 0
                }
                NodeKind::Bottom | NodeKind::Pending => false,
            };
            if joins {
                unsat[p] = true;
                queue.push_back(p);
                ops += 1;
            }
        }
    }
    (unsat, ops)
}

/// The same fixpoint by repeated sweeps over all nodes.
pub fn compute_unsat_naive(g: &TableauGraph) -> Vec<bool> {
    let mut unsat = vec![false; g.len()];
    loop {
        let mut changed = false;
        for (v, node) in g.nodes().iter().enumerate() {
            if unsat[v] {
                continue;
            }
            let now = match node.kind {
                NodeKind::Bottom => true,
                NodeKind::And => node.children.iter().any(|&c| unsat[c]),
                NodeKind::Or => node.children.iter().all(|&c| unsat[c]),
                NodeKind::Pending => false,
            };
            if now {
                unsat[v] = true;
                changed = true;
            }
        }
        if !changed {
            return unsat;
        }
    }
}

/// All nodes reachable from the roots through nodes accepted by `usable`,
/// taking every AND-child and the first usable OR-child (preferring
/// `preferred` ones).
fn marking_from(
    g: &TableauGraph,
    usable: impl Fn(NodeId) -> bool,
    preferred: impl Fn(NodeId) -> bool,
) -> Marking {
    let mut m = Marking::default();
    let mut stack: Vec<NodeId> = g.roots().to_vec();
    while let Some(v) = stack.pop() {
        if !m.nodes.insert(v) {
            continue;
        }
        let node = g.node(v);
        match node.kind {
            NodeKind::And => stack.extend(node.children.iter().rev().copied()),
            NodeKind::Or => {
                let pick = node
                    .children
                    .iter()
                    .copied()
                    .find(|&c| preferred(c))
                    .or_else(|| node.children.iter().copied().find(|&c| usable(c)))
                    .expect("a satisfiable OR-node has a satisfiable child");
                m.choice.insert(v, pick);
                stack.push(pick);
            }
            NodeKind::Bottom | NodeKind::Pending => {
                unreachable!("marking reached an unusable node")
            }
        }
    }
    m
}

fn run_batch(engine: Engine, problem: Problem) -> Solution {
    let graph = build_tableau(&engine);
    let (unsat, queue_ops) = compute_unsat(&graph);
    let sat = graph.roots().iter().all(|&r| !unsat[r]);
    let marking = sat.then(|| marking_from(&graph, |v| !unsat[v], |v| !unsat[v]));
    let gs = graph.stats();
    Solution {
        verdict: if sat { Verdict::Sat } else { Verdict::Unsat },
        stats: SolveStats {
            nodes: gs.nodes,
            expansions: gs.expansions,
            cache_hits: gs.cache_hits,
            queue_ops,
        },
        problem,
        engine,
        graph,
        marking,
    }
}

/// Decides a problem with the given construction mode.
pub fn solve(problem: Problem, mode: Mode) -> Result<Solution, EngineError> {
    let engine = Engine::new(&problem.tbox, &problem.query, &problem.abox)?;
    Ok(match mode {
        Mode::Batch => run_batch(engine, problem),
        Mode::OnTheFly => run_on_the_fly(engine, problem),
    })
}

/// Batch decision: build the whole graph, then propagate.
pub fn is_satisfiable(query: &Sequent, tbox: &TBox) -> Result<Solution, EngineError> {
    solve(Problem::new(query.clone(), tbox.clone()), Mode::Batch)
}

/// `C ⋈ c` is valid iff its negation is unsatisfiable; the returned
/// solution is for the negation, so `Verdict::Unsat` means valid.
pub fn is_valid(assertion: &ConceptAssertion, tbox: &TBox) -> Result<Solution, EngineError> {
    is_valid_with(assertion, tbox, Mode::Batch)
}

pub fn is_valid_with(
    assertion: &ConceptAssertion,
    tbox: &TBox,
    mode: Mode,
) -> Result<Solution, EngineError> {
    solve(
        Problem::new(Sequent::new([assertion.negated()]), tbox.clone()),
        mode,
    )
}

struct OnTheFly<'e> {
    engine: &'e Engine,
    g: TableauGraph,
    status: Vec<Status>,
    queue_ops: usize,
}

impl OnTheFly<'_> {
    fn status(&self, v: NodeId) -> Status {
        self.status.get(v).copied().unwrap_or(Status::Unknown)
    }

    fn sync(&mut self) {
        self.status.resize(self.g.len(), Status::Unknown);
    }

    fn evaluate(&self, v: NodeId) -> Status {
        let node = self.g.node(v);
        let st = |c: &NodeId| self.status(*c);
        match node.kind {
            NodeKind::Pending => Status::Unknown,
            NodeKind::Bottom => Status::Unsat,
            NodeKind::Or => {
                if node.children.iter().any(|c| st(c) == Status::Sat) {
                    Status::Sat
                } else if node.children.iter().all(|c| st(c) == Status::Unsat) {
                    Status::Unsat
                } else {
                    Status::Unknown
                }
            }
            NodeKind::And => {
                if node.children.iter().any(|c| st(c) == Status::Unsat) {
                    Status::Unsat
                } else if node.children.iter().all(|c| st(c) == Status::Sat) {
                    Status::Sat
                } else {
                    Status::Unknown
                }
            }
        }
    }

    /// Re-evaluates `v` and, on a change, its ancestors.
    fn settle(&mut self, v: NodeId) {
        let mut work = vec![v];
        while let Some(u) = work.pop() {
            self.queue_ops += 1;
            if self.status(u) != Status::Unknown {
                continue;
            }
            let s = self.evaluate(u);
            if s != Status::Unknown {
                self.status[u] = s;
                work.extend(self.g.parents(u).iter().copied());
            }
        }
    }

    fn relevant(&self, v: NodeId) -> bool {
        self.g.roots().contains(&v)
            || self.g.parents(v).iter().any(|&p| self.status(p) == Status::Unknown)
    }

    fn roots_decided(&self) -> bool {
        let rs = self.g.roots();
        rs.iter().any(|&r| self.status(r) == Status::Unsat)
            || rs.iter().all(|&r| self.status(r) == Status::Sat)
    }

    fn run(&mut self) {
        self.sync();
        for r in self.g.roots().to_vec() {
            self.settle(r);
        }
        let mut stack: Vec<NodeId> = self.g.roots().iter().rev().copied().collect();
        while !self.roots_decided() {
            let Some(v) = stack.pop() else { break };
            if self.g.node(v).kind != NodeKind::Pending || !self.relevant(v) {
                continue;
            }
            self.g.expand(self.engine, v);
            self.sync();
            let children = self.g.node(v).children.clone();
            for &c in &children {
                if self.g.node(c).kind == NodeKind::Bottom {
                    self.settle(c);
                }
            }
            self.settle(v);
            for &c in children.iter().rev() {
                if self.g.node(c).kind == NodeKind::Pending {
                    stack.push(c);
                }
            }
        }
    }
}

/// Expands depth first and decides nodes as soon as their children allow;
/// stops once every root is decided. Undecided nodes left when nothing is
/// pending are satisfiable: they lie outside the least fixpoint.
pub fn solve_on_the_fly(query: &Sequent, tbox: &TBox) -> Result<Solution, EngineError> {
    solve(Problem::new(query.clone(), tbox.clone()), Mode::OnTheFly)
}

fn run_on_the_fly(engine: Engine, problem: Problem) -> Solution {
    let (graph, status, queue_ops) = {
        let mut otf = OnTheFly {
            engine: &engine,
            g: TableauGraph::with_roots(&engine),
            status: Vec::new(),
            queue_ops: 0,
        };
        otf.run();
        otf.sync();
        (otf.g, otf.status, otf.queue_ops)
    };
    let sat = graph.roots().iter().all(|&r| status[r] != Status::Unsat);
    let marking = sat.then(|| {
        marking_from(
            &graph,
            |v| status[v] != Status::Unsat && graph.node(v).kind != NodeKind::Pending,
            |v| status[v] == Status::Sat,
        )
    });
    let gs = graph.stats();
    Solution {
        verdict: if sat { Verdict::Sat } else { Verdict::Unsat },
        stats: SolveStats {
            nodes: gs.nodes,
            expansions: gs.expansions,
            cache_hits: gs.cache_hits,
            queue_ops,
        },
        problem,
        engine,
        graph,
        marking,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_assertion, parse_gci};

    fn seq(items: &[&str]) -> Sequent {
        items.iter().map(|s| parse_assertion(s).unwrap()).collect()
    }

    fn tbox(items: &[&str]) -> TBox {
        TBox::new(items.iter().map(|s| parse_gci(s).unwrap()).collect())
    }

    #[test]
    fn contradiction_is_unsat() {
        let s = is_satisfiable(&seq(&["A >= 1", "A < 1"]), &TBox::empty()).unwrap();
        assert_eq!(s.verdict, Verdict::Unsat);
        assert!(s.marking.is_none());
        let s = solve_on_the_fly(&seq(&["A >= 1", "A < 1"]), &TBox::empty()).unwrap();
        assert_eq!(s.verdict, Verdict::Unsat);
        assert_eq!(s.stats.expansions, 1);
    }

    #[test]
    fn or_root_with_one_bad_branch() {
        let s = is_satisfiable(&seq(&["A & B <= 1/2", "A >= 1"]), &TBox::empty()).unwrap();
        assert_eq!(s.verdict, Verdict::Sat);
        let (unsat, _) = compute_unsat(&s.graph);
        assert_eq!(unsat, compute_unsat_naive(&s.graph));
        assert!(s.marking.unwrap().is_consistent(&s.graph));
    }

    #[test]
    fn shifted_tbox_example() {
        let t = tbox(&["A (-) 0.2 [= B (-) 0.3"]);
        let s = is_satisfiable(&seq(&["A >= 1/2", "B < 3/5"]), &t).unwrap();
        assert_eq!(s.verdict, Verdict::Unsat);
        let s = is_satisfiable(&seq(&["A >= 1/2", "B >= 3/5"]), &t).unwrap();
        assert_eq!(s.verdict, Verdict::Sat);
        let o = solve_on_the_fly(&seq(&["A >= 1/2", "B >= 3/5"]), &t).unwrap();
        assert_eq!(o.verdict, Verdict::Sat);
        assert!(o.marking.unwrap().is_consistent(&o.graph));
    }

    #[test]
    fn nonnegative_values_are_valid() {
        let t = tbox(&["A [= some R . B"]);
        let s = is_valid(&parse_assertion("A & !B >= 0").unwrap(), &t).unwrap();
        assert_eq!(s.verdict, Verdict::Unsat);
    }
}
