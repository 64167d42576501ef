use std::collections::VecDeque;
use std::fmt::Write;
use std::sync::Arc;

use rustc_hash::FxHashMap;

use super::{Asn, Engine, Label, Rule};

pub type NodeId = usize;

/// A node label: ⊥, a sequent, or the joint state of all named
/// individuals of an ABox.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum NodeLabel {
    Bottom,
    Seq(Label),
    Tuple(Tuple),
}

/// Per named individual: its current label, and everything it has already
/// received along role edges (so that a universal body that was decomposed
/// by saturation is not sent again).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Tuple {
    pub labels: Arc<[Label]>,
    pub received: Arc<[Label]>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeKind {
    /// Not expanded yet (only during on-the-fly construction).
    Pending,
    Bottom,
    Or,
    And,
}

#[derive(Clone, Debug)]
pub struct GraphNode {
    pub label: NodeLabel,
    pub kind: NodeKind,
    pub rule: Option<Rule>,
    pub children: Vec<NodeId>,
    /// For sequent AND-nodes: the existential restriction behind each child.
    pub witnesses: Vec<Asn>,
}

impl GraphNode {
    pub fn is_leaf_and(&self) -> bool {
        self.kind == NodeKind::And && self.children.is_empty()
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            NodeKind::Pending => "PENDING",
            NodeKind::Bottom => "BOTTOM",
            NodeKind::Or => "OR",
            NodeKind::And if self.children.is_empty() => "LEAF-AND",
            NodeKind::And => "AND",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    pub nodes: usize,
    pub expansions: usize,
    pub cache_hits: usize,
    pub edges: usize,
}

/// And-or graph with one node per distinct label.
#[derive(Clone, Debug)]
pub struct TableauGraph {
    nodes: Vec<GraphNode>,
    parents: Vec<Vec<NodeId>>,
    cache: FxHashMap<NodeLabel, NodeId>,
    roots: Vec<NodeId>,
    query_root: NodeId,
    abox_root: Option<NodeId>,
    stats: Stats,
}

impl TableauGraph {
    /// A graph holding only the unexpanded roots: the query root first,
    /// then the ABox root if there is an ABox.
    pub fn with_roots(engine: &Engine) -> TableauGraph {
        let mut g = TableauGraph {
            nodes: Vec::new(),
            parents: Vec::new(),
            cache: FxHashMap::default(),
            roots: Vec::new(),
            query_root: 0,
            abox_root: None,
            stats: Stats::default(),
        };
        let q = match engine.query_label() {
            Some(l) => NodeLabel::Seq(l.clone()),
            None => NodeLabel::Bottom,
        };
        g.query_root = g.node_for(q).0;
        g.roots.push(g.query_root);
        if let Some(seed) = engine.abox() {
            let edge_ok = seed.edges.iter().all(|e| !super::holds(e.op.toggle(), e.threshold, engine.one()));
            let label = match seed.labels.iter().cloned().collect::<Option<Vec<Label>>>() {
                Some(ls) if edge_ok => {
                    let empty: Label = Arc::from(Vec::new());
                    NodeLabel::Tuple(Tuple {
                        received: vec![empty; ls.len()].into(),
                        labels: ls.into(),
                    })
                }
                _ => NodeLabel::Bottom,
            };
            let id = g.node_for(label).0;
            g.abox_root = Some(id);
            g.roots.push(id);
        }
        g.stats.cache_hits = 0;
        g
    }

    /// Looks a label up in the cache, creating a pending node if it is new.
    pub fn node_for(&mut self, label: NodeLabel) -> (NodeId, bool) {
        if let Some(&id) = self.cache.get(&label) {
            self.stats.cache_hits += 1;
            return (id, false);
        }
        let id = self.nodes.len();
        let kind = if label == NodeLabel::Bottom {
            NodeKind::Bottom
        } else {
            NodeKind::Pending
        };
        self.cache.insert(label.clone(), id);
        self.nodes.push(GraphNode {
            label,
            kind,
            rule: None,
            children: Vec::new(),
            witnesses: Vec::new(),
        });
        self.parents.push(Vec::new());
        self.stats.nodes += 1;
        (id, true)
    }

    /// Applies the calculus to a pending node. Returns the ids of children
    /// that were newly created.
    pub fn expand(&mut self, engine: &Engine, id: NodeId) -> Vec<NodeId> {
        if self.nodes[id].kind != NodeKind::Pending {
            return Vec::new();
        }
        self.stats.expansions += 1;
        let (kind, rule, labels, witnesses) = match &self.nodes[id].label {
            NodeLabel::Bottom => unreachable!("⊥ nodes are never pending"),
            NodeLabel::Seq(l) => expand_seq(engine, l),
            NodeLabel::Tuple(t) => expand_tuple(engine, t),
        };
        let mut fresh = Vec::new();
        let mut children = Vec::with_capacity(labels.len());
        for label in labels {
            let (child, new) = self.node_for(label);
            if new {
                fresh.push(child);
            }
            if !self.parents[child].contains(&id) {
                self.parents[child].push(id);
            }
            children.push(child);
        }
        self.stats.edges += children.len();
        let node = &mut self.nodes[id];
        node.kind = kind;
        node.rule = Some(rule);
        node.children = children;
        node.witnesses = witnesses;
        fresh
    }

    pub fn nodes(&self) -> &[GraphNode] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &GraphNode {
        &self.nodes[id]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn parents(&self, id: NodeId) -> &[NodeId] {
        &self.parents[id]
    }

    pub fn roots(&self) -> &[NodeId] {
        &self.roots
    }

    pub fn query_root(&self) -> NodeId {
        self.query_root
    }

    pub fn abox_root(&self) -> Option<NodeId> {
        self.abox_root
    }

    pub fn bottom(&self) -> Option<NodeId> {
        self.cache.get(&NodeLabel::Bottom).copied()
    }

    pub fn lookup(&self, label: &NodeLabel) -> Option<NodeId> {
        self.cache.get(label).copied()
    }

    pub fn stats(&self) -> Stats {
        self.stats
    }

    pub fn is_complete(&self) -> bool {
        self.nodes.iter().all(|n| n.kind != NodeKind::Pending)
    }

    /// True when no two nodes carry the same label.
    pub fn labels_injective(&self) -> bool {
        let mut seen = FxHashMap::default();
        self.nodes.iter().all(|n| seen.insert(&n.label, ()).is_none())
    }

    /// One line per node: id, kind, rule, children and label.
    pub fn dump(&self, engine: &Engine) -> String {
        let mut out = String::new();
        for (id, n) in self.nodes.iter().enumerate() {
            let kids: Vec<String> = n.children.iter().map(|c| c.to_string()).collect();
            let label = match &n.label {
                NodeLabel::Bottom => "⊥".to_string(),
                NodeLabel::Seq(l) => engine.label_to_string(l),
                NodeLabel::Tuple(t) => {
                    let ls = &t.labels;
                    let names = &engine.abox().expect("tuple nodes need an ABox").individuals;
                    let parts: Vec<String> = names
                        .iter()
                        .zip(ls.iter())
                        .map(|(name, l)| format!("{name}: {}", engine.label_to_string(l)))
                        .collect();
                    format!("[{}]", parts.join("; "))
                }
            };
            let rule = n.rule.map_or("-", |r| r.name());
            let _ = writeln!(
                out,
                "node {id} {} rule={rule} children=[{}] label={label}",
                n.kind_name(),
                kids.join(", ")
            );
        }
        out
    }
}

type Expansion = (NodeKind, Rule, Vec<NodeLabel>, Vec<Asn>);

fn seq_or_bottom(l: Option<Label>) -> NodeLabel {
    l.map_or(NodeLabel::Bottom, NodeLabel::Seq)
}

fn expand_seq(engine: &Engine, label: &Label) -> Expansion {
    if let Some((rule, concl)) = engine.apply_propositional(label) {
        let kids = concl.into_iter().map(seq_or_bottom).collect();
        return (NodeKind::Or, rule, kids, Vec::new());
    }
    let (witnesses, kids): (Vec<Asn>, Vec<NodeLabel>) = engine
        .exists_children(label)
        .into_iter()
        .map(|(w, l)| (w, seq_or_bottom(l)))
        .unzip();
    (NodeKind::And, Rule::Exists, kids, witnesses)
}

/// Tuple nodes first saturate each individual in turn, then push
/// universal restrictions along asserted role edges, and finally split
/// into one sequent node per individual.
fn expand_tuple(engine: &Engine, t: &Tuple) -> Expansion {
    let labels = &t.labels;
    let replace = |i: usize, l: Option<Label>| match l {
        None => NodeLabel::Bottom,
        Some(l) => {
            let mut v: Vec<Label> = labels.to_vec();
            v[i] = l;
            NodeLabel::Tuple(Tuple {
                labels: v.into(),
                received: t.received.clone(),
            })
        }
    };
    for (i, l) in labels.iter().enumerate() {
        if let Some((rule, concl)) = engine.apply_propositional(l) {
            let kids = concl.into_iter().map(|c| replace(i, c)).collect();
            return (NodeKind::Or, rule, kids, Vec::new());
        }
    }
    let seed = engine.abox().expect("tuple nodes need an ABox");
    for e in &seed.edges {
        let Some(role) = e.role_id else { continue };
        let got = &t.received[e.to];
        let missing: Vec<Asn> = engine
            .kept_universals(&labels[e.from], role, e.op, e.threshold)
            .filter(|a| got.binary_search(a).is_err())
            .collect();
        if !missing.is_empty() {
            let mut v = labels[e.to].to_vec();
            v.extend(missing.iter().copied());
            let mut r = got.to_vec();
            r.extend(missing);
            r.sort_unstable();
            r.dedup();
            let kid = match engine.canonical(v) {
                None => NodeLabel::Bottom,
                Some(l) => {
                    let mut ls: Vec<Label> = labels.to_vec();
                    ls[e.to] = l;
                    let mut rs: Vec<Label> = t.received.to_vec();
                    rs[e.to] = r.into();
                    NodeLabel::Tuple(Tuple {
                        labels: ls.into(),
                        received: rs.into(),
                    })
                }
            };
            return (NodeKind::Or, Rule::AboxEdge, vec![kid], Vec::new());
        }
    }
    let kids = labels.iter().map(|l| NodeLabel::Seq(l.clone())).collect();
    (NodeKind::And, Rule::AboxSplit, kids, Vec::new())
}

/// Expands every node reachable from the roots, breadth first.
pub fn build_tableau(engine: &Engine) -> TableauGraph {
    let mut g = TableauGraph::with_roots(engine);
    let mut queue: VecDeque<NodeId> = g.roots().iter().copied().collect();
    while let Some(id) = queue.pop_front() {
        queue.extend(g.expand(engine, id));
    }
    debug_assert!(g.is_complete());
    g
}
