//! Hash-consed core concepts with ids in canonical order.
//!
//! All concepts a tableau can ever mention are subconcepts of the root
//! labels, so the arena is filled once and frozen. Ids are then reassigned
//! so that comparing ids compares printed forms lexicographically.

use std::sync::Arc;

use rustc_hash::FxHashMap;

use crate::rational::Rational;
use crate::syntax::{Concept, Name};

pub type ConceptId = u32;

/// A core concept node whose children are arena ids. Constants are kept as
/// integer multiples of the engine's unit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    Atom(u32),
    Const(i64),
    Not(ConceptId),
    Minus(ConceptId, i64),
    And(ConceptId, ConceptId),
    Exists(u32, ConceptId),
}

#[derive(Debug)]
pub struct ConceptArena {
    nodes: Vec<Node>,
    sizes: Vec<u64>,
    trees: Vec<Arc<Concept>>,
    atoms: Vec<Name>,
    roles: Vec<Name>,
    lookup: FxHashMap<Arc<Concept>, ConceptId>,
}

/// Collects concepts before freezing.
pub(crate) struct ArenaBuilder<'u> {
    nodes: Vec<Node>,
    trees: Vec<Arc<Concept>>,
    keys: FxHashMap<Node, ConceptId>,
    atoms: Vec<Name>,
    atom_ids: FxHashMap<Name, u32>,
    roles: Vec<Name>,
    role_ids: FxHashMap<Name, u32>,
    to_units: &'u dyn Fn(&Rational) -> i64,
}

impl<'u> ArenaBuilder<'u> {
    pub(crate) fn new(to_units: &'u dyn Fn(&Rational) -> i64) -> Self {
        ArenaBuilder {
            nodes: Vec::new(),
            trees: Vec::new(),
            keys: FxHashMap::default(),
            atoms: Vec::new(),
            atom_ids: FxHashMap::default(),
            roles: Vec::new(),
            role_ids: FxHashMap::default(),
            to_units,
        }
    }

    fn name_id(names: &mut Vec<Name>, ids: &mut FxHashMap<Name, u32>, n: &Name) -> u32 {
        *ids.entry(n.clone()).or_insert_with(|| {
            names.push(n.clone());
            (names.len() - 1) as u32
        })
    }

    /// Interns a core concept and all its subconcepts.
    pub(crate) fn intern(&mut self, c: &Concept) -> ConceptId {
        let node = match c {
            Concept::Atom(a) => Node::Atom(Self::name_id(&mut self.atoms, &mut self.atom_ids, a)),
            Concept::Const(k) => Node::Const((self.to_units)(k)),
            Concept::Not(d) => Node::Not(self.intern(d)),
            Concept::Minus(d, k) => {
                let d = self.intern(d);
                Node::Minus(d, (self.to_units)(k))
            }
            Concept::And(a, b) => {
                let a = self.intern(a);
                let b = self.intern(b);
                Node::And(a, b)
            }
            Concept::Exists(r, d) => {
                let r = Self::name_id(&mut self.roles, &mut self.role_ids, r);
                Node::Exists(r, self.intern(d))
            }
            Concept::Or(..) | Concept::Plus(..) | Concept::Forall(..) => {
                panic!("arena holds core concepts only; desugar first")
            }
        };
        if let Some(&id) = self.keys.get(&node) {
            return id;
        }
        let tree = match node {
            Node::Atom(_) | Node::Const(_) => Arc::new(c.clone()),
            Node::Not(d) => Arc::new(Concept::Not(self.trees[d as usize].clone())),
            Node::Minus(d, _) => match c {
                Concept::Minus(_, k) => {
                    Arc::new(Concept::Minus(self.trees[d as usize].clone(), k.clone()))
                }
                _ => unreachable!(),
            },
            Node::And(a, b) => Arc::new(Concept::And(
                self.trees[a as usize].clone(),
                self.trees[b as usize].clone(),
            )),
            Node::Exists(r, d) => Arc::new(Concept::Exists(
                self.roles[r as usize].clone(),
                self.trees[d as usize].clone(),
            )),
        };
        let id = self.nodes.len() as ConceptId;
        self.nodes.push(node);
        self.trees.push(tree);
        self.keys.insert(node, id);
        id
    }

    /// Renumbers ids into printed-form order. Returns the arena and the map
    /// from provisional ids to final ids.
    pub(crate) fn freeze(self) -> (ConceptArena, Vec<ConceptId>) {
        let n = self.nodes.len();
        let printed: Vec<String> = self.trees.iter().map(|t| t.to_string()).collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| printed[a].cmp(&printed[b]));
        let mut remap = vec![0 as ConceptId; n];
        for (new, &old) in order.iter().enumerate() {
            remap[old] = new as ConceptId;
        }
        let fix = |id: ConceptId| remap[id as usize];
        let mut nodes = vec![Node::Const(0); n];
        let mut trees = vec![None; n];
        for old in 0..n {
            let node = match self.nodes[old] {
                Node::Not(d) => Node::Not(fix(d)),
                Node::Minus(d, k) => Node::Minus(fix(d), k),
                Node::And(a, b) => Node::And(fix(a), fix(b)),
                Node::Exists(r, d) => Node::Exists(r, fix(d)),
                leaf => leaf,
            };
            nodes[remap[old] as usize] = node;
            trees[remap[old] as usize] = Some(self.trees[old].clone());
        }
        let trees: Vec<Arc<Concept>> = trees.into_iter().map(Option::unwrap).collect();
        let mut sizes = vec![0u64; n];
        // children are interned before parents, so visiting in provisional
        // order computes sizes bottom-up
        for &id in &remap[..n] {
            let id = id as usize;
            sizes[id] = match nodes[id] {
                Node::Atom(_) | Node::Const(_) => 1,
                Node::Not(d) | Node::Minus(d, _) | Node::Exists(_, d) => sizes[d as usize] + 1,
                Node::And(a, b) => sizes[a as usize] + sizes[b as usize] + 1,
            };
        }
        let lookup = trees
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as ConceptId))
            .collect();
        (
            ConceptArena {
                nodes,
                sizes,
                trees,
                atoms: self.atoms,
                roles: self.roles,
                lookup,
            },
            remap,
        )
    }
}

impl ConceptArena {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    #[inline]
    pub fn node(&self, id: ConceptId) -> Node {
        self.nodes[id as usize]
    }

    /// Number of constructors in the concept; used as the termination
    /// measure for propositional rules.
    #[inline]
    pub fn weight(&self, id: ConceptId) -> u64 {
        self.sizes[id as usize]
    }

    pub fn concept(&self, id: ConceptId) -> &Arc<Concept> {
        &self.trees[id as usize]
    }

    pub fn id_of(&self, c: &Concept) -> Option<ConceptId> {
        self.lookup.get(c).copied()
    }

    pub fn atom_name(&self, a: u32) -> &Name {
        &self.atoms[a as usize]
    }

    pub fn role_name(&self, r: u32) -> &Name {
        &self.roles[r as usize]
    }

    pub fn atoms(&self) -> &[Name] {
        &self.atoms
    }

    pub fn roles(&self) -> &[Name] {
        &self.roles
    }
}
