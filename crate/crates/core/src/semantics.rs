//! Finite fuzzy interpretations and the valuation of concepts.
//!
//! This module is the semantic ground truth: the solver's answers and
//! extracted models are checked against it, never the other way round.

use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::Rational;
use crate::syntax::{Concept, ConceptAssertion, Gci, Name, Sequent, TBox};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("the domain of an interpretation must be nonempty")]
    EmptyDomain,
    #[error("individual `{0}` listed twice")]
    DuplicateIndividual(String),
    #[error("unknown individual `{0}`")]
    UnknownIndividual(String),
    #[error("value {0} outside [0,1]")]
    OutOfRange(Rational),
    #[error("malformed model: {0}")]
    Format(String),
}

/// A finite fuzzy interpretation.
///
/// Atomic concepts are stored densely per atom; an atom that was never set
/// evaluates to 0 everywhere. Roles are stored as sparse successor maps and
/// unlisted pairs have degree 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interpretation {
    domain: Vec<Name>,
    index: HashMap<Name, usize>,
    atoms: BTreeMap<Name, Vec<Rational>>,
    roles: BTreeMap<Name, Vec<BTreeMap<usize, Rational>>>,
}

impl Interpretation {
    pub fn new<S: AsRef<str>>(domain: impl IntoIterator<Item = S>) -> Result<Self, SemanticsError> {
        let domain: Vec<Name> = domain.into_iter().map(|s| Name::from(s.as_ref())).collect();
        if domain.is_empty() {
            return Err(SemanticsError::EmptyDomain);
        }
        let mut index = HashMap::new();
        for (i, n) in domain.iter().enumerate() {
            if index.insert(n.clone(), i).is_some() {
                return Err(SemanticsError::DuplicateIndividual(n.to_string()));
            }
        }
        Ok(Interpretation {
            domain,
            index,
            atoms: BTreeMap::new(),
            roles: BTreeMap::new(),
        })
    }

    /// A domain of `n` individuals named `x0`, `x1`, ...
    pub fn with_size(n: usize) -> Result<Self, SemanticsError> {
        Interpretation::new((0..n).map(|i| format!("x{i}")))
    }

    pub fn len(&self) -> usize {
        self.domain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domain.is_empty()
    }

    pub fn domain(&self) -> &[Name] {
        &self.domain
    }

    pub fn individual(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn name(&self, x: usize) -> &str {
        &self.domain[x]
    }

    pub fn set_atom(&mut self, atom: &str, x: usize, value: Rational) -> Result<(), SemanticsError> {
        check_range(&value)?;
        let n = self.domain.len();
        let col = self
            .atoms
            .entry(atom.into())
            .or_insert_with(|| vec![Rational::zero(); n]);
        col[x] = value;
        Ok(())
    }

    pub fn set_role(
        &mut self,
        role: &str,
        x: usize,
        y: usize,
        value: Rational,
    ) -> Result<(), SemanticsError> {
        check_range(&value)?;
        let n = self.domain.len();
        let rows = self
            .roles
            .entry(role.into())
            .or_insert_with(|| vec![BTreeMap::new(); n]);
        if value.is_zero() {
            rows[x].remove(&y);
        } else {
            rows[x].insert(y, value);
        }
        Ok(())
    }

    /// Registers an atom so that it appears (with value 0) in serialized
    /// output even if never set.
    pub fn declare_atom(&mut self, atom: &str) {
        let n = self.domain.len();
        self.atoms
            .entry(atom.into())
            .or_insert_with(|| vec![Rational::zero(); n]);
    }

    pub fn atom_value(&self, atom: &str, x: usize) -> Rational {
        self.atoms
            .get(atom)
            .map(|col| col[x].clone())
            .unwrap_or_else(Rational::zero)
    }

    pub fn role_value(&self, role: &str, x: usize, y: usize) -> Rational {
        self.roles
            .get(role)
            .and_then(|rows| rows[x].get(&y).cloned())
            .unwrap_or_else(Rational::zero)
    }

    /// Successors of `x` along `role` with nonzero degree.
    pub fn successors<'a>(
        &'a self,
        role: &str,
        x: usize,
    ) -> impl Iterator<Item = (usize, &'a Rational)> + 'a {
        self.roles
            .get(role)
            .into_iter()
            .flat_map(move |rows| rows[x].iter().map(|(y, v)| (*y, v)))
    }

    pub fn atom_names(&self) -> impl Iterator<Item = &Name> {
        self.atoms.keys()
    }

    pub fn role_names(&self) -> impl Iterator<Item = &Name> {
        self.roles.keys()
    }

    /// Every value stored in the interpretation.
    pub fn values(&self) -> impl Iterator<Item = &Rational> {
        self.atoms
            .values()
            .flat_map(|c| c.iter())
            .chain(self.roles.values().flat_map(|rows| rows.iter().flat_map(|m| m.values())))
    }

    /// Applies `f` to every atomic and role value.
    pub fn map_values(&self, mut f: impl FnMut(&Rational) -> Rational) -> Interpretation {
        let mut out = self.clone();
        for col in out.atoms.values_mut() {
            for v in col.iter_mut() {
                *v = f(v);
            }
        }
        for rows in out.roles.values_mut() {
            for row in rows.iter_mut() {
                let updated: BTreeMap<usize, Rational> = row
                    .iter()
                    .map(|(y, v)| (*y, f(v)))
                    .filter(|(_, v)| !v.is_zero())
                    .collect();
                *row = updated;
            }
        }
        out
    }

    /// Valuation of `c` at the individual named `x`.
    pub fn eval(&self, x: &str, c: &Concept) -> Result<Rational, SemanticsError> {
        let i = self
            .individual(x)
            .ok_or_else(|| SemanticsError::UnknownIndividual(x.to_string()))?;
        Ok(self.value(i, c))
    }

    /// Valuation of `c` at the individual with index `x`. Surface syntax is
    /// evaluated directly (max, bounded sum, infimum) rather than through
    /// its desugaring.
    pub fn value(&self, x: usize, c: &Concept) -> Rational {
        match c {
            Concept::Atom(a) => self.atom_value(a, x),
            Concept::Const(k) => k.clone(),
            Concept::Not(d) => self.value(x, d).complement(),
            Concept::Minus(d, k) => self.value(x, d).monus(k),
            Concept::Plus(d, k) => self.value(x, d).bounded_add(k),
            Concept::And(a, b) => {
                let va = self.value(x, a);
                let vb = self.value(x, b);
                va.min_of(&vb).clone()
            }
            Concept::Or(a, b) => {
                let va = self.value(x, a);
                let vb = self.value(x, b);
                va.max_of(&vb).clone()
            }
            Concept::Exists(r, d) => {
                let mut best = Rational::zero();
                for (y, ry) in self.successors(r, x) {
                    let vy = self.value(y, d);
                    let m = ry.min_of(&vy);
                    if *m > best {
                        best = m.clone();
                    }
                }
                best
            }
            Concept::Forall(r, d) => {
                let mut worst = Rational::one();
                for (y, ry) in self.successors(r, x) {
                    let vy = self.value(y, d);
                    let not_r = ry.complement();
                    let m = not_r.max_of(&vy);
                    if *m < worst {
                        worst = m.clone();
                    }
                }
                worst
            }
        }
    }

    pub fn satisfies_assertion(&self, x: usize, a: &ConceptAssertion) -> bool {
        a.op.holds(&self.value(x, &a.concept), &a.threshold)
    }

    pub fn to_json(&self) -> String {
        let file = ModelFile::from(self);
        let mut s = serde_json::to_string_pretty(&file).expect("model serialization");
        s.push('\n');
        s
    }

    pub fn from_json(src: &str) -> Result<Interpretation, SemanticsError> {
        let file: ModelFile =
            serde_json::from_str(src).map_err(|e| SemanticsError::Format(e.to_string()))?;
        file.into_interpretation()
    }
}

fn check_range(v: &Rational) -> Result<(), SemanticsError> {
    if v.in_unit_interval() {
        Ok(())
    } else {
        Err(SemanticsError::OutOfRange(v.clone()))
    }
}

/// Serialized form: individuals in domain order, values as `"a/b"` strings.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    domain: Vec<String>,
    #[serde(default)]
    concepts: BTreeMap<String, BTreeMap<String, Rational>>,
    #[serde(default)]
    roles: BTreeMap<String, BTreeMap<String, BTreeMap<String, Rational>>>,
}

impl From<&Interpretation> for ModelFile {
    fn from(i: &Interpretation) -> Self {
        let name = |x: usize| i.domain[x].to_string();
        let concepts = i
            .atoms
            .iter()
            .map(|(a, col)| {
                let m = col
                    .iter()
                    .enumerate()
                    .map(|(x, v)| (name(x), v.clone()))
                    .collect();
                (a.to_string(), m)
            })
            .collect();
        let roles = i
            .roles
            .iter()
            .map(|(r, rows)| {
                let m: BTreeMap<String, BTreeMap<String, Rational>> = rows
                    .iter()
                    .enumerate()
                    .filter(|(_, row)| !row.is_empty())
                    .map(|(x, row)| {
                        (
                            name(x),
                            row.iter().map(|(y, v)| (name(*y), v.clone())).collect(),
                        )
                    })
                    .collect();
                (r.to_string(), m)
            })
            .collect();
        ModelFile {
            domain: i.domain.iter().map(|n| n.to_string()).collect(),
            concepts,
            roles,
        }
    }
}

impl ModelFile {
    fn into_interpretation(self) -> Result<Interpretation, SemanticsError> {
        let mut interp = Interpretation::new(&self.domain)?;
        let lookup = |interp: &Interpretation, n: &str| {
            interp
                .individual(n)
                .ok_or_else(|| SemanticsError::UnknownIndividual(n.to_string()))
        };
        for (atom, vals) in &self.concepts {
            interp.declare_atom(atom);
            for (x, v) in vals {
                let xi = lookup(&interp, x)?;
                interp.set_atom(atom, xi, v.clone())?;
            }
        }
        for (role, rows) in &self.roles {
            let n = interp.len();
            interp
                .roles
                .entry(role.as_str().into())
                .or_insert_with(|| vec![BTreeMap::new(); n]);
            for (x, row) in rows {
                let xi = lookup(&interp, x)?;
                for (y, v) in row {
                    let yi = lookup(&interp, y)?;
                    interp.set_role(role, xi, yi, v.clone())?;
                }
            }
        }
        Ok(interp)
    }
}

/// Memoizing bulk evaluator: computes the value of a concept at every
/// individual at once, bottom-up, sharing work across common subtrees.
///
/// Entries are keyed by node address, so sharing is exploited whenever
/// subconcepts are shared through `Arc`.
pub struct Evaluator<'a> {
    interp: &'a Interpretation,
    memo: HashMap<*const Concept, Rc<[Rational]>>,
}

impl<'a> Evaluator<'a> {
    pub fn new(interp: &'a Interpretation) -> Self {
        Evaluator {
            interp,
            memo: HashMap::new(),
        }
    }

    pub fn interpretation(&self) -> &'a Interpretation {
        self.interp
    }

    /// Values of `c` at all individuals, in domain order.
    pub fn values(&mut self, c: &'a Concept) -> Rc<[Rational]> {
        let key = c as *const Concept;
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        let n = self.interp.len();
        let out: Rc<[Rational]> = match c {
            Concept::Atom(a) => (0..n).map(|x| self.interp.atom_value(a, x)).collect(),
            Concept::Const(k) => vec![k.clone(); n].into(),
            Concept::Not(d) => self.values(d).iter().map(Rational::complement).collect(),
            Concept::Minus(d, k) => self.values(d).iter().map(|v| v.monus(k)).collect(),
            Concept::Plus(d, k) => self.values(d).iter().map(|v| v.bounded_add(k)).collect(),
            Concept::And(a, b) => {
                let (va, vb) = (self.values(a), self.values(b));
                va.iter().zip(vb.iter()).map(|(x, y)| x.min_of(y).clone()).collect()
            }
            Concept::Or(a, b) => {
                let (va, vb) = (self.values(a), self.values(b));
                va.iter().zip(vb.iter()).map(|(x, y)| x.max_of(y).clone()).collect()
            }
            Concept::Exists(r, d) => {
                let vd = self.values(d);
                (0..n)
                    .map(|x| {
                        let mut best = Rational::zero();
                        for (y, ry) in self.interp.successors(r, x) {
                            let m = ry.min_of(&vd[y]);
                            if *m > best {
                                best = m.clone();
                            }
                        }
                        best
                    })
                    .collect()
            }
            Concept::Forall(r, d) => {
                let vd = self.values(d);
                (0..n)
                    .map(|x| {
                        let mut worst = Rational::one();
                        for (y, ry) in self.interp.successors(r, x) {
                            let not_r = ry.complement();
                            let m = not_r.max_of(&vd[y]);
                            if *m < worst {
                                worst = m.clone();
                            }
                        }
                        worst
                    })
                    .collect()
            }
        };
        self.memo.insert(key, out.clone());
        out
    }

    pub fn holds(&mut self, x: usize, a: &'a ConceptAssertion) -> bool {
        let v = self.values(&a.concept);
        a.op.holds(&v[x], &a.threshold)
    }

    /// Individuals at which the GCI fails.
    pub fn gci_violations(&mut self, gci: &'a Gci) -> Vec<usize> {
        let l = self.values(&gci.lhs);
        let r = self.values(&gci.rhs);
        (0..l.len()).filter(|&x| l[x] > r[x]).collect()
    }
}

/// Does every assertion of `s` hold at `x`?
pub fn check_sequent(interp: &Interpretation, x: usize, s: &Sequent) -> bool {
    s.iter().all(|a| interp.satisfies_assertion(x, a))
}

/// Does `lhs <= rhs` hold pointwise at `x`?
pub fn check_gci_at(interp: &Interpretation, x: usize, gci: &Gci) -> bool {
    interp.value(x, &gci.lhs) <= interp.value(x, &gci.rhs)
}

/// Does every GCI hold at every individual?
pub fn check_tbox(interp: &Interpretation, tbox: &TBox) -> bool {
    let mut ev = Evaluator::new(interp);
    tbox.gcis.iter().all(|g| ev.gci_violations(g).is_empty())
}

/// Moves every value outside `grid` to the half-step point just above the
/// largest grid value below it: `max { z + eps | z in grid, z < v }`.
/// Values already on the grid are kept. `grid` must be sorted ascending and
/// contain 0.
pub fn snap_to_grid(interp: &Interpretation, grid: &[Rational], eps: &Rational) -> Interpretation {
    interp.map_values(|v| snap_value(v, grid, eps))
}

pub fn snap_value(v: &Rational, grid: &[Rational], eps: &Rational) -> Rational {
    match grid.binary_search(v) {
        Ok(_) => v.clone(),
        Err(pos) => {
            assert!(pos > 0, "value {v} below the grid");
            grid[pos - 1].bounded_add(eps)
        }
    }
}
