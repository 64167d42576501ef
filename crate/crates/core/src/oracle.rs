//! Brute-force ground truth at desk scale.
//!
//! Models are searched exhaustively: every domain size up to a bound and
//! every assignment of grid values to the atoms and roles that occur. The
//! search evaluates concepts on its own integer representation and checks
//! GCIs pointwise, so it shares nothing with the tableau beyond the grid.
//! A found model is authoritative; "no model up to n" is only evidence.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::grid::Grid;
use crate::rational::Rational;
use crate::semantics::Interpretation;
use crate::syntax::{ABox, CmpOp, Concept, ConceptAssertion, Name, Sequent, TBox};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("constant {0} is not a multiple of the search unit")]
    OffGrid(Rational),
    #[error("constant {0} is not 0 or 1 in a classical knowledge base")]
    NotClassical(Rational),
    #[error("the domain bound must be at least 1")]
    EmptyBound,
}

/// A model found by the search; `designated` satisfies the query.
#[derive(Debug, Clone)]
pub struct OracleModel {
    pub interpretation: Interpretation,
    pub designated: usize,
}

#[derive(Debug, Clone)]
pub enum OracleResult {
    Sat(OracleModel),
    NoModelUpTo(usize),
    /// The next domain size would exceed the assignment budget. Sizes below
    /// `domain` were searched exhaustively.
    Aborted { domain: usize, explored: u64 },
}

impl OracleResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, OracleResult::Sat(_))
    }

    pub fn model(&self) -> Option<&OracleModel> {
        match self {
            OracleResult::Sat(m) => Some(m),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Config {
    pub max_domain: usize,
    /// Cap on the total number of assignments tried.
    pub budget: u64,
    /// Search with a unit `epsilon / refine` instead of `epsilon`; values
    /// then range over a finer grid than `Z'`.
    pub refine: u32,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            max_domain: 3,
            budget: 2_000_000,
            refine: 1,
        }
    }
}

impl Config {
    pub fn with_max_domain(max_domain: usize) -> Config {
        Config {
            max_domain,
            ..Config::default()
        }
    }
}

#[derive(Clone, Copy, Debug)]
enum Op {
    Atom(usize),
    Const(u32),
    Not(usize),
    Minus(usize, u32),
    And(usize, usize),
    Exists(usize, usize),
}

/// Concepts flattened into a dependency-ordered program over integer
/// values `0..=top`.
struct Program {
    ops: Vec<Op>,
    ids: HashMap<Concept, usize>,
    atoms: Vec<Name>,
    roles: Vec<Name>,
    unit: Rational,
    top: u32,
}

impl Program {
    fn new(atoms: Vec<Name>, roles: Vec<Name>, unit: Rational) -> Program {
        let top = units(&Rational::one(), &unit).expect("unit divides 1");
        Program {
            ops: Vec::new(),
            ids: HashMap::new(),
            atoms,
            roles,
            unit,
            top,
        }
    }

    fn add(&mut self, c: &Concept) -> Result<usize, OracleError> {
        if let Some(&id) = self.ids.get(c) {
            return Ok(id);
        }
        let op = match c {
            Concept::Atom(a) => Op::Atom(self.atoms.binary_search(a).expect("collected atom")),
            Concept::Const(k) => Op::Const(units(k, &self.unit)?),
            Concept::Not(d) => Op::Not(self.add(d)?),
            Concept::Minus(d, k) => Op::Minus(self.add(d)?, units(k, &self.unit)?),
            Concept::And(a, b) => Op::And(self.add(a)?, self.add(b)?),
            Concept::Exists(r, d) => {
                Op::Exists(self.roles.binary_search(r).expect("collected role"), self.add(d)?)
            }
            sugar => return self.add(&sugar.desugar()),
        };
        self.ops.push(op);
        let id = self.ops.len() - 1;
        self.ids.insert(c.clone(), id);
        Ok(id)
    }

    /// Which values `0..=top` satisfy `op threshold`.
    fn admissible(&self, op: CmpOp, threshold: &Rational) -> Vec<bool> {
        (0..=self.top)
            .map(|k| op.holds(&self.unit.mul_int(k as i64), threshold))
            .collect()
    }

    fn eval(&self, n: usize, atoms: &[u32], roles: &[u32], out: &mut [u32]) {
        for (i, op) in self.ops.iter().enumerate() {
            for x in 0..n {
                let v = match *op {
                    Op::Atom(a) => atoms[a * n + x],
                    Op::Const(k) => k,
                    Op::Not(d) => self.top - out[d * n + x],
                    Op::Minus(d, k) => out[d * n + x].saturating_sub(k),
                    Op::And(a, b) => out[a * n + x].min(out[b * n + x]),
                    Op::Exists(r, d) => (0..n)
                        .map(|y| roles[(r * n + x) * n + y].min(out[d * n + y]))
                        .max()
                        .unwrap_or(0),
                };
                out[i * n + x] = v;
            }
        }
    }
}

fn units(c: &Rational, unit: &Rational) -> Result<u32, OracleError> {
    c.exact_quotient(unit)
        .and_then(|q| u32::try_from(q).ok())
        .ok_or_else(|| OracleError::OffGrid(c.clone()))
}

struct Check {
    concept: usize,
    ok: Vec<bool>,
}

/// What a model has to satisfy: the query at some individual (or at a
/// fixed named one), named assertions, role assertions, and the GCIs.
struct Search<'a> {
    prog: Program,
    query: Vec<Check>,
    named: Vec<(usize, Check)>,
    edges: Vec<(usize, usize, usize, Vec<bool>)>,
    gcis: Vec<(usize, usize)>,
    names: &'a [Name],
    values: Vec<u32>,
}

impl Search<'_> {
    fn run(&self, config: &Config) -> OracleResult {
        let mut explored = 0u64;
        let first = self.names.len().max(1);
        let bound = config.max_domain.max(first);
        // without roles individuals do not interact: restricting a model to
        // the named individuals plus the one satisfying the query is again
        // a model, so larger domains add nothing
        let last = if self.prog.roles.is_empty() {
            bound.min(first + 1)
        } else {
            bound
        };
        for n in first..=last {
            let vars = (self.prog.atoms.len() * n + self.prog.roles.len() * n * n) as u32;
            let count = (self.values.len() as u64).checked_pow(vars);
            match count {
                Some(c) if explored + c <= config.budget => {}
                _ => return OracleResult::Aborted { domain: n, explored },
            }
            if let Some(m) = self.search(n, &mut explored) {
                return OracleResult::Sat(m);
            }
        }
        OracleResult::NoModelUpTo(bound)
    }

    fn search(&self, n: usize, explored: &mut u64) -> Option<OracleModel> {
        let na = self.prog.atoms.len() * n;
        let nr = self.prog.roles.len() * n * n;
        // digits index into `values`; the last digit varies fastest
        let mut digits = vec![0usize; na + nr];
        let mut atoms = vec![self.values[0]; na];
        let mut roles = vec![self.values[0]; nr];
        let mut out = vec![0u32; self.prog.ops.len() * n];
        loop {
            *explored += 1;
            self.prog.eval(n, &atoms, &roles, &mut out);
            if let Some(x) = self.accepts(n, &out, &roles) {
                return Some(self.model(n, x, &atoms, &roles));
            }
            let mut i = digits.len();
            loop {
                if i == 0 {
                    return None;
                }
                i -= 1;
                digits[i] += 1;
                if digits[i] < self.values.len() {
                    break;
                }
                digits[i] = 0;
                self.set(i, 0, na, &mut atoms, &mut roles);
            }
            self.set(i, digits[i], na, &mut atoms, &mut roles);
        }
    }

    fn set(&self, i: usize, d: usize, na: usize, atoms: &mut [u32], roles: &mut [u32]) {
        if i < na {
            atoms[i] = self.values[d];
        } else {
            roles[i - na] = self.values[d];
        }
    }

    fn accepts(&self, n: usize, out: &[u32], roles: &[u32]) -> Option<usize> {
        let at = |c: usize, x: usize| out[c * n + x] as usize;
        let tbox_ok = self
            .gcis
            .iter()
            .all(|&(l, r)| (0..n).all(|x| at(l, x) <= at(r, x)));
        let named_ok = self.named.iter().all(|(x, ch)| ch.ok[at(ch.concept, *x)]);
        let edges_ok = self
            .edges
            .iter()
            .all(|(r, a, b, ok)| ok[roles[(r * n + a) * n + b] as usize]);
        if !(tbox_ok && named_ok && edges_ok) {
            return None;
        }
        (0..n).find(|&x| self.query.iter().all(|ch| ch.ok[at(ch.concept, x)]))
    }

    fn model(&self, n: usize, designated: usize, atoms: &[u32], roles: &[u32]) -> OracleModel {
        let mut names: Vec<String> = self.names.iter().map(|s| s.to_string()).collect();
        let mut k = 0;
        while names.len() < n {
            let candidate = format!("x{k}");
            k += 1;
            if !names.contains(&candidate) {
                names.push(candidate);
            }
        }
        let mut interp = Interpretation::new(&names).expect("distinct names");
        let unit = &self.prog.unit;
        for (a, name) in self.prog.atoms.iter().enumerate() {
            interp.declare_atom(name);
            for x in 0..n {
                let v = unit.mul_int(atoms[a * n + x] as i64);
                interp.set_atom(name, x, v).expect("value in range");
            }
        }
        for (r, name) in self.prog.roles.iter().enumerate() {
            for x in 0..n {
                for y in 0..n {
                    let v = unit.mul_int(roles[(r * n + x) * n + y] as i64);
                    interp.set_role(name, x, y, v).expect("value in range");
                }
            }
        }
        OracleModel {
            interpretation: interp,
            designated,
        }
    }
}

fn vocabulary(
    query: &Sequent,
    tbox: &TBox,
    abox: &ABox,
) -> (Vec<Name>, Vec<Name>) {
    let mut atoms = BTreeSet::new();
    let mut roles = BTreeSet::new();
    let mut visit = |c: &Concept| {
        c.atoms(&mut atoms);
        c.roles(&mut roles);
    };
    query.iter().for_each(|a| visit(&a.concept));
    for g in &tbox.gcis {
        visit(&g.lhs);
        visit(&g.rhs);
    }
    abox.concept_assertions
        .iter()
        .for_each(|a| visit(&a.assertion.concept));
    for r in &abox.role_assertions {
        roles.insert(r.role.clone());
    }
    (atoms.into_iter().collect(), roles.into_iter().collect())
}

fn build<'a>(
    query: &Sequent,
    tbox: &TBox,
    abox: &ABox,
    names: &'a [Name],
    unit: Rational,
    values: Vec<u32>,
) -> Result<Search<'a>, OracleError> {
    let (atoms, roles) = vocabulary(query, tbox, abox);
    let mut prog = Program::new(atoms, roles, unit);
    let check = |prog: &mut Program, a: &ConceptAssertion| -> Result<Check, OracleError> {
        Ok(Check {
            concept: prog.add(&a.concept)?,
            ok: prog.admissible(a.op, &a.threshold),
        })
    };
    let query = query
        .iter()
        .map(|a| check(&mut prog, a))
        .collect::<Result<_, _>>()?;
    let index = |n: &Name| names.iter().position(|m| m == n).expect("known individual");
    let named = abox
        .concept_assertions
        .iter()
        .map(|a| Ok((index(&a.individual), check(&mut prog, &a.assertion)?)))
        .collect::<Result<_, _>>()?;
    let edges = abox
        .role_assertions
        .iter()
        .map(|r| {
            let role = prog.roles.binary_search(&r.role).expect("collected role");
            let ok = prog.admissible(r.op, &r.threshold);
            (role, index(&r.from), index(&r.to), ok)
        })
        .collect();
    let gcis = tbox
        .gcis
        .iter()
        .map(|g| Ok((prog.add(&g.lhs)?, prog.add(&g.rhs)?)))
        .collect::<Result<_, _>>()?;
    Ok(Search {
        prog,
        query,
        named,
        edges,
        gcis,
        names,
        values,
    })
}

/// Exhaustive search for a model of `query` (at some individual) and the
/// TBox, with values in the grid `Z'` of the input.
pub fn brute_force_sat(query: &Sequent, tbox: &TBox, max_domain: usize) -> Result<OracleResult, OracleError> {
    brute_force_with(query, tbox, &ABox::default(), &Config::with_max_domain(max_domain))
}

/// As [`brute_force_sat`], with an ABox whose individuals occupy the first
/// domain elements.
pub fn brute_force_with(
    query: &Sequent,
    tbox: &TBox,
    abox: &ABox,
    config: &Config,
) -> Result<OracleResult, OracleError> {
    if config.max_domain == 0 {
        return Err(OracleError::EmptyBound);
    }
    let mut constants = Vec::new();
    tbox.constants(&mut constants);
    query.constants(&mut constants);
    abox.constants(&mut constants);
    let grid = Grid::from_constants(&constants);
    let unit = grid.epsilon.div_int(config.refine.max(1) as u64);
    let top = units(&Rational::one(), &unit)?;
    let names = abox.individuals();
    let search = build(query, tbox, abox, &names, unit, (0..=top).collect())?;
    Ok(search.run(config))
}

/// The fuzzy version of a classical query: every concept asserted `>= 1`.
/// The TBox is unchanged.
pub fn crispify(concepts: &[Concept], tbox: &TBox) -> (Sequent, TBox) {
    let query = concepts
        .iter()
        .map(|c| ConceptAssertion::new(c.clone(), CmpOp::Ge, Rational::one()))
        .collect();
    (query, tbox.clone())
}

fn check_classical(c: &Concept) -> Result<(), OracleError> {
    let mut bad = None;
    c.walk(&mut |d| {
        if let Concept::Const(k) = d {
            if !k.is_zero() && !k.is_one() {
                bad = Some(k.clone());
            }
        }
        if let Concept::Minus(_, k) | Concept::Plus(_, k) = d {
            if !k.is_zero() {
                bad = Some(k.clone());
            }
        }
    });
    bad.map_or(Ok(()), |k| Err(OracleError::NotClassical(k)))
}

/// Two-valued search for a model where every concept of `concepts` holds
/// at one individual and every GCI holds classically.
pub fn classical_brute_force(
    concepts: &[Concept],
    tbox: &TBox,
    max_domain: usize,
) -> Result<OracleResult, OracleError> {
    if max_domain == 0 {
        return Err(OracleError::EmptyBound);
    }
    for c in concepts {
        check_classical(c)?;
    }
    for g in &tbox.gcis {
        check_classical(&g.lhs)?;
        check_classical(&g.rhs)?;
    }
    let (query, _) = crispify(concepts, tbox);
    let search = build(&query, tbox, &ABox::default(), &[], Rational::one(), vec![0, 1])?;
    Ok(search.run(&Config::with_max_domain(max_domain)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_assertion, parse_concept, parse_gci};

    fn seq(items: &[&str]) -> Sequent {
        items.iter().map(|s| parse_assertion(s).unwrap()).collect()
    }

    fn tbox(items: &[&str]) -> TBox {
        TBox::new(items.iter().map(|s| parse_gci(s).unwrap()).collect())
    }

    #[test]
    fn single_atom() {
        let r = brute_force_sat(&seq(&["A >= 1/2"]), &TBox::empty(), 3).unwrap();
        let m = r.model().unwrap();
        assert_eq!(m.interpretation.len(), 1);
        assert_eq!(m.interpretation.atom_value("A", 0), Rational::half());
    }

    #[test]
    fn contradiction() {
        let r = brute_force_sat(&seq(&["A >= 1", "!A >= 1"]), &TBox::empty(), 3).unwrap();
        assert!(matches!(r, OracleResult::NoModelUpTo(3)));
    }

    #[test]
    fn successor_needed() {
        let q = seq(&["some R . A >= 1", "A <= 0"]);
        let m = brute_force_sat(&q, &TBox::empty(), 3).unwrap();
        assert_eq!(m.model().unwrap().interpretation.len(), 2);
    }

    #[test]
    fn classical() {
        let c = parse_concept("A & !A").unwrap();
        assert!(matches!(
            classical_brute_force(&[c], &TBox::empty(), 3).unwrap(),
            OracleResult::NoModelUpTo(3)
        ));
        let c = parse_concept("some R . A").unwrap();
        assert!(classical_brute_force(&[c], &tbox(&["A [= B"]), 3).unwrap().is_sat());
        let c = parse_concept("A (-) 0.5").unwrap();
        assert!(classical_brute_force(&[c], &TBox::empty(), 1).is_err());
    }

    #[test]
    fn budget() {
        let q = seq(&["some R . (A & B & C) >= 1/8"]);
        let cfg = Config {
            max_domain: 3,
            budget: 1000,
            refine: 1,
        };
        assert!(matches!(
            brute_force_with(&q, &TBox::empty(), &ABox::default(), &cfg).unwrap(),
            OracleResult::Aborted { domain: 1, .. }
        ));
    }
}
