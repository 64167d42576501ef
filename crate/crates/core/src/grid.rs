//! Truth-value grid and the single assertion that encodes a TBox.
//!
//! For a TBox and a query, `Z` is the set of multiples of the step `g` in
//! `[0,1]`, where `g` generates the additive group spanned by 1 and every
//! constant of the input. `Z'` adds the midpoints `z + g/2`. A GCI `C [= D`
//! holds at an individual iff for some `z` in `Z'` both `C <= z` and
//! `D >= z`, which is expressed by the concept
//! `(!C (+) z) & (D (+) (1 - z))` reaching 1.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::rational::Rational;
use crate::syntax::{CmpOp, Concept, ConceptAssertion, Gci, Sequent, TBox};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("fuzzy GCI degree {0} outside [0,1]")]
pub struct DegreeError(pub Rational);

#[derive(Clone, PartialEq, Eq)]
pub struct Grid {
    pub step: Rational,
    pub epsilon: Rational,
    pub z: Vec<Rational>,
    pub z_prime: Vec<Rational>,
}

impl Grid {
    /// The grid generated by 1 and the given constants.
    pub fn from_constants<'a>(constants: impl IntoIterator<Item = &'a Rational>) -> Grid {
        let step = constants
            .into_iter()
            .fold(Rational::one(), |g, c| g.rational_gcd(c));
        let steps = Rational::one()
            .exact_quotient(&step)
            .and_then(|n| u64::try_from(n).ok())
            .expect("1 is a multiple of the grid step");
        let z: Vec<Rational> = (0..=steps).map(|k| step.mul_int(k as i64)).collect();
        let epsilon = step.div_int(2);
        let mut z_prime = Vec::with_capacity(z.len() * 2 - 1);
        for (k, v) in z.iter().enumerate() {
            z_prime.push(v.clone());
            if k + 1 < z.len() {
                z_prime.push(v + &epsilon);
            }
        }
        Grid {
            step,
            epsilon,
            z,
            z_prime,
        }
    }

    pub fn contains(&self, v: &Rational) -> bool {
        self.z.binary_search(v).is_ok()
    }

    /// True when `v` is an integer multiple of the step (it may lie outside
    /// `[0,1]`).
    pub fn is_multiple_of_step(&self, v: &Rational) -> bool {
        v.exact_quotient(&self.step).is_some()
    }
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Grid {{ step: {}, epsilon: {}, |Z|: {}, |Z'|: {} }}",
            self.step,
            self.epsilon,
            self.z.len(),
            self.z_prime.len()
        )
    }
}

/// All constants of a TBox and a sequent: concept constants, shift amounts
/// and thresholds.
pub fn collect_constants(tbox: &TBox, query: &Sequent) -> Vec<Rational> {
    let mut out = Vec::new();
    tbox.constants(&mut out);
    query.constants(&mut out);
    out
}

pub fn compute_grid(tbox: &TBox, query: &Sequent) -> Grid {
    let constants = collect_constants(tbox, query);
    let grid = Grid::from_constants(&constants);
    debug_assert!(constants.iter().all(|c| grid.is_multiple_of_step(c)));
    grid
}

/// Right-nested fold: `[a, b, c]` becomes `f(a, f(b, c))`.
fn fold_right(mut items: Vec<Concept>, f: impl Fn(Concept, Concept) -> Concept) -> Option<Concept> {
    let mut acc = items.pop()?;
    while let Some(prev) = items.pop() {
        acc = f(prev, acc);
    }
    Some(acc)
}

/// The concept `T` such that a TBox holds in an interpretation iff `T >= 1`
/// holds at every individual (for grid-valued interpretations). Returned in
/// core form; an empty TBox yields the constant 1.
pub fn associated_concept(tbox: &TBox, grid: &Grid) -> Concept {
    let conjuncts: Vec<Concept> = tbox
        .gcis
        .iter()
        .map(|g| {
            let lhs = Arc::new(g.lhs.desugar());
            let rhs = Arc::new(g.rhs.desugar());
            let disjuncts: Vec<Concept> = grid
                .z_prime
                .iter()
                .map(|z| {
                    let left = Concept::Not(lhs.clone()).plus(z.clone());
                    let right = Concept::Plus(rhs.clone(), z.complement());
                    left.and(right)
                })
                .collect();
            fold_right(disjuncts, Concept::or).expect("grid is nonempty")
        })
        .collect();
    match fold_right(conjuncts, Concept::and) {
        Some(t) => t.desugar(),
        None => Concept::Const(Rational::one()),
    }
}

/// `T >= 1` for the given TBox and grid.
pub fn associated_assertion(tbox: &TBox, grid: &Grid) -> ConceptAssertion {
    ConceptAssertion::new(associated_concept(tbox, grid), CmpOp::Ge, Rational::one())
}

/// `C [= D >= p` holds iff `min(1, 1 - C + D) >= p` everywhere, which is the
/// plain GCI `C [= D (+) (1 - p)`.
pub fn rewrite_fuzzy_gci(lhs: Concept, rhs: Concept, p: Rational) -> Result<Gci, DegreeError> {
    if !p.in_unit_interval() {
        return Err(DegreeError(p));
    }
    Ok(Gci::new(lhs, rhs.plus(p.complement())))
}
