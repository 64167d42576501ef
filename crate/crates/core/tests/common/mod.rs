//! Seeded generators shared by the integration suites.
#![allow(dead_code)]

use nexalc_core::rational::Rational;
use nexalc_core::semantics::Interpretation;
use nexalc_core::syntax::{CmpOp, Concept, ConceptAssertion, Gci, Sequent, TBox};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;
pub type Rand = ChaCha8Rng;

pub fn rng(seed: u64) -> Rand {
    ChaCha8Rng::seed_from_u64(seed)
}

pub const OPS: [CmpOp; 4] = [CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge];

pub fn quarters() -> Vec<Rational> {
    (0..=4).map(|k| Rational::new(k, 4)).collect()
}

pub fn halves() -> Vec<Rational> {
    (0..=2).map(|k| Rational::new(k, 2)).collect()
}

/// Shape of the random knowledge bases.
#[derive(Clone, Debug)]
pub struct Shape {
    pub atoms: Vec<&'static str>,
    pub roles: Vec<&'static str>,
    pub constants: Vec<Rational>,
    pub depth: usize,
    pub sugar: bool,
    pub shifts: bool,
}

impl Shape {
    /// Up to 3 atoms and 1–2 roles, constants in quarters or halves.
    pub fn random(rng: &mut Rand) -> Shape {
        let atoms = ["A", "B", "C"][..rng.gen_range(1..=3)].to_vec();
        let roles = ["R", "S"][..rng.gen_range(1..=2)].to_vec();
        let constants = if rng.gen_bool(0.5) { halves() } else { quarters() };
        Shape {
            atoms,
            roles,
            constants,
            depth: 3,
            sugar: true,
            shifts: true,
        }
    }

    pub fn small() -> Shape {
        Shape {
            atoms: vec!["A", "B"],
            roles: vec!["R"],
            constants: halves(),
            depth: 2,
            sugar: true,
            shifts: true,
        }
    }

    pub fn classical() -> Shape {
        Shape {
            atoms: vec!["A", "B"],
            roles: vec!["R"],
            constants: vec![],
            depth: 2,
            sugar: true,
            shifts: false,
        }
    }

    fn constant(&self, rng: &mut Rand) -> Rational {
        self.constants.choose(rng).unwrap().clone()
    }

    /// A shift amount; never 0 so the shift is not trivial.
    fn shift(&self, rng: &mut Rand) -> Rational {
        let nonzero: Vec<&Rational> = self.constants.iter().filter(|c| !c.is_zero()).collect();
        (*nonzero.choose(rng).unwrap()).clone()
    }

    pub fn concept(&self, rng: &mut Rand, depth: usize) -> Concept {
        let leaf = |rng: &mut Rand| {
            if self.constants.is_empty() || rng.gen_bool(0.85) {
                Concept::atom(self.atoms.choose(rng).unwrap())
            } else {
                Concept::Const(self.constant(rng))
            }
        };
        if depth == 0 || rng.gen_bool(0.25) {
            return leaf(rng);
        }
        let role = *self.roles.choose(rng).unwrap();
        let max = if self.sugar { 9 } else { 6 };
        loop {
            let pick = rng.gen_range(0..max);
            let c = match pick {
                0 => leaf(rng),
                1 => self.concept(rng, depth - 1).not(),
                2 if self.shifts => {
                    let c = self.shift(rng);
                    self.concept(rng, depth - 1).minus(c)
                }
                3 | 4 => self.concept(rng, depth - 1).and(self.concept(rng, depth - 1)),
                5 => Concept::exists(role, self.concept(rng, depth - 1)),
                6 => self.concept(rng, depth - 1).or(self.concept(rng, depth - 1)),
                7 if self.shifts => {
                    let c = self.shift(rng);
                    self.concept(rng, depth - 1).plus(c)
                }
                8 => Concept::forall(role, self.concept(rng, depth - 1)),
                _ => continue,
            };
            return c;
        }
    }

    pub fn assertion(&self, rng: &mut Rand, depth: usize) -> ConceptAssertion {
        let c = self.concept(rng, depth);
        ConceptAssertion::new(c, *OPS.choose(rng).unwrap(), self.constant(rng))
    }

    pub fn query(&self, rng: &mut Rand) -> Sequent {
        let n = rng.gen_range(1..=2);
        (0..n).map(|_| self.assertion(rng, self.depth)).collect()
    }

    pub fn tbox(&self, rng: &mut Rand, max_gcis: usize) -> TBox {
        let n = rng.gen_range(0..=max_gcis);
        TBox::new(
            (0..n)
                .map(|_| {
                    let d = self.depth.min(2);
                    Gci::new(self.concept(rng, d), self.concept(rng, d))
                })
                .collect(),
        )
    }
}

/// An interpretation over `n` individuals with values `k / denom`.
pub fn interpretation(
    rng: &mut Rand,
    n: usize,
    atoms: &[&str],
    roles: &[&str],
    denom: i64,
) -> Interpretation {
    let mut i = Interpretation::with_size(n).unwrap();
    let value = |rng: &mut Rand| Rational::new(rng.gen_range(0..=denom), denom);
    for a in atoms {
        for x in 0..n {
            i.set_atom(a, x, value(rng)).unwrap();
        }
    }
    for r in roles {
        for x in 0..n {
            for y in 0..n {
                if rng.gen_bool(0.6) {
                    i.set_role(r, x, y, value(rng)).unwrap();
                }
            }
        }
    }
    i
}

pub fn parse_tbox(items: &[&str]) -> TBox {
    TBox::new(
        items
            .iter()
            .map(|s| nexalc_core::syntax::parse_gci(s).unwrap())
            .collect(),
    )
}

pub fn parse_seq(items: &[&str]) -> Sequent {
    items
        .iter()
        .map(|s| nexalc_core::syntax::parse_assertion(s).unwrap())
        .collect()
}

pub mod worked {
    pub const EX1_TBOX: [&str; 3] = [
        "A [= all R . (A (-) 0.2)",
        "A (-) 0.2 [= B (-) 0.3",
        "B [= (all R . B) (-) 0.2",
    ];
    pub const EX1_ASSERTION: &str = "(!(A (-) 0.5)) | ((all R . B) (-) 0.2) >= 0.8";

    pub const EX2_TBOX: [&str; 5] = [
        "all IFW . FootballFan [= FootballFan",
        "all IFW . (!FootballFan (-) 0.4) [= !FootballFan (+) 0.2",
        "some IFW . (SportsFan (-) 0.3) [= SportsFan (+) 0.2",
        "FootballFan [= SportsFan",
        "FootballFan (-) 0.3 [= all IFW . (FootballFan (+) 0.2)",
    ];
    pub const EX2_ASSERTION: &str = "(some IFW . !FootballFan) (+) 0.4 | SportsFan >= 0.7";

    pub const EX3_TBOX: [&str; 4] = [
        "some CitedBy . Influence [= Influence (+) 0.2",
        "some CW . (Influence (-) 0.4) [= Influence",
        "all CW . Influence [= Influence",
        "Influence [= some CitedBy . (Influence (+) 0.3)",
    ];
    pub const EX3_ASSERTION: &str =
        "(all CW . (!Influence (+) 0.4)) (+) 0.6 | some CitedBy . (Influence (+) 0.3) >= 0.8";
}
