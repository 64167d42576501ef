//! Decision procedure for fuzzy ALC with Zadeh connectives and constant
//! shifts (non-expansive fuzzy ALC) over general TBoxes.
//!
//! The pipeline is: parse a knowledge base ([`syntax`]), compute the truth
//! value grid and the single assertion that encodes the TBox ([`grid`]),
//! build a globally cached tableau ([`tableau`]), decide it by least
//! fixpoint propagation ([`solver`]), and on a positive answer extract and
//! verify a finite model ([`model`]). [`semantics`] and [`oracle`] provide
//! the independent ground truth used for testing.

pub mod grid;
pub mod model;
pub mod oracle;
pub mod rational;
pub mod semantics;
pub mod solver;
pub mod syntax;
pub mod tableau;

pub use rational::Rational;
