mod common;

use common::*;
use nexalc_core::oracle::{
    brute_force_sat, brute_force_with, classical_brute_force, crispify, Config, OracleError,
    OracleResult,
};
use nexalc_core::rational::Rational;
use nexalc_core::grid::compute_grid;
use nexalc_core::semantics::{check_sequent, check_tbox, snap_to_grid, Interpretation};
use nexalc_core::solver::{is_satisfiable, Verdict};
use nexalc_core::syntax::{parse_concept, parse_kb, ABox, Concept, Sequent, TBox};
use rand::Rng;

fn assert_model(res: &OracleResult, q: &Sequent, t: &TBox) {
    let m = res.model().expect("a model");
    assert!(check_sequent(&m.interpretation, m.designated, q), "{q}");
    assert!(check_tbox(&m.interpretation, t));
}

#[test]
fn shifted_gci_example() {
    let t = parse_tbox(&["A (-) 0.2 [= B (-) 0.3"]);
    let q = parse_seq(&["A >= 1/2", "B < 3/5"]);
    assert!(matches!(brute_force_sat(&q, &t, 3).unwrap(), OracleResult::NoModelUpTo(3)));
    let q = parse_seq(&["A >= 1/2", "B >= 3/5"]);
    let res = brute_force_sat(&q, &t, 3).unwrap();
    assert_model(&res, &q, &t);
}

#[test]
fn role_example_needs_two_individuals() {
    let t = TBox::empty();
    let q = parse_seq(&["some R . A >= 1/2", "A <= 0"]);
    let res = brute_force_sat(&q, &t, 2).unwrap();
    assert_model(&res, &q, &t);
    assert_eq!(res.model().unwrap().interpretation.len(), 2);
    assert!(matches!(brute_force_sat(&q, &t, 1).unwrap(), OracleResult::NoModelUpTo(1)));
}

#[test]
fn abox_individuals_come_first() {
    let kb = parse_kb("a : some R . B >= 1/2\nR(a, b) >= 1\nb : B <= 1/2\n").unwrap();
    let res = brute_force_with(&Sequent::empty(), &TBox::empty(), &kb.abox, &Config::default()).unwrap();
    let m = res.model().unwrap();
    assert_eq!(m.interpretation.name(0), "a");
    assert_eq!(m.interpretation.name(1), "b");
    let a = &kb.abox.concept_assertions[0];
    assert!(m.interpretation.satisfies_assertion(0, &a.assertion));
}

#[test]
fn errors_and_budget() {
    let q = parse_seq(&["A >= 1/2"]);
    assert!(matches!(brute_force_sat(&q, &TBox::empty(), 0), Err(OracleError::EmptyBound)));
    let c = parse_concept("A (-) 0.5").unwrap();
    assert!(matches!(
        classical_brute_force(&[c], &TBox::empty(), 2),
        Err(OracleError::NotClassical(_))
    ));
    let t = parse_tbox(&worked::EX1_TBOX);
    let cfg = Config {
        budget: 1000,
        ..Config::default()
    };
    let res = brute_force_with(&q, &t, &ABox::default(), &cfg).unwrap();
    assert!(matches!(res, OracleResult::Aborted { .. }));
}

/// Every model the oracle returns is checked by the independent evaluator,
/// and the engine never calls an oracle-satisfiable input unsatisfiable.
#[test]
fn oracle_models_and_engine_agree() {
    let mut rng = rng(51);
    let shape = Shape::small();
    let mut sat = 0;
    for _ in 0..150 {
        let q = shape.query(&mut rng);
        let n = rng.gen_range(0..=1);
        let t = shape.tbox(&mut rng, n);
        let res = brute_force_with(&q, &t, &ABox::default(), &Config::with_max_domain(2)).unwrap();
        let engine = is_satisfiable(&q, &t).unwrap().verdict;
        if res.is_sat() {
            sat += 1;
            assert_model(&res, &q, &t);
            assert_eq!(engine, Verdict::Sat, "{q}");
        }
    }
    assert!(sat > 30);
}

/// Values in `Z'` suffice: a finer search space finds no extra models.
#[test]
fn refining_the_grid_finds_nothing_new() {
    let mut rng = rng(52);
    let shape = Shape::small();
    for _ in 0..120 {
        let q = shape.query(&mut rng);
        let t = shape.tbox(&mut rng, 1);
        let run = |refine| {
            let cfg = Config {
                max_domain: 1,
                budget: 5_000_000,
                refine,
            };
            brute_force_with(&q, &t, &ABox::default(), &cfg).unwrap()
        };
        let (coarse, fine) = (run(1), run(3));
        if matches!(fine, OracleResult::Aborted { .. }) {
            continue;
        }
        assert_eq!(coarse.is_sat(), fine.is_sat(), "{q} / {t:?}");
    }
}

/// A classical model is a fuzzy model of the crisp encoding, and the two
/// searches agree on satisfiability.
#[test]
fn crisp_encoding() {
    let mut rng = rng(53);
    let shape = Shape::classical();
    for _ in 0..100 {
        let concepts: Vec<Concept> = (0..rng.gen_range(1..=2)).map(|_| shape.concept(&mut rng, 2)).collect();
        let t = shape.tbox(&mut rng, 1);
        let classical = classical_brute_force(&concepts, &t, 2).unwrap();
        let (q, ft) = crispify(&concepts, &t);
        let fuzzy = brute_force_sat(&q, &ft, 2).unwrap();
        if let Some(m) = classical.model() {
            assert!(m.interpretation.values().all(|v| v.is_zero() || v.is_one()));
            assert!(check_sequent(&m.interpretation, m.designated, &q));
            assert!(check_tbox(&m.interpretation, &ft));
            assert!(fuzzy.is_sat());
        }
        assert_eq!(classical.is_sat(), fuzzy.is_sat(), "{q}");
    }
}

fn threshold(i: &Interpretation) -> Interpretation {
    i.map_values(|v| if *v > Rational::half() { Rational::one() } else { Rational::zero() })
}

/// On classical concepts, a value above 1/2 is exactly membership in the
/// 1/2-thresholded classical interpretation. Values avoid 1/2 itself
/// (sevenths), where negation would not commute with thresholding.
#[test]
fn threshold_back_mapping() {
    let mut rng = rng(54);
    let shape = Shape::classical();
    for _ in 0..300 {
        let i = interpretation(&mut rng, 3, &shape.atoms, &shape.roles, 7);
        let crisp = threshold(&i);
        let c = shape.concept(&mut rng, 3);
        for x in 0..3 {
            assert_eq!(i.value(x, &c) > Rational::half(), crisp.value(x, &c).is_one(), "{c}");
        }
    }
}

/// Models found over a finer grid snap back to `Z'`-valued models.
#[test]
fn refined_models_snap_to_the_grid() {
    let mut rng = rng(55);
    let shape = Shape::small();
    let mut snapped = 0;
    for _ in 0..100 {
        let q = shape.query(&mut rng);
        let t = shape.tbox(&mut rng, 1);
        let cfg = Config {
            max_domain: 2,
            budget: 2_000_000,
            refine: 3,
        };
        let OracleResult::Sat(m) = brute_force_with(&q, &t, &ABox::default(), &cfg).unwrap() else {
            continue;
        };
        let grid = compute_grid(&t, &q);
        let s = snap_to_grid(&m.interpretation, &grid.z, &grid.epsilon);
        assert!(s.values().all(|v| grid.z_prime.contains(v)));
        assert!(check_sequent(&s, m.designated, &q), "{q}");
        assert!(check_tbox(&s, &t));
        snapped += 1;
    }
    assert!(snapped > 20);
}
