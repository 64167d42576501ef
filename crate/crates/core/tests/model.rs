mod common;

use common::*;
use nexalc_core::model::{choose_atomic_value, choose_role_value, extract_model, saturation_endpoints};
use nexalc_core::rational::Rational;
use nexalc_core::semantics::{check_sequent, check_tbox};
use nexalc_core::solver::{solve, Mode, Problem, Verdict};
use nexalc_core::syntax::{parse_kb, CmpOp, TBox};
use nexalc_core::tableau::NodeKind;

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

#[test]
fn value_choice_examples() {
    assert_eq!(
        choose_atomic_value(&[(CmpOp::Gt, r(3, 10)), (CmpOp::Lt, r(2, 5))]).unwrap(),
        r(7, 20)
    );
    assert_eq!(
        choose_role_value(&[(CmpOp::Gt, r(1, 2))], &[(CmpOp::Le, r(4, 5))]).unwrap(),
        r(4, 5)
    );
    assert!(choose_atomic_value(&[(CmpOp::Ge, r(3, 4)), (CmpOp::Lt, r(3, 4))]).is_err());
}

#[test]
fn two_successors() {
    let q = parse_seq(&["some R . A > 1/2", "some R . B > 1/2", "all R . !(A & B) >= 1"]);
    let sol = solve(Problem::new(q.clone(), TBox::empty()), Mode::Batch).unwrap();
    assert_eq!(sol.verdict, Verdict::Sat);
    let m = extract_model(&sol).unwrap();
    assert_eq!(m.interpretation.len(), 3);
    assert!(check_sequent(&m.interpretation, m.designated, &q));
}

#[test]
fn example_one_satisfiable_side() {
    let t = parse_tbox(&worked::EX1_TBOX);
    let q = parse_seq(&["A >= 1/2", "B >= 3/5"]);
    for mode in [Mode::Batch, Mode::OnTheFly] {
        let sol = solve(Problem::new(q.clone(), t.clone()), mode).unwrap();
        assert_eq!(sol.verdict, Verdict::Sat);
        let m = extract_model(&sol).unwrap();
        assert!(check_tbox(&m.interpretation, &t));
        assert!(check_sequent(&m.interpretation, m.designated, &q));
    }
}

#[test]
fn endpoints_are_and_nodes() {
    let q = parse_seq(&["A | B >= 1/2", "some R . (A & !B) >= 1/2"]);
    let t = parse_tbox(&["A [= some R . B"]);
    let sol = solve(Problem::new(q, t), Mode::Batch).unwrap();
    let marking = sol.marking.as_ref().unwrap();
    let end = saturation_endpoints(&sol.graph, marking);
    for (&v, &x) in &end {
        assert_eq!(sol.graph.node(x).kind, NodeKind::And);
        if sol.graph.node(v).kind == NodeKind::And {
            assert_eq!(v, x);
        }
    }
    let m = extract_model(&sol).unwrap();
    let ands = marking
        .nodes
        .iter()
        .filter(|&&v| sol.graph.node(v).kind == NodeKind::And)
        .count();
    assert!(m.interpretation.len() <= ands);
}

#[test]
fn abox_model_names_individuals() {
    let kb = parse_kb(
        "a : A >= 1\n\
         R(a, b) >= 3/4\n\
         b : B <= 3/4\n\
         A [= all R . (B (+) 1/2)\n",
    )
    .unwrap();
    let p = Problem::new(Default::default(), kb.tbox.clone()).with_abox(kb.abox.clone());
    let sol = solve(p, Mode::Batch).unwrap();
    assert_eq!(sol.verdict, Verdict::Sat);
    let m = extract_model(&sol).unwrap();
    let names: Vec<&str> = m.named.iter().map(|(n, _)| &**n).collect();
    assert_eq!(names, ["a", "b"]);
    let (a, b) = (m.named[0].1, m.named[1].1);
    assert!(m.interpretation.role_value("R", a, b) >= r(3, 4));
    assert!(check_tbox(&m.interpretation, &kb.tbox));
}

#[test]
fn abox_conflict_is_unsat() {
    let kb = parse_kb("a : A >= 1\nR(a, b) >= 1\na : all R . !B >= 1\nb : B >= 1\n").unwrap();
    let p = Problem::new(Default::default(), TBox::empty()).with_abox(kb.abox);
    assert_eq!(solve(p, Mode::Batch).unwrap().verdict, Verdict::Unsat);
}

/// Every positive answer on random inputs comes with a verified model.
#[test]
fn random_models_verify() {
    let mut rng = rng(7);
    let mut sat = 0;
    for _ in 0..60 {
        let shape = Shape::random(&mut rng);
        let q = shape.query(&mut rng);
        let t = shape.tbox(&mut rng, 2);
        let sol = solve(Problem::new(q.clone(), t.clone()), Mode::OnTheFly).unwrap();
        if sol.verdict == Verdict::Sat {
            sat += 1;
            let m = extract_model(&sol).unwrap_or_else(|e| panic!("{q} / {t:?}: {e}"));
            assert!(check_sequent(&m.interpretation, m.designated, &q));
            assert!(check_tbox(&m.interpretation, &t));
        }
    }
    assert!(sat > 10);
}
