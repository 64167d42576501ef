//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Runs without the libtest harness so the report is always printed.

mod common;

use std::collections::BTreeMap;
use std::time::Instant;

use common::*;
use nexalc_core::grid::compute_grid;
use nexalc_core::model::extract_model;
use nexalc_core::oracle::{
    brute_force_with, classical_brute_force, crispify, Config, OracleResult,
};
use nexalc_core::semantics::{check_sequent, check_tbox, snap_to_grid, Evaluator};
use nexalc_core::solver::{is_valid_with, solve, Mode, Problem, Solution, Verdict};
use nexalc_core::syntax::{parse_assertion, ABox, Concept, Sequent, TBox};
use nexalc_core::tableau::{NodeKind, NodeLabel, Rule};
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

/// Facts gathered for the determinism and differential criterion.
#[derive(Default)]
struct Differential {
    runs: usize,
    disagreements: Vec<String>,
    non_injective: usize,
}

impl Differential {
    /// Solves in both modes, records agreement and cache injectivity, and
    /// returns the batch solution.
    fn solve(&mut self, p: &Problem) -> Solution {
        let batch = solve(p.clone(), Mode::Batch).expect("engine");
        let otf = solve(p.clone(), Mode::OnTheFly).expect("engine");
        self.runs += 1;
        if batch.verdict != otf.verdict {
            self.disagreements.push(format!("{} under {:?}", p.query, p.tbox));
        }
        if !batch.graph.labels_injective() || !otf.graph.labels_injective() {
            self.non_injective += 1;
        }
        batch
    }
}

fn valid_on_the_fly(tbox: &[&str], assertion: &str, diff: Option<&mut Differential>) -> Outcome {
    let t = parse_tbox(tbox);
    let a = parse_assertion(assertion).unwrap();
    let start = Instant::now();
    let sol = is_valid_with(&a, &t, Mode::OnTheFly).unwrap();
    let elapsed = start.elapsed();
    let mut detail = format!(
        "{} in {:.2?} ({} nodes, on the fly)",
        if sol.verdict == Verdict::Unsat { "VALID" } else { "INVALID" },
        elapsed,
        sol.stats.nodes
    );
    let mut pass = sol.verdict == Verdict::Unsat && elapsed.as_secs() < 300;
    if let Some(diff) = diff {
        let batch = is_valid_with(&a, &t, Mode::Batch).unwrap();
        diff.runs += 1;
        if batch.verdict != sol.verdict {
            diff.disagreements.push(assertion.to_string());
        }
        if !batch.graph.labels_injective() || !sol.graph.labels_injective() {
            diff.non_injective += 1;
        }
        pass &= batch.verdict == Verdict::Unsat;
        detail.push_str(&format!("; batch agrees ({} nodes)", batch.stats.nodes));
    }
    outcome(pass, detail)
}

fn criterion_4(diff: &mut Differential) -> Outcome {
    let t = parse_tbox(&worked::EX1_TBOX);
    let unsat = Problem::new(parse_seq(&["A >= 1/2", "B < 3/5"]), t.clone());
    let sat = Problem::new(parse_seq(&["A >= 1/2", "B >= 3/5"]), t.clone());
    let a = diff.solve(&unsat);
    let b = diff.solve(&sat);
    let model = extract_model(&b);
    let verified = model.as_ref().is_ok_and(|m| {
        check_tbox(&m.interpretation, &t) && check_sequent(&m.interpretation, m.designated, &sat.query)
    });
    outcome(
        a.verdict == Verdict::Unsat && b.verdict == Verdict::Sat && verified,
        format!(
            "{{A >= 1/2, B < 3/5}}: {:?}; {{A >= 1/2, B >= 3/5}}: {:?}, model verified: {verified}",
            a.verdict, b.verdict
        ),
    )
}

struct Corpus {
    items: Vec<(Shape, Problem)>,
}

fn random_corpus(seed: u64, n: usize) -> Corpus {
    let mut rng = rng(seed);
    let items = (0..n)
        .map(|_| {
            let shape = Shape::random(&mut rng);
            let q = shape.query(&mut rng);
            let t = shape.tbox(&mut rng, 2);
            (shape, Problem::new(q, t))
        })
        .collect();
    Corpus { items }
}

/// Criteria 5 and 6 on one corpus.
fn criteria_5_6(corpus: &Corpus, diff: &mut Differential) -> (Outcome, Outcome) {
    let (mut sat, mut verified, mut failures) = (0, 0, Vec::new());
    let mut oracle: BTreeMap<&str, usize> = BTreeMap::new();
    let mut missed = Vec::new();
    for (_, p) in &corpus.items {
        let sol = diff.solve(p);
        if sol.verdict == Verdict::Sat {
            sat += 1;
            match extract_model(&sol) {
                Ok(m)
                    if check_sequent(&m.interpretation, m.designated, &p.query)
                        && check_tbox(&m.interpretation, &p.tbox) =>
                {
                    verified += 1
                }
                Ok(_) => failures.push(format!("{}: model rejected", p.query)),
                Err(e) => failures.push(format!("{}: {e}", p.query)),
            }
        }
        let r = brute_force_with(&p.query, &p.tbox, &ABox::default(), &Config::default()).unwrap();
        let key = match &r {
            OracleResult::Sat(m) => {
                let real = check_tbox(&m.interpretation, &p.tbox)
                    && check_sequent(&m.interpretation, m.designated, &p.query);
                assert!(real, "oracle returned a non-model for {}", p.query);
                if sol.verdict != Verdict::Sat {
                    missed.push(format!("{} under {:?}", p.query, p.tbox));
                }
                "sat"
            }
            OracleResult::NoModelUpTo(_) => "no model up to 3",
            OracleResult::Aborted { .. } => "budget exhausted",
        };
        *oracle.entry(key).or_default() += 1;
    }
    let five = outcome(
        failures.is_empty(),
        format!(
            "{} KBs, {sat} SAT, {verified} models verified exactly{}",
            corpus.items.len(),
            failures.first().map(|f| format!("; first failure: {f}")).unwrap_or_default()
        ),
    );
    let oracle_sat = oracle.get("sat").copied().unwrap_or(0);
    let six = outcome(
        missed.is_empty() && oracle_sat > 0,
        format!(
            "oracle outcomes {oracle:?}; {} of {oracle_sat} oracle models answered SAT{}",
            oracle_sat - missed.len(),
            missed.first().map(|f| format!("; first miss: {f}")).unwrap_or_default()
        ),
    );
    (five, six)
}

/// Random classical KBs are nearly always satisfiable, so satisfiable
/// draws are capped to keep at least 15 unsatisfiable ones in the corpus.
fn criterion_7(diff: &mut Differential) -> Outcome {
    const TOTAL: usize = 50;
    const MAX_SAT: usize = 35;
    let mut rng = rng(77);
    let shape = Shape::classical();
    let (mut agree, mut sat, mut total, mut draws) = (0, 0, 0, 0);
    let mut mismatches = Vec::new();
    while total < TOTAL && draws < 100_000 {
        draws += 1;
        let n = rng.gen_range(1..=3);
        let concepts: Vec<Concept> = (0..n).map(|_| shape.concept(&mut rng, 2)).collect();
        let tbox = shape.tbox(&mut rng, 2);
        let classical = classical_brute_force(&concepts, &tbox, 3).unwrap();
        let expected = match classical {
            OracleResult::Sat(_) => Verdict::Sat,
            OracleResult::NoModelUpTo(_) => Verdict::Unsat,
            OracleResult::Aborted { .. } => continue,
        };
        if expected == Verdict::Sat && sat >= MAX_SAT {
            continue;
        }
        let (query, t) = crispify(&concepts, &tbox);
        let fuzzy = diff.solve(&Problem::new(query, t)).verdict;
        total += 1;
        if expected == Verdict::Sat {
            sat += 1;
        }
        if fuzzy == expected {
            agree += 1;
        } else {
            mismatches.push(format!("{concepts:?} under {tbox:?}: fuzzy {fuzzy:?}, classical {expected:?}"));
        }
    }
    outcome(
        agree == TOTAL,
        format!(
            "{agree}/{total} agree ({sat} classically satisfiable, {} not){}",
            total - sat,
            mismatches.first().map(|m| format!("; first mismatch: {m}")).unwrap_or_default()
        ),
    )
}

/// Satisfiability of a label as a sequent, searched up to two individuals.
fn oracle_sat(s: &Sequent) -> Option<bool> {
    let cfg = Config {
        max_domain: 2,
        budget: 2_000_000,
        refine: 1,
    };
    match brute_force_with(s, &TBox::empty(), &ABox::default(), &cfg).unwrap() {
        OracleResult::Sat(_) => Some(true),
        OracleResult::NoModelUpTo(_) => Some(false),
        OracleResult::Aborted { .. } => None,
    }
}

fn exists_depth(c: &Concept) -> usize {
    match c {
        Concept::Atom(_) | Concept::Const(_) => 0,
        Concept::Not(d) | Concept::Minus(d, _) | Concept::Plus(d, _) => exists_depth(d),
        Concept::And(a, b) | Concept::Or(a, b) => exists_depth(a).max(exists_depth(b)),
        Concept::Exists(_, d) | Concept::Forall(_, d) => 1 + exists_depth(d),
    }
}

fn criterion_8() -> Outcome {
    const WANT: usize = 200;
    let rules = [
        Rule::Axiom,
        Rule::AndGreater,
        Rule::AndLess,
        Rule::Not,
        Rule::MinusLess,
        Rule::MinusGreater,
        Rule::Exists,
    ];
    let mut done: BTreeMap<&str, (usize, usize)> = rules.iter().map(|r| (r.name(), (0, 0))).collect();
    let mut failures = Vec::new();
    let mut skipped = 0;
    let mut rng = rng(88);
    let shape = Shape::small();
    let mut attempts = 0;
    while done.values().any(|&(n, _)| n < WANT) && attempts < 20_000 {
        attempts += 1;
        let k = rng.gen_range(1..=3);
        let q: Sequent = (0..k).map(|_| shape.assertion(&mut rng, 2)).collect();
        let Ok(sol) = solve(Problem::new(q, TBox::empty()), Mode::Batch) else {
            continue;
        };
        let (e, g) = (&sol.engine, &sol.graph);
        for node in g.nodes() {
            let (Some(rule), NodeLabel::Seq(label)) = (node.rule, &node.label) else {
                continue;
            };
            let entry = done.get_mut(rule.name()).unwrap();
            if entry.0 >= WANT {
                continue;
            }
            let premise = e.to_sequent(label);
            if rule == Rule::Exists
                && (node.children.len() > 1 || premise.iter().any(|a| exists_depth(&a.concept) > 1))
            {
                continue;
            }
            let kids: Vec<Option<bool>> = node
                .children
                .iter()
                .map(|&c| match &g.node(c).label {
                    NodeLabel::Bottom => Some(false),
                    NodeLabel::Seq(l) => oracle_sat(&e.to_sequent(l)),
                    NodeLabel::Tuple(_) => unreachable!(),
                })
                .collect();
            let Some(p) = oracle_sat(&premise) else {
                skipped += 1;
                continue;
            };
            let Some(kids) = kids.into_iter().collect::<Option<Vec<bool>>>() else {
                skipped += 1;
                continue;
            };
            let expected = match node.kind {
                NodeKind::Or => kids.iter().any(|&b| b),
                _ => kids.iter().all(|&b| b),
            };
            entry.0 += 1;
            if p == expected {
                entry.1 += 1;
            } else {
                failures.push(format!("{} on {premise}", rule.name()));
            }
        }
    }
    let complete = done.values().all(|&(n, ok)| n >= WANT && ok == n);
    let counts: Vec<String> = done.iter().map(|(r, (n, ok))| format!("{r} {ok}/{n}")).collect();
    outcome(
        complete && failures.is_empty(),
        format!(
            "{}; {skipped} instances skipped on oracle budget{}",
            counts.join(", "),
            failures.first().map(|f| format!("; first failure: {f}")).unwrap_or_default()
        ),
    )
}

fn criterion_9() -> Outcome {
    let mut rng = rng(99);
    let (mut pairs, mut checks, mut failures) = (0, 0u64, Vec::new());
    let ops = OPS;
    while pairs < 500 {
        let shape = Shape::random(&mut rng);
        let q = shape.query(&mut rng);
        let t = shape.tbox(&mut rng, 2);
        let grid = compute_grid(&t, &q);
        let n = rng.gen_range(1..=3);
        let denom = [3, 5, 7, 8, 12, 20][rng.gen_range(0..6)];
        let i = interpretation(&mut rng, n, &shape.atoms, &shape.roles, denom);
        let snapped = snap_to_grid(&i, &grid.z, &grid.epsilon);
        let mut concepts: Vec<Concept> = Vec::new();
        for a in q.iter() {
            concepts.extend(a.concept.desugar().subconcepts());
        }
        for g in &t.gcis {
            concepts.extend(g.lhs.desugar().subconcepts());
            concepts.extend(g.rhs.desugar().subconcepts());
        }
        let mut before = Evaluator::new(&i);
        let mut after = Evaluator::new(&snapped);
        for c in &concepts {
            let (v, w) = (before.values(c), after.values(c));
            for x in 0..n {
                for z in &grid.z {
                    for op in ops {
                        checks += 1;
                        if op.holds(&v[x], z) != op.holds(&w[x], z) {
                            failures.push(format!("{c} at x{x}: {} vs {} against {op} {z}", v[x], w[x]));
                        }
                    }
                }
            }
        }
        pairs += 1;
    }
    outcome(
        failures.is_empty(),
        format!(
            "{pairs} pairs, {checks} comparisons, {} violations{}",
            failures.len(),
            failures.first().map(|f| format!("; first: {f}")).unwrap_or_default()
        ),
    )
}

/// Repeated runs give byte-identical graphs and models.
fn determinism(corpus: &Corpus) -> Option<String> {
    for (_, p) in corpus.items.iter().take(40) {
        let render = || {
            let s = solve(p.clone(), Mode::Batch).unwrap();
            let model = extract_model(&s).ok().map(|m| m.interpretation.to_json());
            (s.graph.dump(&s.engine), model)
        };
        if render() != render() {
            return Some(format!("{}", p.query));
        }
    }
    None
}

fn main() {
    let mut diff = Differential::default();
    let mut results: Vec<(usize, &str, Outcome)> = Vec::new();
    let mut run = |n: usize, name: &'static str, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let mut o = f();
        o.detail.push_str(&format!(" [{:.1?}]", start.elapsed()));
        results.push((n, name, o));
    };

    run(1, "Example 1(1) validity", &mut || {
        valid_on_the_fly(&worked::EX1_TBOX, worked::EX1_ASSERTION, Some(&mut diff))
    });
    run(2, "Example 1(2) validity", &mut || {
        valid_on_the_fly(&worked::EX2_TBOX, worked::EX2_ASSERTION, Some(&mut diff))
    });
    // the batch construction does not fit in memory here; see the README
    run(3, "Example 1(3) validity", &mut || {
        valid_on_the_fly(&worked::EX3_TBOX, worked::EX3_ASSERTION, None)
    });
    run(4, "Example 1(1) shifted bound", &mut || criterion_4(&mut diff));
    let corpus = random_corpus(5, 200);
    let mut six = None;
    run(5, "completeness (extracted models verify)", &mut || {
        let (a, b) = criteria_5_6(&corpus, &mut diff);
        six = Some(b);
        a
    });
    run(6, "soundness against the oracle", &mut || six.take().unwrap());
    run(7, "hardness reduction (crisp KBs)", &mut || criterion_7(&mut diff));
    run(8, "per-rule soundness", &mut criterion_8);
    run(9, "grid snapping", &mut criterion_9);
    run(10, "determinism and differential", &mut || {
        let repeat = determinism(&corpus);
        let pass = diff.disagreements.is_empty() && diff.non_injective == 0 && repeat.is_none();
        outcome(
            pass,
            format!(
                "{} problems solved both ways, {} verdict disagreements, {} non-injective caches, repeated runs {}{}",
                diff.runs,
                diff.disagreements.len(),
                diff.non_injective,
                if repeat.is_none() { "identical" } else { "differ" },
                diff.disagreements.first().map(|d| format!("; first: {d}")).unwrap_or_default()
            ),
        )
    });

    let mut failed = 0;
    for (n, name, o) in &results {
        let mark = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {n:>2} {mark}  {name}: {}", o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
