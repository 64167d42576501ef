use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use nexalc_core::grid::Grid;
use nexalc_core::model::extract_model;
use nexalc_core::oracle::{brute_force_with, classical_brute_force, crispify, Config, OracleResult};
use nexalc_core::solver::{is_valid_with, solve, Mode, Problem, Solution, Verdict};
use nexalc_core::syntax::{parse_assertion, parse_concept, parse_kb, Kb, Sequent};

/// Reasoner for fuzzy ALC with constant shifts over general TBoxes.
#[derive(Parser)]
#[command(name = "nexalc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide satisfiability of a query (and ABox) under a TBox.
    Sat(SatArgs),
    /// Decide T-validity of a single assertion.
    Valid(ValidArgs),
    /// Exhaustive search for a small grid-valued model.
    Oracle(OracleArgs),
    /// Compare a classical KB against its fuzzy encoding.
    Crisp(CrispArgs),
}

#[derive(Args)]
struct Common {
    /// Print node, expansion, cache and queue counters as JSON.
    #[arg(long)]
    stats: bool,
    /// Print the truth-value grid.
    #[arg(long)]
    print_grid: bool,
    /// Write the tableau graph, one node per line.
    #[arg(long, value_name = "FILE")]
    dump_graph: Option<PathBuf>,
    /// Write the model as JSON instead of printing it.
    #[arg(long, value_name = "FILE")]
    model: Option<PathBuf>,
}

#[derive(Args)]
struct SatArgs {
    #[arg(long, value_name = "FILE")]
    tbox: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    abox: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    query: Option<PathBuf>,
    /// Expand and decide in one pass instead of building the whole graph.
    #[arg(long)]
    on_the_fly: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct ValidArgs {
    #[arg(long, value_name = "FILE")]
    tbox: Option<PathBuf>,
    /// The assertion, e.g. "A | !A >= 0.5".
    #[arg(long)]
    assertion: String,
    /// Build the whole graph before deciding (slower, much more memory).
    #[arg(long)]
    batch: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, value_name = "FILE")]
    tbox: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    query: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    max_domain: usize,
    /// Maximum number of assignments to try.
    #[arg(long, default_value_t = 2_000_000)]
    budget: u64,
}

#[derive(Args)]
struct CrispArgs {
    #[arg(long, value_name = "FILE")]
    tbox: Option<PathBuf>,
    /// A classical concept that must be satisfied (repeatable).
    #[arg(long = "concept", required = true)]
    concepts: Vec<String>,
    #[arg(long, default_value_t = 3)]
    max_domain: usize,
}

/// An answer: the text to print and the exit code.
struct Report {
    out: String,
    code: u8,
}

fn read_kb(path: &Path) -> Result<Kb> {
    let src = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_kb(&src).with_context(|| format!("parsing {}", path.display()))
}

/// Merges every statement of the given files.
fn load(paths: &[&Option<PathBuf>]) -> Result<Kb> {
    let mut kb = Kb::default();
    for p in paths.iter().filter_map(|p| p.as_ref()) {
        let part = read_kb(p)?;
        kb.tbox.gcis.extend(part.tbox.gcis);
        kb.abox.concept_assertions.extend(part.abox.concept_assertions);
        kb.abox.role_assertions.extend(part.abox.role_assertions);
        kb.query.extend(part.query);
    }
    Ok(kb)
}

fn grid_line(g: &Grid) -> String {
    format!(
        "grid: step {}, epsilon {}, |Z| = {}, |Z'| = {}\n",
        g.step,
        g.epsilon,
        g.z.len(),
        g.z_prime.len()
    )
}

/// Shared reporting for `sat` and `valid`: grid, graph dump, stats, model.
fn finish(sol: &Solution, common: &Common, want_model: bool, out: &mut String) -> Result<()> {
    if common.print_grid {
        out.push_str(&grid_line(sol.engine.grid()));
    }
    if let Some(path) = &common.dump_graph {
        fs::write(path, sol.graph.dump(&sol.engine))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    if common.stats {
        let s = sol.stats;
        let stats = json!({
            "nodes": s.nodes,
            "expansions": s.expansions,
            "cache_hits": s.cache_hits,
            "queue_ops": s.queue_ops,
        });
        out.push_str(&serde_json::to_string_pretty(&json!({ "stats": stats }))?);
        out.push('\n');
    }
    if want_model && sol.verdict == Verdict::Sat {
        let m = extract_model(sol).context("model extraction")?;
        let json = m.interpretation.to_json();
        match &common.model {
            Some(path) => {
                fs::write(path, &json).with_context(|| format!("writing {}", path.display()))?
            }
            None => {
                out.push_str(&format!(
                    "model (designated individual {}):\n",
                    m.interpretation.name(m.designated)
                ));
                out.push_str(&json);
            }
        }
    }
    Ok(())
}

fn sat(args: &SatArgs) -> Result<Report> {
    let kb = load(&[&args.tbox, &args.abox, &args.query])?;
    let mode = if args.on_the_fly { Mode::OnTheFly } else { Mode::Batch };
    let problem = Problem::new(Sequent::new(kb.query), kb.tbox).with_abox(kb.abox);
    let sol = solve(problem, mode)?;
    let (word, code) = match sol.verdict {
        Verdict::Sat => ("SAT", 0),
        Verdict::Unsat => ("UNSAT", 1),
    };
    let mut out = format!("{word}\n");
    finish(&sol, &args.common, true, &mut out)?;
    Ok(Report { out, code })
}

fn valid(args: &ValidArgs) -> Result<Report> {
    let kb = load(&[&args.tbox])?;
    if !kb.query.is_empty() || !kb.abox.is_empty() {
        bail!("the TBox file may only contain GCIs");
    }
    let a = parse_assertion(&args.assertion).context("parsing the assertion")?;
    let mode = if args.batch { Mode::Batch } else { Mode::OnTheFly };
    let sol = is_valid_with(&a, &kb.tbox, mode)?;
    let (word, code) = match sol.verdict {
        Verdict::Unsat => ("VALID", 0),
        Verdict::Sat => ("INVALID", 1),
    };
    let mut out = format!("{word}\n");
    // a countermodel only when asked for: it satisfies the negation
    finish(&sol, &args.common, args.common.model.is_some(), &mut out)?;
    Ok(Report { out, code })
}

fn oracle(args: &OracleArgs) -> Result<Report> {
    let kb = load(&[&args.tbox, &args.query])?;
    let cfg = Config {
        max_domain: args.max_domain,
        budget: args.budget,
        refine: 1,
    };
    let query = Sequent::new(kb.query);
    Ok(match brute_force_with(&query, &kb.tbox, &kb.abox, &cfg)? {
        OracleResult::Sat(m) => Report {
            out: format!(
                "SAT\nmodel (designated individual {}):\n{}",
                m.interpretation.name(m.designated),
                m.interpretation.to_json()
            ),
            code: 0,
        },
        OracleResult::NoModelUpTo(n) => Report {
            out: format!("NO_MODEL_UP_TO({n})\n"),
            code: 1,
        },
        OracleResult::Aborted { domain, explored } => Report {
            out: format!("ABORTED at domain size {domain} after {explored} assignments\n"),
            code: 3,
        },
    })
}

fn crisp(args: &CrispArgs) -> Result<Report> {
    let kb = load(&[&args.tbox])?;
    let concepts = args
        .concepts
        .iter()
        .map(|c| parse_concept(c).with_context(|| format!("parsing `{c}`")))
        .collect::<Result<Vec<_>>>()?;
    let classical = classical_brute_force(&concepts, &kb.tbox, args.max_domain)?;
    let (query, tbox) = crispify(&concepts, &kb.tbox);
    let fuzzy = solve(Problem::new(query, tbox), Mode::Batch)?.verdict;
    let classical_sat = match &classical {
        OracleResult::Sat(_) => Some(true),
        OracleResult::NoModelUpTo(_) => Some(false),
        OracleResult::Aborted { .. } => None,
    };
    let classical_word = match &classical {
        OracleResult::Sat(_) => "SAT".to_string(),
        OracleResult::NoModelUpTo(n) => format!("NO_MODEL_UP_TO({n})"),
        OracleResult::Aborted { .. } => "ABORTED".to_string(),
    };
    let fuzzy_word = if fuzzy == Verdict::Sat { "SAT" } else { "UNSAT" };
    let agree = classical_sat == Some(fuzzy == Verdict::Sat);
    let out = format!(
        "classical: {classical_word}\nfuzzy: {fuzzy_word}\n{}\n",
        if agree { "AGREE" } else { "DISAGREE" }
    );
    Ok(Report {
        out,
        code: if agree { 0 } else { 1 },
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Sat(a) => sat(a),
        Command::Valid(a) => valid(a),
        Command::Oracle(a) => oracle(a),
        Command::Crisp(a) => crisp(a),
    };
    match result {
        Ok(r) => {
            print!("{}", r.out);
            ExitCode::from(r.code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
