//! Command-line front end: compare terms across the spectrum, inspect
//! observations and formulas, check axioms and rerun regression corpora.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use bccsp::axioms::{axiom_catalog, check_soundness, Form};
use bccsp::corpus::{parse_corpus, run_corpus, BUILTIN};
use bccsp::logic::{distinguish_with, in_sublogic_over};
use bccsp::lts::{step, to_dot};
use bccsp::observations::{enum_bgo, enum_dbgo, enum_lgo, enum_possible_worlds};
use bccsp::operational::deter;
use bccsp::preorders::{spectrum_matrix, Reason, Refutation, Side};
use bccsp::term::{enumerate_terms, parse_alphabet};
use bccsp::{decide, parse_formula, sat, Canon, Comparison, ConstraintId, Engine, Error, Formula, Options};
use bccsp::{SemanticsId, SublogicId, Term, Verdict, Witness};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use thiserror::Error as ThisError;

#[derive(Parser)]
#[command(name = "bccsp", version, about = "Decide preorders of the linear time / branching time spectrum on finite process terms")]
struct Cli {
    /// Decision pathway.
    #[arg(long, global = true, value_enum, default_value_t = EngineArg::Direct)]
    engine: EngineArg,
    /// Print JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Comma separated actions added to those of the inputs.
    #[arg(long, global = true, default_value = "")]
    alphabet: String,
    /// Depth of enumerated terms.
    #[arg(long, global = true, default_value_t = 2)]
    max_depth: usize,
    /// Resource cap for saturations and enumerations.
    #[arg(long, global = true, default_value_t = 10_000)]
    cap: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Direct,
    Observational,
    Operational,
}

#[derive(Clone, Copy, ValueEnum)]
enum ObsKind {
    Lgo,
    Bgo,
    Dbgo,
    Pw,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormArg {
    Order,
    Equivalence,
}

#[derive(Subcommand)]
enum Command {
    /// Decide p ⊑ q and q ⊑ p; the exit code reports p ⊑ q.
    Compare {
        #[arg(long, short)]
        semantics: String,
        p: String,
        q: String,
    },
    /// Compare two terms under every supported semantics.
    Spectrum { p: String, q: String },
    /// Print the reachable transition graph.
    Lts {
        p: String,
        /// Graphviz output.
        #[arg(long)]
        dot: bool,
    },
    /// List the observations of a term.
    Observe {
        #[arg(long, value_enum)]
        kind: ObsKind,
        #[arg(long, default_value = "I")]
        constraint: String,
        /// Node bound for branching observations.
        #[arg(long, default_value_t = 12)]
        max_nodes: usize,
        p: String,
    },
    /// Model check a formula; exits 1 if it is false.
    CheckFormula { p: String, formula: String },
    /// Whether a formula belongs to the logic of a semantics; exits 1 if not.
    InLogic {
        #[arg(long, short)]
        semantics: String,
        formula: String,
    },
    /// A formula of the semantics' logic true at p and false at q; exits 1 if p ⊑ q.
    Distinguish {
        #[arg(long, short)]
        semantics: String,
        p: String,
        q: String,
        /// Keep every conjunct of the synthesized formula.
        #[arg(long)]
        no_minimize: bool,
    },
    /// Axiom catalogs and their soundness.
    Axioms {
        #[command(subcommand)]
        action: AxiomsCommand,
    },
    /// Merge equally labelled derivatives recursively.
    Deter { p: String },
    /// Rerun a regression corpus (JSON lines); the built-in one by default.
    Corpus { path: Option<PathBuf> },
}

#[derive(Subcommand)]
enum AxiomsCommand {
    List {
        #[arg(long, short)]
        semantics: String,
        #[arg(long, value_enum, default_value_t = FormArg::Order)]
        form: FormArg,
    },
    /// Check every instance over all terms up to the given depth and width.
    Check {
        #[arg(long, short)]
        semantics: String,
        #[arg(long, value_enum, default_value_t = FormArg::Order)]
        form: FormArg,
        /// Term depth; defaults to --max-depth.
        #[arg(long)]
        depth: Option<usize>,
        /// Summands per state.
        #[arg(long, default_value_t = 2)]
        width: usize,
    },
}

#[derive(Debug, ThisError)]
enum Failure {
    #[error("{what}: {err}\n  {input}\n  {caret}")]
    Parse { what: &'static str, input: String, caret: String, err: Error },
    #[error("{what}: {err}")]
    Input { what: &'static str, err: Error },
    #[error("{0}")]
    Lib(#[from] Error),
    #[error("{0}")]
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Lib(Error::CapExceeded { .. }) => 3,
            _ => 2,
        }
    }
}

fn parse_error(what: &'static str, input: &str, err: Error) -> Failure {
    match err {
        Error::Syntax { offset, .. } => {
            let caret = format!("{}^", " ".repeat(input.get(..offset).unwrap_or(input).chars().count()));
            Failure::Parse { what, input: input.to_string(), caret, err }
        }
        err => Failure::Input { what, err },
    }
}

/// A term in the text syntax, or in the JSON encoding when it starts with `{`.
fn term(input: &str) -> Result<Canon, Failure> {
    let parsed = if input.trim_start().starts_with('{') {
        serde_json::from_str::<Value>(input)
            .map_err(|e| Error::Json(e.to_string()))
            .and_then(|v| Term::from_json(&v))
            .and_then(|t| bccsp::canonicalize(&t))
    } else {
        Canon::parse(input)
    };
    parsed.map_err(|e| parse_error("term", input, e))
}

fn formula(input: &str) -> Result<Formula, Failure> {
    parse_formula(input).map_err(|e| parse_error("formula", input, e))
}

fn semantics(input: &str) -> Result<SemanticsId, Failure> {
    input.parse().map_err(|e| parse_error("semantics", input, e))
}

struct Ctx {
    json: bool,
    opts: Options,
    max_depth: usize,
}

impl Ctx {
    fn emit(&self, value: Value, text: impl FnOnce() -> String) {
        if self.json {
            println!("{}", serde_json::to_string_pretty(&value).expect("serializable"));
        } else {
            print!("{}", text());
        }
    }
}

fn render_witness(w: &Witness) -> String {
    match w {
        Witness::Linear { obs } => format!("  unmatched observation {obs}\n"),
        Witness::Branching { obs } => format!("  unmatched observation {obs}\n"),
        Witness::Game(r) => {
            let mut out = String::new();
            render_refutation(r, 1, &mut out);
            out
        }
    }
}

fn render_refutation(r: &Refutation, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    match &r.reason {
        Reason::Constraint => {
            let _ = writeln!(out, "{pad}{} vs {}: constraint fails", r.p, r.q);
        }
        Reason::Move { side, action, target, answers } => {
            let who = if *side == Side::Left { "left" } else { "right" };
            let _ = writeln!(out, "{pad}{} vs {}: {who} moves {action} to {target}", r.p, r.q);
            if answers.is_empty() {
                let _ = writeln!(out, "{pad}  no answer");
            }
            for a in answers {
                render_refutation(a, depth + 1, out);
            }
        }
    }
}

fn verdict_line(p: &Canon, q: &Canon, id: SemanticsId, v: &Verdict) -> String {
    let mut out = format!("{p} ⊑_{id} {q}: {}\n", if v.holds { "holds" } else { "fails" });
    if let Some(w) = &v.witness {
        out.push_str(&render_witness(w));
    }
    out
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let engine = match cli.engine {
        EngineArg::Direct => Engine::Direct,
        EngineArg::Observational => Engine::Observational,
        EngineArg::Operational => Engine::Operational,
    };
    let alphabet = parse_alphabet(&cli.alphabet).map_err(|e| parse_error("alphabet", &cli.alphabet, e))?;
    let ctx = Ctx { json: cli.json, opts: Options { engine, cap: cli.cap, alphabet }, max_depth: cli.max_depth };
    match cli.command {
        Command::Compare { semantics: s, p, q } => {
            let (id, p, q) = (semantics(&s)?, term(&p)?, term(&q)?);
            let leq = decide(id, &p, &q, &ctx.opts)?;
            let geq = decide(id, &q, &p, &ctx.opts)?;
            let cmp = Comparison::from_pair(leq.holds, geq.holds);
            ctx.emit(json!({"semantics": id, "comparison": cmp, "leq": leq, "geq": geq}), || {
                format!("{}{}{}\n", verdict_line(&p, &q, id, &leq), verdict_line(&q, &p, id, &geq), cmp.symbol())
            });
            Ok(if leq.holds { 0 } else { 1 })
        }
        Command::Spectrum { p, q } => {
            let (p, q) = (term(&p)?, term(&q)?);
            let cells = spectrum_matrix(&p, &q, &ctx.opts);
            let capped = cells.iter().any(|(_, c)| matches!(c, Err(Error::CapExceeded { .. })));
            let rows: Vec<Value> = cells
                .iter()
                .map(|(id, c)| match c {
                    Ok(c) => json!({"semantics": id, "comparison": c}),
                    Err(e) => json!({"semantics": id, "error": e.to_string()}),
                })
                .collect();
            ctx.emit(Value::Array(rows), || {
                let mut out = String::new();
                for (id, c) in &cells {
                    let cell = match c {
                        Ok(c) => c.symbol().to_string(),
                        Err(e) => format!("error: {e}"),
                    };
                    let _ = writeln!(out, "{:<8} {cell}", id.to_string());
                }
                out
            });
            Ok(if capped { 3 } else { 0 })
        }
        Command::Lts { p, dot } => {
            let p = term(&p)?;
            if dot {
                print!("{}", to_dot(&p));
                return Ok(0);
            }
            let states: Vec<Canon> = bccsp::lts::reachable(&p).into_iter().collect();
            let edges: Vec<Value> = states
                .iter()
                .flat_map(|s| step(s).into_iter().map(move |(a, t)| json!({"from": s.to_string(), "action": a, "to": t.to_string()})))
                .collect();
            ctx.emit(json!({"root": p.to_string(), "states": states.iter().map(|s| s.to_string()).collect::<Vec<_>>(), "transitions": edges}), || {
                let mut out = String::new();
                for s in &states {
                    for (a, t) in step(s) {
                        let _ = writeln!(out, "{s} --{a}--> {t}");
                    }
                }
                out
            });
            Ok(0)
        }
        Command::Observe { kind, constraint, max_nodes, p } => {
            let n: ConstraintId = constraint.parse().map_err(|e| parse_error("constraint", &constraint, e))?;
            let p = term(&p)?;
            let (items, truncated): (Vec<String>, bool) = match kind {
                ObsKind::Lgo => (enum_lgo(n, &p).iter().map(|o| o.to_string()).collect(), false),
                ObsKind::Bgo | ObsKind::Dbgo => {
                    let e = if matches!(kind, ObsKind::Bgo) { enum_bgo(n, &p, max_nodes) } else { enum_dbgo(n, &p, max_nodes) };
                    (e.items.iter().map(|o| o.to_string()).collect(), e.truncated)
                }
                ObsKind::Pw => (enum_possible_worlds(&p).iter().map(|w| w.to_string()).collect(), false),
            };
            ctx.emit(json!(items), || items.iter().map(|i| format!("{i}\n")).collect());
            if truncated {
                eprintln!("warning: observations with more than {max_nodes} nodes were omitted");
                return Ok(3);
            }
            Ok(0)
        }
        Command::CheckFormula { p, formula: f } => {
            let (p, f) = (term(&p)?, formula(&f)?);
            let holds = sat(&p, &f);
            ctx.emit(json!({"holds": holds}), || format!("{p} ⊨ {f}: {holds}\n"));
            Ok(if holds { 0 } else { 1 })
        }
        Command::InLogic { semantics: s, formula: f } => {
            let (id, f) = (semantics(&s)?, formula(&f)?);
            let logic = SublogicId::for_semantics(id)?;
            let alphabet = (!ctx.opts.alphabet.is_empty()).then_some(ctx.opts.alphabet.as_slice());
            let member = in_sublogic_over(&f, logic, alphabet);
            ctx.emit(json!({"logic": logic.to_string(), "member": member}), || format!("{f} ∈ {logic}: {member}\n"));
            Ok(if member { 0 } else { 1 })
        }
        Command::Distinguish { semantics: s, p, q, no_minimize } => {
            let (id, p, q) = (semantics(&s)?, term(&p)?, term(&q)?);
            let found = distinguish_with(id, &p, &q, &ctx.opts.alphabet, !no_minimize)?;
            ctx.emit(json!({"formula": found}), || match &found {
                Some(f) => format!("{f}\n"),
                None => format!("{p} ⊑_{id} {q}: no distinguishing formula\n"),
            });
            Ok(if found.is_some() { 0 } else { 1 })
        }
        Command::Axioms { action } => {
            let form = |f: FormArg| if matches!(f, FormArg::Order) { Form::Order } else { Form::Equivalence };
            match action {
                AxiomsCommand::List { semantics: s, form: f } => {
                    let catalog = axiom_catalog(semantics(&s)?, form(f))?;
                    ctx.emit(json!(catalog), || catalog.iter().map(|a| format!("{a}\n")).collect());
                    Ok(0)
                }
                AxiomsCommand::Check { semantics: s, form: f, depth, width } => {
                    let id = semantics(&s)?;
                    let catalog = axiom_catalog(id, form(f))?;
                    let alphabet = if ctx.opts.alphabet.is_empty() { parse_alphabet("a,b")? } else { ctx.opts.alphabet.clone() };
                    let pool = enumerate_terms(&alphabet, depth.unwrap_or(ctx.max_depth), width);
                    let reports = catalog
                        .iter()
                        .map(|ax| check_soundness(ax, id, &pool, &alphabet, 3))
                        .collect::<bccsp::Result<Vec<_>>>()?;
                    let sound = reports.iter().all(|r| r.is_sound());
                    ctx.emit(json!(reports), || {
                        let mut out = String::new();
                        for r in &reports {
                            let status = if r.is_sound() { "sound" } else { "UNSOUND" };
                            let _ = writeln!(out, "({}) {status} on {} instances", r.axiom, r.instances);
                            for v in &r.violations {
                                let sub: Vec<String> = v.substitution.iter().map(|(x, t)| format!("{x} = {t}")).collect();
                                let _ = writeln!(out, "  a = {}, {}: {} vs {}", v.action, sub.join(", "), v.lhs, v.rhs);
                            }
                        }
                        out
                    });
                    Ok(if sound { 0 } else { 1 })
                }
            }
        }
        Command::Deter { p } => {
            let d = deter(&term(&p)?);
            ctx.emit(json!({"term": d.to_string(), "json": d}), || format!("{d}\n"));
            Ok(0)
        }
        Command::Corpus { path } => {
            let text = match &path {
                Some(path) => std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?,
                None => BUILTIN.to_string(),
            };
            let rows = parse_corpus(&text)?;
            let report = run_corpus(&rows, &ctx.opts);
            ctx.emit(json!(report), || {
                let mut out = String::new();
                for r in &report.rows {
                    let status = if r.ok { "ok" } else { "MISMATCH" };
                    let _ = write!(out, "{status:<8} {} ({})", r.name, r.observed);
                    if let Some(e) = &r.error {
                        let _ = write!(out, ": {e}");
                    }
                    out.push('\n');
                }
                let failed = report.failures().count();
                let _ = writeln!(out, "{} rows, {failed} mismatches", report.rows.len());
                out
            });
            Ok(if report.passed() { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
