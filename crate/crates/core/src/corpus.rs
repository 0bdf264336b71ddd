//! Regression corpus: JSON lines of expected relations, separating formulas,
//! observation-set comparisons and deterministic forms.

use std::collections::BTreeSet;
use std::fmt::Debug;

use serde::{Deserialize, Serialize};

use crate::constraints::ConstraintId;
use crate::error::{Error, Result};
use crate::logic::{in_sublogic_over, parse_formula, sat, SublogicId};
use crate::observations::{enum_dbgo, enum_lgo, enum_possible_worlds, BgoTable};
use crate::operational::deter;
use crate::preorders::{decide, Options, SemanticsId};
use crate::term::{Action, Canon};

/// The corpus shipped with the library.
pub const BUILTIN: &str = include_str!("../data/regression.jsonl");

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowKind {
    #[default]
    Relation,
    Formula,
    Observations,
    Deter,
}

/// One expectation. `expect` is `leq`, `geq`, `eq` or `incomparable` for
/// relations and observation sets (also `holds` and `fails` when only one
/// direction is claimed), `separates` for formulas, and the expected term for
/// `deter`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Row {
    pub name: String,
    #[serde(default)]
    pub kind: RowKind,
    pub p: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub semantics: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub formula: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observe: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constraint: Option<String>,
    pub expect: String,
    #[serde(default)]
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RowResult {
    pub name: String,
    pub ok: bool,
    pub observed: String,
    /// Set when the row could not be evaluated.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// The evaluation hit a resource cap.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub capped: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub rows: Vec<RowResult>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.ok)
    }

    pub fn failures(&self) -> impl Iterator<Item = &RowResult> {
        self.rows.iter().filter(|r| !r.ok)
    }
}

pub fn parse_corpus(text: &str) -> Result<Vec<Row>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| Error::Json(format!("line {}: {e}", i + 1))))
        .collect()
}

/// Evaluates every row; rows that cannot be evaluated fail with their error.
pub fn run_corpus(rows: &[Row], opts: &Options) -> Report {
    let rows = rows
        .iter()
        .map(|r| {
            run_row(r, opts).unwrap_or_else(|e| RowResult {
                name: r.name.clone(),
                ok: false,
                observed: String::new(),
                capped: matches!(e, Error::CapExceeded { .. }),
                error: Some(e.to_string()),
            })
        })
        .collect();
    Report { rows }
}

fn relation_word(leq: bool, geq: bool) -> &'static str {
    match (leq, geq) {
        (true, true) => "eq",
        (true, false) => "leq",
        (false, true) => "geq",
        (false, false) => "incomparable",
    }
}

fn matches(expect: &str, leq: bool, geq: bool) -> Result<bool> {
    Ok(match expect {
        "holds" => leq,
        "fails" => !leq,
        "eq" | "leq" | "geq" | "incomparable" => relation_word(leq, geq) == expect,
        other => return Err(Error::Json(format!("unknown expectation `{other}`"))),
    })
}

fn field<'a>(row: &'a Row, value: &'a Option<String>, what: &str) -> Result<&'a str> {
    value.as_deref().ok_or_else(|| Error::Json(format!("row `{}` lacks `{what}`", row.name)))
}

fn inclusion<T: Ord + Clone + Debug>(a: &[T], b: &[T]) -> (bool, bool) {
    let (a, b): (BTreeSet<&T>, BTreeSet<&T>) = (a.iter().collect(), b.iter().collect());
    (a.is_subset(&b), b.is_subset(&a))
}

pub fn run_row(row: &Row, opts: &Options) -> Result<RowResult> {
    let p = Canon::parse(&row.p)?;
    let (ok, observed) = match row.kind {
        RowKind::Relation => {
            let q = Canon::parse(field(row, &row.q, "q")?)?;
            let id: SemanticsId = field(row, &row.semantics, "semantics")?.parse()?;
            let leq = decide(id, &p, &q, opts)?.holds;
            let geq = decide(id, &q, &p, opts)?.holds;
            (matches(&row.expect, leq, geq)?, relation_word(leq, geq).to_string())
        }
        RowKind::Formula => {
            let q = Canon::parse(field(row, &row.q, "q")?)?;
            let phi = parse_formula(field(row, &row.formula, "formula")?)?;
            let alphabet: Vec<Action> = p.actions().union(&q.actions()).cloned().collect();
            let in_logic = match &row.semantics {
                Some(s) => in_sublogic_over(&phi, SublogicId::for_semantics(s.parse()?)?, Some(&alphabet)),
                None => true,
            };
            let (sp, sq) = (sat(&p, &phi), sat(&q, &phi));
            (row.expect == "separates" && in_logic && sp && !sq, format!("in logic: {in_logic}, left: {sp}, right: {sq}"))
        }
        RowKind::Observations => {
            let q = Canon::parse(field(row, &row.q, "q")?)?;
            let n: ConstraintId = row.constraint.as_deref().unwrap_or("I").parse()?;
            let (leq, geq) = match field(row, &row.observe, "observe")? {
                "lgo" => inclusion(&enum_lgo(n, &p).into_iter().collect::<Vec<_>>(), &enum_lgo(n, &q).into_iter().collect::<Vec<_>>()),
                "pw" => inclusion(
                    &enum_possible_worlds(&p).into_iter().collect::<Vec<_>>(),
                    &enum_possible_worlds(&q).into_iter().collect::<Vec<_>>(),
                ),
                "bgo" => {
                    let mut table = BgoTable::new();
                    let (ip, iq) = (table.bgo_ids(n, &p, 20)?, table.bgo_ids(n, &q, 20)?);
                    (ip.is_subset(&iq), iq.is_subset(&ip))
                }
                "dbgo" => {
                    let bound = 64;
                    let (ep, eq) = (enum_dbgo(n, &p, bound), enum_dbgo(n, &q, bound));
                    if ep.truncated || eq.truncated {
                        return Err(Error::CapExceeded { what: "observation enumeration".into(), cap: bound });
                    }
                    inclusion(&ep.items, &eq.items)
                }
                other => return Err(Error::Json(format!("unknown observation kind `{other}`"))),
            };
            (matches(&row.expect, leq, geq)?, relation_word(leq, geq).to_string())
        }
        RowKind::Deter => {
            let d = deter(&p);
            (Canon::parse(&row.expect)? == d, d.to_string())
        }
    };
    Ok(RowResult { name: row.name.clone(), ok, observed, error: None, capped: false })
}
