//! Hennessy-Milner formulas, satisfaction, the sublogic grammars of every
//! point of the spectrum, and distinguishing-formula synthesis.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::constraints::{local_eq, local_obs, ConstraintId, LocalCtx, LocalObs};
use crate::error::{Error, Result};
use crate::lts::{initials, traces, Trace};
use crate::observations::{BranchingObs, LinearObs};
use crate::preorders::branching::{bisim_refutation, sim_refutation};
use crate::preorders::linear::{final_ok, least_failure, mid_ok};
use crate::preorders::sim::{bisimulation, simulation};
use crate::preorders::{decide, joint, similar, Flavor, Options, Reason, Refutation, SemanticsId, Side, Witness};
use crate::term::{Action, Canon};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Top,
    Conj(Vec<Formula>),
    Neg(Box<Formula>),
    Diamond(Action, Box<Formula>),
}

impl Formula {
    pub fn negate(f: Formula) -> Formula {
        Formula::Neg(Box::new(f))
    }

    pub fn diamond(a: Action, f: Formula) -> Formula {
        Formula::Diamond(a, Box::new(f))
    }

    /// `⟨a⟩⊤`.
    pub fn can(a: &Action) -> Formula {
        Formula::diamond(a.clone(), Formula::Top)
    }

    /// Conjunction with `⊤` members dropped and nested conjunctions flattened.
    pub fn and(items: impl IntoIterator<Item = Formula>) -> Formula {
        let mut out = Vec::new();
        for f in items {
            match f {
                Formula::Top => {}
                Formula::Conj(v) => out.extend(flatten(&Formula::Conj(v))),
                f => out.push(f),
            }
        }
        match out.len() {
            0 => Formula::Top,
            1 => out.pop().unwrap(),
            _ => Formula::Conj(out),
        }
    }

    /// `⟨a1⟩…⟨an⟩ body`.
    pub fn chain(trace: &[Action], body: Formula) -> Formula {
        trace.iter().rev().fold(body, |acc, a| Formula::diamond(a.clone(), acc))
    }

    /// The terminated-process formula `⋀_{b∈alphabet} ¬⟨b⟩⊤`.
    pub fn zero(alphabet: &[Action]) -> Formula {
        let items: Vec<Formula> = alphabet.iter().map(|b| Formula::negate(Formula::can(b))).collect();
        if items.len() == 1 {
            items.into_iter().next().unwrap()
        } else {
            Formula::Conj(items)
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::Top => 1,
            Formula::Conj(v) => 1 + v.iter().map(Formula::size).sum::<usize>(),
            Formula::Neg(f) | Formula::Diamond(_, f) => 1 + f.size(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Formula::Top => 0,
            Formula::Conj(v) => v.iter().map(Formula::depth).max().unwrap_or(0),
            Formula::Neg(f) => f.depth(),
            Formula::Diamond(_, f) => 1 + f.depth(),
        }
    }

    pub fn actions(&self) -> BTreeSet<Action> {
        let mut out = BTreeSet::new();
        self.collect_actions(&mut out);
        out
    }

    fn collect_actions(&self, out: &mut BTreeSet<Action>) {
        match self {
            Formula::Top => {}
            Formula::Conj(v) => v.iter().for_each(|f| f.collect_actions(out)),
            Formula::Neg(f) => f.collect_actions(out),
            Formula::Diamond(a, f) => {
                out.insert(a.clone());
                f.collect_actions(out);
            }
        }
    }
}

/// Members of nested top-level conjunctions, without `⊤`.
pub fn flatten(f: &Formula) -> Vec<Formula> {
    match f {
        Formula::Top => Vec::new(),
        Formula::Conj(v) => v.iter().flat_map(flatten).collect(),
        f => vec![f.clone()],
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn atom(x: &Formula, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match x {
                Formula::Conj(v) if v.len() > 1 => write!(f, "({x})"),
                _ => write!(f, "{x}"),
            }
        }
        match self {
            Formula::Top => f.write_str("T"),
            Formula::Conj(v) if v.is_empty() => f.write_str("T"),
            Formula::Conj(v) => {
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" & ")?;
                    }
                    atom(x, f)?;
                }
                Ok(())
            }
            Formula::Neg(x) => {
                f.write_str("~")?;
                atom(x, f)
            }
            Formula::Diamond(a, x) => {
                write!(f, "<{a}>")?;
                atom(x, f)
            }
        }
    }
}

impl Serialize for Formula {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl FromStr for Formula {
    type Err = Error;
    fn from_str(s: &str) -> Result<Formula> {
        parse_formula(s)
    }
}

/// Parses `T`, `~F`, `<a>F`, `F & F` and parentheses; the symbols `⊤ ¬ ∧ ⟨a⟩`
/// are accepted as well.
pub fn parse_formula(text: &str) -> Result<Formula> {
    let mut p = FormulaParser { text, pos: 0 };
    let f = p.conj()?;
    p.skip_ws();
    if p.pos < text.len() {
        return Err(p.error(&["`&`", "end of input"]));
    }
    Ok(f)
}

struct FormulaParser<'a> {
    text: &'a str,
    pos: usize,
}

impl FormulaParser<'_> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn eat(&mut self, options: &[&str]) -> bool {
        self.skip_ws();
        for o in options {
            if self.text[self.pos..].starts_with(o) {
                self.pos += o.len();
                return true;
            }
        }
        false
    }

    fn error(&self, expected: &[&str]) -> Error {
        Error::Syntax { offset: self.pos, expected: expected.iter().map(|s| s.to_string()).collect() }
    }

    fn conj(&mut self) -> Result<Formula> {
        let mut items = vec![self.unary()?];
        while self.eat(&["&", "∧"]) {
            items.push(self.unary()?);
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { Formula::Conj(items) })
    }

    fn unary(&mut self) -> Result<Formula> {
        if self.eat(&["~", "¬"]) {
            return Ok(Formula::negate(self.unary()?));
        }
        if self.eat(&["<", "⟨"]) {
            self.skip_ws();
            let start = self.pos;
            while let Some(c) = self.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    self.pos += 1;
                } else {
                    break;
                }
            }
            let a = Action::new(&self.text[start..self.pos]).map_err(|_| Error::Syntax { offset: start, expected: vec!["an action".into()] })?;
            if !self.eat(&[">", "⟩"]) {
                return Err(self.error(&["`>`"]));
            }
            return Ok(Formula::diamond(a, self.unary()?));
        }
        if self.eat(&["T", "⊤"]) {
            return Ok(Formula::Top);
        }
        if self.eat(&["("]) {
            let f = self.conj()?;
            if !self.eat(&[")"]) {
                return Err(self.error(&["`)`", "`&`"]));
            }
            return Ok(f);
        }
        Err(self.error(&["`T`", "`~`", "`<`", "`(`"]))
    }
}

pub fn sat(p: &Canon, f: &Formula) -> bool {
    match f {
        Formula::Top => true,
        Formula::Conj(v) => v.iter().all(|g| sat(p, g)),
        Formula::Neg(g) => !sat(p, g),
        Formula::Diamond(a, g) => p.summands().iter().any(|(b, q)| a == b && sat(q, g)),
    }
}

/// Recognizes `⋀ ¬⟨b⟩⊤` over the alphabet; with no alphabet any nonempty such
/// conjunction counts.
fn is_zero(f: &Formula, alphabet: Option<&[Action]>) -> bool {
    let members = flatten(f);
    let mut seen = BTreeSet::new();
    for m in &members {
        match m {
            Formula::Neg(g) => match &**g {
                Formula::Diamond(b, body) if **body == Formula::Top || flatten(body).is_empty() => {
                    seen.insert(b.clone());
                }
                _ => return false,
            },
            _ => return false,
        }
    }
    match alphabet {
        Some(alpha) => !alpha.is_empty() && alpha.iter().all(|a| seen.contains(a)),
        None => !seen.is_empty(),
    }
}

fn is_top(f: &Formula) -> bool {
    flatten(f).is_empty()
}

fn is_can(f: &Formula) -> bool {
    matches!(f, Formula::Diamond(_, body) if is_top(body))
}

/// Membership in the base logic `L′_N` of a constraint.
pub fn in_base(n: ConstraintId, f: &Formula, alphabet: Option<&[Action]>) -> bool {
    let not_zero = |f: &Formula| matches!(f, Formula::Neg(g) if is_zero(g, alphabet));
    match n {
        ConstraintId::U => is_top(f),
        ConstraintId::C => is_top(f) || not_zero(f),
        ConstraintId::I => is_top(f) || not_zero(f) || is_can(f),
        ConstraintId::T => is_chain(f),
        ConstraintId::S => is_positive(f),
    }
}

fn is_chain(f: &Formula) -> bool {
    match f {
        f if is_top(f) => true,
        Formula::Diamond(_, g) => is_chain(g),
        _ => false,
    }
}

fn is_positive(f: &Formula) -> bool {
    match f {
        Formula::Top => true,
        Formula::Conj(v) => v.iter().all(is_positive),
        Formula::Diamond(_, g) => is_positive(g),
        Formula::Neg(_) => false,
    }
}

/// Base formulas of `L′_N` up to the given modal depth.
pub fn base_constraint_logic(n: ConstraintId, alphabet: &[Action], depth: usize) -> Vec<Formula> {
    let mut out = vec![Formula::Top];
    match n {
        ConstraintId::U => {}
        ConstraintId::C => out.push(Formula::negate(Formula::zero(alphabet))),
        ConstraintId::I => {
            out.push(Formula::negate(Formula::zero(alphabet)));
            out.extend(alphabet.iter().map(Formula::can));
        }
        ConstraintId::T => {
            let mut level = vec![Formula::Top];
            for _ in 0..depth {
                level = level.iter().flat_map(|f| alphabet.iter().map(move |a| Formula::diamond(a.clone(), f.clone()))).collect();
                out.extend(level.iter().cloned());
            }
        }
        ConstraintId::S => {
            let mut level: Vec<Formula> = vec![Formula::Top];
            for _ in 0..depth {
                let atoms: Vec<Formula> =
                    alphabet.iter().flat_map(|a| level.iter().map(move |f| Formula::diamond(a.clone(), f.clone()))).collect();
                let mut next: BTreeSet<Formula> = level.iter().cloned().collect();
                next.extend(atoms.iter().cloned());
                for (i, x) in atoms.iter().enumerate() {
                    for y in &atoms[i + 1..] {
                        next.insert(Formula::Conj(vec![x.clone(), y.clone()]));
                    }
                }
                level = next.into_iter().collect();
            }
            out = level;
        }
    }
    out
}

/// The three closures of a base logic under conjunction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Closure {
    /// Base formulas and their negations.
    Symmetric,
    /// Negated base formulas.
    Negative,
    /// Base formulas.
    Positive,
}

fn closure_member(k: Closure, n: ConstraintId, f: &Formula, alphabet: Option<&[Action]>) -> bool {
    let neg = matches!(f, Formula::Neg(g) if in_base(n, g, alphabet));
    match k {
        Closure::Symmetric => neg || in_base(n, f, alphabet),
        Closure::Negative => neg,
        Closure::Positive => in_base(n, f, alphabet),
    }
}

pub fn in_closure(k: Closure, n: ConstraintId, f: &Formula, alphabet: Option<&[Action]>) -> bool {
    if k == Closure::Positive && in_base(n, f, alphabet) {
        return true;
    }
    flatten(f).iter().all(|m| closure_member(k, n, m, alphabet))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SublogicId {
    /// All of HML.
    B,
    NS(ConstraintId),
    D(ConstraintId),
    Linear(ConstraintId, Flavor),
}

impl SublogicId {
    /// The logic characterizing a semantics, when one is implemented.
    pub fn for_semantics(id: SemanticsId) -> Result<SublogicId> {
        use ConstraintId::*;
        let n = id.constraint;
        let unsupported = || Error::Unsupported(format!("{id} has no logical characterization here"));
        Ok(match id.flavor {
            Flavor::Bisim => SublogicId::B,
            Flavor::B => SublogicId::NS(n),
            Flavor::Db => SublogicId::D(n),
            f if collapses_to_lf(n, f) => SublogicId::Linear(n, Flavor::Lf),
            Flavor::Meet if n == I => SublogicId::Linear(I, Flavor::Meet),
            Flavor::Meet => return Err(unsupported()),
            f if f.is_linear() => SublogicId::Linear(n, f),
            _ => return Err(unsupported()),
        })
    }
}

impl fmt::Display for SublogicId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SublogicId::B => f.write_str("B"),
            SublogicId::NS(n) => write!(f, "NS({n})"),
            SublogicId::D(n) => write!(f, "D({n})"),
            SublogicId::Linear(n, fl) => write!(f, "{fl}({n})"),
        }
    }
}

/// At U and C every linear flavor coincides with lf and uses its logic.
fn collapses_to_lf(n: ConstraintId, f: Flavor) -> bool {
    matches!(n, ConstraintId::U | ConstraintId::C) && f.is_linear()
}

fn closure_of(f: Flavor) -> Closure {
    match f {
        Flavor::L | Flavor::Lf => Closure::Symmetric,
        Flavor::LSup | Flavor::LfSup => Closure::Negative,
        _ => Closure::Positive,
    }
}

pub fn in_sublogic(f: &Formula, id: SublogicId) -> bool {
    in_sublogic_over(f, id, None)
}

/// Grammar membership; `alphabet` fixes the meaning of the terminated-process
/// formula inside `¬0`.
pub fn in_sublogic_over(f: &Formula, id: SublogicId, alphabet: Option<&[Action]>) -> bool {
    match id {
        SublogicId::B => true,
        SublogicId::NS(n) => in_ns(n, f, alphabet),
        SublogicId::D(n) => in_d(n, f, alphabet),
        SublogicId::Linear(n, fl) => match fl {
            Flavor::L | Flavor::LSup | Flavor::LSub => in_pointwise(closure_of(fl), n, f, alphabet),
            Flavor::Lf | Flavor::LfSup | Flavor::LfSub => in_final(closure_of(fl), n, f, alphabet),
            Flavor::Join => in_join(n, f, alphabet),
            Flavor::Meet => in_meet(n, f, alphabet),
            _ => false,
        },
    }
}

fn in_ns(n: ConstraintId, f: &Formula, alphabet: Option<&[Action]>) -> bool {
    match f {
        f if in_base(n, f, alphabet) => true,
        Formula::Top => true,
        Formula::Conj(v) => v.iter().all(|g| in_ns(n, g, alphabet)),
        Formula::Diamond(_, g) => in_ns(n, g, alphabet),
        Formula::Neg(g) => in_base(n, g, alphabet),
    }
}

fn in_d(n: ConstraintId, f: &Formula, alphabet: Option<&[Action]>) -> bool {
    let mut seen = BTreeSet::new();
    for m in flatten(f) {
        if closure_member(Closure::Symmetric, n, &m, alphabet) {
            continue;
        }
        match &m {
            Formula::Diamond(a, g) if seen.insert(a.clone()) && in_d(n, g, alphabet) => {}
            _ => return false,
        }
    }
    true
}

fn in_pointwise(k: Closure, n: ConstraintId, f: &Formula, alphabet: Option<&[Action]>) -> bool {
    let mut rest = Vec::new();
    for m in flatten(f) {
        if !closure_member(k, n, &m, alphabet) {
            rest.push(m);
        }
    }
    match rest.as_slice() {
        [] => true,
        [Formula::Diamond(_, g)] => in_pointwise(k, n, g, alphabet),
        _ => false,
    }
}

fn in_final(k: Closure, n: ConstraintId, f: &Formula, alphabet: Option<&[Action]>) -> bool {
    if in_closure(k, n, f, alphabet) {
        return true;
    }
    match flatten(f).as_slice() {
        [Formula::Diamond(_, g)] => in_final(k, n, g, alphabet),
        _ => false,
    }
}

fn in_join(n: ConstraintId, f: &Formula, alphabet: Option<&[Action]>) -> bool {
    if in_closure(Closure::Symmetric, n, f, alphabet) {
        return true;
    }
    let mut rest = Vec::new();
    for m in flatten(f) {
        if !closure_member(Closure::Negative, n, &m, alphabet) {
            rest.push(m);
        }
    }
    matches!(rest.as_slice(), [Formula::Diamond(_, g)] if in_join(n, g, alphabet))
}

fn in_meet(n: ConstraintId, f: &Formula, alphabet: Option<&[Action]>) -> bool {
    let members = flatten(f);
    if let [Formula::Diamond(_, g)] = members.as_slice() {
        if in_meet(n, g, alphabet) {
            return true;
        }
    }
    let rest: Vec<&Formula> = members.iter().filter(|m| !closure_member(Closure::Negative, n, m, alphabet)).collect();
    match rest.as_slice() {
        [] => true,
        [m] => is_can(m),
        _ => false,
    }
}

/// Formula satisfied exactly by the states whose label equals `l`.
fn exact_label(l: &LocalObs, alphabet: &[Action]) -> Result<Formula> {
    Ok(match l {
        LocalObs::Unit => Formula::Top,
        LocalObs::Terminated(true) => Formula::negate(Formula::negate(Formula::zero(alphabet))),
        LocalObs::Terminated(false) => Formula::negate(Formula::zero(alphabet)),
        LocalObs::Offer(_) | LocalObs::Traces(_) => Formula::and([positive_label(l, alphabet)?, negative_label(l, alphabet)?]),
        LocalObs::SimClass(_) => return Err(Error::Unsupported("observation formulas for the S constraint".into())),
    })
}

/// Satisfied exactly by the states whose label is contained in `l`.
fn negative_label(l: &LocalObs, alphabet: &[Action]) -> Result<Formula> {
    Ok(match l {
        LocalObs::Unit | LocalObs::Terminated(false) => Formula::Top,
        LocalObs::Terminated(true) => Formula::negate(Formula::negate(Formula::zero(alphabet))),
        LocalObs::Offer(x) => Formula::and(alphabet.iter().filter(|b| !x.contains(*b)).map(|b| Formula::negate(Formula::can(b)))),
        LocalObs::Traces(t) => Formula::and(minimal_non_members(t, alphabet).iter().map(|s| Formula::negate(Formula::chain(s, Formula::Top)))),
        LocalObs::SimClass(_) => return Err(Error::Unsupported("observation formulas for the S constraint".into())),
    })
}

/// Satisfied exactly by the states whose label contains `l`.
fn positive_label(l: &LocalObs, alphabet: &[Action]) -> Result<Formula> {
    Ok(match l {
        LocalObs::Unit | LocalObs::Terminated(true) => Formula::Top,
        LocalObs::Terminated(false) => Formula::negate(Formula::zero(alphabet)),
        LocalObs::Offer(x) => Formula::and(x.iter().map(Formula::can)),
        LocalObs::Traces(t) => Formula::and(maximal_members(t).iter().map(|s| Formula::chain(s, Formula::Top))),
        LocalObs::SimClass(_) => return Err(Error::Unsupported("observation formulas for the S constraint".into())),
    })
}

fn maximal_members(t: &BTreeSet<Trace>) -> Vec<Trace> {
    t.iter().filter(|s| !t.iter().any(|u| u.len() > s.len() && u.starts_with(s))).cloned().collect()
}

fn minimal_non_members(t: &BTreeSet<Trace>, alphabet: &[Action]) -> Vec<Trace> {
    let mut out = Vec::new();
    for s in t {
        for b in alphabet {
            let mut u = s.clone();
            u.push(b.clone());
            if !t.contains(&u) {
                out.push(u);
            }
        }
    }
    out
}

/// An observation of either shape.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Observation {
    Linear(LinearObs),
    Branching(BranchingObs),
}

/// The normal formula of an observation: a term satisfies it iff it has the
/// observation (for linear flavors, up to the flavor's closure).
pub fn formula_from_observation(obs: &Observation, id: SublogicId, alphabet: &[Action]) -> Result<Formula> {
    match (obs, id) {
        (Observation::Branching(t), SublogicId::NS(_) | SublogicId::D(_)) => {
            if matches!(id, SublogicId::D(_)) && !t.is_deterministic() {
                return Err(Error::Unsupported("a nondeterministic observation has no deterministic formula".into()));
            }
            branching_formula(t, alphabet)
        }
        (Observation::Linear(t), SublogicId::Linear(_, fl)) => {
            let n = t.len();
            let label = |i: usize, last: bool| -> Result<Formula> {
                let l = t.label(i);
                match (fl, last) {
                    (Flavor::L, _) | (Flavor::Lf | Flavor::Join, true) => exact_label(l, alphabet),
                    (Flavor::LSup, _) | (Flavor::LfSup, true) | (Flavor::Join, false) => negative_label(l, alphabet),
                    (Flavor::LSub, _) | (Flavor::LfSub, true) => positive_label(l, alphabet),
                    (Flavor::Lf | Flavor::LfSup | Flavor::LfSub, false) => Ok(Formula::Top),
                    _ => Err(Error::Unsupported(format!("observation formulas for {fl}"))),
                }
            };
            let mut f = label(n, true)?;
            for i in (0..n).rev() {
                f = Formula::and([label(i, false)?, Formula::diamond(t.steps[i].0.clone(), f)]);
            }
            Ok(f)
        }
        _ => Err(Error::Unsupported(format!("observation formulas for {id}"))),
    }
}

fn branching_formula(t: &BranchingObs, alphabet: &[Action]) -> Result<Formula> {
    let mut items = vec![exact_label(&t.label, alphabet)?];
    for (a, c) in &t.children {
        items.push(Formula::diamond(a.clone(), branching_formula(c, alphabet)?));
    }
    Ok(Formula::and(items))
}

/// `χ(x)`: satisfied by `y` iff `x` is simulated by `y`.
pub fn sim_formula(x: &Canon) -> Formula {
    Formula::and(x.summands().iter().map(|(a, b)| Formula::diamond(a.clone(), sim_formula(b))))
}

fn least_trace_in(a: &BTreeSet<Trace>, b: &BTreeSet<Trace>) -> Option<Trace> {
    a.iter().filter(|t| !b.contains(*t)).min_by(|s, t| s.len().cmp(&t.len()).then_with(|| s.cmp(t))).cloned()
}

/// A formula true at `x` and false at `y`, built from base formulas of `L′_N`
/// and their negations; `None` if the labels are equal.
pub fn eq_separator(n: ConstraintId, x: &Canon, y: &Canon, alphabet: &[Action]) -> Option<Formula> {
    covers_separator(n, x, y, alphabet).or_else(|| mirrored_separator(n, x, y, alphabet))
}

/// True at `x`, false at `y`, in the negative closure; exists iff the label of
/// `x` does not cover that of `y`.
pub fn covers_separator(n: ConstraintId, x: &Canon, y: &Canon, alphabet: &[Action]) -> Option<Formula> {
    match n {
        ConstraintId::U => None,
        ConstraintId::C => (x.is_nil() && !y.is_nil()).then(|| Formula::negate(Formula::negate(Formula::zero(alphabet)))),
        ConstraintId::I => initials(y).difference(&initials(x)).next().map(|b| Formula::negate(Formula::can(b))),
        ConstraintId::T => least_trace_in(&traces(y), &traces(x)).map(|t| Formula::negate(Formula::chain(&t, Formula::Top))),
        ConstraintId::S => (!similar(y, x)).then(|| Formula::negate(sim_formula(y))),
    }
}

/// True at `x`, false at `y`, in the positive closure; exists iff the label of
/// `y` does not cover that of `x`.
pub fn mirrored_separator(n: ConstraintId, x: &Canon, y: &Canon, alphabet: &[Action]) -> Option<Formula> {
    match n {
        ConstraintId::U => None,
        ConstraintId::C => (!x.is_nil() && y.is_nil()).then(|| Formula::negate(Formula::zero(alphabet))),
        ConstraintId::I => initials(x).difference(&initials(y)).next().map(Formula::can),
        ConstraintId::T => least_trace_in(&traces(x), &traces(y)).map(|t| Formula::chain(&t, Formula::Top)),
        ConstraintId::S => (!similar(x, y)).then(|| sim_formula(x)),
    }
}

/// Synthesizes a formula of the characterizing logic that `p` satisfies and
/// `q` does not; `None` iff `p ⊑ q`. The alphabet is that of the two terms
/// plus `extra`.
pub fn distinguish(id: SemanticsId, p: &Canon, q: &Canon) -> Result<Option<Formula>> {
    distinguish_with(id, p, q, &[], true)
}

pub fn distinguish_with(id: SemanticsId, p: &Canon, q: &Canon, extra: &[Action], minimize: bool) -> Result<Option<Formula>> {
    let logic = SublogicId::for_semantics(id)?;
    let opts = Options { alphabet: extra.to_vec(), ..Options::default() };
    let (lts, ip, iq) = joint(p, q, extra)?;
    let alphabet = lts.alphabet().to_vec();
    let n = id.constraint;
    let f = match id.flavor {
        Flavor::Bisim => {
            let rel = bisimulation(&lts);
            if rel.get(ip, iq) {
                return Ok(None);
            }
            game_formula(&bisim_refutation(&lts, &rel, ip, iq), n, &alphabet)
        }
        Flavor::B => {
            let ctx = LocalCtx::new(n, &lts);
            let rel = simulation(&lts, |x, y| ctx.eq(x, y));
            if rel.get(ip, iq) {
                return Ok(None);
            }
            game_formula(&sim_refutation(&lts, &ctx, &rel, ip, iq), n, &alphabet)
        }
        Flavor::Db => {
            let v = decide(id, p, q, &opts)?;
            let Some(Witness::Branching { obs }) = v.witness else { return Ok(None) };
            let root = realize(n, &obs, p).ok_or_else(|| Error::Unsupported("witness not realizable".into()))?;
            det_formula(n, &root, std::slice::from_ref(q), &alphabet)
        }
        Flavor::Meet if n == ConstraintId::I => {
            let ctx = LocalCtx::new(n, &lts);
            let Some(path) = least_failure(&ctx, Flavor::Meet, ip, iq) else { return Ok(None) };
            let trace: Vec<Action> = path.steps.iter().map(|&(a, _)| alphabet[a].clone()).collect();
            let x = lts.state(path.states().last().unwrap()).clone();
            let finals = after_trace(q, &trace);
            let xs = initials(&x);
            let refusals: Vec<Formula> = alphabet.iter().filter(|b| !xs.contains(*b)).map(|b| Formula::negate(Formula::can(b))).collect();
            let end = if xs.is_empty() {
                Formula::zero(&alphabet)
            } else {
                let below: Vec<BTreeSet<Action>> = finals.iter().map(initials).filter(|o| o.is_subset(&xs)).collect();
                let a = xs.iter().find(|a| !below.iter().any(|o| o.contains(*a))).or_else(|| xs.iter().next()).unwrap();
                Formula::and(refusals.into_iter().chain([Formula::can(a)]))
            };
            Formula::chain(&trace, end)
        }
        fl => {
            let fl = if collapses_to_lf(n, fl) { Flavor::Lf } else { fl };
            let ctx = LocalCtx::new(n, &lts);
            let Some(path) = least_failure(&ctx, fl, ip, iq) else { return Ok(None) };
            let xs: Vec<usize> = path.states().collect();
            let mut reached = vec![iq];
            let mut sigmas = Vec::new();
            for (i, &x) in xs.iter().enumerate() {
                let last = i + 1 == xs.len();
                let mut items = Vec::new();
                for &y in &reached {
                    let ok = if last { final_ok(&ctx, fl, x, y) } else { mid_ok(&ctx, fl, x, y) };
                    if !ok {
                        let (px, qy) = (lts.state(x), lts.state(y));
                        let sep = match separator_kind(fl, last) {
                            Sep::Eq => eq_separator(n, px, qy, &alphabet),
                            Sep::Covers => covers_separator(n, px, qy, &alphabet),
                            Sep::Mirrored => mirrored_separator(n, px, qy, &alphabet),
                        };
                        items.push(sep.expect("a failed match has a separator"));
                    }
                }
                sigmas.push(Formula::and(items));
                if !last {
                    let a = path.steps[i].0;
                    let next: BTreeSet<usize> = reached.iter().flat_map(|&y| lts.succ_by(y, a)).collect();
                    reached = next.into_iter().collect();
                }
            }
            let mut f = sigmas.pop().unwrap();
            for (i, s) in sigmas.into_iter().enumerate().rev() {
                f = Formula::and([s, Formula::diamond(alphabet[path.steps[i].0].clone(), f)]);
            }
            f
        }
    };
    debug_assert!(sat(p, &f) && !sat(q, &f));
    Ok(Some(if minimize { minimize_formula(f, p, q, logic, &alphabet) } else { f }))
}

enum Sep {
    Eq,
    Covers,
    Mirrored,
}

fn separator_kind(fl: Flavor, last: bool) -> Sep {
    match (fl, last) {
        (Flavor::L | Flavor::Lf, _) | (Flavor::Join, true) => Sep::Eq,
        (Flavor::LSup | Flavor::LfSup | Flavor::Join, _) => Sep::Covers,
        _ => Sep::Mirrored,
    }
}

fn after_trace(q: &Canon, trace: &[Action]) -> Vec<Canon> {
    let mut cur = vec![q.clone()];
    for a in trace {
        cur = cur.iter().flat_map(|s| s.summands().iter().filter(|(b, _)| b == a).map(|(_, t)| t.clone())).collect();
        cur.sort();
        cur.dedup();
    }
    cur
}

/// Formula of a refuted game: true at `r.p`, false at `r.q`.
fn game_formula(r: &Refutation, n: ConstraintId, alphabet: &[Action]) -> Formula {
    match &r.reason {
        Reason::Constraint => eq_separator(n, &r.p, &r.q, alphabet).expect("constraint failure has a separator"),
        Reason::Move { side: Side::Left, action, answers, .. } => {
            Formula::diamond(action.clone(), Formula::and(answers.iter().map(|s| game_formula(s, n, alphabet))))
        }
        Reason::Move { side: Side::Right, action, answers, .. } => Formula::negate(Formula::diamond(
            action.clone(),
            Formula::and(answers.iter().map(|s| Formula::negate(game_formula(s, n, alphabet)))),
        )),
    }
}

/// A deterministic observation laid over states of a term.
struct Realized {
    state: Canon,
    children: Vec<(Action, Realized)>,
}

fn realize(n: ConstraintId, t: &BranchingObs, p: &Canon) -> Option<Realized> {
    if !local_eq(n, &t.label, &local_obs(n, p)).unwrap_or(false) {
        return None;
    }
    let mut children = Vec::new();
    for (a, c) in &t.children {
        let r = p.summands().iter().filter(|(b, _)| b == a).find_map(|(_, p1)| realize(n, c, p1))?;
        children.push((a.clone(), r));
    }
    Some(Realized { state: p.clone(), children })
}

/// Separates the realization from every state of `others`, which are the
/// right states reached by the same trace.
fn det_formula(n: ConstraintId, r: &Realized, others: &[Canon], alphabet: &[Action]) -> Formula {
    let mut items: Vec<Formula> = others.iter().filter_map(|y| eq_separator(n, &r.state, y, alphabet)).collect();
    for (a, c) in &r.children {
        let next: BTreeSet<Canon> =
            others.iter().flat_map(|y| y.summands().iter().filter(|(b, _)| b == a).map(|(_, t)| t.clone())).collect();
        let next: Vec<Canon> = next.into_iter().collect();
        items.push(Formula::diamond(a.clone(), det_formula(n, c, &next, alphabet)));
    }
    Formula::and(items)
}

/// Greedily drops conjuncts while the formula still separates and stays in the logic.
pub fn minimize_formula(f: Formula, p: &Canon, q: &Canon, logic: SublogicId, alphabet: &[Action]) -> Formula {
    let ok = |g: &Formula| sat(p, g) && !sat(q, g) && in_sublogic_over(g, logic, Some(alphabet));
    let mut best = f;
    loop {
        let mut improved = false;
        for cand in removals(&best) {
            if cand.size() < best.size() && ok(&cand) {
                best = cand;
                improved = true;
                break;
            }
        }
        if !improved {
            return best;
        }
    }
}

/// Every formula obtained by deleting one conjunct somewhere.
fn removals(f: &Formula) -> Vec<Formula> {
    match f {
        Formula::Top => Vec::new(),
        Formula::Conj(v) => {
            let mut out = Vec::new();
            for i in 0..v.len() {
                let mut w = v.clone();
                w.remove(i);
                out.push(rebuild(w));
                for r in removals(&v[i]) {
                    let mut w = v.clone();
                    w[i] = r;
                    out.push(rebuild(w));
                }
            }
            out
        }
        Formula::Neg(g) => removals(g).into_iter().map(Formula::negate).collect(),
        Formula::Diamond(a, g) => removals(g).into_iter().map(|r| Formula::diamond(a.clone(), r)).collect(),
    }
}

fn rebuild(mut v: Vec<Formula>) -> Formula {
    match v.len() {
        0 => Formula::Top,
        1 => v.pop().unwrap(),
        _ => Formula::Conj(v),
    }
}

/// Draws a random member of a grammar; `pick(k)` must return a number below `k`.
pub fn sample_formula(id: SublogicId, alphabet: &[Action], depth: usize, pick: &mut dyn FnMut(usize) -> usize) -> Formula {
    let mut s = Sampler { alphabet, pick };
    s.formula(id, depth)
}

struct Sampler<'a> {
    alphabet: &'a [Action],
    pick: &'a mut dyn FnMut(usize) -> usize,
}

impl Sampler<'_> {
    fn pick(&mut self, k: usize) -> usize {
        (self.pick)(k)
    }

    fn action(&mut self) -> Action {
        let i = self.pick(self.alphabet.len());
        self.alphabet[i].clone()
    }

    fn base(&mut self, n: ConstraintId) -> Formula {
        match n {
            ConstraintId::U => Formula::Top,
            ConstraintId::C => {
                if self.pick(2) == 0 {
                    Formula::Top
                } else {
                    Formula::negate(Formula::zero(self.alphabet))
                }
            }
            ConstraintId::I => match self.pick(3) {
                0 => Formula::Top,
                1 => Formula::negate(Formula::zero(self.alphabet)),
                _ => Formula::can(&self.action()),
            },
            ConstraintId::T => {
                let len = self.pick(3);
                let t: Vec<Action> = (0..len).map(|_| self.action()).collect();
                Formula::chain(&t, Formula::Top)
            }
            ConstraintId::S => self.positive(2),
        }
    }

    fn positive(&mut self, depth: usize) -> Formula {
        if depth == 0 {
            return Formula::Top;
        }
        match self.pick(3) {
            0 => Formula::Top,
            1 => Formula::diamond(self.action(), self.positive(depth - 1)),
            _ => Formula::and([self.positive(depth - 1), Formula::diamond(self.action(), self.positive(depth - 1))]),
        }
    }

    fn member(&mut self, k: Closure, n: ConstraintId) -> Formula {
        let b = self.base(n);
        match k {
            Closure::Positive => b,
            Closure::Negative => Formula::negate(b),
            Closure::Symmetric => {
                if self.pick(2) == 0 {
                    b
                } else {
                    Formula::negate(b)
                }
            }
        }
    }

    fn closure(&mut self, k: Closure, n: ConstraintId) -> Formula {
        let len = self.pick(3);
        let items: Vec<Formula> = (0..len).map(|_| self.member(k, n)).collect();
        rebuild(items)
    }

    fn formula(&mut self, id: SublogicId, depth: usize) -> Formula {
        let deeper = depth > 0;
        match id {
            SublogicId::B => {
                if !deeper {
                    return if self.pick(2) == 0 { Formula::Top } else { Formula::negate(Formula::Top) };
                }
                match self.pick(4) {
                    0 => Formula::Top,
                    1 => Formula::negate(self.formula(id, depth - 1)),
                    2 => Formula::diamond(self.action(), self.formula(id, depth - 1)),
                    _ => Formula::Conj(vec![self.formula(id, depth - 1), self.formula(id, depth - 1)]),
                }
            }
            SublogicId::NS(n) => {
                let choice = self.pick(if deeper { 4 } else { 2 });
                match choice {
                    0 => self.base(n),
                    1 => Formula::negate(self.base(n)),
                    2 => Formula::diamond(self.action(), self.formula(id, depth - 1)),
                    _ => Formula::Conj(vec![self.formula(id, depth - 1), self.formula(id, depth - 1)]),
                }
            }
            SublogicId::D(n) => {
                let mut items = vec![self.closure(Closure::Symmetric, n)];
                if deeper {
                    let alphabet = self.alphabet;
                    for a in alphabet {
                        if self.pick(2) == 0 {
                            items.push(Formula::diamond(a.clone(), self.formula(id, depth - 1)));
                        }
                    }
                }
                rebuild(items)
            }
            SublogicId::Linear(n, fl) => match fl {
                Flavor::L | Flavor::LSup | Flavor::LSub => {
                    let s = self.closure(closure_of(fl), n);
                    if deeper && self.pick(3) > 0 {
                        rebuild(vec![s, Formula::diamond(self.action(), self.formula(id, depth - 1))])
                    } else {
                        s
                    }
                }
                Flavor::Lf | Flavor::LfSup | Flavor::LfSub => {
                    if deeper && self.pick(3) > 0 {
                        Formula::diamond(self.action(), self.formula(id, depth - 1))
                    } else {
                        self.closure(closure_of(fl), n)
                    }
                }
                Flavor::Join => {
                    if deeper && self.pick(3) > 0 {
                        rebuild(vec![self.closure(Closure::Negative, n), Formula::diamond(self.action(), self.formula(id, depth - 1))])
                    } else {
                        self.closure(Closure::Symmetric, n)
                    }
                }
                Flavor::Meet => {
                    if deeper && self.pick(3) > 0 {
                        return Formula::diamond(self.action(), self.formula(id, depth - 1));
                    }
                    let s = self.closure(Closure::Negative, n);
                    if self.pick(2) == 0 {
                        s
                    } else {
                        rebuild(vec![s, Formula::can(&self.action())])
                    }
                }
                _ => Formula::Top,
            },
        }
    }
}
