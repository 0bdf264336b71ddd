//! BCCSP terms: syntax trees, the text grammar, JSON encoding and the
//! canonical form modulo commutativity, associativity, idempotence and unit.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Value};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Action(Arc<str>);

impl Action {
    pub fn new(name: &str) -> Result<Action> {
        let mut chars = name.chars();
        let ok = matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
            && chars.all(is_ident_char);
        if ok {
            Ok(Action(Arc::from(name)))
        } else {
            Err(Error::InvalidAction(name.to_string()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Serialize for Action {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Action {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Action::new(&s).map_err(serde::de::Error::custom)
    }
}

/// Parse a comma separated list of action names.
pub fn parse_alphabet(text: &str) -> Result<Vec<Action>> {
    let set: BTreeSet<Action> = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(Action::new)
        .collect::<Result<_>>()?;
    Ok(set.into_iter().collect())
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// A finite syntax tree, possibly containing variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Nil,
    Prefix(Action, Arc<Term>),
    Choice(Arc<Term>, Arc<Term>),
    Var(String),
}

impl Term {
    pub fn prefix(a: Action, body: Term) -> Term {
        Term::Prefix(a, Arc::new(body))
    }

    pub fn choice(l: Term, r: Term) -> Term {
        Term::Choice(Arc::new(l), Arc::new(r))
    }

    /// Left-nested choice of the given summands; `0` when empty.
    pub fn sum<I: IntoIterator<Item = Term>>(items: I) -> Term {
        items.into_iter().reduce(Term::choice).unwrap_or(Term::Nil)
    }

    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Nil | Term::Var(_) => 0,
            Term::Prefix(_, b) => 1 + b.depth(),
            Term::Choice(l, r) => l.depth().max(r.depth()),
        }
    }

    pub fn is_closed(&self) -> bool {
        self.first_var().is_none()
    }

    fn first_var(&self) -> Option<&str> {
        match self {
            Term::Nil => None,
            Term::Var(v) => Some(v),
            Term::Prefix(_, b) => b.first_var(),
            Term::Choice(l, r) => l.first_var().or_else(|| r.first_var()),
        }
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Nil => {}
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Prefix(_, b) => b.collect_vars(out),
            Term::Choice(l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
        }
    }

    /// Rename every occurrence of action `from` to `to`.
    pub fn rename_action(&self, from: &Action, to: &Action) -> Term {
        match self {
            Term::Nil | Term::Var(_) => self.clone(),
            Term::Prefix(a, b) => {
                let a = if a == from { to.clone() } else { a.clone() };
                Term::prefix(a, b.rename_action(from, to))
            }
            Term::Choice(l, r) => Term::choice(l.rename_action(from, to), r.rename_action(from, to)),
        }
    }

    fn flatten_choice<'a>(&'a self, out: &mut Vec<&'a Term>) {
        match self {
            Term::Choice(l, r) => {
                l.flatten_choice(out);
                r.flatten_choice(out);
            }
            t => out.push(t),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Term::Nil => json!({"nil": true}),
            Term::Var(v) => json!({"var": v}),
            Term::Prefix(a, b) => json!({"prefix": {"a": a.as_str(), "p": b.to_json()}}),
            Term::Choice(..) => {
                let mut items = Vec::new();
                self.flatten_choice(&mut items);
                json!({ "sum": items.iter().map(|t| t.to_json()).collect::<Vec<_>>() })
            }
        }
    }

    pub fn from_json(v: &Value) -> Result<Term> {
        let obj = v.as_object().ok_or_else(|| Error::Json("expected an object".into()))?;
        if obj.len() != 1 {
            return Err(Error::Json("expected exactly one key".into()));
        }
        let (key, val) = obj.iter().next().unwrap();
        match key.as_str() {
            "nil" if val == &Value::Bool(true) => Ok(Term::Nil),
            "var" => val
                .as_str()
                .map(Term::var)
                .ok_or_else(|| Error::Json("var name must be a string".into())),
            "prefix" => {
                let a = val
                    .get("a")
                    .and_then(Value::as_str)
                    .ok_or_else(|| Error::Json("prefix needs string field `a`".into()))?;
                let p = val.get("p").ok_or_else(|| Error::Json("prefix needs field `p`".into()))?;
                Ok(Term::prefix(Action::new(a)?, Term::from_json(p)?))
            }
            "sum" => {
                let items = val.as_array().ok_or_else(|| Error::Json("sum needs an array".into()))?;
                let terms = items.iter().map(Term::from_json).collect::<Result<Vec<_>>>()?;
                Ok(Term::sum(terms))
            }
            other => Err(Error::Json(format!("unknown key `{other}`"))),
        }
    }
}

impl Serialize for Term {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Term {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        Term::from_json(&v).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Nil => f.write_str("0"),
            Term::Var(v) => f.write_str(v),
            Term::Prefix(a, b) => match **b {
                Term::Choice(..) => write!(f, "{a}.({b})"),
                _ => write!(f, "{a}.{b}"),
            },
            Term::Choice(l, r) => match **r {
                Term::Choice(..) => write!(f, "{l} + ({r})"),
                _ => write!(f, "{l} + {r}"),
            },
        }
    }
}

pub fn render_term(t: &Term) -> String {
    t.to_string()
}

pub fn parse_term(text: &str) -> Result<Term> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    p.skip_ws();
    if p.pos == p.src.len() {
        return Err(p.error(&["a term"]));
    }
    let t = p.sum()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error(&["'+'", "end of input"]));
    }
    Ok(t)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn error(&self, expected: &[&str]) -> Error {
        Error::Syntax { offset: self.pos, expected: expected.iter().map(|s| s.to_string()).collect() }
    }

    fn expect(&mut self, c: u8, name: &str) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&[name]))
        }
    }

    fn sum(&mut self) -> Result<Term> {
        let mut t = self.prefix()?;
        while self.peek() == Some(b'+') {
            self.pos += 1;
            let r = self.prefix()?;
            t = Term::choice(t, r);
        }
        Ok(t)
    }

    fn ident(&mut self) -> &str {
        let start = self.pos;
        self.pos += 1;
        while self.pos < self.src.len() && is_ident_char(self.src[self.pos] as char) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).unwrap()
    }

    fn prefix(&mut self) -> Result<Term> {
        match self.peek() {
            Some(b'0') => {
                self.pos += 1;
                Ok(Term::Nil)
            }
            Some(b'(') => {
                self.pos += 1;
                let t = self.sum()?;
                self.expect(b')', "')'")?;
                Ok(t)
            }
            Some(c) if c.is_ascii_lowercase() => {
                let a = Action(Arc::from(self.ident()));
                self.expect(b'.', "'.'")?;
                Ok(Term::prefix(a, self.prefix()?))
            }
            Some(b'X'..=b'Z') => Ok(Term::Var(self.ident().to_string())),
            _ => Err(self.error(&["'0'", "'('", "action", "variable"])),
        }
    }
}

/// A closed term modulo B1-B4: a duplicate-free sorted list of summands.
///
/// Summands compare by action name, then by body; the empty sum (`0`)
/// is the least body.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Canon(Arc<[(Action, Canon)]>);

impl Canon {
    pub fn nil() -> Canon {
        Canon(Arc::from(Vec::new()))
    }

    pub fn prefix(a: Action, body: Canon) -> Canon {
        Canon(Arc::from(vec![(a, body)]))
    }

    pub fn from_summands<I: IntoIterator<Item = (Action, Canon)>>(items: I) -> Canon {
        let mut v: Vec<_> = items.into_iter().collect();
        v.sort();
        v.dedup();
        Canon(Arc::from(v))
    }

    pub fn sum<'a, I: IntoIterator<Item = &'a Canon>>(parts: I) -> Canon {
        Canon::from_summands(parts.into_iter().flat_map(|c| c.0.iter().cloned()))
    }

    pub fn plus(&self, other: &Canon) -> Canon {
        Canon::sum([self, other])
    }

    pub fn summands(&self) -> &[(Action, Canon)] {
        &self.0
    }

    pub fn is_nil(&self) -> bool {
        self.0.is_empty()
    }

    pub fn depth(&self) -> usize {
        self.0.iter().map(|(_, b)| 1 + b.depth()).max().unwrap_or(0)
    }

    /// Number of prefix nodes in the tree.
    pub fn size(&self) -> usize {
        self.0.iter().map(|(_, b)| 1 + b.size()).sum()
    }

    /// Sum of the summands whose action satisfies `keep`.
    pub fn restrict(&self, keep: impl Fn(&Action) -> bool) -> Canon {
        Canon(self.0.iter().filter(|(a, _)| keep(a)).cloned().collect::<Vec<_>>().into())
    }

    pub fn actions(&self) -> BTreeSet<Action> {
        let mut out = BTreeSet::new();
        self.collect_actions(&mut out);
        out
    }

    fn collect_actions(&self, out: &mut BTreeSet<Action>) {
        for (a, b) in self.0.iter() {
            out.insert(a.clone());
            b.collect_actions(out);
        }
    }

    pub fn to_term(&self) -> Term {
        Term::sum(self.0.iter().map(|(a, b)| Term::prefix(a.clone(), b.to_term())))
    }

    pub fn to_json(&self) -> Value {
        match self.0.len() {
            0 => json!({"nil": true}),
            1 => self.prefix_json(0),
            n => json!({ "sum": (0..n).map(|i| self.prefix_json(i)).collect::<Vec<_>>() }),
        }
    }

    fn prefix_json(&self, i: usize) -> Value {
        let (a, b) = &self.0[i];
        json!({"prefix": {"a": a.as_str(), "p": b.to_json()}})
    }

    pub fn parse(text: &str) -> Result<Canon> {
        canonicalize(&parse_term(text)?)
    }
}

impl fmt::Display for Canon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("0");
        }
        for (i, (a, b)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            if b.0.len() > 1 {
                write!(f, "{a}.({b})")?;
            } else {
                write!(f, "{a}.{b}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Canon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Canon {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl std::str::FromStr for Canon {
    type Err = Error;
    fn from_str(s: &str) -> Result<Canon> {
        Canon::parse(s)
    }
}

pub fn canonicalize(t: &Term) -> Result<Canon> {
    let mut summands = Vec::new();
    collect_summands(t, &mut summands)?;
    Ok(Canon::from_summands(summands))
}

fn collect_summands(t: &Term, out: &mut Vec<(Action, Canon)>) -> Result<()> {
    match t {
        Term::Nil => Ok(()),
        Term::Var(v) => Err(Error::OpenTerm(v.clone())),
        Term::Prefix(a, b) => {
            out.push((a.clone(), canonicalize(b)?));
            Ok(())
        }
        Term::Choice(l, r) => {
            collect_summands(l, out)?;
            collect_summands(r, out)
        }
    }
}

pub type Substitution = HashMap<String, Term>;

pub fn substitute(t: &Term, s: &Substitution) -> Result<Term> {
    match t {
        Term::Nil => Ok(Term::Nil),
        Term::Var(v) => {
            let img = s.get(v).ok_or_else(|| Error::UnboundVariable(v.clone()))?;
            if let Some(inner) = img.first_var() {
                return Err(Error::OpenTerm(inner.to_string()));
            }
            Ok(img.clone())
        }
        Term::Prefix(a, b) => Ok(Term::prefix(a.clone(), substitute(b, s)?)),
        Term::Choice(l, r) => Ok(Term::choice(substitute(l, s)?, substitute(r, s)?)),
    }
}

/// Every canonical closed term of depth at most `max_depth` whose sums have
/// at most `max_width` summands, each exactly once, sorted.
pub fn enumerate_terms(alphabet: &[Action], max_depth: usize, max_width: usize) -> Vec<Canon> {
    let mut alphabet: Vec<Action> = alphabet.to_vec();
    alphabet.sort();
    alphabet.dedup();
    let mut level = vec![Canon::nil()];
    for _ in 0..max_depth {
        let summands: Vec<(Action, Canon)> = alphabet
            .iter()
            .flat_map(|a| level.iter().map(move |t| (a.clone(), t.clone())))
            .collect();
        let mut next = Vec::new();
        let mut chosen = Vec::new();
        subsets_up_to(&summands, 0, max_width, &mut chosen, &mut next);
        next.sort();
        level = next;
    }
    level
}

fn subsets_up_to(
    items: &[(Action, Canon)],
    start: usize,
    width: usize,
    chosen: &mut Vec<(Action, Canon)>,
    out: &mut Vec<Canon>,
) {
    out.push(Canon::from_summands(chosen.iter().cloned()));
    if chosen.len() == width {
        return;
    }
    for i in start..items.len() {
        chosen.push(items[i].clone());
        subsets_up_to(items, i + 1, width, chosen, out);
        chosen.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn act(s: &str) -> Action {
        Action::new(s).unwrap()
    }

    #[test]
    fn parses_grammar_examples() {
        assert_eq!(parse_term("0").unwrap(), Term::Nil);
        let t = parse_term("a.(b.0 + c.0)").unwrap();
        let expected = Term::prefix(
            act("a"),
            Term::choice(Term::prefix(act("b"), Term::Nil), Term::prefix(act("c"), Term::Nil)),
        );
        assert_eq!(t, expected);
        let t = parse_term("a.b.0 + a.c.0").unwrap();
        assert!(matches!(t, Term::Choice(..)));
    }

    #[test]
    fn reports_offsets() {
        assert_eq!(parse_term(""), Err(Error::Syntax { offset: 0, expected: vec!["a term".into()] }));
        match parse_term("a.b") {
            Err(Error::Syntax { offset, expected }) => {
                assert_eq!(offset, 3);
                assert!(expected.contains(&"'.'".to_string()));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_term("a.0 +"), Err(Error::Syntax { offset: 5, .. })));
        assert!(matches!(parse_term("a.0 )"), Err(Error::Syntax { offset: 4, .. })));
    }

    #[test]
    fn renders_canonical_order() {
        assert_eq!(Canon::parse("b.0+a.0").unwrap().to_string(), "a.0 + b.0");
        assert_eq!(Canon::parse("a.0 + 0").unwrap().to_string(), "a.0");
        assert_eq!(Canon::parse("a.0 + a.0").unwrap().to_string(), "a.0");
        assert_eq!(Canon::parse("(a.0 + b.0) + a.0").unwrap().to_string(), "a.0 + b.0");
        assert_eq!(Canon::parse("a.(c.0+b.0)").unwrap().to_string(), "a.(b.0 + c.0)");
        assert_eq!(Canon::parse("a.b.0 + a.0").unwrap().to_string(), "a.0 + a.b.0");
    }

    #[test]
    fn json_shapes() {
        let t = parse_term("a.0 + b.0 + 0").unwrap();
        assert_eq!(
            t.to_json().to_string(),
            r#"{"sum":[{"prefix":{"a":"a","p":{"nil":true}}},{"prefix":{"a":"b","p":{"nil":true}}},{"nil":true}]}"#
        );
        assert_eq!(Term::from_json(&t.to_json()).unwrap(), t);
        let c = Canon::parse("a.0").unwrap();
        assert_eq!(c.to_json().to_string(), r#"{"prefix":{"a":"a","p":{"nil":true}}}"#);
    }

    #[test]
    fn substitution() {
        let t = parse_term("X + Y").unwrap();
        let mut s = Substitution::new();
        s.insert("X".into(), parse_term("a.0").unwrap());
        s.insert("Y".into(), Term::Nil);
        assert_eq!(substitute(&t, &s).unwrap().to_string(), "a.0 + 0");
        let t = parse_term("a.X").unwrap();
        let mut s = Substitution::new();
        s.insert("X".into(), parse_term("b.0").unwrap());
        assert_eq!(substitute(&t, &s).unwrap().to_string(), "a.b.0");
        let closed = parse_term("a.b.0 + c.0").unwrap();
        assert_eq!(substitute(&closed, &Substitution::new()).unwrap(), closed);
        assert_eq!(substitute(&parse_term("a.Y").unwrap(), &s), Err(Error::UnboundVariable("Y".into())));
    }

    #[test]
    fn canonicalize_rejects_open_terms() {
        assert!(matches!(canonicalize(&parse_term("a.X").unwrap()), Err(Error::OpenTerm(_))));
    }

    #[test]
    fn small_enumerations() {
        let a = [act("a")];
        assert_eq!(enumerate_terms(&a, 0, 3), vec![Canon::nil()]);
        let one = enumerate_terms(&a, 1, 1);
        assert_eq!(one.len(), 2);
        assert!(one.contains(&Canon::parse("a.0").unwrap()));
    }
}
