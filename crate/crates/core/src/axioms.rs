//! Axiom catalogs, soundness sweeps and head normal forms.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::constraints::{constraint_holds, ConstraintId};
use crate::error::{Error, Result};
use crate::lts::{initials, traces};
use crate::preorders::{decide, Flavor, Options, SemanticsId};
use crate::term::{canonicalize, parse_term, substitute, Action, Canon, Substitution, Term};

/// Side conditions `M(x, y, w)` of the merge axiom.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConditionId {
    /// Always true.
    F,
    /// `I(x) ⊇ I(y)`.
    R,
    /// `I(w) ⊆ I(y)`.
    FT,
    /// `I(x) = I(y)` and `I(w) ⊆ I(y)`.
    RT,
    /// `I(x) ⊇ I(y)` and `I(w) ⊆ I(y)`.
    RAndFT,
    /// `I(x) ⊇ I(y)` or `I(w) ⊆ I(y)`.
    ROrFT,
    TR,
    TFT,
    TRT,
    /// `x = 0` implies `y = 0`.
    CR,
    /// `y = 0` implies `w = 0`.
    CFT,
    /// `x = 0` iff `y = 0`, and `y = 0` implies `w = 0`.
    CRT,
}

impl ConditionId {
    pub const ALL: [ConditionId; 12] = [
        ConditionId::F,
        ConditionId::R,
        ConditionId::FT,
        ConditionId::RT,
        ConditionId::RAndFT,
        ConditionId::ROrFT,
        ConditionId::TR,
        ConditionId::TFT,
        ConditionId::TRT,
        ConditionId::CR,
        ConditionId::CFT,
        ConditionId::CRT,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ConditionId::F => "F",
            ConditionId::R => "R",
            ConditionId::FT => "FT",
            ConditionId::RT => "RT",
            ConditionId::RAndFT => "R∧FT",
            ConditionId::ROrFT => "R∨FT",
            ConditionId::TR => "T-R",
            ConditionId::TFT => "T-FT",
            ConditionId::TRT => "T-RT",
            ConditionId::CR => "C-R",
            ConditionId::CFT => "C-FT",
            ConditionId::CRT => "C-RT",
        }
    }

    pub fn holds(self, x: &Canon, y: &Canon, w: &Canon) -> bool {
        let ix = || initials(x);
        let iy = || initials(y);
        let iw = || initials(w);
        match self {
            ConditionId::F => true,
            ConditionId::R => ix().is_superset(&iy()),
            ConditionId::FT => iw().is_subset(&iy()),
            ConditionId::RT => ix() == iy() && iw().is_subset(&iy()),
            ConditionId::RAndFT => ix().is_superset(&iy()) && iw().is_subset(&iy()),
            ConditionId::ROrFT => ix().is_superset(&iy()) || iw().is_subset(&iy()),
            ConditionId::TR => traces(x).is_superset(&traces(y)),
            ConditionId::TFT => traces(w).is_subset(&traces(y)),
            ConditionId::TRT => traces(x) == traces(y) && traces(w).is_subset(&traces(y)),
            ConditionId::CR => !x.is_nil() || y.is_nil(),
            ConditionId::CFT => !y.is_nil() || w.is_nil(),
            ConditionId::CRT => x.is_nil() == y.is_nil() && (!y.is_nil() || w.is_nil()),
        }
    }
}

impl fmt::Display for ConditionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The four linear semantics of the offer layer with head normal forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum LinearZ {
    F,
    R,
    FT,
    RT,
}

impl LinearZ {
    pub const ALL: [LinearZ; 4] = [LinearZ::F, LinearZ::R, LinearZ::FT, LinearZ::RT];

    pub fn condition(self) -> ConditionId {
        match self {
            LinearZ::F => ConditionId::F,
            LinearZ::R => ConditionId::R,
            LinearZ::FT => ConditionId::FT,
            LinearZ::RT => ConditionId::RT,
        }
    }

    pub fn trace_condition(self) -> ConditionId {
        match self {
            LinearZ::F => ConditionId::F,
            LinearZ::R => ConditionId::TR,
            LinearZ::FT => ConditionId::TFT,
            LinearZ::RT => ConditionId::TRT,
        }
    }

    pub fn condition_for(self, n: ConstraintId) -> Result<ConditionId> {
        match n {
            ConstraintId::I => Ok(self.condition()),
            ConstraintId::T => Ok(self.trace_condition()),
            _ => Err(Error::Unsupported(format!("expanded head normal forms for constraint {n}"))),
        }
    }

    pub fn flavor(self) -> Flavor {
        match self {
            LinearZ::F => Flavor::LfSup,
            LinearZ::R => Flavor::Lf,
            LinearZ::FT => Flavor::LSup,
            LinearZ::RT => Flavor::L,
        }
    }

    pub fn semantics(self) -> SemanticsId {
        SemanticsId { constraint: ConstraintId::I, flavor: self.flavor() }
    }
}

impl FromStr for LinearZ {
    type Err = Error;
    fn from_str(s: &str) -> Result<LinearZ> {
        match s {
            "F" => Ok(LinearZ::F),
            "R" => Ok(LinearZ::R),
            "FT" => Ok(LinearZ::FT),
            "RT" => Ok(LinearZ::RT),
            _ => Err(Error::UnknownSemantics(s.to_string())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AxiomKind {
    Inequation,
    Equation,
}

/// Predicate on the closed terms substituted for `X`, `Y` and `Z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SideCondition {
    None,
    /// `N(X, Y)`.
    Constraint(ConstraintId),
    /// `M(X, Y, Z)`.
    Merge(ConditionId),
}

impl SideCondition {
    pub fn holds(&self, s: &Substitution) -> Result<bool> {
        let get = |v: &str| -> Result<Canon> {
            canonicalize(s.get(v).ok_or_else(|| Error::UnboundVariable(v.to_string()))?)
        };
        Ok(match self {
            SideCondition::None => true,
            SideCondition::Constraint(n) => constraint_holds(*n, &get("X")?, &get("Y")?),
            SideCondition::Merge(m) => m.holds(&get("X")?, &get("Y")?, &get("Z")?),
        })
    }
}

impl fmt::Display for SideCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SideCondition::None => f.write_str("true"),
            SideCondition::Constraint(n) => write!(f, "{n}(X,Y)"),
            SideCondition::Merge(m) => write!(f, "M_{m}(X,Y,Z)"),
        }
    }
}

impl Serialize for SideCondition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// An axiom over the variables `X`, `Y`, `Z` and the action metavariable `a`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Axiom {
    pub name: String,
    pub lhs: Term,
    pub rhs: Term,
    pub kind: AxiomKind,
    pub side: SideCondition,
}

impl Axiom {
    fn new(name: impl Into<String>, lhs: &str, rhs: &str, kind: AxiomKind, side: SideCondition) -> Axiom {
        Axiom { name: name.into(), lhs: parse_term(lhs).unwrap(), rhs: parse_term(rhs).unwrap(), kind, side }
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut v = self.lhs.vars();
        v.extend(self.rhs.vars());
        v
    }

    pub fn uses_action(&self) -> bool {
        let a = Action::new("a").unwrap();
        self.lhs.rename_action(&a, &Action::new("a_").unwrap()) != self.lhs
            || self.rhs.rename_action(&a, &Action::new("a_").unwrap()) != self.rhs
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rel = if self.kind == AxiomKind::Equation { "≃" } else { "⪯" };
        write!(f, "({}) ", self.name)?;
        if self.side != SideCondition::None {
            write!(f, "{} ⇒ ", self.side)?;
        }
        write!(f, "{} {rel} {}", self.lhs, self.rhs)
    }
}

pub fn bisim_axioms() -> Vec<Axiom> {
    use AxiomKind::Equation;
    vec![
        Axiom::new("B1", "X + Y", "Y + X", Equation, SideCondition::None),
        Axiom::new("B2", "X + (Y + Z)", "(X + Y) + Z", Equation, SideCondition::None),
        Axiom::new("B3", "X + X", "X", Equation, SideCondition::None),
        Axiom::new("B4", "X + 0", "X", Equation, SideCondition::None),
    ]
}

fn ns_name(n: ConstraintId) -> &'static str {
    match n {
        ConstraintId::U => "S",
        ConstraintId::C => "CS",
        ConstraintId::I => "RS",
        ConstraintId::T => "TS",
        ConstraintId::S => "2S",
    }
}

/// `N(x, y) ⇒ x ⪯ x + y`.
pub fn ns_axiom(n: ConstraintId) -> Axiom {
    let side = if n == ConstraintId::U { SideCondition::None } else { SideCondition::Constraint(n) };
    Axiom::new(ns_name(n), "X", "X + Y", AxiomKind::Inequation, side)
}

/// `N(x, y) ⇒ a(x + y) ≃ a(x + y) + ay`.
pub fn ns_equation(n: ConstraintId) -> Axiom {
    let side = if n == ConstraintId::U { SideCondition::None } else { SideCondition::Constraint(n) };
    Axiom::new(format!("{}≡", ns_name(n)), "a.(X + Y)", "a.(X + Y) + a.Y", AxiomKind::Equation, side)
}

/// `M(x, y, w) ⇒ a(x + y) ⪯ ax + a(y + w)`.
pub fn nd_axiom(m: ConditionId) -> Axiom {
    Axiom::new(format!("ND^{m}"), "a.(X + Y)", "a.X + a.(Y + Z)", AxiomKind::Inequation, SideCondition::Merge(m))
}

/// `M(x, y, w) ⇒ ax + a(y + w) + a(x + y) ≃ ax + a(y + w)`.
pub fn nd_equation(m: ConditionId) -> Axiom {
    Axiom::new(
        format!("ND≡^{m}"),
        "a.X + a.(Y + Z) + a.(X + Y)",
        "a.X + a.(Y + Z)",
        AxiomKind::Equation,
        SideCondition::Merge(m),
    )
}

/// `ax + ay ≃ a(x + y)`, sound for trace equivalence only.
pub fn trace_distributivity() -> Axiom {
    Axiom::new("T", "a.X + a.Y", "a.(X + Y)", AxiomKind::Equation, SideCondition::None)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Form {
    Order,
    Equivalence,
}

impl FromStr for Form {
    type Err = Error;
    fn from_str(s: &str) -> Result<Form> {
        match s {
            "order" => Ok(Form::Order),
            "equivalence" => Ok(Form::Equivalence),
            _ => Err(Error::Unsupported(format!("axiom form `{s}`"))),
        }
    }
}

fn merge_condition(id: SemanticsId) -> Option<ConditionId> {
    use ConstraintId::*;
    match (id.constraint, id.flavor) {
        (U | C, f) if f.is_linear() => Some(ConditionId::F),
        (I, Flavor::LfSup) => Some(ConditionId::F),
        (I, Flavor::Lf) => Some(ConditionId::R),
        (I, Flavor::LSup) => Some(ConditionId::FT),
        (I, Flavor::L) => Some(ConditionId::RT),
        (I, Flavor::Join) => Some(ConditionId::RAndFT),
        (I, Flavor::Meet) => Some(ConditionId::ROrFT),
        (T, Flavor::LfSup) => Some(ConditionId::F),
        (T, Flavor::Lf) => Some(ConditionId::TR),
        (T, Flavor::LSup) => Some(ConditionId::TFT),
        (T, Flavor::L) => Some(ConditionId::TRT),
        (U, Flavor::Er) | (C, Flavor::Ecr) => Some(ConditionId::R),
        (U, Flavor::Ert) | (C, Flavor::Ecrt) => Some(ConditionId::RT),
        _ => None,
    }
}

/// The axioms of a point of the spectrum, besides B1-B4.
pub fn axiom_catalog(id: SemanticsId, form: Form) -> Result<Vec<Axiom>> {
    id.validate()?;
    let mut out = bisim_axioms();
    match id.flavor {
        Flavor::Bisim => return Ok(out),
        Flavor::B => {
            out.push(match form {
                Form::Order => ns_axiom(id.constraint),
                Form::Equivalence => ns_equation(id.constraint),
            });
            return Ok(out);
        }
        Flavor::Db | Flavor::Bf | Flavor::BfSup => {
            return Err(Error::Unsupported(format!(
                "{id} has no axiomatization here: branching observation semantics beyond simulation are decision-only"
            )))
        }
        _ => {}
    }
    let m = merge_condition(id).ok_or_else(|| {
        Error::Unsupported(format!("{id} has no axiomatization here: only the U, C, I and T layers are axiomatized"))
    })?;
    let ns = id.constraint;
    match form {
        Form::Order if ns != ConstraintId::T => {
            out.push(ns_axiom(ns));
            out.push(nd_axiom(m));
        }
        _ => {
            out.push(if form == Form::Order { ns_axiom(ns) } else { ns_equation(ns) });
            out.push(nd_equation(m));
        }
    }
    Ok(out)
}

/// A violating instance of an axiom.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub action: Action,
    pub substitution: Vec<(String, Canon)>,
    pub lhs: Canon,
    pub rhs: Canon,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SoundnessReport {
    pub axiom: String,
    pub semantics: SemanticsId,
    pub instances: usize,
    pub violations: Vec<Violation>,
}

impl SoundnessReport {
    pub fn is_sound(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every instance over `pool` (and every action of `actions` for the
/// metavariable `a`) that satisfies the side condition. At most
/// `max_violations` violations are recorded.
pub fn check_soundness(
    axiom: &Axiom,
    id: SemanticsId,
    pool: &[Canon],
    actions: &[Action],
    max_violations: usize,
) -> Result<SoundnessReport> {
    let vars: Vec<String> = axiom.vars().into_iter().collect();
    let a = Action::new("a").unwrap();
    let metas: Vec<Action> = if axiom.uses_action() { actions.to_vec() } else { vec![a.clone()] };
    let opts = Options::default();
    let mut report = SoundnessReport { axiom: axiom.name.clone(), semantics: id, instances: 0, violations: Vec::new() };
    let mut idx = vec![0usize; vars.len()];
    if pool.is_empty() {
        return Ok(report);
    }
    loop {
        let mut s = Substitution::new();
        for (v, &i) in vars.iter().zip(&idx) {
            s.insert(v.clone(), pool[i].to_term());
        }
        if axiom.side.holds(&s)? {
            for b in &metas {
                let lhs = canonicalize(&substitute(&axiom.lhs.rename_action(&a, b), &s)?)?;
                let rhs = canonicalize(&substitute(&axiom.rhs.rename_action(&a, b), &s)?)?;
                report.instances += 1;
                let mut ok = decide(id, &lhs, &rhs, &opts)?.holds;
                if ok && axiom.kind == AxiomKind::Equation {
                    ok = decide(id, &rhs, &lhs, &opts)?.holds;
                }
                if !ok {
                    report.violations.push(Violation {
                        action: b.clone(),
                        substitution: vars.iter().zip(&idx).map(|(v, &i)| (v.clone(), pool[i].clone())).collect(),
                        lhs,
                        rhs,
                    });
                    if report.violations.len() >= max_violations {
                        return Ok(report);
                    }
                }
            }
        }
        let mut k = 0;
        loop {
            if k == idx.len() {
                return Ok(report);
            }
            idx[k] += 1;
            if idx[k] < pool.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Summands of `p` grouped by action, in order.
fn groups(p: &Canon) -> Vec<(Action, Vec<Canon>)> {
    let mut out: Vec<(Action, Vec<Canon>)> = Vec::new();
    for (a, b) in p.summands() {
        match out.last_mut() {
            Some((g, v)) if g == a => v.push(b.clone()),
            _ => out.push((a.clone(), vec![b.clone()])),
        }
    }
    out
}

fn subsets<T: Clone + Ord>(items: &[T]) -> Vec<BTreeSet<T>> {
    (0..1usize << items.len())
        .map(|m| items.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, x)| x.clone()).collect())
        .collect()
}

/// The Z-head normal form.
pub fn hnf(z: LinearZ, p: &Canon) -> Canon {
    let m = z.condition();
    let mut extra = Vec::new();
    for (a, bodies) in groups(p) {
        let all: Vec<Action> = bodies.iter().flat_map(initials).collect::<BTreeSet<_>>().into_iter().collect();
        for (i, pi) in bodies.iter().enumerate() {
            let own = initials(pi);
            for x1 in subsets(&all) {
                if !own.is_subset(&x1) {
                    continue;
                }
                let mut body = pi.clone();
                for (j, pj) in bodies.iter().enumerate() {
                    let inside = pj.restrict(|b| x1.contains(b));
                    let outside = pj.restrict(|b| !x1.contains(b));
                    if j != i && m.holds(pi, &inside, &outside) {
                        body = body.plus(&inside);
                    }
                }
                extra.push((a.clone(), body));
            }
        }
    }
    p.plus(&Canon::from_summands(extra))
}

/// The totally expanded Z-head normal form for constraint `n` (I or T).
pub fn tehnf(n: ConstraintId, z: LinearZ, p: &Canon, cap: usize) -> Result<Canon> {
    let m = z.condition_for(n)?;
    let mut out: BTreeSet<(Action, Canon)> = BTreeSet::new();
    for (a, bodies) in groups(p) {
        for pi in &bodies {
            // per body k: the admissible parts k1 with M(pi, k1, k2); the empty part stands for k ∉ K
            let mut options: Vec<Vec<Canon>> = Vec::new();
            for pk in &bodies {
                let parts = pk.summands();
                if parts.len() > 16 {
                    return Err(Error::CapExceeded { what: "summand width in expanded head normal form".into(), cap: 16 });
                }
                let mut opts: BTreeSet<Canon> = [Canon::nil()].into_iter().collect();
                for mask in 1u32..(1 << parts.len()) {
                    let k1 = Canon::from_summands(parts.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, s)| s.clone()));
                    let k2 = Canon::from_summands(parts.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 0).map(|(_, s)| s.clone()));
                    if m.holds(pi, &k1, &k2) {
                        opts.insert(k1);
                    }
                }
                options.push(opts.into_iter().collect());
            }
            let mut acc: BTreeSet<Canon> = [pi.clone()].into_iter().collect();
            for opts in &options {
                let mut next = BTreeSet::new();
                for base in &acc {
                    for k1 in opts {
                        next.insert(base.plus(k1));
                    }
                }
                if next.len() > cap {
                    return Err(Error::CapExceeded { what: "expanded head normal form".into(), cap });
                }
                acc = next;
            }
            out.extend(acc.into_iter().map(|b| (a.clone(), b)));
            if out.len() > cap {
                return Err(Error::CapExceeded { what: "expanded head normal form".into(), cap });
            }
        }
    }
    Ok(Canon::from_summands(out))
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct HnfReport {
    pub terms: usize,
    pub pairs: usize,
    /// Terms not equivalent to their normal form.
    pub equivalence_failures: Vec<Canon>,
    /// Related pairs `(p, q)` with a derivative of `p` below no summand of the normal form of `q`.
    pub matching_failures: Vec<(Canon, Canon)>,
}

impl HnfReport {
    pub fn passed(&self) -> bool {
        self.equivalence_failures.is_empty() && self.matching_failures.is_empty()
    }
}

pub fn verify_hnf_laws(z: LinearZ, pool: &[Canon]) -> Result<HnfReport> {
    let id = z.semantics();
    let opts = Options::default();
    let leq = |x: &Canon, y: &Canon| decide(id, x, y, &opts).map(|v| v.holds);
    let mut report = HnfReport::default();
    let normal: Vec<Canon> = pool.iter().map(|p| hnf(z, p)).collect();
    for (p, h) in pool.iter().zip(&normal) {
        report.terms += 1;
        if !(leq(h, p)? && leq(p, h)?) {
            report.equivalence_failures.push(p.clone());
        }
    }
    for p in pool {
        for (q, hq) in pool.iter().zip(&normal) {
            if !leq(p, q)? {
                continue;
            }
            report.pairs += 1;
            for (a, pa) in p.summands() {
                let mut found = false;
                for (b, h) in hq.summands() {
                    if a == b && leq(pa, h)? {
                        found = true;
                        break;
                    }
                }
                if !found {
                    report.matching_failures.push((p.clone(), q.clone()));
                    break;
                }
            }
        }
    }
    Ok(report)
}

/// A proof of `p ⪯ q` following the structural completeness argument: each
/// summand `a p'` of `p` is matched with a summand `a h` of the normal form of
/// `q`, `p' ⪯ h` is proved recursively, the sum of the matched summands is
/// below the normal form by (RS), and the normal form is below `q`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Derivation {
    pub p: Canon,
    pub q: Canon,
    pub normal_form: Canon,
    pub steps: Vec<(Action, Canon, Derivation)>,
}

pub fn derive(z: LinearZ, p: &Canon, q: &Canon) -> Result<Option<Derivation>> {
    if !decide(z.semantics(), p, q, &Options::default())?.holds {
        return Ok(None);
    }
    let normal_form = hnf(z, q);
    let mut steps = Vec::new();
    for (a, pa) in p.summands() {
        let mut matched = None;
        for (b, h) in normal_form.summands() {
            if a == b {
                if let Some(d) = derive(z, pa, h)? {
                    matched = Some((a.clone(), h.clone(), d));
                    break;
                }
            }
        }
        match matched {
            Some(step) => steps.push(step),
            None => return Ok(None),
        }
    }
    Ok(Some(Derivation { p: p.clone(), q: q.clone(), normal_form, steps }))
}

/// Re-checks every side condition of a derivation.
pub fn check_derivation(z: LinearZ, d: &Derivation) -> bool {
    let matched = Canon::from_summands(d.steps.iter().map(|(a, h, _)| (a.clone(), h.clone())));
    d.normal_form == hnf(z, &d.q)
        && initials(&d.p) == initials(&d.q)
        && initials(&matched) == initials(&d.normal_form)
        && d.steps.len() == d.p.summands().len()
        && d.steps.iter().zip(d.p.summands()).all(|((a, h, sub), (b, pb))| {
            a == b && d.normal_form.summands().contains(&(a.clone(), h.clone())) && &sub.p == pb && &sub.q == h && check_derivation(z, sub)
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(s: &str) -> Canon {
        Canon::parse(s).unwrap()
    }

    #[test]
    fn catalog_examples() {
        let names = |id: &str, form| -> Vec<String> {
            axiom_catalog(id.parse().unwrap(), form).unwrap().into_iter().map(|a| a.name).collect()
        };
        assert_eq!(names("F", Form::Order), ["B1", "B2", "B3", "B4", "RS", "ND^F"]);
        assert_eq!(names("RV", Form::Order), ["B1", "B2", "B3", "B4", "RS", "ND^R∨FT"]);
        assert_eq!(names("B", Form::Equivalence), ["B1", "B2", "B3", "B4"]);
        assert_eq!(names("T", Form::Order), ["B1", "B2", "B3", "B4", "S", "ND^F"]);
        assert_eq!(names("CT", Form::Order), ["B1", "B2", "B3", "B4", "CS", "ND^F"]);
        assert_eq!(names("IFT", Form::Order), ["B1", "B2", "B3", "B4", "TS", "ND≡^T-FT"]);
        assert_eq!(names("R", Form::Equivalence), ["B1", "B2", "B3", "B4", "RS≡", "ND≡^R"]);
        assert!(axiom_catalog("PW".parse().unwrap(), Form::Order).is_err());
        assert!(axiom_catalog("SF".parse().unwrap(), Form::Order).is_err());
    }

    #[test]
    fn condition_lattice_on_small_terms() {
        let pool = crate::term::enumerate_terms(&[Action::new("a").unwrap(), Action::new("b").unwrap()], 1, 2);
        for x in &pool {
            for y in &pool {
                for w in &pool {
                    let h = |m: ConditionId| m.holds(x, y, w);
                    assert!(!h(ConditionId::RT) || (h(ConditionId::FT) && h(ConditionId::R)));
                    assert!(!(h(ConditionId::FT) || h(ConditionId::R)) || h(ConditionId::F));
                }
            }
        }
    }

    #[test]
    fn hnf_examples() {
        assert_eq!(hnf(LinearZ::F, &c("a.b.0")), c("a.b.0"));
        assert!(hnf(LinearZ::F, &c("a.b.0+a.c.0")).summands().contains(&(Action::new("a").unwrap(), c("b.0+c.0"))));
        assert_eq!(hnf(LinearZ::RT, &c("a.b.0+a.c.0")), c("a.b.0+a.c.0"));
        assert_eq!(hnf(LinearZ::R, &Canon::nil()), Canon::nil());
    }

    #[test]
    fn derivations_check() {
        let (p, q) = (c("a.(b.0+c.0)"), c("a.b.0+a.c.0"));
        let d = derive(LinearZ::F, &p, &q).unwrap().unwrap();
        assert!(check_derivation(LinearZ::F, &d));
        assert!(derive(LinearZ::F, &q, &p).unwrap().is_none());
    }

    #[test]
    fn soundness_probe() {
        let ab = [Action::new("a").unwrap(), Action::new("b").unwrap()];
        let pool = crate::term::enumerate_terms(&ab, 1, 2);
        let t = trace_distributivity();
        assert!(check_soundness(&t, "T".parse().unwrap(), &pool, &ab, 5).unwrap().is_sound());
        let r = check_soundness(&t, "CT".parse().unwrap(), &pool, &ab, 100).unwrap();
        assert!(r.violations.iter().any(|v| v.substitution == vec![("X".to_string(), Canon::nil()), ("Y".to_string(), c("b.0"))]));
    }
}
