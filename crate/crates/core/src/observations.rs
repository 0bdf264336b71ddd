//! Enumeration of linear and branching observations, possible worlds and the
//! closure operators on sets of decorated traces. These are the brute-force
//! ground truth the decision engines are checked against.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::constraints::{local_eq, local_geq, local_obs, ConstraintId, LocalObs};
use crate::error::{Error, Result};
use crate::lts::initials;
use crate::term::{Action, Canon};

/// A decorated trace `X0 a1 X1 ... an Xn`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LinearObs {
    pub head: LocalObs,
    pub steps: Vec<(Action, LocalObs)>,
}

impl LinearObs {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn trace(&self) -> Vec<Action> {
        self.steps.iter().map(|(a, _)| a.clone()).collect()
    }

    pub fn last(&self) -> &LocalObs {
        self.steps.last().map(|(_, l)| l).unwrap_or(&self.head)
    }

    /// The label at position `i` (0 is the head).
    pub fn label(&self, i: usize) -> &LocalObs {
        if i == 0 {
            &self.head
        } else {
            &self.steps[i - 1].1
        }
    }

    pub fn truncate(&self, len: usize) -> LinearObs {
        LinearObs { head: self.head.clone(), steps: self.steps[..len].to_vec() }
    }
}

impl fmt::Display for LinearObs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨{}", self.head)?;
        for (a, l) in &self.steps {
            write!(f, ",{a},{l}")?;
        }
        f.write_str("⟩")
    }
}

/// A finite tree whose nodes carry local observations and whose edges carry
/// actions. Children are kept sorted and duplicate free.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BranchingObs {
    pub label: LocalObs,
    pub children: Vec<(Action, BranchingObs)>,
}

impl BranchingObs {
    pub fn new(label: LocalObs, children: impl IntoIterator<Item = (Action, BranchingObs)>) -> BranchingObs {
        let mut children: Vec<_> = children.into_iter().collect();
        children.sort();
        children.dedup();
        BranchingObs { label, children }
    }

    pub fn leaf(label: LocalObs) -> BranchingObs {
        BranchingObs { label, children: Vec::new() }
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(|(_, c)| c.size()).sum::<usize>()
    }

    pub fn is_deterministic(&self) -> bool {
        self.children.windows(2).all(|w| w[0].0 != w[1].0) && self.children.iter().all(|(_, c)| c.is_deterministic())
    }
}

impl fmt::Display for BranchingObs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨{},{{", self.label)?;
        for (i, (a, c)) in self.children.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "({a},{c})")?;
        }
        f.write_str("}⟩")
    }
}

pub fn enum_lgo(n: ConstraintId, p: &Canon) -> BTreeSet<LinearObs> {
    let mut out = BTreeSet::new();
    let mut steps = Vec::new();
    let head = local_obs(n, p);
    lgo_walk(n, p, &head, &mut steps, &mut out);
    out
}

fn lgo_walk(
    n: ConstraintId,
    p: &Canon,
    head: &LocalObs,
    steps: &mut Vec<(Action, LocalObs)>,
    out: &mut BTreeSet<LinearObs>,
) {
    out.insert(LinearObs { head: head.clone(), steps: steps.clone() });
    for (a, b) in p.summands() {
        steps.push((a.clone(), local_obs(n, b)));
        lgo_walk(n, b, head, steps, out);
        steps.pop();
    }
}

/// Result of a bounded enumeration; `truncated` is set whenever some
/// observation was omitted because of the bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Enumeration<T> {
    pub items: Vec<T>,
    pub truncated: bool,
}

/// All branching observations of `p` with at most `max_nodes` nodes, in
/// nondecreasing node count.
pub fn enum_bgo(n: ConstraintId, p: &Canon, max_nodes: usize) -> Enumeration<BranchingObs> {
    let mut memo = HashMap::new();
    let mut truncated = false;
    let set = bgo_rec(n, p, max_nodes, false, &mut memo, &mut truncated);
    finish(set, truncated)
}

/// The deterministic members of [`enum_bgo`].
pub fn enum_dbgo(n: ConstraintId, p: &Canon, max_nodes: usize) -> Enumeration<BranchingObs> {
    let mut memo = HashMap::new();
    let mut truncated = false;
    let set = bgo_rec(n, p, max_nodes, true, &mut memo, &mut truncated);
    finish(set, truncated)
}

fn finish(set: Arc<Vec<BranchingObs>>, truncated: bool) -> Enumeration<BranchingObs> {
    let mut items: Vec<BranchingObs> = set.iter().cloned().collect();
    items.sort_by(|a, b| a.size().cmp(&b.size()).then_with(|| a.cmp(b)));
    Enumeration { items, truncated }
}

type BgoMemo = HashMap<(Canon, usize), Arc<Vec<BranchingObs>>>;

fn bgo_rec(
    n: ConstraintId,
    p: &Canon,
    budget: usize,
    deterministic: bool,
    memo: &mut BgoMemo,
    truncated: &mut bool,
) -> Arc<Vec<BranchingObs>> {
    if let Some(v) = memo.get(&(p.clone(), budget)) {
        return v.clone();
    }
    let label = local_obs(n, p);
    let mut kids: BTreeSet<(Action, BranchingObs)> = BTreeSet::new();
    if budget > 1 {
        for (a, b) in p.summands() {
            for t in bgo_rec(n, b, budget - 1, deterministic, memo, truncated).iter() {
                kids.insert((a.clone(), t.clone()));
            }
        }
    } else if !p.is_nil() {
        *truncated = true;
    }
    let kids: Vec<(Action, BranchingObs)> = kids.into_iter().collect();
    let mut out = Vec::new();
    let mut chosen = Vec::new();
    choose_children(&kids, 0, budget - 1, deterministic, &label, &mut chosen, &mut out, truncated);
    let out = Arc::new(out);
    memo.insert((p.clone(), budget), out.clone());
    out
}

#[allow(clippy::too_many_arguments)]
fn choose_children(
    kids: &[(Action, BranchingObs)],
    start: usize,
    budget: usize,
    deterministic: bool,
    label: &LocalObs,
    chosen: &mut Vec<(Action, BranchingObs)>,
    out: &mut Vec<BranchingObs>,
    truncated: &mut bool,
) {
    out.push(BranchingObs { label: label.clone(), children: chosen.clone() });
    for i in start..kids.len() {
        let (a, t) = &kids[i];
        if deterministic && chosen.iter().any(|(b, _)| b == a) {
            continue;
        }
        let size = t.size();
        if size > budget {
            *truncated = true;
            continue;
        }
        chosen.push(kids[i].clone());
        choose_children(kids, i + 1, budget - size, deterministic, label, chosen, out, truncated);
        chosen.pop();
    }
}

/// Observations that use every transition of `p` at most once: pruned
/// prefixes of the unfolding.
pub fn enum_transition_bgo(n: ConstraintId, p: &Canon, cap: usize) -> Result<Vec<BranchingObs>> {
    let label = local_obs(n, p);
    let mut acc: Vec<Vec<(Action, BranchingObs)>> = vec![Vec::new()];
    for (a, b) in p.summands() {
        let below = enum_transition_bgo(n, b, cap)?;
        let mut next = acc.clone();
        for kids in &acc {
            for t in &below {
                let mut k = kids.clone();
                k.push((a.clone(), t.clone()));
                next.push(k);
            }
        }
        if next.len() > cap {
            return Err(Error::CapExceeded { what: "branching observations".into(), cap });
        }
        acc = next;
    }
    let mut out: Vec<BranchingObs> = acc.into_iter().map(|kids| BranchingObs::new(label.clone(), kids)).collect();
    out.sort();
    out.dedup();
    Ok(out)
}

/// Deterministic observations with exactly one child per offered action at
/// every node.
pub fn enum_complete_dbgo(n: ConstraintId, p: &Canon) -> BTreeSet<BranchingObs> {
    let mut memo = HashMap::new();
    complete_rec(n, p, &mut memo).iter().cloned().collect()
}

fn complete_rec(n: ConstraintId, p: &Canon, memo: &mut HashMap<Canon, Arc<Vec<BranchingObs>>>) -> Arc<Vec<BranchingObs>> {
    if let Some(v) = memo.get(p) {
        return v.clone();
    }
    let mut per_action: Vec<(Action, Vec<BranchingObs>)> = Vec::new();
    for a in initials(p) {
        let mut opts: BTreeSet<BranchingObs> = BTreeSet::new();
        for (b, body) in p.summands() {
            if *b == a {
                opts.extend(complete_rec(n, body, memo).iter().cloned());
            }
        }
        per_action.push((a, opts.into_iter().collect()));
    }
    let label = local_obs(n, p);
    let mut out = vec![Vec::new()];
    for (a, opts) in &per_action {
        let mut next = Vec::with_capacity(out.len() * opts.len());
        for partial in &out {
            for o in opts {
                let mut v: Vec<(Action, BranchingObs)> = partial.clone();
                v.push((a.clone(), o.clone()));
                next.push(v);
            }
        }
        out = next;
    }
    let res: BTreeSet<BranchingObs> = out.into_iter().map(|children| BranchingObs { label: label.clone(), children }).collect();
    let res = Arc::new(res.into_iter().collect::<Vec<_>>());
    memo.insert(p.clone(), res.clone());
    res
}

/// Whether `obs` is a branching observation of `q`.
pub fn bgo_member(n: ConstraintId, obs: &BranchingObs, q: &Canon) -> bool {
    let here = local_obs(n, q);
    local_eq(n, &obs.label, &here).unwrap_or(false)
        && obs.children.iter().all(|(a, t)| q.summands().iter().any(|(b, q1)| a == b && bgo_member(n, t, q1)))
}

/// Whether `obs` is a linear observation of `q`.
pub fn lgo_member(n: ConstraintId, obs: &LinearObs, q: &Canon) -> bool {
    fn go(n: ConstraintId, obs: &LinearObs, i: usize, q: &Canon) -> bool {
        if !local_eq(n, obs.label(i), &local_obs(n, q)).unwrap_or(false) {
            return false;
        }
        if i == obs.len() {
            return true;
        }
        let a = &obs.steps[i].0;
        q.summands().iter().any(|(b, q1)| a == b && go(n, obs, i + 1, q1))
    }
    go(n, obs, 0, q)
}

/// Deterministic terms obtained by picking one successor per offered action
/// at every node.
pub fn enum_possible_worlds(p: &Canon) -> BTreeSet<Canon> {
    worlds(p, false, &mut HashMap::new()).iter().cloned().collect()
}

/// Like [`enum_possible_worlds`], but any subset of the offered actions may be kept.
pub fn enum_partial_possible_worlds(p: &Canon) -> BTreeSet<Canon> {
    worlds(p, true, &mut HashMap::new()).iter().cloned().collect()
}

fn worlds(p: &Canon, partial: bool, memo: &mut HashMap<Canon, Arc<BTreeSet<Canon>>>) -> Arc<BTreeSet<Canon>> {
    if let Some(v) = memo.get(p) {
        return v.clone();
    }
    let mut acc: BTreeSet<Canon> = [Canon::nil()].into_iter().collect();
    for a in initials(p) {
        let mut opts: BTreeSet<Canon> = BTreeSet::new();
        for (b, body) in p.summands() {
            if *b == a {
                opts.extend(worlds(body, partial, memo).iter().cloned());
            }
        }
        let mut next = BTreeSet::new();
        for w in &acc {
            if partial {
                next.insert(w.clone());
            }
            for o in &opts {
                next.insert(w.plus(&Canon::prefix(a.clone(), o.clone())));
            }
        }
        acc = next;
    }
    let acc = Arc::new(acc);
    memo.insert(p.clone(), acc.clone());
    acc
}

/// The three closure operators on sets of decorated traces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Delta {
    /// Every label may grow.
    Sup,
    /// Only the final label is observed.
    Final,
    /// Only the final label is observed, and it may grow.
    FinalSup,
}

/// A closure represented lazily by its base set.
#[derive(Clone, Debug)]
pub struct Closure {
    pub delta: Delta,
    pub n: ConstraintId,
    pub base: Vec<LinearObs>,
}

pub fn closure_apply(delta: Delta, obs_set: &BTreeSet<LinearObs>, n: ConstraintId) -> Result<Closure> {
    if obs_set.iter().any(|o| o.head.constraint() != n) {
        return Err(Error::MixedConstraints);
    }
    Ok(Closure { delta, n, base: obs_set.iter().cloned().collect() })
}

impl Closure {
    pub fn contains(&self, x: &LinearObs) -> bool {
        self.base.iter().any(|y| covered_by(self.delta, self.n, x, y))
    }

    pub fn materialize(&self, universe: &[LinearObs]) -> BTreeSet<LinearObs> {
        universe.iter().filter(|x| self.contains(x)).cloned().collect()
    }
}

/// Whether `x` belongs to the closure of `{y}`.
fn covered_by(delta: Delta, n: ConstraintId, x: &LinearObs, y: &LinearObs) -> bool {
    if x.len() != y.len() || x.steps.iter().zip(&y.steps).any(|((a, _), (b, _))| a != b) {
        return false;
    }
    let geq = |l1: &LocalObs, l2: &LocalObs| local_geq(n, l1, l2).unwrap_or(false);
    match delta {
        Delta::Sup => (0..=x.len()).all(|i| geq(x.label(i), y.label(i))),
        Delta::Final => local_eq(n, x.last(), y.last()).unwrap_or(false),
        Delta::FinalSup => geq(x.last(), y.last()),
    }
}

/// Every decorated trace over `alphabet` with offer labels and at most
/// `max_len` steps.
pub fn lgo_universe(alphabet: &[Action], max_len: usize) -> Vec<LinearObs> {
    let subsets: Vec<BTreeSet<Action>> = (0..1usize << alphabet.len())
        .map(|m| alphabet.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, a)| a.clone()).collect())
        .collect();
    let mut level: Vec<LinearObs> =
        subsets.iter().map(|s| LinearObs { head: LocalObs::Offer(s.clone()), steps: Vec::new() }).collect();
    let mut out = level.clone();
    for _ in 0..max_len {
        let mut next = Vec::new();
        for o in &level {
            for a in alphabet {
                for s in &subsets {
                    let mut o2 = o.clone();
                    o2.steps.push((a.clone(), LocalObs::Offer(s.clone())));
                    next.push(o2);
                }
            }
        }
        out.extend(next.iter().cloned());
        level = next;
    }
    out
}

/// Interned branching observations for fast set comparisons. Labels are
/// compared structurally, which is exact for the constraints U, C, I and T.
#[derive(Default)]
pub struct BgoTable {
    labels: HashMap<LocalObs, u32>,
    nodes: HashMap<(u32, Vec<(Action, u32)>), u32>,
    sets: HashMap<(ConstraintId, Canon), Arc<HashSet<u32>>>,
}

impl BgoTable {
    pub fn new() -> BgoTable {
        BgoTable::default()
    }

    /// Ids of all branching observations of `p`; fails when a node would have
    /// more than `max_children_bits` candidate children.
    pub fn bgo_ids(&mut self, n: ConstraintId, p: &Canon, max_children_bits: usize) -> Result<Arc<HashSet<u32>>> {
        if let Some(s) = self.sets.get(&(n, p.clone())) {
            return Ok(s.clone());
        }
        let mut kids: BTreeSet<(Action, u32)> = BTreeSet::new();
        for (a, b) in p.summands() {
            for &id in self.bgo_ids(n, b, max_children_bits)?.iter() {
                kids.insert((a.clone(), id));
            }
        }
        if kids.len() > max_children_bits {
            return Err(Error::CapExceeded { what: "branching observation children".into(), cap: max_children_bits });
        }
        let next_label = self.labels.len() as u32;
        let label = *self.labels.entry(local_obs(n, p)).or_insert(next_label);
        let kids: Vec<(Action, u32)> = kids.into_iter().collect();
        let mut out = HashSet::with_capacity(1 << kids.len());
        for mask in 0u64..(1u64 << kids.len()) {
            let chosen: Vec<(Action, u32)> =
                kids.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, k)| k.clone()).collect();
            let next_id = self.nodes.len() as u32;
            out.insert(*self.nodes.entry((label, chosen)).or_insert(next_id));
        }
        let out = Arc::new(out);
        self.sets.insert((n, p.clone()), out.clone());
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(s: &str) -> Canon {
        Canon::parse(s).unwrap()
    }

    fn act(s: &str) -> Action {
        Action::new(s).unwrap()
    }

    fn offer(names: &[&str]) -> LocalObs {
        LocalObs::Offer(names.iter().map(|s| act(s)).collect())
    }

    #[test]
    fn lgo_of_chain() {
        let got = enum_lgo(ConstraintId::I, &c("a.b.0"));
        let expected: BTreeSet<LinearObs> = [
            LinearObs { head: offer(&["a"]), steps: vec![] },
            LinearObs { head: offer(&["a"]), steps: vec![(act("a"), offer(&["b"]))] },
            LinearObs { head: offer(&["a"]), steps: vec![(act("a"), offer(&["b"])), (act("b"), offer(&[]))] },
        ]
        .into_iter()
        .collect();
        assert_eq!(got, expected);
        assert_eq!(enum_lgo(ConstraintId::I, &c("0")).len(), 1);
    }

    #[test]
    fn bgo_of_nil() {
        let e = enum_bgo(ConstraintId::I, &c("0"), 10);
        assert_eq!(e.items, vec![BranchingObs::leaf(offer(&[]))]);
        assert!(!e.truncated);
        assert_eq!(enum_complete_dbgo(ConstraintId::I, &c("0")).len(), 1);
    }

    #[test]
    fn truncation_is_reported() {
        let e = enum_bgo(ConstraintId::I, &c("a.b.0"), 2);
        assert!(e.truncated);
        assert!(e.items.iter().all(|o| o.size() <= 2));
        assert!(enum_bgo(ConstraintId::I, &c("a.b.0"), 3).truncated);
        assert!(!enum_bgo(ConstraintId::I, &c("a.b.0"), 4).truncated);
    }

    #[test]
    fn complete_dbgo_counts_worlds() {
        assert_eq!(enum_complete_dbgo(ConstraintId::I, &c("a.b.0+a.c.0")).len(), 2);
    }

    #[test]
    fn possible_world_examples() {
        assert_eq!(enum_possible_worlds(&c("a.b.0")), [c("a.b.0")].into_iter().collect());
        assert!(enum_partial_possible_worlds(&c("a.0+b.0")).contains(&c("a.0")));
        let p = enum_possible_worlds(&c("a.b.c.0 + a.(b.c.0+d.0) + a.b.0"));
        let q = enum_possible_worlds(&c("a.(b.c.0+d.0) + a.b.0"));
        assert!(p.is_superset(&q) && p != q);
    }

    #[test]
    fn final_closure_forgets_the_middle() {
        let base: BTreeSet<LinearObs> =
            [LinearObs { head: offer(&["a"]), steps: vec![(act("a"), offer(&["b"]))] }].into_iter().collect();
        let cl = closure_apply(Delta::Final, &base, ConstraintId::I).unwrap();
        for x in [&[][..], &["a"], &["b"], &["a", "b"]] {
            assert!(cl.contains(&LinearObs { head: offer(x), steps: vec![(act("a"), offer(&["b"]))] }));
        }
        assert!(!cl.contains(&LinearObs { head: offer(&["a"]), steps: vec![(act("a"), offer(&["a", "b"]))] }));
    }

    #[test]
    fn interned_sets_match_enumeration() {
        let mut table = BgoTable::new();
        for s in ["0", "a.b.0+a.c.0", "a.(b.0+c.0)", "a.(b.c.0+b.d.0)"] {
            let ids = table.bgo_ids(ConstraintId::I, &c(s), 20).unwrap();
            let e = enum_bgo(ConstraintId::I, &c(s), 100);
            assert_eq!(ids.len(), e.items.len(), "{s}");
        }
    }
}
