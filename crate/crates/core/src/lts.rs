//! Transitions, initial offers and traces of canonical terms, plus an indexed
//! transition graph shared by the decision engines.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::term::{Action, Canon};

pub type Trace = Vec<Action>;

pub fn step(p: &Canon) -> Vec<(Action, Canon)> {
    p.summands().to_vec()
}

pub fn initials(p: &Canon) -> BTreeSet<Action> {
    p.summands().iter().map(|(a, _)| a.clone()).collect()
}

pub fn traces(p: &Canon) -> BTreeSet<Trace> {
    let mut out = BTreeSet::new();
    let mut prefix = Vec::new();
    walk_traces(p, &mut prefix, &mut |t, _| {
        out.insert(t.to_vec());
    });
    out
}

pub fn completed_traces(p: &Canon) -> BTreeSet<Trace> {
    let mut out = BTreeSet::new();
    let mut prefix = Vec::new();
    walk_traces(p, &mut prefix, &mut |t, s| {
        if s.is_nil() {
            out.insert(t.to_vec());
        }
    });
    out
}

fn walk_traces(p: &Canon, prefix: &mut Trace, f: &mut impl FnMut(&[Action], &Canon)) {
    f(prefix, p);
    for (a, b) in p.summands() {
        prefix.push(a.clone());
        walk_traces(b, prefix, f);
        prefix.pop();
    }
}

pub fn is_deterministic(p: &Canon) -> bool {
    let s = p.summands();
    s.windows(2).all(|w| w[0].0 != w[1].0) && s.iter().all(|(_, b)| is_deterministic(b))
}

/// All canonical terms reachable from `p`, including `p`, sorted.
pub fn reachable(p: &Canon) -> BTreeSet<Canon> {
    let mut seen = BTreeSet::new();
    let mut stack = vec![p.clone()];
    while let Some(s) = stack.pop() {
        if seen.insert(s.clone()) {
            stack.extend(s.summands().iter().map(|(_, b)| b.clone()));
        }
    }
    seen
}

pub fn to_dot(p: &Canon) -> String {
    let states: Vec<Canon> = reachable(p).into_iter().collect();
    let id: HashMap<&Canon, usize> = states.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let mut out = String::from("digraph lts {\n");
    for (i, s) in states.iter().enumerate() {
        let shape = if s == p { ", shape=doublecircle" } else { "" };
        let _ = writeln!(out, "  s{i} [label=\"{s}\"{shape}];");
    }
    for (i, s) in states.iter().enumerate() {
        for (a, b) in s.summands() {
            let _ = writeln!(out, "  s{i} -> s{} [label=\"{a}\"];", id[b]);
        }
    }
    out.push_str("}\n");
    out
}

/// Bitmask over the alphabet of an [`Lts`].
pub type ActionSet = u64;

/// The reachable states of one or more terms, indexed, over a fixed alphabet.
#[derive(Clone, Debug)]
pub struct Lts {
    alphabet: Vec<Action>,
    states: Vec<Canon>,
    index: HashMap<Canon, usize>,
    succ: Vec<Vec<(usize, usize)>>,
    offers: Vec<ActionSet>,
}

impl Lts {
    /// Builds the joint graph of `roots` over their actions plus `extra`.
    pub fn new(roots: &[&Canon], extra: &[Action]) -> Result<Lts> {
        Lts::with_steps(roots, extra, |p| Ok(p.summands().to_vec()))
    }

    /// Like [`Lts::new`] but with a custom step function, which must only
    /// produce targets of smaller depth than their source and actions of the roots.
    pub fn with_steps(
        roots: &[&Canon],
        extra: &[Action],
        mut steps: impl FnMut(&Canon) -> Result<Vec<(Action, Canon)>>,
    ) -> Result<Lts> {
        let mut alpha: BTreeSet<Action> = extra.iter().cloned().collect();
        for r in roots {
            alpha.extend(r.actions());
        }
        if alpha.len() > 64 {
            return Err(Error::AlphabetTooLarge(alpha.len()));
        }
        let alphabet: Vec<Action> = alpha.into_iter().collect();
        let mut lts = Lts { alphabet, states: Vec::new(), index: HashMap::new(), succ: Vec::new(), offers: Vec::new() };
        for r in roots {
            lts.add(r, &mut steps)?;
        }
        Ok(lts)
    }

    fn add(&mut self, p: &Canon, steps: &mut impl FnMut(&Canon) -> Result<Vec<(Action, Canon)>>) -> Result<usize> {
        if let Some(&i) = self.index.get(p) {
            return Ok(i);
        }
        let mut kids = Vec::new();
        for (a, b) in steps(p)? {
            let ai = self.action_index(&a).expect("action in alphabet");
            kids.push((ai, self.add(&b, steps)?));
        }
        let i = self.states.len();
        self.states.push(p.clone());
        self.index.insert(p.clone(), i);
        self.offers.push(kids.iter().fold(0, |m, &(a, _)| m | (1 << a)));
        self.succ.push(kids);
        Ok(i)
    }

    pub fn alphabet(&self) -> &[Action] {
        &self.alphabet
    }

    pub fn action_index(&self, a: &Action) -> Option<usize> {
        self.alphabet.binary_search(a).ok()
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, i: usize) -> &Canon {
        &self.states[i]
    }

    pub fn index_of(&self, p: &Canon) -> Option<usize> {
        self.index.get(p).copied()
    }

    /// Outgoing transitions as (action index, target), sorted by action then target term.
    pub fn succ(&self, i: usize) -> &[(usize, usize)] {
        &self.succ[i]
    }

    pub fn succ_by(&self, i: usize, a: usize) -> impl Iterator<Item = usize> + '_ {
        self.succ[i].iter().filter(move |&&(b, _)| b == a).map(|&(_, t)| t)
    }

    pub fn offers(&self, i: usize) -> ActionSet {
        self.offers[i]
    }

    pub fn is_terminal(&self, i: usize) -> bool {
        self.offers[i] == 0
    }

    pub fn actions_of(&self, set: ActionSet) -> BTreeSet<Action> {
        (0..self.alphabet.len()).filter(|a| set >> a & 1 == 1).map(|a| self.alphabet[a].clone()).collect()
    }

    pub fn mask_of<'a>(&self, actions: impl IntoIterator<Item = &'a Action>) -> ActionSet {
        actions.into_iter().filter_map(|a| self.action_index(a)).fold(0, |m, a| m | (1 << a))
    }

    pub fn full_mask(&self) -> ActionSet {
        if self.alphabet.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.alphabet.len()) - 1
        }
    }

    /// Trace sets per state as action-index sequences.
    pub fn trace_sets(&self) -> Vec<BTreeSet<Vec<usize>>> {
        let mut out: Vec<Option<BTreeSet<Vec<usize>>>> = vec![None; self.len()];
        // children are always inserted before parents, so index order is a topological order
        for i in 0..self.len() {
            let mut set = BTreeSet::new();
            set.insert(Vec::new());
            for &(a, t) in &self.succ[i] {
                for tr in out[t].as_ref().expect("child computed first") {
                    let mut v = Vec::with_capacity(tr.len() + 1);
                    v.push(a);
                    v.extend_from_slice(tr);
                    set.insert(v);
                }
            }
            out[i] = Some(set);
        }
        out.into_iter().map(Option::unwrap).collect()
    }
}
