//! Branching flavors: constrained simulation and bisimulation games, complete
//! deterministic observations, and final-ready / final-failure simulations.
//!
//! The last two are decided through profiles: a profile of a left state `s`
//! is the set of right states that possess one particular observation of `s`.
//! The relation holds iff the right root lies in every profile of the left root.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;

use crate::constraints::{ConstraintId, LocalCtx, LocalObs};
use crate::error::{Error, Result};
use crate::lts::Lts;
use crate::observations::BranchingObs;
use crate::preorders::sim::{simulation, Relation};
use crate::preorders::{joint, Options, Reason, Refutation, Side, Verdict, Witness};
use crate::term::Canon;

pub fn nsim(n: ConstraintId, lts: &Lts, ip: usize, iq: usize) -> Verdict {
    let ctx = LocalCtx::new(n, lts);
    let rel = simulation(lts, |x, y| ctx.eq(x, y));
    if rel.get(ip, iq) {
        Verdict::holds()
    } else {
        Verdict::fails(Witness::Game(sim_refutation(lts, &ctx, &rel, ip, iq)))
    }
}

/// Explains why `(x, y)` is outside the greatest constrained simulation.
pub fn sim_refutation(lts: &Lts, ctx: &LocalCtx, rel: &Relation, x: usize, y: usize) -> Refutation {
    let (p, q) = (lts.state(x).clone(), lts.state(y).clone());
    if !ctx.eq(x, y) {
        return Refutation { p, q, reason: Reason::Constraint };
    }
    let &(a, x1) = lts
        .succ(x)
        .iter()
        .find(|&&(a, x1)| lts.succ_by(y, a).all(|y1| !rel.get(x1, y1)))
        .expect("a pair outside the simulation has an unanswered move");
    let answers = lts.succ_by(y, a).map(|y1| sim_refutation(lts, ctx, rel, x1, y1)).collect();
    Refutation { p, q, reason: Reason::Move { side: Side::Left, action: lts.alphabet()[a].clone(), target: lts.state(x1).clone(), answers } }
}

pub fn bisim_refutation(lts: &Lts, rel: &Relation, x: usize, y: usize) -> Refutation {
    let (p, q) = (lts.state(x).clone(), lts.state(y).clone());
    for &(a, x1) in lts.succ(x) {
        if lts.succ_by(y, a).all(|y1| !rel.get(x1, y1)) {
            let answers = lts.succ_by(y, a).map(|y1| bisim_refutation(lts, rel, x1, y1)).collect();
            let action = lts.alphabet()[a].clone();
            return Refutation { p, q, reason: Reason::Move { side: Side::Left, action, target: lts.state(x1).clone(), answers } };
        }
    }
    for &(a, y1) in lts.succ(y) {
        if lts.succ_by(x, a).all(|x1| !rel.get(x1, y1)) {
            let answers = lts.succ_by(x, a).map(|x1| bisim_refutation(lts, rel, x1, y1)).collect();
            let action = lts.alphabet()[a].clone();
            return Refutation { p, q, reason: Reason::Move { side: Side::Right, action, target: lts.state(y1).clone(), answers } };
        }
    }
    unreachable!("a pair outside the bisimulation has an unanswered move")
}

/// Checks a refutation against the terms it mentions; `n` is `None` for bisimulation.
pub fn replay_refutation(n: Option<ConstraintId>, r: &Refutation) -> bool {
    use crate::constraints::constraint_holds;
    match &r.reason {
        Reason::Constraint => n.is_some_and(|n| !constraint_holds(n, &r.p, &r.q)),
        Reason::Move { side, action, target, answers } => {
            let (mover, other) = match side {
                Side::Left => (&r.p, &r.q),
                Side::Right => (&r.q, &r.p),
            };
            if n.is_some() && *side == Side::Right {
                return false;
            }
            let moves = mover.summands().iter().any(|(a, b)| a == action && b == target);
            let all_answered = other.summands().iter().filter(|(a, _)| a == action).all(|(_, b)| {
                answers.iter().any(|s| {
                    let (sp, sq) = match side {
                        Side::Left => (target, b),
                        Side::Right => (b, target),
                    };
                    &s.p == sp && &s.q == sq && replay_refutation(n, s)
                })
            });
            moves && all_answered
        }
    }
}

type Profile = FixedBitSet;

struct Profiles<'a> {
    lts: &'a Lts,
    ctx: LocalCtx<'a>,
    q_states: Vec<usize>,
    cap: usize,
    memo: HashMap<usize, std::rc::Rc<Vec<(Profile, BranchingObs)>>>,
}

impl<'a> Profiles<'a> {
    fn new(lts: &'a Lts, n: ConstraintId, iq: usize, cap: usize) -> Profiles<'a> {
        let mut seen = FixedBitSet::with_capacity(lts.len());
        let mut stack = vec![iq];
        while let Some(s) = stack.pop() {
            if !seen.put(s) {
                stack.extend(lts.succ(s).iter().map(|&(_, t)| t));
            }
        }
        Profiles { lts, ctx: LocalCtx::new(n, lts), q_states: seen.ones().collect(), cap, memo: HashMap::new() }
    }

    fn empty(&self) -> Profile {
        FixedBitSet::with_capacity(self.lts.len())
    }

    fn filter(&self, keep: impl Fn(usize) -> bool) -> Profile {
        let mut out = self.empty();
        for &y in &self.q_states {
            if keep(y) {
                out.insert(y);
            }
        }
        out
    }

    /// Right states with an `a`-successor inside `target`.
    fn pre(&self, a: usize, target: &Profile) -> Profile {
        self.filter(|y| self.lts.succ_by(y, a).any(|y1| target.contains(y1)))
    }

    fn label(&self, s: usize) -> LocalObs {
        self.ctx.obs(s)
    }

    fn check_cap(&self, len: usize) -> Result<()> {
        if len > self.cap {
            Err(Error::CapExceeded { what: "observation profiles".into(), cap: self.cap })
        } else {
            Ok(())
        }
    }

    /// Profiles of complete deterministic observations.
    fn complete(&mut self, s: usize) -> Result<std::rc::Rc<Vec<(Profile, BranchingObs)>>> {
        if let Some(v) = self.memo.get(&s) {
            return Ok(v.clone());
        }
        let base = self.filter(|y| self.ctx.eq(s, y));
        let mut acc: Vec<(Profile, Vec<(crate::term::Action, BranchingObs)>)> = vec![(base, Vec::new())];
        let mut actions: Vec<usize> = self.lts.succ(s).iter().map(|&(a, _)| a).collect();
        actions.dedup();
        for a in actions {
            let mut options: HashMap<Profile, BranchingObs> = HashMap::new();
            for t in self.lts.succ_by(s, a).collect::<Vec<_>>() {
                for (prof, obs) in self.complete(t)?.iter() {
                    options.entry(self.pre(a, prof)).or_insert_with(|| obs.clone());
                }
            }
            let mut next: HashMap<Profile, Vec<(crate::term::Action, BranchingObs)>> = HashMap::new();
            for (prof, kids) in &acc {
                for (pre, obs) in &options {
                    let mut p = prof.clone();
                    p.intersect_with(pre);
                    next.entry(p).or_insert_with(|| {
                        let mut k = kids.clone();
                        k.push((self.lts.alphabet()[a].clone(), obs.clone()));
                        k
                    });
                }
            }
            self.check_cap(next.len())?;
            acc = next.into_iter().collect();
        }
        let label = self.label(s);
        let out: Vec<(Profile, BranchingObs)> = acc.into_iter().map(|(p, kids)| (p, BranchingObs::new(label.clone(), kids))).collect();
        let out = std::rc::Rc::new(out);
        self.memo.insert(s, out.clone());
        Ok(out)
    }

    /// Profiles of the observations of `s` that use each transition at most
    /// once, under the final-ready (`sup = false`) or final-failure
    /// (`sup = true`) reading, where only leaves constrain the offer.
    fn finals(&mut self, s: usize, sup: bool) -> Result<std::rc::Rc<Vec<(Profile, BranchingObs)>>> {
        if let Some(v) = self.memo.get(&s) {
            return Ok(v.clone());
        }
        let xs = self.lts.offers(s);
        let leaf = if sup { self.filter(|y| self.lts.offers(y) & !xs == 0) } else { self.filter(|y| self.lts.offers(y) == xs) };
        let label = self.label(s);
        let mut some: HashMap<Profile, Vec<(crate::term::Action, BranchingObs)>> = HashMap::new();
        for &(a, t) in self.lts.succ(s).to_vec().iter() {
            let mut options: HashMap<Profile, BranchingObs> = HashMap::new();
            for (prof, obs) in self.finals(t, sup)?.iter() {
                options.entry(self.pre(a, prof)).or_insert_with(|| obs.clone());
            }
            let action = self.lts.alphabet()[a].clone();
            let mut next = some.clone();
            for (o, obs) in &options {
                next.entry(o.clone()).or_insert_with(|| vec![(action.clone(), obs.clone())]);
                for (p, kids) in &some {
                    let mut m = p.clone();
                    m.intersect_with(o);
                    next.entry(m).or_insert_with(|| {
                        let mut k = kids.clone();
                        k.push((action.clone(), obs.clone()));
                        k
                    });
                }
            }
            self.check_cap(next.len())?;
            some = next;
        }
        let mut out: Vec<(Profile, BranchingObs)> = vec![(leaf, BranchingObs::leaf(label.clone()))];
        out.extend(some.into_iter().map(|(p, kids)| (p, BranchingObs::new(label.clone(), kids))));
        let out = std::rc::Rc::new(out);
        self.memo.insert(s, out.clone());
        Ok(out)
    }
}

fn least_missing(profiles: &[(Profile, BranchingObs)], iq: usize) -> Option<BranchingObs> {
    profiles
        .iter()
        .filter(|(p, _)| !p.contains(iq))
        .map(|(_, o)| o)
        .min_by(|a, b| a.size().cmp(&b.size()).then_with(|| a.cmp(b)))
        .cloned()
}

/// Every complete deterministic observation of `p` must be one of `q`.
pub fn decide_db(n: ConstraintId, p: &Canon, q: &Canon, opts: &Options) -> Result<Verdict> {
    let (lts, ip, iq) = joint(p, q, &opts.alphabet)?;
    let mut prof = Profiles::new(&lts, n, iq, opts.cap);
    let all = prof.complete(ip)?;
    Ok(match least_missing(&all, iq) {
        None => Verdict::holds(),
        Some(obs) => Verdict::fails(Witness::Branching { obs }),
    })
}

/// Final-ready simulation, or final-failure simulation when `sup` is set,
/// over the observations of `p` that use each transition at most once.
/// Labels of the witness observation are initial offers.
pub fn decide_bf(sup: bool, p: &Canon, q: &Canon, opts: &Options) -> Result<Verdict> {
    let (lts, ip, iq) = joint(p, q, &opts.alphabet)?;
    let mut prof = Profiles::new(&lts, ConstraintId::I, iq, opts.cap);
    let all = prof.finals(ip, sup)?;
    Ok(match least_missing(&all, iq) {
        None => Verdict::holds(),
        Some(obs) => Verdict::fails(Witness::Branching { obs }),
    })
}

/// Whether `q` has the branching observation `obs` when only leaves are
/// compared by offer (equal, or contained when `sup` is set).
pub fn bf_member(sup: bool, obs: &BranchingObs, q: &Canon) -> bool {
    if obs.children.is_empty() {
        let (LocalObs::Offer(xs), ys) = (&obs.label, crate::lts::initials(q)) else { return false };
        return if sup { ys.is_subset(xs) } else { &ys == xs };
    }
    obs.children.iter().all(|(a, t)| q.summands().iter().any(|(b, q1)| a == b && bf_member(sup, t, q1)))
}
