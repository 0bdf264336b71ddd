//! The saturation engine: merge summands `ap + a(q+r)` into `a(p+q)` while a
//! condition on the initial offers (or traces) holds, then decide linear
//! semantics as ready simulation over the saturated transitions.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::axioms::{ConditionId, LinearZ};
use crate::constraints::{ConstraintId, LocalCtx};
use crate::error::{Error, Result};
use crate::lts::Lts;
use crate::preorders::branching::sim_refutation;
use crate::preorders::sim::{simulation, simulation_between};
use crate::preorders::{Flavor, Options, SemanticsId, Verdict, Witness};
use crate::term::{Action, Canon};

/// A term together with the terms met while saturating it. `top` contains
/// the summands of every member.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SaturatedState {
    pub base: Canon,
    pub top: Canon,
    pub saturation: BTreeSet<Canon>,
}

pub fn nd_saturate(z: LinearZ, p: &Canon, cap: usize) -> Result<SaturatedState> {
    saturate_with(z.condition(), p, cap)
}

/// Saturation under an arbitrary side condition `M(x, y, w)`.
pub fn saturate_with(cond: ConditionId, p: &Canon, cap: usize) -> Result<SaturatedState> {
    let mut summands: BTreeSet<(Action, Canon)> = p.summands().iter().cloned().collect();
    let mut saturation: BTreeSet<Canon> = [p.clone()].into_iter().collect();
    loop {
        let current: Vec<(Action, Canon)> = summands.iter().cloned().collect();
        let mut added = false;
        for (a, x) in &current {
            for (b, body) in &current {
                if a != b {
                    continue;
                }
                let parts = body.summands();
                if parts.len() > 20 {
                    return Err(Error::CapExceeded { what: "summand width during saturation".into(), cap: 20 });
                }
                for mask in 0u32..(1 << parts.len()) {
                    let y = Canon::from_summands(parts.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, s)| s.clone()));
                    let w = Canon::from_summands(parts.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 0).map(|(_, s)| s.clone()));
                    if !cond.holds(x, &y, &w) {
                        continue;
                    }
                    let merged = (a.clone(), x.plus(&y));
                    if summands.insert(merged) {
                        added = true;
                        if summands.len() > cap {
                            return Err(Error::CapExceeded { what: "saturated summands".into(), cap });
                        }
                        saturation.insert(Canon::from_summands(summands.iter().cloned()));
                    }
                }
            }
        }
        if !added {
            break;
        }
    }
    let top = Canon::from_summands(summands);
    Ok(SaturatedState { base: p.clone(), top, saturation })
}

pub fn step_z(z: LinearZ, p: &Canon, cap: usize) -> Result<Vec<(Action, Canon)>> {
    Ok(nd_saturate(z, p, cap)?.top.summands().to_vec())
}

fn saturated_graph(cond: ConditionId, roots: &[&Canon], extra: &[Action], cap: usize) -> Result<Lts> {
    let mut memo: HashMap<Canon, Vec<(Action, Canon)>> = HashMap::new();
    Lts::with_steps(roots, extra, |s| {
        if let Some(v) = memo.get(s) {
            return Ok(v.clone());
        }
        let v = saturate_with(cond, s, cap)?.top.summands().to_vec();
        memo.insert(s.clone(), v.clone());
        Ok(v)
    })
}

/// Which saturation and game decide the given id, if any.
fn plan(id: SemanticsId) -> Option<(ConditionId, ConstraintId)> {
    use ConstraintId::*;
    let z = match id.flavor {
        Flavor::LfSup => LinearZ::F,
        Flavor::Lf => LinearZ::R,
        Flavor::LSup => LinearZ::FT,
        Flavor::L => LinearZ::RT,
        _ => return None,
    };
    match id.constraint {
        I => Some((z.condition(), I)),
        T => Some((z.trace_condition(), T)),
        U if z == LinearZ::RT => Some((ConditionId::F, U)),
        _ => None,
    }
}

/// Decides `p ⊑ q` as a constrained simulation over the saturated system:
/// ready simulation for the offer layer, plain simulation over the fully
/// merged system for traces, and (experimentally) trace-constrained
/// simulation for the trace layer.
pub fn decide(id: SemanticsId, p: &Canon, q: &Canon, opts: &Options) -> Result<Verdict> {
    let (cond, n) = plan(id).ok_or_else(|| Error::Unsupported(format!("{id} has no operational characterization")))?;
    let lts = saturated_graph(cond, &[p, q], &opts.alphabet, opts.cap)?;
    let (ip, iq) = (lts.index_of(p).unwrap(), lts.index_of(q).unwrap());
    let ctx = LocalCtx::new(n, &lts);
    let rel = simulation(&lts, |x, y| ctx.eq(x, y));
    Ok(if rel.get(ip, iq) { Verdict::holds() } else { Verdict::fails(Witness::Game(sim_refutation(&lts, &ctx, &rel, ip, iq))) })
}

pub fn decide_via_operational(z: LinearZ, p: &Canon, q: &Canon, cap: usize) -> Result<Verdict> {
    decide(z.semantics(), p, q, &Options { cap, ..Options::default() })
}

/// Trace inclusion as plain simulation over the fully merged system.
pub fn decide_t_via_operational(p: &Canon, q: &Canon, cap: usize) -> Result<Verdict> {
    decide(SemanticsId::classic("T").unwrap(), p, q, &Options { cap, ..Options::default() })
}

/// Ready simulation in which only the simulating side may use saturated moves.
pub fn check_upto(n: ConstraintId, z: LinearZ, p: &Canon, q: &Canon, cap: usize) -> Result<bool> {
    if n != ConstraintId::I {
        return Err(Error::Unsupported(format!("simulation up-to for constraint {n}")));
    }
    let alphabet: Vec<Action> = p.actions().union(&q.actions()).cloned().collect();
    let left = Lts::new(&[p], &alphabet)?;
    let right = saturated_graph(z.condition(), &[q], &alphabet, cap)?;
    let rel = simulation_between(&left, &right, |x, y| left.offers(x) == right.offers(y));
    Ok(rel.get(left.index_of(p).unwrap(), right.index_of(q).unwrap()))
}

/// Merges all equally labelled derivatives, recursively.
pub fn deter(p: &Canon) -> Canon {
    let mut groups: Vec<(Action, Vec<Canon>)> = Vec::new();
    for (a, b) in p.summands() {
        match groups.last_mut() {
            Some((g, bodies)) if g == a => bodies.push(b.clone()),
            _ => groups.push((a.clone(), vec![b.clone()])),
        }
    }
    Canon::from_summands(groups.into_iter().map(|(a, bodies)| (a, deter(&Canon::sum(bodies.iter())))))
}
