//! Linear flavors: every decorated trace of the left process needs a match on
//! the right with the same trace. A depth-first walk over the left paths
//! carries the set of right states still able to match.

use std::collections::BTreeSet;

use crate::constraints::{ConstraintId, LocalCtx};
use crate::error::Result;
use crate::observations::LinearObs;
use crate::preorders::{joint, Flavor, Verdict, Witness};
use crate::term::{Action, Canon};

pub fn decide(n: ConstraintId, flavor: Flavor, p: &Canon, q: &Canon, extra: &[Action]) -> Result<Verdict> {
    let (lts, ip, iq) = joint(p, q, extra)?;
    let ctx = LocalCtx::new(n, &lts);
    Ok(match least_failure(&ctx, flavor, ip, iq) {
        None => Verdict::holds(),
        Some(path) => Verdict::fails(Witness::Linear { obs: path_obs(&ctx, &path) }),
    })
}

/// A path of the left process: its root and the (action, state) steps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Path {
    pub root: usize,
    pub steps: Vec<(usize, usize)>,
}

impl Path {
    pub fn states(&self) -> impl Iterator<Item = usize> + '_ {
        std::iter::once(self.root).chain(self.steps.iter().map(|&(_, s)| s))
    }
}

pub fn path_obs(ctx: &LocalCtx, path: &Path) -> LinearObs {
    let alphabet = ctx.lts.alphabet();
    LinearObs {
        head: ctx.obs(path.root),
        steps: path.steps.iter().map(|&(a, s)| (alphabet[a].clone(), ctx.obs(s))).collect(),
    }
}

/// Whether `y` may stand for `x` at a non-final position.
pub fn mid_ok(ctx: &LocalCtx, flavor: Flavor, x: usize, y: usize) -> bool {
    match flavor {
        Flavor::L => ctx.eq(x, y),
        Flavor::LSup | Flavor::Join => ctx.covers(x, y),
        Flavor::LSub => ctx.covers(y, x),
        Flavor::Ert => ctx.offers(x) & !ctx.offers(y) == 0,
        Flavor::Ecrt => ext_ok(ctx, x, y),
        _ => true,
    }
}

/// Whether `y` may stand for `x` at the final position.
pub fn final_ok(ctx: &LocalCtx, flavor: Flavor, x: usize, y: usize) -> bool {
    match flavor {
        Flavor::L | Flavor::Lf | Flavor::Join => ctx.eq(x, y),
        Flavor::LSup | Flavor::LfSup => ctx.covers(x, y),
        Flavor::LSub | Flavor::LfSub => ctx.covers(y, x),
        Flavor::Er | Flavor::Ert => ctx.offers(x) & !ctx.offers(y) == 0,
        Flavor::Ecr | Flavor::Ecrt => ext_ok(ctx, x, y),
        Flavor::Meet => ctx.eq(x, y),
        _ => unreachable!("not a linear flavor"),
    }
}

fn ext_ok(ctx: &LocalCtx, x: usize, y: usize) -> bool {
    ctx.offers(x) & !ctx.offers(y) == 0 && (ctx.offers(x) != 0 || ctx.offers(y) == 0)
}

/// The final test against a whole candidate set.
pub fn final_matched(ctx: &LocalCtx, flavor: Flavor, x: usize, cands: &[usize]) -> bool {
    if flavor != Flavor::Meet {
        return cands.iter().any(|&y| final_ok(ctx, flavor, x, y));
    }
    match ctx.n {
        ConstraintId::I => {
            let xs = ctx.offers(x);
            let below: Vec<u64> = cands.iter().map(|&y| ctx.offers(y)).filter(|o| o & !xs == 0).collect();
            !below.is_empty() && below.iter().fold(0, |m, o| m | o) == xs
        }
        ConstraintId::T => {
            let xs = ctx.traces(x);
            let mut union = BTreeSet::new();
            for &y in cands {
                if xs.is_superset(ctx.traces(y)) {
                    union.extend(ctx.traces(y).iter().cloned());
                }
            }
            !union.is_empty() && &union == xs
        }
        _ => cands.iter().any(|&y| ctx.eq(x, y)),
    }
}

/// Right states reached from `cands` by action `a`, sorted.
pub fn after(ctx: &LocalCtx, cands: &[usize], a: usize) -> Vec<usize> {
    let set: BTreeSet<usize> = cands.iter().flat_map(|&y| ctx.lts.succ_by(y, a)).collect();
    set.into_iter().collect()
}

/// All unmatched left paths are visited; `visit` returns false to stop.
fn walk(ctx: &LocalCtx, flavor: Flavor, path: &mut Path, cands: &[usize], visit: &mut dyn FnMut(&Path) -> bool) -> bool {
    let x = path.steps.last().map(|&(_, s)| s).unwrap_or(path.root);
    if !final_matched(ctx, flavor, x, cands) && !visit(path) {
        return false;
    }
    let kept: Vec<usize> = cands.iter().copied().filter(|&y| mid_ok(ctx, flavor, x, y)).collect();
    for &(a, x1) in ctx.lts.succ(x) {
        let next = after(ctx, &kept, a);
        path.steps.push((a, x1));
        let go_on = walk(ctx, flavor, path, &next, visit);
        path.steps.pop();
        if !go_on {
            return false;
        }
    }
    true
}

/// The unmatched path with the least trace, then the least observation.
pub fn least_failure(ctx: &LocalCtx, flavor: Flavor, x: usize, y: usize) -> Option<Path> {
    let mut path = Path { root: x, steps: Vec::new() };
    let mut any = false;
    walk(ctx, flavor, &mut path, &[y], &mut |_| {
        any = true;
        false
    });
    if !any {
        return None;
    }
    let mut best: Option<(Vec<usize>, LinearObs, Path)> = None;
    walk(ctx, flavor, &mut path, &[y], &mut |p| {
        let key = (p.steps.iter().map(|&(a, _)| a).collect::<Vec<_>>(), path_obs(ctx, p));
        if best.as_ref().is_none_or(|(t, o, _)| (&key.0, &key.1) < (t, o)) {
            best = Some((key.0, key.1, p.clone()));
        }
        true
    });
    best.map(|(_, _, p)| p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lts::Lts;

    fn c(s: &str) -> Canon {
        Canon::parse(s).unwrap()
    }

    fn holds(n: ConstraintId, f: Flavor, p: &str, q: &str) -> bool {
        decide(n, f, &c(p), &c(q), &[]).unwrap().holds
    }

    #[test]
    fn failures_and_readiness() {
        use ConstraintId::I;
        assert!(!holds(I, Flavor::LfSup, "a.b.0+a.c.0", "a.(b.0+c.0)"));
        assert!(holds(I, Flavor::LfSup, "a.(b.0+c.0)", "a.b.0+a.c.0"));
        assert!(holds(I, Flavor::Lf, "a.b.0", "a.b.0+a.c.0"));
        assert!(!holds(I, Flavor::Lf, "a.b.0+a.c.0", "a.b.0"));
    }

    #[test]
    fn meet_needs_a_nonempty_family() {
        assert!(!holds(ConstraintId::I, Flavor::Meet, "a.0", "a.b.0"));
        assert!(holds(ConstraintId::I, Flavor::Meet, "a.(b.0+c.0)", "a.b.0+a.c.0"));
    }

    #[test]
    fn witness_is_least() {
        let (p, q) = (c("a.b.c.0 + b.0"), c("a.b.0"));
        let lts = Lts::new(&[&p, &q], &[]).unwrap();
        let ctx = LocalCtx::new(ConstraintId::U, &lts);
        let path = least_failure(&ctx, Flavor::L, lts.index_of(&p).unwrap(), lts.index_of(&q).unwrap()).unwrap();
        assert_eq!(path_obs(&ctx, &path).trace(), vec![Action::new("a").unwrap(), Action::new("b").unwrap(), Action::new("c").unwrap()]);
    }
}
