//! The observational engine: enumerate the observation sets of both
//! processes and compare them literally. Labels are replaced by the least
//! equivalent state of the joint graph, so comparisons are exact for every
//! constraint including S.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use crate::constraints::{ConstraintId, LocalCtx};
use crate::error::{Error, Result};
use crate::lts::Lts;
use crate::observations::{enum_transition_bgo, BranchingObs, LinearObs};
use crate::preorders::branching::bf_member;
use crate::preorders::linear::{final_matched, final_ok, mid_ok};
use crate::preorders::{joint, Flavor, Options, SemanticsId, Verdict, Witness};
use crate::term::Canon;

pub fn decide(id: SemanticsId, p: &Canon, q: &Canon, opts: &Options) -> Result<Verdict> {
    let (lts, ip, iq) = joint(p, q, &opts.alphabet)?;
    let ctx = LocalCtx::new(id.constraint, &lts);
    let classes = Classes::new(&ctx, id.flavor.is_extended());
    match id.flavor {
        Flavor::Bisim => Ok(if p == q {
            Verdict::holds()
        } else {
            crate::preorders::decide(id, p, q, &Options { engine: crate::preorders::Engine::Direct, ..opts.clone() })?
        }),
        Flavor::B | Flavor::Db => {
            let det = id.flavor == Flavor::Db;
            let mut table = Interner::default();
            let left = table.ids(&lts, &classes, ip, det, opts.cap)?;
            let right = table.ids(&lts, &classes, iq, det, opts.cap)?;
            match left.iter().filter(|i| !right.contains(i)).min() {
                None => Ok(Verdict::holds()),
                Some(&missing) => Ok(Verdict::fails(Witness::Branching { obs: table.decode(&lts, &ctx, missing) })),
            }
        }
        Flavor::Bf | Flavor::BfSup => {
            let sup = id.flavor == Flavor::BfSup;
            let items = enum_transition_bgo(ConstraintId::I, p, opts.cap)?;
            Ok(match items.into_iter().find(|o| !bf_member(sup, o, q)) {
                None => Verdict::holds(),
                Some(obs) => Verdict::fails(Witness::Branching { obs }),
            })
        }
        f => {
            let left = lgos(&lts, &classes, ip);
            let right = lgos(&lts, &classes, iq);
            let mut by_trace: BTreeMap<&[usize], Vec<&[usize]>> = BTreeMap::new();
            for (t, ls) in &right {
                by_trace.entry(t).or_default().push(ls);
            }
            for (t, xs) in &left {
                let ys = by_trace.get(t.as_slice()).map(Vec::as_slice).unwrap_or(&[]);
                if !lgo_matched(&ctx, f, xs, ys) {
                    return Ok(Verdict::fails(Witness::Linear { obs: decode_lgo(&lts, &ctx, t, xs) }));
                }
            }
            Ok(Verdict::holds())
        }
    }
}

/// Least equivalent state for every state of the graph. Extended flavors
/// also look at offers, so their classes refine by offers too.
struct Classes(Vec<usize>);

impl Classes {
    fn new(ctx: &LocalCtx, offers: bool) -> Classes {
        let same = |x: usize, y: usize| ctx.eq(x, y) && (!offers || ctx.lts.offers(x) == ctx.lts.offers(y));
        Classes((0..ctx.lts.len()).map(|x| (0..=x).find(|&y| same(x, y)).unwrap()).collect())
    }
}

/// The decorated traces of `x` as (trace, class labels), sorted by trace.
fn lgos(lts: &Lts, classes: &Classes, x: usize) -> BTreeSet<(Vec<usize>, Vec<usize>)> {
    fn go(lts: &Lts, classes: &Classes, x: usize, t: &mut Vec<usize>, l: &mut Vec<usize>, out: &mut BTreeSet<(Vec<usize>, Vec<usize>)>) {
        l.push(classes.0[x]);
        out.insert((t.clone(), l.clone()));
        for &(a, x1) in lts.succ(x) {
            t.push(a);
            go(lts, classes, x1, t, l, out);
            t.pop();
        }
        l.pop();
    }
    let mut out = BTreeSet::new();
    go(lts, classes, x, &mut Vec::new(), &mut Vec::new(), &mut out);
    out
}

fn lgo_matched(ctx: &LocalCtx, f: Flavor, xs: &[usize], ys: &[&[usize]]) -> bool {
    let n = xs.len() - 1;
    let mids: Vec<&[usize]> = ys.iter().copied().filter(|ys| (0..n).all(|i| mid_ok(ctx, f, xs[i], ys[i]))).collect();
    if f == Flavor::Meet {
        let finals: Vec<usize> = mids.iter().map(|ys| ys[n]).collect();
        return final_matched(ctx, f, xs[n], &finals);
    }
    mids.iter().any(|ys| final_ok(ctx, f, xs[n], ys[n]))
}

fn decode_lgo(lts: &Lts, ctx: &LocalCtx, t: &[usize], xs: &[usize]) -> LinearObs {
    LinearObs {
        head: ctx.obs(xs[0]),
        steps: t.iter().zip(&xs[1..]).map(|(&a, &x)| (lts.alphabet()[a].clone(), ctx.obs(x))).collect(),
    }
}

/// Hash-consed branching observations over class labels.
#[derive(Default)]
struct Interner {
    nodes: HashMap<(usize, Vec<(usize, u32)>), u32>,
    decoded: Vec<(usize, Vec<(usize, u32)>)>,
    sets: HashMap<usize, HashSet<u32>>,
}

impl Interner {
    fn intern(&mut self, key: (usize, Vec<(usize, u32)>)) -> u32 {
        if let Some(&i) = self.nodes.get(&key) {
            return i;
        }
        let i = self.decoded.len() as u32;
        self.decoded.push(key.clone());
        self.nodes.insert(key, i);
        i
    }

    fn ids(&mut self, lts: &Lts, classes: &Classes, x: usize, det: bool, cap: usize) -> Result<HashSet<u32>> {
        if let Some(s) = self.sets.get(&x) {
            return Ok(s.clone());
        }
        let mut kids: BTreeSet<(usize, u32)> = BTreeSet::new();
        for &(a, x1) in lts.succ(x) {
            for id in self.ids(lts, classes, x1, det, cap)? {
                kids.insert((a, id));
            }
        }
        let kids: Vec<(usize, u32)> = kids.into_iter().collect();
        let mut out = HashSet::new();
        let mut chosen = Vec::new();
        self.subsets(classes.0[x], &kids, 0, det, cap, &mut chosen, &mut out)?;
        self.sets.insert(x, out.clone());
        Ok(out)
    }

    #[allow(clippy::too_many_arguments)]
    fn subsets(
        &mut self,
        label: usize,
        kids: &[(usize, u32)],
        start: usize,
        det: bool,
        cap: usize,
        chosen: &mut Vec<(usize, u32)>,
        out: &mut HashSet<u32>,
    ) -> Result<()> {
        out.insert(self.intern((label, chosen.clone())));
        if out.len() > cap.max(1 << 16) {
            return Err(Error::CapExceeded { what: "branching observations".into(), cap: cap.max(1 << 16) });
        }
        for i in start..kids.len() {
            if det && chosen.iter().any(|&(a, _)| a == kids[i].0) {
                continue;
            }
            chosen.push(kids[i]);
            self.subsets(label, kids, i + 1, det, cap, chosen, out)?;
            chosen.pop();
        }
        Ok(())
    }

    fn decode(&self, lts: &Lts, ctx: &LocalCtx, id: u32) -> BranchingObs {
        let (label, kids) = &self.decoded[id as usize];
        BranchingObs::new(ctx.obs(*label), kids.iter().map(|&(a, k)| (lts.alphabet()[a].clone(), self.decode(lts, ctx, k))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preorders::Engine;

    fn c(s: &str) -> Canon {
        Canon::parse(s).unwrap()
    }

    #[test]
    fn agrees_with_direct_on_examples() {
        let obs = Options { engine: Engine::Observational, ..Options::default() };
        let pairs = [("a.(b.0+c.0)", "a.b.0+a.c.0"), ("a.b.0", "a.0+a.(b.0+c.0)"), ("a.b.c.0+a.b.d.0", "a.(b.c.0+b.d.0)")];
        for id in SemanticsId::all_supported() {
            for (p, q) in pairs {
                for (x, y) in [(c(p), c(q)), (c(q), c(p))] {
                    let d = crate::preorders::decide(id, &x, &y, &Options::default()).unwrap().holds;
                    let o = crate::preorders::decide(id, &x, &y, &obs).unwrap().holds;
                    assert_eq!(d, o, "{id} {x} {y}");
                }
            }
        }
    }
}
