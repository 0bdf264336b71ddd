//! Greatest-fixpoint simulation relations on transition graphs.
//!
//! Graph indices are a topological order (targets precede sources), so a
//! single ascending sweep computes each fixpoint.

use fixedbitset::FixedBitSet;

use crate::lts::Lts;

#[derive(Clone, Debug)]
pub struct Relation {
    cols: usize,
    bits: FixedBitSet,
}

impl Relation {
    pub fn new(rows: usize, cols: usize) -> Relation {
        Relation { cols, bits: FixedBitSet::with_capacity(rows * cols) }
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits.contains(x * self.cols + y)
    }

    pub fn set(&mut self, x: usize, y: usize) {
        self.bits.insert(x * self.cols + y);
    }
}

/// The largest relation `R ⊆ init` such that every move of the left state is
/// answered by an equally labelled move of the right state staying in `R`.
pub fn simulation_between(left: &Lts, right: &Lts, init: impl Fn(usize, usize) -> bool) -> Relation {
    let mut rel = Relation::new(left.len(), right.len());
    for x in 0..left.len() {
        for y in 0..right.len() {
            if init(x, y) && transfers(left, right, &rel, x, y) {
                rel.set(x, y);
            }
        }
    }
    rel
}

pub fn simulation(lts: &Lts, init: impl Fn(usize, usize) -> bool) -> Relation {
    simulation_between(lts, lts, init)
}

/// Whether every move of `x` has an answer from `y` inside `rel`.
pub fn transfers(left: &Lts, right: &Lts, rel: &Relation, x: usize, y: usize) -> bool {
    left.succ(x).iter().all(|&(a, x1)| answer(left, right, rel, a, x1, y).is_some())
}

/// A move `y -a-> y1` with `(x1, y1)` related, if any.
pub fn answer(left: &Lts, right: &Lts, rel: &Relation, a: usize, x1: usize, y: usize) -> Option<usize> {
    let name = &left.alphabet()[a];
    let b = right.action_index(name)?;
    right.succ_by(y, b).find(|&y1| rel.get(x1, y1))
}

pub fn bisimulation(lts: &Lts) -> Relation {
    let mut rel = Relation::new(lts.len(), lts.len());
    for x in 0..lts.len() {
        for y in 0..lts.len() {
            let fwd = lts.succ(x).iter().all(|&(a, x1)| lts.succ_by(y, a).any(|y1| rel.get(x1, y1)));
            let bwd = lts.succ(y).iter().all(|&(a, y1)| lts.succ_by(x, a).any(|x1| rel.get(x1, y1)));
            if fwd && bwd {
                rel.set(x, y);
            }
        }
    }
    rel
}
