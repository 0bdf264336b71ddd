//! Local observation functions for the five constraints and the comparisons on
//! their values.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lts::{initials, traces, ActionSet, Lts, Trace};
use crate::preorders::sim::{simulation, Relation};
use crate::term::{Action, Canon};

/// The constraints, ordered from coarsest to finest.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ConstraintId {
    U,
    C,
    I,
    T,
    S,
}

impl ConstraintId {
    pub const ALL: [ConstraintId; 5] = [ConstraintId::U, ConstraintId::C, ConstraintId::I, ConstraintId::T, ConstraintId::S];
}

impl fmt::Display for ConstraintId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for ConstraintId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "U" => Ok(ConstraintId::U),
            "C" => Ok(ConstraintId::C),
            "I" => Ok(ConstraintId::I),
            "T" => Ok(ConstraintId::T),
            "S" => Ok(ConstraintId::S),
            _ => Err(Error::UnknownSemantics(s.to_string())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(untagged)]
pub enum LocalObs {
    Unit,
    Terminated(bool),
    Offer(BTreeSet<Action>),
    Traces(BTreeSet<Trace>),
    SimClass(Canon),
}

impl LocalObs {
    pub fn constraint(&self) -> ConstraintId {
        match self {
            LocalObs::Unit => ConstraintId::U,
            LocalObs::Terminated(_) => ConstraintId::C,
            LocalObs::Offer(_) => ConstraintId::I,
            LocalObs::Traces(_) => ConstraintId::T,
            LocalObs::SimClass(_) => ConstraintId::S,
        }
    }
}

impl fmt::Display for LocalObs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LocalObs::Unit => f.write_str("·"),
            LocalObs::Terminated(b) => write!(f, "{b}"),
            LocalObs::Offer(set) => {
                let names: Vec<&str> = set.iter().map(Action::as_str).collect();
                write!(f, "{{{}}}", names.join(","))
            }
            LocalObs::Traces(set) => {
                let items: Vec<String> = set
                    .iter()
                    .map(|t| if t.is_empty() { "ε".to_string() } else { t.iter().map(Action::as_str).collect::<Vec<_>>().join("") })
                    .collect();
                write!(f, "{{{}}}", items.join(","))
            }
            LocalObs::SimClass(p) => write!(f, "[{p}]"),
        }
    }
}

pub fn local_obs(n: ConstraintId, p: &Canon) -> LocalObs {
    match n {
        ConstraintId::U => LocalObs::Unit,
        ConstraintId::C => LocalObs::Terminated(p.is_nil()),
        ConstraintId::I => LocalObs::Offer(initials(p)),
        ConstraintId::T => LocalObs::Traces(traces(p)),
        ConstraintId::S => LocalObs::SimClass(p.clone()),
    }
}

/// Decides plain simulation between representatives of simulation classes.
pub trait SimilarityOracle {
    fn simulated_by(&self, p: &Canon, q: &Canon) -> bool;
}

/// The simulation fixpoint of module `preorders`.
pub struct PlainSimilarity;

impl SimilarityOracle for PlainSimilarity {
    fn simulated_by(&self, p: &Canon, q: &Canon) -> bool {
        crate::preorders::similar(p, q)
    }
}

fn same_constraint(n: ConstraintId, l1: &LocalObs, l2: &LocalObs) -> Result<()> {
    if l1.constraint() == n && l2.constraint() == n {
        Ok(())
    } else {
        Err(Error::MixedConstraints)
    }
}

pub fn local_eq(n: ConstraintId, l1: &LocalObs, l2: &LocalObs) -> Result<bool> {
    local_eq_with(n, l1, l2, &PlainSimilarity)
}

pub fn local_eq_with(n: ConstraintId, l1: &LocalObs, l2: &LocalObs, sim: &dyn SimilarityOracle) -> Result<bool> {
    same_constraint(n, l1, l2)?;
    Ok(match (l1, l2) {
        (LocalObs::SimClass(p), LocalObs::SimClass(q)) => sim.simulated_by(p, q) && sim.simulated_by(q, p),
        _ => l1 == l2,
    })
}

/// `l1 ⊒ l2`: equality for U and C, superset for I and T, and for S the
/// class of `l2` simulated by the class of `l1`.
pub fn local_geq(n: ConstraintId, l1: &LocalObs, l2: &LocalObs) -> Result<bool> {
    local_geq_with(n, l1, l2, &PlainSimilarity)
}

pub fn local_geq_with(n: ConstraintId, l1: &LocalObs, l2: &LocalObs, sim: &dyn SimilarityOracle) -> Result<bool> {
    same_constraint(n, l1, l2)?;
    Ok(match (l1, l2) {
        (LocalObs::Offer(a), LocalObs::Offer(b)) => a.is_superset(b),
        (LocalObs::Traces(a), LocalObs::Traces(b)) => a.is_superset(b),
        (LocalObs::SimClass(p), LocalObs::SimClass(q)) => sim.simulated_by(q, p),
        _ => l1 == l2,
    })
}

pub fn constraint_holds(n: ConstraintId, p: &Canon, q: &Canon) -> bool {
    local_eq(n, &local_obs(n, p), &local_obs(n, q)).expect("same constraint")
}

/// Local observations of the states of an [`Lts`], compared by index.
///
/// `covers(x, y)` is the order used when matching decorated traces: superset
/// for I and T, simulation for S, and for C "x terminated implies y
/// terminated". On sets of observations of a finite term the latter yields the
/// same preorders as equality, because a non-terminated state always has a
/// continuation that must be matched too.
pub struct LocalCtx<'a> {
    pub n: ConstraintId,
    pub lts: &'a Lts,
    traces: Vec<BTreeSet<Vec<usize>>>,
    sim: Option<Relation>,
}

impl<'a> LocalCtx<'a> {
    pub fn new(n: ConstraintId, lts: &'a Lts) -> LocalCtx<'a> {
        let traces = if n == ConstraintId::T { lts.trace_sets() } else { Vec::new() };
        let sim = (n == ConstraintId::S).then(|| simulation(lts, |_, _| true));
        LocalCtx { n, lts, traces, sim }
    }

    pub fn eq(&self, x: usize, y: usize) -> bool {
        match self.n {
            ConstraintId::U => true,
            ConstraintId::C => self.lts.is_terminal(x) == self.lts.is_terminal(y),
            ConstraintId::I => self.lts.offers(x) == self.lts.offers(y),
            ConstraintId::T => self.traces[x] == self.traces[y],
            ConstraintId::S => {
                let s = self.sim.as_ref().unwrap();
                s.get(x, y) && s.get(y, x)
            }
        }
    }

    pub fn covers(&self, x: usize, y: usize) -> bool {
        match self.n {
            ConstraintId::U => true,
            ConstraintId::C => self.lts.is_terminal(x) == self.lts.is_terminal(y),
            ConstraintId::I => self.lts.offers(y) & !self.lts.offers(x) == 0,
            ConstraintId::T => self.traces[x].is_superset(&self.traces[y]),
            ConstraintId::S => self.sim.as_ref().unwrap().get(y, x),
        }
    }

    pub fn offers(&self, x: usize) -> ActionSet {
        self.lts.offers(x)
    }

    pub fn traces(&self, x: usize) -> &BTreeSet<Vec<usize>> {
        &self.traces[x]
    }

    pub fn similar(&self, x: usize, y: usize) -> bool {
        self.sim.as_ref().expect("S context").get(x, y)
    }

    pub fn obs(&self, x: usize) -> LocalObs {
        match self.n {
            ConstraintId::U => LocalObs::Unit,
            ConstraintId::C => LocalObs::Terminated(self.lts.is_terminal(x)),
            ConstraintId::I => LocalObs::Offer(self.lts.actions_of(self.lts.offers(x))),
            ConstraintId::T => LocalObs::Traces(
                self.traces[x]
                    .iter()
                    .map(|t| t.iter().map(|&a| self.lts.alphabet()[a].clone()).collect())
                    .collect(),
            ),
            ConstraintId::S => LocalObs::SimClass(self.lts.state(x).clone()),
        }
    }
}
