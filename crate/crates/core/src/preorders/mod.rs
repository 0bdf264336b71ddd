//! Decision procedures for every point of the extended spectrum.

pub mod branching;
pub mod linear;
pub mod observational;
pub mod sim;

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::constraints::ConstraintId;
use crate::error::{Error, Result};
use crate::lts::Lts;
use crate::observations::{BranchingObs, LinearObs};
use crate::term::{Action, Canon};

/// How the observations of the two processes are compared.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Flavor {
    Bisim,
    /// Constrained simulation, i.e. branching observations.
    B,
    /// Deterministic branching observations.
    Db,
    /// Final-ready simulation.
    Bf,
    /// Final-failure simulation.
    BfSup,
    L,
    LSup,
    Lf,
    LfSup,
    LSub,
    LfSub,
    Join,
    Meet,
    Er,
    Ert,
    Ecr,
    Ecrt,
}

impl Flavor {
    pub const ALL: [Flavor; 17] = [
        Flavor::Bisim,
        Flavor::B,
        Flavor::Db,
        Flavor::Bf,
        Flavor::BfSup,
        Flavor::L,
        Flavor::LSup,
        Flavor::Lf,
        Flavor::LfSup,
        Flavor::LSub,
        Flavor::LfSub,
        Flavor::Join,
        Flavor::Meet,
        Flavor::Er,
        Flavor::Ert,
        Flavor::Ecr,
        Flavor::Ecrt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Flavor::Bisim => "bisim",
            Flavor::B => "b",
            Flavor::Db => "db",
            Flavor::Bf => "bf",
            Flavor::BfSup => "bf⊇",
            Flavor::L => "l",
            Flavor::LSup => "l⊇",
            Flavor::Lf => "lf",
            Flavor::LfSup => "lf⊇",
            Flavor::LSub => "l⊆",
            Flavor::LfSub => "lf⊆",
            Flavor::Join => "join",
            Flavor::Meet => "meet",
            Flavor::Er => "ER",
            Flavor::Ert => "ERT",
            Flavor::Ecr => "ECR",
            Flavor::Ecrt => "ECRT",
        }
    }

    pub fn is_linear(self) -> bool {
        matches!(
            self,
            Flavor::L | Flavor::LSup | Flavor::Lf | Flavor::LfSup | Flavor::LSub | Flavor::LfSub | Flavor::Join | Flavor::Meet
        )
    }

    pub fn is_extended(self) -> bool {
        matches!(self, Flavor::Er | Flavor::Ert | Flavor::Ecr | Flavor::Ecrt)
    }
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Flavor {
    type Err = Error;
    fn from_str(s: &str) -> Result<Flavor> {
        let ascii = match s {
            "bfsup" => "bf⊇",
            "lsup" => "l⊇",
            "lfsup" => "lf⊇",
            "lsub" => "l⊆",
            "lfsub" => "lf⊆",
            "nsim" => "b",
            other => other,
        };
        Flavor::ALL.into_iter().find(|f| f.name() == ascii).ok_or_else(|| Error::UnknownSemantics(s.to_string()))
    }
}

/// A point of the spectrum: a constraint paired with a flavor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SemanticsId {
    pub constraint: ConstraintId,
    pub flavor: Flavor,
}

const CLASSIC: &[(&str, ConstraintId, Flavor)] = &[
    ("B", ConstraintId::U, Flavor::Bisim),
    ("S", ConstraintId::U, Flavor::B),
    ("CS", ConstraintId::C, Flavor::B),
    ("RS", ConstraintId::I, Flavor::B),
    ("TS", ConstraintId::T, Flavor::B),
    ("2S", ConstraintId::S, Flavor::B),
    ("T", ConstraintId::U, Flavor::L),
    ("CT", ConstraintId::C, Flavor::L),
    ("F", ConstraintId::I, Flavor::LfSup),
    ("R", ConstraintId::I, Flavor::Lf),
    ("FT", ConstraintId::I, Flavor::LSup),
    ("RT", ConstraintId::I, Flavor::L),
    ("PW", ConstraintId::I, Flavor::Db),
    ("UPW", ConstraintId::U, Flavor::Db),
    ("PF", ConstraintId::T, Flavor::Lf),
    ("IF", ConstraintId::T, Flavor::LfSup),
    ("PFT", ConstraintId::T, Flavor::L),
    ("IFT", ConstraintId::T, Flavor::LSup),
    ("SF", ConstraintId::S, Flavor::LfSup),
    ("RV", ConstraintId::I, Flavor::Meet),
    ("JOIN", ConstraintId::I, Flavor::Join),
    ("ER", ConstraintId::U, Flavor::Er),
    ("ERT", ConstraintId::U, Flavor::Ert),
    ("ECR", ConstraintId::C, Flavor::Ecr),
    ("ECRT", ConstraintId::C, Flavor::Ecrt),
];

impl SemanticsId {
    pub fn new(constraint: ConstraintId, flavor: Flavor) -> Result<SemanticsId> {
        let id = SemanticsId { constraint, flavor };
        id.validate()?;
        Ok(id)
    }

    pub fn bisim() -> SemanticsId {
        SemanticsId { constraint: ConstraintId::U, flavor: Flavor::Bisim }
    }

    pub fn classic(name: &str) -> Option<SemanticsId> {
        CLASSIC.iter().find(|(n, _, _)| *n == name).map(|&(_, constraint, flavor)| SemanticsId { constraint, flavor })
    }

    pub fn classic_name(&self) -> Option<&'static str> {
        CLASSIC.iter().find(|(_, c, f)| *c == self.constraint && *f == self.flavor).map(|(n, _, _)| *n)
    }

    pub fn is_valid(&self) -> bool {
        use ConstraintId::*;
        match self.flavor {
            Flavor::Bisim => self.constraint == U,
            Flavor::Bf | Flavor::BfSup => self.constraint == I,
            Flavor::Er | Flavor::Ert => self.constraint == U,
            Flavor::Ecr | Flavor::Ecrt => self.constraint == C,
            Flavor::LSub | Flavor::LfSub | Flavor::Join | Flavor::Meet => self.constraint != S,
            _ => true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.is_valid() {
            Ok(())
        } else {
            Err(Error::Unsupported(format!("{}:{} is not a point of the spectrum; supported: {}", self.constraint, self.flavor, catalog())))
        }
    }

    /// Every supported id, in a fixed order.
    pub fn all_supported() -> Vec<SemanticsId> {
        let mut out = Vec::new();
        for n in ConstraintId::ALL {
            for f in Flavor::ALL {
                let id = SemanticsId { constraint: n, flavor: f };
                if id.is_valid() {
                    out.push(id);
                }
            }
        }
        out
    }
}

fn catalog() -> String {
    SemanticsId::all_supported().iter().map(|s| s.to_string()).collect::<Vec<_>>().join(", ")
}

impl fmt::Display for SemanticsId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.classic_name() {
            Some(n) => f.write_str(n),
            None => write!(f, "{}:{}", self.constraint, self.flavor),
        }
    }
}

impl FromStr for SemanticsId {
    type Err = Error;
    fn from_str(s: &str) -> Result<SemanticsId> {
        if let Some(id) = SemanticsId::classic(s) {
            return Ok(id);
        }
        let (n, f) = s.split_once(':').ok_or_else(|| Error::UnknownSemantics(s.to_string()))?;
        let n: ConstraintId = n.parse()?;
        let f: Flavor = f.parse()?;
        let id = if f == Flavor::Bisim { SemanticsId::bisim() } else { SemanticsId { constraint: n, flavor: f } };
        id.validate().map_err(|_| Error::UnknownSemantics(s.to_string()))?;
        Ok(id)
    }
}

impl Serialize for SemanticsId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Which of the three independent pathways decides a relation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Engine {
    /// Fixpoints and path searches on the joint transition graph.
    #[default]
    Direct,
    /// Literal comparison of enumerated observation sets.
    Observational,
    /// Ready or plain simulation over the saturated transition system.
    Operational,
}

impl FromStr for Engine {
    type Err = Error;
    fn from_str(s: &str) -> Result<Engine> {
        match s {
            "direct" => Ok(Engine::Direct),
            "observational" => Ok(Engine::Observational),
            "operational" => Ok(Engine::Operational),
            _ => Err(Error::Unsupported(format!("engine `{s}`"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Options {
    pub engine: Engine,
    /// Resource cap for saturations, observation profiles and enumerations.
    pub cap: usize,
    /// Actions added to those of the compared terms.
    pub alphabet: Vec<Action>,
}

impl Default for Options {
    fn default() -> Options {
        Options { engine: Engine::Direct, cap: 10_000, alphabet: Vec::new() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// A refutation of a simulation game from the pair `(p, q)`: either the
/// constraint fails, or one side makes a move every answer to which is
/// refuted in turn.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Refutation {
    pub p: Canon,
    pub q: Canon,
    #[serde(flatten)]
    pub reason: Reason,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "reason", rename_all = "lowercase")]
pub enum Reason {
    Constraint,
    Move { side: Side, action: Action, target: Canon, answers: Vec<Refutation> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Witness {
    Game(Refutation),
    /// A decorated trace of the left process with no match on the right.
    Linear { obs: LinearObs },
    /// A branching observation of the left process with no match on the right.
    Branching { obs: BranchingObs },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub holds: bool,
    pub witness: Option<Witness>,
}

impl Verdict {
    pub fn holds() -> Verdict {
        Verdict { holds: true, witness: None }
    }

    pub fn fails(w: Witness) -> Verdict {
        Verdict { holds: false, witness: Some(w) }
    }
}

pub(crate) fn joint(p: &Canon, q: &Canon, extra: &[Action]) -> Result<(Lts, usize, usize)> {
    let lts = Lts::new(&[p, q], extra)?;
    let (ip, iq) = (lts.index_of(p).unwrap(), lts.index_of(q).unwrap());
    Ok((lts, ip, iq))
}

/// Decides `p ⊑ q` for the given point of the spectrum.
pub fn decide(id: SemanticsId, p: &Canon, q: &Canon, opts: &Options) -> Result<Verdict> {
    id.validate()?;
    match opts.engine {
        Engine::Direct => decide_direct(id, p, q, opts),
        Engine::Observational => observational::decide(id, p, q, opts),
        Engine::Operational => crate::operational::decide(id, p, q, opts),
    }
}

fn decide_direct(id: SemanticsId, p: &Canon, q: &Canon, opts: &Options) -> Result<Verdict> {
    let n = id.constraint;
    match id.flavor {
        Flavor::Bisim => decide_bisim_with(p, q, &opts.alphabet),
        Flavor::B => decide_nsim_with(n, p, q, &opts.alphabet),
        Flavor::Db => branching::decide_db(n, p, q, opts),
        Flavor::Bf => branching::decide_bf(false, p, q, opts),
        Flavor::BfSup => branching::decide_bf(true, p, q, opts),
        f => linear::decide(n, f, p, q, &opts.alphabet),
    }
}

pub fn decide_bisim(p: &Canon, q: &Canon) -> Verdict {
    decide_bisim_with(p, q, &[]).expect("alphabet of two terms")
}

fn decide_bisim_with(p: &Canon, q: &Canon, extra: &[Action]) -> Result<Verdict> {
    let (lts, ip, iq) = joint(p, q, extra)?;
    let rel = sim::bisimulation(&lts);
    Ok(if rel.get(ip, iq) { Verdict::holds() } else { Verdict::fails(Witness::Game(branching::bisim_refutation(&lts, &rel, ip, iq))) })
}

pub fn decide_nsim(n: ConstraintId, p: &Canon, q: &Canon) -> Result<Verdict> {
    decide_nsim_with(n, p, q, &[])
}

fn decide_nsim_with(n: ConstraintId, p: &Canon, q: &Canon, extra: &[Action]) -> Result<Verdict> {
    let (lts, ip, iq) = joint(p, q, extra)?;
    Ok(branching::nsim(n, &lts, ip, iq))
}

pub fn decide_linear(n: ConstraintId, flavor: Flavor, p: &Canon, q: &Canon) -> Result<Verdict> {
    if !flavor.is_linear() {
        return Err(Error::Unsupported(format!("{flavor} is not a linear flavor")));
    }
    SemanticsId::new(n, flavor)?;
    linear::decide(n, flavor, p, q, &[])
}

pub fn decide_db(n: ConstraintId, p: &Canon, q: &Canon) -> Result<Verdict> {
    branching::decide_db(n, p, q, &Options::default())
}

pub fn decide_final_ready_sim(p: &Canon, q: &Canon) -> Result<Verdict> {
    branching::decide_bf(false, p, q, &Options::default())
}

pub fn decide_final_failure_sim(p: &Canon, q: &Canon) -> Result<Verdict> {
    branching::decide_bf(true, p, q, &Options::default())
}

pub fn decide_extended(flavor: Flavor, p: &Canon, q: &Canon) -> Result<Verdict> {
    let n = match flavor {
        Flavor::Er | Flavor::Ert => ConstraintId::U,
        Flavor::Ecr | Flavor::Ecrt => ConstraintId::C,
        _ => return Err(Error::Unsupported(format!("{flavor} is not an extended flavor"))),
    };
    linear::decide(n, flavor, p, q, &[])
}

/// Plain simulation `p ⊑_S q`.
pub fn similar(p: &Canon, q: &Canon) -> bool {
    let (lts, ip, iq) = joint(p, q, &[]).expect("alphabet of two terms");
    sim::simulation(&lts, |_, _| true).get(ip, iq)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Comparison {
    /// `p ⊑ q` only.
    Leq,
    /// `q ⊑ p` only.
    Geq,
    Eq,
    Incomparable,
}

impl Comparison {
    pub fn from_pair(leq: bool, geq: bool) -> Comparison {
        match (leq, geq) {
            (true, true) => Comparison::Eq,
            (true, false) => Comparison::Leq,
            (false, true) => Comparison::Geq,
            (false, false) => Comparison::Incomparable,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Comparison::Leq => "⊑",
            Comparison::Geq => "⊒",
            Comparison::Eq => "≡",
            Comparison::Incomparable => "incomparable",
        }
    }
}

impl FromStr for Comparison {
    type Err = Error;
    fn from_str(s: &str) -> Result<Comparison> {
        match s {
            "leq" => Ok(Comparison::Leq),
            "geq" => Ok(Comparison::Geq),
            "eq" => Ok(Comparison::Eq),
            "incomparable" => Ok(Comparison::Incomparable),
            _ => Err(Error::Unsupported(format!("comparison `{s}`"))),
        }
    }
}

/// Both directions of every supported id; errors are kept per cell.
pub fn spectrum_matrix(p: &Canon, q: &Canon, opts: &Options) -> Vec<(SemanticsId, Result<Comparison>)> {
    SemanticsId::all_supported()
        .into_iter()
        .map(|id| {
            let cell = decide(id, p, q, opts).and_then(|l| Ok(Comparison::from_pair(l.holds, decide(id, q, p, opts)?.holds)));
            (id, cell)
        })
        .collect()
}
