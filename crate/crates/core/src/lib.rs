//! Process terms over a finite alphabet, the linear-time/branching-time
//! spectrum of preorders built from local constraints, their modal
//! characterizations and axiomatizations.

pub mod axioms;
pub mod constraints;
pub mod corpus;
pub mod error;
pub mod logic;
pub mod lts;
pub mod observations;
pub mod operational;
pub mod preorders;
pub mod term;

pub use constraints::ConstraintId;
pub use error::{Error, Result};
pub use logic::{distinguish, parse_formula, sat, Formula, SublogicId};
pub use preorders::{decide, Comparison, Engine, Flavor, Options, SemanticsId, Verdict, Witness};
pub use term::{canonicalize, parse_term, Action, Canon, Term};
