//! Causal-consistent reversibility for labelled transition systems.
//!
//! The construction is generic: any transition system whose labels are
//! deterministic, co-deterministic and closed under the co-diamond property
//! (with respect to a symmetric independence relation) can be extended with
//! history tracking so that every action becomes undoable exactly when all
//! actions depending on it have been undone.
//!
//! The crate is layered accordingly:
//!
//! * [`lts`] defines the contract an instance must satisfy ([`lts::Lts`])
//!   together with bounded exploration and a checker for the contract itself.
//! * [`trace`] implements label sequences up to commutation of independent
//!   labels, represented by a canonical (Foata-style) normal form.
//! * [`reversible`] builds the reversible layer: configurations pairing a
//!   trace with a current term, forward/backward steps, normalization of
//!   signed runs and a decision procedure for causal equivalence.
//! * [`ccs`] instantiates the contract for CCS with choice, parallel
//!   composition, restriction and recursion, using labels refined enough to
//!   make the semantics co-deterministic.
//! * [`xmachine`] instantiates it for shared-memory systems of X-machines
//!   whose actions are refined into reversible pieces.

pub mod ccs;
pub mod lts;
pub mod reversible;
pub mod trace;
pub mod xmachine;

pub use lts::{
    check_theory, reachable, step, Fragment, Lts, TheoryReport, DEFAULT_DEPTH, DEFAULT_STATE_CAP,
};
pub use reversible::{Configuration, SignedLabel};
pub use trace::Trace;
