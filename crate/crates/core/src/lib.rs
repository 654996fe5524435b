//! An engine for the conditional logic DmBL*.
//!
//! The crate builds the free conditional model level by level, evaluates
//! formulas in it, extends probabilities on classical propositions to
//! conditionals with exact rational arithmetic, and checks Hilbert-style
//! derivations.

pub mod formula;
pub mod worlds;
pub mod model;
pub mod eval;
pub mod prob;
pub mod proof;
