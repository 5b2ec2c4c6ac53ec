//! Conditional-independence statement algebra and saturation prover.
//!
//! Statements `A ⫫ B | C` range over a finite [`Universe`] of at most 64
//! ground symbols. Sets of symbols are [`VarSet`] bitmasks, which keeps
//! saturation over universes of a dozen or so symbols cheap.
//!
//! The rule system is the semi-graphoid one (symmetry, decomposition, weak
//! union, contraction) extended with three rules licensed by functional
//! dependencies between symbols: adding a determined symbol to the
//! conditioning set, dropping it again, and moving it into one side of the
//! statement. See [`Rule`].

mod error;
mod lemma;
mod proof;
mod rules;
mod saturate;
mod statement;
mod symbols;

pub use error::CiError;
pub use lemma::derive_via;
pub use proof::{Proof, ProofStep, ReplayError, StepInput};
pub use rules::{apply_axiom, Determinism, FunctionalDependency, Rule};
pub use saturate::{
    closure, derive, saturate_towards, DeriveError, Saturation, SaturationStatus,
    DEFAULT_BUDGET,
};
pub use statement::{normalize, CIStatement};
pub use symbols::{SymbolId, Universe, VarSet, MAX_SYMBOLS};
