//! Core algorithms for checking coherence of modular (panel-distributed)
//! Bayesian inference.
//!
//! * [`ci`] is a statement algebra for conditional independence with a
//!   forward-chaining saturation prover over the semi-graphoid axioms plus
//!   determinism rules. Every derivation comes with a replayable [`ci::Proof`].
//! * [`graph`] holds a DAG type with an exact d-separation test.
//! * [`protocol`] encodes an `m`-panel system with its admissibility protocol,
//!   generates the four protocol conditions and checks that they imply panel
//!   independence and autonomous updating.
//! * [`panels`] is the numeric side: conjugate and grid updates, product
//!   composition of panel posteriors, the joint grid oracle, divergences and
//!   likelihood-separability checks.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod ci;
pub mod graph;
pub mod panels;
pub mod protocol;
