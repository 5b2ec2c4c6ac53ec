//! Spec-file front end for the `modcoh-core` engines.
//!
//! [`parse_spec`] reads a versioned TOML spec, [`run`] executes one
//! subcommand against it and returns a [`Report`] that renders either for
//! people or as stable JSON.

pub mod report;
pub mod run;
pub mod spec;

pub use report::{Cell, Check, Outcome, ProofTrace, Report, Table, TraceStep, EXIT_FAIL, EXIT_INPUT, EXIT_PASS, SCHEMA};
pub use run::{run, Flags, RunError, Subcommand};
pub use spec::{parse_spec, parse_spec_str, ModeChoice, Spec, SpecError};
