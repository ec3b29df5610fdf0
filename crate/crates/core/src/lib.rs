//! Turn natural-language process descriptions into formal process artifacts
//! through a large language model, and score the results.
//!
//! The crate is organised as a small compiler pipeline:
//!
//! - [`prompt`] assembles four-part prompts and enumerates robustness run plans.
//! - [`llm`] sends stateless chat requests and records every exchange to a
//!   JSON Lines transcript so that runs can be replayed offline.
//! - [`notation`] parses the constrained text the model answers with into the
//!   intermediate representation in [`ir`].
//! - [`export`] compiles IR values to BPMN 2.0 XML, Declare files and LTL text.
//! - [`eval`] scores predictions against gold annotations and summarises
//!   output/input robustness across runs.

pub mod eval;
pub mod export;
pub mod ir;
pub mod llm;
pub mod notation;
pub mod par;
pub mod prompt;

pub use ir::{canonicalize_label, BpmTask};
pub use par::Execution;
