//! Parsers for the constrained text the model answers with.
//!
//! All three parsers are line oriented and total: every non-blank input line
//! ends up parsed, parsed with a warning, or rejected with a reason. Lines
//! that match no grammar are never guessed at.

mod bpmn;
mod lines;
mod ltl;
mod report;
mod rpa;

pub use bpmn::{parse_bpmn_notation, serialize_bpmn_notation, SerializeError};
pub use ltl::parse_ltl_output;
pub use report::{ParseReport, ParseWarning, RejectReason, RejectedLine};
pub use rpa::parse_rpa_output;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum NotationError {
    #[error("input contains no recognizable line")]
    EmptyInput,
    #[error("line {line}: lane line without a bracketed task list: `{text}`")]
    MalformedLane { line: usize, text: String },
}
