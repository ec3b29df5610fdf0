//! Intermediate representation shared by parsers, exporters and evaluators.
//!
//! Labels, not ids, carry meaning across system boundaries: the model only
//! ever emits labels, so ids are synthetic and assigned at parse time. Every
//! comparison between labels goes through [`canonicalize_label`].

mod classify;
mod declare;
mod gold;
mod graph;
mod label;

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

pub use classify::{TaskClass, TaskClassification};
pub use declare::{DeclareConstraint, DeclareModel, SentenceConstraint, Template};
pub use gold::{
    AliasEntry, AliasMap, EntityKind, GoldAnnotation, GoldEntity, GoldIssue, GoldRelation,
    RelationType,
};
pub use graph::{
    validate_graph, Edge, GraphBuilder, Node, NodeId, NodeKind, ProcessGraph, Rule, Violation,
};
pub use label::canonicalize_label;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum IrError {
    #[error("activity label is empty after canonicalization")]
    EmptyActivity,
    #[error("{template} takes {expected} activity argument(s)")]
    Arity {
        template: Template,
        expected: usize,
    },
    #[error("task label is empty after canonicalization")]
    EmptyTask,
    #[error("unknown task class `{0}`")]
    UnknownClass(String),
    #[error("alias references unknown gold entity `{id}` (predicted `{predicted}`)")]
    InconsistentAlias { predicted: String, id: String },
}

/// The three text-to-artifact tasks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BpmTask {
    Bpmn,
    Ltl,
    Rpa,
}

impl BpmTask {
    pub const ALL: [BpmTask; 3] = [BpmTask::Bpmn, BpmTask::Ltl, BpmTask::Rpa];

    pub fn as_str(self) -> &'static str {
        match self {
            BpmTask::Bpmn => "bpmn",
            BpmTask::Ltl => "ltl",
            BpmTask::Rpa => "rpa",
        }
    }
}

impl fmt::Display for BpmTask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BpmTask {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bpmn" => Ok(BpmTask::Bpmn),
            "ltl" | "declare" => Ok(BpmTask::Ltl),
            "rpa" => Ok(BpmTask::Rpa),
            other => Err(format!("unknown task `{other}` (expected bpmn, ltl or rpa)")),
        }
    }
}
