use serde::{Serialize, Serializer};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RejectReason {
    NoGrammarMatched,
    MissingEndpoint,
    EmptyLabel,
    NoTemplateMatched,
    InconsistentSuccession,
    EmptyActivity,
    UnknownLabel(String),
    NoLabel,
    TableSeparator,
    EmptyTask,
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RejectReason::NoGrammarMatched => f.write_str("no-grammar-matched"),
            RejectReason::MissingEndpoint => f.write_str("missing-endpoint"),
            RejectReason::EmptyLabel => f.write_str("empty-label"),
            RejectReason::NoTemplateMatched => f.write_str("no-template-matched"),
            RejectReason::InconsistentSuccession => f.write_str("inconsistent-succession"),
            RejectReason::EmptyActivity => f.write_str("empty-activity"),
            RejectReason::UnknownLabel(l) => write!(f, "unknown-label: {l}"),
            RejectReason::NoLabel => f.write_str("no-label"),
            RejectReason::TableSeparator => f.write_str("table-separator"),
            RejectReason::EmptyTask => f.write_str("empty-task"),
        }
    }
}

impl Serialize for RejectReason {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RejectedLine {
    pub line: usize,
    pub reason: RejectReason,
    pub text: String,
}

/// A recovered irregularity. `line` is `None` for whole-input findings such
/// as graph rule violations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParseWarning {
    pub line: Option<usize>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParseReport<T> {
    pub value: T,
    pub parsed_lines: Vec<usize>,
    pub warnings: Vec<ParseWarning>,
    pub rejected_lines: Vec<RejectedLine>,
}

impl<T> ParseReport<T> {
    pub fn warned_lines(&self) -> BTreeSet<usize> {
        self.warnings.iter().filter_map(|w| w.line).collect()
    }

    /// Number of input lines the report accounts for.
    pub fn accounted_lines(&self) -> usize {
        self.parsed_lines.len() + self.warned_lines().len() + self.rejected_lines.len()
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> ParseReport<U> {
        ParseReport {
            value: f(self.value),
            parsed_lines: self.parsed_lines,
            warnings: self.warnings,
            rejected_lines: self.rejected_lines,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Parsed,
    Warned,
    Rejected,
}

/// Tracks per-line outcomes so that each line lands in exactly one bucket.
#[derive(Debug, Default)]
pub(crate) struct LineLog {
    status: BTreeMap<usize, Status>,
    warnings: Vec<ParseWarning>,
    rejected: Vec<RejectedLine>,
}

impl LineLog {
    pub fn parsed(&mut self, line: usize) {
        self.status.entry(line).or_insert(Status::Parsed);
    }

    pub fn warn(&mut self, line: usize, message: impl Into<String>) {
        self.status.insert(line, Status::Warned);
        self.warnings.push(ParseWarning {
            line: Some(line),
            message: message.into(),
        });
    }

    pub fn global_warning(&mut self, message: impl Into<String>) {
        self.warnings.push(ParseWarning {
            line: None,
            message: message.into(),
        });
    }

    /// Rejection overrides earlier warnings recorded for the same line.
    pub fn reject(&mut self, line: usize, reason: RejectReason, text: &str) {
        self.status.insert(line, Status::Rejected);
        self.warnings.retain(|w| w.line != Some(line));
        self.rejected.push(RejectedLine {
            line,
            reason,
            text: text.to_string(),
        });
    }

    /// Lines that produced something (parsed or warned).
    pub fn productive(&self) -> usize {
        self.status.values().filter(|s| **s != Status::Rejected).count()
    }

    pub fn finish<T>(self, value: T) -> ParseReport<T> {
        let parsed_lines = self
            .status
            .iter()
            .filter(|(_, s)| **s == Status::Parsed)
            .map(|(l, _)| *l)
            .collect();
        ParseReport {
            value,
            parsed_lines,
            warnings: self.warnings,
            rejected_lines: self.rejected,
        }
    }
}
