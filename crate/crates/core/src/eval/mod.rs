//! Scoring predictions against gold annotations.
//!
//! Three protocols: per-template P/R/F1 with pooled overall values for LTL,
//! per-class P/R/F1 with support-weighted overall values for RPA, and
//! relation recall for BPMN. Undefined ratios are `None` (JSON `null`),
//! never 0 or 1.

mod bpmn;
mod ltl;
mod metrics;
mod robustness;
mod rpa;
mod table;

pub use bpmn::{eval_bpmn_corpus, eval_bpmn_recall, BpmnEvalOptions, BpmnItem, ConditionMatching, RELATION_CLASSES};
pub use ltl::{eval_ltl, ltl_gold_model, LtlEvalOptions, LtlGoldSentence};
pub use metrics::{
    f1, ratio, Averaging, ClassCounts, ClassMetrics, ConfusionMatrix, MatrixCell, MetricsReport, OverallMetrics,
};
pub use robustness::{robustness_report, AxisSummary, Metric, MetricSpread, RobustnessSummary, Spread};
pub use rpa::{eval_rpa, RpaEvalOptions};
pub use table::{render_robustness, render_table};

use crate::ir::{GoldIssue, IrError};
use crate::prompt::Axis;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("predicted sentence id(s) not in gold: {}", .unknown.join(", "))]
    SentenceIdMismatch { unknown: Vec<String> },
    #[error(transparent)]
    InconsistentAlias(#[from] IrError),
    #[error("gold annotation is invalid: {}", .0.iter().map(|i| i.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidGold(Vec<GoldIssue>),
    #[error("{} needs at least 2 runs, got {runs}", .axis.map_or("a robustness axis", |a| a.name()))]
    InsufficientRuns { axis: Option<Axis>, runs: usize },
    #[error("reports belong to different tasks")]
    MixedTasks,
}
