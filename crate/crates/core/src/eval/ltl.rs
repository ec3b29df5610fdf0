use super::metrics::{Averaging, ConfusionMatrix, MetricsReport};
use super::EvalError;
use crate::ir::{AliasMap, DeclareConstraint, DeclareModel, Template};
use crate::{BpmTask, Execution};
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet};

/// One entry of an LTL gold file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LtlGoldSentence {
    pub sentence_id: String,
    #[serde(default)]
    pub sentence: String,
    #[serde(default)]
    pub constraints: Vec<DeclareConstraint>,
}

pub fn ltl_gold_model(sentences: &[LtlGoldSentence]) -> DeclareModel {
    let mut m = DeclareModel::new();
    for s in sentences {
        m.declare_sentence(&s.sentence_id);
        for c in &s.constraints {
            m.push(&s.sentence_id, c.clone());
        }
    }
    m
}

#[derive(Debug, Clone, Default)]
pub struct LtlEvalOptions {
    /// Optional label rewrite applied to predicted activities.
    pub alias: Option<AliasMap>,
    pub execution: Execution,
}

fn rewrite(c: &DeclareConstraint, alias: &AliasMap) -> DeclareConstraint {
    let a = alias.rewrite(c.activity_a());
    let b = c.activity_b().map(|b| alias.rewrite(b));
    c.with_activities(&a, b.as_deref()).unwrap_or_else(|_| c.clone())
}

/// Score one sentence: exact matches are true positives; left-over
/// predictions and gold constraints with identical activities are paired
/// in template order and recorded as confusion cells.
fn score_sentence(pred: &[DeclareConstraint], gold: &[DeclareConstraint]) -> ConfusionMatrix {
    let mut m = ConfusionMatrix::with_classes(Template::ALL.map(|t| t.name()));
    let pred_set: HashSet<&DeclareConstraint> = pred.iter().collect();
    let gold_set: HashSet<&DeclareConstraint> = gold.iter().collect();

    let mut pred_left: Vec<&DeclareConstraint> = Vec::new();
    for p in pred_set.iter().copied() {
        if gold_set.contains(p) {
            m.class_mut(p.template().name()).tp += 1;
            m.add_cell(p.template().name(), p.template().name(), 1);
        } else {
            m.class_mut(p.template().name()).fp += 1;
            pred_left.push(p);
        }
    }
    let mut gold_left: Vec<&DeclareConstraint> = Vec::new();
    for g in gold_set.iter().copied() {
        if !pred_set.contains(g) {
            m.class_mut(g.template().name()).fn_ += 1;
            gold_left.push(g);
        }
    }

    pred_left.sort();
    gold_left.sort();
    let mut used = vec![false; pred_left.len()];
    for g in &gold_left {
        if let Some(i) = (0..pred_left.len()).find(|&i| !used[i] && pred_left[i].same_activities(g)) {
            used[i] = true;
            m.add_cell(g.template().name(), pred_left[i].template().name(), 1);
        }
    }
    m
}

/// Per-template precision/recall/F1 with pooled overall values.
///
/// Every predicted sentence id must occur in `gold`. Gold sentences without
/// predictions contribute false negatives only.
fn by_sentence(m: &DeclareModel) -> HashMap<&str, Vec<&DeclareConstraint>> {
    let mut out: HashMap<&str, Vec<&DeclareConstraint>> = HashMap::new();
    for e in m.entries() {
        out.entry(e.sentence_id.as_str()).or_default().push(&e.constraint);
    }
    out
}

pub fn eval_ltl(pred: &DeclareModel, gold: &DeclareModel, opts: &LtlEvalOptions) -> Result<MetricsReport, EvalError> {
    let known: HashSet<&str> = gold.sentences().iter().map(String::as_str).collect();
    let unknown: Vec<String> = pred
        .sentences()
        .iter()
        .filter(|s| !known.contains(s.as_str()))
        .cloned()
        .collect();
    if !unknown.is_empty() {
        return Err(EvalError::SentenceIdMismatch { unknown });
    }

    let (pred_by, gold_by) = (by_sentence(pred), by_sentence(gold));
    let per_sentence = opts.execution.map(gold.sentences(), |sid| {
        let p: Vec<DeclareConstraint> = pred_by
            .get(sid.as_str())
            .into_iter()
            .flatten()
            .map(|c| match &opts.alias {
                Some(a) => rewrite(c, a),
                None => (*c).clone(),
            })
            .collect();
        let g: Vec<DeclareConstraint> = gold_by.get(sid.as_str()).into_iter().flatten().map(|c| (*c).clone()).collect();
        score_sentence(&p, &g)
    });

    let mut total = ConfusionMatrix::with_classes(Template::ALL.map(|t| t.name()));
    for m in &per_sentence {
        total.merge(m);
    }
    total.sort_cells();
    Ok(MetricsReport::from_matrix(BpmTask::Ltl, total, Averaging::Pooled))
}
