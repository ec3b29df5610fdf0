use super::metrics::{Averaging, ConfusionMatrix, MetricsReport};
use super::EvalError;
use crate::ir::{canonicalize_label, AliasMap, EntityKind, GoldAnnotation, NodeId, NodeKind, ProcessGraph, RelationType};
use crate::{BpmTask, Execution};
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet};

/// Whether a gold flow with a condition needs the same condition on the
/// predicted edge.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionMatching {
    #[default]
    Strict,
    Ignored,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct BpmnEvalOptions {
    pub conditions: ConditionMatching,
}

pub const RELATION_CLASSES: [&str; 2] = ["flow", "actor_performer"];

fn relation_class(t: RelationType) -> &'static str {
    match t {
        RelationType::Flow => RELATION_CLASSES[0],
        RelationType::ActorPerformer => RELATION_CLASSES[1],
    }
}

fn compatible(node: NodeKind, entity: EntityKind) -> bool {
    match node {
        NodeKind::Task => entity == EntityKind::Task,
        NodeKind::XorGateway | NodeKind::AndGateway => entity == EntityKind::Gateway,
        NodeKind::StartEvent | NodeKind::EndEvent => entity == EntityKind::Event,
    }
}

/// Gold entity ids each predicted label stands for: same kind and equal
/// canonical label, plus whatever the alias map lists for the label.
fn entity_map<'g>(
    gold: &'g GoldAnnotation,
    aliases: &'g AliasMap,
    label: &str,
    accept: impl Fn(EntityKind) -> bool,
) -> HashSet<&'g str> {
    let canon = canonicalize_label(label);
    let mut out: HashSet<&str> = gold
        .entities
        .iter()
        .filter(|e| accept(e.kind) && canonicalize_label(&e.label) == canon)
        .map(|e| e.id.as_str())
        .collect();
    out.extend(aliases.lookup(label).filter(|id| gold.entity(id).is_some_and(|e| accept(e.kind))));
    out
}

/// Recall of gold flow and actor-performer relations for one text.
///
/// A flow is recalled when a predicted edge connects nodes standing for its
/// endpoints, or when a single predicted node stands for both (the model
/// merged two steps). An actor-performer relation is recalled when a lane
/// standing for the actor holds a task standing for the target. Precision
/// is not computed.
pub fn eval_bpmn_recall(
    pred: &ProcessGraph,
    gold: &GoldAnnotation,
    aliases: &AliasMap,
    opts: &BpmnEvalOptions,
) -> Result<MetricsReport, EvalError> {
    let issues = gold.validate();
    if !issues.is_empty() {
        return Err(EvalError::InvalidGold(issues));
    }
    aliases.check_against(gold)?;

    let node_map: HashMap<&NodeId, HashSet<&str>> = pred
        .nodes()
        .iter()
        .map(|n| {
            let ids = match &n.label {
                Some(l) => entity_map(gold, aliases, l, |k| compatible(n.kind, k)),
                None => HashSet::new(),
            };
            (&n.id, ids)
        })
        .collect();
    let lane_map: Vec<(HashSet<&str>, &Vec<NodeId>)> = pred
        .lanes()
        .iter()
        .map(|(actor, members)| (entity_map(gold, aliases, actor, |k| k == EntityKind::Actor), members))
        .collect();
    let covers = |id: &NodeId, entity: &str| node_map.get(id).is_some_and(|s| s.contains(entity));

    let mut m = ConfusionMatrix::with_classes(RELATION_CLASSES);
    for r in &gold.relations {
        let hit = match r.relation_type {
            RelationType::Flow => {
                let wanted = match (opts.conditions, &r.condition) {
                    (ConditionMatching::Strict, Some(c)) => Some(canonicalize_label(c)),
                    _ => None,
                };
                let edge_hit = pred.edges().iter().any(|e| {
                    covers(&e.source, &r.source)
                        && covers(&e.target, &r.target)
                        && wanted
                            .as_ref()
                            .is_none_or(|w| e.condition.as_deref().map(canonicalize_label).as_ref() == Some(w))
                });
                let merged = wanted.is_none()
                    && pred
                        .nodes()
                        .iter()
                        .any(|n| covers(&n.id, &r.source) && covers(&n.id, &r.target));
                edge_hit || merged
            }
            RelationType::ActorPerformer => lane_map
                .iter()
                .any(|(actors, members)| actors.contains(r.source.as_str()) && members.iter().any(|t| covers(t, &r.target))),
        };
        let counts = m.class_mut(relation_class(r.relation_type));
        if hit {
            counts.tp += 1;
        } else {
            counts.fn_ += 1;
        }
    }
    Ok(MetricsReport::from_matrix(BpmTask::Bpmn, m, Averaging::Pooled))
}

/// One text of a BPMN evaluation corpus.
#[derive(Debug, Clone)]
pub struct BpmnItem {
    pub prediction: ProcessGraph,
    pub gold: GoldAnnotation,
    pub aliases: AliasMap,
}

/// Per-text recall as classes, overall recall as the mean over texts.
pub fn eval_bpmn_corpus(
    items: &[BpmnItem],
    opts: &BpmnEvalOptions,
    execution: Execution,
) -> Result<MetricsReport, EvalError> {
    let per_text = execution.try_map(items, |it| eval_bpmn_recall(&it.prediction, &it.gold, &it.aliases, opts))?;
    let mut m = ConfusionMatrix::default();
    for (it, r) in items.iter().zip(&per_text) {
        let c = m.class_mut(&it.gold.text_id);
        for k in &r.matrix.counts {
            c.tp += k.tp;
            c.fn_ += k.fn_;
        }
    }
    Ok(MetricsReport::from_matrix(BpmTask::Bpmn, m, Averaging::MacroTexts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::notation::parse_bpmn_notation;

    fn gold() -> GoldAnnotation {
        serde_json::from_str(
            r#"{"text_id": "toy", "entities": [
                {"id": "clerk", "kind": "actor", "label": "clerk"},
                {"id": "t1", "kind": "task", "label": "write report"},
                {"id": "t2", "kind": "task", "label": "send report"},
                {"id": "g1", "kind": "gateway", "label": "XOR1"},
                {"id": "t3", "kind": "task", "label": "archive"}
            ], "relations": [
                {"type": "flow", "source": "t1", "target": "t2"},
                {"type": "flow", "source": "t2", "target": "g1"},
                {"type": "flow", "source": "g1", "target": "t3", "condition": "approved"},
                {"type": "actor_performer", "source": "clerk", "target": "t1"}
            ]}"#,
        )
        .unwrap()
    }

    fn recall(text: &str, aliases: &str, conditions: ConditionMatching) -> Option<f64> {
        let g = parse_bpmn_notation(text).unwrap().value;
        let a: AliasMap = serde_json::from_str(aliases).unwrap();
        eval_bpmn_recall(&g, &gold(), &a, &BpmnEvalOptions { conditions })
            .unwrap()
            .overall
            .recall
    }

    #[test]
    fn half_recalled() {
        // flow t1->t2 and the lane relation; the gateway is missing.
        let r = recall("write report -> send report\nclerk: [write report]", "[]", ConditionMatching::Strict);
        assert_eq!(r, Some(0.5));
    }

    #[test]
    fn full_and_empty() {
        let text = "write report -> send report -> XOR\nXOR (approved) -> archive\nclerk: [write report]";
        assert_eq!(recall(text, "[]", ConditionMatching::Strict), Some(1.0));
        let g = ProcessGraph::default();
        let r = eval_bpmn_recall(&g, &gold(), &AliasMap::default(), &Default::default()).unwrap();
        assert_eq!(r.overall.recall, Some(0.0));
        assert_eq!(r.overall.precision, None);
    }

    #[test]
    fn condition_modes() {
        let text = "write report -> send report -> XOR\nXOR (ok) -> archive\nclerk: [write report]";
        assert_eq!(recall(text, "[]", ConditionMatching::Strict), Some(0.75));
        assert_eq!(recall(text, "[]", ConditionMatching::Ignored), Some(1.0));
    }

    #[test]
    fn merged_task_covers_both() {
        let aliases = r#"[{"predicted": "write and send report", "gold": ["t1", "t2"]}]"#;
        let text = "write and send report -> XOR\nXOR (approved) -> archive\nclerk: [write and send report]";
        assert_eq!(recall(text, aliases, ConditionMatching::Strict), Some(1.0));
        assert_eq!(recall(text, "[]", ConditionMatching::Strict), Some(0.25));
    }

    #[test]
    fn bad_alias_is_reported() {
        let g = parse_bpmn_notation("a -> b").unwrap().value;
        let a: AliasMap = serde_json::from_str(r#"[{"predicted": "a", "gold": ["nope"]}]"#).unwrap();
        assert!(matches!(
            eval_bpmn_recall(&g, &gold(), &a, &Default::default()),
            Err(EvalError::InconsistentAlias(_))
        ));
    }

    #[test]
    fn corpus_overall_is_mean_of_texts() {
        let mk = |text: &str| BpmnItem {
            prediction: parse_bpmn_notation(text).unwrap().value,
            gold: gold(),
            aliases: AliasMap::default(),
        };
        let mut b = mk("write report -> send report\nclerk: [write report]");
        b.gold.text_id = "other".into();
        let items = [mk("write report -> send report -> XOR\nXOR (approved) -> archive\nclerk: [write report]"), b];
        let r = eval_bpmn_corpus(&items, &Default::default(), Execution::Sequential).unwrap();
        assert_eq!(r.classes.len(), 2);
        assert_eq!(r.overall.recall, Some(0.75));
        assert_eq!(eval_bpmn_corpus(&items, &Default::default(), Execution::Parallel).unwrap(), r);
    }
}
