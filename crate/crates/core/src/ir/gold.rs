use super::{canonicalize_label, IrError};
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntityKind {
    Task,
    Actor,
    Gateway,
    Event,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationType {
    Flow,
    ActorPerformer,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldEntity {
    pub id: String,
    pub kind: EntityKind,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldRelation {
    #[serde(rename = "type")]
    pub relation_type: RelationType,
    pub source: String,
    pub target: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub condition: Option<String>,
}

/// Reference annotation of one process description, restricted to flow and
/// actor-performer relations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldAnnotation {
    pub text_id: String,
    pub entities: Vec<GoldEntity>,
    pub relations: Vec<GoldRelation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GoldIssue {
    /// JSON-pointer-like location, e.g. `relations[3].target`.
    pub field: String,
    pub message: String,
}

impl fmt::Display for GoldIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

impl GoldAnnotation {
    pub fn entity(&self, id: &str) -> Option<&GoldEntity> {
        self.entities.iter().find(|e| e.id == id)
    }

    /// Check that relation endpoints exist and actor-performer relations run
    /// from an actor to a task.
    pub fn validate(&self) -> Vec<GoldIssue> {
        let mut issues = Vec::new();
        let mut ids = HashMap::new();
        for (i, e) in self.entities.iter().enumerate() {
            if ids.insert(e.id.as_str(), e.kind).is_some() {
                issues.push(GoldIssue {
                    field: format!("entities[{i}].id"),
                    message: format!("duplicate entity id `{}`", e.id),
                });
            }
        }
        for (i, r) in self.relations.iter().enumerate() {
            let src = ids.get(r.source.as_str()).copied();
            let tgt = ids.get(r.target.as_str()).copied();
            if src.is_none() {
                issues.push(GoldIssue {
                    field: format!("relations[{i}].source"),
                    message: format!("unknown entity `{}`", r.source),
                });
            }
            if tgt.is_none() {
                issues.push(GoldIssue {
                    field: format!("relations[{i}].target"),
                    message: format!("unknown entity `{}`", r.target),
                });
            }
            if r.relation_type == RelationType::ActorPerformer {
                if matches!(src, Some(k) if k != EntityKind::Actor) {
                    issues.push(GoldIssue {
                        field: format!("relations[{i}].source"),
                        message: "actor_performer source must be an actor".into(),
                    });
                }
                if matches!(tgt, Some(k) if k != EntityKind::Task) {
                    issues.push(GoldIssue {
                        field: format!("relations[{i}].target"),
                        message: "actor_performer target must be a task".into(),
                    });
                }
            }
        }
        issues
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AliasEntry {
    pub predicted: String,
    pub gold: Vec<String>,
}

/// Frozen human judgement of which predicted labels mean which gold
/// entities. One predicted label may cover several gold entities when the
/// model merged tasks.
///
/// For the BPMN task, `gold` lists entity ids. For the LTL and RPA tasks,
/// which have no entity ids, `gold` lists gold label texts and the map acts
/// as a label rewrite (the first entry wins).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AliasMap {
    entries: Vec<AliasEntry>,
}

impl AliasMap {
    pub fn new(entries: Vec<AliasEntry>) -> Self {
        AliasMap { entries }
    }

    pub fn entries(&self) -> &[AliasEntry] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Gold targets for a predicted label, matched after canonicalisation.
    pub fn lookup<'a>(&'a self, predicted: &str) -> impl Iterator<Item = &'a str> + 'a {
        let key = canonicalize_label(predicted);
        self.entries
            .iter()
            .filter(move |e| canonicalize_label(&e.predicted) == key)
            .flat_map(|e| e.gold.iter().map(String::as_str))
    }

    /// Rewrite a predicted label to its gold label, or return it unchanged.
    pub fn rewrite(&self, predicted: &str) -> String {
        match self.lookup(predicted).next() {
            Some(gold) => canonicalize_label(gold),
            None => canonicalize_label(predicted),
        }
    }

    /// Every referenced gold id must exist in `gold`.
    pub fn check_against(&self, gold: &GoldAnnotation) -> Result<(), IrError> {
        let ids: HashSet<&str> = gold.entities.iter().map(|e| e.id.as_str()).collect();
        for e in &self.entries {
            for id in &e.gold {
                if !ids.contains(id.as_str()) {
                    return Err(IrError::InconsistentAlias {
                        predicted: e.predicted.clone(),
                        id: id.clone(),
                    });
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gold() -> GoldAnnotation {
        serde_json::from_str(
            r#"{
            "text_id": "t1",
            "entities": [
                {"id": "a1", "kind": "actor", "label": "clerk"},
                {"id": "t1", "kind": "task", "label": "write report"},
                {"id": "t2", "kind": "task", "label": "send report"}
            ],
            "relations": [
                {"type": "flow", "source": "t1", "target": "t2"},
                {"type": "actor_performer", "source": "a1", "target": "t1"}
            ]
        }"#,
        )
        .unwrap()
    }

    #[test]
    fn valid_gold_has_no_issues() {
        assert!(gold().validate().is_empty());
    }

    #[test]
    fn bad_endpoints_are_reported_with_field_paths() {
        let mut g = gold();
        g.relations.push(GoldRelation {
            relation_type: RelationType::ActorPerformer,
            source: "t1".into(),
            target: "zz".into(),
            condition: None,
        });
        let issues = g.validate();
        let fields: Vec<&str> = issues.iter().map(|i| i.field.as_str()).collect();
        assert_eq!(fields, ["relations[2].target", "relations[2].source"]);
    }

    #[test]
    fn alias_lookup_and_consistency() {
        let aliases: AliasMap =
            serde_json::from_str(r#"[{"predicted": "Write and Send Report", "gold": ["t1", "t2"]}]"#).unwrap();
        let hits: Vec<&str> = aliases.lookup("write and send report.").collect();
        assert_eq!(hits, ["t1", "t2"]);
        assert!(aliases.check_against(&gold()).is_ok());

        let broken = AliasMap::new(vec![AliasEntry {
            predicted: "x".into(),
            gold: vec!["t9".into()],
        }]);
        assert_eq!(
            broken.check_against(&gold()),
            Err(IrError::InconsistentAlias {
                predicted: "x".into(),
                id: "t9".into()
            })
        );
    }

    #[test]
    fn rewrite_falls_back_to_canonical_input() {
        let aliases = AliasMap::new(vec![AliasEntry {
            predicted: "bill customer".into(),
            gold: vec!["Bill".into()],
        }]);
        assert_eq!(aliases.rewrite("Bill Customer"), "bill");
        assert_eq!(aliases.rewrite("Ship  Goods"), "ship goods");
    }
}
