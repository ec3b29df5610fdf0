use super::{canonicalize_label, IrError};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

/// The five Declare templates supported by the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Template {
    #[serde(alias = "Precedence")]
    Precedence,
    #[serde(alias = "Response")]
    Response,
    #[serde(alias = "Succession")]
    Succession,
    #[serde(alias = "Init", alias = "initialization")]
    Init,
    #[serde(alias = "End")]
    End,
}

impl Template {
    pub const ALL: [Template; 5] = [
        Template::Precedence,
        Template::Response,
        Template::Succession,
        Template::Init,
        Template::End,
    ];

    pub fn is_binary(self) -> bool {
        matches!(self, Template::Precedence | Template::Response | Template::Succession)
    }

    pub fn arity(self) -> usize {
        if self.is_binary() {
            2
        } else {
            1
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Template::Precedence => "Precedence",
            Template::Response => "Response",
            Template::Succession => "Succession",
            Template::Init => "Init",
            Template::End => "End",
        }
    }
}

impl fmt::Display for Template {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Template {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match canonicalize_label(s).as_str() {
            "precedence" => Ok(Template::Precedence),
            "response" => Ok(Template::Response),
            "succession" => Ok(Template::Succession),
            "init" | "initialization" => Ok(Template::Init),
            "end" => Ok(Template::End),
            _ => Err(()),
        }
    }
}

/// A template instantiated with canonical activity labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawConstraint", into = "RawConstraint")]
pub struct DeclareConstraint {
    template: Template,
    activity_a: String,
    activity_b: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct RawConstraint {
    template: Template,
    a: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    b: Option<String>,
}

impl TryFrom<RawConstraint> for DeclareConstraint {
    type Error = IrError;

    fn try_from(raw: RawConstraint) -> Result<Self, Self::Error> {
        DeclareConstraint::new(raw.template, &raw.a, raw.b.as_deref())
    }
}

impl From<DeclareConstraint> for RawConstraint {
    fn from(c: DeclareConstraint) -> Self {
        RawConstraint {
            template: c.template,
            a: c.activity_a,
            b: c.activity_b,
        }
    }
}

impl DeclareConstraint {
    /// Canonicalises both activities and checks arity.
    pub fn new(template: Template, a: &str, b: Option<&str>) -> Result<Self, IrError> {
        let activity_a = canonicalize_label(a);
        if activity_a.is_empty() {
            return Err(IrError::EmptyActivity);
        }
        let activity_b = match (template.is_binary(), b) {
            (true, Some(b)) => {
                let b = canonicalize_label(b);
                if b.is_empty() {
                    return Err(IrError::EmptyActivity);
                }
                Some(b)
            }
            (false, None) => None,
            _ => {
                return Err(IrError::Arity {
                    template,
                    expected: template.arity(),
                })
            }
        };
        Ok(DeclareConstraint {
            template,
            activity_a,
            activity_b,
        })
    }

    pub fn binary(template: Template, a: &str, b: &str) -> Result<Self, IrError> {
        Self::new(template, a, Some(b))
    }

    pub fn unary(template: Template, a: &str) -> Result<Self, IrError> {
        Self::new(template, a, None)
    }

    pub fn template(&self) -> Template {
        self.template
    }

    pub fn activity_a(&self) -> &str {
        &self.activity_a
    }

    pub fn activity_b(&self) -> Option<&str> {
        self.activity_b.as_deref()
    }

    /// Same template, new activities. Used when rewriting through alias maps.
    pub fn with_activities(&self, a: &str, b: Option<&str>) -> Result<Self, IrError> {
        Self::new(self.template, a, b)
    }

    /// Whether `other` has the same activity arguments, ignoring template.
    pub fn same_activities(&self, other: &DeclareConstraint) -> bool {
        self.activity_a == other.activity_a && self.activity_b == other.activity_b
    }
}

impl fmt::Display for DeclareConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.activity_b {
            Some(b) => write!(f, "{}({}, {})", self.template, self.activity_a, b),
            None => write!(f, "{}({})", self.template, self.activity_a),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceConstraint {
    pub sentence_id: String,
    pub constraint: DeclareConstraint,
}

/// Constraints discovered per input sentence.
///
/// Sentences are tracked even when they carry no constraint, so that an
/// empty prediction for a known sentence stays distinguishable from an
/// unknown sentence id.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeclareModel {
    sentences: Vec<String>,
    constraints: Vec<SentenceConstraint>,
}

impl DeclareModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn declare_sentence(&mut self, sentence_id: &str) {
        if !self.sentences.iter().any(|s| s == sentence_id) {
            self.sentences.push(sentence_id.to_string());
        }
    }

    /// Appends unless the same constraint already exists for this sentence.
    pub fn push(&mut self, sentence_id: &str, constraint: DeclareConstraint) -> bool {
        self.declare_sentence(sentence_id);
        let dup = self
            .constraints
            .iter()
            .any(|sc| sc.sentence_id == sentence_id && sc.constraint == constraint);
        if dup {
            return false;
        }
        self.constraints.push(SentenceConstraint {
            sentence_id: sentence_id.to_string(),
            constraint,
        });
        true
    }

    pub fn extend(&mut self, other: DeclareModel) {
        for s in &other.sentences {
            self.declare_sentence(s);
        }
        for sc in other.constraints {
            self.push(&sc.sentence_id, sc.constraint);
        }
    }

    pub fn sentences(&self) -> &[String] {
        &self.sentences
    }

    pub fn entries(&self) -> &[SentenceConstraint] {
        &self.constraints
    }

    pub fn constraints(&self) -> impl Iterator<Item = &DeclareConstraint> {
        self.constraints.iter().map(|sc| &sc.constraint)
    }

    pub fn constraints_for<'a>(&'a self, sentence_id: &'a str) -> impl Iterator<Item = &'a DeclareConstraint> + 'a {
        self.constraints
            .iter()
            .filter(move |sc| sc.sentence_id == sentence_id)
            .map(|sc| &sc.constraint)
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    /// Distinct constraints across all sentences, first occurrence order.
    pub fn distinct_constraints(&self) -> Vec<&DeclareConstraint> {
        let mut seen = BTreeSet::new();
        self.constraints()
            .filter(|c| seen.insert(*c))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arity_is_enforced() {
        assert!(DeclareConstraint::unary(Template::Precedence, "a").is_err());
        assert!(DeclareConstraint::binary(Template::Init, "a", "b").is_err());
        assert!(DeclareConstraint::binary(Template::Response, "a", " ").is_err());
        assert_eq!(
            DeclareConstraint::unary(Template::End, "  "),
            Err(IrError::EmptyActivity)
        );
    }

    #[test]
    fn activities_are_canonical() {
        let c = DeclareConstraint::binary(Template::Precedence, "Create  Claim", "approve claim.").unwrap();
        assert_eq!(c.activity_a(), "create claim");
        assert_eq!(c.activity_b(), Some("approve claim"));
        assert_eq!(c.to_string(), "Precedence(create claim, approve claim)");
    }

    #[test]
    fn duplicates_within_a_sentence_are_dropped() {
        let c = DeclareConstraint::unary(Template::Init, "book ticket").unwrap();
        let mut m = DeclareModel::new();
        assert!(m.push("s1", c.clone()));
        assert!(!m.push("s1", c.clone()));
        assert!(m.push("s2", c.clone()));
        assert_eq!(m.len(), 2);
        assert_eq!(m.distinct_constraints().len(), 1);
    }

    #[test]
    fn json_shape() {
        let c: DeclareConstraint =
            serde_json::from_str(r#"{"template":"Precedence","a":"create claim","b":"approve claim"}"#).unwrap();
        assert_eq!(c.template(), Template::Precedence);
        assert_eq!(
            serde_json::to_string(&c).unwrap(),
            r#"{"template":"precedence","a":"create claim","b":"approve claim"}"#
        );
        let bad = serde_json::from_str::<DeclareConstraint>(r#"{"template":"init","a":"x","b":"y"}"#);
        assert!(bad.is_err());
    }

    #[test]
    fn template_from_str() {
        assert_eq!("Initialization".parse::<Template>(), Ok(Template::Init));
        assert!("existence".parse::<Template>().is_err());
    }
}
