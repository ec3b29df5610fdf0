use super::{canonicalize_label, IrError};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::str::FromStr;

/// RPA suitability class of a process task.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TaskClass {
    /// Performed by a human without an information system.
    Manual,
    /// A human interacting with an information system; the RPA candidates.
    User,
    /// Performed by a system without human involvement.
    Automated,
}

impl TaskClass {
    pub const ALL: [TaskClass; 3] = [TaskClass::Manual, TaskClass::User, TaskClass::Automated];

    pub fn as_str(self) -> &'static str {
        match self {
            TaskClass::Manual => "manual",
            TaskClass::User => "user",
            TaskClass::Automated => "automated",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            TaskClass::Manual => "Manual",
            TaskClass::User => "User",
            TaskClass::Automated => "Automated",
        }
    }
}

impl fmt::Display for TaskClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.display_name())
    }
}

/// Case-insensitive; the trailing word "task" is optional
/// (`"User task"`, `"user"`, `"AUTOMATED TASK."`).
impl FromStr for TaskClass {
    type Err = IrError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let canon = canonicalize_label(s);
        let head = canon.strip_suffix(" task").unwrap_or(&canon);
        match head {
            "manual" => Ok(TaskClass::Manual),
            "user" => Ok(TaskClass::User),
            "automated" => Ok(TaskClass::Automated),
            _ => Err(IrError::UnknownClass(canon)),
        }
    }
}

impl Serialize for TaskClass {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for TaskClass {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(d)?;
        raw.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TaskClassification {
    pub task: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub actor: Option<String>,
    pub label: TaskClass,
}

impl TaskClassification {
    /// Canonicalises task and actor; an empty task is rejected and an empty
    /// actor becomes `None`.
    pub fn new(task: &str, actor: Option<&str>, label: TaskClass) -> Result<Self, IrError> {
        let task = canonicalize_label(task);
        if task.is_empty() {
            return Err(IrError::EmptyTask);
        }
        let actor = actor.map(canonicalize_label).filter(|a| !a.is_empty());
        Ok(TaskClassification { task, actor, label })
    }
}
