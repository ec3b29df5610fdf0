//! Four-part prompts and robustness run plans.
//!
//! A prompt is a task description, an output format, optional worked
//! examples and the input text, filled into a template with the placeholders
//! `{TASK}`, `{FORMAT}`, `{EXAMPLES}` and `{INPUT}`.

use crate::ir::BpmTask;
use serde::{Deserialize, Serialize};

pub const DEFAULT_TEMPLATE: &str = "{TASK}\n\n{FORMAT}\n\n{EXAMPLES}\n\nInput:\n{INPUT}";

pub const PLACEHOLDERS: [&str; 4] = ["{TASK}", "{FORMAT}", "{EXAMPLES}", "{INPUT}"];

pub const NO_EXAMPLES: &str = "no-examples";

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum PromptError {
    #[error("template lacks placeholder {0} but the part is non-empty")]
    MissingPlaceholder(String),
    #[error("template contains placeholder {0} more than once")]
    DuplicatePlaceholder(String),
    #[error("prompt part `{0}` is empty")]
    EmptyPart(&'static str),
    #[error("a run plan needs at least one try")]
    ZeroTries,
    #[error("variant id `{0}` appears more than once in the run plan")]
    DuplicateVariant(String),
    #[error("no built-in prompt variant `{variant}` for task {task}")]
    UnknownVariant { task: BpmTask, variant: String },
    #[error("invalid prompt variant file: {0}")]
    VariantFile(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExamplePair {
    pub input: String,
    pub output: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptSpec {
    pub task_description: String,
    pub output_format: String,
    #[serde(default)]
    pub examples: Vec<ExamplePair>,
    pub input_text: String,
    pub variant_id: String,
    /// `None` selects [`DEFAULT_TEMPLATE`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub template: Option<String>,
}

/// A prompt variant without its input: what a variant file holds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptVariant {
    #[serde(default)]
    pub variant_id: String,
    pub task_description: String,
    pub output_format: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub template: Option<String>,
    #[serde(default)]
    pub examples: Vec<ExamplePair>,
}

impl PromptVariant {
    pub fn from_toml(variant_id: &str, text: &str) -> Result<Self, PromptError> {
        let mut v: PromptVariant = toml::from_str(text).map_err(|e| PromptError::VariantFile(e.to_string()))?;
        if v.variant_id.is_empty() {
            v.variant_id = variant_id.to_string();
        }
        Ok(v)
    }

    pub fn without_examples(&self) -> Self {
        PromptVariant {
            variant_id: NO_EXAMPLES.to_string(),
            examples: Vec::new(),
            ..self.clone()
        }
    }

    pub fn spec(&self, input_text: &str) -> PromptSpec {
        PromptSpec {
            task_description: self.task_description.clone(),
            output_format: self.output_format.clone(),
            examples: self.examples.clone(),
            input_text: input_text.to_string(),
            variant_id: self.variant_id.clone(),
            template: self.template.clone(),
        }
    }
}

macro_rules! variant_file {
    ($task:literal, $name:literal) => {
        ($name, include_str!(concat!("../prompts/", $task, "/", $name, ".toml")))
    };
}

fn builtin_files(task: BpmTask) -> [(&'static str, &'static str); 3] {
    match task {
        BpmTask::Bpmn => [
            variant_file!("bpmn", "original"),
            variant_file!("bpmn", "other-author-1"),
            variant_file!("bpmn", "other-author-2"),
        ],
        BpmTask::Ltl => [
            variant_file!("ltl", "original"),
            variant_file!("ltl", "other-author-1"),
            variant_file!("ltl", "other-author-2"),
        ],
        BpmTask::Rpa => [
            variant_file!("rpa", "original"),
            variant_file!("rpa", "other-author-1"),
            variant_file!("rpa", "other-author-2"),
        ],
    }
}

/// Built-in variants for a task. The first entry is the base prompt. A
/// `no-examples` variant follows the author variants when the base prompt
/// has examples.
pub fn builtin_variants(task: BpmTask) -> Vec<PromptVariant> {
    let mut out: Vec<PromptVariant> = builtin_files(task)
        .iter()
        .map(|(id, text)| PromptVariant::from_toml(id, text).expect("built-in prompt files are valid"))
        .collect();
    if !out[0].examples.is_empty() {
        let stripped = out[0].without_examples();
        out.push(stripped);
    }
    out
}

pub fn builtin_variant(task: BpmTask, variant_id: &str) -> Result<PromptVariant, PromptError> {
    builtin_variants(task)
        .into_iter()
        .find(|v| v.variant_id == variant_id)
        .ok_or_else(|| PromptError::UnknownVariant {
            task,
            variant: variant_id.to_string(),
        })
}

fn render_examples(examples: &[ExamplePair]) -> String {
    let body: Vec<String> = examples
        .iter()
        .map(|e| format!("Example input:\n{}\nExample output:\n{}", e.input.trim_end(), e.output.trim_end()))
        .collect();
    format!("Examples:\n{}", body.join("\n---\n"))
}

/// Fill the template. Each placeholder is substituted in a single left to
/// right pass, so placeholder-like text inside a part is left alone.
pub fn build_prompt(spec: &PromptSpec) -> Result<String, PromptError> {
    for (name, part) in [
        ("task_description", &spec.task_description),
        ("output_format", &spec.output_format),
        ("input_text", &spec.input_text),
    ] {
        if part.trim().is_empty() {
            return Err(PromptError::EmptyPart(name));
        }
    }

    let mut template = spec.template.as_deref().unwrap_or(DEFAULT_TEMPLATE).to_string();
    for p in PLACEHOLDERS {
        if template.matches(p).count() > 1 {
            return Err(PromptError::DuplicatePlaceholder(p.to_string()));
        }
    }
    let examples = if spec.examples.is_empty() {
        template = template.replacen("\n\n{EXAMPLES}\n\n", "\n\n", 1);
        String::new()
    } else {
        render_examples(&spec.examples)
    };
    let parts = [
        spec.task_description.trim(),
        spec.output_format.trim(),
        examples.as_str(),
        spec.input_text.as_str(),
    ];
    for (p, part) in PLACEHOLDERS.iter().zip(parts) {
        if !part.is_empty() && !template.contains(p) {
            return Err(PromptError::MissingPlaceholder(p.to_string()));
        }
    }

    let mut out = String::with_capacity(template.len() + parts.iter().map(|p| p.len()).sum::<usize>());
    let mut rest = template.as_str();
    while let Some((at, idx)) = PLACEHOLDERS
        .iter()
        .enumerate()
        .filter_map(|(i, p)| rest.find(p).map(|at| (at, i)))
        .min()
    {
        out.push_str(&rest[..at]);
        out.push_str(parts[idx]);
        rest = &rest[at + PLACEHOLDERS[idx].len()..];
    }
    out.push_str(rest);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    OutputRobustness,
    InputRobustness,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::OutputRobustness => "output robustness",
            Axis::InputRobustness => "input robustness",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlannedRun {
    pub variant_id: String,
    /// 1-based.
    pub try_index: u32,
    pub axis: Axis,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunPlan {
    pub runs: Vec<PlannedRun>,
}

impl RunPlan {
    pub fn runs_on(&self, axis: Axis) -> impl Iterator<Item = &PlannedRun> {
        self.runs.iter().filter(move |r| r.axis == axis)
    }
}

/// `tries` runs of the base prompt followed by one run per variant.
pub fn enumerate_run_plan(base: &PromptSpec, variants: &[PromptSpec], tries: u32) -> Result<RunPlan, PromptError> {
    if tries == 0 {
        return Err(PromptError::ZeroTries);
    }
    let mut seen = std::collections::HashSet::new();
    for id in std::iter::once(&base.variant_id).chain(variants.iter().map(|v| &v.variant_id)) {
        if !seen.insert(id) {
            return Err(PromptError::DuplicateVariant(id.clone()));
        }
    }
    let output = (1..=tries).map(|t| PlannedRun {
        variant_id: base.variant_id.clone(),
        try_index: t,
        axis: Axis::OutputRobustness,
    });
    let input = variants.iter().map(|v| PlannedRun {
        variant_id: v.variant_id.clone(),
        try_index: 1,
        axis: Axis::InputRobustness,
    });
    Ok(RunPlan {
        runs: output.chain(input).collect(),
    })
}

/// Split a long description into chunks of at most `max_chars` characters,
/// breaking at paragraph and then sentence boundaries. A single sentence
/// longer than the limit becomes its own chunk.
pub fn chunk_input(text: &str, max_chars: usize) -> Vec<String> {
    let mut units = Vec::new();
    for para in text.split("\n\n").map(str::trim).filter(|p| !p.is_empty()) {
        if para.chars().count() <= max_chars {
            units.push(para.to_string());
            continue;
        }
        let mut start = 0;
        for (i, _) in para.match_indices(". ") {
            units.push(para[start..=i].trim().to_string());
            start = i + 2;
        }
        if start < para.len() {
            units.push(para[start..].trim().to_string());
        }
    }

    let mut chunks: Vec<String> = Vec::new();
    let mut current = String::new();
    for unit in units {
        let joined = current.chars().count() + 1 + unit.chars().count();
        if !current.is_empty() && joined > max_chars {
            chunks.push(std::mem::take(&mut current));
        }
        if !current.is_empty() {
            current.push(' ');
        }
        current.push_str(&unit);
    }
    if !current.is_empty() {
        chunks.push(current);
    }
    chunks
}
