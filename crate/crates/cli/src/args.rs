use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use text2proc::BpmTask;

#[derive(Debug, Parser)]
#[command(name = "text2proc", version, about = "Mine BPMN, Declare and RPA artifacts from process descriptions with an LLM, and score them")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Prompt for the line notation, write BPMN 2.0 XML.
    MineBpmn(MineArgs),
    /// Prompt per sentence for LTL formulas, write Declare and LTL files.
    MineDeclare(MineDeclareArgs),
    /// Prompt for task classifications, write them as JSON.
    ClassifyRpa(MineArgs),
    /// Score predictions against gold annotations.
    Evaluate(EvaluateArgs),
    /// Replay every run of a plan, score each and summarize the spread.
    Robustness(RobustnessArgs),
    /// Print the prompt that would be sent for an input.
    RenderPrompt(RenderPromptArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TaskArg {
    Bpmn,
    Ltl,
    Rpa,
}

impl From<TaskArg> for BpmTask {
    fn from(t: TaskArg) -> Self {
        match t {
            TaskArg::Bpmn => BpmTask::Bpmn,
            TaskArg::Ltl => BpmTask::Ltl,
            TaskArg::Rpa => BpmTask::Rpa,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct PromptArgs {
    /// Built-in variant id (original, other-author-1, other-author-2,
    /// no-examples) or a path to a variant TOML file.
    #[arg(long, default_value = "original")]
    pub prompt: String,
    /// TOML file whose `[[examples]]` replace the variant's examples.
    #[arg(long)]
    pub examples: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
#[command(group(ArgGroup::new("mode").required(true).args(["replay", "live"])))]
pub struct LlmArgs {
    /// Answer from a recorded transcript; no network access.
    #[arg(long, value_name = "TRANSCRIPTS")]
    pub replay: Option<PathBuf>,
    /// Call the configured endpoint.
    #[arg(long, requires = "record")]
    pub live: bool,
    /// Transcript file that live exchanges are appended to.
    #[arg(long, value_name = "TRANSCRIPTS")]
    pub record: Option<PathBuf>,
    /// Client configuration TOML; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub temperature: Option<f64>,
    #[arg(long)]
    pub endpoint: Option<String>,
    /// 1-based try index within the run plan.
    #[arg(long = "try", default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub try_index: u32,
}

#[derive(Debug, Clone, Args)]
pub struct MineArgs {
    /// Process description.
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub prompt: PromptArgs,
    #[command(flatten)]
    pub llm: LlmArgs,
    /// Item id used in the run id; defaults to the input file stem.
    #[arg(long)]
    pub item: Option<String>,
    /// Split long inputs into chunks of at most this many characters.
    #[arg(long)]
    pub chunk_chars: Option<usize>,
    /// Primary artifact: BPMN XML or classification JSON.
    #[arg(long)]
    pub out: PathBuf,
    /// Canonical line notation of the parsed graph (mine-bpmn only).
    #[arg(long)]
    pub notation: Option<PathBuf>,
    /// Parse report JSON.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct MineDeclareArgs {
    /// Sentences: a JSON list of `{sentence_id, sentence}` or a text file
    /// with one sentence per line (ids s1, s2, ...).
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub prompt: PromptArgs,
    #[command(flatten)]
    pub llm: LlmArgs,
    /// Declare constraint file.
    #[arg(long)]
    pub out: PathBuf,
    /// LTL formula file.
    #[arg(long)]
    pub ltl: Option<PathBuf>,
    /// Predictions as JSON in the LTL gold schema, for `evaluate`.
    #[arg(long)]
    pub predictions: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ScoringArgs {
    /// Gold file(s). BPMN gold files hold one annotation or a list.
    #[arg(long, required = true, num_args = 1..)]
    pub gold: Vec<PathBuf>,
    /// Alias map(s). For BPMN each file is matched to the text whose id
    /// equals the file name up to its first dot.
    #[arg(long, num_args = 1..)]
    pub alias: Vec<PathBuf>,
    /// Gold flow conditions must match the predicted edge (default).
    #[arg(long, conflicts_with = "ignore_conditions")]
    pub strict_conditions: bool,
    /// Ignore flow conditions when matching.
    #[arg(long)]
    pub ignore_conditions: bool,
    /// Sequential evaluation instead of the rayon pool.
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Debug, Clone, Args)]
pub struct EvaluateArgs {
    #[arg(long, value_enum)]
    pub task: TaskArg,
    /// Prediction file(s). BPMN: line-notation files named after the text
    /// id. LTL and RPA: one JSON file in the gold schema.
    #[arg(long, required = true, num_args = 1..)]
    pub pred: Vec<PathBuf>,
    #[command(flatten)]
    pub scoring: ScoringArgs,
    /// Label shown in the rendered table.
    #[arg(long)]
    pub run_label: Option<String>,
    /// Report JSON; printed to stdout when omitted.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Rendered table; printed to stdout when omitted.
    #[arg(long)]
    pub table: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct RobustnessArgs {
    #[arg(long, value_enum)]
    pub task: TaskArg,
    /// Run plan JSON. Without it the built-in variants are planned.
    #[arg(long)]
    pub plan: Option<PathBuf>,
    /// Tries of the base prompt when no plan file is given.
    #[arg(long, default_value_t = 3)]
    pub tries: u32,
    /// Transcript to replay.
    #[arg(long, value_name = "TRANSCRIPTS")]
    pub replay: PathBuf,
    #[command(flatten)]
    pub scoring: ScoringArgs,
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long)]
    pub table: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["input", "text"])))]
pub struct RenderPromptArgs {
    #[arg(long, value_enum)]
    pub task: TaskArg,
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Input text given inline.
    #[arg(long)]
    pub text: Option<String>,
    #[command(flatten)]
    pub prompt: PromptArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
