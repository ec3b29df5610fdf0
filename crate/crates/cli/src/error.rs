use std::path::PathBuf;
use text2proc::eval::EvalError;
use text2proc::export::ExportError;
use text2proc::llm::LlmError;
use text2proc::notation::NotationError;
use text2proc::prompt::PromptError;

pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}: {source}", .path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Notation(#[from] NotationError),
    #[error("model output does not form a valid model: {}", .0.join("; "))]
    InvalidOutput(Vec<String>),
    #[error(transparent)]
    Llm(#[from] LlmError),
    #[error("{}: {message}", .path.display())]
    Schema { path: PathBuf, message: String },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Prompt(#[from] PromptError),
}

impl From<ExportError> for CliError {
    fn from(e: ExportError) -> Self {
        match e {
            ExportError::InvalidGraph(v) => CliError::InvalidOutput(v.iter().map(|v| v.to_string()).collect()),
            other => CliError::InvalidOutput(vec![other.to_string()]),
        }
    }
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status. Each failure class has its own code.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Notation(_) | CliError::InvalidOutput(_) => 2,
            CliError::Llm(e) => match e {
                LlmError::FixtureMiss { .. } => 3,
                LlmError::Timeout { .. } => 4,
                LlmError::RateLimited { .. } => 5,
                LlmError::AuthFailure(_) => 6,
                LlmError::TransportFailure(_) => 7,
                LlmError::InvalidConfig(_) => 8,
                LlmError::EmptyPrompt => 10,
                LlmError::DuplicateExchange { .. } | LlmError::Store(_) => 1,
            },
            CliError::Schema { .. } => 8,
            CliError::Eval(e) => match e {
                EvalError::InsufficientRuns { .. } => 9,
                EvalError::InconsistentAlias(_) => 11,
                EvalError::SentenceIdMismatch { .. } => 12,
                EvalError::InvalidGold(_) => 8,
                EvalError::MixedTasks => EXIT_USAGE,
            },
            CliError::Prompt(_) => 10,
        }
    }
}
