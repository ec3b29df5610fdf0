//! Batch commands wiring prompts, the LLM client, the notation parsers,
//! the exporters and the evaluators together.

pub mod args;
pub mod error;
mod files;
mod mine;
mod score;

pub use args::{Cli, Command};
pub use error::CliError;

pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::MineBpmn(a) => mine::mine_bpmn(a),
        Command::MineDeclare(a) => mine::mine_declare(a),
        Command::ClassifyRpa(a) => mine::classify_rpa(a),
        Command::Evaluate(a) => score::evaluate(a),
        Command::Robustness(a) => score::robustness(a),
        Command::RenderPrompt(a) => mine::render_prompt(a),
    }
}
