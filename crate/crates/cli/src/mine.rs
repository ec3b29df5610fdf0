use crate::args::{LlmArgs, MineArgs, MineDeclareArgs, PromptArgs, RenderPromptArgs};
use crate::error::CliError;
use crate::files::{item_id, parse_json, read_text, read_toml, to_json, write_text};
use log::warn;
use serde::{Deserialize, Serialize};
use std::path::Path;
use text2proc::eval::LtlGoldSentence;
use text2proc::export::{to_bpmn_xml, to_declare_file, to_ltl_file};
use text2proc::ir::{validate_graph, DeclareModel, TaskClassification};
use text2proc::llm::{replay, run_id, ClientConfig, HttpTransport, LlmClient, RunContext, TranscriptStore};
use text2proc::notation::{
    parse_bpmn_notation, parse_ltl_output, parse_rpa_output, serialize_bpmn_notation, NotationError, ParseReport,
};
use text2proc::prompt::{build_prompt, builtin_variant, chunk_input, ExamplePair, PromptVariant};
use text2proc::BpmTask;

trait Respond {
    fn respond(&self, ctx: &RunContext, prompt: &str) -> Result<String, CliError>;
}

struct Replay<'a>(&'a TranscriptStore);

impl Respond for Replay<'_> {
    fn respond(&self, ctx: &RunContext, prompt: &str) -> Result<String, CliError> {
        let ex = replay(self.0, &ctx.run_id, ctx.try_index)?;
        if ex.prompt_text != prompt {
            warn!("{} try {}: recorded prompt differs from the rendered prompt", ctx.run_id, ctx.try_index);
        }
        Ok(ex.response_text)
    }
}

impl Respond for LlmClient<'_, HttpTransport> {
    fn respond(&self, ctx: &RunContext, prompt: &str) -> Result<String, CliError> {
        Ok(self.complete(ctx, prompt)?.response_text)
    }
}

pub fn client_config(args: &LlmArgs) -> Result<ClientConfig, CliError> {
    let mut config: ClientConfig = match &args.config {
        Some(path) => read_toml(path)?,
        None => ClientConfig::default(),
    };
    if let Some(m) = &args.model {
        config.model_name = m.clone();
    }
    if let Some(t) = args.temperature {
        config.temperature = t;
    }
    if let Some(e) = &args.endpoint {
        config.endpoint = e.clone();
    }
    config.validate()?;
    Ok(config)
}

fn with_responder<R>(args: &LlmArgs, f: impl FnOnce(&dyn Respond) -> Result<R, CliError>) -> Result<R, CliError> {
    if let Some(path) = &args.replay {
        let store = TranscriptStore::load(path)?;
        return f(&Replay(&store));
    }
    let config = client_config(args)?;
    let path = args
        .record
        .as_ref()
        .ok_or_else(|| CliError::Usage("--live needs --record".into()))?;
    let store = TranscriptStore::open(path)?;
    let transport = HttpTransport::new(&config);
    let client = LlmClient::new(config, transport, &store)?;
    f(&client)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ExamplesFile {
    examples: Vec<ExamplePair>,
}

pub fn load_variant(task: BpmTask, args: &PromptArgs) -> Result<PromptVariant, CliError> {
    let path = Path::new(&args.prompt);
    let mut variant = if args.prompt.ends_with(".toml") {
        let text = read_text(path)?;
        PromptVariant::from_toml(&item_id(path), &text)?
    } else {
        builtin_variant(task, &args.prompt)?
    };
    if let Some(path) = &args.examples {
        let file: ExamplesFile = read_toml(path)?;
        variant.examples = file.examples;
    }
    Ok(variant)
}

fn context(task: BpmTask, variant: &PromptVariant, item: &str, try_index: u32) -> RunContext {
    RunContext {
        run_id: run_id(task, &variant.variant_id, item),
        task,
        variant_id: variant.variant_id.clone(),
        try_index,
    }
}

/// Prompt once per chunk and join the answers line-wise.
fn ask_document(task: BpmTask, args: &MineArgs) -> Result<String, CliError> {
    let input = read_text(&args.input)?;
    if input.trim().is_empty() {
        return Err(NotationError::EmptyInput.into());
    }
    let variant = load_variant(task, &args.prompt)?;
    let item = args.item.clone().unwrap_or_else(|| item_id(&args.input));
    let chunks = match args.chunk_chars {
        Some(0) => return Err(CliError::Usage("--chunk-chars must be positive".into())),
        Some(n) => chunk_input(&input, n),
        None => vec![input.clone()],
    };
    with_responder(&args.llm, |llm| {
        let mut answers = Vec::new();
        for (k, chunk) in chunks.iter().enumerate() {
            let item = if chunks.len() == 1 { item.clone() } else { format!("{item}-chunk{}", k + 1) };
            let prompt = build_prompt(&variant.spec(chunk))?;
            answers.push(llm.respond(&context(task, &variant, &item, args.llm.try_index), &prompt)?);
        }
        Ok(answers.join("\n"))
    })
}

fn write_report<T: Serialize>(path: Option<&Path>, report: &T) -> Result<(), CliError> {
    match path {
        Some(p) => write_text(p, &to_json(report)),
        None => Ok(()),
    }
}

pub fn mine_bpmn(args: &MineArgs) -> Result<(), CliError> {
    let answer = ask_document(BpmTask::Bpmn, args)?;
    let report = parse_bpmn_notation(&answer)?;
    write_report(args.report.as_deref(), &report)?;
    for r in &report.rejected_lines {
        warn!("line {} rejected ({}): {}", r.line, r.reason, r.text);
    }
    let violations = validate_graph(&report.value);
    if !violations.is_empty() {
        return Err(CliError::InvalidOutput(violations.iter().map(|v| v.to_string()).collect()));
    }
    let xml = to_bpmn_xml(&report.value)?;
    if let Some(path) = &args.notation {
        let text = serialize_bpmn_notation(&report.value)
            .map_err(|e| CliError::InvalidOutput(vec![e.to_string()]))?;
        write_text(path, &text)?;
    }
    write_text(&args.out, &xml)
}

pub fn classify_rpa(args: &MineArgs) -> Result<(), CliError> {
    if args.notation.is_some() {
        return Err(CliError::Usage("--notation applies to mine-bpmn only".into()));
    }
    let answer = ask_document(BpmTask::Rpa, args)?;
    let report = parse_rpa_output(&answer)?;
    write_report(args.report.as_deref(), &report)?;
    for r in &report.rejected_lines {
        warn!("line {} rejected ({}): {}", r.line, r.reason, r.text);
    }
    let tasks: &Vec<TaskClassification> = &report.value;
    write_text(&args.out, &to_json(tasks))
}

#[derive(Serialize)]
struct SentenceReport {
    sentence_id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<ParseReport<DeclareModel>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn read_sentences(path: &Path) -> Result<Vec<LtlGoldSentence>, CliError> {
    let text = read_text(path)?;
    if text.trim().is_empty() {
        return Err(NotationError::EmptyInput.into());
    }
    if path.extension().is_some_and(|e| e == "json") {
        return parse_json(path, &text);
    }
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .enumerate()
        .map(|(i, l)| LtlGoldSentence {
            sentence_id: format!("s{}", i + 1),
            sentence: l.to_string(),
            constraints: Vec::new(),
        })
        .collect())
}

pub fn mine_declare(args: &MineDeclareArgs) -> Result<(), CliError> {
    let sentences = read_sentences(&args.input)?;
    let variant = load_variant(BpmTask::Ltl, &args.prompt)?;
    let answers = with_responder(&args.llm, |llm| {
        sentences
            .iter()
            .map(|s| {
                let prompt = build_prompt(&variant.spec(&s.sentence))?;
                llm.respond(&context(BpmTask::Ltl, &variant, &s.sentence_id, args.llm.try_index), &prompt)
            })
            .collect::<Result<Vec<_>, _>>()
    })?;

    let mut model = DeclareModel::new();
    let mut reports = Vec::new();
    for (s, answer) in sentences.iter().zip(&answers) {
        model.declare_sentence(&s.sentence_id);
        match parse_ltl_output(answer, &s.sentence_id) {
            Ok(r) => {
                model.extend(r.value.clone());
                reports.push(SentenceReport {
                    sentence_id: s.sentence_id.clone(),
                    report: Some(r),
                    error: None,
                });
            }
            Err(e) => {
                warn!("{}: {e}", s.sentence_id);
                reports.push(SentenceReport {
                    sentence_id: s.sentence_id.clone(),
                    report: None,
                    error: Some(e.to_string()),
                });
            }
        }
    }
    write_report(args.report.as_deref(), &reports)?;
    if let Some(path) = &args.ltl {
        write_text(path, &to_ltl_file(&model))?;
    }
    if let Some(path) = &args.predictions {
        let preds: Vec<LtlGoldSentence> = sentences
            .iter()
            .map(|s| LtlGoldSentence {
                sentence_id: s.sentence_id.clone(),
                sentence: s.sentence.clone(),
                constraints: model.constraints_for(&s.sentence_id).cloned().collect(),
            })
            .collect();
        write_text(path, &to_json(&preds))?;
    }
    write_text(&args.out, &to_declare_file(&model))
}

pub fn render_prompt(args: &RenderPromptArgs) -> Result<(), CliError> {
    let text = match (&args.input, &args.text) {
        (Some(path), _) => read_text(path)?,
        (None, Some(t)) => t.clone(),
        (None, None) => return Err(CliError::Usage("--input or --text is required".into())),
    };
    let task = BpmTask::from(args.task);
    let variant = load_variant(task, &args.prompt)?;
    let prompt = build_prompt(&variant.spec(&text))?;
    match &args.out {
        Some(p) => write_text(p, &prompt),
        None => {
            print!("{prompt}");
            Ok(())
        }
    }
}
