use crate::args::{EvaluateArgs, RobustnessArgs, ScoringArgs, TaskArg};
use crate::error::CliError;
use crate::files::{item_id, read_json, read_text, to_json, write_text};
use log::warn;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use text2proc::eval::{
    eval_bpmn_corpus, eval_ltl, eval_rpa, ltl_gold_model, render_robustness, render_table, robustness_report,
    BpmnEvalOptions, BpmnItem, ConditionMatching, LtlEvalOptions, LtlGoldSentence, MetricsReport, RobustnessSummary,
    RpaEvalOptions,
};
use text2proc::ir::{AliasMap, DeclareModel, GoldAnnotation, ProcessGraph, TaskClassification};
use text2proc::llm::{replay, run_id, TranscriptStore};
use text2proc::notation::{parse_bpmn_notation, parse_ltl_output, parse_rpa_output};
use text2proc::prompt::{builtin_variants, enumerate_run_plan, RunPlan};
use text2proc::{BpmTask, Execution};

#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

/// Gold data of one task, loaded once.
enum Gold {
    Bpmn {
        texts: Vec<GoldAnnotation>,
        aliases: BTreeMap<String, AliasMap>,
    },
    Ltl {
        model: DeclareModel,
        alias: Option<AliasMap>,
    },
    Rpa {
        tasks: Vec<TaskClassification>,
        alias: Option<AliasMap>,
    },
}

/// Predictions for one run, in the shape the evaluators take.
enum Prediction {
    Bpmn(BTreeMap<String, ProcessGraph>),
    Ltl(DeclareModel),
    Rpa(Vec<TaskClassification>),
}

fn single<'a>(paths: &'a [PathBuf], what: &str) -> Result<&'a Path, CliError> {
    match paths {
        [p] => Ok(p),
        _ => Err(CliError::Usage(format!("this task takes exactly one {what} file"))),
    }
}

fn single_alias(paths: &[PathBuf]) -> Result<Option<AliasMap>, CliError> {
    match paths {
        [] => Ok(None),
        [p] => Ok(Some(read_json(p)?)),
        _ => Err(CliError::Usage("this task takes at most one alias file".into())),
    }
}

fn load_gold(task: TaskArg, args: &ScoringArgs) -> Result<Gold, CliError> {
    Ok(match task {
        TaskArg::Bpmn => {
            let mut texts = Vec::new();
            for p in &args.gold {
                match read_json::<OneOrMany<GoldAnnotation>>(p)? {
                    OneOrMany::One(g) => texts.push(g),
                    OneOrMany::Many(gs) => texts.extend(gs),
                }
            }
            let mut aliases = BTreeMap::new();
            for p in &args.alias {
                let id = item_id(p);
                if !texts.iter().any(|t| t.text_id == id) {
                    return Err(CliError::Usage(format!("alias file {} matches no gold text", p.display())));
                }
                aliases.insert(id, read_json(p)?);
            }
            Gold::Bpmn { texts, aliases }
        }
        TaskArg::Ltl => {
            let sentences: Vec<LtlGoldSentence> = read_json(single(&args.gold, "gold")?)?;
            Gold::Ltl {
                model: ltl_gold_model(&sentences),
                alias: single_alias(&args.alias)?,
            }
        }
        TaskArg::Rpa => Gold::Rpa {
            tasks: read_json(single(&args.gold, "gold")?)?,
            alias: single_alias(&args.alias)?,
        },
    })
}

fn execution(args: &ScoringArgs) -> Execution {
    if args.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn score(gold: &Gold, pred: Prediction, args: &ScoringArgs) -> Result<MetricsReport, CliError> {
    let execution = execution(args);
    Ok(match (gold, pred) {
        (Gold::Bpmn { texts, aliases }, Prediction::Bpmn(mut graphs)) => {
            let items: Vec<BpmnItem> = texts
                .iter()
                .map(|g| BpmnItem {
                    prediction: graphs.remove(&g.text_id).unwrap_or_else(|| {
                        warn!("no prediction for text {}; scoring an empty graph", g.text_id);
                        ProcessGraph::default()
                    }),
                    gold: g.clone(),
                    aliases: aliases.get(&g.text_id).cloned().unwrap_or_default(),
                })
                .collect();
            if let Some(extra) = graphs.keys().next() {
                return Err(CliError::Usage(format!("prediction for `{extra}` has no gold text")));
            }
            let conditions = if args.ignore_conditions {
                ConditionMatching::Ignored
            } else {
                ConditionMatching::Strict
            };
            eval_bpmn_corpus(&items, &BpmnEvalOptions { conditions }, execution)?
        }
        (Gold::Ltl { model, alias }, Prediction::Ltl(pred)) => eval_ltl(
            &pred,
            model,
            &LtlEvalOptions {
                alias: alias.clone(),
                execution,
            },
        )?,
        (Gold::Rpa { tasks, alias }, Prediction::Rpa(pred)) => {
            eval_rpa(&pred, tasks, &RpaEvalOptions { alias: alias.clone() })
        }
        _ => unreachable!("prediction shape follows the task"),
    })
}

fn load_prediction(task: TaskArg, paths: &[PathBuf]) -> Result<Prediction, CliError> {
    Ok(match task {
        TaskArg::Bpmn => {
            let mut graphs = BTreeMap::new();
            for p in paths {
                let report = parse_bpmn_notation(&read_text(p)?)?;
                if graphs.insert(item_id(p), report.value).is_some() {
                    return Err(CliError::Usage(format!("two prediction files for text `{}`", item_id(p))));
                }
            }
            Prediction::Bpmn(graphs)
        }
        TaskArg::Ltl => {
            let sentences: Vec<LtlGoldSentence> = read_json(single(paths, "prediction")?)?;
            Prediction::Ltl(ltl_gold_model(&sentences))
        }
        TaskArg::Rpa => Prediction::Rpa(read_json(single(paths, "prediction")?)?),
    })
}

fn emit(json: String, table: String, report: Option<&Path>, table_path: Option<&Path>) -> Result<(), CliError> {
    match report {
        Some(p) => write_text(p, &json)?,
        None => print!("{json}"),
    }
    match table_path {
        Some(p) => write_text(p, &table),
        None => {
            print!("{table}");
            Ok(())
        }
    }
}

pub fn evaluate(args: &EvaluateArgs) -> Result<(), CliError> {
    let gold = load_gold(args.task, &args.scoring)?;
    let pred = load_prediction(args.task, &args.pred)?;
    let mut report = score(&gold, pred, &args.scoring)?;
    report.run_label = args.run_label.clone();
    let table = render_table(std::slice::from_ref(&report));
    emit(to_json(&report), table, args.report.as_deref(), args.table.as_deref())
}

/// A run plan plus the items each run covers. Without items, the gold ids
/// are used (text ids for BPMN, sentence ids for LTL).
#[derive(Debug, Deserialize)]
struct PlanFile {
    #[serde(default)]
    items: Vec<String>,
    runs: Vec<text2proc::prompt::PlannedRun>,
}

#[derive(Serialize)]
struct RobustnessOutput<'a> {
    runs: &'a [MetricsReport],
    summary: &'a RobustnessSummary,
}

fn plan_for(task: BpmTask, args: &RobustnessArgs) -> Result<(RunPlan, Vec<String>), CliError> {
    if let Some(path) = &args.plan {
        let file: PlanFile = read_json(path)?;
        return Ok((RunPlan { runs: file.runs }, file.items));
    }
    let variants = builtin_variants(task);
    let specs: Vec<_> = variants.iter().map(|v| v.spec("")).collect();
    Ok((enumerate_run_plan(&specs[0], &specs[1..], args.tries)?, Vec::new()))
}

pub fn robustness(args: &RobustnessArgs) -> Result<(), CliError> {
    let task = BpmTask::from(args.task);
    let gold = load_gold(args.task, &args.scoring)?;
    let (plan, mut items) = plan_for(task, args)?;
    if items.is_empty() {
        items = match &gold {
            Gold::Bpmn { texts, .. } => texts.iter().map(|t| t.text_id.clone()).collect(),
            Gold::Ltl { model, .. } => model.sentences().to_vec(),
            Gold::Rpa { .. } => return Err(CliError::Usage("an RPA run plan must list its items".into())),
        };
    }
    let store = TranscriptStore::load(&args.replay)?;

    let mut reports = Vec::new();
    for run in &plan.runs {
        let mut graphs = BTreeMap::new();
        let mut model = DeclareModel::new();
        let mut tasks = Vec::new();
        for item in &items {
            let ex = replay(&store, &run_id(task, &run.variant_id, item), run.try_index)?;
            match task {
                BpmTask::Bpmn => match parse_bpmn_notation(&ex.response_text) {
                    Ok(r) => {
                        graphs.insert(item.clone(), r.value);
                    }
                    Err(e) => warn!("{}: {e}", ex.run_id),
                },
                BpmTask::Ltl => {
                    model.declare_sentence(item);
                    match parse_ltl_output(&ex.response_text, item) {
                        Ok(r) => model.extend(r.value),
                        Err(e) => warn!("{}: {e}", ex.run_id),
                    }
                }
                BpmTask::Rpa => match parse_rpa_output(&ex.response_text) {
                    Ok(r) => tasks.extend(r.value),
                    Err(e) => warn!("{}: {e}", ex.run_id),
                },
            }
        }
        let pred = match task {
            BpmTask::Bpmn => Prediction::Bpmn(graphs),
            BpmTask::Ltl => Prediction::Ltl(model),
            BpmTask::Rpa => Prediction::Rpa(tasks),
        };
        let label = format!("{} try {}", run.variant_id, run.try_index);
        reports.push(score(&gold, pred, &args.scoring)?.with_run(label, Some(run.axis)));
    }

    let summary = robustness_report(&reports)?;
    let mut table = render_table(&reports);
    table.push('\n');
    table.push_str(&render_robustness(&summary));
    let json = to_json(&RobustnessOutput {
        runs: &reports,
        summary: &summary,
    });
    emit(json, table, args.report.as_deref(), args.table.as_deref())
}
