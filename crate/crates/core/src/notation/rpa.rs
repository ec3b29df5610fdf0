//! Task classification lines: either table rows (`task | label`,
//! `task | actor | label`) or a task phrase followed by a separator and a
//! label. "performed by X" inside the task phrase names the actor.

use super::lines::{source_lines, strip_list_marker};
use super::report::{LineLog, ParseReport, RejectReason};
use super::NotationError;
use crate::ir::{canonicalize_label, IrError, TaskClass, TaskClassification};

const SEPARATORS: [&str; 5] = ["\t", " - ", " – ", ":", ","];

pub fn parse_rpa_output(text: &str) -> Result<ParseReport<Vec<TaskClassification>>, NotationError> {
    if text.trim().is_empty() {
        return Err(NotationError::EmptyInput);
    }
    let mut log = LineLog::default();
    let mut out = Vec::new();

    for line in source_lines(text) {
        let (body, had_marker) = strip_list_marker(line.text);
        if had_marker {
            log.warn(line.number, "list marker stripped");
        }
        let parsed = if body.contains('|') {
            table_row(body)
        } else {
            free_line(body)
        };
        match parsed {
            Ok(t) => {
                out.push(t);
                log.parsed(line.number);
            }
            Err(reason) => log.reject(line.number, reason, line.text),
        }
    }
    Ok(log.finish(out))
}

fn label(cell: &str) -> Result<TaskClass, RejectReason> {
    cell.parse().map_err(|e| match e {
        IrError::UnknownClass(l) => RejectReason::UnknownLabel(l),
        _ => RejectReason::NoLabel,
    })
}

fn record(task: &str, actor: Option<&str>, class: TaskClass) -> Result<TaskClassification, RejectReason> {
    let (task, actor) = match actor {
        Some(a) => (canonicalize_label(task), Some(a)),
        None => {
            let task = canonicalize_label(task);
            match task.rsplit_once(" performed by ") {
                Some((t, a)) => return build(t, Some(a), class),
                None => (task, None),
            }
        }
    };
    build(&task, actor, class)
}

fn build(task: &str, actor: Option<&str>, class: TaskClass) -> Result<TaskClassification, RejectReason> {
    TaskClassification::new(task, actor, class).map_err(|_| RejectReason::EmptyTask)
}

fn table_row(body: &str) -> Result<TaskClassification, RejectReason> {
    let mut cells: Vec<&str> = body.split('|').map(str::trim).collect();
    if cells.first() == Some(&"") {
        cells.remove(0);
    }
    if cells.last() == Some(&"") {
        cells.pop();
    }
    let is_rule = |c: &&str| !c.is_empty() && c.chars().all(|ch| matches!(ch, '-' | ':' | ' '));
    if !cells.is_empty() && cells.iter().all(is_rule) {
        return Err(RejectReason::TableSeparator);
    }
    if cells.len() < 2 {
        return Err(RejectReason::NoLabel);
    }
    let class = label(cells[cells.len() - 1])?;
    if cells.len() >= 3 {
        record(cells[0], Some(cells[1]), class)
    } else {
        record(cells[0], None, class)
    }
}

fn free_line(body: &str) -> Result<TaskClassification, RejectReason> {
    let mut unknown = None;
    for sep in SEPARATORS {
        let Some((task, tail)) = body.rsplit_once(sep) else {
            continue;
        };
        match label(tail) {
            Ok(class) => return record(task, None, class),
            Err(e) => {
                unknown.get_or_insert(e);
            }
        }
    }
    Err(unknown.unwrap_or(RejectReason::NoLabel))
}
