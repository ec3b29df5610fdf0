//! Plain-text tables: one block of Prec./Rec./F1 rows per run with the
//! classes as columns and an Overall column, or a single recall row per run
//! for the BPMN task.

use super::metrics::MetricsReport;
use super::robustness::{Metric, RobustnessSummary};
use crate::BpmTask;

fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |v| format!("{v:.2}"))
}

fn pad(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|i| rows.iter().filter_map(|r| r.get(i)).map(|s| s.chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for r in rows {
        let line: Vec<String> = r
            .iter()
            .enumerate()
            .map(|(i, s)| {
                if i < 2 {
                    format!("{s:<w$}", w = widths[i])
                } else {
                    format!("{s:>w$}", w = widths[i])
                }
            })
            .collect();
        out.push_str(line.join(" | ").trim_end());
        out.push('\n');
    }
    out
}

/// Render reports of one task as a table.
pub fn render_table(reports: &[MetricsReport]) -> String {
    let Some(first) = reports.first() else {
        return String::new();
    };
    let mut classes: Vec<&str> = Vec::new();
    for r in reports {
        for c in &r.classes {
            if !classes.contains(&c.class.as_str()) {
                classes.push(&c.class);
            }
        }
    }
    let mut header = vec!["Run".to_string(), String::new()];
    header.extend(classes.iter().map(|c| c.to_string()));
    header.push("Overall".into());
    let mut rows = vec![header];

    let metrics: &[Metric] = if first.task == BpmTask::Bpmn {
        &[Metric::Recall]
    } else {
        &Metric::ALL
    };
    for (i, r) in reports.iter().enumerate() {
        let label = r.run_label.clone().unwrap_or_else(|| format!("run {}", i + 1));
        for (k, m) in metrics.iter().enumerate() {
            let mut row = vec![if k == 0 { label.clone() } else { String::new() }, m.label().to_string()];
            for c in &classes {
                let cm = r.class(c);
                row.push(cell(cm.and_then(|cm| match m {
                    Metric::Precision => cm.precision,
                    Metric::Recall => cm.recall,
                    Metric::F1 => cm.f1,
                })));
            }
            row.push(cell(match m {
                Metric::Precision => r.overall.precision,
                Metric::Recall => r.overall.recall,
                Metric::F1 => r.overall.f1,
            }));
            rows.push(row);
        }
    }
    pad(&rows)
}

pub fn render_robustness(summary: &RobustnessSummary) -> String {
    let mut out = String::new();
    for axis in &summary.axes {
        out.push_str(&format!("{} ({} runs: {})\n", axis.axis.name(), axis.runs.len(), axis.runs.join(", ")));
        let mut rows = vec![["Class", "Metric", "Min", "Max", "Range", "Mean"].map(String::from).to_vec()];
        for m in &axis.metrics {
            let s = m.spread.as_ref();
            rows.push(vec![
                m.class.clone(),
                m.metric.label().to_string(),
                cell(s.map(|s| s.min)),
                cell(s.map(|s| s.max)),
                cell(s.map(|s| s.range)),
                cell(s.map(|s| s.mean)),
            ]);
        }
        out.push_str(&pad(&rows));
        out.push('\n');
    }
    out
}
