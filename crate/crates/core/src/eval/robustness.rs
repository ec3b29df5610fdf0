use super::metrics::MetricsReport;
use super::EvalError;
use crate::prompt::Axis;
use crate::BpmTask;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Precision,
    Recall,
    F1,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::Precision, Metric::Recall, Metric::F1];

    pub fn label(self) -> &'static str {
        match self {
            Metric::Precision => "Prec.",
            Metric::Recall => "Rec.",
            Metric::F1 => "F1",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spread {
    pub min: f64,
    pub max: f64,
    pub range: f64,
    pub mean: f64,
    /// Runs in which the value was defined.
    pub runs: usize,
}

impl Spread {
    fn of(values: &[f64]) -> Option<Spread> {
        let first = *values.first()?;
        let (min, max) = values.iter().fold((first, first), |(lo, hi), v| (lo.min(*v), hi.max(*v)));
        Some(Spread {
            min,
            max,
            range: max - min,
            mean: values.iter().sum::<f64>() / values.len() as f64,
            runs: values.len(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSpread {
    /// A class or template name, or `overall`.
    pub class: String,
    pub metric: Metric,
    /// `None` when the metric was undefined in every run.
    pub spread: Option<Spread>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisSummary {
    pub axis: Axis,
    pub runs: Vec<String>,
    pub metrics: Vec<MetricSpread>,
}

impl AxisSummary {
    pub fn spread(&self, class: &str, metric: Metric) -> Option<&Spread> {
        self.metrics
            .iter()
            .find(|m| m.class == class && m.metric == metric)
            .and_then(|m| m.spread.as_ref())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustnessSummary {
    pub task: BpmTask,
    pub axes: Vec<AxisSummary>,
}

impl RobustnessSummary {
    pub fn axis(&self, axis: Axis) -> Option<&AxisSummary> {
        self.axes.iter().find(|a| a.axis == axis)
    }
}

fn value(r: &MetricsReport, class: &str, metric: Metric) -> Option<f64> {
    let (p, rec, f) = if class == "overall" {
        (r.overall.precision, r.overall.recall, r.overall.f1)
    } else {
        let c = r.class(class)?;
        (c.precision, c.recall, c.f1)
    };
    match metric {
        Metric::Precision => p,
        Metric::Recall => rec,
        Metric::F1 => f,
    }
}

/// Min, max, range and mean of every metric across the runs of each axis.
/// Each axis that occurs needs at least two reports; untagged reports are
/// ignored.
pub fn robustness_report(reports: &[MetricsReport]) -> Result<RobustnessSummary, EvalError> {
    let tagged: Vec<&MetricsReport> = reports.iter().filter(|r| r.axis.is_some()).collect();
    let Some(first) = tagged.first() else {
        return Err(EvalError::InsufficientRuns { axis: None, runs: 0 });
    };
    let task = first.task;
    if tagged.iter().any(|r| r.task != task) {
        return Err(EvalError::MixedTasks);
    }

    let mut axes = Vec::new();
    for axis in [Axis::OutputRobustness, Axis::InputRobustness] {
        let runs: Vec<&MetricsReport> = tagged.iter().copied().filter(|r| r.axis == Some(axis)).collect();
        match runs.len() {
            0 => continue,
            1 => {
                return Err(EvalError::InsufficientRuns {
                    axis: Some(axis),
                    runs: 1,
                })
            }
            _ => {}
        }
        let mut classes: Vec<String> = Vec::new();
        for r in &runs {
            for c in &r.classes {
                if !classes.contains(&c.class) {
                    classes.push(c.class.clone());
                }
            }
        }
        classes.push("overall".into());

        let metrics = classes
            .iter()
            .flat_map(|class| {
                let runs = &runs;
                Metric::ALL.into_iter().map(move |metric| {
                    let values: Vec<f64> = runs.iter().filter_map(|r| value(r, class, metric)).collect();
                    MetricSpread {
                        class: class.clone(),
                        metric,
                        spread: Spread::of(&values),
                    }
                })
            })
            .collect();
        axes.push(AxisSummary {
            axis,
            runs: runs
                .iter()
                .enumerate()
                .map(|(i, r)| r.run_label.clone().unwrap_or_else(|| format!("run {}", i + 1)))
                .collect(),
            metrics,
        });
    }
    Ok(RobustnessSummary { task, axes })
}
