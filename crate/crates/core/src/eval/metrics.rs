use crate::prompt::Axis;
use crate::BpmTask;
use serde::{Deserialize, Serialize};

/// How per-class values are folded into the overall row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Averaging {
    /// Overall P/R/F1 from the summed TP/FP/FN of all classes.
    Pooled,
    /// Overall P and R are per-class values weighted by class support
    /// (gold count); classes with an undefined value are left out and the
    /// weights renormalised. Overall F1 is the harmonic mean of overall P
    /// and R. This is not the textbook micro average.
    SupportWeighted,
    /// Overall recall is the unweighted mean of per-class recall, where each
    /// class is one text. Precision is never defined.
    MacroTexts,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCounts {
    pub class: String,
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl ClassCounts {
    pub fn new(class: impl Into<String>) -> Self {
        ClassCounts {
            class: class.into(),
            tp: 0,
            fp: 0,
            fn_: 0,
        }
    }

    /// Gold instances of the class.
    pub fn support(&self) -> u64 {
        self.tp + self.fn_
    }
}

/// Gold class on the left, predicted class on the right. Diagonal cells are
/// true positives; off-diagonal cells count predictions that had the right
/// arguments but the wrong class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixCell {
    pub gold: String,
    pub predicted: String,
    pub count: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: Vec<ClassCounts>,
    pub cells: Vec<MatrixCell>,
}

impl ConfusionMatrix {
    pub fn with_classes<S: Into<String>>(classes: impl IntoIterator<Item = S>) -> Self {
        ConfusionMatrix {
            counts: classes.into_iter().map(ClassCounts::new).collect(),
            cells: Vec::new(),
        }
    }

    pub fn class_mut(&mut self, class: &str) -> &mut ClassCounts {
        let i = match self.counts.iter().position(|c| c.class == class) {
            Some(i) => i,
            None => {
                self.counts.push(ClassCounts::new(class));
                self.counts.len() - 1
            }
        };
        &mut self.counts[i]
    }

    pub fn class(&self, class: &str) -> Option<&ClassCounts> {
        self.counts.iter().find(|c| c.class == class)
    }

    pub fn add_cell(&mut self, gold: &str, predicted: &str, n: u64) {
        if n == 0 {
            return;
        }
        match self.cells.iter_mut().find(|c| c.gold == gold && c.predicted == predicted) {
            Some(c) => c.count += n,
            None => self.cells.push(MatrixCell {
                gold: gold.to_string(),
                predicted: predicted.to_string(),
                count: n,
            }),
        }
    }

    pub fn cell(&self, gold: &str, predicted: &str) -> u64 {
        self.cells
            .iter()
            .find(|c| c.gold == gold && c.predicted == predicted)
            .map_or(0, |c| c.count)
    }

    /// Add `other` into `self`, class by class.
    pub fn merge(&mut self, other: &ConfusionMatrix) {
        for c in &other.counts {
            let mine = self.class_mut(&c.class);
            mine.tp += c.tp;
            mine.fp += c.fp;
            mine.fn_ += c.fn_;
        }
        for cell in &other.cells {
            self.add_cell(&cell.gold, &cell.predicted, cell.count);
        }
    }

    /// Put cells in class order so that output does not depend on the order
    /// in which work items finished.
    pub fn sort_cells(&mut self) {
        let rank = |c: &str| self.counts.iter().position(|k| k.class == c).unwrap_or(usize::MAX);
        let mut cells = std::mem::take(&mut self.cells);
        cells.sort_by(|a, b| {
            (rank(&a.gold), rank(&a.predicted), &a.gold, &a.predicted).cmp(&(
                rank(&b.gold),
                rank(&b.predicted),
                &b.gold,
                &b.predicted,
            ))
        });
        self.cells = cells;
    }
}

/// `num / den`, or `None` when the denominator is zero.
pub fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// Harmonic mean. Undefined if either input is undefined; zero when both
/// are zero.
pub fn f1(p: Option<f64>, r: Option<f64>) -> Option<f64> {
    let (p, r) = (p?, r?);
    Some(if p + r > 0.0 { 2.0 * p * r / (p + r) } else { 0.0 })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub class: String,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
    pub support: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverallMetrics {
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub task: BpmTask,
    pub averaging: Averaging,
    pub classes: Vec<ClassMetrics>,
    pub overall: OverallMetrics,
    pub matrix: ConfusionMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis: Option<Axis>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub run_label: Option<String>,
}

fn weighted(values: impl Iterator<Item = (Option<f64>, u64)>) -> Option<f64> {
    let (mut sum, mut weight) = (0.0, 0u64);
    for (v, w) in values {
        if let Some(v) = v {
            sum += v * w as f64;
            weight += w;
        }
    }
    (weight > 0).then(|| sum / weight as f64)
}

impl MetricsReport {
    /// Derive every metric from the matrix counts. The BPMN protocol scores
    /// recall only, so its precision (and F1) is always undefined.
    pub fn from_matrix(task: BpmTask, matrix: ConfusionMatrix, averaging: Averaging) -> Self {
        let recall_only = task == BpmTask::Bpmn || averaging == Averaging::MacroTexts;
        let classes: Vec<ClassMetrics> = matrix
            .counts
            .iter()
            .map(|c| {
                let precision = if recall_only { None } else { ratio(c.tp, c.tp + c.fp) };
                let recall = ratio(c.tp, c.tp + c.fn_);
                ClassMetrics {
                    class: c.class.clone(),
                    precision,
                    recall,
                    f1: f1(precision, recall),
                    support: c.support(),
                }
            })
            .collect();

        let overall = match averaging {
            Averaging::Pooled => {
                let (tp, fp, fn_) = matrix
                    .counts
                    .iter()
                    .fold((0, 0, 0), |(a, b, c), k| (a + k.tp, b + k.fp, c + k.fn_));
                let precision = if recall_only { None } else { ratio(tp, tp + fp) };
                let recall = ratio(tp, tp + fn_);
                OverallMetrics {
                    precision,
                    recall,
                    f1: f1(precision, recall),
                }
            }
            Averaging::SupportWeighted => {
                let precision = if recall_only {
                    None
                } else {
                    weighted(classes.iter().map(|c| (c.precision, c.support)))
                };
                let recall = weighted(classes.iter().map(|c| (c.recall, c.support)));
                OverallMetrics {
                    precision,
                    recall,
                    f1: f1(precision, recall),
                }
            }
            Averaging::MacroTexts => {
                let defined: Vec<f64> = classes.iter().filter_map(|c| c.recall).collect();
                OverallMetrics {
                    precision: None,
                    recall: (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64),
                    f1: None,
                }
            }
        };

        MetricsReport {
            task,
            averaging,
            classes,
            overall,
            matrix,
            axis: None,
            run_label: None,
        }
    }

    pub fn class(&self, class: &str) -> Option<&ClassMetrics> {
        self.classes.iter().find(|c| c.class == class)
    }

    pub fn with_run(mut self, label: impl Into<String>, axis: Option<Axis>) -> Self {
        self.run_label = Some(label.into());
        self.axis = axis;
        self
    }
}
