use super::metrics::{Averaging, ConfusionMatrix, MetricsReport};
use crate::ir::{canonicalize_label, AliasMap, TaskClass, TaskClassification};
use crate::BpmTask;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Default)]
pub struct RpaEvalOptions {
    /// Optional rewrite from predicted task wording to gold task wording.
    pub alias: Option<AliasMap>,
}

/// Per-class precision/recall/F1 with support-weighted overall values.
///
/// Predictions are aligned to gold records by canonical task text; the
/// actor is not part of the key. Repeated tasks are matched as multisets.
pub fn eval_rpa(pred: &[TaskClassification], gold: &[TaskClassification], opts: &RpaEvalOptions) -> MetricsReport {
    let mut by_task: BTreeMap<String, ([u64; 3], [u64; 3])> = BTreeMap::new();
    let idx = |c: TaskClass| TaskClass::ALL.iter().position(|k| *k == c).expect("known class");
    for p in pred {
        let key = match &opts.alias {
            Some(a) => a.rewrite(&p.task),
            None => canonicalize_label(&p.task),
        };
        by_task.entry(key).or_default().0[idx(p.label)] += 1;
    }
    for g in gold {
        by_task.entry(canonicalize_label(&g.task)).or_default().1[idx(g.label)] += 1;
    }

    let mut m = ConfusionMatrix::with_classes(TaskClass::ALL.map(|c| c.display_name()));
    for (p, g) in by_task.values() {
        let mut p_left = Vec::new();
        let mut g_left = Vec::new();
        for (i, class) in TaskClass::ALL.iter().enumerate() {
            let name = class.display_name();
            let tp = p[i].min(g[i]);
            let counts = m.class_mut(name);
            counts.tp += tp;
            counts.fp += p[i] - tp;
            counts.fn_ += g[i] - tp;
            m.add_cell(name, name, tp);
            p_left.extend(std::iter::repeat_n(*class, (p[i] - tp) as usize));
            g_left.extend(std::iter::repeat_n(*class, (g[i] - tp) as usize));
        }
        for (gc, pc) in g_left.iter().zip(&p_left) {
            m.add_cell(gc.display_name(), pc.display_name(), 1);
        }
    }
    m.sort_cells();
    MetricsReport::from_matrix(BpmTask::Rpa, m, Averaging::SupportWeighted)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(task: &str, label: TaskClass) -> TaskClassification {
        TaskClassification::new(task, None, label).unwrap()
    }

    #[test]
    fn identical_lists_score_one() {
        let gold = vec![t("a", TaskClass::Manual), t("b", TaskClass::User), t("c", TaskClass::Automated)];
        let r = eval_rpa(&gold, &gold, &Default::default());
        assert_eq!(r.overall.precision, Some(1.0));
        assert_eq!(r.overall.recall, Some(1.0));
        assert_eq!(r.overall.f1, Some(1.0));
    }

    #[test]
    fn unmatched_tasks() {
        let gold = vec![t("a", TaskClass::Manual)];
        let pred = vec![t("b", TaskClass::Manual)];
        let r = eval_rpa(&pred, &gold, &Default::default());
        let m = r.matrix.class("Manual").unwrap();
        assert_eq!((m.tp, m.fp, m.fn_), (0, 1, 1));
        assert!(r.matrix.cells.is_empty());
    }

    #[test]
    fn mislabel_lands_off_diagonal() {
        let gold = vec![t("a", TaskClass::User), t("a", TaskClass::User)];
        let pred = vec![t("A.", TaskClass::User), t("a", TaskClass::Manual)];
        let r = eval_rpa(&pred, &gold, &Default::default());
        assert_eq!(r.matrix.cell("User", "User"), 1);
        assert_eq!(r.matrix.cell("User", "Manual"), 1);
        assert_eq!(r.class("Manual").unwrap().precision, Some(0.0));
        // Automated has no predictions and no support: undefined, not zero.
        assert_eq!(r.class("Automated").unwrap().precision, None);
    }
}
