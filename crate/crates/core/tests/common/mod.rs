//! Test-only oracles and generators. Nothing here calls into the evaluator
//! or parser code under test.

#![allow(dead_code, clippy::needless_range_loop)]

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, HashMap};
use text2proc::ir::{
    AliasEntry, AliasMap, DeclareConstraint, DeclareModel, EntityKind, GoldAnnotation, GoldEntity, GoldRelation,
    GraphBuilder, NodeId, NodeKind, ProcessGraph, RelationType, TaskClass, TaskClassification, Template,
};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const VERBS: [&str; 8] = ["check", "send", "approve", "register", "archive", "review", "pay", "ship"];
const OBJECTS: [&str; 8] = ["invoice", "claim", "order", "report", "ticket", "letter", "form", "goods"];

fn activity(rng: &mut ChaCha8Rng) -> String {
    format!("{} {}", VERBS.choose(rng).unwrap(), OBJECTS.choose(rng).unwrap())
}

/// A valid graph with at most 30 nodes, distinct task labels, and no node
/// that lacks both a flow and a lane.
pub fn random_graph(rng: &mut ChaCha8Rng) -> ProcessGraph {
    let mut kinds = vec![NodeKind::Task; rng.random_range(2..=20)];
    kinds.extend(std::iter::repeat_n(NodeKind::XorGateway, rng.random_range(0..=3)));
    kinds.extend(std::iter::repeat_n(NodeKind::AndGateway, rng.random_range(0..=3)));
    if rng.random_bool(0.5) {
        kinds.push(NodeKind::StartEvent);
    }
    kinds.extend(std::iter::repeat_n(NodeKind::EndEvent, rng.random_range(0..=2)));
    kinds.shuffle(rng);

    let mut b = GraphBuilder::new();
    let mut nodes: Vec<(NodeId, NodeKind)> = Vec::new();
    for (i, kind) in kinds.iter().enumerate() {
        let id = match kind {
            NodeKind::Task => b.add_task(format!("{} {i}", activity(rng))),
            k => b.add_control(*k),
        };
        nodes.push((id, *kind));
    }

    let sources: Vec<usize> = (0..nodes.len()).filter(|i| nodes[*i].1 != NodeKind::EndEvent).collect();
    let targets: Vec<usize> = (0..nodes.len()).filter(|i| nodes[*i].1 != NodeKind::StartEvent).collect();
    let edge = |b: &mut GraphBuilder, rng: &mut ChaCha8Rng, s: usize, t: usize| {
        let cond = (nodes[s].1 == NodeKind::XorGateway && rng.random_bool(0.7))
            .then(|| format!("case {}", rng.random_range(1..=4)));
        b.add_edge(&nodes[s].0, &nodes[t].0, cond);
    };

    for i in 0..nodes.len() {
        match nodes[i].1 {
            NodeKind::StartEvent => {
                let t = *targets.choose(rng).unwrap();
                edge(&mut b, rng, i, t);
            }
            _ => {
                let s = *sources.choose(rng).unwrap();
                edge(&mut b, rng, s, i);
            }
        }
    }
    for _ in 0..rng.random_range(0..nodes.len()) {
        let s = *sources.choose(rng).unwrap();
        let t = *targets.choose(rng).unwrap();
        edge(&mut b, rng, s, t);
    }

    let actors = ["clerk", "manager", "crm system", "warehouse"];
    let n_lanes = rng.random_range(0..=3);
    for (i, (id, kind)) in nodes.iter().enumerate() {
        if *kind == NodeKind::Task && n_lanes > 0 && rng.random_bool(0.6) {
            b.add_to_lane(actors[i % n_lanes], id);
        }
    }
    if n_lanes > 0 && rng.random_bool(0.2) {
        b.ensure_lane("idle team");
    }
    b.build()
}

type Signature = (NodeKind, Option<String>);

fn signature(g: &ProcessGraph, id: &NodeId) -> Signature {
    let n = g.node(id).unwrap();
    let label = match n.kind {
        NodeKind::Task => n.label.clone(),
        _ => None,
    };
    (n.kind, label)
}

/// Structural isomorphism: node kinds, task labels, edge conditions and
/// ordered lane membership must agree; ids and gateway/event labels may
/// differ. Plain backtracking over candidate assignments.
pub fn isomorphic(a: &ProcessGraph, b: &ProcessGraph) -> bool {
    if a.nodes().len() != b.nodes().len() || a.edges().len() != b.edges().len() {
        return false;
    }
    let a_ids: Vec<NodeId> = a.nodes().iter().map(|n| n.id.clone()).collect();
    let b_ids: Vec<NodeId> = b.nodes().iter().map(|n| n.id.clone()).collect();
    let mut candidates: Vec<Vec<usize>> = a_ids
        .iter()
        .map(|x| {
            (0..b_ids.len())
                .filter(|j| signature(a, x) == signature(b, &b_ids[*j]))
                .collect()
        })
        .collect();
    let mut order: Vec<usize> = (0..a_ids.len()).collect();
    order.sort_by_key(|i| candidates[*i].len());
    for c in &mut candidates {
        c.sort();
    }

    let mut b_edges: HashMap<(usize, usize, Option<String>), usize> = HashMap::new();
    let b_index: HashMap<&NodeId, usize> = b_ids.iter().enumerate().map(|(i, x)| (x, i)).collect();
    for e in b.edges() {
        *b_edges
            .entry((b_index[&e.source], b_index[&e.target], e.condition.clone()))
            .or_default() += 1;
    }
    let a_index: HashMap<&NodeId, usize> = a_ids.iter().enumerate().map(|(i, x)| (x, i)).collect();

    let check = |assign: &[usize]| -> bool {
        let mut left = b_edges.clone();
        for e in a.edges() {
            let key = (assign[a_index[&e.source]], assign[a_index[&e.target]], e.condition.clone());
            match left.get_mut(&key) {
                Some(n) if *n > 0 => *n -= 1,
                _ => return false,
            }
        }
        let lanes_a: BTreeMap<&String, Vec<usize>> = a
            .lanes()
            .iter()
            .map(|(k, v)| (k, v.iter().map(|x| assign[a_index[x]]).collect()))
            .collect();
        let lanes_b: BTreeMap<&String, Vec<usize>> = b
            .lanes()
            .iter()
            .map(|(k, v)| (k, v.iter().map(|x| b_index[x]).collect()))
            .collect();
        lanes_a == lanes_b
    };

    fn search(
        k: usize,
        order: &[usize],
        candidates: &[Vec<usize>],
        assign: &mut Vec<usize>,
        used: &mut Vec<bool>,
        check: &dyn Fn(&[usize]) -> bool,
    ) -> bool {
        if k == order.len() {
            return check(assign);
        }
        let i = order[k];
        for &j in &candidates[i] {
            if used[j] {
                continue;
            }
            used[j] = true;
            assign[i] = j;
            if search(k + 1, order, candidates, assign, used, check) {
                return true;
            }
            used[j] = false;
        }
        false
    }

    let mut assign = vec![usize::MAX; a_ids.len()];
    let mut used = vec![false; b_ids.len()];
    search(0, &order, &candidates, &mut assign, &mut used, &check)
}

/// Maximum bipartite matching by exhaustive search over subsets of the
/// right side (right side must be small).
pub fn max_matching(left: usize, right: usize, ok: impl Fn(usize, usize) -> bool) -> usize {
    assert!(right <= 16, "oracle only handles small instances");
    let mut best = vec![None::<usize>; 1 << right];
    best[0] = Some(0);
    for i in 0..left {
        let mut next = best.clone();
        for mask in 0..(1usize << right) {
            let Some(v) = best[mask] else { continue };
            for j in 0..right {
                if mask & (1 << j) == 0 && ok(i, j) {
                    let m = mask | (1 << j);
                    if next[m].is_none_or(|x| x < v + 1) {
                        next[m] = Some(v + 1);
                    }
                }
            }
        }
        best = next;
    }
    best.into_iter().flatten().max().unwrap_or(0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Counts {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
}

pub fn prf(c: Counts) -> (Option<f64>, Option<f64>, Option<f64>) {
    let p = if c.tp + c.fp == 0 { None } else { Some(c.tp as f64 / (c.tp + c.fp) as f64) };
    let r = if c.tp + c.fn_ == 0 { None } else { Some(c.tp as f64 / (c.tp + c.fn_) as f64) };
    let f = match (p, r) {
        (Some(p), Some(r)) if p + r > 0.0 => Some(2.0 * p * r / (p + r)),
        (Some(_), Some(_)) => Some(0.0),
        _ => None,
    };
    (p, r, f)
}

pub fn close(a: Option<f64>, b: Option<f64>, tol: f64) -> bool {
    match (a, b) {
        (None, None) => true,
        (Some(x), Some(y)) => (x - y).abs() <= tol,
        _ => false,
    }
}

/// Per-template counts by exhaustive matching, sentence by sentence.
pub fn ltl_oracle(pred: &DeclareModel, gold: &DeclareModel) -> BTreeMap<Template, Counts> {
    let mut out: BTreeMap<Template, Counts> = Template::ALL.iter().map(|t| (*t, Counts::default())).collect();
    for sid in gold.sentences() {
        for t in Template::ALL {
            let p: Vec<&DeclareConstraint> = pred.constraints_for(sid).filter(|c| c.template() == t).collect();
            let g: Vec<&DeclareConstraint> = gold.constraints_for(sid).filter(|c| c.template() == t).collect();
            let tp = max_matching(p.len(), g.len(), |i, j| {
                p[i].activity_a() == g[j].activity_a() && p[i].activity_b() == g[j].activity_b()
            }) as u64;
            let c = out.get_mut(&t).unwrap();
            c.tp += tp;
            c.fp += p.len() as u64 - tp;
            c.fn_ += g.len() as u64 - tp;
        }
    }
    out
}

fn canon(s: &str) -> String {
    let lower = s.to_lowercase();
    let words: Vec<&str> = lower.split_whitespace().collect();
    words.join(" ").trim_end_matches(['.', ',', ';', ':', '!', '?']).trim_end().to_string()
}

/// Per-class counts by exhaustive matching on canonical task text.
pub fn rpa_oracle(pred: &[TaskClassification], gold: &[TaskClassification]) -> BTreeMap<TaskClass, Counts> {
    let mut out = BTreeMap::new();
    for class in TaskClass::ALL {
        let p: Vec<String> = pred.iter().filter(|t| t.label == class).map(|t| canon(&t.task)).collect();
        let g: Vec<String> = gold.iter().filter(|t| t.label == class).map(|t| canon(&t.task)).collect();
        let tp = max_matching(p.len(), g.len(), |i, j| p[i] == g[j]) as u64;
        out.insert(
            class,
            Counts {
                tp,
                fp: p.len() as u64 - tp,
                fn_: g.len() as u64 - tp,
            },
        );
    }
    out
}

/// Support-weighted average over classes with a defined value.
pub fn weighted_by_hand(values: &[(Option<f64>, u64)]) -> Option<f64> {
    let mut num = 0.0;
    let mut den = 0u64;
    for (v, w) in values {
        if let Some(v) = v {
            num += v * *w as f64;
            den += w;
        }
    }
    if den == 0 {
        None
    } else {
        Some(num / den as f64)
    }
}

fn node_entity_kind(k: NodeKind) -> EntityKind {
    match k {
        NodeKind::Task => EntityKind::Task,
        NodeKind::XorGateway | NodeKind::AndGateway => EntityKind::Gateway,
        NodeKind::StartEvent | NodeKind::EndEvent => EntityKind::Event,
    }
}

/// Recalled gold relations by direct enumeration of every predicted edge,
/// node and lane.
pub fn bpmn_oracle(pred: &ProcessGraph, gold: &GoldAnnotation, aliases: &AliasMap, strict: bool) -> (u64, u64) {
    let stands_for = |label: &str, kind: EntityKind, entity: &str| -> bool {
        let e = gold.entities.iter().find(|e| e.id == entity).unwrap();
        if e.kind != kind {
            return false;
        }
        if canon(&e.label) == canon(label) {
            return true;
        }
        aliases
            .entries()
            .iter()
            .any(|a| canon(&a.predicted) == canon(label) && a.gold.iter().any(|g| g == entity))
    };
    let node_is = |id: &NodeId, entity: &str| -> bool {
        let n = pred.node(id).unwrap();
        n.label.as_deref().is_some_and(|l| stands_for(l, node_entity_kind(n.kind), entity))
    };
    let (mut hit, mut miss) = (0, 0);
    for r in &gold.relations {
        let ok = match r.relation_type {
            RelationType::Flow => {
                let need = if strict { r.condition.as_deref().map(canon) } else { None };
                let mut found = false;
                for e in pred.edges() {
                    let cond_ok = match &need {
                        None => true,
                        Some(c) => e.condition.as_deref().map(canon).as_deref() == Some(c.as_str()),
                    };
                    if cond_ok && node_is(&e.source, &r.source) && node_is(&e.target, &r.target) {
                        found = true;
                    }
                }
                if need.is_none() {
                    for n in pred.nodes() {
                        if node_is(&n.id, &r.source) && node_is(&n.id, &r.target) {
                            found = true;
                        }
                    }
                }
                found
            }
            RelationType::ActorPerformer => {
                let mut found = false;
                for (actor, members) in pred.lanes() {
                    if stands_for(actor, EntityKind::Actor, &r.source) {
                        for m in members {
                            if node_is(m, &r.target) {
                                found = true;
                            }
                        }
                    }
                }
                found
            }
        };
        if ok {
            hit += 1;
        } else {
            miss += 1;
        }
    }
    (hit, miss)
}

const ACTIVITIES: [&str; 5] = ["a", "b", "c", "d", "e"];

pub fn random_constraint(rng: &mut ChaCha8Rng) -> DeclareConstraint {
    let t = *Template::ALL.choose(rng).unwrap();
    let a = ACTIVITIES.choose(rng).unwrap();
    if t.is_binary() {
        DeclareConstraint::binary(t, a, ACTIVITIES.choose(rng).unwrap()).unwrap()
    } else {
        DeclareConstraint::unary(t, a).unwrap()
    }
}

/// Gold and predicted models over up to 10 sentences. Predictions are gold
/// constraints, some with the template swapped, plus noise; some predicted
/// sentences are left empty.
pub fn random_ltl_pair(rng: &mut ChaCha8Rng) -> (DeclareModel, DeclareModel) {
    let mut gold = DeclareModel::new();
    let mut pred = DeclareModel::new();
    for s in 0..rng.random_range(1..=10) {
        let sid = format!("s{s}");
        gold.declare_sentence(&sid);
        let skip = rng.random_bool(0.1);
        if !skip {
            pred.declare_sentence(&sid);
        }
        for _ in 0..rng.random_range(0..=3) {
            let c = random_constraint(rng);
            gold.push(&sid, c.clone());
            if skip {
                continue;
            }
            match rng.random_range(0..4) {
                0 => {}
                1 => {
                    let same: Vec<Template> = Template::ALL.into_iter().filter(|t| t.arity() == c.template().arity()).collect();
                    let t = *same.choose(rng).unwrap();
                    pred.push(&sid, DeclareConstraint::new(t, c.activity_a(), c.activity_b()).unwrap());
                }
                _ => {
                    pred.push(&sid, c);
                }
            }
        }
        if !skip && rng.random_bool(0.3) {
            pred.push(&sid, random_constraint(rng));
        }
    }
    (pred, gold)
}

pub fn random_rpa_pair(rng: &mut ChaCha8Rng) -> (Vec<TaskClassification>, Vec<TaskClassification>) {
    let n = rng.random_range(1..=10);
    let mut gold = Vec::new();
    let mut pred = Vec::new();
    for _ in 0..n {
        let task = format!("{} {}", VERBS.choose(rng).unwrap(), OBJECTS[..3].choose(rng).unwrap());
        let label = *TaskClass::ALL.choose(rng).unwrap();
        gold.push(TaskClassification::new(&task, None, label).unwrap());
        match rng.random_range(0..5) {
            0 => {}
            1 => pred.push(TaskClassification::new(&task, None, *TaskClass::ALL.choose(rng).unwrap()).unwrap()),
            2 => pred.push(TaskClassification::new(&format!("{} ", task.to_uppercase()), None, label).unwrap()),
            _ => pred.push(TaskClassification::new(&task, Some("someone"), label).unwrap()),
        }
    }
    if rng.random_bool(0.3) {
        pred.push(TaskClassification::new("unrelated step", None, *TaskClass::ALL.choose(rng).unwrap()).unwrap());
    }
    pred.shuffle(rng);
    (pred, gold)
}

/// A gold annotation with up to 15 relations over a handful of entities,
/// a prediction that recovers part of it, and an alias map for some
/// reworded labels.
pub fn random_bpmn_instance(rng: &mut ChaCha8Rng) -> (ProcessGraph, GoldAnnotation, AliasMap) {
    let n_tasks = rng.random_range(2..=6);
    let mut entities = Vec::new();
    for i in 0..n_tasks {
        entities.push(GoldEntity {
            id: format!("t{i}"),
            kind: EntityKind::Task,
            label: format!("{} {i}", activity(rng)),
        });
    }
    entities.push(GoldEntity {
        id: "g0".into(),
        kind: EntityKind::Gateway,
        label: "XOR1".into(),
    });
    for (i, name) in ["clerk", "manager"].iter().enumerate() {
        entities.push(GoldEntity {
            id: format!("a{i}"),
            kind: EntityKind::Actor,
            label: name.to_string(),
        });
    }
    let flow_nodes: Vec<String> = (0..n_tasks).map(|i| format!("t{i}")).chain(["g0".to_string()]).collect();
    let mut relations = Vec::new();
    for _ in 0..rng.random_range(1..=15) {
        if rng.random_bool(0.7) {
            let s = flow_nodes.choose(rng).unwrap().clone();
            let t = flow_nodes.choose(rng).unwrap().clone();
            let condition = (s == "g0" && rng.random_bool(0.5)).then(|| format!("case {}", rng.random_range(1..=2)));
            relations.push(GoldRelation {
                relation_type: RelationType::Flow,
                source: s,
                target: t,
                condition,
            });
        } else {
            relations.push(GoldRelation {
                relation_type: RelationType::ActorPerformer,
                source: format!("a{}", rng.random_range(0..2)),
                target: format!("t{}", rng.random_range(0..n_tasks)),
                condition: None,
            });
        }
    }
    let gold = GoldAnnotation {
        text_id: "rnd".into(),
        entities,
        relations,
    };

    // Prediction: some gold labels verbatim, some reworded (covered by the
    // alias map), some merged, then edges and lanes sampled from gold.
    let mut b = GraphBuilder::new();
    let mut alias = Vec::new();
    let mut node_of: HashMap<String, NodeId> = HashMap::new();
    let mut i = 0;
    while i < n_tasks {
        let e = &gold.entities[i];
        match rng.random_range(0..5) {
            0 => {}
            1 => {
                let label = format!("reworded {i}");
                let id = b.add_task(&label);
                alias.push(AliasEntry {
                    predicted: label,
                    gold: vec![e.id.clone()],
                });
                node_of.insert(e.id.clone(), id);
            }
            2 if i + 1 < n_tasks => {
                let label = format!("merged {i}");
                let id = b.add_task(&label);
                alias.push(AliasEntry {
                    predicted: label,
                    gold: vec![e.id.clone(), format!("t{}", i + 1)],
                });
                node_of.insert(e.id.clone(), id.clone());
                node_of.insert(format!("t{}", i + 1), id);
                i += 1;
            }
            _ => {
                let id = b.add_task(e.label.to_uppercase());
                node_of.insert(e.id.clone(), id);
            }
        }
        i += 1;
    }
    if rng.random_bool(0.7) {
        let id = b.add_control(NodeKind::XorGateway);
        node_of.insert("g0".into(), id);
    }
    for r in &gold.relations {
        if !rng.random_bool(0.6) {
            continue;
        }
        match r.relation_type {
            RelationType::Flow => {
                if let (Some(s), Some(t)) = (node_of.get(&r.source), node_of.get(&r.target)) {
                    let src_is_xor = b.node_kind(s) == Some(NodeKind::XorGateway);
                    let cond = if src_is_xor {
                        match rng.random_range(0..3) {
                            0 => None,
                            1 => Some(format!("case {}", rng.random_range(1..=2))),
                            _ => r.condition.clone(),
                        }
                    } else {
                        None
                    };
                    b.add_edge(s, t, cond);
                }
            }
            RelationType::ActorPerformer => {
                if let Some(t) = node_of.get(&r.target) {
                    let actor = if r.source == "a0" { "Clerk" } else { "manager" };
                    b.add_to_lane(actor, t);
                }
            }
        }
    }
    (b.build(), gold, AliasMap::new(alias))
}
