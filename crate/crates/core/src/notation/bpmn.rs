//! Line grammar for imperative process models.
//!
//! ```text
//! flow      := ref ( "->" ref )+
//! ref       := gateway [ "(" condition ")" ] | event | task-label
//! gateway   := ("XOR" | "AND") [digits]
//! event     := ("START" | "END") [digits]
//! lane      := actor ":" "[" task-label ( "," task-label )* "]"
//! ```
//!
//! A numbered gateway (`XOR2`) always denotes the same node. A bare gateway
//! on the right of an arrow opens a new gateway; on the left it continues
//! the most recently mentioned gateway of that kind. Bare `START` and `END`
//! each denote one shared event. Repeated task labels denote one node.

use super::lines::{source_lines, strip_list_marker};
use super::report::{LineLog, ParseReport, RejectReason};
use super::NotationError;
use crate::ir::{canonicalize_label, validate_graph, GraphBuilder, NodeId, NodeKind, ProcessGraph, Violation};
use std::collections::{BTreeMap, HashMap, HashSet};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum SerializeError {
    #[error("graph violates {} rule(s): {}", .0.len(), join_violations(.0))]
    InvalidGraph(Vec<Violation>),
    #[error("`{element}` cannot be written in the line notation: {reason}")]
    Unrepresentable { element: String, reason: String },
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Ref {
    Control {
        kind: NodeKind,
        number: Option<u32>,
        condition: Option<String>,
    },
    Task(String),
}

fn parse_ref(segment: &str) -> Ref {
    let lower = segment.trim().to_lowercase();
    for (prefix, kind) in [
        ("xor", NodeKind::XorGateway),
        ("and", NodeKind::AndGateway),
        ("start", NodeKind::StartEvent),
        ("end", NodeKind::EndEvent),
    ] {
        let Some(rest) = lower.strip_prefix(prefix) else {
            continue;
        };
        let digits = rest.len() - rest.trim_start_matches(|c: char| c.is_ascii_digit()).len();
        let number = if digits > 0 {
            match rest[..digits].parse() {
                Ok(n) => Some(n),
                Err(_) => continue,
            }
        } else {
            None
        };
        let tail = rest[digits..].trim();
        if tail.is_empty() {
            return Ref::Control {
                kind,
                number,
                condition: None,
            };
        }
        if kind.is_gateway() && tail.starts_with('(') && tail.ends_with(')') {
            let condition = canonicalize_label(&tail[1..tail.len() - 1]);
            return Ref::Control {
                kind,
                number,
                condition: (!condition.is_empty()).then_some(condition),
            };
        }
    }
    Ref::Task(canonicalize_label(segment))
}

fn control_key(kind: NodeKind, number: Option<u32>) -> String {
    let prefix = match kind {
        NodeKind::XorGateway => "XOR",
        NodeKind::AndGateway => "AND",
        NodeKind::StartEvent => "START",
        NodeKind::EndEvent => "END",
        NodeKind::Task => "TASK",
    };
    match number {
        Some(n) => format!("{prefix}{n}"),
        None => prefix.to_string(),
    }
}

#[derive(Default)]
struct GraphState {
    builder: GraphBuilder,
    tasks: HashMap<String, NodeId>,
    controls: HashMap<String, NodeId>,
    last_gateway: HashMap<NodeKind, NodeId>,
}

impl GraphState {
    fn task(&mut self, label: &str) -> NodeId {
        if let Some(id) = self.tasks.get(label) {
            return id.clone();
        }
        let id = self.builder.add_task(label);
        self.tasks.insert(label.to_string(), id.clone());
        id
    }

    fn named_control(&mut self, kind: NodeKind, key: String) -> NodeId {
        if let Some(id) = self.controls.get(&key) {
            return id.clone();
        }
        let id = self.builder.add_labelled(kind, key.clone());
        self.controls.insert(key, id.clone());
        id
    }

    fn new_gateway(&mut self, kind: NodeKind) -> NodeId {
        let n = (1..)
            .find(|n| !self.controls.contains_key(&control_key(kind, Some(*n))))
            .expect("unbounded range");
        self.named_control(kind, control_key(kind, Some(n)))
    }

    fn resolve(&mut self, r: &Ref, as_source: bool) -> NodeId {
        match r {
            Ref::Task(label) => self.task(label),
            Ref::Control { kind, number, .. } => {
                let id = match (kind.is_gateway(), number) {
                    (_, Some(_)) | (false, None) => self.named_control(*kind, control_key(*kind, *number)),
                    (true, None) if as_source => match self.last_gateway.get(kind) {
                        Some(id) => id.clone(),
                        None => self.new_gateway(*kind),
                    },
                    (true, None) => self.new_gateway(*kind),
                };
                if kind.is_gateway() {
                    self.last_gateway.insert(*kind, id.clone());
                }
                id
            }
        }
    }
}

/// Parse the line notation into a [`ProcessGraph`].
///
/// Rule violations of the resulting graph are reported as warnings rather
/// than errors; the caller decides whether an invalid graph is usable.
pub fn parse_bpmn_notation(text: &str) -> Result<ParseReport<ProcessGraph>, NotationError> {
    let mut log = LineLog::default();
    let mut state = GraphState::default();

    for line in source_lines(text) {
        let (body, had_marker) = strip_list_marker(line.text);
        if had_marker {
            log.warn(line.number, "list marker stripped");
        }
        if body.contains("->") {
            flow_line(&mut state, &mut log, line.number, body);
        } else if let Some((actor, rest)) = body.split_once(':') {
            let rest = rest.trim();
            if rest.starts_with('[') || rest.ends_with(']') {
                if !(rest.starts_with('[') && rest.ends_with(']') && rest.len() >= 2) {
                    return Err(NotationError::MalformedLane {
                        line: line.number,
                        text: line.text.to_string(),
                    });
                }
                lane_line(&mut state, &mut log, line.number, actor, &rest[1..rest.len() - 1], line.text);
            } else {
                log.reject(line.number, RejectReason::NoGrammarMatched, line.text);
            }
        } else {
            log.reject(line.number, RejectReason::NoGrammarMatched, line.text);
        }
    }

    if log.productive() == 0 {
        return Err(NotationError::EmptyInput);
    }
    let graph = state.builder.build();
    for v in validate_graph(&graph) {
        log.global_warning(format!("graph rule violated: {v}"));
    }
    Ok(log.finish(graph))
}

fn flow_line(state: &mut GraphState, log: &mut LineLog, number: usize, body: &str) {
    let refs: Vec<Ref> = body.split("->").map(parse_ref).collect();
    if body.split("->").any(|s| s.trim().is_empty()) {
        log.reject(number, RejectReason::MissingEndpoint, body);
        return;
    }
    if refs.iter().any(|r| matches!(r, Ref::Task(l) if l.is_empty())) {
        log.reject(number, RejectReason::EmptyLabel, body);
        return;
    }

    let ids: Vec<NodeId> = refs
        .iter()
        .enumerate()
        .map(|(i, r)| state.resolve(r, i == 0))
        .collect();

    for (i, pair) in ids.windows(2).enumerate() {
        let condition = match &refs[i] {
            Ref::Control {
                kind: NodeKind::XorGateway,
                condition,
                ..
            } => condition.clone(),
            Ref::Control {
                condition: Some(c), ..
            } => {
                log.warn(number, format!("condition `{c}` on a non-exclusive gateway dropped"));
                None
            }
            _ => None,
        };
        if !state.builder.add_edge(&pair[0], &pair[1], condition) {
            log.warn(number, "duplicate flow ignored");
        }
    }
    if let Some(Ref::Control {
        condition: Some(c), ..
    }) = refs.last()
    {
        log.warn(number, format!("condition `{c}` on a flow target ignored"));
    }
    log.parsed(number);
}

fn lane_line(state: &mut GraphState, log: &mut LineLog, number: usize, actor: &str, items: &str, raw: &str) {
    let actor = canonicalize_label(actor);
    if actor.is_empty() {
        log.reject(number, RejectReason::EmptyLabel, raw);
        return;
    }
    state.builder.ensure_lane(actor.clone());
    for item in items.split(',') {
        let item = item.trim();
        if item.is_empty() {
            if items.trim().is_empty() {
                continue;
            }
            log.warn(number, "empty lane entry skipped");
            continue;
        }
        match parse_ref(item) {
            Ref::Task(label) if !label.is_empty() => {
                let id = state.task(&label);
                if !state.builder.add_to_lane(actor.clone(), &id) {
                    log.warn(number, format!("task `{label}` already assigned to a lane"));
                }
            }
            Ref::Task(_) => log.warn(number, "empty lane entry skipped"),
            Ref::Control { .. } => log.warn(number, format!("lane entry `{item}` is not a task; skipped")),
        }
    }
    log.parsed(number);
}

fn check_label(element: &str, label: &str, what: &str) -> Result<(), SerializeError> {
    let bad = |reason: &str| SerializeError::Unrepresentable {
        element: element.to_string(),
        reason: format!("{what} {reason}"),
    };
    if label.is_empty() {
        return Err(bad("is empty"));
    }
    if label.contains("->") || label.contains(['\n', '[', ']', ',', ':']) {
        return Err(bad("contains a reserved token"));
    }
    Ok(())
}

/// Write a graph in the line notation accepted by [`parse_bpmn_notation`].
///
/// Output is deterministic: flows ordered by source then target id, lanes
/// alphabetical, gateways and events named by id order.
pub fn serialize_bpmn_notation(g: &ProcessGraph) -> Result<String, SerializeError> {
    let violations = validate_graph(g);
    if !violations.is_empty() {
        return Err(SerializeError::InvalidGraph(violations));
    }

    let nodes = g.nodes_by_id();
    let end_count = nodes.iter().filter(|n| n.kind == NodeKind::EndEvent).count();
    let mut counters: HashMap<NodeKind, u32> = HashMap::new();
    let mut names: HashMap<&NodeId, String> = HashMap::new();
    let mut task_names: HashSet<String> = HashSet::new();

    for n in &nodes {
        let name = match n.kind {
            NodeKind::Task => {
                let label = canonicalize_label(n.label.as_deref().unwrap_or_default());
                check_label(n.id.as_str(), &label, "task label")?;
                if !matches!(parse_ref(&label), Ref::Task(_)) {
                    return Err(SerializeError::Unrepresentable {
                        element: n.id.to_string(),
                        reason: format!("task label `{label}` reads as a gateway or event"),
                    });
                }
                if !task_names.insert(label.clone()) {
                    return Err(SerializeError::Unrepresentable {
                        element: n.id.to_string(),
                        reason: format!("task label `{label}` is not unique"),
                    });
                }
                label
            }
            NodeKind::StartEvent => "START".to_string(),
            NodeKind::EndEvent if end_count == 1 => "END".to_string(),
            kind => {
                let c = counters.entry(kind).or_insert(0);
                *c += 1;
                control_key(kind, Some(*c))
            }
        };
        names.insert(&n.id, name);
    }

    let mut touched: HashSet<&NodeId> = HashSet::new();
    let mut edges: Vec<_> = g.edges().iter().collect();
    edges.sort_by(|a, b| {
        a.source
            .cmp(&b.source)
            .then_with(|| a.target.cmp(&b.target))
            .then_with(|| a.condition.cmp(&b.condition))
    });

    let mut out = String::new();
    for e in edges {
        touched.insert(&e.source);
        touched.insert(&e.target);
        let src = &names[&e.source];
        let tgt = &names[&e.target];
        match e.condition.as_deref().map(canonicalize_label) {
            Some(c) => {
                if c.is_empty() || c.contains("->") || c.contains('\n') {
                    return Err(SerializeError::Unrepresentable {
                        element: format!("{}->{}", e.source, e.target),
                        reason: format!("condition `{c}` is empty or contains a reserved token"),
                    });
                }
                out.push_str(&format!("{src} ({c}) -> {tgt}\n"));
            }
            None => out.push_str(&format!("{src} -> {tgt}\n")),
        }
    }

    let mut lanes: BTreeMap<String, &Vec<NodeId>> = BTreeMap::new();
    for (actor, ids) in g.lanes() {
        let name = canonicalize_label(actor);
        check_label(actor, &name, "lane name")?;
        if lanes.insert(name.clone(), ids).is_some() {
            return Err(SerializeError::Unrepresentable {
                element: actor.clone(),
                reason: format!("lane name `{name}` is not unique"),
            });
        }
        touched.extend(ids.iter());
    }
    for (name, ids) in &lanes {
        let entries: Vec<&str> = ids.iter().map(|id| names[id].as_str()).collect();
        out.push_str(&format!("{name}: [{}]\n", entries.join(", ")));
    }

    if let Some(n) = nodes.iter().find(|n| !touched.contains(&n.id)) {
        return Err(SerializeError::Unrepresentable {
            element: n.id.to_string(),
            reason: "isolated node with no flow and no lane".into(),
        });
    }
    Ok(out)
}
