use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

/// Opaque node identifier.
///
/// Ordering is "natural": `n2` sorts before `n10`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(String);

impl NodeId {
    pub fn new(id: impl Into<String>) -> Self {
        NodeId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    fn split_numeric_suffix(&self) -> (&str, Option<u64>) {
        let digits = self.0.len() - self.0.trim_end_matches(|c: char| c.is_ascii_digit()).len();
        if digits == 0 || digits > 18 {
            return (&self.0, None);
        }
        let (head, tail) = self.0.split_at(self.0.len() - digits);
        (head, tail.parse().ok())
    }
}

impl Ord for NodeId {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a_head, a_num) = self.split_numeric_suffix();
        let (b_head, b_num) = other.split_numeric_suffix();
        a_head
            .cmp(b_head)
            .then(a_num.cmp(&b_num))
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for NodeId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId(s.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Task,
    XorGateway,
    AndGateway,
    StartEvent,
    EndEvent,
}

impl NodeKind {
    pub fn is_gateway(self) -> bool {
        matches!(self, NodeKind::XorGateway | NodeKind::AndGateway)
    }

    pub fn is_event(self) -> bool {
        matches!(self, NodeKind::StartEvent | NodeKind::EndEvent)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    pub kind: NodeKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub source: NodeId,
    pub target: NodeId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub condition: Option<String>,
}

impl Edge {
    fn describe(&self) -> String {
        format!("{}->{}", self.source, self.target)
    }
}

/// Imperative process model: tasks, gateways and events joined by sequence
/// flows, plus an actor-to-task lane assignment.
///
/// Construction does not validate; run [`validate_graph`] to check the
/// structural rules.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "GraphParts", into = "GraphParts")]
pub struct ProcessGraph {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    lanes: BTreeMap<String, Vec<NodeId>>,
    index: HashMap<NodeId, usize>,
}

#[derive(Serialize, Deserialize)]
struct GraphParts {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    #[serde(default)]
    lanes: BTreeMap<String, Vec<NodeId>>,
}

impl From<GraphParts> for ProcessGraph {
    fn from(p: GraphParts) -> Self {
        ProcessGraph::new(p.nodes, p.edges, p.lanes)
    }
}

impl From<ProcessGraph> for GraphParts {
    fn from(g: ProcessGraph) -> Self {
        GraphParts {
            nodes: g.nodes,
            edges: g.edges,
            lanes: g.lanes,
        }
    }
}

impl Default for ProcessGraph {
    fn default() -> Self {
        ProcessGraph::new(Vec::new(), Vec::new(), BTreeMap::new())
    }
}

impl ProcessGraph {
    pub fn new(nodes: Vec<Node>, edges: Vec<Edge>, lanes: BTreeMap<String, Vec<NodeId>>) -> Self {
        let mut index = HashMap::with_capacity(nodes.len());
        for (i, n) in nodes.iter().enumerate() {
            index.entry(n.id.clone()).or_insert(i);
        }
        ProcessGraph {
            nodes,
            edges,
            lanes,
            index,
        }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn lanes(&self) -> &BTreeMap<String, Vec<NodeId>> {
        &self.lanes
    }

    pub fn node(&self, id: &NodeId) -> Option<&Node> {
        self.index.get(id).map(|&i| &self.nodes[i])
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes sorted by id.
    pub fn nodes_by_id(&self) -> Vec<&Node> {
        let mut v: Vec<&Node> = self.nodes.iter().collect();
        v.sort_by(|a, b| a.id.cmp(&b.id));
        v
    }

    pub fn in_degree(&self, id: &NodeId) -> usize {
        self.edges.iter().filter(|e| &e.target == id).count()
    }

    pub fn out_degree(&self, id: &NodeId) -> usize {
        self.edges.iter().filter(|e| &e.source == id).count()
    }

    pub fn lane_of(&self, id: &NodeId) -> Option<&str> {
        self.lanes
            .iter()
            .find(|(_, ids)| ids.contains(id))
            .map(|(name, _)| name.as_str())
    }
}

/// Incremental construction with synthetic ids (`n1`, `n2`, ...) and
/// synthetic gateway/event labels (`XOR1`, `AND1`, `START1`, `END1`, ...)
/// assigned in encounter order.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    edge_set: HashSet<Edge>,
    lanes: BTreeMap<String, Vec<NodeId>>,
    next_id: usize,
    kind_counts: HashMap<NodeKind, usize>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    fn fresh_id(&mut self) -> NodeId {
        self.next_id += 1;
        NodeId(format!("n{}", self.next_id))
    }

    pub fn add_task(&mut self, label: impl Into<String>) -> NodeId {
        let id = self.fresh_id();
        self.nodes.push(Node {
            id: id.clone(),
            kind: NodeKind::Task,
            label: Some(label.into()),
        });
        id
    }

    /// Add a gateway or event with the next synthetic label for its kind.
    pub fn add_control(&mut self, kind: NodeKind) -> NodeId {
        let count = self.kind_counts.entry(kind).or_insert(0);
        *count += 1;
        let label = format!("{}{}", synthetic_prefix(kind), count);
        self.add_labelled(kind, label)
    }

    /// Add a node of any kind with an explicit label.
    pub fn add_labelled(&mut self, kind: NodeKind, label: impl Into<String>) -> NodeId {
        let id = self.fresh_id();
        self.nodes.push(Node {
            id: id.clone(),
            kind,
            label: Some(label.into()),
        });
        id
    }

    /// Returns false when an identical edge already exists.
    pub fn add_edge(&mut self, source: &NodeId, target: &NodeId, condition: Option<String>) -> bool {
        let edge = Edge {
            source: source.clone(),
            target: target.clone(),
            condition,
        };
        if !self.edge_set.insert(edge.clone()) {
            return false;
        }
        self.edges.push(edge);
        true
    }

    pub fn ensure_lane(&mut self, actor: impl Into<String>) {
        self.lanes.entry(actor.into()).or_default();
    }

    /// Returns false when the node is already in some lane.
    pub fn add_to_lane(&mut self, actor: impl Into<String>, id: &NodeId) -> bool {
        if self.lanes.values().any(|ids| ids.contains(id)) {
            return false;
        }
        self.lanes.entry(actor.into()).or_default().push(id.clone());
        true
    }

    pub fn node_kind(&self, id: &NodeId) -> Option<NodeKind> {
        self.nodes.iter().find(|n| &n.id == id).map(|n| n.kind)
    }

    pub fn build(self) -> ProcessGraph {
        ProcessGraph::new(self.nodes, self.edges, self.lanes)
    }
}

pub(crate) fn synthetic_prefix(kind: NodeKind) -> &'static str {
    match kind {
        NodeKind::Task => "TASK",
        NodeKind::XorGateway => "XOR",
        NodeKind::AndGateway => "AND",
        NodeKind::StartEvent => "START",
        NodeKind::EndEvent => "END",
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    DuplicateId,
    EmptyTaskLabel,
    DanglingSource,
    DanglingTarget,
    ConditionOnNonXor,
    StartHasIncoming,
    EndHasOutgoing,
    MultipleStartEvents,
    LaneUnknownNode,
    LaneNonTask,
    TaskInMultipleLanes,
}

impl Rule {
    pub fn as_str(self) -> &'static str {
        match self {
            Rule::DuplicateId => "duplicate-id",
            Rule::EmptyTaskLabel => "empty-task-label",
            Rule::DanglingSource => "dangling-source",
            Rule::DanglingTarget => "dangling-target",
            Rule::ConditionOnNonXor => "condition-on-non-xor",
            Rule::StartHasIncoming => "start-has-incoming",
            Rule::EndHasOutgoing => "end-has-outgoing",
            Rule::MultipleStartEvents => "multiple-start-events",
            Rule::LaneUnknownNode => "lane-unknown-node",
            Rule::LaneNonTask => "lane-non-task",
            Rule::TaskInMultipleLanes => "task-in-multiple-lanes",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One broken rule and the element (node id, or `source->target` for edges)
/// that breaks it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Violation {
    pub rule: Rule,
    pub element: String,
}

impl Violation {
    fn new(rule: Rule, element: impl Into<String>) -> Self {
        Violation {
            rule,
            element: element.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.rule, self.element)
    }
}

/// Check every structural rule of a [`ProcessGraph`]. An empty result means
/// the graph is well-formed.
pub fn validate_graph(g: &ProcessGraph) -> Vec<Violation> {
    let mut out = Vec::new();

    let mut seen = HashSet::new();
    for n in &g.nodes {
        if !seen.insert(&n.id) {
            out.push(Violation::new(Rule::DuplicateId, n.id.as_str()));
        }
        if n.kind == NodeKind::Task
            && n.label.as_deref().map(super::canonicalize_label).unwrap_or_default().is_empty()
        {
            out.push(Violation::new(Rule::EmptyTaskLabel, n.id.as_str()));
        }
    }

    let starts: Vec<&Node> = g.nodes.iter().filter(|n| n.kind == NodeKind::StartEvent).collect();
    for extra in starts.iter().skip(1) {
        out.push(Violation::new(Rule::MultipleStartEvents, extra.id.as_str()));
    }

    for e in &g.edges {
        let source = g.node(&e.source);
        let target = g.node(&e.target);
        if source.is_none() {
            out.push(Violation::new(Rule::DanglingSource, e.source.as_str()));
        }
        if target.is_none() {
            out.push(Violation::new(Rule::DanglingTarget, e.target.as_str()));
        }
        if let Some(src) = source {
            if e.condition.is_some() && src.kind != NodeKind::XorGateway {
                out.push(Violation::new(Rule::ConditionOnNonXor, e.describe()));
            }
            if src.kind == NodeKind::EndEvent {
                out.push(Violation::new(Rule::EndHasOutgoing, src.id.as_str()));
            }
        }
        if let Some(tgt) = target {
            if tgt.kind == NodeKind::StartEvent {
                out.push(Violation::new(Rule::StartHasIncoming, tgt.id.as_str()));
            }
        }
    }

    let mut laned: HashSet<&NodeId> = HashSet::new();
    for ids in g.lanes.values() {
        for id in ids {
            match g.node(id) {
                None => out.push(Violation::new(Rule::LaneUnknownNode, id.as_str())),
                Some(n) if n.kind != NodeKind::Task => {
                    out.push(Violation::new(Rule::LaneNonTask, id.as_str()))
                }
                Some(_) => {
                    if !laned.insert(id) {
                        out.push(Violation::new(Rule::TaskInMultipleLanes, id.as_str()));
                    }
                }
            }
        }
    }

    out.sort_by(|a, b| a.rule.cmp(&b.rule).then_with(|| a.element.cmp(&b.element)));
    out.dedup();
    out
}
