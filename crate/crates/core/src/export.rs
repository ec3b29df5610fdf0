//! Compile IR values to artifact files: BPMN 2.0 XML, Declare constraint
//! lists and LTL formula text.

use crate::ir::{validate_graph, DeclareConstraint, DeclareModel, NodeId, NodeKind, ProcessGraph, Template, Violation};
use std::collections::{BTreeMap, HashSet};
use std::fmt::Write;

pub const BPMN_MODEL_NS: &str = "http://www.omg.org/spec/BPMN/20100524/MODEL";
pub const XSI_NS: &str = "http://www.w3.org/2001/XMLSchema-instance";

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum ExportError {
    #[error("graph violates {} rule(s), first: {}", .0.len(), .0[0])]
    InvalidGraph(Vec<Violation>),
    #[error("node id `{0}` is not a valid XML identifier")]
    InvalidId(String),
}

fn is_ncname(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

struct Ids {
    taken: HashSet<String>,
}

impl Ids {
    fn fresh(&mut self, prefix: &str) -> String {
        let id = (1..)
            .map(|k| format!("{prefix}_{k}"))
            .find(|id| !self.taken.contains(id))
            .expect("unbounded range");
        self.taken.insert(id.clone());
        id
    }
}

struct Flow {
    id: String,
    source: String,
    target: String,
    condition: Option<String>,
}

struct Element {
    id: String,
    tag: &'static str,
    name: Option<String>,
}

fn tag(kind: NodeKind) -> &'static str {
    match kind {
        NodeKind::Task => "task",
        NodeKind::XorGateway => "exclusiveGateway",
        NodeKind::AndGateway => "parallelGateway",
        NodeKind::StartEvent => "startEvent",
        NodeKind::EndEvent => "endEvent",
    }
}

/// BPMN 2.0 semantic model with one process. No diagram interchange is
/// emitted. When the graph has no start (end) event, one is synthesized and
/// connected to every task without incoming (outgoing) flow.
pub fn to_bpmn_xml(g: &ProcessGraph) -> Result<String, ExportError> {
    let violations = validate_graph(g);
    if !violations.is_empty() {
        return Err(ExportError::InvalidGraph(violations));
    }
    let nodes = g.nodes_by_id();
    if let Some(n) = nodes.iter().find(|n| !is_ncname(n.id.as_str())) {
        return Err(ExportError::InvalidId(n.id.to_string()));
    }

    let mut ids = Ids {
        taken: nodes.iter().map(|n| n.id.to_string()).collect(),
    };
    let definitions_id = ids.fresh("Definitions");
    let process_id = ids.fresh("Process");

    let has = |kind| nodes.iter().any(|n| n.kind == kind);
    let heads: Vec<&NodeId> = nodes
        .iter()
        .filter(|n| n.kind == NodeKind::Task && g.in_degree(&n.id) == 0)
        .map(|n| &n.id)
        .collect();
    let tails: Vec<&NodeId> = nodes
        .iter()
        .filter(|n| n.kind == NodeKind::Task && g.out_degree(&n.id) == 0)
        .map(|n| &n.id)
        .collect();
    let start = (!has(NodeKind::StartEvent) && !heads.is_empty()).then(|| ids.fresh("StartEvent"));
    let end = (!has(NodeKind::EndEvent) && !tails.is_empty()).then(|| ids.fresh("EndEvent"));

    let mut elements = Vec::new();
    if let Some(s) = &start {
        elements.push(Element {
            id: s.clone(),
            tag: "startEvent",
            name: None,
        });
    }
    for n in &nodes {
        elements.push(Element {
            id: n.id.to_string(),
            tag: tag(n.kind),
            name: n.label.clone(),
        });
    }
    if let Some(e) = &end {
        elements.push(Element {
            id: e.clone(),
            tag: "endEvent",
            name: None,
        });
    }

    let mut edges: Vec<_> = g.edges().iter().collect();
    edges.sort_by(|a, b| {
        a.source
            .cmp(&b.source)
            .then_with(|| a.target.cmp(&b.target))
            .then_with(|| a.condition.cmp(&b.condition))
    });
    let mut pairs: Vec<(String, String, Option<String>)> = Vec::new();
    if let Some(s) = &start {
        pairs.extend(heads.iter().map(|h| (s.clone(), h.to_string(), None)));
    }
    pairs.extend(edges.iter().map(|e| (e.source.to_string(), e.target.to_string(), e.condition.clone())));
    if let Some(e) = &end {
        pairs.extend(tails.iter().map(|t| (t.to_string(), e.clone(), None)));
    }
    let flows: Vec<Flow> = pairs
        .into_iter()
        .map(|(source, target, condition)| Flow {
            id: ids.fresh("Flow"),
            source,
            target,
            condition,
        })
        .collect();

    let mut incoming: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    let mut outgoing: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for f in &flows {
        outgoing.entry(f.source.as_str()).or_default().push(&f.id);
        incoming.entry(f.target.as_str()).or_default().push(&f.id);
    }

    let lane_ids: Vec<String> = g.lanes().keys().map(|_| ids.fresh("Lane")).collect();
    let lane_set_id = ids.fresh("LaneSet");

    let mut x = String::new();
    x.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        x,
        "<bpmn:definitions xmlns:bpmn=\"{BPMN_MODEL_NS}\" xmlns:xsi=\"{XSI_NS}\" id=\"{definitions_id}\" targetNamespace=\"urn:text2proc\">"
    );
    let _ = writeln!(x, "  <bpmn:process id=\"{process_id}\" isExecutable=\"false\">");

    if !g.lanes().is_empty() {
        let _ = writeln!(x, "    <bpmn:laneSet id=\"{lane_set_id}\">");
        for ((actor, members), lane_id) in g.lanes().iter().zip(&lane_ids) {
            if members.is_empty() {
                let _ = writeln!(x, "      <bpmn:lane id=\"{lane_id}\" name=\"{}\" />", escape(actor));
                continue;
            }
            let _ = writeln!(x, "      <bpmn:lane id=\"{lane_id}\" name=\"{}\">", escape(actor));
            for m in members {
                let _ = writeln!(x, "        <bpmn:flowNodeRef>{m}</bpmn:flowNodeRef>");
            }
            x.push_str("      </bpmn:lane>\n");
        }
        x.push_str("    </bpmn:laneSet>\n");
    }

    for el in &elements {
        let name = el
            .name
            .as_deref()
            .map(|n| format!(" name=\"{}\"", escape(n)))
            .unwrap_or_default();
        let ins = incoming.get(el.id.as_str()).map(Vec::as_slice).unwrap_or_default();
        let outs = outgoing.get(el.id.as_str()).map(Vec::as_slice).unwrap_or_default();
        if ins.is_empty() && outs.is_empty() {
            let _ = writeln!(x, "    <bpmn:{} id=\"{}\"{name} />", el.tag, el.id);
            continue;
        }
        let _ = writeln!(x, "    <bpmn:{} id=\"{}\"{name}>", el.tag, el.id);
        for f in ins {
            let _ = writeln!(x, "      <bpmn:incoming>{f}</bpmn:incoming>");
        }
        for f in outs {
            let _ = writeln!(x, "      <bpmn:outgoing>{f}</bpmn:outgoing>");
        }
        let _ = writeln!(x, "    </bpmn:{}>", el.tag);
    }

    for f in &flows {
        match &f.condition {
            None => {
                let _ = writeln!(
                    x,
                    "    <bpmn:sequenceFlow id=\"{}\" sourceRef=\"{}\" targetRef=\"{}\" />",
                    f.id, f.source, f.target
                );
            }
            Some(c) => {
                let c = escape(c);
                let _ = writeln!(
                    x,
                    "    <bpmn:sequenceFlow id=\"{}\" name=\"{c}\" sourceRef=\"{}\" targetRef=\"{}\">",
                    f.id, f.source, f.target
                );
                let _ = writeln!(
                    x,
                    "      <bpmn:conditionExpression xsi:type=\"bpmn:tFormalExpression\">{c}</bpmn:conditionExpression>"
                );
                x.push_str("    </bpmn:sequenceFlow>\n");
            }
        }
    }
    x.push_str("  </bpmn:process>\n</bpmn:definitions>\n");
    Ok(x)
}

/// `Template[A, B]` or `Template[A]`.
pub fn to_declare_line(c: &DeclareConstraint) -> String {
    match c.activity_b() {
        Some(b) => format!("{}[{}, {b}]", c.template(), c.activity_a()),
        None => format!("{}[{}]", c.template(), c.activity_a()),
    }
}

/// One constraint per line, duplicates across sentences dropped, first
/// occurrence order kept. An empty model gives an empty file.
pub fn to_declare_file(m: &DeclareModel) -> String {
    m.distinct_constraints()
        .into_iter()
        .map(|c| to_declare_line(c) + "\n")
        .collect()
}

pub fn to_ltl_formula(c: &DeclareConstraint) -> String {
    let a = c.activity_a();
    let b = c.activity_b().unwrap_or_default();
    match c.template() {
        Template::Precedence => format!("NOT({b}) U {a}"),
        Template::Response => format!("{a} -> F({b})"),
        Template::Succession => format!("(NOT({b}) U {a}) AND ({a} -> F({b}))"),
        Template::Init => format!("START -> {a}"),
        Template::End => format!("END -> {a}"),
    }
}

/// One formula per line. With more than one sentence each line carries a
/// `[sentence-id]` prefix, which `parse_ltl_output` reads back.
pub fn to_ltl_file(m: &DeclareModel) -> String {
    let tagged = m.sentences().len() > 1;
    m.entries()
        .iter()
        .map(|sc| {
            let f = to_ltl_formula(&sc.constraint);
            if tagged {
                format!("[{}] {f}\n", sc.sentence_id)
            } else {
                f + "\n"
            }
        })
        .collect()
}
