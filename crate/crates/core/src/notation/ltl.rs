//! One LTL constraint per line.
//!
//! ```text
//! line     := [ "[" sentence-id "]" ] [ template ":" ] formula [ "|" template ]
//! formula  := "NOT(" B ")" " U " A                      precedence
//!           | A " -> " ( "F(" B ")" | B )                response
//!           | "START -> " A | "END -> " A                init, end
//!           | "(" precedence ") AND (" response ")"     succession
//! ```
//!
//! A `G(...)` wrapper and redundant outer parentheses are accepted. When the
//! template label and the formula disagree, the formula wins.

use super::lines::{matching_paren, source_lines, split_top_level, strip_list_marker, strip_outer_parens};
use super::report::{LineLog, ParseReport, RejectReason};
use super::NotationError;
use crate::ir::{canonicalize_label, DeclareConstraint, DeclareModel, IrError, Template};

/// Parse model output for the declarative task. Lines without a `[id]`
/// prefix belong to `sentence_id`.
pub fn parse_ltl_output(text: &str, sentence_id: &str) -> Result<ParseReport<DeclareModel>, NotationError> {
    if text.trim().is_empty() {
        return Err(NotationError::EmptyInput);
    }
    let mut log = LineLog::default();
    let mut model = DeclareModel::new();
    model.declare_sentence(sentence_id);

    for line in source_lines(text) {
        let (body, had_marker) = strip_list_marker(line.text);
        if had_marker {
            log.warn(line.number, "list marker stripped");
        }
        let (sid, body) = split_sentence_id(body);
        let sid = sid.unwrap_or(sentence_id);
        let (label, formula) = split_template_label(body);

        match parse_formula(formula) {
            Ok(c) => {
                if let Some(t) = label {
                    if t != c.template() {
                        log.warn(
                            line.number,
                            format!("label {t} disagrees with formula; read as {}", c.template()),
                        );
                    }
                }
                if !model.push(sid, c) {
                    log.warn(line.number, "duplicate constraint ignored");
                }
                log.parsed(line.number);
            }
            Err(reason) => log.reject(line.number, reason, line.text),
        }
    }
    Ok(log.finish(model))
}

fn split_sentence_id(s: &str) -> (Option<&str>, &str) {
    if let Some(rest) = s.strip_prefix('[') {
        if let Some(end) = rest.find(']') {
            let id = rest[..end].trim();
            if !id.is_empty() {
                return (Some(id), rest[end + 1..].trim_start());
            }
        }
    }
    (None, s)
}

fn split_template_label(s: &str) -> (Option<Template>, &str) {
    let mut label = None;
    let mut s = s.trim();
    if let Some((head, tail)) = s.split_once(':') {
        if let Ok(t) = head.parse::<Template>() {
            label = Some(t);
            s = tail.trim();
        }
    }
    if let Some((head, tail)) = s.rsplit_once('|') {
        if let Ok(t) = tail.parse::<Template>() {
            label = label.or(Some(t));
            s = head.trim();
        }
    }
    (label, s)
}

fn unwrap_call<'a>(s: &'a str, op: &str) -> Option<&'a str> {
    let s = s.trim();
    let rest = s.strip_prefix(op)?;
    if !rest.starts_with('(') {
        return None;
    }
    let open = op.len();
    (matching_paren(s, open) == Some(s.len() - 1)).then(|| &s[open + 1..s.len() - 1])
}

fn activity(s: &str) -> String {
    let s = strip_outer_parens(s);
    canonicalize_label(unwrap_call(s, "F").unwrap_or(s))
}

fn build(template: Template, a: &str, b: Option<&str>) -> Result<DeclareConstraint, RejectReason> {
    DeclareConstraint::new(template, &activity(a), b.map(activity).as_deref()).map_err(|e| match e {
        IrError::EmptyActivity => RejectReason::EmptyActivity,
        _ => RejectReason::NoTemplateMatched,
    })
}

fn parse_formula(s: &str) -> Result<DeclareConstraint, RejectReason> {
    let mut s = strip_outer_parens(s);
    while let Some(inner) = unwrap_call(s, "G") {
        s = strip_outer_parens(inner);
    }
    let parts = split_top_level(s, " AND ");
    match parts.as_slice() {
        [single] => parse_simple(single),
        [x, y] => {
            let (x, y) = (parse_simple(x)?, parse_simple(y)?);
            let (p, r) = match (x.template(), y.template()) {
                (Template::Precedence, Template::Response) => (x, y),
                (Template::Response, Template::Precedence) => (y, x),
                _ => return Err(RejectReason::InconsistentSuccession),
            };
            if p.activity_a() != r.activity_a() || p.activity_b() != r.activity_b() {
                return Err(RejectReason::InconsistentSuccession);
            }
            DeclareConstraint::new(Template::Succession, p.activity_a(), p.activity_b())
                .map_err(|_| RejectReason::InconsistentSuccession)
        }
        _ => Err(RejectReason::InconsistentSuccession),
    }
}

fn parse_simple(s: &str) -> Result<DeclareConstraint, RejectReason> {
    let s = strip_outer_parens(s);
    if let [left, right] = split_top_level(s, " U ").as_slice() {
        let b = unwrap_call(left, "NOT").ok_or(RejectReason::NoTemplateMatched)?;
        return build(Template::Precedence, right, Some(b));
    }
    if let [left, right] = split_top_level(s, "->").as_slice() {
        let head = left.trim();
        return if head.eq_ignore_ascii_case("START") {
            build(Template::Init, right, None)
        } else if head.eq_ignore_ascii_case("END") {
            build(Template::End, right, None)
        } else {
            build(Template::Response, left, Some(right))
        };
    }
    Err(RejectReason::NoTemplateMatched)
}
