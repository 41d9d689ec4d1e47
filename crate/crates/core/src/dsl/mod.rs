//! The `.agc` line format.
//!
//! A document is an optional `version 1 kind=<kind>` header followed by one
//! record per line:
//!
//! ```text
//! record-type id key=value key=value ...
//! ```
//!
//! Fields are separated by exactly one space, keys are unique per record and
//! both record types and keys form a closed set per document kind (see the
//! grammar reference in the repository README). Lists are comma-separated
//! with no spaces; `-` is the empty list or an absent reference. Blank lines
//! and lines starting with `#` are comments.
//!
//! [`parse`] validates and canonicalises: records are sorted by record-type
//! rank then id, fields are ordered by the grammar, and values are
//! re-rendered (reals in shortest round-trip form, sets sorted). [`serialize`]
//! always emits the header, so `serialize(parse(t))` is the canonical form of
//! `t` and applying it twice changes nothing.

mod convert;
mod grammar;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::ontology::ConceptCode;
use grammar::{is_token, IdKind, RecordSpec, ValueKind};

pub use convert::{
    candidate_from_document, candidate_to_document, concept_graph_from_document,
    concept_graph_to_document, trace_to_document, ConvertError, Scenario,
};

token_enum!(DocKind, "document kind" {
    Scenario => "scenario",
    Concepts => "concepts",
    Trace => "trace",
    Candidate => "candidate",
});

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Record {
    record_type: String,
    id: String,
    fields: Vec<(String, String)>,
}

impl Record {
    pub fn record_type(&self) -> &str {
        &self.record_type
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    /// Present fields in canonical key order.
    pub fn fields(&self) -> &[(String, String)] {
        &self.fields
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.fields
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}

/// A validated document in canonical order. Only [`parse`] constructs one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    kind: DocKind,
    records: Vec<Record>,
}

impl Document {
    pub fn kind(&self) -> DocKind {
        self.kind
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn records_of<'a>(&'a self, record_type: &'a str) -> impl Iterator<Item = &'a Record> + 'a {
        self.records
            .iter()
            .filter(move |r| r.record_type == record_type)
    }
}

impl fmt::Display for Document {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "version 1 kind={}", self.kind)?;
        for r in &self.records {
            write!(f, "{} {}", r.record_type, r.id)?;
            for (k, v) in &r.fields {
                write!(f, " {k}={v}")?;
            }
            f.write_str("\n")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: duplicate {record} id {id} (first declared on line {first})")]
    DuplicateId {
        line: usize,
        record: String,
        id: String,
        first: usize,
    },
    #[error("line {line}: {record} {id} key {key} references unknown {target}")]
    DanglingReference {
        line: usize,
        record: String,
        id: String,
        key: String,
        target: String,
    },
}

impl ParseError {
    pub fn line(&self) -> usize {
        match self {
            ParseError::Syntax { line, .. }
            | ParseError::DuplicateId { line, .. }
            | ParseError::DanglingReference { line, .. } => *line,
        }
    }
}

/// Every error found in a document, in line order.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseErrors(pub Vec<ParseError>);

impl fmt::Display for ParseErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

pub fn serialize(doc: &Document) -> String {
    doc.to_string()
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum SortKey {
    Num(u64),
    Code(ConceptCode),
    Text(String),
}

struct Parsed {
    line: usize,
    spec: &'static RecordSpec,
    sort: SortKey,
    record: Record,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

/// Splits on single spaces, returning each piece with its 1-based column.
fn split_fields(line_no: usize, raw: &str) -> Result<Vec<(usize, &str)>, ParseError> {
    let mut out = Vec::new();
    let mut column = 1;
    for piece in raw.split(' ') {
        if piece.is_empty() {
            return Err(syntax(
                line_no,
                column,
                "fields must be separated by exactly one space",
            ));
        }
        out.push((column, piece));
        column += piece.chars().count() + 1;
    }
    Ok(out)
}

fn parse_uint(s: &str) -> Option<u64> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

fn parse_real(s: &str) -> Option<f64> {
    // Rust's float grammar also accepts "inf", "nan" and a leading '+'.
    let plain = s
        .bytes()
        .all(|b| b.is_ascii_digit() || matches!(b, b'-' | b'.' | b'e' | b'E'));
    let v: f64 = s.parse().ok()?;
    (plain && v.is_finite()).then_some(v)
}

fn canonical_value(kind: ValueKind, raw: &str) -> Result<String, String> {
    let bad = |what: &str| Err(format!("expected {what}, found {raw:?}"));
    match kind {
        ValueKind::Token => {
            if is_token(raw) {
                Ok(raw.to_string())
            } else {
                bad("an identifier token")
            }
        }
        ValueKind::OptToken => {
            if raw == "-" || is_token(raw) {
                Ok(raw.to_string())
            } else {
                bad("an identifier token or -")
            }
        }
        ValueKind::Uint => parse_uint(raw)
            .map(|v| v.to_string())
            .map_or_else(|| bad("an unsigned integer"), Ok),
        ValueKind::OptUint => {
            if raw == "-" {
                Ok(raw.to_string())
            } else {
                parse_uint(raw)
                    .map(|v| v.to_string())
                    .map_or_else(|| bad("an unsigned integer or -"), Ok)
            }
        }
        ValueKind::Real => parse_real(raw)
            .map(|v| v.to_string())
            .map_or_else(|| bad("a finite real"), Ok),
        ValueKind::Bool => match raw {
            "true" | "false" => Ok(raw.to_string()),
            _ => bad("true or false"),
        },
        ValueKind::Autonomy => match raw {
            "true" | "false" => Ok(raw.to_string()),
            _ => parse_real(raw)
                .map(|v| v.to_string())
                .map_or_else(|| bad("true, false or a real"), Ok),
        },
        ValueKind::Enum(allowed) => {
            if allowed.contains(&raw) {
                Ok(raw.to_string())
            } else {
                Err(format!(
                    "expected one of {}, found {raw:?}",
                    allowed.join("|")
                ))
            }
        }
        ValueKind::List => {
            if raw == "-" {
                return Ok(raw.to_string());
            }
            if raw.split(',').all(is_token) {
                Ok(raw.to_string())
            } else {
                bad("a comma-separated token list or -")
            }
        }
        ValueKind::Set(allowed) => {
            if raw == "-" {
                return Ok(raw.to_string());
            }
            let mut idx = BTreeSet::new();
            for item in raw.split(',') {
                match allowed.iter().position(|a| *a == item) {
                    Some(i) => {
                        idx.insert(i);
                    }
                    None => {
                        return Err(format!(
                            "expected a comma-separated subset of {}, found {item:?}",
                            allowed.join("|")
                        ))
                    }
                }
            }
            Ok(idx
                .into_iter()
                .map(|i| allowed[i])
                .collect::<Vec<_>>()
                .join(","))
        }
        ValueKind::OptCode => {
            if raw == "-" {
                return Ok(raw.to_string());
            }
            raw.parse::<ConceptCode>()
                .map(|c| c.to_string())
                .map_err(|e| e.to_string())
        }
    }
}

fn canonical_id(kind: IdKind, raw: &str) -> Result<(String, SortKey), String> {
    match kind {
        IdKind::Token => {
            if is_token(raw) {
                Ok((raw.to_string(), SortKey::Text(raw.to_string())))
            } else {
                Err(format!("invalid identifier {raw:?}"))
            }
        }
        IdKind::Seq | IdKind::Uint => match parse_uint(raw) {
            Some(0) if kind == IdKind::Seq => Err("sequence numbers start at 1".into()),
            Some(n) => Ok((n.to_string(), SortKey::Num(n))),
            None => Err(format!("expected an unsigned integer id, found {raw:?}")),
        },
        IdKind::Code => raw
            .parse::<ConceptCode>()
            .map(|c| (c.to_string(), SortKey::Code(c)))
            .map_err(|e| e.to_string()),
        IdKind::Pair => {
            let Some((a, b)) = raw.split_once('~') else {
                return Err(format!("expected a term pair a~b, found {raw:?}"));
            };
            if !is_token(a) || !is_token(b) {
                return Err(format!("invalid term pair {raw:?}"));
            }
            if a >= b {
                return Err(format!(
                    "term pair {raw:?} must be in strictly ascending order"
                ));
            }
            Ok((raw.to_string(), SortKey::Text(raw.to_string())))
        }
    }
}

/// Per-record rules that span more than one key.
fn cross_key_errors(spec: &RecordSpec, fields: &[Option<String>]) -> Vec<String> {
    let has = |k: &str| spec.key(k).is_some_and(|(i, _)| fields[i].is_some());
    let mut out = Vec::new();
    match spec.name {
        "agent" => {
            for (a, b) in [("time", "space"), ("quality", "composition")] {
                if has(a) != has(b) {
                    out.push(format!("keys `{a}` and `{b}` must appear together"));
                }
            }
        }
        "event" => {
            let ty = spec.key("type").and_then(|(i, _)| fields[i].as_deref());
            let (required, allowed): (&[&str], &[&str]) = match ty {
                Some("existence") => (&["agent"], &["agent"]),
                Some("policy") => (&["policy"], &["policy"]),
                Some("attack") => (&["target"], &["initiator", "intent", "target"]),
                Some("defend") => (&["initiator", "target"], &["initiator", "intent", "target"]),
                _ => return out,
            };
            let ty = ty.unwrap_or_default();
            for key in ["agent", "policy", "initiator", "intent", "target"] {
                if has(key) && !allowed.contains(&key) {
                    out.push(format!("key `{key}` is not allowed on a {ty} event"));
                }
            }
            for key in required {
                if !has(key) {
                    out.push(format!("{ty} event requires key `{key}`"));
                }
            }
        }
        _ => {}
    }
    out
}

fn parse_record(
    kind: DocKind,
    line: usize,
    toks: &[(usize, &str)],
) -> Result<Parsed, Vec<ParseError>> {
    let (type_col, rtype) = toks[0];
    let Some(spec) = grammar::spec(kind, rtype) else {
        return Err(vec![syntax(
            line,
            type_col,
            format!("unknown record type `{rtype}` in a {kind} document"),
        )]);
    };
    let Some(&(id_col, raw_id)) = toks.get(1) else {
        return Err(vec![syntax(
            line,
            type_col,
            format!("{rtype} record has no id"),
        )]);
    };

    let mut errors = Vec::new();
    let id = match canonical_id(spec.id, raw_id) {
        Ok(id) => Some(id),
        Err(m) => {
            errors.push(syntax(line, id_col, m));
            None
        }
    };

    let mut slots: Vec<Option<String>> = vec![None; spec.keys.len()];
    let mut attempted = vec![false; spec.keys.len()];
    for &(col, field) in &toks[2..] {
        let Some((key, value)) = field.split_once('=') else {
            errors.push(syntax(
                line,
                col,
                format!("expected key=value, found {field:?}"),
            ));
            continue;
        };
        let Some((idx, key_spec)) = spec.key(key) else {
            errors.push(syntax(
                line,
                col,
                format!("unknown key `{key}` for {rtype} record"),
            ));
            continue;
        };
        if attempted[idx] {
            errors.push(syntax(line, col, format!("duplicate key `{key}`")));
            continue;
        }
        attempted[idx] = true;
        match canonical_value(key_spec.kind, value) {
            Ok(v) => slots[idx] = Some(v),
            Err(m) => errors.push(syntax(
                line,
                col + key.chars().count() + 1,
                format!("key `{key}`: {m}"),
            )),
        }
    }
    for (key_spec, tried) in spec.keys.iter().zip(&attempted) {
        if key_spec.required && !tried {
            errors.push(syntax(
                line,
                type_col,
                format!("{rtype} record is missing required key `{}`", key_spec.name),
            ));
        }
    }
    if errors.is_empty() {
        for m in cross_key_errors(spec, &slots) {
            errors.push(syntax(line, type_col, m));
        }
    }
    if !errors.is_empty() {
        return Err(errors);
    }

    let (id, sort) = id.expect("id error reported above");
    let fields = spec
        .keys
        .iter()
        .zip(slots)
        .filter_map(|(k, v)| v.map(|v| (k.name.to_string(), v)))
        .collect();
    Ok(Parsed {
        line,
        spec,
        sort,
        record: Record {
            record_type: rtype.to_string(),
            id,
            fields,
        },
    })
}

fn parse_header(line: usize, toks: &[(usize, &str)]) -> Result<DocKind, ParseError> {
    match toks {
        [_, (vcol, version), rest @ ..] => {
            if *version != "1" {
                return Err(syntax(
                    line,
                    *vcol,
                    format!("unsupported version {version:?}"),
                ));
            }
            match rest {
                [(col, field)] => match field.strip_prefix("kind=") {
                    Some(k) => k
                        .parse()
                        .map_err(|e: crate::UnknownToken| syntax(line, col + 5, e.to_string())),
                    None => Err(syntax(
                        line,
                        *col,
                        format!("expected kind=<kind>, found {field:?}"),
                    )),
                },
                [] => Err(syntax(line, 1, "version header is missing key `kind`")),
                [_, (col, _), ..] => Err(syntax(line, *col, "version header takes only `kind`")),
            }
        }
        _ => Err(syntax(line, 1, "version header needs a version number")),
    }
}

/// Parses and canonicalises a document, reporting every error found.
pub fn parse(text: &str) -> Result<Document, ParseErrors> {
    let mut errors = Vec::new();
    let mut kind: Option<DocKind> = None;
    let mut header_ok = true;
    let mut parsed = Vec::new();

    for (i, raw) in text.split('\n').enumerate() {
        let line = i + 1;
        if raw.is_empty() || raw.starts_with('#') {
            continue;
        }
        if let Some(pos) = raw.find('\r') {
            errors.push(syntax(
                line,
                raw[..pos].chars().count() + 1,
                "carriage return; lines must end with LF",
            ));
            continue;
        }
        let toks = match split_fields(line, raw) {
            Ok(t) => t,
            Err(e) => {
                errors.push(e);
                continue;
            }
        };
        if toks[0].1 == "version" {
            if kind.is_some() || !header_ok {
                errors.push(syntax(line, 1, "version header must be the first record"));
                continue;
            }
            match parse_header(line, &toks) {
                Ok(k) => kind = Some(k),
                Err(e) => {
                    errors.push(e);
                    header_ok = false;
                }
            }
            continue;
        }
        if !header_ok {
            continue;
        }
        let k = *kind.get_or_insert(DocKind::Scenario);
        match parse_record(k, line, &toks) {
            Ok(p) => parsed.push(p),
            Err(mut e) => errors.append(&mut e),
        }
    }
    let kind = kind.unwrap_or(DocKind::Scenario);

    if header_ok {
        check_document(kind, &parsed, &mut errors);
    }
    if !errors.is_empty() {
        errors.sort_by_key(ParseError::line);
        return Err(ParseErrors(errors));
    }

    parsed.sort_by(|a, b| (a.spec.rank, &a.sort).cmp(&(b.spec.rank, &b.sort)));
    Ok(Document {
        kind,
        records: parsed.into_iter().map(|p| p.record).collect(),
    })
}

/// Whole-document checks: unique ids, world cardinality and references.
fn check_document(kind: DocKind, parsed: &[Parsed], errors: &mut Vec<ParseError>) {
    let mut first_line: BTreeMap<(&str, &str), usize> = BTreeMap::new();
    for p in parsed {
        let key = (p.record.record_type.as_str(), p.record.id.as_str());
        if let Some(&first) = first_line.get(&key) {
            errors.push(ParseError::DuplicateId {
                line: p.line,
                record: key.0.to_string(),
                id: key.1.to_string(),
                first,
            });
        } else {
            first_line.insert(key, p.line);
        }
    }

    let ids = |rtype: &str| -> BTreeSet<&str> {
        parsed
            .iter()
            .filter(|p| p.record.record_type == rtype)
            .map(|p| p.record.id.as_str())
            .collect()
    };
    let dangling = |p: &Parsed, key: &str, target: &str| ParseError::DanglingReference {
        line: p.line,
        record: p.record.record_type.clone(),
        id: p.record.id.clone(),
        key: key.to_string(),
        target: target.to_string(),
    };

    match kind {
        DocKind::Scenario | DocKind::Trace => {
            let worlds: Vec<&Parsed> = parsed.iter().filter(|p| p.spec.name == "world").collect();
            match worlds.as_slice() {
                [] => errors.push(syntax(
                    1,
                    1,
                    format!("{kind} document declares no world record"),
                )),
                [_] => {}
                [_, extra @ ..] => {
                    for p in extra {
                        errors.push(syntax(
                            p.line,
                            1,
                            "only one world record is allowed per document",
                        ));
                    }
                }
            }
            let world_ids = ids("world");
            let agents = ids("agent");
            let policies = ids("policy");
            let events = ids("event");
            for p in parsed {
                let r = &p.record;
                match p.spec.name {
                    "event" => {
                        for (key, v) in &r.fields {
                            let ok = match key.as_str() {
                                "agent" => agents.contains(v.as_str()),
                                "policy" | "target" => policies.contains(v.as_str()),
                                "initiator" => {
                                    agents.contains(v.as_str()) || world_ids.contains(v.as_str())
                                }
                                _ => true,
                            };
                            if !ok {
                                errors.push(dangling(p, key, v));
                            }
                        }
                    }
                    "state" if !events.contains(r.id.as_str()) => {
                        errors.push(dangling(p, "id", &r.id))
                    }
                    "halt" if r.id != "0" && !events.contains(r.id.as_str()) => {
                        errors.push(dangling(p, "id", &r.id))
                    }
                    _ => {}
                }
            }
        }
        DocKind::Concepts => {
            let codes = ids("concept");
            for p in parsed {
                if let Some(parent) = p.record.get("parent") {
                    if parent != "-" && !codes.contains(parent) {
                        errors.push(dangling(p, "parent", parent));
                    }
                }
            }
        }
        DocKind::Candidate => {
            let terms = ids("term");
            for p in parsed {
                match p.spec.name {
                    "term" => {
                        let parent = p.record.get("parent").unwrap_or("-");
                        if parent != "-" && !terms.contains(parent) {
                            errors.push(dangling(p, "parent", parent));
                        }
                    }
                    "relation" => {
                        for term in p.record.id.split('~') {
                            if !terms.contains(term) {
                                errors.push(dangling(p, "id", term));
                            }
                        }
                    }
                    _ => {}
                }
            }
        }
    }
}

/// Accumulates records as text and hands them to [`parse`], so every
/// document built from typed values goes through the same validation.
pub(crate) struct Writer {
    text: String,
}

impl Writer {
    pub fn new(kind: DocKind) -> Self {
        Writer {
            text: format!("version 1 kind={kind}\n"),
        }
    }

    pub fn record<'a>(
        &mut self,
        record_type: &str,
        id: &str,
        fields: impl IntoIterator<Item = (&'a str, Option<String>)>,
    ) {
        self.text.push_str(record_type);
        self.text.push(' ');
        self.text.push_str(id);
        for (k, v) in fields {
            if let Some(v) = v {
                self.text.push(' ');
                self.text.push_str(k);
                self.text.push('=');
                self.text.push_str(&v);
            }
        }
        self.text.push('\n');
    }

    pub fn finish(self) -> Result<Document, ParseErrors> {
        parse(&self.text)
    }
}

/// Renders a token list, `-` when empty.
pub(crate) fn list(items: &[String]) -> String {
    if items.is_empty() {
        "-".to_string()
    } else {
        items.join(",")
    }
}

#[cfg(test)]
mod tests;
