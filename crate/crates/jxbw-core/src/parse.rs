//! JSONL and query parsing.
//!
//! Parsing goes through a custom serde visitor rather than `serde_json::Value`
//! so that object member order is preserved and duplicate keys are kept as
//! separate key nodes. Numbers are canonicalized while visiting.

use serde::de::{self, Deserializer, MapAccess, SeqAccess, Visitor};
use serde::Deserialize;
use std::fmt;

use crate::error::ParseError;
use crate::label::Label;
use crate::tree::{JsonTree, NodeId, QueryNode, QueryTree, TreeId, TreeNode};

/// A JSON value with member order and duplicate keys intact.
#[derive(Debug)]
enum RawValue {
    Object(Vec<(String, RawValue)>),
    Array(Vec<RawValue>),
    String(String),
    /// Canonical number lexeme.
    Number(String),
    Bool(bool),
    Null,
}

impl<'de> Deserialize<'de> for RawValue {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<RawValue, D::Error> {
        deserializer.deserialize_any(RawValueVisitor)
    }
}

struct RawValueVisitor;

impl<'de> Visitor<'de> for RawValueVisitor {
    type Value = RawValue;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("any JSON value")
    }

    fn visit_bool<E>(self, v: bool) -> Result<RawValue, E> {
        Ok(RawValue::Bool(v))
    }

    fn visit_i64<E>(self, v: i64) -> Result<RawValue, E> {
        Ok(RawValue::Number(v.to_string()))
    }

    fn visit_u64<E>(self, v: u64) -> Result<RawValue, E> {
        Ok(RawValue::Number(v.to_string()))
    }

    fn visit_f64<E>(self, v: f64) -> Result<RawValue, E> {
        Ok(RawValue::Number(Label::number_from_f64(v).text().to_string()))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<RawValue, E> {
        Ok(RawValue::String(v.to_owned()))
    }

    fn visit_string<E>(self, v: String) -> Result<RawValue, E> {
        Ok(RawValue::String(v))
    }

    fn visit_unit<E>(self) -> Result<RawValue, E> {
        Ok(RawValue::Null)
    }

    fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<RawValue, A::Error> {
        let mut items = Vec::new();
        while let Some(item) = seq.next_element::<RawValue>()? {
            items.push(item);
        }
        Ok(RawValue::Array(items))
    }

    fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<RawValue, A::Error> {
        let mut members = Vec::new();
        while let Some(key) = map.next_key::<String>()? {
            let value = map.next_value::<RawValue>()?;
            members.push((key, value));
        }
        Ok(RawValue::Object(members))
    }
}

fn parse_raw(text: &str, line: usize) -> Result<RawValue, ParseError> {
    serde_json::from_str::<RawValue>(text).map_err(|e| ParseError::MalformedJson {
        line,
        message: e.to_string(),
    })
}

fn value_label(value: &RawValue) -> Label {
    match value {
        RawValue::Object(_) => Label::object(),
        RawValue::Array(_) => Label::array(),
        RawValue::String(s) => Label::string(s.clone()),
        RawValue::Number(n) => Label::number(n.clone()),
        RawValue::Bool(b) => Label::bool(*b),
        RawValue::Null => Label::null(),
    }
}

/// Appends the tree of `value` to `nodes`, returning its root id. `leaf_ids`
/// is attached to every leaf produced.
fn build_value(nodes: &mut Vec<TreeNode>, value: &RawValue, leaf_ids: &[TreeId]) -> NodeId {
    let id = nodes.len();
    nodes.push(TreeNode {
        label: value_label(value),
        children: Vec::new(),
        ids: Vec::new(),
    });
    match value {
        RawValue::Object(members) => {
            for (key, member) in members {
                let key_id = nodes.len();
                nodes.push(TreeNode {
                    label: Label::key(key.clone()),
                    children: Vec::new(),
                    ids: Vec::new(),
                });
                let value_id = build_value(nodes, member, leaf_ids);
                nodes[key_id].children.push(value_id);
                nodes[id].children.push(key_id);
            }
        }
        RawValue::Array(items) => {
            for item in items {
                let child = build_value(nodes, item, leaf_ids);
                nodes[id].children.push(child);
            }
        }
        _ => {}
    }
    if nodes[id].children.is_empty() {
        nodes[id].ids = leaf_ids.to_vec();
    }
    id
}

/// Parses one dataset line into its tree. `line_no` becomes the id stored on
/// every leaf. The top-level value must be a JSON object.
pub fn parse_jsonl_line(text: &str, line_no: TreeId) -> Result<JsonTree, ParseError> {
    assert!(line_no >= 1, "tree identifiers are 1-based");
    let raw = parse_raw(text, line_no as usize)?;
    if !matches!(raw, RawValue::Object(_)) {
        return Err(ParseError::NotAnObject { line: line_no as usize });
    }
    let mut nodes = Vec::new();
    build_value(&mut nodes, &raw, &[line_no]);
    Ok(JsonTree::from_nodes(nodes))
}

/// Parses a query pattern; any JSON value kind is allowed at the top level.
pub fn parse_query(text: &str) -> Result<QueryTree, ParseError> {
    let raw = parse_raw(text, 0)?;
    let mut nodes = Vec::new();
    build_value(&mut nodes, &raw, &[]);
    let query_nodes = nodes
        .into_iter()
        .map(|n| QueryNode { label: n.label, children: n.children })
        .collect();
    Ok(QueryTree::from_nodes(query_nodes))
}

/// Parses a whole JSONL document. Blank lines are skipped and do not consume
/// tree identifiers (ids stay contiguous `1..=N`); trailing `\r` is tolerated.
/// Errors report the physical line number.
pub fn parse_jsonl(text: &str) -> Result<Vec<JsonTree>, ParseError> {
    let mut trees = Vec::new();
    for (physical, line) in text.lines().enumerate() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.trim().is_empty() {
            continue;
        }
        let id = (trees.len() + 1) as TreeId;
        let tree = parse_jsonl_line(line, id).map_err(|e| match e {
            ParseError::MalformedJson { message, .. } => ParseError::MalformedJson {
                line: physical + 1,
                message,
            },
            ParseError::NotAnObject { .. } => ParseError::NotAnObject { line: physical + 1 },
        })?;
        trees.push(tree);
    }
    Ok(trees)
}

/// Builds the corpus symbol table: every label occurring in any tree, symbols
/// assigned in label order.
pub fn build_symbol_table(trees: &[JsonTree]) -> crate::label::SymbolTable {
    crate::label::SymbolTable::from_labels(trees.iter().flat_map(|t| t.labels()))
}
