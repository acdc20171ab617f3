//! Tree representations for dataset lines, queries, and the merged corpus.
//!
//! All trees are index-based arenas with the root at node 0. A node is a leaf
//! exactly when it has no children; leaves of dataset and merged trees carry
//! the sorted set of tree identifiers (1-based line ordinals) that reach them.

use crate::label::{Label, LabelKind, Symbol};

/// Identifier of one dataset line (1-based ordinal of non-blank lines).
pub type TreeId = u32;

/// Arena index of a node within its tree.
pub type NodeId = usize;

/// A labeled node with an identifier set. Internal nodes keep `ids` empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeNode {
    pub label: Label,
    pub children: Vec<NodeId>,
    pub ids: Vec<TreeId>,
}

impl TreeNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

/// The tree of a single JSONL line. Every leaf carries exactly the id of the
/// line it was parsed from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JsonTree {
    pub(crate) nodes: Vec<TreeNode>,
}

/// A query pattern tree. Same shape as [`JsonTree`] but without ids; the root
/// may be any JSON value kind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryTree {
    pub(crate) nodes: Vec<QueryNode>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryNode {
    pub label: Label,
    pub children: Vec<NodeId>,
}

impl QueryNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

/// The union of per-line trees: shared root paths are collapsed and leaf id
/// sets are unioned. May be empty (zero nodes).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MergedTree {
    pub(crate) nodes: Vec<TreeNode>,
}

/// A merged tree relabeled with symbols, children ordered for index
/// construction: object and key children ascending by symbol, array children
/// in source order (their order carries meaning).
#[derive(Debug, Clone)]
pub struct NormalizedTree {
    pub(crate) nodes: Vec<NormNode>,
}

#[derive(Debug, Clone)]
pub struct NormNode {
    pub sym: Symbol,
    pub children: Vec<NodeId>,
    pub ids: Vec<TreeId>,
}

impl NormNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

macro_rules! arena_common {
    ($ty:ty, $node:ty) => {
        impl $ty {
            pub const ROOT: NodeId = 0;

            /// Number of nodes.
            pub fn len(&self) -> usize {
                self.nodes.len()
            }

            pub fn is_empty(&self) -> bool {
                self.nodes.is_empty()
            }

            pub fn node(&self, id: NodeId) -> &$node {
                &self.nodes[id]
            }

            pub fn nodes(&self) -> &[$node] {
                &self.nodes
            }

            /// Preorder traversal of node ids starting at the root.
            pub fn preorder(&self) -> Vec<NodeId> {
                let mut order = Vec::with_capacity(self.nodes.len());
                if self.nodes.is_empty() {
                    return order;
                }
                let mut stack = vec![Self::ROOT];
                while let Some(id) = stack.pop() {
                    order.push(id);
                    for &c in self.nodes[id].children.iter().rev() {
                        stack.push(c);
                    }
                }
                order
            }
        }
    };
}

arena_common!(JsonTree, TreeNode);
arena_common!(QueryTree, QueryNode);
arena_common!(MergedTree, TreeNode);
arena_common!(NormalizedTree, NormNode);

impl JsonTree {
    pub(crate) fn from_nodes(nodes: Vec<TreeNode>) -> JsonTree {
        JsonTree { nodes }
    }

    pub fn labels(&self) -> impl Iterator<Item = &Label> {
        self.nodes.iter().map(|n| &n.label)
    }

    /// Renders the tree back to JSON text (objects keep source key order).
    pub fn render_json(&self) -> String {
        let mut out = String::new();
        render(&self.nodes, Self::ROOT, &mut out, &|n: &TreeNode| (&n.label, &n.children));
        out
    }
}

impl QueryTree {
    /// Builds a query from raw nodes; node 0 is the root, children are arena
    /// indices.
    pub fn from_nodes(nodes: Vec<QueryNode>) -> QueryTree {
        QueryTree { nodes }
    }

    pub fn labels(&self) -> impl Iterator<Item = &Label> {
        self.nodes.iter().map(|n| &n.label)
    }

    /// True if any node of the query is an array.
    pub fn contains_array(&self) -> bool {
        self.nodes.iter().any(|n| n.label.kind() == LabelKind::Array)
    }

    /// Length of the longest root-to-leaf path, in nodes.
    pub fn depth(&self) -> usize {
        fn go(nodes: &[QueryNode], id: NodeId) -> usize {
            1 + nodes[id]
                .children
                .iter()
                .map(|&c| go(nodes, c))
                .max()
                .unwrap_or(0)
        }
        if self.nodes.is_empty() {
            0
        } else {
            go(&self.nodes, Self::ROOT)
        }
    }

    pub fn render_json(&self) -> String {
        let mut out = String::new();
        render(&self.nodes, Self::ROOT, &mut out, &|n: &QueryNode| (&n.label, &n.children));
        out
    }
}

impl MergedTree {
    pub(crate) fn from_nodes(nodes: Vec<TreeNode>) -> MergedTree {
        MergedTree { nodes }
    }

    pub fn labels(&self) -> impl Iterator<Item = &Label> {
        self.nodes.iter().map(|n| &n.label)
    }
}

impl NormalizedTree {
    pub(crate) fn from_nodes(nodes: Vec<NormNode>) -> NormalizedTree {
        NormalizedTree { nodes }
    }
}

/// JSON rendering over any arena whose nodes expose a label and children.
fn render<N>(nodes: &[N], id: NodeId, out: &mut String, view: &dyn Fn(&N) -> (&Label, &Vec<NodeId>)) {
    let (label, children) = view(&nodes[id]);
    match label.kind() {
        LabelKind::Object => {
            out.push('{');
            for (i, &key) in children.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                let (key_label, key_children) = view(&nodes[key]);
                debug_assert_eq!(key_label.kind(), LabelKind::Key);
                out.push_str(&escape_json_string(key_label.text()));
                out.push(':');
                render(nodes, key_children[0], out, view);
            }
            out.push('}');
        }
        LabelKind::Array => {
            out.push('[');
            for (i, &el) in children.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                render(nodes, el, out, view);
            }
            out.push(']');
        }
        LabelKind::Key => {
            // Bare keys only appear when rendering a subtree rooted at a key;
            // wrap as a one-pair object so the output stays valid JSON.
            out.push('{');
            out.push_str(&escape_json_string(label.text()));
            out.push(':');
            render(nodes, children[0], out, view);
            out.push('}');
        }
        LabelKind::String => out.push_str(&escape_json_string(label.text())),
        LabelKind::Number => out.push_str(label.text()),
        LabelKind::True => out.push_str("true"),
        LabelKind::False => out.push_str("false"),
        LabelKind::Null => out.push_str("null"),
    }
}

fn escape_json_string(s: &str) -> String {
    serde_json::to_string(s).expect("string serialization cannot fail")
}

#[cfg(test)]
mod tests {
    #[test]
    fn preorder_visits_children_in_order() {
        // {"a": [1, 2]}
        let tree = crate::parse::parse_jsonl_line(r#"{"a":[1,2]}"#, 1).unwrap();
        let order = tree.preorder();
        let labels: Vec<String> = order
            .iter()
            .map(|&id| tree.node(id).label.to_string())
            .collect();
        assert_eq!(labels, vec!["object", "key:a", "array", "num:1", "num:2"]);
    }

    #[test]
    fn render_escapes_strings() {
        let tree = crate::parse::parse_jsonl_line(r#"{"a\"b":"x\ny"}"#, 1).unwrap();
        assert_eq!(tree.render_json(), "{\"a\\\"b\":\"x\\ny\"}");
    }
}
