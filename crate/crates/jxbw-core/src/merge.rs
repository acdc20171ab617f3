//! Tree merging.
//!
//! Two trees merge by walking them in lockstep from the root: children are
//! bound by label to the first same-labeled existing child, unmatched
//! subtrees are appended, and leaf id sets are unioned. A corpus is merged
//! with a balanced divide-and-conquer schedule: adjacent pairs per level, an
//! odd tree promoted unmerged.
//!
//! Fidelity caveat: binding to the *first* same-labeled child means two
//! same-labeled array siblings arriving from different trees collapse into
//! one node, losing their distinct element order. Corpora that need exact
//! per-line array semantics must keep cross-line array element labels
//! disjoint; the per-line traversal searcher remains the ground truth.

use std::collections::HashMap;

use crate::error::MergeError;
use crate::label::Label;
use crate::tree::{JsonTree, MergedTree, NodeId, TreeId, TreeNode};

/// Merges `b` into a copy of `a`. Either side may be empty.
pub fn merge_trees(a: &MergedTree, b: &MergedTree) -> MergedTree {
    merge_into(a.clone(), b)
}

fn merge_into(mut a: MergedTree, b: &MergedTree) -> MergedTree {
    if b.is_empty() {
        return a;
    }
    if a.is_empty() {
        return b.clone();
    }
    if a.nodes[MergedTree::ROOT].label != b.nodes[MergedTree::ROOT].label {
        let sub = add_subtree(&mut a.nodes, b, MergedTree::ROOT);
        a.nodes[MergedTree::ROOT].children.push(sub);
    } else {
        merge_recursive(&mut a.nodes, MergedTree::ROOT, b, MergedTree::ROOT);
    }
    a
}

/// Above this child count, first-match lookup goes through a label map
/// instead of a linear scan; the map keeps the first-inserted child per
/// label, so the binding is identical.
const CHILD_INDEX_THRESHOLD: usize = 8;

fn merge_recursive(nodes: &mut Vec<TreeNode>, into: NodeId, other: &MergedTree, from: NodeId) {
    let from_node = other.node(from);
    if from_node.is_leaf() {
        let merged = union_sorted(&nodes[into].ids, &from_node.ids);
        nodes[into].ids = merged;
        return;
    }
    let mut by_label: Option<HashMap<Label, NodeId>> =
        (nodes[into].children.len() > CHILD_INDEX_THRESHOLD).then(|| {
            let mut map = HashMap::with_capacity(nodes[into].children.len());
            for &c in &nodes[into].children {
                map.entry(nodes[c].label.clone()).or_insert(c);
            }
            map
        });
    for &child_from in &from_node.children {
        let child_label = &other.node(child_from).label;
        let found = match &by_label {
            Some(map) => map.get(child_label).copied(),
            None => nodes[into]
                .children
                .iter()
                .copied()
                .find(|&c| nodes[c].label == *child_label),
        };
        match found {
            Some(child_into) => merge_recursive(nodes, child_into, other, child_from),
            None => {
                let sub = add_subtree(nodes, other, child_from);
                nodes[into].children.push(sub);
                if let Some(map) = &mut by_label {
                    map.entry(child_label.clone()).or_insert(sub);
                }
            }
        }
    }
}

/// Deep-copies the subtree of `other` rooted at `from` into `nodes`.
fn add_subtree(nodes: &mut Vec<TreeNode>, other: &MergedTree, from: NodeId) -> NodeId {
    let src = other.node(from);
    let id = nodes.len();
    nodes.push(TreeNode {
        label: src.label.clone(),
        children: Vec::new(),
        ids: src.ids.clone(),
    });
    for &c in &src.children {
        let child = add_subtree(nodes, other, c);
        nodes[id].children.push(child);
    }
    id
}

fn union_sorted(a: &[TreeId], b: &[TreeId]) -> Vec<TreeId> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

impl From<&JsonTree> for MergedTree {
    fn from(tree: &JsonTree) -> MergedTree {
        MergedTree::from_nodes(tree.nodes().to_vec())
    }
}

/// Merges a whole corpus, pairing adjacent trees level by level until one
/// remains. The result has the same label paths and leaf id sets as a
/// left-to-right sequential fold.
pub fn merge_all(trees: &[JsonTree]) -> Result<MergedTree, MergeError> {
    if trees.is_empty() {
        return Err(MergeError::EmptyCorpus);
    }
    let mut level: Vec<MergedTree> = trees.iter().map(MergedTree::from).collect();
    while level.len() > 1 {
        let mut next = Vec::with_capacity(level.len() / 2 + 1);
        let mut iter = level.drain(..);
        while let Some(a) = iter.next() {
            match iter.next() {
                Some(b) => next.push(merge_into(a, &b)),
                None => next.push(a),
            }
        }
        drop(iter);
        level = next;
    }
    Ok(level.pop().expect("non-empty corpus yields one tree"))
}

/// Node-count bookkeeping for a merge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MergeStats {
    /// Number of trees merged.
    pub lines: usize,
    /// Nodes in the merged tree.
    pub merged_nodes: usize,
    /// Total nodes across the input trees.
    pub total_nodes: usize,
}

impl MergeStats {
    /// `merged_nodes / total_nodes`; 1.0 means nothing was shared.
    pub fn compression_ratio(&self) -> f64 {
        if self.total_nodes == 0 {
            1.0
        } else {
            self.merged_nodes as f64 / self.total_nodes as f64
        }
    }
}

pub fn merge_stats(mt: &MergedTree, corpus: &[JsonTree]) -> MergeStats {
    MergeStats {
        lines: corpus.len(),
        merged_nodes: mt.len(),
        total_nodes: corpus.iter().map(|t| t.len()).sum(),
    }
}
