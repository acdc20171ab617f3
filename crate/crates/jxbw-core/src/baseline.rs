//! Traversal-based reference searchers.
//!
//! [`naive_search`] checks every per-line tree for an embedding of the query:
//! labels equal, parent-child preserved, object children matched unordered
//! (not necessarily to distinct targets), array children matched as an
//! order-preserving subsequence. It is the ground truth.
//!
//! [`mt_search`] searches the merged tree instead: find candidate nodes
//! carrying the query root label, match the query structure under each with a
//! two-pointer child scan, intersect the id sets collected at query leaves,
//! and union across candidates. Its two-pointer scan assumes siblings have
//! distinct labels; outside that class the naive searcher is authoritative.

use std::collections::BTreeSet;

use crate::label::LabelKind;
use crate::tree::{JsonTree, MergedTree, NodeId, QueryTree, TreeId};

/// A sorted, duplicate-free set of matching tree identifiers.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ResultSet {
    ids: Vec<TreeId>,
}

impl ResultSet {
    pub fn new(mut ids: Vec<TreeId>) -> ResultSet {
        ids.sort_unstable();
        ids.dedup();
        ResultSet { ids }
    }

    pub fn ids(&self) -> &[TreeId] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn contains(&self, id: TreeId) -> bool {
        self.ids.binary_search(&id).is_ok()
    }
}

impl From<BTreeSet<TreeId>> for ResultSet {
    fn from(set: BTreeSet<TreeId>) -> ResultSet {
        ResultSet { ids: set.into_iter().collect() }
    }
}

impl FromIterator<TreeId> for ResultSet {
    fn from_iter<I: IntoIterator<Item = TreeId>>(iter: I) -> ResultSet {
        ResultSet::new(iter.into_iter().collect())
    }
}

/// Searches each tree separately; returns the ids of trees that contain the
/// query as a substructure.
pub fn naive_search(corpus: &[JsonTree], query: &QueryTree) -> ResultSet {
    let mut ids = Vec::new();
    for tree in corpus {
        if tree.is_empty() || query.is_empty() {
            continue;
        }
        let mut m = Matcher::new(tree, query);
        if tree
            .preorder()
            .into_iter()
            .any(|v| m.embeds(QueryTree::ROOT, v))
        {
            // Leaf ids of a fresh per-line tree all carry the same line id.
            let id = tree
                .nodes()
                .iter()
                .find(|n| n.is_leaf())
                .map(|n| n.ids[0])
                .expect("non-empty tree has a leaf");
            ids.push(id);
        }
    }
    ResultSet::new(ids)
}

/// Embedding check with memoization over (query node, data node).
struct Matcher<'a> {
    tree: &'a JsonTree,
    query: &'a QueryTree,
    memo: std::collections::HashMap<(NodeId, NodeId), bool>,
}

impl<'a> Matcher<'a> {
    fn new(tree: &'a JsonTree, query: &'a QueryTree) -> Matcher<'a> {
        Matcher { tree, query, memo: std::collections::HashMap::new() }
    }

    fn embeds(&mut self, qn: NodeId, tn: NodeId) -> bool {
        if let Some(&hit) = self.memo.get(&(qn, tn)) {
            return hit;
        }
        let result = self.embeds_uncached(qn, tn);
        self.memo.insert((qn, tn), result);
        result
    }

    fn embeds_uncached(&mut self, qn: NodeId, tn: NodeId) -> bool {
        let q = self.query.node(qn);
        let t = self.tree.node(tn);
        if q.label != t.label {
            return false;
        }
        if q.is_leaf() {
            return true;
        }
        if t.is_leaf() {
            return false;
        }
        if q.label.kind() == LabelKind::Array {
            let t_children = t.children.clone();
            let q_children = q.children.clone();
            self.subsequence(&q_children, &t_children, 0, 0)
        } else {
            // Unordered: each query child embeds under some data child.
            let q_children = q.children.clone();
            let t_children = t.children.clone();
            q_children
                .iter()
                .all(|&qc| t_children.iter().any(|&tc| self.embeds(qc, tc)))
        }
    }

    /// Order-preserving (not necessarily consecutive) subsequence match of
    /// query array elements against data array elements.
    fn subsequence(&mut self, qs: &[NodeId], ts: &[NodeId], qi: usize, ti: usize) -> bool {
        if qi == qs.len() {
            return true;
        }
        if qs.len() - qi > ts.len() - ti {
            return false;
        }
        for t in ti..ts.len() {
            if self.embeds(qs[qi], ts[t]) && self.subsequence(qs, ts, qi + 1, t + 1) {
                return true;
            }
        }
        false
    }
}

/// Depth-first collection of all merged-tree nodes carrying `label`.
pub fn find_candidates(mt: &MergedTree, label: &crate::label::Label) -> Vec<NodeId> {
    mt.preorder()
        .into_iter()
        .filter(|&id| mt.node(id).label == *label)
        .collect()
}

/// Matches the query subtree rooted at `qn` against the merged subtree rooted
/// at `mn`, returning one id set per matched query leaf, or `None` on
/// mismatch. Labels of `mn`/`qn` themselves are compared by the caller.
///
/// Children are scanned with two pointers: object and key children of both
/// sides are taken in label order (equivalent to unordered containment when
/// sibling labels are distinct), array children in source order (an ordered
/// subsequence scan). A label-matching child whose recursive match fails
/// aborts the candidate.
pub fn match_subtree(
    mt: &MergedTree,
    mn: NodeId,
    query: &QueryTree,
    qn: NodeId,
) -> Option<Vec<Vec<TreeId>>> {
    let m = mt.node(mn);
    let q = query.node(qn);
    match (q.is_leaf(), m.is_leaf()) {
        (true, true) => return Some(vec![m.ids.clone()]),
        (true, false) | (false, true) => return None,
        (false, false) => {}
    }

    let ordered = q.label.kind() == LabelKind::Array;
    let m_children = child_scan_order(ordered, &m.children, |id| &mt.node(id).label);
    let q_children = child_scan_order(ordered, &q.children, |id| &query.node(id).label);

    let mut collected = Vec::new();
    let mut mi = 0;
    let mut qi = 0;
    while qi < q_children.len() && mi < m_children.len() {
        let qc = q_children[qi];
        let mc = m_children[mi];
        if mt.node(mc).label == query.node(qc).label {
            collected.extend(match_subtree(mt, mc, query, qc)?);
            qi += 1;
        }
        mi += 1;
    }
    if qi < q_children.len() {
        return None;
    }
    Some(collected)
}

fn child_scan_order<'a, F>(keep_source_order: bool, children: &[NodeId], label_of: F) -> Vec<NodeId>
where
    F: Fn(NodeId) -> &'a crate::label::Label,
{
    let mut order: Vec<NodeId> = children.to_vec();
    if !keep_source_order {
        order.sort_by(|&a, &b| label_of(a).cmp(label_of(b)));
    }
    order
}

/// Merged-tree substructure search: candidates, per-candidate structure
/// match, per-candidate intersection of collected id sets, union across
/// candidates.
pub fn mt_search(mt: &MergedTree, query: &QueryTree) -> ResultSet {
    if mt.is_empty() || query.is_empty() {
        return ResultSet::default();
    }
    let root_label = &query.node(QueryTree::ROOT).label;
    let mut solutions: BTreeSet<TreeId> = BTreeSet::new();
    for candidate in find_candidates(mt, root_label) {
        if let Some(sets) = match_subtree(mt, candidate, query, QueryTree::ROOT) {
            if let Some(ids) = intersect_all(&sets) {
                solutions.extend(ids);
            }
        }
    }
    solutions.into()
}

/// Intersection of all sets; `None` when the input is empty.
fn intersect_all(sets: &[Vec<TreeId>]) -> Option<BTreeSet<TreeId>> {
    let (first, rest) = sets.split_first()?;
    let mut acc: BTreeSet<TreeId> = first.iter().copied().collect();
    for set in rest {
        let other: BTreeSet<TreeId> = set.iter().copied().collect();
        acc = acc.intersection(&other).copied().collect();
        if acc.is_empty() {
            break;
        }
    }
    Some(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::label::Label;
    use crate::merge::merge_all;
    use crate::parse::{parse_jsonl, parse_query};

    fn example_corpus() -> Vec<JsonTree> {
        parse_jsonl(concat!(
            r#"{"person":{"name":"Alice","age":30},"hobbies":["reading","cycling"]}"#,
            "\n",
            r#"{"person":{"name":"Bob","age":30},"hobbies":["reading"]}"#,
            "\n",
        ))
        .unwrap()
    }

    #[test]
    fn worked_example_matches_line_two_only() {
        let corpus = example_corpus();
        let query = parse_query(r#"{"name":"Bob","age":30}"#).unwrap();
        assert_eq!(naive_search(&corpus, &query).ids(), &[2]);
        let mt = merge_all(&corpus).unwrap();
        assert_eq!(mt_search(&mt, &query).ids(), &[2]);
    }

    #[test]
    fn single_object_query_matches_everything() {
        let corpus = example_corpus();
        let query = parse_query("{}").unwrap();
        assert_eq!(naive_search(&corpus, &query).ids(), &[1, 2]);
    }

    #[test]
    fn candidates_for_object_label_cover_root_and_inner() {
        let corpus = example_corpus();
        let mt = merge_all(&corpus).unwrap();
        let candidates = find_candidates(&mt, &Label::object());
        assert_eq!(candidates.len(), 2);
        // Full-scan filter agrees.
        let scan: Vec<_> = (0..mt.len())
            .filter(|&id| mt.node(id).label == Label::object())
            .collect();
        assert_eq!(
            candidates.iter().copied().collect::<BTreeSet<_>>(),
            scan.into_iter().collect::<BTreeSet<_>>()
        );
        assert!(find_candidates(&mt, &Label::string("absent")).is_empty());
    }

    #[test]
    fn match_subtree_collects_leaf_id_sets() {
        let corpus = example_corpus();
        let mt = merge_all(&corpus).unwrap();
        let query = parse_query(r#"{"name":"Bob","age":30}"#).unwrap();
        // The inner object is the only candidate that matches.
        let inner = find_candidates(&mt, &Label::object())
            .into_iter()
            .find(|&id| id != MergedTree::ROOT)
            .unwrap();
        let sets = match_subtree(&mt, inner, &query, QueryTree::ROOT).unwrap();
        let mut sets: Vec<Vec<TreeId>> = sets;
        sets.sort();
        assert_eq!(sets, vec![vec![1, 2], vec![2]]);
    }

    #[test]
    fn whole_tree_as_query_matches_itself() {
        let corpus = parse_jsonl(r#"{"a":{"b":[1,2]},"c":"x"}"#).unwrap();
        let mt = merge_all(&corpus).unwrap();
        let query = parse_query(r#"{"a":{"b":[1,2]},"c":"x"}"#).unwrap();
        assert_eq!(mt_search(&mt, &query).ids(), &[1]);
        assert_eq!(naive_search(&corpus, &query).ids(), &[1]);
    }

    #[test]
    fn array_order_is_respected() {
        let corpus = parse_jsonl(concat!(
            r#"{"x":["a","b"]}"#,
            "\n",
            r#"{"y":["b","a"]}"#,
            "\n",
        ))
        .unwrap();
        let forward = parse_query(r#"["a","b"]"#).unwrap();
        let backward = parse_query(r#"["b","a"]"#).unwrap();
        assert_eq!(naive_search(&corpus, &forward).ids(), &[1]);
        assert_eq!(naive_search(&corpus, &backward).ids(), &[2]);
        let mt = merge_all(&corpus).unwrap();
        assert_eq!(mt_search(&mt, &forward).ids(), &[1]);
        assert_eq!(mt_search(&mt, &backward).ids(), &[2]);
    }

    #[test]
    fn array_subsequences_need_not_be_consecutive() {
        let corpus = parse_jsonl(r#"{"x":[1,2,3,4]}"#).unwrap();
        let query = parse_query("[1,3]").unwrap();
        assert_eq!(naive_search(&corpus, &query).ids(), &[1]);
        let rev = parse_query("[3,1]").unwrap();
        assert!(naive_search(&corpus, &rev).is_empty());
    }

    #[test]
    fn object_matching_is_unordered() {
        let corpus = parse_jsonl(r#"{"a":1,"b":2}"#).unwrap();
        let query = parse_query(r#"{"b":2,"a":1}"#).unwrap();
        assert_eq!(naive_search(&corpus, &query).ids(), &[1]);
        let mt = merge_all(&corpus).unwrap();
        assert_eq!(mt_search(&mt, &query).ids(), &[1]);
    }

    #[test]
    fn empty_result_when_label_absent() {
        let corpus = example_corpus();
        let query = parse_query(r#"{"name":"Carol"}"#).unwrap();
        assert!(naive_search(&corpus, &query).is_empty());
        let mt = merge_all(&corpus).unwrap();
        assert!(mt_search(&mt, &query).is_empty());
    }
}
