//! Shared helpers for integration tests: fixture corpora, an explicit-tree
//! navigation oracle, path-occurrence enumeration, and a literal embedding
//! checker independent of the library's matcher.

#![allow(dead_code)]

use rand::Rng;

use jxbw_core::label::{Label, Symbol, SymbolTable};
use jxbw_core::tree::{JsonTree, NodeId, NormalizedTree, QueryTree};
use jxbw_core::{build_symbol_table, build_xbw, merge_all, normalize, parse_jsonl, XbwIndex};

pub const EXAMPLE_CORPUS: &str = concat!(
    r#"{"person":{"name":"Alice","age":30},"hobbies":["reading","cycling"]}"#,
    "\n",
    r#"{"person":{"name":"Bob","age":30},"hobbies":["reading"]}"#,
    "\n",
);

pub const EXAMPLE_QUERY: &str = r#"{"name":"Bob","age":30}"#;

/// The symbol enumeration used by the navigation fixtures: labels listed in
/// the order that assigns object=1 (A) through Bob=11 (K).
pub fn fixture_table() -> SymbolTable {
    SymbolTable::with_label_order(vec![
        Label::object(),           // A
        Label::key("hobbies"),     // B
        Label::array(),            // C
        Label::string("cycling"),  // D
        Label::string("reading"),  // E
        Label::key("person"),      // F
        Label::key("age"),         // G
        Label::number("30"),       // H
        Label::key("name"),        // I
        Label::string("Alice"),    // J
        Label::string("Bob"),      // K
    ])
}

pub fn build_pipeline(corpus_text: &str) -> (Vec<JsonTree>, NormalizedTree, XbwIndex) {
    let corpus = parse_jsonl(corpus_text).expect("valid corpus");
    let table = build_symbol_table(&corpus);
    build_with_table(corpus, table)
}

pub fn build_pipeline_with_table(
    corpus_text: &str,
    table: SymbolTable,
) -> (Vec<JsonTree>, NormalizedTree, XbwIndex) {
    let corpus = parse_jsonl(corpus_text).expect("valid corpus");
    build_with_table(corpus, table)
}

fn build_with_table(
    corpus: Vec<JsonTree>,
    table: SymbolTable,
) -> (Vec<JsonTree>, NormalizedTree, XbwIndex) {
    let mt = merge_all(&corpus).expect("non-empty corpus");
    let norm = normalize(&mt, &table).expect("all labels in table");
    let index = build_xbw(&norm, table).expect("non-empty tree");
    (corpus, norm, index)
}

/// Navigation oracle over the explicit normalized tree.
///
/// Positions are assigned by materializing every node's parent-upward
/// ancestor symbol sequence and stably sorting the DFS order by it; all
/// navigation answers are read off the explicit node structure, never
/// through rank/select arithmetic.
pub struct ExplicitXbw {
    /// Arena node at each position (index 0 unused).
    pub node_at: Vec<NodeId>,
    /// Position of each arena node.
    pub pos_of: Vec<usize>,
    parent_of: Vec<Option<NodeId>>,
    syms: Vec<Symbol>,
    children: Vec<Vec<NodeId>>,
    ids: Vec<Vec<u32>>,
}

impl ExplicitXbw {
    pub fn new(tree: &NormalizedTree) -> ExplicitXbw {
        let n = tree.len();
        let order = tree.preorder();
        let mut parent_of = vec![None; n];
        let mut syms = vec![0 as Symbol; n];
        let mut children = vec![Vec::new(); n];
        let mut ids = vec![Vec::new(); n];
        for &id in &order {
            let node = tree.node(id);
            syms[id] = node.sym;
            children[id] = node.children.clone();
            ids[id] = node.ids.clone();
            for &c in &node.children {
                parent_of[c] = Some(id);
            }
        }
        let keys: Vec<Vec<Symbol>> = (0..n)
            .map(|id| {
                let mut key = Vec::new();
                let mut cur = parent_of[id];
                while let Some(p) = cur {
                    key.push(syms[p]);
                    cur = parent_of[p];
                }
                key
            })
            .collect();
        let mut sorted = order.clone();
        sorted.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
        let mut node_at = vec![usize::MAX; n + 1];
        let mut pos_of = vec![0usize; n];
        for (i, &id) in sorted.iter().enumerate() {
            node_at[i + 1] = id;
            pos_of[id] = i + 1;
        }
        ExplicitXbw { node_at, pos_of, parent_of, syms, children, ids }
    }

    pub fn len(&self) -> usize {
        self.node_at.len() - 1
    }

    pub fn sym_at(&self, pos: usize) -> Symbol {
        self.syms[self.node_at[pos]]
    }

    pub fn is_leaf(&self, pos: usize) -> bool {
        self.children[self.node_at[pos]].is_empty()
    }

    /// Children of the node at `pos` as positions, ascending; their block is
    /// asserted contiguous.
    pub fn child_positions(&self, pos: usize) -> Vec<usize> {
        let mut positions: Vec<usize> = self.children[self.node_at[pos]]
            .iter()
            .map(|&c| self.pos_of[c])
            .collect();
        positions.sort_unstable();
        if let (Some(&first), Some(&last)) = (positions.first(), positions.last()) {
            assert_eq!(last - first + 1, positions.len(), "sibling block not contiguous");
        }
        positions
    }

    pub fn children_range(&self, pos: usize) -> Option<(usize, usize)> {
        let positions = self.child_positions(pos);
        match (positions.first(), positions.last()) {
            (Some(&f), Some(&l)) => Some((f, l)),
            _ => None,
        }
    }

    pub fn parent(&self, pos: usize) -> Option<usize> {
        self.parent_of[self.node_at[pos]].map(|p| self.pos_of[p])
    }

    pub fn ranked_child(&self, pos: usize, k: usize) -> Option<usize> {
        let positions = self.child_positions(pos);
        (k >= 1 && k <= positions.len()).then(|| positions[k - 1])
    }

    pub fn char_ranked_child(&self, pos: usize, c: Symbol, k: usize) -> Option<usize> {
        let positions: Vec<usize> = self
            .child_positions(pos)
            .into_iter()
            .filter(|&p| self.sym_at(p) == c)
            .collect();
        (k >= 1 && k <= positions.len()).then(|| positions[k - 1])
    }

    pub fn tree_ids(&self, pos: usize) -> Option<Vec<u32>> {
        self.is_leaf(pos).then(|| self.ids[self.node_at[pos]].clone())
    }

    /// All positions of nodes reachable by walking the label sequence `path`
    /// downward from any node (the node itself is the first label).
    pub fn path_end_positions(&self, path: &[Symbol]) -> Vec<usize> {
        let mut out = std::collections::BTreeSet::new();
        for start in 0..self.syms.len() {
            if self.syms[start] != path[0] {
                continue;
            }
            let mut frontier = vec![start];
            for &label in &path[1..] {
                let mut next = Vec::new();
                for &node in &frontier {
                    for &child in &self.children[node] {
                        if self.syms[child] == label {
                            next.push(child);
                        }
                    }
                }
                frontier = next;
                if frontier.is_empty() {
                    break;
                }
            }
            out.extend(frontier.into_iter().map(|id| self.pos_of[id]));
        }
        out.into_iter().collect()
    }

    /// Expected public subpath answer for `path` under the documented
    /// convention: leaf endpoints stay put, internal endpoints step to their
    /// children; single labels answer with the label's child region.
    pub fn expected_subpath(&self, path: &[Symbol]) -> Option<(usize, usize)> {
        if path.is_empty() {
            return Some((1, self.len()));
        }
        if path.len() == 1 {
            let mut region: Vec<usize> = (1..=self.len())
                .filter(|&p| self.parent(p).is_some_and(|pp| self.sym_at(pp) == path[0]))
                .collect();
            region.sort_unstable();
            return match (region.first(), region.last()) {
                (Some(&f), Some(&l)) => {
                    assert_eq!(l - f + 1, region.len(), "child region not contiguous");
                    Some((f, l))
                }
                _ => None,
            };
        }
        let matches = self.path_end_positions(path);
        if matches.is_empty() {
            return None;
        }
        let all_internal = matches.iter().all(|&p| !self.is_leaf(p));
        if all_internal {
            let mut spans: Vec<usize> = matches
                .iter()
                .flat_map(|&p| self.child_positions(p))
                .collect();
            spans.sort_unstable();
            let (f, l) = (*spans.first().unwrap(), *spans.last().unwrap());
            assert_eq!(l - f + 1, spans.len(), "children span not contiguous");
            Some((f, l))
        } else {
            Some((*matches.first().unwrap(), *matches.last().unwrap()))
        }
    }

    /// Expected engine-facing node range: first/last match position.
    pub fn expected_node_range(&self, path: &[Symbol]) -> Option<(usize, usize)> {
        let matches = self.path_end_positions(path);
        match (matches.first(), matches.last()) {
            (Some(&f), Some(&l)) => Some((f, l)),
            _ => None,
        }
    }
}

/// Literal substructure check by explicit mapping enumeration: labels equal,
/// parent-child preserved, object children unordered, array children as an
/// order-preserving subsequence. No memoization, no shortcuts.
pub fn embeds_exhaustive(query: &QueryTree, qn: NodeId, tree: &JsonTree, tn: NodeId) -> bool {
    let q = query.node(qn);
    let t = tree.node(tn);
    if q.label != t.label {
        return false;
    }
    if q.is_leaf() {
        return true;
    }
    if t.is_leaf() {
        return false;
    }
    if q.label.kind() == jxbw_core::LabelKind::Array {
        enumerate_subsequence(query, &q.children, tree, &t.children, 0, 0)
    } else {
        q.children
            .iter()
            .all(|&qc| t.children.iter().any(|&tc| embeds_exhaustive(query, qc, tree, tc)))
    }
}

fn enumerate_subsequence(
    query: &QueryTree,
    qs: &[NodeId],
    tree: &JsonTree,
    ts: &[NodeId],
    qi: usize,
    ti: usize,
) -> bool {
    if qi == qs.len() {
        return true;
    }
    (ti..ts.len()).any(|t| {
        embeds_exhaustive(query, qs[qi], tree, ts[t])
            && enumerate_subsequence(query, qs, tree, ts, qi + 1, t + 1)
    })
}

pub fn naive_by_enumeration(corpus: &[JsonTree], query: &QueryTree) -> Vec<u32> {
    let mut ids = Vec::new();
    for (i, tree) in corpus.iter().enumerate() {
        let hit = (0..tree.len()).any(|tn| embeds_exhaustive(query, QueryTree::ROOT, tree, tn));
        if hit {
            ids.push((i + 1) as u32);
        }
    }
    ids
}

/// Corpus generator for navigation stress tests. Unlike the oracle-class
/// generators this one deliberately emits empty objects, empty arrays, and
/// duplicate array elements, so the same label can occur as both a leaf and
/// an internal node.
pub fn gen_nav_corpus<R: Rng>(lines: usize, rng: &mut R) -> String {
    let mut out = String::new();
    for i in 1..=lines {
        out.push_str(&gen_nav_object(rng, i, 3));
        out.push('\n');
    }
    out
}

fn gen_nav_object<R: Rng>(rng: &mut R, line: usize, depth: usize) -> String {
    let members = rng.gen_range(0..=4);
    let mut parts = Vec::new();
    for _ in 0..members {
        let key = format!("\"k{}\"", rng.gen_range(0..6));
        let value = gen_nav_value(rng, line, depth);
        parts.push(format!("{key}:{value}"));
    }
    format!("{{{}}}", parts.join(","))
}

fn gen_nav_value<R: Rng>(rng: &mut R, line: usize, depth: usize) -> String {
    if depth == 0 {
        return gen_nav_scalar(rng, line);
    }
    match rng.gen_range(0..10) {
        0 | 1 => gen_nav_object(rng, line, depth - 1),
        2 | 3 => {
            let count = rng.gen_range(0..=3);
            let items: Vec<String> =
                (0..count).map(|_| gen_nav_value(rng, line, depth - 1)).collect();
            format!("[{}]", items.join(","))
        }
        _ => gen_nav_scalar(rng, line),
    }
}

fn gen_nav_scalar<R: Rng>(rng: &mut R, line: usize) -> String {
    match rng.gen_range(0..6) {
        0 => format!("{}", rng.gen_range(0..5)),
        1 => format!("\"s{}\"", rng.gen_range(0..5)),
        2 => "true".into(),
        3 => "false".into(),
        4 => "null".into(),
        _ => format!("\"line{line}\""),
    }
}
