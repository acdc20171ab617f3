//! Substructure search over the index.
//!
//! A query runs in three steps. Step 1 decomposes the query tree into its
//! root-to-leaf label paths and finds, for every path, the contiguous range
//! of index positions whose upward ancestor labels spell that path. Step 2
//! walks each ranged position up `|path| - 1` parents and intersects the
//! ancestor sets across paths; the survivors are the candidate subtree roots.
//! Step 3 collects line identifiers under each root — by re-descending the
//! paths when the query has no arrays, or by structural matching with
//! position-order constraints when it does — intersects per root, and unions
//! across roots.
//!
//! Identifier aggregation: within one root, sets collected for sibling
//! constraints (object children, query paths) are unioned over alternative
//! matching children first and intersected across constraints; array elements
//! intersect within one complete order-respecting assignment and union over
//! assignments.

use std::collections::BTreeSet;

use crate::baseline::ResultSet;
use crate::label::{LabelKind, Symbol, SymbolTable};
use crate::tree::{NodeId, QueryTree, TreeId};
use crate::xbw::XbwIndex;

/// The root-to-leaf symbol paths of a query, in DFS order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryPaths {
    pub paths: Vec<Vec<Symbol>>,
}

impl QueryPaths {
    pub fn count(&self) -> usize {
        self.paths.len()
    }

    pub fn mean_depth(&self) -> f64 {
        if self.paths.is_empty() {
            0.0
        } else {
            self.paths.iter().map(|p| p.len()).sum::<usize>() as f64 / self.paths.len() as f64
        }
    }
}

/// Counters recorded for every search, for benchmarking and reporting.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct QueryStats {
    /// Number of root-to-leaf paths in the query.
    pub path_count: usize,
    /// Total width of the matched position ranges across paths.
    pub matched_positions: usize,
    /// Number of validated subtree root positions.
    pub root_candidates: usize,
    /// Mean query path depth.
    pub mean_depth: f64,
    /// Mean children probed per expanded node during structural matching
    /// (0 when the structural matcher did not run).
    pub mean_branching: f64,
}

/// Intermediate artifacts of one search, for inspection and tests.
#[derive(Debug, Clone, Default)]
pub struct SearchTrace {
    pub paths: Vec<Vec<Symbol>>,
    pub ranges: Vec<(usize, usize)>,
    pub root_positions: Vec<usize>,
    /// For path-collected roots: the per-path id sets, per root.
    pub per_root_path_ids: Vec<(usize, Vec<Vec<TreeId>>)>,
}

/// Decomposes `query` into all root-to-leaf symbol paths. `None` when some
/// query label is absent from the table — the query then trivially has no
/// match.
pub fn decompose_paths(query: &QueryTree, table: &SymbolTable) -> Option<QueryPaths> {
    if query.is_empty() {
        return Some(QueryPaths { paths: Vec::new() });
    }
    let syms = resolve_symbols(query, table)?;
    let mut paths = Vec::new();
    let mut stack: Vec<(NodeId, Vec<Symbol>)> = vec![(QueryTree::ROOT, vec![syms[QueryTree::ROOT]])];
    // Explicit stack, popping children in reverse to keep DFS order.
    while let Some((node, prefix)) = stack.pop() {
        let n = query.node(node);
        if n.is_leaf() {
            paths.push(prefix);
            continue;
        }
        for &child in n.children.iter().rev() {
            let mut next = prefix.clone();
            next.push(syms[child]);
            stack.push((node_marker(child), next));
        }
    }
    Some(QueryPaths { paths })
}

// Stack entries store the child id directly; helper exists only to keep the
// tuple construction readable.
fn node_marker(id: NodeId) -> NodeId {
    id
}

fn resolve_symbols(query: &QueryTree, table: &SymbolTable) -> Option<Vec<Symbol>> {
    query.nodes().iter().map(|n| table.lookup(&n.label)).collect()
}

/// Ancestor positions exactly `path.len() - 1` parent steps above every
/// position in `range`, deduplicated.
pub fn comp_ancestors(index: &XbwIndex, range: (usize, usize), path: &[Symbol]) -> BTreeSet<usize> {
    let steps = path.len().saturating_sub(1);
    let mut ancestors = BTreeSet::new();
    'positions: for mut pos in range.0..=range.1 {
        for _ in 0..steps {
            match index.parent(pos) {
                Some(p) => pos = p,
                None => continue 'positions,
            }
        }
        ancestors.insert(pos);
    }
    ancestors
}

/// Collects per-path identifier sets reachable from `root_pos` by descending
/// each path (the path's first symbol is `root_pos` itself). Returns `None`
/// as soon as any path reaches no identifiers.
pub fn collect_path_matching_ids(
    index: &XbwIndex,
    root_pos: usize,
    paths: &[Vec<Symbol>],
) -> Option<Vec<BTreeSet<TreeId>>> {
    let mut sets = Vec::with_capacity(paths.len());
    for path in paths {
        debug_assert_eq!(index.label_at(root_pos), path[0]);
        let mut frontier: BTreeSet<usize> = BTreeSet::from([root_pos]);
        for &label in &path[1..] {
            let mut next = BTreeSet::new();
            for &cur in &frontier {
                let mut k = 1;
                while let Some(child) = index.char_ranked_child(cur, label, k) {
                    next.insert(child);
                    k += 1;
                }
            }
            frontier = next;
            if frontier.is_empty() {
                break;
            }
        }
        let mut path_ids = BTreeSet::new();
        for &pos in &frontier {
            match index.tree_ids(pos) {
                Some(ids) => path_ids.extend(ids),
                // The path ended on an internal node (a container-valued
                // query leaf): any line below it contains that container.
                None => path_ids.extend(index.subtree_ids(pos)),
            }
        }
        if path_ids.is_empty() {
            return None;
        }
        sets.push(path_ids);
    }
    Some(sets)
}

/// Structural match of the query subtree at `qn` against position `pos`.
/// Returns one id set per top-level constraint for the caller to intersect,
/// or `None` on mismatch.
pub fn struct_match(
    index: &XbwIndex,
    pos: usize,
    query: &QueryTree,
    qn: NodeId,
) -> Option<Vec<BTreeSet<TreeId>>> {
    let mut ctx = MatchCtx::new(index, query)?;
    ctx.struct_sets(pos, qn)
}

/// Matches query array elements against the children of `pos` as an
/// order-preserving subsequence. Returns the union over complete assignments
/// of each assignment's intersected id set; `None` when no assignment exists.
pub fn array_match(
    index: &XbwIndex,
    pos: usize,
    query: &QueryTree,
    q_children: &[NodeId],
) -> Option<BTreeSet<TreeId>> {
    let mut ctx = MatchCtx::new(index, query)?;
    ctx.array_ids(pos, q_children)
}

/// One level of the array recursion: matches `q_children[q_idx..]` (1-based
/// `q_idx`) against children of `pos` at positions strictly above `min_pos`.
/// Returns `None` when all elements are already matched (the neutral value
/// for intersection), `Some` with the union over assignments otherwise.
pub fn recursive_array_match(
    index: &XbwIndex,
    pos: usize,
    query: &QueryTree,
    q_children: &[NodeId],
    q_idx: usize,
    min_pos: usize,
) -> Option<BTreeSet<TreeId>> {
    let mut ctx = MatchCtx::new(index, query)?;
    match ctx.array_suffix(pos, q_children, q_idx - 1, min_pos) {
        SuffixIds::All => None,
        SuffixIds::Ids(ids) => Some(ids),
    }
}

/// Matches query object children against the children of `pos`, unordered:
/// one id set per query child, each the union over same-labeled children.
/// Empty sets propagate mismatch through the caller's intersection.
pub fn object_match(
    index: &XbwIndex,
    pos: usize,
    query: &QueryTree,
    q_children: &[NodeId],
) -> Vec<BTreeSet<TreeId>> {
    match MatchCtx::new(index, query) {
        Some(mut ctx) => ctx.object_sets(pos, q_children),
        None => q_children.iter().map(|_| BTreeSet::new()).collect(),
    }
}

/// Runs the full three-step search.
pub fn substructure_search(index: &XbwIndex, query: &QueryTree) -> (ResultSet, QueryStats) {
    search_impl(index, query, None)
}

/// As [`substructure_search`], also returning the intermediate artifacts.
pub fn substructure_search_traced(
    index: &XbwIndex,
    query: &QueryTree,
) -> (ResultSet, QueryStats, SearchTrace) {
    let mut trace = SearchTrace::default();
    let (result, stats) = search_impl(index, query, Some(&mut trace));
    (result, stats, trace)
}

fn search_impl(
    index: &XbwIndex,
    query: &QueryTree,
    mut trace: Option<&mut SearchTrace>,
) -> (ResultSet, QueryStats) {
    let mut stats = QueryStats::default();
    if query.is_empty() {
        return (ResultSet::default(), stats);
    }

    let table = index.symbol_table();
    let Some(paths) = decompose_paths(query, table) else {
        // Some query label never occurs in the corpus.
        return (ResultSet::default(), stats);
    };
    stats.path_count = paths.count();
    stats.mean_depth = paths.mean_depth();
    if let Some(t) = trace.as_deref_mut() {
        t.paths = paths.paths.clone();
    }

    // A single-node query needs no ancestor walk: every occurrence of its
    // label is a match, contributing the ids at (or below) that position.
    if query.len() == 1 {
        let c = paths.paths[0][0];
        let occurrences = index.label_occurrences(c);
        stats.matched_positions = occurrences;
        stats.root_candidates = occurrences;
        let mut ids = BTreeSet::new();
        for k in 1..=occurrences {
            let pos = index.label_position(c, k).expect("occurrence exists");
            match index.tree_ids(pos) {
                Some(leaf_ids) => ids.extend(leaf_ids),
                None => ids.extend(index.subtree_ids(pos)),
            }
        }
        return (ids.into(), stats);
    }

    // Step 1: per-path position ranges.
    let mut ranges = Vec::with_capacity(paths.count());
    for path in &paths.paths {
        match index.path_node_range(path) {
            Some(range) => ranges.push(range),
            None => return (ResultSet::default(), stats),
        }
    }
    stats.matched_positions = ranges.iter().map(|&(f, l)| l - f + 1).sum();
    if let Some(t) = trace.as_deref_mut() {
        t.ranges = ranges.clone();
    }

    // Step 2: common subtree roots.
    let mut roots: Option<BTreeSet<usize>> = None;
    for (range, path) in ranges.iter().zip(&paths.paths) {
        let ancestors = comp_ancestors(index, *range, path);
        roots = Some(match roots {
            None => ancestors,
            Some(acc) => acc.intersection(&ancestors).copied().collect(),
        });
        if roots.as_ref().is_some_and(BTreeSet::is_empty) {
            break;
        }
    }
    let roots = roots.unwrap_or_default();
    stats.root_candidates = roots.len();
    if let Some(t) = trace.as_deref_mut() {
        t.root_positions = roots.iter().copied().collect();
    }
    if roots.is_empty() {
        return (ResultSet::default(), stats);
    }

    // Step 3: adaptive id collection.
    let with_arrays = query.contains_array();
    let mut all_matching: BTreeSet<TreeId> = BTreeSet::new();
    let mut ctx = MatchCtx::new(index, query).expect("symbols already resolved");
    for &root_pos in &roots {
        let per_root = if with_arrays {
            ctx.struct_sets(root_pos, QueryTree::ROOT)
        } else {
            let sets = collect_path_matching_ids(index, root_pos, &paths.paths);
            if let (Some(t), Some(sets)) = (trace.as_deref_mut(), &sets) {
                t.per_root_path_ids
                    .push((root_pos, sets.iter().map(|s| s.iter().copied().collect()).collect()));
            }
            sets
        };
        if let Some(sets) = per_root {
            if let Some(ids) = intersect_sets(&sets) {
                all_matching.extend(ids);
            }
        }
    }
    stats.mean_branching = ctx.mean_branching();
    (all_matching.into(), stats)
}

fn intersect_sets(sets: &[BTreeSet<TreeId>]) -> Option<BTreeSet<TreeId>> {
    let (first, rest) = sets.split_first()?;
    let mut acc = first.clone();
    for set in rest {
        acc = acc.intersection(set).copied().collect();
        if acc.is_empty() {
            break;
        }
    }
    Some(acc)
}

/// Union over assignments for an array suffix. `All` is the neutral result
/// when no elements remain to match.
enum SuffixIds {
    All,
    Ids(BTreeSet<TreeId>),
}

/// Shared state for structural matching: pre-resolved query symbols plus
/// branching counters.
struct MatchCtx<'a> {
    index: &'a XbwIndex,
    query: &'a QueryTree,
    qsyms: Vec<Symbol>,
    expansions: u64,
    probes: u64,
}

impl<'a> MatchCtx<'a> {
    fn new(index: &'a XbwIndex, query: &'a QueryTree) -> Option<MatchCtx<'a>> {
        let qsyms = resolve_symbols(query, index.symbol_table())?;
        Some(MatchCtx { index, query, qsyms, expansions: 0, probes: 0 })
    }

    fn mean_branching(&self) -> f64 {
        if self.expansions == 0 {
            0.0
        } else {
            self.probes as f64 / self.expansions as f64
        }
    }

    /// Top-level structural match: per-constraint sets for the caller.
    fn struct_sets(&mut self, pos: usize, qn: NodeId) -> Option<Vec<BTreeSet<TreeId>>> {
        if self.index.label_at(pos) != self.qsyms[qn] {
            return None;
        }
        let q = self.query.node(qn);
        if q.is_leaf() {
            return Some(vec![self.leaf_ids(pos)]);
        }
        if q.label.kind() == LabelKind::Array {
            let children = q.children.clone();
            self.array_ids(pos, &children).map(|ids| vec![ids])
        } else {
            let children = q.children.clone();
            Some(self.object_sets(pos, &children))
        }
    }

    /// Full match of one query subtree, already intersected: the ids of
    /// lines that carry the whole subtree at `pos`.
    fn ids_match(&mut self, pos: usize, qn: NodeId) -> Option<BTreeSet<TreeId>> {
        let sets = self.struct_sets(pos, qn)?;
        let ids = intersect_sets(&sets)?;
        if ids.is_empty() {
            return None;
        }
        Some(ids)
    }

    fn leaf_ids(&self, pos: usize) -> BTreeSet<TreeId> {
        match self.index.tree_ids(pos) {
            Some(ids) => ids.into_iter().collect(),
            None => self.index.subtree_ids(pos),
        }
    }

    fn object_sets(&mut self, pos: usize, q_children: &[NodeId]) -> Vec<BTreeSet<TreeId>> {
        let mut sets = Vec::with_capacity(q_children.len());
        for &qc in q_children {
            let label = self.qsyms[qc];
            let mut union = BTreeSet::new();
            self.expansions += 1;
            let mut k = 1;
            while let Some(child) = self.index.char_ranked_child(pos, label, k) {
                self.probes += 1;
                if let Some(ids) = self.ids_match(child, qc) {
                    union.extend(ids);
                }
                k += 1;
            }
            sets.push(union);
        }
        sets
    }

    fn array_ids(&mut self, pos: usize, q_children: &[NodeId]) -> Option<BTreeSet<TreeId>> {
        if self.index.degree(pos) < q_children.len() {
            return None; // not enough children to host the query array
        }
        match self.array_suffix(pos, q_children, 0, 0) {
            SuffixIds::All => None, // empty query arrays are leaves, not handled here
            SuffixIds::Ids(ids) => (!ids.is_empty()).then_some(ids),
        }
    }

    /// Matches `q_children[qi..]` against children of `pos` whose positions
    /// exceed `min_pos`, in increasing position order.
    fn array_suffix(
        &mut self,
        pos: usize,
        q_children: &[NodeId],
        qi: usize,
        min_pos: usize,
    ) -> SuffixIds {
        if qi >= q_children.len() {
            return SuffixIds::All;
        }
        let target = self.qsyms[q_children[qi]];
        let mut acc = BTreeSet::new();
        self.expansions += 1;
        let mut k = 1;
        while let Some(child_pos) = self.index.char_ranked_child(pos, target, k) {
            k += 1;
            self.probes += 1;
            if child_pos <= min_pos {
                continue; // violates element order
            }
            if let Some(current) = self.ids_match(child_pos, q_children[qi]) {
                match self.array_suffix(pos, q_children, qi + 1, child_pos) {
                    SuffixIds::All => acc.extend(current),
                    SuffixIds::Ids(rest) => acc.extend(current.intersection(&rest).copied()),
                }
            }
        }
        SuffixIds::Ids(acc)
    }
}
