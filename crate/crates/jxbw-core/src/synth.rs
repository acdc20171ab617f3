//! Query sampling and synthetic corpora.
//!
//! Verification and benchmarking need two query populations: guaranteed hits
//! (connected subtrees sampled from corpus lines, so the pattern occurs at
//! least once) and guaranteed misses (hit queries with one leaf mutated until
//! the per-line oracle reports no match).
//!
//! The corpus generators stay inside the class where all three searchers
//! agree: no empty objects or arrays, sibling labels distinct within a line,
//! and array element values salted per line so arrays reached through the
//! same label path never share element labels across lines.

use rand::Rng;

use crate::baseline::naive_search;
use crate::label::{Label, LabelKind};
use crate::tree::{JsonTree, NodeId, QueryNode, QueryTree};

/// Samples a connected subtree of `tree` as a query, with depth (in nodes)
/// within `[min_depth, max_depth]`. Containers in the sample always keep at
/// least one child; key nodes keep their value. Array children are kept as an
/// order-preserving subsequence, so the query matches its source line.
pub fn sample_query<R: Rng>(
    tree: &JsonTree,
    rng: &mut R,
    min_depth: usize,
    max_depth: usize,
) -> Option<QueryTree> {
    assert!(min_depth >= 1 && min_depth <= max_depth);
    let depths = subtree_depths(tree);
    let candidates: Vec<NodeId> = (0..tree.len())
        .filter(|&id| tree.node(id).label.kind() != LabelKind::Key && depths[id] >= min_depth)
        .collect();
    if candidates.is_empty() {
        return None;
    }
    for _ in 0..32 {
        let root = candidates[rng.gen_range(0..candidates.len())];
        let budget = rng.gen_range(min_depth..=max_depth.min(depths[root]));
        let mut nodes = Vec::new();
        if build_sample(tree, root, budget, rng, &mut nodes).is_some() {
            let query = QueryTree::from_nodes(nodes);
            if query.depth() >= min_depth {
                return Some(query);
            }
        }
    }
    None
}

/// Samples a hit query from a uniformly chosen line of `corpus`.
pub fn sample_hit_query<R: Rng>(
    corpus: &[JsonTree],
    rng: &mut R,
    min_depth: usize,
    max_depth: usize,
) -> Option<QueryTree> {
    if corpus.is_empty() {
        return None;
    }
    for _ in 0..16 {
        let line = rng.gen_range(0..corpus.len());
        if let Some(q) = sample_query(&corpus[line], rng, min_depth, max_depth) {
            return Some(q);
        }
    }
    None
}

/// Samples a query guaranteed to match nothing: a hit query with one scalar
/// leaf rewritten. Mutations to labels seen elsewhere in the corpus are kept
/// only when the per-line searcher confirms the miss; otherwise the leaf gets
/// a fresh label that cannot occur (the generators never emit `\u{27c2}`).
pub fn sample_miss_query<R: Rng>(
    corpus: &[JsonTree],
    rng: &mut R,
    min_depth: usize,
    max_depth: usize,
) -> Option<QueryTree> {
    let scalar_pool = collect_scalar_labels(corpus, 64);
    for _ in 0..12 {
        let mut query = sample_hit_query(corpus, rng, min_depth, max_depth)?;
        if !scalar_pool.is_empty() && rng.gen_bool(0.5) {
            let replacement = scalar_pool[rng.gen_range(0..scalar_pool.len())].clone();
            if mutate_random_scalar_leaf(&mut query, rng, replacement)
                && naive_search(corpus, &query).is_empty()
            {
                return Some(query);
            }
        } else {
            let fresh = Label::string(format!("\u{27c2}miss\u{27c2}{:016x}", rng.gen::<u64>()));
            if mutate_random_scalar_leaf(&mut query, rng, fresh) {
                return Some(query);
            }
        }
    }
    None
}

fn subtree_depths(tree: &JsonTree) -> Vec<usize> {
    let mut depths = vec![1usize; tree.len()];
    // Preorder reversed visits children before parents.
    for &id in tree.preorder().iter().rev() {
        let node = tree.node(id);
        if !node.is_leaf() {
            depths[id] = 1 + node.children.iter().map(|&c| depths[c]).max().unwrap();
        }
    }
    depths
}

fn build_sample<R: Rng>(
    tree: &JsonTree,
    id: NodeId,
    budget: usize,
    rng: &mut R,
    out: &mut Vec<QueryNode>,
) -> Option<NodeId> {
    if budget == 0 {
        return None;
    }
    let node = tree.node(id);
    if node.is_leaf() {
        out.push(QueryNode { label: node.label.clone(), children: Vec::new() });
        return Some(out.len() - 1);
    }
    if budget < 2 {
        // Cutting below a container or key would leave an empty container
        // leaf, which over-matches; refuse instead.
        return None;
    }
    let self_id = out.len();
    out.push(QueryNode { label: node.label.clone(), children: Vec::new() });
    let mut kept = Vec::new();
    match node.label.kind() {
        LabelKind::Key => {
            match build_sample(tree, node.children[0], budget - 1, rng, out) {
                Some(c) => kept.push(c),
                None => {
                    out.truncate(self_id);
                    return None;
                }
            }
        }
        _ => {
            const MAX_KEPT: usize = 3;
            for &child in &node.children {
                if kept.len() >= MAX_KEPT {
                    break;
                }
                if rng.gen_bool(0.45) {
                    let mark = out.len();
                    match build_sample(tree, child, budget - 1, rng, out) {
                        Some(c) => kept.push(c),
                        None => out.truncate(mark),
                    }
                }
            }
            if kept.is_empty() {
                // Coin flips kept nothing; force one child, starting from a
                // random offset so single-child samples stay uniform-ish.
                let len = node.children.len();
                let start = rng.gen_range(0..len);
                for i in 0..len {
                    let child = node.children[(start + i) % len];
                    let mark = out.len();
                    match build_sample(tree, child, budget - 1, rng, out) {
                        Some(c) => {
                            kept.push(c);
                            break;
                        }
                        None => out.truncate(mark),
                    }
                }
            }
        }
    }
    if kept.is_empty() {
        out.truncate(self_id);
        return None;
    }
    out[self_id].children = kept;
    Some(self_id)
}

fn collect_scalar_labels(corpus: &[JsonTree], cap: usize) -> Vec<Label> {
    let mut seen = std::collections::BTreeSet::new();
    for tree in corpus {
        for label in tree.labels() {
            if label.is_scalar() {
                seen.insert(label.clone());
                if seen.len() >= cap {
                    return seen.into_iter().collect();
                }
            }
        }
    }
    seen.into_iter().collect()
}

fn mutate_random_scalar_leaf<R: Rng>(query: &mut QueryTree, rng: &mut R, label: Label) -> bool {
    let scalar_leaves: Vec<NodeId> = (0..query.len())
        .filter(|&id| query.node(id).is_leaf() && query.node(id).label.is_scalar())
        .collect();
    if scalar_leaves.is_empty() {
        return false;
    }
    let target = scalar_leaves[rng.gen_range(0..scalar_leaves.len())];
    if query.node(target).label == label {
        return false;
    }
    query.nodes[target].label = label;
    true
}

// ---------------------------------------------------------------------------
// Synthetic corpora
// ---------------------------------------------------------------------------

/// Structurally similar lines: a fixed key schema with values drawn from
/// small pools, so the merged tree collapses heavily.
pub fn gen_shared_schema_corpus<R: Rng>(lines: usize, keys: usize, rng: &mut R) -> Vec<String> {
    (0..lines)
        .map(|_| {
            let mut s = String::from("{");
            for k in 0..keys {
                if k > 0 {
                    s.push(',');
                }
                let v = rng.gen_range(0..5);
                match k % 3 {
                    0 => s.push_str(&format!("\"f{k}\":\"v{v}\"")),
                    1 => s.push_str(&format!("\"f{k}\":{v}")),
                    _ => s.push_str(&format!("\"f{k}\":{}", v % 2 == 0)),
                }
            }
            s.push('}');
            s
        })
        .collect()
}

/// Lines with pairwise disjoint labels below the root: nothing merges except
/// the shared object root.
pub fn gen_disjoint_corpus(lines: usize) -> Vec<String> {
    (1..=lines)
        .map(|i| format!("{{\"only{i}a\":{},\"only{i}b\":\"u{i}\"}}", i * 10))
        .collect()
}

/// Mixed objects, arrays, and scalars within the exact-oracle class: no
/// empty containers, distinct sibling labels, line-salted array elements.
pub fn gen_mixed_corpus<R: Rng>(lines: usize, rng: &mut R) -> Vec<String> {
    let cities = ["tokyo", "osaka", "kyoto", "nara", "sendai", "kobe"];
    let names = ["ann", "bob", "cho", "dee", "eli", "fay", "gus", "hal"];
    (1..=lines)
        .map(|i| {
            let mut members: Vec<String> = Vec::new();
            members.push(format!("\"name\":\"{}\"", names[rng.gen_range(0..names.len())]));
            members.push(format!("\"rank\":{}", rng.gen_range(0..25)));
            if rng.gen_bool(0.5) {
                members.push(format!("\"active\":{}", rng.gen_bool(0.5)));
            }
            if rng.gen_bool(0.3) {
                members.push("\"note\":null".to_string());
            }
            if rng.gen_bool(0.7) {
                let mut meta = format!(
                    "\"city\":\"{}\",\"zip\":{}",
                    cities[rng.gen_range(0..cities.len())],
                    rng.gen_range(100..120)
                );
                if rng.gen_bool(0.4) {
                    meta.push_str(&format!(
                        ",\"geo\":{{\"lat\":{}}}",
                        rng.gen_range(30..40)
                    ));
                }
                members.push(format!("\"meta\":{{{meta}}}"));
            }
            if rng.gen_bool(0.6) {
                let count = rng.gen_range(1..=4);
                let tags: Vec<String> =
                    (0..count).map(|j| format!("\"t{i}_{j}\"")).collect();
                members.push(format!("\"tags\":[{}]", tags.join(",")));
            }
            if rng.gen_bool(0.4) {
                let count = rng.gen_range(1..=3);
                let nums: Vec<String> =
                    (0..count).map(|j| format!("{}", i * 1000 + j)).collect();
                members.push(format!("\"nums\":[{}]", nums.join(",")));
            }
            format!("{{{}}}", members.join(","))
        })
        .collect()
}

/// Wide lines for latency benchmarks: at least 20 keys, half with pooled
/// values (heavy sharing), half with line-unique values (a large merged
/// tree for the traversal baselines to walk).
pub fn gen_bench_corpus<R: Rng>(lines: usize, rng: &mut R) -> Vec<String> {
    (1..=lines)
        .map(|i| {
            let mut members: Vec<String> = Vec::new();
            for k in 0..9 {
                members.push(format!("\"p{k}\":\"w{}\"", rng.gen_range(0..40)));
            }
            for k in 0..9 {
                members.push(format!("\"u{k}\":\"x{k}-{i}\""));
            }
            members.push(format!(
                "\"nest\":{{\"shared\":{},\"own\":\"n-{i}\"}}",
                rng.gen_range(0..10)
            ));
            members.push(format!("\"tags\":[\"g{i}_0\",\"g{i}_1\"]"));
            format!("{{{}}}", members.join(","))
        })
        .collect()
}
