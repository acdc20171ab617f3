//! Index construction.
//!
//! A depth-first traversal of the normalized tree emits one record per node
//! (symbol, parent, rightmost-sibling flag, leaf flag, ids). The records are
//! then stably sorted by ancestor label sequence, compared parent-upward, and
//! the synchronized arrays are cut from the sorted order. The ancestor
//! sequences themselves are never materialized: the comparator walks parent
//! links, and the change flags are recomputed the same way after sorting.

use std::cmp::Ordering;

use crate::error::BuildError;
use crate::label::{Symbol, SymbolTable};
use crate::succinct::{RankSelectBits, WaveletMatrix};
use crate::tree::NormalizedTree;

use super::{IdStore, XbwIndex};

pub fn build_xbw(tree: &NormalizedTree, table: SymbolTable) -> Result<XbwIndex, BuildError> {
    if tree.is_empty() {
        return Err(BuildError::EmptyTree);
    }
    let n = tree.len();

    // DFS records, indexed by visit order.
    let order = tree.preorder();
    let mut dfs_of_node = vec![usize::MAX; n];
    for (dfs, &node) in order.iter().enumerate() {
        dfs_of_node[node] = dfs;
    }
    let mut syms = vec![0 as Symbol; n];
    let mut parents = vec![usize::MAX; n]; // parent DFS index; MAX for the root
    let mut is_last = vec![false; n];
    let mut is_leaf = vec![false; n];
    for (dfs, &node) in order.iter().enumerate() {
        let nn = tree.node(node);
        syms[dfs] = nn.sym;
        is_leaf[dfs] = nn.is_leaf();
        for (i, &child) in nn.children.iter().enumerate() {
            let cd = dfs_of_node[child];
            parents[cd] = dfs;
            is_last[cd] = i == nn.children.len() - 1;
        }
    }
    is_last[0] = true; // root convention

    // Compare ancestor label sequences parent-upward; a proper prefix sorts
    // first. Ties keep DFS order (stable sort), which keeps sibling blocks
    // contiguous and in source order.
    let anc_cmp = |a: usize, b: usize| -> Ordering {
        let mut pa = parents[a];
        let mut pb = parents[b];
        loop {
            match (pa == usize::MAX, pb == usize::MAX) {
                (true, true) => return Ordering::Equal,
                (true, false) => return Ordering::Less,
                (false, true) => return Ordering::Greater,
                (false, false) => match syms[pa].cmp(&syms[pb]) {
                    Ordering::Equal => {
                        pa = parents[pa];
                        pb = parents[pb];
                    }
                    unequal => return unequal,
                },
            }
        }
    };

    let mut perm: Vec<usize> = (0..n).collect();
    perm.sort_by(|&a, &b| anc_cmp(a, b));
    debug_assert_eq!(perm[0], 0, "the root's empty ancestor sequence sorts first");

    let label_syms: Vec<u32> = perm.iter().map(|&d| syms[d]).collect();
    let last_bits: Vec<bool> = perm.iter().map(|&d| is_last[d]).collect();
    let leaf_bits: Vec<bool> = perm.iter().map(|&d| is_leaf[d]).collect();
    let pf_syms: Vec<u32> = perm
        .iter()
        .map(|&d| if parents[d] == usize::MAX { 0 } else { syms[parents[d]] })
        .collect();
    let mut diff_bits = vec![false; n];
    diff_bits[0] = true;
    for p in 1..n {
        diff_bits[p] = anc_cmp(perm[p - 1], perm[p]) != Ordering::Equal;
    }

    let sigma = table.sigma();
    let mut counts = vec![0u64; sigma as usize + 1];
    for &c in &pf_syms {
        counts[c as usize] += 1;
    }
    let mut first_child_pos = Vec::with_capacity(sigma as usize + 2);
    let mut acc = 1u64;
    first_child_pos.push(acc); // region of parent label 0 = the root
    for &count in &counts {
        acc += count;
        first_child_pos.push(acc);
    }
    debug_assert_eq!(*first_child_pos.last().unwrap(), n as u64 + 1);

    let ids = IdStore::from_sets(
        perm.iter()
            .zip(&leaf_bits)
            .filter(|&(_, &leaf)| leaf)
            .map(|(&d, _)| tree.node(order[d]).ids.as_slice()),
    );

    let internal_syms: Vec<u32> = label_syms
        .iter()
        .zip(&leaf_bits)
        .filter(|&(_, &leaf)| !leaf)
        .map(|(&s, _)| s)
        .collect();

    let alphabet = sigma + 1; // label values 1..=sigma, parent labels 0..=sigma
    Ok(XbwIndex {
        n,
        symtab: table,
        labels: WaveletMatrix::new(&label_syms, alphabet),
        parent_labels: WaveletMatrix::new(&pf_syms, alphabet),
        last: RankSelectBits::from_bools(&last_bits),
        leaf: RankSelectBits::from_bools(&leaf_bits),
        diff: RankSelectBits::from_bools(&diff_bits),
        first_child_pos,
        ids,
        internal_labels: WaveletMatrix::new(&internal_syms, alphabet),
    })
}

/// Rebuilds the derived internal-label row from the persisted arrays.
pub(super) fn derive_internal_labels(
    labels: &WaveletMatrix,
    leaf: &RankSelectBits,
) -> WaveletMatrix {
    let decoded = labels.decode();
    let internal: Vec<u32> = decoded
        .iter()
        .enumerate()
        .filter(|&(p, _)| !leaf.get(p + 1))
        .map(|(_, &s)| s)
        .collect();
    WaveletMatrix::new(&internal, labels.alphabet())
}
