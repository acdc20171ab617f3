//! The XBW-based index over a normalized merged tree.
//!
//! Construction linearizes the tree into synchronized arrays in one order:
//! nodes sorted (stably, preserving DFS order) by their ancestor label
//! sequence read parent-upward to the root. Under that order all children of
//! one node sit in a contiguous sibling block terminated by a 1 in the
//! "last" bit row, and all blocks whose parents share a label are adjacent,
//! so navigation reduces to rank/select arithmetic:
//!
//! - `labels` — node symbols (wavelet matrix)
//! - `last` — rightmost-sibling flags (one per block end; position 1 is 1)
//! - `leaf` — leaf flags
//! - `parent_labels` — the symbol of each node's parent (0 for the root)
//! - `diff` — flags positions whose ancestor sequence differs from the
//!   previous position's
//! - `first_child_pos` — for each symbol `c`, the first position whose
//!   parent carries `c` (the entry point for sibling-block arithmetic)
//! - `ids` — leaf identifier sets, compacted to leaf ranks
//!
//! A derived companion (not persisted, rebuilt on load) restricts the symbol
//! row to internal nodes so that block counting stays correct when the same
//! label occurs both as a leaf and as an internal node (empty vs. non-empty
//! objects or arrays).

mod build;
mod io;

pub use build::build_xbw;
pub use io::IndexLayout;

use std::collections::BTreeSet;

use crate::label::{Symbol, SymbolTable};
use crate::succinct::{RankSelectBits, WaveletMatrix};
use crate::tree::TreeId;

/// Compacted per-leaf identifier sets, delta-varint encoded with an offset
/// directory for random access by leaf rank.
#[derive(Debug, Clone)]
pub struct IdStore {
    offsets: Vec<u64>,
    payload: Vec<u8>,
}

impl IdStore {
    pub fn from_sets<'a>(sets: impl IntoIterator<Item = &'a [TreeId]>) -> IdStore {
        let mut offsets = Vec::new();
        let mut payload = Vec::new();
        for set in sets {
            offsets.push(payload.len() as u64);
            let mut prev = 0u64;
            for &id in set {
                let delta = id as u64 - prev;
                write_varint(&mut payload, delta);
                prev = id as u64;
            }
        }
        IdStore { offsets, payload }
    }

    pub(crate) fn from_parts(offsets: Vec<u64>, payload: Vec<u8>) -> IdStore {
        IdStore { offsets, payload }
    }

    /// Number of stored sets (= number of leaves).
    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    /// Decodes the set at 0-based index `idx`.
    pub fn get(&self, idx: usize) -> Vec<TreeId> {
        let start = self.offsets[idx] as usize;
        let end = self
            .offsets
            .get(idx + 1)
            .map(|&o| o as usize)
            .unwrap_or(self.payload.len());
        let mut out = Vec::new();
        let mut cursor = start;
        let mut prev = 0u64;
        while cursor < end {
            let (delta, used) = read_varint(&self.payload[cursor..]).expect("valid payload");
            cursor += used;
            prev += delta;
            out.push(prev as TreeId);
        }
        out
    }

    pub(crate) fn offsets(&self) -> &[u64] {
        &self.offsets
    }

    pub(crate) fn payload(&self) -> &[u8] {
        &self.payload
    }
}

pub(crate) fn write_varint(out: &mut Vec<u8>, mut v: u64) {
    loop {
        let mut byte = (v & 0x7F) as u8;
        v >>= 7;
        if v != 0 {
            byte |= 0x80;
        }
        out.push(byte);
        if v == 0 {
            break;
        }
    }
}

/// Returns (value, bytes consumed), or `None` on overrun/overflow.
pub(crate) fn read_varint(bytes: &[u8]) -> Option<(u64, usize)> {
    let mut value = 0u64;
    let mut shift = 0u32;
    for (i, &byte) in bytes.iter().enumerate() {
        if shift >= 64 {
            return None;
        }
        value |= ((byte & 0x7F) as u64) << shift;
        if byte & 0x80 == 0 {
            return Some((value, i + 1));
        }
        shift += 7;
    }
    None
}

/// Raw payload vs. rank-directory bits of the in-memory index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpaceReport {
    pub raw_payload_bits: usize,
    pub directory_bits: usize,
}

/// The index: synchronized succinct arrays plus the symbol table.
#[derive(Debug, Clone)]
pub struct XbwIndex {
    pub(crate) n: usize,
    pub(crate) symtab: SymbolTable,
    pub(crate) labels: WaveletMatrix,
    pub(crate) parent_labels: WaveletMatrix,
    pub(crate) last: RankSelectBits,
    pub(crate) leaf: RankSelectBits,
    pub(crate) diff: RankSelectBits,
    /// `first_child_pos[c]` = first position whose parent label is >= c;
    /// sigma+2 entries, `first_child_pos[sigma+1] = n+1`.
    pub(crate) first_child_pos: Vec<u64>,
    pub(crate) ids: IdStore,
    /// `labels` restricted to internal positions (derived, not persisted).
    pub(crate) internal_labels: WaveletMatrix,
}

impl XbwIndex {
    /// Number of nodes (length of every array).
    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn sigma(&self) -> u32 {
        self.symtab.sigma()
    }

    pub fn symbol_table(&self) -> &SymbolTable {
        &self.symtab
    }

    pub fn leaf_count(&self) -> usize {
        self.leaf.count_ones()
    }

    /// The symbol at position `i` (1-based).
    pub fn label_at(&self, i: usize) -> Symbol {
        self.labels.access(i)
    }

    /// Total occurrences of symbol `c` across all positions.
    pub fn label_occurrences(&self, c: Symbol) -> usize {
        self.labels.rank(c, self.n)
    }

    /// Position of the `k`-th occurrence of symbol `c`.
    pub fn label_position(&self, c: Symbol, k: usize) -> Option<usize> {
        self.labels.select(c, k)
    }

    /// The parent's symbol at position `i`; 0 for the root position.
    pub fn parent_label_at(&self, i: usize) -> Symbol {
        self.parent_labels.access(i)
    }

    pub fn is_leaf(&self, i: usize) -> bool {
        self.leaf.get(i)
    }

    /// The rightmost-sibling flag at position `i` (1 terminates each block).
    pub fn rightmost_flag(&self, i: usize) -> bool {
        self.last.get(i)
    }

    /// The ancestor-sequence change flag at position `i`.
    pub fn diff_flag(&self, i: usize) -> bool {
        self.diff.get(i)
    }

    /// The contiguous region of positions whose parent carries `c`, empty
    /// when `c` never occurs as an internal label.
    pub fn parent_region(&self, c: Symbol) -> (usize, usize) {
        let first = self.first_child_pos[c as usize] as usize;
        let last = self.first_child_pos[c as usize + 1] as usize - 1;
        (first, last)
    }

    /// The sibling block holding the children of the node at position `i`,
    /// or `None` when that node is a leaf.
    pub fn children(&self, i: usize) -> Option<(usize, usize)> {
        self.assert_pos(i);
        if self.leaf.get(i) {
            return None;
        }
        let c = self.labels.access(i);
        let (region_start, _) = self.parent_region(c);
        let blocks_before_region = self.last.rank1(region_start - 1);
        let block_index = self.internal_rank(c, i);
        debug_assert!(block_index >= 1);
        let l = self
            .last
            .select1(blocks_before_region + block_index - 1)
            .expect("block start exists")
            + 1;
        let r = self
            .last
            .select1(blocks_before_region + block_index)
            .expect("block end exists");
        Some((l, r))
    }

    pub fn degree(&self, i: usize) -> usize {
        self.children(i).map(|(l, r)| r - l + 1).unwrap_or(0)
    }

    /// The `k`-th child (1-based) of the node at position `i`.
    pub fn ranked_child(&self, i: usize, k: usize) -> Option<usize> {
        let (l, r) = self.children(i)?;
        (k >= 1 && k <= r - l + 1).then(|| l + k - 1)
    }

    /// The `k`-th child of the node at position `i` carrying label `c`.
    pub fn char_ranked_child(&self, i: usize, c: Symbol, k: usize) -> Option<usize> {
        let (l, r) = self.children(i)?;
        let before = self.labels.rank(c, l - 1);
        let p = self.labels.select(c, before + k)?;
        (p <= r).then_some(p)
    }

    /// The parent position of the node at position `i`; `None` for the root.
    ///
    /// Counts the sibling blocks completed between the start of the parent
    /// label's region and `i`; the parent is the matching-ranked internal
    /// occurrence of that label.
    pub fn parent(&self, i: usize) -> Option<usize> {
        self.assert_pos(i);
        if i == 1 {
            return None;
        }
        let c = self.parent_labels.access(i);
        debug_assert!(c >= 1, "non-root position has a parent label");
        let (region_start, _) = self.parent_region(c);
        let k = self.last.rank1(i - 1) - self.last.rank1(region_start - 1);
        let p = self.internal_select(c, k + 1);
        debug_assert!(p.is_some(), "parent occurrence exists");
        p
    }

    /// The identifier set of the leaf at position `i`; `None` when `i` is
    /// not a leaf.
    pub fn tree_ids(&self, i: usize) -> Option<Vec<TreeId>> {
        self.assert_pos(i);
        if !self.leaf.get(i) {
            return None;
        }
        Some(self.ids.get(self.leaf.rank1(i) - 1))
    }

    /// Union of identifier sets over every leaf at or below position `i`.
    pub fn subtree_ids(&self, i: usize) -> BTreeSet<TreeId> {
        let mut out = BTreeSet::new();
        let mut stack = vec![i];
        while let Some(pos) = stack.pop() {
            match self.children(pos) {
                None => {
                    if let Some(ids) = self.tree_ids(pos) {
                        out.extend(ids);
                    }
                }
                Some((l, r)) => stack.extend(l..=r),
            }
        }
        out
    }

    /// Positions matched by the label path `path`, searched from any starting
    /// node, not only the root.
    ///
    /// The returned range holds the nodes reached by the final label when
    /// those are leaves, and the contiguous block of their children when they
    /// are internal (for a single-label path this is the label's child
    /// region). An empty path matches every position. `None` means no match;
    /// symbols outside the alphabet never match.
    pub fn subpath_search(&self, path: &[Symbol]) -> Option<(usize, usize)> {
        if path.is_empty() {
            return Some((1, self.n));
        }
        if path.len() == 1 {
            let (first, last) = self.checked_region(path[0])?;
            return Some((first, last));
        }
        let (z1, z2) = self.match_node_range(path)?;
        let c = path[path.len() - 1];
        let total = self.labels.rank(c, z2) - self.labels.rank(c, z1 - 1);
        let internal = self.internal_rank(c, z2) - self.internal_rank(c, z1 - 1);
        if internal == total {
            // Every matched node is internal: the reachable positions
            // continue below them.
            self.span_of_children(c, z1, z2)
        } else {
            Some((z1, z2))
        }
    }

    /// The range of positions of nodes labeled `path.last()` whose upward
    /// ancestor labels spell the rest of `path` reversed. Requires
    /// `path.len() >= 2`. This is the form the search engine consumes: the
    /// returned positions are exactly `path.len() - 1` parent steps below a
    /// node labeled `path[0]`.
    pub fn path_node_range(&self, path: &[Symbol]) -> Option<(usize, usize)> {
        assert!(path.len() >= 2, "node ranges need at least two labels");
        self.match_node_range(path)
    }

    fn match_node_range(&self, path: &[Symbol]) -> Option<(usize, usize)> {
        let (mut first, mut last) = self.checked_region(path[0])?;
        for (step, &c) in path.iter().enumerate().skip(1) {
            let k1 = self.labels.rank(c, first - 1);
            let k2 = self.labels.rank(c, last);
            if k2 <= k1 {
                return None;
            }
            let z1 = self.labels.select(c, k1 + 1).expect("occurrence exists");
            let z2 = self.labels.select(c, k2).expect("occurrence exists");
            if step == path.len() - 1 {
                return Some((z1, z2));
            }
            let (f, l) = self.span_of_children(c, z1, z2)?;
            first = f;
            last = l;
        }
        unreachable!("loop returns on the final label")
    }

    /// Contiguous span from the first child of the first internal `c`-match
    /// in `[z1, z2]` to the last child of the last one. `None` when no match
    /// in the range is internal.
    fn span_of_children(&self, c: Symbol, z1: usize, z2: usize) -> Option<(usize, usize)> {
        let int_before = self.internal_rank(c, z1 - 1);
        let int_upto = self.internal_rank(c, z2);
        if int_upto <= int_before {
            return None;
        }
        let first_internal = self.internal_select(c, int_before + 1).expect("internal occurrence");
        let last_internal = self.internal_select(c, int_upto).expect("internal occurrence");
        let first = self.ranked_child(first_internal, 1).expect("internal node has children");
        let (_, last) = self.children(last_internal).expect("internal node has children");
        Some((first, last))
    }

    /// Region lookup rejecting out-of-alphabet symbols and empty regions.
    fn checked_region(&self, c: Symbol) -> Option<(usize, usize)> {
        if c == 0 || c > self.sigma() {
            return None;
        }
        let (first, last) = self.parent_region(c);
        (first <= last).then_some((first, last))
    }

    /// Occurrences of `c` among internal nodes in the first `i` positions.
    fn internal_rank(&self, c: Symbol, i: usize) -> usize {
        self.internal_labels.rank(c, self.leaf.rank0(i))
    }

    /// Position of the `k`-th internal occurrence of `c`.
    fn internal_select(&self, c: Symbol, k: usize) -> Option<usize> {
        let j = self.internal_labels.select(c, k)?;
        self.leaf.select0(j)
    }

    fn assert_pos(&self, i: usize) {
        assert!(i >= 1 && i <= self.n, "position {i} out of range 1..={}", self.n);
    }

    /// In-memory bit accounting across the succinct structures.
    pub fn space_report(&self) -> SpaceReport {
        let mut raw = 0usize;
        let mut dir = 0usize;
        for bits in [&self.last, &self.leaf, &self.diff] {
            raw += bits.len();
            dir += bits.directory_overhead_bits();
        }
        for wm in [&self.labels, &self.parent_labels] {
            raw += wm.len() * wm.levels().len();
            dir += wm.directory_overhead_bits();
        }
        SpaceReport { raw_payload_bits: raw, directory_bits: dir }
    }

    /// Persists the index. See [`io`] for the file format.
    pub fn save<W: std::io::Write>(&self, sink: W) -> std::io::Result<()> {
        io::save(self, sink)
    }

    /// Loads an index previously written by [`XbwIndex::save`].
    pub fn load<R: std::io::Read>(source: R) -> Result<XbwIndex, crate::error::LoadError> {
        io::load(source).map(|(index, _)| index)
    }

    /// Loads an index and reports the byte layout of its file sections.
    pub fn load_with_layout<R: std::io::Read>(
        source: R,
    ) -> Result<(XbwIndex, IndexLayout), crate::error::LoadError> {
        io::load(source)
    }
}
