//! Substructure search over JSONL corpora.
//!
//! A JSONL file is parsed into one labeled tree per line, the trees are merged
//! into a single tree whose shared root paths are collapsed (leaves remember
//! which lines contributed them), and the merged tree is linearized into a
//! set of rank/select-indexed arrays that answer tree navigation and subpath
//! queries without touching the original trees. Substructure queries — "which
//! lines contain this JSON value as a substructure" — run against that index
//! by decomposing the query into root-to-leaf label paths.
//!
//! Two traversal-based searchers ([`baseline::naive_search`] over the per-line
//! trees and [`baseline::mt_search`] over the merged tree) are kept as
//! correctness oracles and benchmark baselines.
//!
//! # Module layout
//!
//! - [`label`] — node labels, label ordering, and the label ↔ symbol table
//! - [`tree`] — per-line trees, query trees, merged trees
//! - [`parse`] — JSONL and query parsing (order- and duplicate-preserving)
//! - [`merge`] — pairwise and divide-and-conquer tree merging
//! - [`normalize`] — symbol relabeling and child ordering for index build
//! - [`baseline`] — the two traversal searchers used as oracles
//! - [`succinct`] — rank/select bit vectors and the wavelet matrix
//! - [`xbw`] — index construction, navigation operations, persistence
//! - [`engine`] — the path-decomposition substructure search
//! - [`synth`] — query sampling and synthetic corpora for verification

pub mod baseline;
pub mod engine;
pub mod error;
pub mod label;
pub mod merge;
pub mod normalize;
pub mod parse;
pub mod succinct;
pub mod synth;
pub mod tree;
pub mod xbw;

pub use baseline::{mt_search, naive_search, ResultSet};
pub use engine::{substructure_search, QueryStats, SearchTrace};
pub use error::{BuildError, LoadError, MergeError, NormalizeError, ParseError};
pub use label::{Label, LabelKind, Symbol, SymbolTable};
pub use merge::{merge_all, merge_stats, merge_trees, MergeStats};
pub use normalize::normalize;
pub use parse::{build_symbol_table, parse_jsonl, parse_jsonl_line, parse_query};
pub use tree::{JsonTree, MergedTree, NormalizedTree, QueryTree, TreeId};
pub use xbw::{build_xbw, XbwIndex};
