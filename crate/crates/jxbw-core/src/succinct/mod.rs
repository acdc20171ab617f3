//! Bit-level building blocks: a rank/select dictionary over bit arrays and a
//! wavelet matrix over symbol arrays. Both are immutable after construction
//! and safe to share across threads for reads.
//!
//! Positions are 1-based throughout the public API: `rank(c, i)` counts
//! occurrences in the first `i` elements (`rank(c, 0) = 0`), `select(c, k)`
//! returns the 1-based position of the `k`-th occurrence.

mod bits;
mod wavelet;

pub use bits::RankSelectBits;
pub use wavelet::WaveletMatrix;
