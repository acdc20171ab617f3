//! Wavelet matrix over an integer alphabet.
//!
//! Each level partitions the sequence by one bit of the symbol, most
//! significant first; all levels are stored as flat rank/select bit rows.
//! `access`, `rank`, and `select` walk the levels in O(log alphabet).

use super::RankSelectBits;

#[derive(Debug, Clone)]
pub struct WaveletMatrix {
    len: usize,
    /// Symbol values are in `0..alphabet`.
    alphabet: u32,
    /// Bit rows, most significant bit first.
    levels: Vec<RankSelectBits>,
    /// Zero-bit count per level.
    zeros: Vec<usize>,
}

impl WaveletMatrix {
    pub fn new(values: &[u32], alphabet: u32) -> WaveletMatrix {
        for &v in values {
            assert!(v < alphabet.max(1), "value {v} outside alphabet {alphabet}");
        }
        let nbits = bits_for(alphabet);
        let mut levels = Vec::with_capacity(nbits);
        let mut zeros = Vec::with_capacity(nbits);
        let mut cur: Vec<u32> = values.to_vec();
        for lvl in 0..nbits {
            let shift = nbits - 1 - lvl;
            let bits: Vec<bool> = cur.iter().map(|&v| (v >> shift) & 1 == 1).collect();
            let mut low = Vec::with_capacity(cur.len());
            let mut high = Vec::new();
            for &v in &cur {
                if (v >> shift) & 1 == 1 {
                    high.push(v);
                } else {
                    low.push(v);
                }
            }
            zeros.push(low.len());
            low.extend_from_slice(&high);
            cur = low;
            levels.push(RankSelectBits::from_bools(&bits));
        }
        WaveletMatrix { len: values.len(), alphabet, levels, zeros }
    }

    /// Rebuilds from serialized parts. Returns `None` on inconsistent shapes.
    pub fn from_parts(
        len: usize,
        alphabet: u32,
        levels: Vec<RankSelectBits>,
        zeros: Vec<usize>,
    ) -> Option<WaveletMatrix> {
        if levels.len() != bits_for(alphabet) || zeros.len() != levels.len() {
            return None;
        }
        for (row, &z) in levels.iter().zip(&zeros) {
            if row.len() != len || row.count_zeros() != z {
                return None;
            }
        }
        Some(WaveletMatrix { len, alphabet, levels, zeros })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn alphabet(&self) -> u32 {
        self.alphabet
    }

    pub fn levels(&self) -> &[RankSelectBits] {
        &self.levels
    }

    pub fn zeros(&self) -> &[usize] {
        &self.zeros
    }

    /// The symbol at 1-based position `i`.
    pub fn access(&self, i: usize) -> u32 {
        assert!(i >= 1 && i <= self.len, "position {i} out of range 1..={}", self.len);
        let mut p = i - 1;
        let mut value = 0u32;
        for (row, &z) in self.levels.iter().zip(&self.zeros) {
            let bit = row.get(p + 1);
            value = (value << 1) | bit as u32;
            p = if bit { z + row.rank1(p) } else { p - row.rank1(p) };
        }
        value
    }

    /// Occurrences of `c` among the first `i` positions.
    pub fn rank(&self, c: u32, i: usize) -> usize {
        assert!(i <= self.len, "position {i} out of range 0..={}", self.len);
        if c >= self.alphabet.max(1) {
            return 0;
        }
        if self.levels.is_empty() {
            // Single-symbol alphabet: every position holds 0.
            return i;
        }
        let nbits = self.levels.len();
        let mut lo = 0usize;
        let mut hi = i;
        for (lvl, (row, &z)) in self.levels.iter().zip(&self.zeros).enumerate() {
            let bit = (c >> (nbits - 1 - lvl)) & 1 == 1;
            if bit {
                lo = z + row.rank1(lo);
                hi = z + row.rank1(hi);
            } else {
                lo -= row.rank1(lo);
                hi -= row.rank1(hi);
            }
        }
        hi - lo
    }

    /// 1-based position of the `k`-th occurrence of `c`; `None` when fewer
    /// than `k` occurrences exist.
    pub fn select(&self, c: u32, k: usize) -> Option<usize> {
        if k == 0 || c >= self.alphabet.max(1) {
            return None;
        }
        if self.levels.is_empty() {
            return (k <= self.len).then_some(k);
        }
        if self.rank(c, self.len) < k {
            return None;
        }
        let nbits = self.levels.len();
        // Walk down recording the left boundary of the c-run per level.
        let mut starts = vec![0usize; nbits];
        let mut lo = 0usize;
        for (lvl, (row, &z)) in self.levels.iter().zip(&self.zeros).enumerate() {
            starts[lvl] = lo;
            let bit = (c >> (nbits - 1 - lvl)) & 1 == 1;
            lo = if bit { z + row.rank1(lo) } else { lo - row.rank1(lo) };
        }
        // Walk back up from the k-th slot of the bottom run.
        let mut p = lo + (k - 1);
        for lvl in (0..nbits).rev() {
            let row = &self.levels[lvl];
            let bit = (c >> (nbits - 1 - lvl)) & 1 == 1;
            p = if bit {
                row.select1(p - self.zeros[lvl] + 1)? - 1
            } else {
                row.select0(p + 1)? - 1
            };
        }
        Some(p + 1)
    }

    /// Reconstructs the underlying symbol array.
    pub fn decode(&self) -> Vec<u32> {
        (1..=self.len).map(|i| self.access(i)).collect()
    }

    /// Bits used by the level directories (excludes the raw level rows).
    pub fn directory_overhead_bits(&self) -> usize {
        self.levels.iter().map(|r| r.directory_overhead_bits()).sum()
    }
}

fn bits_for(alphabet: u32) -> usize {
    if alphabet <= 1 {
        0
    } else {
        (32 - (alphabet - 1).leading_zeros()) as usize
    }
}
