//! Rank/select dictionary over a plain bit array.
//!
//! The directory is a two-level rank index: one cumulative 64-bit count per
//! 512-bit superblock plus one 16-bit in-superblock prefix per 64-bit word,
//! 37.5% overhead on top of the raw bits. Rank is O(1); select binary-searches
//! the directory and finishes inside one word.

/// An immutable bit array with rank and select support.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankSelectBits {
    len: usize,
    words: Vec<u64>,
    /// Ones before each superblock of 8 words.
    super_ranks: Vec<u64>,
    /// Ones between the superblock start and each word.
    word_ranks: Vec<u16>,
    total_ones: usize,
}

const WORDS_PER_SUPER: usize = 8;

impl RankSelectBits {
    pub fn from_bools(bits: &[bool]) -> RankSelectBits {
        let mut words = vec![0u64; bits.len().div_ceil(64)];
        for (i, &b) in bits.iter().enumerate() {
            if b {
                words[i / 64] |= 1 << (i % 64);
            }
        }
        RankSelectBits::from_words(words, bits.len())
    }

    /// Builds from packed little-endian words. Padding bits beyond `len` in
    /// the last word are cleared.
    pub fn from_words(mut words: Vec<u64>, len: usize) -> RankSelectBits {
        assert!(words.len() == len.div_ceil(64), "word count does not match length");
        if !len.is_multiple_of(64) {
            if let Some(last) = words.last_mut() {
                *last &= (1u64 << (len % 64)) - 1;
            }
        }
        let nw = words.len();
        let mut super_ranks = Vec::with_capacity(nw / WORDS_PER_SUPER + 1);
        let mut word_ranks = Vec::with_capacity(nw + 1);
        let mut total = 0u64;
        let mut in_super = 0u16;
        for (w, &word) in words.iter().enumerate() {
            if w % WORDS_PER_SUPER == 0 {
                super_ranks.push(total);
                in_super = 0;
            }
            word_ranks.push(in_super);
            let ones = word.count_ones();
            in_super += ones as u16;
            total += ones as u64;
        }
        if nw.is_multiple_of(WORDS_PER_SUPER) {
            super_ranks.push(total);
            in_super = 0;
        }
        word_ranks.push(in_super);
        RankSelectBits {
            len,
            words,
            super_ranks,
            word_ranks,
            total_ones: total as usize,
        }
    }

    /// Number of bits.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn count_ones(&self) -> usize {
        self.total_ones
    }

    pub fn count_zeros(&self) -> usize {
        self.len - self.total_ones
    }

    /// The bit at 1-based position `i`.
    pub fn get(&self, i: usize) -> bool {
        assert!(i >= 1 && i <= self.len, "bit position {i} out of range 1..={}", self.len);
        let p = i - 1;
        (self.words[p / 64] >> (p % 64)) & 1 == 1
    }

    /// Ones among the first `i` bits. `i` may be 0 (empty prefix) up to `len`.
    pub fn rank1(&self, i: usize) -> usize {
        assert!(i <= self.len, "rank position {i} out of range 0..={}", self.len);
        let w = i / 64;
        let b = i % 64;
        let mut r = self.super_ranks[w / WORDS_PER_SUPER] as usize + self.word_ranks[w] as usize;
        if b > 0 {
            r += (self.words[w] & ((1u64 << b) - 1)).count_ones() as usize;
        }
        r
    }

    /// Zeros among the first `i` bits.
    pub fn rank0(&self, i: usize) -> usize {
        i - self.rank1(i)
    }

    pub fn rank(&self, bit: bool, i: usize) -> usize {
        if bit {
            self.rank1(i)
        } else {
            self.rank0(i)
        }
    }

    /// 1-based position of the `k`-th one; `None` when fewer than `k` ones
    /// exist (or `k` is 0).
    pub fn select1(&self, k: usize) -> Option<usize> {
        if k == 0 || k > self.total_ones {
            return None;
        }
        // Last superblock whose prefix count is below k.
        let s = partition_point(self.super_ranks.len(), |s| (self.super_ranks[s] as usize) < k) - 1;
        let mut remaining = k - self.super_ranks[s] as usize;
        let start = s * WORDS_PER_SUPER;
        let end = (start + WORDS_PER_SUPER).min(self.words.len());
        for w in start..end {
            let ones = self.words[w].count_ones() as usize;
            if remaining <= ones {
                return Some(w * 64 + select_in_word(self.words[w], remaining as u32) as usize + 1);
            }
            remaining -= ones;
        }
        unreachable!("select directory inconsistent");
    }

    /// 1-based position of the `k`-th zero.
    pub fn select0(&self, k: usize) -> Option<usize> {
        if k == 0 || k > self.count_zeros() {
            return None;
        }
        let zeros_before = |s: usize| s * WORDS_PER_SUPER * 64 - self.super_ranks[s] as usize;
        let s = partition_point(self.super_ranks.len(), |s| zeros_before(s) < k) - 1;
        let mut remaining = k - zeros_before(s);
        let start = s * WORDS_PER_SUPER;
        let end = (start + WORDS_PER_SUPER).min(self.words.len());
        for w in start..end {
            let zeros = 64 - self.words[w].count_ones() as usize;
            if remaining <= zeros {
                return Some(w * 64 + select_in_word(!self.words[w], remaining as u32) as usize + 1);
            }
            remaining -= zeros;
        }
        unreachable!("select directory inconsistent");
    }

    pub fn select(&self, bit: bool, k: usize) -> Option<usize> {
        if bit {
            self.select1(k)
        } else {
            self.select0(k)
        }
    }

    /// Bits used by the rank directory (excludes the raw array).
    pub fn directory_overhead_bits(&self) -> usize {
        self.super_ranks.len() * 64 + self.word_ranks.len() * 16
    }
}

/// First index in `0..len` where `pred` is false; `len` if none.
fn partition_point(len: usize, pred: impl Fn(usize) -> bool) -> usize {
    let mut lo = 0;
    let mut hi = len;
    while lo < hi {
        let mid = (lo + hi) / 2;
        if pred(mid) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo
}

/// 0-based position of the `k`-th set bit of `word`; `k` is 1-based and must
/// not exceed the popcount.
fn select_in_word(mut word: u64, mut k: u32) -> u32 {
    debug_assert!(k >= 1 && k <= word.count_ones());
    let mut pos = 0;
    loop {
        let byte = (word & 0xFF) as u32;
        let cnt = byte.count_ones();
        if k <= cnt {
            let mut b = byte;
            loop {
                let tz = b.trailing_zeros();
                k -= 1;
                if k == 0 {
                    return pos + tz;
                }
                b &= b - 1;
            }
        }
        k -= cnt;
        word >>= 8;
        pos += 8;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    /// Independent model: prefix-sum table plus occurrence lists.
    struct Model {
        prefix_ones: Vec<usize>,
        one_positions: Vec<usize>,
        zero_positions: Vec<usize>,
    }

    impl Model {
        fn new(bits: &[bool]) -> Model {
            let mut prefix_ones = vec![0];
            let mut one_positions = Vec::new();
            let mut zero_positions = Vec::new();
            for (i, &b) in bits.iter().enumerate() {
                prefix_ones.push(prefix_ones[i] + b as usize);
                if b {
                    one_positions.push(i + 1);
                } else {
                    zero_positions.push(i + 1);
                }
            }
            Model { prefix_ones, one_positions, zero_positions }
        }
    }

    fn check_against_model(bits: &[bool]) {
        let rs = RankSelectBits::from_bools(bits);
        let model = Model::new(bits);
        for i in 0..=bits.len() {
            assert_eq!(rs.rank1(i), model.prefix_ones[i], "rank1 at {i}");
            assert_eq!(rs.rank0(i), i - model.prefix_ones[i], "rank0 at {i}");
        }
        for (k, &pos) in model.one_positions.iter().enumerate() {
            assert_eq!(rs.select1(k + 1), Some(pos), "select1 at {}", k + 1);
        }
        for (k, &pos) in model.zero_positions.iter().enumerate() {
            assert_eq!(rs.select0(k + 1), Some(pos), "select0 at {}", k + 1);
        }
        assert_eq!(rs.select1(model.one_positions.len() + 1), None);
        assert_eq!(rs.select0(model.zero_positions.len() + 1), None);
        assert_eq!(rs.select1(0), None);
    }

    #[test]
    fn rank_of_empty_prefix_is_zero() {
        let rs = RankSelectBits::from_bools(&[true, false, true]);
        assert_eq!(rs.rank1(0), 0);
        assert_eq!(rs.rank0(0), 0);
    }

    #[test]
    fn all_ones_saturate() {
        let rs = RankSelectBits::from_bools(&[true; 64]);
        assert_eq!(rs.rank1(64), 64);
        assert_eq!(rs.select1(64), Some(64));
        assert_eq!(rs.select0(1), None);
    }

    #[test]
    fn select_on_all_zero_array_is_none() {
        let rs = RankSelectBits::from_bools(&[false; 100]);
        assert_eq!(rs.select1(1), None);
        assert_eq!(rs.select0(100), Some(100));
    }

    #[test]
    fn first_set_bit() {
        let rs = RankSelectBits::from_bools(&[true, false, true, true, false]);
        assert_eq!(rs.select1(1), Some(1));
        assert_eq!(rs.select1(2), Some(3));
        assert_eq!(rs.select0(1), Some(2));
    }

    #[test]
    fn random_arrays_match_linear_scan() {
        let mut rng = StdRng::seed_from_u64(0x5eed);
        for &n in &[1usize, 63, 64, 65, 511, 512, 513, 1000, 4096] {
            for density in [0.05, 0.5, 0.95] {
                let bits: Vec<bool> = (0..n).map(|_| rng.gen_bool(density)).collect();
                check_against_model(&bits);
            }
        }
    }

    #[test]
    fn rank_select_are_mutually_inverse() {
        let mut rng = StdRng::seed_from_u64(17);
        let bits: Vec<bool> = (0..2000).map(|_| rng.gen_bool(0.3)).collect();
        let rs = RankSelectBits::from_bools(&bits);
        for k in 1..=rs.count_ones() {
            let pos = rs.select1(k).unwrap();
            assert_eq!(rs.rank1(pos), k);
        }
        for i in 1..=bits.len() {
            let r = rs.rank1(i);
            if r > 0 {
                assert!(rs.select1(r).unwrap() <= i);
            }
        }
    }

    #[test]
    fn directory_overhead_is_bounded() {
        let rs = RankSelectBits::from_bools(&vec![true; 100_000]);
        let overhead = rs.directory_overhead_bits() as f64 / 100_000.0;
        assert!(overhead <= 0.40, "overhead {overhead}");
    }

    #[test]
    #[should_panic(expected = "out of range")]
    fn rank_past_end_panics() {
        let rs = RankSelectBits::from_bools(&[true]);
        rs.rank1(2);
    }
}
