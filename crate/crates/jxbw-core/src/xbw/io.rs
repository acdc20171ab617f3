//! Index persistence.
//!
//! Little-endian throughout:
//!
//! ```text
//! magic            "JXBW"
//! version          u32 (currently 1)
//! flags            u32 (reserved, 0)
//! n                u64 node count
//! symbol table     count u64, then per entry: kind u8, text length u32, UTF-8 bytes
//! bit arrays       for last, leaf, diff: length u64, packed 64-bit words
//! wavelet matrices for labels, parent labels: alphabet u64, level count u8,
//!                  then per level: zero count u64, packed 64-bit words
//! F table          sigma+2 entries, u64 each
//! id store         leaf count u64, one u64 offset per leaf,
//!                  payload length u64, delta-varint payload
//! checksum         u64 FNV-1a over all preceding bytes
//! ```
//!
//! Loading checks the magic, the version, the checksum, and every declared
//! length before reconstructing the structures; the derived internal-label
//! row is rebuilt rather than stored.

use std::io::{Read, Write};

use crate::error::LoadError;
use crate::label::{Label, LabelKind, SymbolTable};
use crate::succinct::{RankSelectBits, WaveletMatrix};

use super::build::derive_internal_labels;
use super::{IdStore, XbwIndex};

const MAGIC: &[u8; 4] = b"JXBW";
const VERSION: u32 = 1;

/// Byte sizes of the file sections; they sum to the file size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexLayout {
    pub header: usize,
    pub symbol_table: usize,
    pub bit_arrays: usize,
    pub wavelet_matrices: usize,
    pub f_table: usize,
    pub id_store: usize,
    pub checksum: usize,
}

impl IndexLayout {
    pub fn total(&self) -> usize {
        self.header
            + self.symbol_table
            + self.bit_arrays
            + self.wavelet_matrices
            + self.f_table
            + self.id_store
            + self.checksum
    }
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

pub(super) fn save<W: Write>(index: &XbwIndex, mut sink: W) -> std::io::Result<()> {
    let mut buf = Vec::new();
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&0u32.to_le_bytes());
    buf.extend_from_slice(&(index.n as u64).to_le_bytes());

    buf.extend_from_slice(&(index.symtab.sigma() as u64).to_le_bytes());
    for (_, label) in index.symtab.iter() {
        buf.push(label.kind() as u8);
        buf.extend_from_slice(&(label.text().len() as u32).to_le_bytes());
        buf.extend_from_slice(label.text().as_bytes());
    }

    for bits in [&index.last, &index.leaf, &index.diff] {
        write_bits(&mut buf, bits);
    }
    for wm in [&index.labels, &index.parent_labels] {
        write_wavelet(&mut buf, wm);
    }

    for &f in &index.first_child_pos {
        buf.extend_from_slice(&f.to_le_bytes());
    }

    buf.extend_from_slice(&(index.ids.len() as u64).to_le_bytes());
    for &off in index.ids.offsets() {
        buf.extend_from_slice(&off.to_le_bytes());
    }
    buf.extend_from_slice(&(index.ids.payload().len() as u64).to_le_bytes());
    buf.extend_from_slice(index.ids.payload());

    let checksum = fnv1a64(&buf);
    buf.extend_from_slice(&checksum.to_le_bytes());
    sink.write_all(&buf)
}

fn write_bits(buf: &mut Vec<u8>, bits: &RankSelectBits) {
    buf.extend_from_slice(&(bits.len() as u64).to_le_bytes());
    for &w in bits.words() {
        buf.extend_from_slice(&w.to_le_bytes());
    }
}

fn write_wavelet(buf: &mut Vec<u8>, wm: &WaveletMatrix) {
    buf.extend_from_slice(&(wm.alphabet() as u64).to_le_bytes());
    buf.push(wm.levels().len() as u8);
    for (row, &zeros) in wm.levels().iter().zip(wm.zeros()) {
        buf.extend_from_slice(&(zeros as u64).to_le_bytes());
        for &w in row.words() {
            buf.extend_from_slice(&w.to_le_bytes());
        }
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], LoadError> {
        if self.pos + n > self.bytes.len() {
            return Err(LoadError::Truncated);
        }
        let slice = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(slice)
    }

    fn u8(&mut self) -> Result<u8, LoadError> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32, LoadError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, LoadError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    /// A u64 that must fit in usize and stay below a sanity bound.
    fn length(&mut self, bound: usize) -> Result<usize, LoadError> {
        let v = self.u64()?;
        if v > bound as u64 {
            return Err(LoadError::Truncated);
        }
        Ok(v as usize)
    }

    fn words(&mut self, count: usize) -> Result<Vec<u64>, LoadError> {
        let raw = self.take(count * 8)?;
        Ok(raw
            .chunks_exact(8)
            .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }
}

pub(super) fn load<R: Read>(mut source: R) -> Result<(XbwIndex, IndexLayout), LoadError> {
    let mut bytes = Vec::new();
    source.read_to_end(&mut bytes)?;

    if bytes.len() < 4 || &bytes[..4] != MAGIC {
        return Err(LoadError::BadMagic);
    }
    if bytes.len() < 8 {
        return Err(LoadError::Truncated);
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != VERSION {
        return Err(LoadError::VersionMismatch(version));
    }
    if bytes.len() < 16 + 8 {
        return Err(LoadError::Truncated);
    }
    let (body, checksum_bytes) = bytes.split_at(bytes.len() - 8);
    let stored = u64::from_le_bytes(checksum_bytes.try_into().unwrap());
    if fnv1a64(body) != stored {
        return Err(LoadError::ChecksumFail);
    }

    let mut cur = Cursor { bytes: body, pos: 8 };
    let _flags = cur.u32()?;
    let n = cur.length(usize::MAX / 64)?;
    if n == 0 {
        return Err(LoadError::Truncated);
    }
    let header_end = cur.pos;

    let sigma = cur.length(u32::MAX as usize)? as u32;
    let mut labels_vec = Vec::with_capacity(sigma as usize);
    for _ in 0..sigma {
        let kind = LabelKind::from_u8(cur.u8()?).ok_or(LoadError::Truncated)?;
        let len = cur.u32()? as usize;
        let text = std::str::from_utf8(cur.take(len)?)
            .map_err(|_| LoadError::Truncated)?
            .to_owned();
        labels_vec.push(Label::from_parts(kind, text));
    }
    if labels_vec.iter().collect::<std::collections::HashSet<_>>().len() != labels_vec.len() {
        return Err(LoadError::Truncated);
    }
    let symtab = SymbolTable::with_label_order(labels_vec);
    let symtab_end = cur.pos;

    let mut bit_arrays = Vec::with_capacity(3);
    for _ in 0..3 {
        let len = cur.length(usize::MAX / 64)?;
        if len != n {
            return Err(LoadError::Truncated);
        }
        let words = cur.words(len.div_ceil(64))?;
        bit_arrays.push(RankSelectBits::from_words(words, len));
    }
    let diff = bit_arrays.pop().unwrap();
    let leaf = bit_arrays.pop().unwrap();
    let last = bit_arrays.pop().unwrap();
    let bits_end = cur.pos;

    let mut wavelets = Vec::with_capacity(2);
    for _ in 0..2 {
        let alphabet = cur.length(u32::MAX as usize)? as u32;
        if alphabet != sigma + 1 {
            return Err(LoadError::Truncated);
        }
        let level_count = cur.u8()? as usize;
        let mut levels = Vec::with_capacity(level_count);
        let mut zeros = Vec::with_capacity(level_count);
        for _ in 0..level_count {
            zeros.push(cur.length(n)?);
            let words = cur.words(n.div_ceil(64))?;
            levels.push(RankSelectBits::from_words(words, n));
        }
        let wm = WaveletMatrix::from_parts(n, alphabet, levels, zeros)
            .ok_or(LoadError::Truncated)?;
        wavelets.push(wm);
    }
    let parent_labels = wavelets.pop().unwrap();
    let labels = wavelets.pop().unwrap();
    let wm_end = cur.pos;

    let mut first_child_pos = Vec::with_capacity(sigma as usize + 2);
    for _ in 0..sigma as usize + 2 {
        first_child_pos.push(cur.u64()?);
    }
    if first_child_pos[0] != 1
        || *first_child_pos.last().unwrap() != n as u64 + 1
        || first_child_pos.windows(2).any(|w| w[0] > w[1])
    {
        return Err(LoadError::Truncated);
    }
    let f_end = cur.pos;

    let leaf_count = cur.length(n)?;
    if leaf_count != leaf.count_ones() {
        return Err(LoadError::Truncated);
    }
    let mut offsets = Vec::with_capacity(leaf_count);
    for _ in 0..leaf_count {
        offsets.push(cur.u64()?);
    }
    let payload_len = cur.length(body.len())?;
    let payload = cur.take(payload_len)?.to_vec();
    if offsets.windows(2).any(|w| w[0] > w[1])
        || offsets.last().is_some_and(|&o| o > payload.len() as u64)
    {
        return Err(LoadError::Truncated);
    }
    let ids = IdStore::from_parts(offsets, payload);
    let ids_end = cur.pos;

    if cur.pos != body.len() {
        return Err(LoadError::Truncated);
    }

    let internal_labels = derive_internal_labels(&labels, &leaf);
    let index = XbwIndex {
        n,
        symtab,
        labels,
        parent_labels,
        last,
        leaf,
        diff,
        first_child_pos,
        ids,
        internal_labels,
    };
    let layout = IndexLayout {
        header: header_end,
        symbol_table: symtab_end - header_end,
        bit_arrays: bits_end - symtab_end,
        wavelet_matrices: wm_end - bits_end,
        f_table: f_end - wm_end,
        id_store: ids_end - f_end,
        checksum: 8,
    };
    Ok((index, layout))
}
