// SPDX-License-Identifier: Apache-2.0

//! Marked-index sets over a range of an index space, and their file format.
//!
//! A set is stored either as packed bits (one per index in the range) or as a
//! sorted list of the marked indices. Both encodings describe the same set
//! and convert losslessly.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::gate::Architecture;
use crate::perm::Width;
use crate::table::CRC64;

use super::SearchError;

pub const BITS_MAGIC: &[u8; 4] = b"RVBV";
pub const BITS_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Storage {
    Dense,
    Sparse,
}

impl Storage {
    fn id(self) -> u8 {
        match self {
            Storage::Dense => 0,
            Storage::Sparse => 1,
        }
    }

    fn from_id(id: u8) -> Option<Self> {
        match id {
            0 => Some(Storage::Dense),
            1 => Some(Storage::Sparse),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Store {
    // bit i of word j marks index lo + 64 j + i
    Dense(Vec<u64>),
    // strictly increasing absolute indices
    Sparse(Vec<u64>),
}

/// Marked indices within `[lo, hi)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitSlice {
    pub slice_id: u32,
    lo: u64,
    hi: u64,
    store: Store,
}

impl BitSlice {
    pub fn empty(lo: u64, hi: u64, storage: Storage) -> Self {
        assert!(lo <= hi);
        let store = match storage {
            Storage::Dense => Store::Dense(vec![0; (hi - lo).div_ceil(64) as usize]),
            Storage::Sparse => Store::Sparse(Vec::new()),
        };
        BitSlice {
            slice_id: 0,
            lo,
            hi,
            store,
        }
    }

    /// From strictly increasing indices inside the range.
    pub fn from_sorted(lo: u64, hi: u64, items: Vec<u64>, storage: Storage) -> Self {
        debug_assert!(items.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(items.iter().all(|&i| i >= lo && i < hi));
        let s = BitSlice {
            slice_id: 0,
            lo,
            hi,
            store: Store::Sparse(items),
        };
        s.into_storage(storage)
    }

    /// From arbitrary indices; out-of-range ones are dropped.
    pub fn from_indices(lo: u64, hi: u64, mut items: Vec<u64>, storage: Storage) -> Self {
        items.retain(|&i| i >= lo && i < hi);
        items.sort_unstable();
        items.dedup();
        Self::from_sorted(lo, hi, items, storage)
    }

    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    pub fn range_len(&self) -> u64 {
        self.hi - self.lo
    }

    pub fn storage(&self) -> Storage {
        match self.store {
            Store::Dense(_) => Storage::Dense,
            Store::Sparse(_) => Storage::Sparse,
        }
    }

    /// Number of marked indices.
    pub fn count(&self) -> u64 {
        match &self.store {
            Store::Dense(w) => w.iter().map(|x| x.count_ones() as u64).sum(),
            Store::Sparse(v) => v.len() as u64,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.count() == 0
    }

    /// Heap bytes held.
    pub fn bytes(&self) -> u64 {
        match &self.store {
            Store::Dense(w) => w.capacity() as u64 * 8,
            Store::Sparse(v) => v.capacity() as u64 * 8,
        }
    }

    /// Bytes a dense slice over `len` indices needs.
    pub fn dense_bytes(len: u64) -> u64 {
        len.div_ceil(64) * 8
    }

    pub fn contains(&self, i: u64) -> bool {
        if i < self.lo || i >= self.hi {
            return false;
        }
        match &self.store {
            Store::Dense(w) => {
                let o = i - self.lo;
                w[(o / 64) as usize] >> (o % 64) & 1 == 1
            }
            Store::Sparse(v) => v.binary_search(&i).is_ok(),
        }
    }

    /// Marks `i`, which must be in range. Sparse slices take the slow path of
    /// an ordered insert; bulk producers should use [`SliceBuilder`].
    pub fn insert(&mut self, i: u64) {
        assert!(i >= self.lo && i < self.hi, "index {i} outside [{}, {})", self.lo, self.hi);
        match &mut self.store {
            Store::Dense(w) => {
                let o = i - self.lo;
                w[(o / 64) as usize] |= 1 << (o % 64);
            }
            Store::Sparse(v) => {
                if let Err(pos) = v.binary_search(&i) {
                    v.insert(pos, i);
                }
            }
        }
    }

    /// Marked indices in increasing order.
    pub fn iter(&self) -> Box<dyn Iterator<Item = u64> + Send + '_> {
        match &self.store {
            Store::Sparse(v) => Box::new(v.iter().copied()),
            Store::Dense(w) => {
                let lo = self.lo;
                Box::new(w.iter().enumerate().flat_map(move |(j, &word)| {
                    let base = lo + 64 * j as u64;
                    SetBits(word).map(move |b| base + b as u64)
                }))
            }
        }
    }

    pub fn to_vec(&self) -> Vec<u64> {
        self.iter().collect()
    }

    pub fn into_storage(self, storage: Storage) -> Self {
        if self.storage() == storage {
            return self;
        }
        let store = match storage {
            Storage::Sparse => Store::Sparse(self.to_vec()),
            Storage::Dense => {
                let mut w = vec![0u64; (self.hi - self.lo).div_ceil(64) as usize];
                for i in self.iter() {
                    let o = i - self.lo;
                    w[(o / 64) as usize] |= 1 << (o % 64);
                }
                Store::Dense(w)
            }
        };
        BitSlice { store, ..self }
    }

    /// The marked indices within `[lo, hi)`, which must lie inside this range.
    pub fn restrict(&self, lo: u64, hi: u64) -> Result<BitSlice, SearchError> {
        if lo < self.lo || hi > self.hi || lo > hi {
            return Err(SearchError::LengthMismatch {
                a_lo: lo,
                a_hi: hi,
                b_lo: self.lo,
                b_hi: self.hi,
            });
        }
        let out = match &self.store {
            Store::Sparse(v) => {
                let a = v.partition_point(|&x| x < lo);
                let b = v.partition_point(|&x| x < hi);
                BitSlice::from_sorted(lo, hi, v[a..b].to_vec(), Storage::Sparse)
            }
            Store::Dense(_) => {
                let mut s = BitSlice::empty(lo, hi, Storage::Dense);
                for i in self.iter().skip_while(|&x| x < lo).take_while(|&x| x < hi) {
                    s.insert(i);
                }
                s
            }
        };
        Ok(out)
    }

    /// `self AND NOT other` over identical ranges.
    pub fn and_not(&self, other: &BitSlice) -> Result<BitSlice, SearchError> {
        self.check_same_range(other)?;
        let store = match (&self.store, &other.store) {
            (Store::Dense(a), Store::Dense(b)) => Store::Dense(a.iter().zip(b).map(|(x, y)| x & !y).collect()),
            (Store::Sparse(a), _) => Store::Sparse(a.iter().copied().filter(|&i| !other.contains(i)).collect()),
            (Store::Dense(_), Store::Sparse(_)) => {
                let mut out = self.clone();
                if let Store::Dense(w) = &mut out.store {
                    for i in other.iter() {
                        let o = i - self.lo;
                        w[(o / 64) as usize] &= !(1 << (o % 64));
                    }
                }
                out.store
            }
        };
        Ok(BitSlice {
            slice_id: self.slice_id,
            lo: self.lo,
            hi: self.hi,
            store,
        })
    }

    fn check_same_range(&self, other: &BitSlice) -> Result<(), SearchError> {
        if self.lo != other.lo || self.hi != other.hi {
            return Err(SearchError::LengthMismatch {
                a_lo: self.lo,
                a_hi: self.hi,
                b_lo: other.lo,
                b_hi: other.hi,
            });
        }
        Ok(())
    }

    /// Joins slices covering consecutive ranges, in order.
    pub fn concat(parts: Vec<BitSlice>, storage: Storage) -> Result<BitSlice, SearchError> {
        let first = parts.first().ok_or_else(|| SearchError::Unsupported("no slices to join".into()))?;
        let (lo, mut hi) = (first.lo, first.lo);
        for p in &parts {
            if p.lo != hi {
                return Err(SearchError::LengthMismatch {
                    a_lo: lo,
                    a_hi: hi,
                    b_lo: p.lo,
                    b_hi: p.hi,
                });
            }
            hi = p.hi;
        }
        if storage == Storage::Sparse {
            let mut items = Vec::with_capacity(parts.iter().map(|p| p.count() as usize).sum());
            for p in &parts {
                items.extend(p.iter());
            }
            return Ok(BitSlice::from_sorted(lo, hi, items, Storage::Sparse));
        }
        let mut out = BitSlice::empty(lo, hi, Storage::Dense);
        for p in &parts {
            for i in p.iter() {
                out.insert(i);
            }
        }
        Ok(out)
    }

    /// Equal-width consecutive ranges covering `[0, len)`.
    pub fn split_range(len: u64, parts: usize) -> Vec<(u64, u64)> {
        let parts = parts.max(1) as u64;
        (0..parts).map(|i| (len * i / parts, len * (i + 1) / parts)).collect()
    }
}

struct SetBits(u64);

impl Iterator for SetBits {
    type Item = u32;

    #[inline]
    fn next(&mut self) -> Option<u32> {
        if self.0 == 0 {
            return None;
        }
        let b = self.0.trailing_zeros();
        self.0 &= self.0 - 1;
        Some(b)
    }
}

/// Accumulates marks in any order into a slice. Sparse marks are buffered
/// and merged in sorted batches.
#[derive(Debug)]
pub struct SliceBuilder {
    slice: BitSlice,
    pending: Vec<u64>,
    flush_at: usize,
}

impl SliceBuilder {
    pub fn new(lo: u64, hi: u64, storage: Storage) -> Self {
        SliceBuilder {
            slice: BitSlice::empty(lo, hi, storage),
            pending: Vec::new(),
            flush_at: 1 << 22,
        }
    }

    pub fn lo(&self) -> u64 {
        self.slice.lo
    }

    pub fn hi(&self) -> u64 {
        self.slice.hi
    }

    /// Marks every index, all of which must be in range.
    pub fn extend(&mut self, items: &[u64]) {
        match &mut self.slice.store {
            Store::Dense(w) => {
                let lo = self.slice.lo;
                for &i in items {
                    debug_assert!(i >= lo && i < self.slice.hi);
                    let o = i - lo;
                    w[(o / 64) as usize] |= 1 << (o % 64);
                }
            }
            Store::Sparse(_) => {
                self.pending.extend_from_slice(items);
                if self.pending.len() >= self.flush_at {
                    self.flush();
                }
            }
        }
    }

    fn flush(&mut self) {
        let Store::Sparse(items) = &mut self.slice.store else {
            return;
        };
        if self.pending.is_empty() {
            return;
        }
        self.pending.sort_unstable();
        self.pending.dedup();
        let old = std::mem::take(items);
        let mut merged = Vec::with_capacity(old.len() + self.pending.len());
        let (mut a, mut b) = (old.iter().peekable(), self.pending.iter().peekable());
        loop {
            let next = match (a.peek(), b.peek()) {
                (Some(&&x), Some(&&y)) => {
                    if x < y {
                        a.next();
                        x
                    } else if y < x {
                        b.next();
                        y
                    } else {
                        a.next();
                        b.next();
                        x
                    }
                }
                (Some(&&x), None) => {
                    a.next();
                    x
                }
                (None, Some(&&y)) => {
                    b.next();
                    y
                }
                (None, None) => break,
            };
            merged.push(next);
        }
        *items = merged;
        self.pending.clear();
    }

    /// Heap bytes held, including the pending buffer.
    pub fn bytes(&self) -> u64 {
        self.slice.bytes() + self.pending.capacity() as u64 * 8
    }

    pub fn finish(mut self) -> BitSlice {
        self.flush();
        self.pending = Vec::new();
        self.slice
    }
}

/// Identity of the space a bit file belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BitFileHeader {
    pub width: Width,
    pub arch: Architecture,
    pub scheme: u8,
    pub size: u8,
}

fn format_err(path: &Path, msg: impl Into<String>) -> SearchError {
    SearchError::Format {
        path: path.to_path_buf(),
        msg: msg.into(),
    }
}

/// Writes `slice` and returns the CRC stored in the file.
pub fn write_bits(path: &Path, header: BitFileHeader, slice: &BitSlice) -> Result<u64, SearchError> {
    let mut digest = CRC64.digest();
    let mut out = BufWriter::new(File::create(path)?);
    let mut put = |bytes: &[u8], out: &mut BufWriter<File>| -> std::io::Result<()> {
        digest.update(bytes);
        out.write_all(bytes)
    };
    let payload: Vec<u64> = match &slice.store {
        Store::Dense(w) => w.clone(),
        Store::Sparse(v) => v.clone(),
    };
    put(BITS_MAGIC, &mut out)?;
    put(&BITS_VERSION.to_le_bytes(), &mut out)?;
    put(
        &[
            header.width.get(),
            header.arch.id(),
            header.scheme,
            slice.storage().id(),
            header.size,
            0,
            0,
            0,
        ],
        &mut out,
    )?;
    put(&slice.lo.to_le_bytes(), &mut out)?;
    put(&slice.hi.to_le_bytes(), &mut out)?;
    put(&(payload.len() as u64).to_le_bytes(), &mut out)?;
    for w in &payload {
        put(&w.to_le_bytes(), &mut out)?;
    }
    let crc = digest.finalize();
    out.write_all(&crc.to_le_bytes())?;
    out.flush()?;
    Ok(crc)
}

/// Reads a bit file, checking every structural property and the CRC.
pub fn read_bits(path: &Path) -> Result<(BitFileHeader, BitSlice, u64), SearchError> {
    let mut data = Vec::new();
    BufReader::new(File::open(path)?).read_to_end(&mut data)?;
    const HEAD: usize = 4 + 4 + 8 + 8 + 8 + 8;
    if data.len() < HEAD + 8 {
        return Err(format_err(path, "file too short"));
    }
    if &data[..4] != BITS_MAGIC {
        return Err(format_err(path, "bad magic"));
    }
    let u64_at = |o: usize| u64::from_le_bytes(data[o..o + 8].try_into().unwrap());
    let version = u32::from_le_bytes(data[4..8].try_into().unwrap());
    if version != BITS_VERSION {
        return Err(format_err(path, format!("unsupported version {version}")));
    }
    let meta = &data[8..16];
    let width = Width::new(meta[0]).map_err(|e| format_err(path, e.to_string()))?;
    let arch = Architecture::from_id(meta[1]).ok_or_else(|| format_err(path, "bad architecture"))?;
    let storage = Storage::from_id(meta[3]).ok_or_else(|| format_err(path, "bad encoding"))?;
    let header = BitFileHeader {
        width,
        arch,
        scheme: meta[2],
        size: meta[4],
    };
    let (lo, hi, words) = (u64_at(16), u64_at(24), u64_at(32));
    if lo > hi {
        return Err(format_err(path, "empty or inverted range"));
    }
    let expect = HEAD as u64 + 8 * words + 8;
    if data.len() as u64 != expect {
        return Err(format_err(path, format!("length {} but header implies {expect}", data.len())));
    }
    let end = data.len() - 8;
    let crc = u64_at(end);
    if CRC64.checksum(&data[..end]) != crc {
        return Err(format_err(path, "checksum mismatch"));
    }
    let payload: Vec<u64> = data[HEAD..end]
        .chunks_exact(8)
        .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let store = match storage {
        Storage::Dense => {
            if payload.len() as u64 != (hi - lo).div_ceil(64) {
                return Err(format_err(path, "dense payload does not match the range"));
            }
            let tail = (hi - lo) % 64;
            if tail != 0 && payload.last().is_some_and(|w| w >> tail != 0) {
                return Err(format_err(path, "bits set past the end of the range"));
            }
            Store::Dense(payload)
        }
        Storage::Sparse => {
            if !payload.windows(2).all(|w| w[0] < w[1]) {
                return Err(format_err(path, "sparse indices not strictly increasing"));
            }
            if payload.first().is_some_and(|&i| i < lo) || payload.last().is_some_and(|&i| i >= hi) {
                return Err(format_err(path, "sparse index outside the range"));
            }
            Store::Sparse(payload)
        }
    };
    Ok((
        header,
        BitSlice {
            slice_id: 0,
            lo,
            hi,
            store,
        },
        crc,
    ))
}
