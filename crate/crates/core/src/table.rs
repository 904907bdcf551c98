// SPDX-License-Identifier: Apache-2.0

//! Store of class representatives: a linear-probing hash table keyed by
//! Wang's 64-bit shift hash, its breadth-first construction, and the RVTB
//! file format.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::sync::OnceLock;

use rayon::prelude::*;
use thiserror::Error;

use crate::context::Context;
use crate::equiv::OrderConvention;
use crate::gate::Architecture;
use crate::perm::{PermWord, Width};

pub const TABLE_MAGIC: &[u8; 4] = b"RVTB";
pub const TABLE_VERSION: u32 = 1;

/// Largest depth whose sizes fit the 4-bit size field.
pub const MAX_DEPTH: u8 = 15;

pub(crate) static CRC64: crc::Crc<u64> = crc::Crc::<u64>::new(&crc::CRC_64_XZ);

#[derive(Debug, Error)]
pub enum TableError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("bad table file: {0}")]
    Format(String),
    #[error("table is for n={found_n} {found_arch}, expected n={want_n} {want_arch}")]
    ArchMismatch {
        want_n: u8,
        want_arch: Architecture,
        found_n: u8,
        found_arch: Architecture,
    },
    #[error("table uses a different representative order than the context")]
    OrderMismatch,
    #[error(
        "building size {level} needs about {needed} bytes, over the {budget} byte budget \
         (finished sizes: {completed:?})"
    )]
    ResourceExhausted {
        level: usize,
        needed: u64,
        budget: u64,
        completed: Vec<u64>,
    },
    #[error("depth {0} is beyond the supported maximum of {MAX_DEPTH}")]
    DepthTooLarge(u8),
}

/// Thomas Wang's 64-bit shift hash, in modular arithmetic with logical shifts.
#[inline(always)]
pub const fn wang_hash(key: u64) -> u64 {
    let mut key = (!key).wrapping_add(key << 21);
    key ^= key >> 24;
    key = key.wrapping_add(key << 3).wrapping_add(key << 8);
    key ^= key >> 14;
    key = key.wrapping_add(key << 2).wrapping_add(key << 4);
    key ^= key >> 28;
    key.wrapping_add(key << 31)
}

const MAX_LOAD_NUM: usize = 85;
const INITIAL_LOAD: f64 = 0.6;

/// Open-addressing table of nonzero `u64` keys with a `u16` value each.
/// Key 0 marks an empty slot.
#[derive(Debug, Clone)]
pub struct HashSlots {
    keys: Vec<u64>,
    aux: Vec<u16>,
    mask: u64,
    len: usize,
}

impl HashSlots {
    pub fn with_slots(slots: usize) -> Self {
        let slots = slots.next_power_of_two().max(16);
        HashSlots {
            keys: vec![0; slots],
            aux: vec![0; slots],
            mask: slots as u64 - 1,
            len: 0,
        }
    }

    /// Smallest power of two holding `expected` entries at load 0.6 or less.
    pub fn slots_for(expected: u64) -> usize {
        ((expected as f64 / INITIAL_LOAD).ceil() as usize).next_power_of_two().max(16)
    }

    pub fn for_entries(expected: u64) -> Self {
        Self::with_slots(Self::slots_for(expected))
    }

    #[inline(always)]
    fn home(&self, key: u64) -> usize {
        (wang_hash(key) & self.mask) as usize
    }

    #[inline]
    pub fn get(&self, key: u64) -> Option<u16> {
        let mut i = self.home(key);
        loop {
            let k = self.keys[i];
            if k == key {
                return Some(self.aux[i]);
            }
            if k == 0 {
                return None;
            }
            i = (i + 1) & self.mask as usize;
        }
    }

    #[inline]
    pub fn contains(&self, key: u64) -> bool {
        self.get(key).is_some()
    }

    /// Inserts unless present; returns whether the key was new.
    pub fn insert(&mut self, key: u64, aux: u16) -> bool {
        assert_ne!(key, 0, "key 0 is the empty-slot marker");
        if (self.len + 1) * 100 > self.keys.len() * MAX_LOAD_NUM {
            self.grow();
        }
        let mut i = self.home(key);
        loop {
            let k = self.keys[i];
            if k == key {
                return false;
            }
            if k == 0 {
                self.keys[i] = key;
                self.aux[i] = aux;
                self.len += 1;
                return true;
            }
            i = (i + 1) & self.mask as usize;
        }
    }

    fn grow(&mut self) {
        let mut bigger = HashSlots::with_slots(self.keys.len() * 2);
        for (&k, &a) in self.keys.iter().zip(&self.aux) {
            if k != 0 {
                bigger.insert(k, a);
            }
        }
        *self = bigger;
    }

    /// Hints the cache to load the home slot of `key`.
    #[inline(always)]
    pub fn prefetch(&self, key: u64) {
        #[cfg(target_arch = "x86_64")]
        {
            let p = self.keys.as_ptr().wrapping_add(self.home(key));
            #[allow(unused_unsafe)]
            unsafe {
                std::arch::x86_64::_mm_prefetch::<{ std::arch::x86_64::_MM_HINT_T0 }>(p as *const i8);
            }
        }
        #[cfg(not(target_arch = "x86_64"))]
        let _ = key;
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn slot_count(&self) -> usize {
        self.keys.len()
    }

    pub fn load(&self) -> f64 {
        self.len as f64 / self.keys.len() as f64
    }

    pub fn bytes(&self) -> u64 {
        self.keys.len() as u64 * 10
    }

    /// Longest run of probes any stored key needs.
    pub fn max_probe(&self) -> usize {
        let n = self.keys.len();
        let mut worst = 0;
        for (i, &k) in self.keys.iter().enumerate() {
            if k != 0 {
                let d = (i + n - self.home(k)) & self.mask as usize;
                worst = worst.max(d + 1);
            }
        }
        worst
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, u16)> + '_ {
        self.keys
            .iter()
            .zip(&self.aux)
            .filter(|(k, _)| **k != 0)
            .map(|(&k, &a)| (k, a))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Placement {
    /// Dropping the gate from the end of the circuit leaves size - 1.
    Last,
    /// Dropping the gate from the front leaves size - 1.
    First,
}

const NO_GATE_ID: u16 = 0x3F;

/// Per-entry payload: one gate of some minimal circuit for the
/// representative, which end it sits on, and the representative's size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Annotation {
    pub gate: Option<u8>,
    pub placement: Placement,
    pub size: u8,
}

impl Annotation {
    pub const IDENTITY: Annotation = Annotation {
        gate: None,
        placement: Placement::Last,
        size: 0,
    };

    /// Bits 0-5 gate id (63 = none), bit 6 set for `First`, bits 7-10 size.
    pub fn pack(self) -> u16 {
        let g = self.gate.map_or(NO_GATE_ID, |g| g as u16);
        let p = matches!(self.placement, Placement::First) as u16;
        g | (p << 6) | ((self.size as u16) << 7)
    }

    pub fn unpack(v: u16) -> Annotation {
        let g = v & 0x3F;
        Annotation {
            gate: if g == NO_GATE_ID { None } else { Some(g as u8) },
            placement: if v & 0x40 != 0 { Placement::First } else { Placement::Last },
            size: ((v >> 7) & 0xF) as u8,
        }
    }
}

/// Predicted number of classes of each size, used to size tables up front.
pub fn predicted_reduced(width: Width, arch: Architecture) -> &'static [u64] {
    const FULL4: [u64; 10] = [
        1, 4, 33, 425, 6538, 101_983, 1_482_686, 19_466_575, 225_242_556, 2_208_511_226,
    ];
    const LNN4: [u64; 10] = [
        1, 10, 100, 1083, 11_885, 124_628, 1_226_080, 11_201_218, 94_551_844, 730_451_187,
    ];
    match (width.lines(), arch) {
        (4, Architecture::Full) => &FULL4,
        (4, Architecture::Lnn) => &LNN4,
        _ => &[],
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct BfsOptions {
    /// Refuse a level whose table would need more than this many bytes.
    pub budget_bytes: Option<u64>,
}

/// Representatives of every class of size at most `k`, with one annotation
/// each, plus the per-size lists in ascending word order.
#[derive(Debug, Clone)]
pub struct CanonTable {
    ctx: Context,
    k: u8,
    slots: HashSlots,
    levels: Vec<Vec<u64>>,
    totals: OnceLock<Vec<u64>>,
}

impl CanonTable {
    pub fn ctx(&self) -> &Context {
        &self.ctx
    }

    pub fn k(&self) -> u8 {
        self.k
    }

    pub fn slots(&self) -> &HashSlots {
        &self.slots
    }

    pub fn level(&self, size: usize) -> &[u64] {
        &self.levels[size]
    }

    pub fn levels(&self) -> &[Vec<u64>] {
        &self.levels
    }

    pub fn entry_count(&self) -> usize {
        self.slots.len()
    }

    pub fn reduced_counts(&self) -> Vec<u64> {
        self.levels.iter().map(|l| l.len() as u64).collect()
    }

    /// Number of functions of each size: class sizes summed per level.
    pub fn total_counts(&self) -> &[u64] {
        self.totals.get_or_init(|| {
            let g = self.ctx.group();
            self.levels
                .iter()
                .map(|l| l.par_iter().map(|&w| g.class_size(PermWord(w)) as u64).sum())
                .collect()
        })
    }

    /// Annotation of a representative.
    #[inline]
    pub fn get(&self, rep: PermWord) -> Option<Annotation> {
        self.slots.get(rep.0).map(Annotation::unpack)
    }

    #[inline]
    pub fn contains_rep(&self, rep: PermWord) -> bool {
        self.slots.contains(rep.0)
    }

    /// Size of any function whose class is in the table.
    pub fn size_of(&self, f: PermWord) -> Option<u8> {
        let rep = self.ctx.group().canonical_word(f);
        self.get(rep).map(|a| a.size)
    }

    pub fn bytes(&self) -> u64 {
        self.slots.bytes() + self.levels.iter().map(|l| l.len() as u64 * 8).sum::<u64>()
    }

    fn empty(ctx: Context, k: u8, expected: u64) -> Self {
        CanonTable {
            ctx,
            k,
            slots: HashSlots::for_entries(expected),
            levels: Vec::new(),
            totals: OnceLock::new(),
        }
    }
}

fn estimated_bytes(entries: u64) -> u64 {
    HashSlots::slots_for(entries) as u64 * 10 + entries * 8
}

const BFS_CHUNK: usize = 1 << 15;

/// Breadth-first construction up to size `k`. Each new level extends every
/// representative of the previous level and its inverse by every gate, and
/// keeps the classes not seen before; the first candidate reaching a new
/// class in enumeration order (representative, then its inverse, then gate
/// order) provides its annotation.
pub fn bfs_build(ctx: Context, k: u8, opts: &BfsOptions) -> Result<CanonTable, TableError> {
    if k > MAX_DEPTH {
        return Err(TableError::DepthTooLarge(k));
    }
    let predicted = predicted_reduced(ctx.width(), ctx.arch());
    let expected: u64 = predicted.iter().take(k as usize + 1).sum();
    let mut t = CanonTable::empty(ctx, k, expected.max(1));
    t.slots.insert(PermWord::IDENTITY.0, Annotation::IDENTITY.pack());
    t.levels.push(vec![PermWord::IDENTITY.0]);

    for level in 1..=k as usize {
        if let Some(budget) = opts.budget_bytes {
            let so_far: u64 = t.levels.iter().map(|l| l.len() as u64).sum();
            let next = predicted
                .get(level)
                .copied()
                .unwrap_or_else(|| t.levels[level - 1].len() as u64 * t.ctx.library().len() as u64);
            let needed = estimated_bytes(so_far + next);
            if needed > budget {
                return Err(TableError::ResourceExhausted {
                    level,
                    needed,
                    budget,
                    completed: t.reduced_counts(),
                });
            }
        }
        let prev = std::mem::take(&mut t.levels[level - 1]);
        let mut fresh = Vec::new();
        for chunk in prev.chunks(BFS_CHUNK) {
            let found: Vec<Vec<(u64, u16)>> = chunk
                .par_chunks(256)
                .map(|reps| expand(&t, reps, level as u8))
                .collect();
            for (key, aux) in found.into_iter().flatten() {
                if t.slots.insert(key, aux) {
                    fresh.push(key);
                }
            }
        }
        t.levels[level - 1] = prev;
        fresh.sort_unstable();
        t.levels.push(fresh);
    }
    Ok(t)
}

fn expand(t: &CanonTable, reps: &[u64], size: u8) -> Vec<(u64, u16)> {
    let ctx = &t.ctx;
    let group = ctx.group();
    let order = group.order();
    let mut out = Vec::new();
    for &r in reps {
        let r = PermWord(r);
        for f in [r, r.inverse()] {
            for (id, g) in ctx.library().gates().iter().enumerate() {
                let h = f.compose(g.word_on(ctx.width()));
                let rep = order.key(group.canonical_key(h));
                if t.slots.contains(rep) {
                    continue;
                }
                let (rep_w, wit) = group.canonical(h);
                debug_assert_eq!(rep_w.0, rep);
                let slot = group.slot(wit.sigma.inverse()).unwrap();
                let ann = Annotation {
                    gate: Some(ctx.conj().conj(id as u8, slot)),
                    placement: if wit.inverted { Placement::First } else { Placement::Last },
                    size,
                };
                out.push((rep, ann.pack()));
            }
        }
    }
    out
}

fn header_bytes(t: &CanonTable, crc: u64) -> Vec<u8> {
    let mut h = Vec::with_capacity(20 + 8 * t.levels.len());
    h.extend_from_slice(TABLE_MAGIC);
    h.extend_from_slice(&TABLE_VERSION.to_le_bytes());
    h.push(t.ctx.width().get());
    h.push(t.ctx.arch().id());
    h.push(t.ctx.order().id());
    h.push(t.k);
    for l in &t.levels {
        h.extend_from_slice(&(l.len() as u64).to_le_bytes());
    }
    h.extend_from_slice(&crc.to_le_bytes());
    h
}

fn entry_bytes(t: &CanonTable, key: u64) -> [u8; 16] {
    let ann = t.slots.get(key).expect("listed key is stored") as u64;
    let mut b = [0u8; 16];
    b[..8].copy_from_slice(&key.to_le_bytes());
    b[8..].copy_from_slice(&ann.to_le_bytes());
    b
}

/// Writes the table; the bytes depend only on the table's contents.
/// CRC-64 of the entry payload, as stored in the file header.
pub fn payload_digest(t: &CanonTable) -> u64 {
    let mut digest = CRC64.digest();
    for l in &t.levels {
        for &key in l {
            digest.update(&entry_bytes(t, key));
        }
    }
    digest.finalize()
}

pub fn save(t: &CanonTable, path: &Path) -> Result<(), TableError> {
    let crc = payload_digest(t);
    let mut w = BufWriter::with_capacity(1 << 20, File::create(path)?);
    w.write_all(&header_bytes(t, crc))?;
    for l in &t.levels {
        for &key in l {
            w.write_all(&entry_bytes(t, key))?;
        }
    }
    w.flush()?;
    Ok(())
}

fn read_exact_or_format<R: Read>(r: &mut R, buf: &mut [u8], what: &str) -> Result<(), TableError> {
    r.read_exact(buf).map_err(|e| match e.kind() {
        io::ErrorKind::UnexpectedEof => TableError::Format(format!("truncated {what}")),
        _ => TableError::Io(e),
    })
}

fn fmt_err(msg: impl Into<String>) -> TableError {
    TableError::Format(msg.into())
}

/// Reads a table under the width, architecture and order in its header.
pub fn load(path: &Path) -> Result<CanonTable, TableError> {
    load_inner(path, None)
}

/// Reads a table and checks it matches `ctx`.
pub fn load_for(path: &Path, ctx: &Context) -> Result<CanonTable, TableError> {
    load_inner(path, Some(ctx))
}

fn load_inner(path: &Path, want: Option<&Context>) -> Result<CanonTable, TableError> {
    let mut r = BufReader::with_capacity(1 << 20, File::open(path)?);
    let mut fixed = [0u8; 12];
    read_exact_or_format(&mut r, &mut fixed, "header")?;
    if &fixed[..4] != TABLE_MAGIC {
        return Err(fmt_err("bad magic"));
    }
    let version = u32::from_le_bytes(fixed[4..8].try_into().unwrap());
    if version != TABLE_VERSION {
        return Err(fmt_err(format!("unsupported version {version}")));
    }
    let width = Width::new(fixed[8]).map_err(|e| fmt_err(e.to_string()))?;
    let arch = Architecture::from_id(fixed[9]).ok_or_else(|| fmt_err("unknown architecture id"))?;
    let order = OrderConvention::from_id(fixed[10]).ok_or_else(|| fmt_err("unknown order id"))?;
    let k = fixed[11];
    if k > MAX_DEPTH {
        return Err(fmt_err(format!("depth {k} out of range")));
    }
    let ctx = match want {
        Some(c) => {
            if c.width() != width || c.arch() != arch {
                return Err(TableError::ArchMismatch {
                    want_n: c.width().get(),
                    want_arch: c.arch(),
                    found_n: width.get(),
                    found_arch: arch,
                });
            }
            if c.order() != order {
                return Err(TableError::OrderMismatch);
            }
            c.clone()
        }
        None => Context::with_order(width, arch, order).map_err(|e| fmt_err(e.to_string()))?,
    };
    let mut counts = vec![0u64; k as usize + 1];
    let mut buf8 = [0u8; 8];
    for c in counts.iter_mut() {
        read_exact_or_format(&mut r, &mut buf8, "header")?;
        *c = u64::from_le_bytes(buf8);
    }
    read_exact_or_format(&mut r, &mut buf8, "header")?;
    let want_crc = u64::from_le_bytes(buf8);
    let total: u64 = counts.iter().sum();
    if total > (1 << 40) {
        return Err(fmt_err("implausible entry count"));
    }

    let mut t = CanonTable::empty(ctx, k, total);
    let mut digest = CRC64.digest();
    let mut entry = [0u8; 16];
    for (size, &n) in counts.iter().enumerate() {
        let mut level = Vec::with_capacity(n as usize);
        let mut last = 0u64;
        for _ in 0..n {
            read_exact_or_format(&mut r, &mut entry, "payload")?;
            digest.update(&entry);
            let key = u64::from_le_bytes(entry[..8].try_into().unwrap());
            let ann = u64::from_le_bytes(entry[8..].try_into().unwrap());
            if !PermWord(key).is_valid(width) {
                return Err(fmt_err(format!("entry {key:#018x} is not a permutation")));
            }
            if key <= last && !level.is_empty() {
                return Err(fmt_err("entries not sorted"));
            }
            if ann > u16::MAX as u64 || Annotation::unpack(ann as u16).size as usize != size {
                return Err(fmt_err(format!("bad annotation for {key:#018x}")));
            }
            if !t.slots.insert(key, ann as u16) {
                return Err(fmt_err(format!("duplicate entry {key:#018x}")));
            }
            level.push(key);
            last = key;
        }
        t.levels.push(level);
    }
    if digest.finalize() != want_crc {
        return Err(fmt_err("checksum mismatch"));
    }
    let mut extra = [0u8; 1];
    if r.read(&mut extra)? != 0 {
        return Err(fmt_err("trailing bytes"));
    }
    Ok(t)
}

/// CRC-64/XZ of a whole file, for provenance in reports.
pub fn file_digest(path: &Path) -> Result<u64, io::Error> {
    let mut r = BufReader::new(File::open(path)?);
    let mut digest = CRC64.digest();
    let mut buf = vec![0u8; 1 << 20];
    loop {
        let n = r.read(&mut buf)?;
        if n == 0 {
            break;
        }
        digest.update(&buf[..n]);
    }
    Ok(digest.finalize())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use std::collections::HashMap;

    /// hash64shift written with multiplications instead of shift-adds.
    fn wang_oracle(k: u64) -> u64 {
        let mut k = k.wrapping_mul((1 << 21) - 1).wrapping_sub(1);
        k ^= k >> 24;
        k = k.wrapping_mul(265);
        k ^= k >> 14;
        k = k.wrapping_mul(21);
        k ^= k >> 28;
        k.wrapping_mul(1 + (1 << 31))
    }

    #[test]
    fn wang_matches_oracle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        assert_eq!(wang_hash(0), wang_oracle(0));
        assert_eq!(wang_hash(u64::MAX), wang_oracle(u64::MAX));
        for _ in 0..1_000_000 {
            let x: u64 = rng.random();
            assert_eq!(wang_hash(x), wang_oracle(x));
        }
    }

    #[test]
    fn annotation_packing() {
        for gate in [None, Some(0), Some(31)] {
            for placement in [Placement::Last, Placement::First] {
                for size in 0..16 {
                    let a = Annotation { gate, placement, size };
                    assert_eq!(Annotation::unpack(a.pack()), a);
                }
            }
        }
    }

    #[test]
    fn empty_lookup() {
        let h = HashSlots::with_slots(16);
        assert_eq!(h.get(PermWord::IDENTITY.0), None);
    }

    #[test]
    fn differential_against_hashmap() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
        let mut h = HashSlots::with_slots(16);
        let mut reference = HashMap::new();
        for _ in 0..200_000 {
            let k: u64 = rng.random::<u64>() | 1;
            let v: u16 = rng.random();
            let fresh = !reference.contains_key(&k);
            if fresh {
                reference.insert(k, v);
            }
            assert_eq!(h.insert(k, v), fresh);
        }
        assert_eq!(h.len(), reference.len());
        assert!(h.load() <= 0.85);
        for (&k, &v) in &reference {
            assert_eq!(h.get(k), Some(v));
        }
        for _ in 0..200_000 {
            let k: u64 = rng.random::<u64>() & !1;
            if k != 0 {
                assert_eq!(h.get(k), None);
            }
        }
    }

    #[test]
    fn sizing_rule() {
        assert_eq!(HashSlots::slots_for(6), 16);
        assert_eq!(HashSlots::slots_for(600), 1024);
        assert_eq!(HashSlots::slots_for(614), 1024);
        assert_eq!(HashSlots::slots_for(615), 2048);
    }

    #[test]
    fn small_full_table() {
        let t = bfs_build(Context::new(Width::FOUR, Architecture::Full), 3, &BfsOptions::default()).unwrap();
        assert_eq!(t.reduced_counts(), vec![1, 4, 33, 425]);
        assert_eq!(t.total_counts(), &[1, 32, 784, 16204]);
    }

    #[test]
    fn budget_refusal() {
        let err = bfs_build(
            Context::new(Width::FOUR, Architecture::Full),
            6,
            &BfsOptions {
                budget_bytes: Some(1 << 20),
            },
        )
        .unwrap_err();
        match err {
            TableError::ResourceExhausted { completed, .. } => assert!(!completed.is_empty()),
            e => panic!("unexpected {e}"),
        }
    }
}
