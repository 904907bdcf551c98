// SPDX-License-Identifier: Apache-2.0

//! Word-packed permutation arithmetic.
//!
//! A reversible function on `n <= 4` bits is a permutation of `0..2^n`. It is
//! stored in one `u64`, four bits per output value: nibble `i` holds `f(i)`.
//! Widths below four reuse the same word with the unused high nibbles fixed
//! to the identity pattern, so every routine here works unchanged for them.
//!
//! Line `a` is the least significant bit of a point, `d` the most significant.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PermError {
    #[error("bit width {0} is not supported (expected 2, 3 or 4)")]
    BadWidth(u8),
    #[error("not a permutation of 0..{points}: {detail}")]
    NotAPermutation { points: usize, detail: String },
    #[error("rank {rank} out of range for permutations of {len} elements")]
    OutOfRange { rank: u64, len: usize },
    #[error("malformed truth table: {0}")]
    Malformed(String),
}

/// Number of lines of a reversible function; one of 2, 3 or 4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Width(u8);

impl Width {
    pub const TWO: Width = Width(2);
    pub const THREE: Width = Width(3);
    pub const FOUR: Width = Width(4);

    pub fn new(n: u8) -> Result<Self, PermError> {
        match n {
            2..=4 => Ok(Width(n)),
            _ => Err(PermError::BadWidth(n)),
        }
    }

    #[inline]
    pub fn lines(self) -> usize {
        self.0 as usize
    }

    /// Number of points `2^n` in the domain.
    #[inline]
    pub fn points(self) -> usize {
        1 << self.0
    }

    /// The all-ones point `2^n - 1`.
    #[inline]
    pub fn top(self) -> u8 {
        (self.points() - 1) as u8
    }

    pub fn get(self) -> u8 {
        self.0
    }

    /// The adjacent transpositions available at this width.
    pub fn transpositions(self) -> &'static [Transposition] {
        &Transposition::ALL[..self.lines() - 1]
    }
}

impl fmt::Display for Width {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Swap of two adjacent lines. These three generate every line relabeling of
/// four lines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Transposition {
    T01,
    T12,
    T23,
}

impl Transposition {
    pub const ALL: [Transposition; 3] = [Transposition::T01, Transposition::T12, Transposition::T23];

    /// Index of the lower of the two swapped lines.
    #[inline]
    pub fn low(self) -> u8 {
        match self {
            Transposition::T01 => 0,
            Transposition::T12 => 1,
            Transposition::T23 => 2,
        }
    }

    pub fn lines(self) -> (u8, u8) {
        (self.low(), self.low() + 1)
    }

    pub fn valid_for(self, width: Width) -> bool {
        (self.low() as usize) + 1 < width.lines()
    }

    pub fn as_line_perm(self) -> LinePerm {
        let mut map = [0, 1, 2, 3];
        let i = self.low() as usize;
        map.swap(i, i + 1);
        LinePerm(map)
    }

    #[inline]
    pub(crate) fn masks(self) -> &'static ConjMasks {
        &CONJ_MASKS[self.low() as usize]
    }
}

/// Precomputed masks for conjugating a word by one adjacent transposition.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ConjMasks {
    keep: u64,
    up: u64,
    down: u64,
    shift: u32,
    value_keep: u64,
    value_low: u64,
    value_high: u64,
}

const fn repeat_nibble(n: u64) -> u64 {
    let mut out = 0;
    let mut i = 0;
    while i < 16 {
        out |= n << (4 * i);
        i += 1;
    }
    out
}

const fn conj_masks(low: u32) -> ConjMasks {
    let lo_bit = 1u64 << low;
    let hi_bit = 2u64 << low;
    let mut keep = 0;
    let mut up = 0;
    let mut down = 0;
    let mut x = 0;
    while x < 16 {
        let nib = 0xFu64 << (4 * x);
        let has_lo = x & lo_bit != 0;
        let has_hi = x & hi_bit != 0;
        if has_lo == has_hi {
            keep |= nib;
        } else if has_lo {
            up |= nib;
        } else {
            down |= nib;
        }
        x += 1;
    }
    ConjMasks {
        keep,
        up,
        down,
        shift: 4 << low,
        value_keep: repeat_nibble(0xF & !(lo_bit | hi_bit)),
        value_low: repeat_nibble(lo_bit),
        value_high: repeat_nibble(hi_bit),
    }
}

static CONJ_MASKS: [ConjMasks; 3] = [conj_masks(0), conj_masks(1), conj_masks(2)];

/// A reversible function packed into one word, nibble `i` holding `f(i)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PermWord(pub u64);

impl PermWord {
    pub const IDENTITY: PermWord = PermWord(0xFEDC_BA98_7654_3210);

    /// Packs `values` (a permutation of `0..2^n`) into a word.
    pub fn encode(values: &[u8], width: Width) -> Result<Self, PermError> {
        let points = width.points();
        if values.len() != points {
            return Err(PermError::NotAPermutation {
                points,
                detail: format!("expected {points} values, got {}", values.len()),
            });
        }
        let mut seen = 0u32;
        let mut word = Self::IDENTITY.0;
        for (i, &v) in values.iter().enumerate() {
            if (v as usize) >= points {
                return Err(PermError::NotAPermutation {
                    points,
                    detail: format!("value {v} out of range"),
                });
            }
            if seen & (1 << v) != 0 {
                return Err(PermError::NotAPermutation {
                    points,
                    detail: format!("value {v} repeated"),
                });
            }
            seen |= 1 << v;
            word = (word & !(0xF << (4 * i))) | ((v as u64) << (4 * i));
        }
        Ok(PermWord(word))
    }

    /// The first `2^n` values.
    pub fn decode(self, width: Width) -> Vec<u8> {
        (0..width.points()).map(|i| self.get(i as u8)).collect()
    }

    pub fn to_array(self) -> [u8; 16] {
        let mut out = [0; 16];
        for (i, v) in out.iter_mut().enumerate() {
            *v = self.get(i as u8);
        }
        out
    }

    /// Checks the word invariants for `width`.
    pub fn is_valid(self, width: Width) -> bool {
        let mut seen = 0u32;
        for i in 0..16u8 {
            let v = self.get(i);
            if (i as usize) >= width.points() && v != i {
                return false;
            }
            seen |= 1 << v;
        }
        seen == 0xFFFF
    }

    #[inline]
    pub fn get(self, x: u8) -> u8 {
        ((self.0 >> (4 * x as u32)) & 0xF) as u8
    }

    #[inline]
    pub fn raw(self) -> u64 {
        self.0
    }

    /// Function composition that applies `self` first: the result maps
    /// `x` to `q(self(x))`.
    #[inline]
    pub fn compose(self, q: PermWord) -> PermWord {
        let p = self.0;
        let q = q.0;
        let mut r = 0u64;
        let mut i = 0;
        while i < 16 {
            let d = ((p >> (4 * i)) & 0xF) << 2;
            r |= ((q >> d) & 0xF) << (4 * i);
            i += 1;
        }
        PermWord(r)
    }

    #[inline]
    pub fn inverse(self) -> PermWord {
        let p = self.0;
        let mut q = 0u64;
        let mut v = 1;
        while v < 16 {
            q |= (v as u64) << (((p >> (4 * v)) & 0xF) << 2);
            v += 1;
        }
        PermWord(q)
    }

    /// Conjugation by the relabeling that swaps the two lines of `t`.
    /// Applying the same transposition twice returns the input.
    #[inline]
    pub fn conjugate_adjacent(self, t: Transposition) -> PermWord {
        PermWord(conjugate_raw(self.0, t.masks()))
    }

    /// Conjugation by an arbitrary line relabeling: every line `l` of a
    /// circuit for `self` moved to `sigma(l)` gives a circuit for the result.
    pub fn conjugate(self, sigma: LinePerm) -> PermWord {
        let inv = sigma.inverse();
        let mut r = 0u64;
        for x in 0..16u8 {
            let v = inv.permute_point(self.get(sigma.permute_point(x)));
            r |= (v as u64) << (4 * x);
        }
        PermWord(r)
    }

    /// Key of the total order used to pick "smallest" words.
    #[inline]
    pub fn order_key(self) -> u64 {
        self.0
    }

    /// Position of `v`, without computing the whole inverse.
    #[inline]
    pub fn preimage(self, v: u8) -> u8 {
        for x in 0..16u8 {
            if self.get(x) == v {
                return x;
            }
        }
        unreachable!("word is not a permutation")
    }

    pub fn display(self, width: Width) -> TruthTable {
        TruthTable { word: self, width }
    }
}

#[inline(always)]
pub(crate) fn conjugate_raw(p: u64, m: &ConjMasks) -> u64 {
    let p = (p & m.keep) | ((p & m.up) << m.shift) | ((p & m.down) >> m.shift);
    (p & m.value_keep) | ((p & m.value_low) << 1) | ((p & m.value_high) >> 1)
}

impl fmt::Debug for PermWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PermWord({:#018x})", self.0)
    }
}

/// Text form `[v0,v1,...]` of a function.
pub struct TruthTable {
    word: PermWord,
    width: Width,
}

impl fmt::Display for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.width.points() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", self.word.get(i as u8))?;
        }
        f.write_str("]")
    }
}

/// Parses `[v0,...,v{2^n-1}]`; the width follows from the number of values.
pub fn parse_truth_table(text: &str) -> Result<(PermWord, Width), PermError> {
    let inner = text
        .trim()
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| PermError::Malformed("expected `[v0,v1,...]`".into()))?;
    let values = inner
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<u8>()
                .map_err(|_| PermError::Malformed(format!("bad value `{}`", s.trim())))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let width = match values.len() {
        4 => Width::TWO,
        8 => Width::THREE,
        16 => Width::FOUR,
        n => return Err(PermError::Malformed(format!("{n} values is not 4, 8 or 16"))),
    };
    Ok((PermWord::encode(&values, width)?, width))
}

/// A relabeling of lines: line `l` is moved to `self.map()[l]`. Lines at or
/// beyond the width in use are always fixed.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinePerm([u8; 4]);

impl LinePerm {
    pub const IDENTITY: LinePerm = LinePerm([0, 1, 2, 3]);

    pub fn new(map: [u8; 4]) -> Option<Self> {
        let mut seen = 0u8;
        for &l in &map {
            if l > 3 || seen & (1 << l) != 0 {
                return None;
            }
            seen |= 1 << l;
        }
        Some(LinePerm(map))
    }

    pub fn map(self) -> [u8; 4] {
        self.0
    }

    #[inline]
    pub fn apply(self, line: u8) -> u8 {
        self.0[line as usize]
    }

    /// `self` after `first`: line `l` goes to `self(first(l))`.
    pub fn after(self, first: LinePerm) -> LinePerm {
        LinePerm(first.0.map(|l| self.0[l as usize]))
    }

    pub fn inverse(self) -> LinePerm {
        let mut out = [0; 4];
        for (l, &m) in self.0.iter().enumerate() {
            out[m as usize] = l as u8;
        }
        LinePerm(out)
    }

    /// Fixes every line at or beyond `width`.
    pub fn fits(self, width: Width) -> bool {
        (width.lines()..4).all(|l| self.0[l] == l as u8)
    }

    /// The induced map on points: bit `i` of the result is bit `sigma(i)` of `x`.
    #[inline]
    pub fn permute_point(self, x: u8) -> u8 {
        let mut r = 0;
        for i in 0..4 {
            r |= ((x >> self.0[i]) & 1) << i;
        }
        r
    }

    /// All relabelings of the first `width` lines, in lexicographic order.
    pub fn all(width: Width) -> Vec<LinePerm> {
        let n = width.lines();
        let mut out = Vec::new();
        let mut cur: Vec<u8> = (0..n as u8).collect();
        loop {
            let mut map = [0, 1, 2, 3];
            map[..n].copy_from_slice(&cur);
            out.push(LinePerm(map));
            if !next_permutation(&mut cur) {
                break;
            }
        }
        out
    }

    /// Reverses the order of the first `width` lines.
    pub fn reversal(width: Width) -> LinePerm {
        let n = width.lines() as u8;
        let mut map = [0, 1, 2, 3];
        for l in 0..n {
            map[l as usize] = n - 1 - l;
        }
        LinePerm(map)
    }
}

impl fmt::Debug for LinePerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LinePerm{:?}", self.0)
    }
}

fn next_permutation(v: &mut [u8]) -> bool {
    let n = v.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// `FACTORIAL[m] = m!` for `m <= 20`.
pub const FACTORIAL: [u64; 21] = {
    let mut f = [1u64; 21];
    let mut i = 1;
    while i <= 20 {
        f[i] = f[i - 1] * i as u64;
        i += 1;
    }
    f
};

/// Lexicographic rank of a permutation of `0..m` (Lehmer code), `m <= 20`.
pub fn rank_perm(values: &[u8]) -> Result<u64, PermError> {
    let m = values.len();
    if m > 20 {
        return Err(PermError::NotAPermutation {
            points: m,
            detail: "more than 20 elements".into(),
        });
    }
    let mut unused: u32 = (1u32 << m) - 1;
    let mut rank = 0u64;
    for (i, &v) in values.iter().enumerate() {
        if (v as usize) >= m || unused & (1 << v) == 0 {
            return Err(PermError::NotAPermutation {
                points: m,
                detail: format!("value {v} repeated or out of range"),
            });
        }
        let smaller = (unused & ((1u32 << v) - 1)).count_ones() as u64;
        rank += smaller * FACTORIAL[m - 1 - i];
        unused &= !(1 << v);
    }
    Ok(rank)
}

/// Inverse of [`rank_perm`].
pub fn unrank_perm(rank: u64, m: usize) -> Result<Vec<u8>, PermError> {
    let mut out = vec![0u8; m];
    unrank_into(rank, &mut out)?;
    Ok(out)
}

/// [`unrank_perm`] into a caller-provided buffer whose length is `m`.
pub fn unrank_into(mut rank: u64, out: &mut [u8]) -> Result<(), PermError> {
    let m = out.len();
    if m > 20 || rank >= FACTORIAL[m] {
        return Err(PermError::OutOfRange { rank, len: m });
    }
    let mut unused: u32 = (1u32 << m) - 1;
    for i in 0..m {
        let f = FACTORIAL[m - 1 - i];
        let mut k = rank / f;
        rank %= f;
        let mut bits = unused;
        while k > 0 {
            bits &= bits - 1;
            k -= 1;
        }
        let v = bits.trailing_zeros();
        out[i] = v as u8;
        unused &= !(1 << v);
    }
    Ok(())
}
