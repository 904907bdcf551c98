// SPDX-License-Identifier: Apache-2.0

//! Dense integer indexings of the functions tracked by the exhaustive
//! pipeline.

use crate::perm::{rank_perm, unrank_into, PermWord, Width, FACTORIAL};

use super::SearchError;

/// Values of a function at 0 and 15 and of its inverse at 0 and 15: enough
/// to decide almost-reducedness of every member of its class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Boundary {
    pub f0: u8,
    pub f15: u8,
    pub inv0: u8,
    pub inv15: u8,
}

impl Boundary {
    pub fn of(p: PermWord) -> Self {
        Boundary {
            f0: p.get(0),
            f15: p.get(15),
            inv0: p.preimage(0),
            inv15: p.preimage(15),
        }
    }

    pub fn code(self) -> u16 {
        self.f0 as u16 | (self.f15 as u16) << 4 | (self.inv0 as u16) << 8 | (self.inv15 as u16) << 12
    }

    pub fn from_code(c: u16) -> Self {
        Boundary {
            f0: (c & 0xF) as u8,
            f15: (c >> 4 & 0xF) as u8,
            inv0: (c >> 8 & 0xF) as u8,
            inv15: (c >> 12 & 0xF) as u8,
        }
    }
}

/// A bijection between a set of functions and `0..len`.
pub trait IndexScheme: Send + Sync {
    /// Identifier stored in bit-file headers.
    fn id(&self) -> u8;
    fn width(&self) -> Width;
    fn len(&self) -> u64;
    fn contains(&self, p: PermWord) -> bool;
    /// Membership decided from boundary values alone.
    fn contains_boundary(&self, b: Boundary) -> bool;
    fn index(&self, p: PermWord) -> Result<u64, SearchError>;
    fn from_index(&self, i: u64) -> Result<PermWord, SearchError>;
}

/// Valid `(A, B)` pairs in numeric order.
pub const AB_PAIRS: [(u8, u8); 21] = [
    (0, 1),
    (0, 3),
    (0, 7),
    (0, 15),
    (1, 1),
    (1, 2),
    (1, 15),
    (3, 1),
    (3, 3),
    (3, 4),
    (3, 5),
    (3, 12),
    (3, 15),
    (7, 1),
    (7, 3),
    (7, 7),
    (7, 8),
    (7, 9),
    (7, 11),
    (7, 15),
    (15, 15),
];

const fn pair_table() -> [u8; 256] {
    let mut t = [u8::MAX; 256];
    let mut i = 0;
    while i < AB_PAIRS.len() {
        let (a, b) = AB_PAIRS[i];
        t[(a as usize) << 4 | b as usize] = i as u8;
        i += 1;
    }
    t
}

static PAIR_INDEX: [u8; 256] = pair_table();

const Q_LEN: usize = 14;
const Q_COUNT: u64 = FACTORIAL[Q_LEN];

/// Almost-reduced 4-bit functions: `p(0) = 0` and `p(15)` in {1,3,7,15}, or
/// `(p(0), p^-1(0))` in a fixed set of 17 pairs. Index is
/// `14! * n(A, B) + rank(Q)`, where `A = p(0)`, `B` is `p(15)` or
/// `p^-1(0)`, and `Q` is the rest of `p` renumbered to a permutation of 14.
#[derive(Debug, Clone, Copy, Default)]
pub struct AlmostReduced;

impl AlmostReduced {
    /// Index of the `(A, B)` pair, if valid.
    #[inline]
    pub fn pair_index(a: u8, b: u8) -> Option<usize> {
        match PAIR_INDEX[(a as usize) << 4 | b as usize] {
            u8::MAX => None,
            i => Some(i as usize),
        }
    }

    #[inline]
    fn ab(p: PermWord) -> (u8, u8) {
        let a = p.get(0);
        if a == 0 {
            (0, p.get(15))
        } else {
            (a, p.preimage(0))
        }
    }

    // domain points and values pinned by (a, b), as bit masks
    #[inline]
    fn pinned(a: u8, b: u8) -> (u16, u16) {
        if a == 0 {
            (1 | 1 << 15, 1 | 1 << b)
        } else {
            (1 | 1 << b, 1 | 1 << a)
        }
    }

    #[inline]
    fn is_member(f0: u8, f15: u8, inv0: u8) -> bool {
        if f0 == 0 {
            matches!(f15, 1 | 3 | 7 | 15)
        } else {
            Self::pair_index(f0, inv0).is_some()
        }
    }
}

impl IndexScheme for AlmostReduced {
    fn id(&self) -> u8 {
        1
    }

    fn width(&self) -> Width {
        Width::FOUR
    }

    fn len(&self) -> u64 {
        AB_PAIRS.len() as u64 * Q_COUNT
    }

    #[inline]
    fn contains(&self, p: PermWord) -> bool {
        let f0 = p.get(0);
        if f0 == 0 {
            Self::is_member(0, p.get(15), 0)
        } else {
            Self::is_member(f0, 0, p.preimage(0))
        }
    }

    #[inline]
    fn contains_boundary(&self, b: Boundary) -> bool {
        Self::is_member(b.f0, b.f15, b.inv0)
    }

    fn index(&self, p: PermWord) -> Result<u64, SearchError> {
        let (a, b) = Self::ab(p);
        let pair = Self::pair_index(a, b).ok_or(SearchError::NotAlmostReduced(p))?;
        let (dom, vals) = Self::pinned(a, b);
        let mut q = [0u8; Q_LEN];
        let mut n = 0;
        for x in 0..16u8 {
            if dom & (1 << x) != 0 {
                continue;
            }
            let v = p.get(x);
            // renumber: count unpinned values below v
            let below = (!vals & ((1u16 << v) - 1)).count_ones() as u8;
            q[n] = below;
            n += 1;
        }
        let r = rank_perm(&q).expect("Q is a permutation");
        Ok(pair as u64 * Q_COUNT + r)
    }

    fn from_index(&self, i: u64) -> Result<PermWord, SearchError> {
        if i >= self.len() {
            return Err(SearchError::OutOfRange { index: i, len: self.len() });
        }
        let (a, b) = AB_PAIRS[(i / Q_COUNT) as usize];
        let mut q = [0u8; Q_LEN];
        unrank_into(i % Q_COUNT, &mut q).expect("rank in range");
        let (dom, vals) = Self::pinned(a, b);
        let mut free_vals = [0u8; Q_LEN];
        let mut n = 0;
        for v in 0..16u8 {
            if vals & (1 << v) == 0 {
                free_vals[n] = v;
                n += 1;
            }
        }
        let mut out = [0u8; 16];
        if a == 0 {
            out[0] = 0;
            out[15] = b;
        } else {
            out[0] = a;
            out[b as usize] = 0;
        }
        let mut j = 0;
        for x in 0..16usize {
            if dom & (1 << x) != 0 {
                continue;
            }
            out[x] = free_vals[q[j] as usize];
            j += 1;
        }
        Ok(PermWord::encode(&out, Width::FOUR).expect("valid by construction"))
    }
}

/// Every function of a width, indexed by the lexicographic rank of its
/// value sequence.
#[derive(Debug, Clone, Copy)]
pub struct Lehmer {
    width: Width,
}

impl Lehmer {
    pub fn new(width: Width) -> Self {
        Lehmer { width }
    }
}

impl IndexScheme for Lehmer {
    fn id(&self) -> u8 {
        2
    }

    fn width(&self) -> Width {
        self.width
    }

    fn len(&self) -> u64 {
        FACTORIAL[self.width.points()]
    }

    fn contains(&self, p: PermWord) -> bool {
        p.is_valid(self.width)
    }

    fn contains_boundary(&self, _b: Boundary) -> bool {
        true
    }

    fn index(&self, p: PermWord) -> Result<u64, SearchError> {
        let m = self.width.points();
        let v = p.to_array();
        rank_perm(&v[..m]).map_err(|_| SearchError::NotAlmostReduced(p))
    }

    fn from_index(&self, i: u64) -> Result<PermWord, SearchError> {
        if i >= self.len() {
            return Err(SearchError::OutOfRange { index: i, len: self.len() });
        }
        let m = self.width.points();
        let mut v = [0u8; 16];
        unrank_into(i, &mut v[..m]).expect("rank in range");
        Ok(PermWord::encode(&v[..m], self.width).expect("valid by construction"))
    }
}

/// The scheme used by default for a width.
pub fn default_scheme(width: Width) -> Box<dyn IndexScheme> {
    if width == Width::FOUR {
        Box::new(AlmostReduced)
    } else {
        Box::new(Lehmer::new(width))
    }
}

pub fn scheme_by_id(id: u8, width: Width) -> Option<Box<dyn IndexScheme>> {
    match (id, width.lines()) {
        (1, 4) => Some(Box::new(AlmostReduced)),
        (2, _) => Some(Box::new(Lehmer::new(width))),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn pair_count_and_space() {
        assert_eq!(AB_PAIRS.len(), 21);
        let mut sorted = AB_PAIRS;
        sorted.sort();
        assert_eq!(sorted, AB_PAIRS);
        assert_eq!(AlmostReduced.len(), 21 * 87_178_291_200);
        assert!((AlmostReduced.len() as f64) < 1.84e12);
    }

    #[test]
    fn membership_examples() {
        let not_a = PermWord(0xEFCD_AB89_6745_2301);
        assert!(AlmostReduced.contains(not_a));
        assert!(AlmostReduced.contains(PermWord::IDENTITY));
        let mut v: Vec<u8> = (0..16).collect();
        v.swap(0, 2);
        assert!(!AlmostReduced.contains(PermWord::encode(&v, Width::FOUR).unwrap()));
    }

    #[test]
    fn boundaries() {
        let s = AlmostReduced;
        assert_eq!(s.index(s.from_index(0).unwrap()).unwrap(), 0);
        let first = s.from_index(0).unwrap();
        assert_eq!(first.get(0), 0);
        assert_eq!(first.get(15), 1);
        let last = s.len() - 1;
        assert_eq!(s.index(s.from_index(last).unwrap()).unwrap(), last);
        assert!(matches!(s.from_index(s.len()), Err(SearchError::OutOfRange { .. })));
        for pair in 0..21u64 {
            for off in [0, 1, Q_COUNT - 1] {
                let i = pair * Q_COUNT + off;
                let p = s.from_index(i).unwrap();
                assert!(s.contains(p));
                assert!(s.contains_boundary(Boundary::of(p)));
                assert_eq!(s.index(p).unwrap(), i);
            }
        }
    }

    #[test]
    fn random_roundtrip() {
        let s = AlmostReduced;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for _ in 0..1_000_000 {
            let i = rng.random_range(0..s.len());
            let p = s.from_index(i).unwrap();
            assert!(s.contains(p));
            assert_eq!(s.index(p).unwrap(), i);
        }
    }

    #[test]
    fn index_is_lexicographic_within_pair() {
        let s = AlmostReduced;
        let a = s.from_index(5 * Q_COUNT).unwrap();
        assert_eq!((a.get(0), a.preimage(0)), (1, 2));
        let b = s.from_index(5 * Q_COUNT + 1).unwrap();
        assert!(a.decode(Width::FOUR) < b.decode(Width::FOUR));
        let mut v: Vec<u8> = (0..16).collect();
        v.swap(0, 2);
        let not_ar = PermWord::encode(&v, Width::FOUR).unwrap();
        assert!(matches!(s.index(not_ar), Err(SearchError::NotAlmostReduced(_))));
    }

    #[test]
    fn lehmer_width_three() {
        let s = Lehmer::new(Width::THREE);
        assert_eq!(s.len(), 40320);
        for i in 0..s.len() {
            let p = s.from_index(i).unwrap();
            assert_eq!(s.index(p).unwrap(), i);
        }
        assert_eq!(s.from_index(0).unwrap(), PermWord::IDENTITY);
    }

    #[test]
    fn boundary_code_roundtrip() {
        let b = Boundary { f0: 3, f15: 9, inv0: 12, inv15: 1 };
        assert_eq!(Boundary::from_code(b.code()), b);
    }
}
