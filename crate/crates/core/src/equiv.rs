// SPDX-License-Identifier: Apache-2.0

//! Equivalence under simultaneous input/output relabeling and inversion,
//! canonical representatives with witnesses, and gate conjugation tables.

use std::collections::VecDeque;

use thiserror::Error;

use crate::gate::{Architecture, GateLibrary};
use crate::perm::{conjugate_raw, ConjMasks, LinePerm, PermWord, Transposition, Width};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EquivError {
    #[error("gate {gate} relabeled by {sigma:?} is not in the {arch} library")]
    ClosureViolation {
        gate: String,
        sigma: LinePerm,
        arch: Architecture,
    },
}

/// Which total order picks the representative of a class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum OrderConvention {
    /// Unsigned comparison of the raw word (f(15) most significant).
    #[default]
    Word,
    /// Lexicographic on the value sequence f(0), f(1), ... (f(0) most significant).
    ValueLex,
}

impl OrderConvention {
    pub fn id(self) -> u8 {
        match self {
            OrderConvention::Word => 0,
            OrderConvention::ValueLex => 1,
        }
    }

    pub fn from_id(id: u8) -> Option<Self> {
        match id {
            0 => Some(OrderConvention::Word),
            1 => Some(OrderConvention::ValueLex),
            _ => None,
        }
    }

    /// Maps a word to a key whose unsigned order is this convention's order.
    /// The map is an involution, so it also turns keys back into words.
    #[inline(always)]
    pub fn key(self, w: u64) -> u64 {
        match self {
            OrderConvention::Word => w,
            OrderConvention::ValueLex => reverse_nibbles(w),
        }
    }
}

#[inline(always)]
fn reverse_nibbles(x: u64) -> u64 {
    let x = x.swap_bytes();
    ((x & 0x0F0F_0F0F_0F0F_0F0F) << 4) | ((x >> 4) & 0x0F0F_0F0F_0F0F_0F0F)
}

/// How to get a function back from its representative: `f = conj_sigma(rep^inv)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EquivWitness {
    pub sigma: LinePerm,
    pub inverted: bool,
}

impl EquivWitness {
    pub const IDENTITY: EquivWitness = EquivWitness {
        sigma: LinePerm::IDENTITY,
        inverted: false,
    };

    pub fn apply(self, p: PermWord) -> PermWord {
        let q = if self.inverted { p.inverse() } else { p };
        q.conjugate(self.sigma)
    }

    /// The witness undoing this one.
    pub fn inverse(self) -> EquivWitness {
        EquivWitness {
            sigma: self.sigma.inverse(),
            inverted: self.inverted,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Step {
    masks: &'static ConjMasks,
    // all-ones when the relabeling reached after this step is outside the group
    skip: u64,
    // index in `relabelings` of the witness rebuilding f from this member
    slot: u8,
    // index of the relabeling producing this member from f
    member_slot: u8,
}

/// Relabelings allowed by an architecture, plus inversion.
///
/// FULL allows every permutation of the lines. LNN allows only the identity
/// and the reversal of the line order, since other relabelings break
/// adjacency.
#[derive(Debug, Clone)]
pub struct SymmetryGroup {
    width: Width,
    arch: Architecture,
    order: OrderConvention,
    relabelings: Vec<LinePerm>,
    steps: Vec<Step>,
    slot_of: [u8; 256],
    id_slot: u8,
    mul: Vec<u8>,
}

fn perm_code(p: LinePerm) -> usize {
    p.map().iter().enumerate().fold(0, |acc, (i, &l)| acc | ((l as usize) << (2 * i)))
}

impl SymmetryGroup {
    pub fn new(width: Width, arch: Architecture, order: OrderConvention) -> Self {
        let all = LinePerm::all(width);
        let relabelings: Vec<LinePerm> = match arch {
            Architecture::Full => all.clone(),
            Architecture::Lnn => {
                let mut v = vec![LinePerm::IDENTITY, LinePerm::reversal(width)];
                v.sort_by_key(|p| p.map());
                v.dedup();
                v
            }
        };
        let mut slot_of = [u8::MAX; 256];
        for (i, &p) in relabelings.iter().enumerate() {
            slot_of[perm_code(p)] = i as u8;
        }
        let path = if relabelings.len() == all.len() {
            hamiltonian_walk(width)
        } else {
            covering_walk(width, &relabelings)
        };
        let mut steps = Vec::with_capacity(path.len());
        let mut tau = LinePerm::IDENTITY;
        for t in path {
            tau = t.as_line_perm().after(tau);
            let slot = slot_of[perm_code(tau.inverse())];
            let member_slot = slot_of[perm_code(tau)];
            steps.push(Step {
                masks: t.masks(),
                skip: if slot == u8::MAX { u64::MAX } else { 0 },
                slot: if slot == u8::MAX { 0 } else { slot },
                member_slot: if member_slot == u8::MAX { 0 } else { member_slot },
            });
        }
        let mut mul = Vec::with_capacity(relabelings.len() * relabelings.len());
        for &a in &relabelings {
            for &b in &relabelings {
                mul.push(slot_of[perm_code(a.after(b))]);
            }
        }
        let id_slot = slot_of[perm_code(LinePerm::IDENTITY)];
        SymmetryGroup {
            width,
            arch,
            order,
            relabelings,
            steps,
            slot_of,
            id_slot,
            mul,
        }
    }

    pub fn width(&self) -> Width {
        self.width
    }

    pub fn arch(&self) -> Architecture {
        self.arch
    }

    pub fn order(&self) -> OrderConvention {
        self.order
    }

    /// Allowed relabelings in lexicographic order.
    pub fn relabelings(&self) -> &[LinePerm] {
        &self.relabelings
    }

    /// Number of (relabeling, inversion) pairs.
    pub fn order_size(&self) -> usize {
        2 * self.relabelings.len()
    }

    /// Position of `sigma` in `relabelings`, if allowed.
    pub fn slot(&self, sigma: LinePerm) -> Option<usize> {
        match self.slot_of[perm_code(sigma)] {
            u8::MAX => None,
            s => Some(s as usize),
        }
    }

    /// Adjacent transpositions walked to reach every allowed relabeling.
    pub fn walk_len(&self) -> usize {
        self.steps.len()
    }

    /// Order key of the class representative of `f`. Cheapest query: one
    /// inversion and two adjacent conjugations per walk step.
    #[inline]
    pub fn canonical_key(&self, f: PermWord) -> u64 {
        match self.order {
            OrderConvention::Word => self.min_key::<false>(f.0),
            OrderConvention::ValueLex => self.min_key::<true>(f.0),
        }
    }

    #[inline(always)]
    fn min_key<const REV: bool>(&self, f: u64) -> u64 {
        let k = |w: u64| if REV { reverse_nibbles(w) } else { w };
        let mut a = f;
        let mut b = PermWord(f).inverse().0;
        let mut m = k(a).min(k(b));
        for s in &self.steps {
            a = conjugate_raw(a, s.masks);
            b = conjugate_raw(b, s.masks);
            m = m.min(k(a) | s.skip).min(k(b) | s.skip);
        }
        m
    }

    /// Representative of the class of `f`.
    #[inline]
    pub fn canonical_word(&self, f: PermWord) -> PermWord {
        PermWord(self.order.key(self.canonical_key(f)))
    }

    /// Representative and the witness rebuilding `f` from it. Ties between
    /// witnesses go to the lexicographically smallest relabeling, then to the
    /// non-inverted one.
    pub fn canonical(&self, f: PermWord) -> (PermWord, EquivWitness) {
        let key = |w: u64| self.order.key(w);
        let mut a = f.0;
        let mut b = f.inverse().0;
        let id_slot = self.id_slot;
        let mut best = (key(a), id_slot, false).min((key(b), id_slot, true));
        for s in &self.steps {
            a = conjugate_raw(a, s.masks);
            b = conjugate_raw(b, s.masks);
            if s.skip == 0 {
                best = best.min((key(a), s.slot, false)).min((key(b), s.slot, true));
            }
        }
        let (k, slot, inverted) = best;
        (
            PermWord(self.order.key(k)),
            EquivWitness {
                sigma: self.relabelings[slot as usize],
                inverted,
            },
        )
    }

    /// Every distinct `conj_sigma(f^inv)`, paired with the `(sigma, inv)` that
    /// produces it from `f`, first occurrence kept in witness order.
    pub fn equivalence_class(&self, f: PermWord) -> Vec<(PermWord, EquivWitness)> {
        let fi = f.inverse();
        let mut out: Vec<(PermWord, EquivWitness)> = Vec::with_capacity(self.order_size());
        for &sigma in &self.relabelings {
            for (inverted, base) in [(false, f), (true, fi)] {
                let m = base.conjugate(sigma);
                if !out.iter().any(|(w, _)| *w == m) {
                    out.push((m, EquivWitness { sigma, inverted }));
                }
            }
        }
        out
    }

    /// Appends the class of `f` to `out` in walk order, duplicates included.
    #[inline]
    pub fn class_words_into(&self, f: PermWord, out: &mut Vec<u64>) {
        let mut a = f.0;
        let mut b = f.inverse().0;
        out.push(a);
        out.push(b);
        for s in &self.steps {
            a = conjugate_raw(a, s.masks);
            b = conjugate_raw(b, s.masks);
            if s.skip == 0 {
                out.push(a);
                out.push(b);
            }
        }
    }

    /// `out[2 * s + e]` = the member `conj_sigma(f^e)` for the `s`-th
    /// relabeling; fills the first `order_size()` entries.
    #[inline]
    pub fn class_table(&self, f: PermWord, out: &mut [u64; 48]) {
        let id_slot = self.id_slot as usize;
        let mut a = f.0;
        let mut b = f.inverse().0;
        out[2 * id_slot] = a;
        out[2 * id_slot + 1] = b;
        for s in &self.steps {
            a = conjugate_raw(a, s.masks);
            b = conjugate_raw(b, s.masks);
            if s.skip == 0 {
                out[2 * s.member_slot as usize] = a;
                out[2 * s.member_slot as usize + 1] = b;
            }
        }
    }

    /// Distinct class members of `f` in witness order (relabelings
    /// lexicographically, plain before inverted). Returns how many were written.
    pub fn class_in_witness_order(&self, f: PermWord, out: &mut [u64; 48]) -> usize {
        let mut by_witness = [0u64; 48];
        self.class_table(f, &mut by_witness);
        let mut n = 0;
        for &w in &by_witness[..self.order_size()] {
            if !out[..n].contains(&w) {
                out[n] = w;
                n += 1;
            }
        }
        n
    }

    /// Slot of `relabelings[a]` applied after `relabelings[b]`.
    #[inline]
    pub fn mul_slots(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.relabelings.len() + b] as usize
    }

    /// The class of `f` as sorted, distinct words.
    pub fn class_words(&self, f: PermWord) -> Vec<u64> {
        let mut v = Vec::with_capacity(self.order_size());
        self.class_words_into(f, &mut v);
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn class_size(&self, f: PermWord) -> usize {
        let mut buf = [0u64; 48];
        let mut n = 0;
        let mut a = f.0;
        let mut b = f.inverse().0;
        buf[0] = a;
        buf[1] = b;
        n += 2;
        for s in &self.steps {
            a = conjugate_raw(a, s.masks);
            b = conjugate_raw(b, s.masks);
            if s.skip == 0 {
                buf[n] = a;
                buf[n + 1] = b;
                n += 2;
            }
        }
        let v = &mut buf[..n];
        v.sort_unstable();
        1 + v.windows(2).filter(|w| w[0] != w[1]).count()
    }

    pub fn equivalent(&self, f: PermWord, g: PermWord) -> bool {
        self.canonical_key(f) == self.canonical_key(g)
    }
}

/// Walk from the identity through every relabeling of the first `width`
/// lines, one adjacent transposition per step.
fn hamiltonian_walk(width: Width) -> Vec<Transposition> {
    let all = LinePerm::all(width);
    let ts = width.transpositions();
    let mut path = Vec::with_capacity(all.len());
    let mut seen = vec![LinePerm::IDENTITY];
    fn dfs(
        cur: LinePerm,
        total: usize,
        ts: &[Transposition],
        seen: &mut Vec<LinePerm>,
        path: &mut Vec<Transposition>,
    ) -> bool {
        if seen.len() == total {
            return true;
        }
        for &t in ts {
            let next = t.as_line_perm().after(cur);
            if seen.contains(&next) {
                continue;
            }
            seen.push(next);
            path.push(t);
            if dfs(next, total, ts, seen, path) {
                return true;
            }
            seen.pop();
            path.pop();
        }
        false
    }
    let found = dfs(LinePerm::IDENTITY, all.len(), ts, &mut seen, &mut path);
    assert!(found, "adjacent transpositions generate every relabeling");
    path
}

/// Shortest adjacent-transposition walk visiting each of `targets` in turn.
fn covering_walk(width: Width, targets: &[LinePerm]) -> Vec<Transposition> {
    let ts = width.transpositions();
    let mut path = Vec::new();
    let mut cur = LinePerm::IDENTITY;
    for &goal in targets {
        if goal == cur {
            continue;
        }
        let mut prev: Vec<(LinePerm, LinePerm, Transposition)> = Vec::new();
        let mut queue = VecDeque::from([cur]);
        let mut visited = vec![cur];
        while let Some(p) = queue.pop_front() {
            if p == goal {
                break;
            }
            for &t in ts {
                let q = t.as_line_perm().after(p);
                if !visited.contains(&q) {
                    visited.push(q);
                    prev.push((q, p, t));
                    queue.push_back(q);
                }
            }
        }
        let mut seg = Vec::new();
        let mut at = goal;
        while at != cur {
            let &(_, p, t) = prev.iter().find(|(q, _, _)| *q == at).unwrap();
            seg.push(t);
            at = p;
        }
        seg.reverse();
        path.extend(seg);
        cur = goal;
    }
    path
}

/// `table[g][s]` = id of gate `g` relabeled by the group's `s`-th relabeling.
#[derive(Debug, Clone)]
pub struct GateConjTable {
    n_relabel: usize,
    table: Vec<u8>,
}

impl GateConjTable {
    pub fn new(group: &SymmetryGroup, library: &GateLibrary) -> Result<Self, EquivError> {
        let n_relabel = group.relabelings().len();
        let mut table = Vec::with_capacity(library.len() * n_relabel);
        for g in library.gates() {
            for &sigma in group.relabelings() {
                let h = g.relabel(sigma);
                let id = library.id_of(&h).ok_or_else(|| EquivError::ClosureViolation {
                    gate: g.to_string(),
                    sigma,
                    arch: library.arch(),
                })?;
                table.push(id);
            }
        }
        Ok(GateConjTable { n_relabel, table })
    }

    #[inline]
    pub fn conj(&self, gate_id: u8, slot: usize) -> u8 {
        self.table[gate_id as usize * self.n_relabel + slot]
    }

    pub fn entries(&self) -> usize {
        self.table.len()
    }
}
