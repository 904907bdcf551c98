// SPDX-License-Identifier: Apache-2.0

//! Exhaustive enumeration of every function of a given minimal size over a
//! bit-array indexed function space, one size at a time.
//!
//! Each transition from size `k` to `k + 1` runs four stages: composition
//! with every gate, canonization to the smallest almost-reduced class member,
//! subtraction of the sizes `k` and `k - 1`, and counting.

pub mod bits;
pub mod exec;
pub mod index;
pub mod pipeline;
pub mod stages;

use std::io;
use std::path::PathBuf;

use thiserror::Error;

use crate::context::Context;
use crate::equiv::EquivWitness;
use crate::gate::Architecture;
use crate::perm::{PermWord, Width};
use crate::table::TableError;

pub use bits::{BitSlice, Storage};
pub use exec::ExecConfig;
pub use index::{default_scheme, scheme_by_id, AlmostReduced, Boundary, IndexScheme, Lehmer};
pub use pipeline::{run_pipeline, seed_slices, PipelineConfig, PipelineRun, SizeCounts, StorageMode};
pub use stages::{stage_canonization, stage_composition, stage_counting, stage_subtraction, CompositionMode, StageEnv};

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("{:#018x} is not in the index space", .0 .0)]
    NotAlmostReduced(PermWord),
    #[error("index {index} out of range 0..{len}")]
    OutOfRange { index: u64, len: u64 },
    #[error("slice [{lo}, {hi}) does not fit the index space of length {len}")]
    SliceMismatch { lo: u64, hi: u64, len: u64 },
    #[error("bit sets cover different ranges: [{a_lo}, {a_hi}) vs [{b_lo}, {b_hi})")]
    LengthMismatch { a_lo: u64, a_hi: u64, b_lo: u64, b_hi: u64 },
    #[error("memory budget exceeded: {needed} bytes needed, budget {budget}; completed sizes {completed:?}")]
    BudgetExceeded { needed: u64, budget: u64, completed: Vec<u8> },
    #[error("dense storage of {bytes} bytes for one size refused without the explicit large-storage opt-in")]
    DenseRefused { bytes: u64 },
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    #[error("bad bit file {path}: {msg}")]
    Format { path: PathBuf, msg: String },
    #[error("checkpoint manifest: {0}")]
    Manifest(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error(transparent)]
    Table(#[from] TableError),
}

impl From<serde_json::Error> for SearchError {
    fn from(e: serde_json::Error) -> Self {
        SearchError::Manifest(e.to_string())
    }
}

/// Whether a 4-bit function is almost reduced.
pub fn is_almost_reduced(p: PermWord) -> bool {
    AlmostReduced.contains(p)
}

// shortcut table entry meaning "no class member is in the index space"
const NO_ENTRY: u16 = u16::MAX;

/// A symmetry context together with an index scheme and the tables the
/// stages need.
pub struct SearchSpace {
    ctx: Context,
    scheme: Box<dyn IndexScheme>,
    gates: Vec<u64>,
    // gate_conj[slot * gates + g] = conj_sigma(gate g)
    gate_conj: Vec<u64>,
    // boundary code of q -> (slot << 1 | inv) of the first member in the space
    shortcut: Vec<u16>,
}

impl std::fmt::Debug for SearchSpace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SearchSpace")
            .field("width", &self.ctx.width())
            .field("arch", &self.ctx.arch())
            .field("scheme", &self.scheme.id())
            .finish()
    }
}

impl SearchSpace {
    /// The default scheme for the context's width.
    pub fn new(ctx: Context) -> Result<Self, SearchError> {
        let scheme = default_scheme(ctx.width());
        Self::with_scheme(ctx, scheme)
    }

    pub fn with_scheme(ctx: Context, scheme: Box<dyn IndexScheme>) -> Result<Self, SearchError> {
        if scheme.width() != ctx.width() {
            return Err(SearchError::Unsupported(format!(
                "scheme {} is for n={}, context is n={}",
                scheme.id(),
                scheme.width().lines(),
                ctx.width().lines()
            )));
        }
        if scheme.id() == AlmostReduced.id() && ctx.arch() != Architecture::Full {
            // with only two relabelings some classes have no almost-reduced member
            return Err(SearchError::Unsupported(
                "the almost-reduced index space needs the full relabeling group".into(),
            ));
        }
        let group = ctx.group();
        let gates: Vec<u64> = ctx.library().gates().iter().map(|g| g.word_on(ctx.width()).0).collect();
        let mut gate_conj = Vec::with_capacity(gates.len() * group.order_size() / 2);
        for &sigma in group.relabelings() {
            for &g in &gates {
                gate_conj.push(PermWord(g).conjugate(sigma).0);
            }
        }
        let mut shortcut = vec![NO_ENTRY; 1 << 16];
        for (code, slot) in shortcut.iter_mut().enumerate() {
            let b = Boundary::from_code(code as u16);
            'search: for (s, &sigma) in group.relabelings().iter().enumerate() {
                let inv = sigma.inverse();
                let c = Boundary {
                    f0: inv.permute_point(b.f0),
                    f15: inv.permute_point(b.f15),
                    inv0: inv.permute_point(b.inv0),
                    inv15: inv.permute_point(b.inv15),
                };
                let flipped = Boundary {
                    f0: c.inv0,
                    f15: c.inv15,
                    inv0: c.f0,
                    inv15: c.f15,
                };
                for (e, cand) in [c, flipped].into_iter().enumerate() {
                    if scheme.contains_boundary(cand) {
                        *slot = (s << 1 | e) as u16;
                        break 'search;
                    }
                }
            }
        }
        Ok(SearchSpace {
            ctx,
            scheme,
            gates,
            gate_conj,
            shortcut,
        })
    }

    pub fn ctx(&self) -> &Context {
        &self.ctx
    }

    pub fn width(&self) -> Width {
        self.ctx.width()
    }

    pub fn scheme(&self) -> &dyn IndexScheme {
        self.scheme.as_ref()
    }

    pub fn len(&self) -> u64 {
        self.scheme.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn gates(&self) -> &[u64] {
        &self.gates
    }

    #[inline]
    pub(crate) fn gate_conj(&self, slot: usize, g: usize) -> u64 {
        self.gate_conj[slot * self.gates.len() + g]
    }

    #[inline]
    pub(crate) fn shortcut_entry(&self, b: Boundary) -> Option<(usize, bool)> {
        match self.shortcut[b.code() as usize] {
            NO_ENTRY => None,
            v => Some(((v >> 1) as usize, v & 1 == 1)),
        }
    }

    /// The order-minimal class member inside the index space, with the
    /// witness recovering `p` from it.
    pub fn find_almost_reduced_equivalent(&self, p: PermWord) -> Result<(PermWord, EquivWitness), SearchError> {
        let group = self.ctx.group();
        let order = self.ctx.order();
        let mut table = [0u64; 48];
        group.class_table(p, &mut table);
        let mut best: Option<(u64, usize)> = None;
        for (i, &w) in table[..group.order_size()].iter().enumerate() {
            if self.scheme.contains(PermWord(w)) {
                let k = order.key(w);
                if best.is_none_or(|(bk, _)| k < bk) {
                    best = Some((k, i));
                }
            }
        }
        let (_, i) = best.ok_or(SearchError::NotAlmostReduced(p))?;
        let witness = EquivWitness {
            sigma: group.relabelings()[i / 2].inverse(),
            inverted: i % 2 == 1,
        };
        Ok((PermWord(table[i]), witness))
    }

    /// Index of the canonical member of `p`'s class.
    #[inline]
    pub fn canonical_index(&self, p: PermWord) -> Result<u64, SearchError> {
        let group = self.ctx.group();
        let order = self.ctx.order();
        let mut table = [0u64; 48];
        group.class_table(p, &mut table);
        let mut best = u64::MAX;
        for &w in &table[..group.order_size()] {
            let k = order.key(w);
            if k < best && self.scheme.contains(PermWord(w)) {
                best = k;
            }
        }
        if best == u64::MAX {
            return Err(SearchError::NotAlmostReduced(p));
        }
        self.scheme.index(PermWord(order.key(best)))
    }

    /// First member `conj_sigma(q^e)` in the index space, scanning relabelings
    /// in slot order and the plain function before its inverse.
    pub fn first_member_in_space(&self, q: PermWord) -> Option<PermWord> {
        let group = self.ctx.group();
        let qi = q.inverse();
        for &sigma in group.relabelings() {
            for f in [q, qi] {
                let r = f.conjugate(sigma);
                if self.scheme.contains(r) {
                    return Some(r);
                }
            }
        }
        None
    }
}
