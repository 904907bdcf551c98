// SPDX-License-Identifier: Apache-2.0

//! Size-by-size driver: runs the stages over every slice, records per-size
//! counts, and checkpoints each finished size to a work directory.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::perm::PermWord;
use crate::table::CanonTable;

use super::bits::{read_bits, write_bits, BitFileHeader, BitSlice, Storage};
use super::exec::ExecConfig;
use super::stages::{stage_canonization, stage_composition, stage_counting, stage_subtraction, CompositionMode, StageEnv};
use super::{SearchError, SearchSpace};

pub const MANIFEST_NAME: &str = "manifest.json";

/// Dense sets above this size need the explicit opt-in.
pub const DENSE_LIMIT_BYTES: u64 = 4 << 30;

// Auto picks dense storage up to this size
const AUTO_DENSE_BYTES: u64 = 64 << 20;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StorageMode {
    #[default]
    Auto,
    Dense,
    Sparse,
}

#[derive(Debug, Clone, Default)]
pub struct PipelineConfig {
    /// Output ranges processed one after another; at least 1.
    pub slices: usize,
    pub exec: ExecConfig,
    pub storage: StorageMode,
    pub composition: CompositionMode,
    pub budget_bytes: Option<u64>,
    /// Allow dense sets beyond [`DENSE_LIMIT_BYTES`].
    pub allow_huge_dense: bool,
    /// Checkpoint directory; finished sizes are written and later resumed.
    pub work_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeCounts {
    pub size: u8,
    pub reduced: u64,
    pub total: u64,
}

#[derive(Debug, Clone)]
pub struct PipelineRun {
    /// Counts of every size known to the run, seeds included, ascending.
    pub counts: Vec<SizeCounts>,
    /// The last two size sets.
    pub sets: BTreeMap<u8, BitSlice>,
    /// Largest size taken from an existing checkpoint, if any.
    pub resumed_at: Option<u8>,
    pub storage: Storage,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct ManifestEntry {
    size: u8,
    file: String,
    crc: u64,
    reduced: u64,
    total: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct Manifest {
    version: u32,
    n: u8,
    arch: String,
    order: u8,
    scheme: u8,
    storage: Storage,
    sizes: Vec<ManifestEntry>,
}

impl Manifest {
    fn for_space(space: &SearchSpace, storage: Storage) -> Self {
        Manifest {
            version: 1,
            n: space.width().get(),
            arch: space.ctx().arch().name().to_string(),
            order: space.ctx().order().id(),
            scheme: space.scheme().id(),
            storage,
            sizes: Vec::new(),
        }
    }

    fn same_space(&self, other: &Manifest) -> bool {
        (self.version, self.n, &self.arch, self.order, self.scheme, self.storage)
            == (other.version, other.n, &other.arch, other.order, other.scheme, other.storage)
    }
}

fn resolve_storage(space: &SearchSpace, cfg: &PipelineConfig) -> Result<Storage, SearchError> {
    let dense = BitSlice::dense_bytes(space.len());
    let storage = match cfg.storage {
        StorageMode::Auto if dense <= AUTO_DENSE_BYTES => Storage::Dense,
        StorageMode::Auto | StorageMode::Sparse => Storage::Sparse,
        StorageMode::Dense => Storage::Dense,
    };
    if storage == Storage::Dense {
        if dense > DENSE_LIMIT_BYTES && !cfg.allow_huge_dense {
            return Err(SearchError::DenseRefused { bytes: dense });
        }
        // candidates, canonized, and the two live size sets
        let needed = 4 * dense;
        if let Some(budget) = cfg.budget_bytes.filter(|&b| needed > b) {
            return Err(SearchError::BudgetExceeded {
                needed,
                budget,
                completed: Vec::new(),
            });
        }
    }
    Ok(storage)
}

/// Size sets `from_size - 1` (empty for size 0) and `from_size`, taken from
/// a table's level lists.
pub fn seed_slices(
    space: &SearchSpace,
    table: &CanonTable,
    from_size: u8,
    storage: Storage,
) -> Result<(BitSlice, BitSlice), SearchError> {
    let tctx = table.ctx();
    let sctx = space.ctx();
    if (tctx.width(), tctx.arch(), tctx.order()) != (sctx.width(), sctx.arch(), sctx.order()) {
        return Err(SearchError::Unsupported("seed table is for a different space".into()));
    }
    if from_size > table.k() {
        return Err(SearchError::Unsupported(format!(
            "seed size {from_size} is beyond the table depth {}",
            table.k()
        )));
    }
    let level = |s: u8| -> Result<BitSlice, SearchError> {
        let items = table
            .level(s as usize)
            .iter()
            .map(|&w| space.canonical_index(PermWord(w)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(BitSlice::from_indices(0, space.len(), items, storage))
    };
    let prev = if from_size == 0 {
        BitSlice::empty(0, space.len(), storage)
    } else {
        level(from_size - 1)?
    };
    Ok((prev, level(from_size)?))
}

fn size_file(size: u8) -> String {
    format!("size-{size:02}.rvbv")
}

struct Checkpoint {
    dir: PathBuf,
    manifest: Manifest,
}

impl Checkpoint {
    fn open(dir: &Path, fresh: Manifest) -> Result<Self, SearchError> {
        fs::create_dir_all(dir)?;
        let path = dir.join(MANIFEST_NAME);
        let manifest = if path.exists() {
            let m: Manifest = serde_json::from_str(&fs::read_to_string(&path)?)?;
            if !m.same_space(&fresh) {
                return Err(SearchError::Manifest(format!(
                    "{} belongs to a different configuration",
                    path.display()
                )));
            }
            m
        } else {
            fresh
        };
        Ok(Checkpoint {
            dir: dir.to_path_buf(),
            manifest,
        })
    }

    fn header(&self, size: u8, space: &SearchSpace) -> BitFileHeader {
        BitFileHeader {
            width: space.width(),
            arch: space.ctx().arch(),
            scheme: space.scheme().id(),
            size,
        }
    }

    fn record(&mut self, space: &SearchSpace, set: &BitSlice, counts: SizeCounts) -> Result<(), SearchError> {
        if self.manifest.sizes.iter().any(|e| e.size == counts.size) {
            return Ok(());
        }
        let file = size_file(counts.size);
        let crc = write_bits(&self.dir.join(&file), self.header(counts.size, space), set)?;
        self.manifest.sizes.push(ManifestEntry {
            size: counts.size,
            file,
            crc,
            reduced: counts.reduced,
            total: counts.total,
        });
        self.manifest.sizes.sort_by_key(|e| e.size);
        let tmp = self.dir.join(format!("{MANIFEST_NAME}.tmp"));
        fs::write(&tmp, serde_json::to_string_pretty(&self.manifest)?)?;
        fs::rename(tmp, self.dir.join(MANIFEST_NAME))?;
        Ok(())
    }

    fn load(&self, size: u8, space: &SearchSpace) -> Result<BitSlice, SearchError> {
        let e = self
            .manifest
            .sizes
            .iter()
            .find(|e| e.size == size)
            .ok_or_else(|| SearchError::Manifest(format!("size {size} is not recorded")))?;
        let path = self.dir.join(&e.file);
        let (h, set, crc) = read_bits(&path)?;
        if h != self.header(size, space) || crc != e.crc || set.count() != e.reduced {
            return Err(SearchError::Format {
                path,
                msg: "contents disagree with the manifest".into(),
            });
        }
        Ok(set)
    }

    fn completed(&self) -> Vec<u8> {
        self.manifest.sizes.iter().map(|e| e.size).collect()
    }
}

/// Extends the seeds `(size from_size - 1, size from_size)` one size at a
/// time up to `to_size`, or until a size comes out empty when `to_size` is
/// `None`.
pub fn run_pipeline(
    space: &SearchSpace,
    seeds: (BitSlice, BitSlice),
    from_size: u8,
    to_size: Option<u8>,
    cfg: &PipelineConfig,
) -> Result<PipelineRun, SearchError> {
    let storage = resolve_storage(space, cfg)?;
    let len = space.len();
    let env = StageEnv {
        exec: cfg.exec,
        storage,
        budget: cfg.budget_bytes,
    };
    let slices = BitSlice::split_range(len, cfg.slices.max(1));
    let (mut prev, mut cur) = seeds;
    for s in [&prev, &cur] {
        if (s.lo(), s.hi()) != (0, len) {
            return Err(SearchError::LengthMismatch {
                a_lo: 0,
                a_hi: len,
                b_lo: s.lo(),
                b_hi: s.hi(),
            });
        }
    }
    prev = prev.into_storage(storage);
    cur = cur.into_storage(storage);

    let mut counts = Vec::new();
    let count = |size: u8, set: &BitSlice| {
        let (reduced, total) = stage_counting(space, set);
        SizeCounts { size, reduced, total }
    };
    if from_size > 0 {
        counts.push(count(from_size - 1, &prev));
    }
    counts.push(count(from_size, &cur));
    let mut k = from_size;

    let mut checkpoint = match &cfg.work_dir {
        Some(dir) => Some(Checkpoint::open(dir, Manifest::for_space(space, storage))?),
        None => None,
    };
    let mut resumed_at = None;
    if let Some(cp) = checkpoint.as_mut() {
        if from_size > 0 {
            cp.record(space, &prev, counts[0])?;
        }
        cp.record(space, &cur, *counts.last().unwrap())?;
        // continue from the largest recorded size reachable from the seeds
        let mut last = k;
        while cp.manifest.sizes.iter().any(|e| e.size == last + 1) && to_size.is_none_or(|t| last < t) {
            last += 1;
        }
        if last > k {
            prev = cp.load(last - 1, space)?;
            cur = cp.load(last, space)?;
            for e in &cp.manifest.sizes {
                if e.size > k && e.size <= last {
                    counts.push(SizeCounts {
                        size: e.size,
                        reduced: e.reduced,
                        total: e.total,
                    });
                }
            }
            k = last;
            resumed_at = Some(last);
        }
    }

    let with_progress = |e: SearchError, cp: &Option<Checkpoint>, counts: &[SizeCounts]| match e {
        SearchError::BudgetExceeded { needed, budget, .. } => SearchError::BudgetExceeded {
            needed,
            budget,
            completed: cp
                .as_ref()
                .map_or_else(|| counts.iter().map(|c| c.size).collect(), Checkpoint::completed),
        },
        e => e,
    };

    while to_size.is_none_or(|t| k < t) {
        let step = || -> Result<BitSlice, SearchError> {
            let mut parts = Vec::with_capacity(slices.len());
            for &(lo, hi) in &slices {
                parts.push(stage_composition(space, &cur, lo, hi, cfg.composition, &env)?);
            }
            let candidates = BitSlice::concat(parts, storage)?;
            let mut next = Vec::with_capacity(slices.len());
            for &(lo, hi) in &slices {
                let canon = stage_canonization(space, &candidates, lo, hi, &env)?;
                next.push(stage_subtraction(&canon, &cur, &prev)?);
            }
            BitSlice::concat(next, storage)
        };
        let next = step().map_err(|e| with_progress(e, &checkpoint, &counts))?;
        if next.is_empty() && to_size.is_none() {
            break;
        }
        k += 1;
        let c = count(k, &next);
        if let Some(cp) = checkpoint.as_mut() {
            cp.record(space, &next, c)?;
        }
        counts.push(c);
        prev = std::mem::replace(&mut cur, next);
    }

    let mut sets = BTreeMap::new();
    if k > 0 {
        sets.insert(k - 1, prev);
    }
    sets.insert(k, cur);
    Ok(PipelineRun {
        counts,
        sets,
        resumed_at,
        storage,
    })
}
