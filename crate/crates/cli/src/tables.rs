// SPDX-License-Identifier: Apache-2.0

//! Getting a table: from the `--tables` file when present, otherwise built.

use std::time::Instant;

use anyhow::{bail, Context as _};
use revsynth::table::{bfs_build, load_for, payload_digest, save, BfsOptions, CanonTable};
use revsynth::{Context, Width};

use crate::opts::GlobalOpts;

pub struct Loaded {
    pub table: CanonTable,
    pub digest: u64,
    pub built_secs: Option<f64>,
}

/// The context selected by `--n` and `--arch`.
pub fn context(g: &GlobalOpts) -> anyhow::Result<Context> {
    let width = Width::new(g.n).map_err(|e| anyhow::anyhow!("--n: {e}"))?;
    Ok(Context::new(width, g.arch))
}

pub fn build(ctx: Context, k: u8, g: &GlobalOpts) -> anyhow::Result<Loaded> {
    let t0 = Instant::now();
    let table = bfs_build(ctx, k, &BfsOptions {
        budget_bytes: g.budget_bytes,
    })?;
    let built_secs = Some(t0.elapsed().as_secs_f64());
    let digest = payload_digest(&table);
    Ok(Loaded {
        table,
        digest,
        built_secs,
    })
}

/// Loads `--tables` if it exists, else builds at depth `--k` (or
/// `default_k`) and writes the file when a path was given.
pub fn obtain(g: &GlobalOpts, width: Width, default_k: u8) -> anyhow::Result<Loaded> {
    let ctx = Context::new(width, g.arch);
    if let Some(path) = g.tables.as_deref().filter(|p| p.exists()) {
        let table = load_for(path, &ctx).with_context(|| format!("loading {}", path.display()))?;
        if let Some(k) = g.k.filter(|&k| k != table.k()) {
            bail!("{} has depth {}, but --k {k} was requested", path.display(), table.k());
        }
        let digest = payload_digest(&table);
        return Ok(Loaded {
            table,
            digest,
            built_secs: None,
        });
    }
    let loaded = build(ctx, g.k.unwrap_or(default_k), g)?;
    if let Some(path) = &g.tables {
        save(&loaded.table, path).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(loaded)
}

/// `--L`, defaulting to twice the table depth.
pub fn bound(g: &GlobalOpts, t: &CanonTable) -> u8 {
    g.l.unwrap_or(2 * t.k())
}

pub fn hex(d: u64) -> String {
    format!("{d:#018x}")
}
