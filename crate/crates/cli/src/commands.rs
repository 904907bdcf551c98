// SPDX-License-Identifier: Apache-2.0

use std::fmt::Write;
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, ensure, Context as _};
use revsynth::searchall::{
    run_pipeline, seed_slices, CompositionMode, ExecConfig, PipelineConfig, SearchSpace, Storage, StorageMode,
};
use revsynth::table::{file_digest, load, save};
use revsynth::{parse_circuit, parse_truth_table, synthesize, Width};
use serde_json::json;

use crate::experiments::{benchmark_report, random_report};
use crate::linear::{linear_report, worked_function};
use crate::opts::{GlobalOpts, SearchallArgs, StorageArg};
use crate::tables::{bound, build, context, hex, obtain};
use crate::Outcome;

/// Depth used when `--k` is absent: enough for every function of the width.
pub fn default_k(width: Width) -> u8 {
    match width.lines() {
        4 => 7,
        3 => 5,
        _ => 3,
    }
}

fn require_four(g: &GlobalOpts, what: &str) -> anyhow::Result<()> {
    ensure!(g.n == 4, "{what} is defined for n=4 only");
    Ok(())
}

pub fn cmd_bfs(g: &GlobalOpts, out: Option<&Path>) -> anyhow::Result<Outcome> {
    let Some(k) = g.k else {
        bail!("bfs needs --k");
    };
    let ctx = context(g)?;
    let loaded = build(ctx, k, g)?;
    let t = &loaded.table;
    let dest = out.or(g.tables.as_deref());
    if let Some(path) = dest {
        save(t, path).with_context(|| format!("writing {}", path.display()))?;
    }
    let reduced = t.reduced_counts();
    let total = t.total_counts().to_vec();
    let mut text = String::new();
    let _ = writeln!(text, "n={} arch={} k={k}", g.n, g.arch.name());
    let _ = writeln!(text, "{:>4} {:>14} {:>16}", "size", "reduced", "total");
    for (s, (r, n)) in reduced.iter().zip(&total).enumerate() {
        let _ = writeln!(text, "{s:>4} {r:>14} {n:>16}");
    }
    let _ = writeln!(
        text,
        "{} entries, {} bytes in memory, built in {:.2} s, digest {}",
        t.entry_count(),
        t.bytes(),
        loaded.built_secs.unwrap_or(0.0),
        hex(loaded.digest)
    );
    if let Some(p) = dest {
        let _ = writeln!(text, "written to {}", p.display());
    }
    let json = json!({
        "command": "bfs",
        "n": g.n,
        "arch": g.arch.name(),
        "k": k,
        "reduced": reduced,
        "total": total,
        "entries": t.entry_count(),
        "build_secs": loaded.built_secs,
        "digest": hex(loaded.digest),
        "path": dest.map(|p| p.display().to_string()),
    });
    Ok(Outcome { pass: true, text, json })
}

pub fn cmd_synth(g: &GlobalOpts, spec: &str) -> anyhow::Result<Outcome> {
    let (f, width) = parse_truth_table(spec)?;
    let loaded = obtain(g, width, default_k(width))?;
    let t = &loaded.table;
    let l = bound(g, t);
    let t0 = Instant::now();
    let r = synthesize(f, t, l)?;
    let secs = t0.elapsed().as_secs_f64();
    let circuit = r.circuit.to_string();
    let method = serde_json::to_value(r.method)?;
    let text = format!(
        "size {} ({})\n{}\n",
        r.size,
        method.as_str().unwrap_or_default(),
        if circuit.is_empty() { "(empty circuit)" } else { &circuit }
    );
    let json = json!({
        "command": "synth",
        "spec": f.display(width).to_string(),
        "size": r.size,
        "circuit": circuit,
        "method": method,
        "stats": r.stats,
        "k": t.k(),
        "L": l,
        "secs": secs,
        "table_digest": hex(loaded.digest),
    });
    Ok(Outcome { pass: true, text, json })
}

pub fn cmd_verify(spec: &str, circuit: &str) -> anyhow::Result<Outcome> {
    let (f, width) = parse_truth_table(spec)?;
    let c = parse_circuit(circuit, width)?;
    let got = c.simulate();
    let pass = got == f;
    let mut text = format!("{}\nsimulated {}\n", if pass { "PASS" } else { "FAIL" }, got.display(width));
    let mut diff = Vec::new();
    for x in 0..width.points() as u8 {
        if got.get(x) != f.get(x) {
            let _ = writeln!(text, "  input {x}: expected {}, got {}", f.get(x), got.get(x));
            diff.push(json!({"input": x, "expected": f.get(x), "got": got.get(x)}));
        }
    }
    let json = json!({
        "command": "verify",
        "pass": pass,
        "gates": c.len(),
        "simulated": got.display(width).to_string(),
        "diff": diff,
    });
    Ok(Outcome { pass, text, json })
}

pub fn cmd_linear(g: &GlobalOpts) -> anyhow::Result<Outcome> {
    require_four(g, "linear")?;
    let loaded = obtain(g, Width::FOUR, 6)?;
    let t = &loaded.table;
    ensure!(t.k() >= 5, "linear functions need up to 10 gates: use a table of depth 5 or more");
    let l = bound(g, t);
    let (mut report, agree) = linear_report(t, l);
    report.table_digest = hex(loaded.digest);
    let worked = synthesize(worked_function(), t, l)?.size;
    let pass = agree && report.failures.is_empty();
    let mut text = report.render();
    let _ = writeln!(
        text,
        "gate closure and affine maps {}; a,b,c,d -> b+1,a+c+1,d+1,a needs {worked} gates",
        if agree { "agree" } else { "DISAGREE" }
    );
    let mut json = serde_json::to_value(&report)?;
    json["generators_agree"] = json!(agree);
    json["worked_function_size"] = json!(worked);
    Ok(Outcome { pass, text, json })
}

pub fn cmd_random(g: &GlobalOpts, samples: usize) -> anyhow::Result<Outcome> {
    require_four(g, "random")?;
    let loaded = obtain(g, Width::FOUR, default_k(Width::FOUR))?;
    let t = &loaded.table;
    let mut report = random_report(t, samples, g.seed, bound(g, t));
    report.table_digest = hex(loaded.digest);
    let mut text = report.render();
    if let Some(m) = report.mode() {
        let _ = writeln!(text, "most frequent size {m}");
    }
    let json = serde_json::to_value(&report)?;
    Ok(Outcome {
        pass: true,
        text,
        json,
    })
}

pub fn cmd_benchmarks(g: &GlobalOpts) -> anyhow::Result<Outcome> {
    require_four(g, "benchmarks")?;
    let loaded = obtain(g, Width::FOUR, default_k(Width::FOUR))?;
    let t = &loaded.table;
    let report = benchmark_report(t, bound(g, t));
    let mut json = serde_json::to_value(&report)?;
    json["table_digest"] = json!(hex(loaded.digest));
    Ok(Outcome {
        pass: report.pass,
        text: report.render(),
        json,
    })
}

pub fn cmd_searchall(g: &GlobalOpts, a: &SearchallArgs) -> anyhow::Result<Outcome> {
    let ctx = context(g)?;
    let width = ctx.width();
    let space = SearchSpace::new(ctx.clone())?;
    let seeds_table = if g.tables.as_deref().is_some_and(Path::exists) {
        let mut any_k = g.clone();
        any_k.k = None;
        obtain(&any_k, width, a.from)?
    } else {
        build(ctx, a.from, g)?
    };
    let cfg = PipelineConfig {
        slices: a.slices.max(1),
        exec: ExecConfig {
            workers: g.threads.unwrap_or(ExecConfig::default().workers),
            collectors: a.collectors.max(1),
            ..ExecConfig::default()
        },
        storage: match a.storage {
            StorageArg::Auto => StorageMode::Auto,
            StorageArg::Dense => StorageMode::Dense,
            StorageArg::Sparse => StorageMode::Sparse,
        },
        composition: if a.naive {
            CompositionMode::Naive
        } else {
            CompositionMode::Shortcut
        },
        budget_bytes: g.budget_bytes,
        allow_huge_dense: a.i_have_terabytes,
        work_dir: a.work_dir.clone(),
    };
    let seed_storage = match cfg.storage {
        StorageMode::Dense => Storage::Dense,
        _ => Storage::Sparse,
    };
    let t0 = Instant::now();
    let seeds = seed_slices(&space, &seeds_table.table, a.from, seed_storage)?;
    let run = run_pipeline(&space, seeds, a.from, a.to, &cfg)?;
    let secs = t0.elapsed().as_secs_f64();
    let mut text = String::new();
    let _ = writeln!(
        text,
        "n={} arch={} index space {} ({:?} storage, {} slices)",
        g.n,
        g.arch.name(),
        space.len(),
        run.storage,
        cfg.slices
    );
    if let Some(r) = run.resumed_at {
        let _ = writeln!(text, "resumed from the checkpointed size {r}");
    }
    let _ = writeln!(text, "{:>4} {:>14} {:>16}", "size", "reduced", "total");
    for c in &run.counts {
        let _ = writeln!(text, "{:>4} {:>14} {:>16}", c.size, c.reduced, c.total);
    }
    let _ = writeln!(text, "{secs:.2} s");
    let json = json!({
        "command": "searchall",
        "n": g.n,
        "arch": g.arch.name(),
        "counts": run.counts,
        "resumed_at": run.resumed_at,
        "slices": cfg.slices,
        "secs": secs,
        "seed_table_digest": hex(seeds_table.digest),
    });
    Ok(Outcome { pass: true, text, json })
}

pub fn cmd_table_info(g: &GlobalOpts) -> anyhow::Result<Outcome> {
    let Some(path) = g.tables.as_deref() else {
        bail!("table-info needs --tables");
    };
    let t = load(path).with_context(|| format!("loading {}", path.display()))?;
    let digest = file_digest(path)?;
    let reduced = t.reduced_counts();
    let total = t.total_counts().to_vec();
    let ctx = t.ctx();
    let mut text = String::new();
    let _ = writeln!(
        text,
        "{}: n={} arch={} order={:?} k={}",
        path.display(),
        ctx.width().lines(),
        ctx.arch().name(),
        ctx.order(),
        t.k()
    );
    let _ = writeln!(text, "{:>4} {:>14} {:>16}", "size", "reduced", "total");
    for (s, (r, n)) in reduced.iter().zip(&total).enumerate() {
        let _ = writeln!(text, "{s:>4} {r:>14} {n:>16}");
    }
    let _ = writeln!(
        text,
        "{} entries in {} slots (load {:.3}), file digest {}",
        t.entry_count(),
        t.slots().slot_count(),
        t.slots().load(),
        hex(digest)
    );
    let json = json!({
        "command": "table-info",
        "path": path.display().to_string(),
        "n": ctx.width().lines(),
        "arch": ctx.arch().name(),
        "order": format!("{:?}", ctx.order()),
        "k": t.k(),
        "reduced": reduced,
        "total": total,
        "entries": t.entry_count(),
        "file_digest": hex(digest),
    });
    Ok(Outcome { pass: true, text, json })
}
