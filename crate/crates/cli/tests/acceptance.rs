// SPDX-License-Identifier: Apache-2.0

//! End-to-end acceptance run: one PASS/FAIL line per criterion.

use std::collections::{BTreeMap, HashMap};
use std::process::ExitCode;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use revsynth::catalog::{HARDEST, HARDEST_EXAMPLE, LNN_BENCHMARKS};
use revsynth::equiv::GateConjTable;
use revsynth::findopt::Method;
use revsynth::searchall::bits::{read_bits, write_bits, BitFileHeader};
use revsynth::searchall::{
    is_almost_reduced, run_pipeline, seed_slices, stage_composition, AlmostReduced, CompositionMode,
    ExecConfig, IndexScheme, PipelineConfig, SearchSpace, StageEnv, Storage,
};
use revsynth::table::{bfs_build, load_for, save, BfsOptions, CanonTable, HashSlots};
use revsynth::{
    find_min_circuit, synthesize, Architecture, Circuit, Context, EquivWitness, Gate, LinePerm, OrderConvention, PermWord, Width,
};
use revsynth_cli::commands::cmd_bfs;
use revsynth_cli::experiments::{benchmark_report, random_report};
use revsynth_cli::linear::{linear_report, worked_function};
use revsynth_cli::GlobalOpts;

struct Verdict {
    id: &'static str,
    name: &'static str,
    pass: bool,
    detail: String,
    secs: f64,
}

fn check(id: &'static str, name: &'static str, f: impl FnOnce() -> (bool, String)) -> Verdict {
    let t0 = Instant::now();
    let (pass, detail) = f();
    let v = Verdict {
        id,
        name,
        pass,
        detail,
        secs: t0.elapsed().as_secs_f64(),
    };
    println!(
        "[{}] {} {}: {} ({:.1} s)",
        if v.pass { "PASS" } else { "FAIL" },
        v.id,
        v.name,
        v.detail,
        v.secs
    );
    v
}

fn info(msg: impl AsRef<str>) {
    println!("       info: {}", msg.as_ref());
}

fn build(width: Width, arch: Architecture, k: u8) -> CanonTable {
    let t0 = Instant::now();
    let t = bfs_build(Context::new(width, arch), k, &BfsOptions::default()).expect("table build");
    info(format!(
        "built n={} {} k={k} table: {} entries in {:.1} s",
        width.lines(),
        arch.name(),
        t.entry_count(),
        t0.elapsed().as_secs_f64()
    ));
    t
}

fn bfs_counts(arch: Architecture) -> (Vec<u64>, Vec<u64>) {
    let g = GlobalOpts {
        arch,
        k: Some(6),
        ..GlobalOpts::default()
    };
    let out = cmd_bfs(&g, None).expect("bfs command");
    let get = |key: &str| -> Vec<u64> {
        out.json[key]
            .as_array()
            .unwrap()
            .iter()
            .map(|v| v.as_u64().unwrap())
            .collect()
    };
    (get("reduced"), get("total"))
}

fn criterion_1() -> Verdict {
    check("1", "class counts for sizes 0-6 (full)", || {
        let (r, t) = bfs_counts(Architecture::Full);
        let pass = r == [1, 4, 33, 425, 6538, 101_983, 1_482_686]
            && t == [1, 32, 784, 16_204, 294_507, 4_807_552, 70_763_560];
        (pass, format!("reduced {r:?} total {t:?}"))
    })
}

fn criterion_2() -> Verdict {
    check("2", "class counts for sizes 0-6 (lnn)", || {
        let (r, t) = bfs_counts(Architecture::Lnn);
        let pass = r == [1, 10, 100, 1083, 11_885, 124_628, 1_226_080]
            && t == [1, 20, 303, 3947, 46_108, 493_788, 4_886_991];
        (pass, format!("reduced {r:?} total {t:?}"))
    })
}

fn criterion_3(full7: &CanonTable) -> Verdict {
    check("3", "linear function histogram", || {
        let (report, agree) = linear_report(full7, 14);
        let hist = report.descending();
        let want = [138, 13_555, 84_225, 118_424, 72_062, 26_182, 6589, 1206, 162, 16, 1];
        let worked = synthesize(worked_function(), full7, 14).map(|r| r.size);
        let pass = agree && report.failures.is_empty() && hist == want && worked == Ok(10);
        (
            pass,
            format!(
                "{} functions, generators agree: {agree}, sizes 10..0 {hist:?}, worked function {:?}",
                report.count, worked
            ),
        )
    })
}

const FULL_SIZES: [(&str, usize); 13] = [
    ("4_49", 12),
    ("4bit-7-8", 7),
    ("decode42", 10),
    ("hwb4", 11),
    ("imark", 7),
    ("mperk", 9),
    ("oc5", 11),
    ("oc6", 12),
    ("oc7", 13),
    ("oc8", 12),
    ("nth_prime4_inc", 11),
    ("rd32", 4),
    ("shift4", 4),
];

fn criterion_4(full7: &CanonTable) -> Verdict {
    check("4", "benchmark optimal sizes (full, k=7, L=14)", || {
        let report = benchmark_report(full7, 14);
        let found: BTreeMap<&str, Option<usize>> = report.rows.iter().map(|r| (r.name.as_str(), r.found)).collect();
        let sizes_ok = FULL_SIZES.iter().all(|(n, s)| found.get(n) == Some(&Some(*s)));
        let pass = report.pass && sizes_ok && report.rows.len() == 13;
        let listing: Vec<String> = report
            .rows
            .iter()
            .map(|r| format!("{}={}", r.name, r.found.map_or("-".into(), |f| f.to_string())))
            .collect();
        (pass, listing.join(" "))
    })
}

fn criterion_5(full7: &CanonTable) -> Verdict {
    check("5", "the five 15-gate classes", || {
        let space = SearchSpace::new(Context::new(Width::FOUR, Architecture::Full)).unwrap();
        let mut notes = Vec::new();
        let mut simulate_ok = 0;
        let mut ar_fixed = 0;
        let mut fallback_ok = 0;
        for h in HARDEST {
            let f = h.word();
            let c = h.parsed().unwrap();
            if c.len() == 15 && c.simulate() == f {
                simulate_ok += 1;
            }
            let (m, _) = space.find_almost_reduced_equivalent(f).unwrap();
            let roundtrip = space
                .ctx()
                .group()
                .equivalence_class(f)
                .iter()
                .all(|(q, _)| space.find_almost_reduced_equivalent(*q).unwrap().0 == f);
            if m == f && roundtrip {
                ar_fixed += 1;
            }
            if let Ok(r) = synthesize(f, full7, 14) {
                if r.size == 15 && r.method == Method::HardestFallback && r.circuit.simulate() == f {
                    fallback_ok += 1;
                }
            }
        }
        for (label, order) in [("word", OrderConvention::Word), ("value-lex", OrderConvention::ValueLex)] {
            let ctx = Context::with_order(Width::FOUR, Architecture::Full, order).unwrap();
            let fixed = HARDEST.iter().filter(|h| ctx.group().canonical_word(h.word()) == h.word()).count();
            notes.push(format!("{label}-order class minimum fixes {fixed}/5"));
        }
        // row 3's circuit reversed, then every line renamed a->c, b->a, c->b, d->d
        let sigma = LinePerm::new([2, 0, 1, 3]).unwrap();
        let example = PermWord::encode(&HARDEST_EXAMPLE, Width::FOUR).unwrap();
        let renamed: Vec<Gate> = HARDEST[2].parsed().unwrap().reversed().gates().iter().map(|g| g.relabel(sigma)).collect();
        let worked = Circuit::from_gates(Width::FOUR, renamed).unwrap().simulate() == example
            && EquivWitness { sigma, inverted: true }.apply(HARDEST[2].word()) == example;
        let pass = simulate_ok == 5 && ar_fixed == 5 && fallback_ok == 5 && worked;
        info(format!(
            "the printed rows are the smallest almost-reduced members of their classes; {}",
            notes.join(", ")
        ));
        (
            pass,
            format!(
                "circuits simulate {simulate_ok}/5, fixed points of the almost-reduced canonical form {ar_fixed}/5, \
                 15-gate synthesis {fallback_ok}/5, worked example reaches row 3: {worked}"
            ),
        )
    })
}

fn criterion_6(lnn7: &CanonTable) -> Verdict {
    check("6", "lnn benchmark sizes (k=7)", || {
        let lib = lnn7.ctx().library();
        let printed_ok = LNN_BENCHMARKS.iter().all(|b| {
            let c = b.parsed().unwrap();
            c.simulate() == b.word() && c.len() == b.size as usize && c.gates().iter().all(|g| lib.contains(g))
        });
        let report = benchmark_report(lnn7, 14);
        let synthesized = report.rows.iter().filter(|r| !r.verify_only).count();
        let verify_only: Vec<&str> = report.rows.iter().filter(|r| r.verify_only).map(|r| r.name.as_str()).collect();
        let listing: Vec<String> = report
            .rows
            .iter()
            .map(|r| format!("{}={}", r.name, r.found.map_or(format!("({})", r.expected), |f| f.to_string())))
            .collect();
        (
            printed_ok && report.pass,
            format!(
                "printed circuits simulate: {printed_ok}; {synthesized} rows synthesized at printed size, verify-only {verify_only:?}; {}",
                listing.join(" ")
            ),
        )
    })
}

type F3 = [u8; 8];

/// Uncanonicalized breadth-first search over 8-value arrays.
fn naive_sizes_3() -> HashMap<F3, u8> {
    let mut gates = Vec::new();
    for target in 0..3u8 {
        for controls in 0u8..8 {
            if controls & (1 << target) != 0 || controls.count_ones() > 2 {
                continue;
            }
            let g: F3 = std::array::from_fn(|x| if x as u8 & controls == controls { x as u8 ^ 1 << target } else { x as u8 });
            gates.push(g);
        }
    }
    let id: F3 = std::array::from_fn(|x| x as u8);
    let mut dist = HashMap::from([(id, 0u8)]);
    let mut frontier = vec![id];
    let mut d = 0;
    while !frontier.is_empty() {
        d += 1;
        let mut next = Vec::new();
        for f in &frontier {
            for g in &gates {
                let h: F3 = std::array::from_fn(|x| g[f[x] as usize]);
                dist.entry(h).or_insert_with(|| {
                    next.push(h);
                    d
                });
            }
        }
        frontier = next;
    }
    dist
}

fn criterion_7() -> Verdict {
    check("7", "n=3 exhaustive oracle", || {
        let dist = naive_sizes_3();
        let ctx = Context::new(Width::THREE, Architecture::Full);
        let t = bfs_build(ctx.clone(), 8, &BfsOptions::default()).unwrap();
        let t4 = bfs_build(ctx.clone(), 4, &BfsOptions::default()).unwrap();
        let mut oracle_totals = vec![0u64; 9];
        let (mut a, mut b) = (0, 0);
        for (f, &d) in &dist {
            oracle_totals[d as usize] += 1;
            let p = PermWord::encode(f, Width::THREE).unwrap();
            if t.size_of(p) == Some(d) {
                a += 1;
            }
            if let Ok(r) = find_min_circuit(p, &t4, 8) {
                if r.size == d as usize && r.circuit.simulate() == p {
                    b += 1;
                }
            }
        }
        let space = SearchSpace::new(ctx).unwrap();
        let seeds = seed_slices(&space, &t, 0, Storage::Dense).unwrap();
        let run = run_pipeline(&space, seeds, 0, None, &PipelineConfig::default()).unwrap();
        let pipe_totals: Vec<u64> = run.counts.iter().map(|c| c.total).collect();
        let c = pipe_totals == oracle_totals;
        let n = dist.len();
        (
            n == 40320 && a == n && b == n && c,
            format!("{n} functions; table sizes agree {a}, circuits optimal {b}, pipeline per-size totals {pipe_totals:?}"),
        )
    })
}

fn criterion_8(full7: &CanonTable) -> Verdict {
    check("8", "random sample statistics (300, k=7, L=14)", || {
        let r = random_report(full7, 300, 2012, 14);
        let pass = r.failures.is_empty() && r.count == 300 && (r.mean - 11.94).abs() <= 0.15 && r.mode() == Some(12);
        let again = random_report(full7, 20, 2012, 14);
        let repeat = again.histogram == random_report(full7, 20, 2012, 14).histogram;
        (
            pass && repeat,
            format!(
                "mean {:.4} (standard error {:.4}), mode {:?}, histogram {:?}, repeatable: {repeat}",
                r.mean,
                r.std_error,
                r.mode(),
                r.histogram
            ),
        )
    })
}

fn random_perm(rng: &mut ChaCha8Rng) -> PermWord {
    let mut v: Vec<u8> = (0..16).collect();
    v.shuffle(rng);
    PermWord::encode(&v, Width::FOUR).unwrap()
}

fn criterion_9(full4: &CanonTable) -> Verdict {
    check("9", "invariant suites", || {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut parts: Vec<(String, bool)> = Vec::new();
        let ctx = full4.ctx();
        let g = ctx.group();

        let perms: Vec<PermWord> = (0..20_000).map(|_| random_perm(&mut rng)).collect();
        let laws = perms.windows(2).all(|w| {
            let (p, q) = (w[0], w[1]);
            p.compose(p.inverse()) == PermWord::IDENTITY && p.compose(q).inverse() == q.inverse().compose(p.inverse())
        });
        parts.push(("group laws".into(), laws));

        let enc = perms.iter().all(|p| {
            let text = p.display(Width::FOUR).to_string();
            revsynth::parse_truth_table(&text).map(|(q, _)| q) == Ok(*p)
                && PermWord::encode(&p.decode(Width::FOUR), Width::FOUR) == Ok(*p)
        });
        parts.push(("encoding roundtrips".into(), enc));

        let orbits = perms.iter().all(|&p| 48 % g.class_size(p) == 0);
        parts.push(("orbit sizes divide 48".into(), orbits));

        let canon = perms.iter().take(5000).all(|&p| {
            let (rep, wit) = g.canonical(p);
            g.canonical(rep).0 == rep
                && wit.apply(rep) == p
                && g.class_words(p).iter().all(|&w| g.canonical_word(PermWord(w)) == rep)
        });
        parts.push(("canonical idempotence and class constancy".into(), canon));

        let conj = GateConjTable::new(g, ctx.library()).is_ok_and(|t| {
            t.entries() == 32 * 24
                && (0..32u8).all(|id| {
                    g.relabelings().iter().enumerate().all(|(s, &sigma)| {
                        ctx.library().gate(t.conj(id, s)).word() == ctx.library().gate(id).word().conjugate(sigma)
                    })
                })
        });
        parts.push(("gate conjugation closure 32x24".into(), conj));

        let s = AlmostReduced;
        let edges = (0..21u64).flat_map(|p| [p * 87_178_291_200, (p + 1) * 87_178_291_200 - 1]);
        let bij = edges.chain((0..1_000_000).map(|_| rng.random_range(0..s.len()))).all(|i| {
            let p = s.from_index(i).unwrap();
            is_almost_reduced(p) && s.index(p).unwrap() == i
        }) && s.len() == 21 * 87_178_291_200;
        parts.push(("index bijection".into(), bij));

        let mut slots = HashSlots::for_entries(1000);
        let mut reference = HashMap::new();
        let mut hash_ok = true;
        for _ in 0..300_000 {
            let key = rng.random_range(1..5_000_000u64);
            let aux = rng.random::<u16>() & 0x7FF;
            let fresh = slots.insert(key, aux);
            let was_new = !reference.contains_key(&key);
            reference.entry(key).or_insert(aux);
            hash_ok &= fresh == was_new;
        }
        hash_ok &= slots.len() == reference.len() && reference.iter().all(|(&k, &v)| slots.get(k) == Some(v));
        hash_ok &= (0..10_000).all(|_| {
            let k = rng.random_range(5_000_000..u64::MAX);
            slots.get(k).is_none()
        });
        parts.push(("hash table vs reference map".into(), hash_ok));

        let dir = tempfile::tempdir().unwrap();
        let tpath = dir.path().join("t.rvtb");
        let table_rt = save(full4, &tpath).is_ok()
            && load_for(&tpath, ctx).is_ok_and(|b| b.levels() == full4.levels());
        let space = SearchSpace::new(ctx.clone()).unwrap();
        let (_, cur) = seed_slices(&space, full4, 4, Storage::Sparse).unwrap();
        let bpath = dir.path().join("s.rvbv");
        let header = BitFileHeader {
            width: Width::FOUR,
            arch: Architecture::Full,
            scheme: space.scheme().id(),
            size: 4,
        };
        let bits_rt = write_bits(&bpath, header, &cur).is_ok()
            && read_bits(&bpath).is_ok_and(|(h, b, _)| h == header && b == cur);
        parts.push(("table and bit file roundtrips".into(), table_rt && bits_rt));

        let mut files = Vec::new();
        for (slices, workers) in [(1, 0), (3, 1), (8, 4)] {
            let wd = tempfile::tempdir().unwrap();
            let cfg = PipelineConfig {
                slices,
                exec: ExecConfig {
                    workers,
                    collectors: 3,
                    ..ExecConfig::default()
                },
                work_dir: Some(wd.path().to_path_buf()),
                ..PipelineConfig::default()
            };
            let seeds = seed_slices(&space, full4, 3, Storage::Sparse).unwrap();
            run_pipeline(&space, seeds, 3, Some(4), &cfg).unwrap();
            files.push(std::fs::read(wd.path().join("size-04.rvbv")).unwrap());
        }
        parts.push(("pipeline slice and worker determinism".into(), files.windows(2).all(|w| w[0] == w[1])));

        let env = StageEnv::default();
        let shortcut = (0..=3u8).all(|k| {
            let (_, cur) = seed_slices(&space, full4, k, Storage::Sparse).unwrap();
            let a = stage_composition(&space, &cur, 0, space.len(), CompositionMode::Shortcut, &env).unwrap();
            let b = stage_composition(&space, &cur, 0, space.len(), CompositionMode::Naive, &env).unwrap();
            a == b
        });
        parts.push(("shortcut composition equals naive at sizes 0-3".into(), shortcut));

        let pass = parts.iter().all(|(_, ok)| *ok);
        let failed: Vec<&str> = parts.iter().filter(|(_, ok)| !ok).map(|(n, _)| n.as_str()).collect();
        let detail = if failed.is_empty() {
            format!("{} suites: {}", parts.len(), parts.iter().map(|(n, _)| n.as_str()).collect::<Vec<_>>().join(", "))
        } else {
            format!("failed: {failed:?}")
        };
        (pass, detail)
    })
}

fn extra_pipeline(full5: &CanonTable) -> Verdict {
    check("extra", "bit-set pipeline sizes 5 to 6 (n=4, full)", || {
        let space = SearchSpace::new(full5.ctx().clone()).unwrap();
        let seeds = seed_slices(&space, full5, 5, Storage::Sparse).unwrap();
        let run = run_pipeline(&space, seeds, 5, Some(6), &PipelineConfig::default()).unwrap();
        let c = *run.counts.last().unwrap();
        ((c.size, c.reduced, c.total) == (6, 1_482_686, 70_763_560), format!("size 6: {} reduced, {} total", c.reduced, c.total))
    })
}

fn main() -> ExitCode {
    // cargo passes harness flags such as --nocapture; none apply here
    let t0 = Instant::now();
    let mut verdicts = vec![criterion_1(), criterion_2(), criterion_7()];
    {
        let full5 = build(Width::FOUR, Architecture::Full, 5);
        verdicts.push(criterion_9(&full5));
        verdicts.push(extra_pipeline(&full5));
    }
    {
        let full7 = build(Width::FOUR, Architecture::Full, 7);
        verdicts.push(criterion_3(&full7));
        verdicts.push(criterion_4(&full7));
        verdicts.push(criterion_5(&full7));
        verdicts.push(criterion_8(&full7));
    }
    {
        let lnn7 = build(Width::FOUR, Architecture::Lnn, 7);
        verdicts.push(criterion_6(&lnn7));
    }
    verdicts.sort_by_key(|v| v.id.parse::<u32>().unwrap_or(u32::MAX));
    let passed = verdicts.iter().filter(|v| v.pass).count();
    println!("summary:");
    for v in &verdicts {
        println!("  {} {} {}", if v.pass { "PASS" } else { "FAIL" }, v.id, v.name);
    }
    println!("{passed}/{} passed in {:.1} s", verdicts.len(), t0.elapsed().as_secs_f64());
    if passed == verdicts.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
