// SPDX-License-Identifier: Apache-2.0

//! Random sampling and the benchmark suite.

use std::collections::BTreeMap;
use std::fmt::Write;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use revsynth::catalog::{Benchmark, FULL_BENCHMARKS, LNN_BENCHMARKS};
use revsynth::table::CanonTable;
use revsynth::{synthesize, Architecture, FindError, PermWord, Width};
use serde::Serialize;

use crate::report::{ExperimentReport, Params};

/// `samples` uniformly random 4-bit functions from a seeded ChaCha8 stream,
/// each a Fisher-Yates shuffle of the identity.
pub fn random_functions(samples: usize, seed: u64) -> Vec<PermWord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples)
        .map(|_| {
            let mut v: Vec<u8> = (0..16).collect();
            v.shuffle(&mut rng);
            PermWord::encode(&v, Width::FOUR).expect("a shuffle is a permutation")
        })
        .collect()
}

fn failure_key(e: &FindError) -> String {
    match e {
        FindError::SizeExceedsL { .. } => "size exceeds L".into(),
        other => other.to_string(),
    }
}

pub fn random_report(t: &CanonTable, samples: usize, seed: u64, l: u8) -> ExperimentReport {
    let t0 = Instant::now();
    let fs = random_functions(samples, seed);
    let results: Vec<Result<usize, FindError>> = fs.par_iter().map(|&f| synthesize(f, t, l).map(|r| r.size)).collect();
    let mut sizes = Vec::with_capacity(samples);
    let mut failures = BTreeMap::new();
    for r in results {
        match r {
            Ok(s) => sizes.push(s),
            Err(e) => *failures.entry(failure_key(&e)).or_insert(0) += 1,
        }
    }
    let params = Params {
        n: 4,
        arch: t.ctx().arch().name().into(),
        k: t.k(),
        l,
        seed: Some(seed),
        samples: Some(samples),
    };
    let mut report = ExperimentReport::new("random", params, &sizes, failures);
    report.wall_secs = t0.elapsed().as_secs_f64();
    report
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub name: String,
    pub expected: u8,
    /// Size found by synthesis; absent for rows only verified.
    pub found: Option<usize>,
    pub verify_only: bool,
    pub circuit: String,
    pub pass: bool,
    pub secs: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub arch: String,
    pub k: u8,
    #[serde(rename = "L")]
    pub l: u8,
    pub rows: Vec<BenchRow>,
    pub pass: bool,
}

impl BenchReport {
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "benchmarks: arch={} k={} L={}", self.arch, self.k, self.l);
        let _ = writeln!(s, "{:<16} {:>8} {:>6}  {:<6} circuit", "name", "expected", "found", "result");
        for r in &self.rows {
            let found = r.found.map_or_else(|| "-".into(), |f| f.to_string());
            let verdict = match (r.pass, r.verify_only) {
                (true, false) => "PASS",
                (true, true) => "PASS*",
                (false, _) => "FAIL",
            };
            let _ = writeln!(s, "{:<16} {:>8} {:>6}  {:<6} {}", r.name, r.expected, found, verdict, r.circuit);
        }
        if self.rows.iter().any(|r| r.verify_only) {
            let _ = writeln!(s, "* beyond L: the catalog circuit was simulated instead");
        }
        s
    }
}

pub fn benchmarks(arch: Architecture) -> &'static [Benchmark] {
    match arch {
        Architecture::Full => &FULL_BENCHMARKS,
        Architecture::Lnn => &LNN_BENCHMARKS,
    }
}

/// Synthesizes every benchmark whose catalog size is within `l`, and checks
/// the catalog circuit of the others by simulation.
pub fn benchmark_report(t: &CanonTable, l: u8) -> BenchReport {
    let arch = t.ctx().arch();
    let lib = t.ctx().library();
    let rows: Vec<BenchRow> = benchmarks(arch)
        .iter()
        .map(|b| {
            let t0 = Instant::now();
            let f = b.word();
            if b.size > l {
                let (pass, circuit) = match b.parsed() {
                    Ok(c) => (c.simulate() == f && c.gates().iter().all(|g| lib.contains(g)), c.to_string()),
                    Err(e) => (false, e.to_string()),
                };
                return BenchRow {
                    name: b.name.into(),
                    expected: b.size,
                    found: None,
                    verify_only: true,
                    circuit,
                    pass,
                    secs: t0.elapsed().as_secs_f64(),
                };
            }
            let (found, circuit, pass) = match synthesize(f, t, l) {
                Ok(r) => {
                    let ok = r.size == b.size as usize
                        && r.circuit.simulate() == f
                        && r.circuit.gates().iter().all(|g| lib.contains(g));
                    (Some(r.size), r.circuit.to_string(), ok)
                }
                Err(e) => (None, e.to_string(), false),
            };
            BenchRow {
                name: b.name.into(),
                expected: b.size,
                found,
                verify_only: false,
                circuit,
                pass,
                secs: t0.elapsed().as_secs_f64(),
            }
        })
        .collect();
    let pass = rows.iter().all(|r| r.pass);
    BenchReport {
        arch: arch.name().into(),
        k: t.k(),
        l,
        rows,
        pass,
    }
}
