// SPDX-License-Identifier: Apache-2.0

//! Minimal circuits: walking the table for sizes up to its depth `k`, and a
//! meet-in-the-middle search for sizes `k+1..=L`.

use std::sync::OnceLock;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::catalog::HARDEST;
use crate::context::Context;
use crate::gate::{transform_circuit, Architecture, Circuit, Gate};
use crate::perm::{PermWord, Width};
use crate::table::{CanonTable, Placement};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FindError {
    #[error("function is not in the table")]
    NotInTable,
    #[error("size of the function is greater than {l}")]
    SizeExceedsL { l: u8 },
    #[error("search bound L={l} must satisfy k <= L <= 2k for a depth-{k} table")]
    BadBound { k: u8, l: u8 },
    #[error("function {0} is not a permutation at the table's width")]
    NotReachable(String),
    #[error("table is inconsistent: {0}")]
    Corrupt(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    TableWalk,
    MeetInMiddle,
    HardestFallback,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    /// Candidate functions composed during the shell search.
    pub compositions: u64,
    /// Canonical forms computed, reconstruction included.
    pub canonicalizations: u64,
    /// Hash table probes, reconstruction included.
    pub lookups: u64,
    /// Shells searched completely without a hit.
    pub missed_shells: u8,
}

#[derive(Debug, Clone)]
pub struct SynthesisResult {
    pub circuit: Circuit,
    pub size: usize,
    pub method: Method,
    pub stats: SearchStats,
}

fn check_width(f: PermWord, width: Width) -> Result<(), FindError> {
    if f.is_valid(width) {
        Ok(())
    } else {
        Err(FindError::NotReachable(f.display(Width::FOUR).to_string()))
    }
}

/// A minimal circuit for a function whose class is in `t`, one lookup per gate.
pub fn reconstruct(f: PermWord, t: &CanonTable) -> Result<Circuit, FindError> {
    let mut stats = SearchStats::default();
    reconstruct_counted(f, t, &mut stats)
}

fn reconstruct_counted(f: PermWord, t: &CanonTable, stats: &mut SearchStats) -> Result<Circuit, FindError> {
    let ctx = t.ctx();
    check_width(f, ctx.width())?;
    let group = ctx.group();
    let mut front: Vec<Gate> = Vec::new();
    let mut back: Vec<Gate> = Vec::new();
    let mut cur = f;
    let mut expect: Option<u8> = None;
    loop {
        let (rep, wit) = group.canonical(cur);
        stats.canonicalizations += 1;
        stats.lookups += 1;
        let ann = t.get(rep).ok_or(FindError::NotInTable)?;
        if let Some(e) = expect {
            if ann.size != e {
                return Err(FindError::Corrupt(format!("size {} where {e} was expected", ann.size)));
            }
        }
        let Some(bar) = ann.gate else {
            if rep != PermWord::IDENTITY {
                return Err(FindError::Corrupt("gateless entry besides the identity".into()));
            }
            break;
        };
        let slot = group.slot(wit.sigma).expect("witness is in the group");
        let lambda = *ctx.library().gate(ctx.conj().conj(bar, slot));
        // the gate sits at the end of cur's circuit exactly when the
        // annotated side and the inversion agree
        if (ann.placement == Placement::Last) != wit.inverted {
            back.push(lambda);
            cur = cur.compose(lambda.word_on(ctx.width()));
        } else {
            front.push(lambda);
            cur = lambda.word_on(ctx.width()).compose(cur);
        }
        expect = Some(ann.size - 1);
    }
    back.reverse();
    front.extend(back);
    Ok(Circuit::from_gates(ctx.width(), front).expect("library gates fit the width"))
}

fn verified(f: PermWord, r: SynthesisResult) -> Result<SynthesisResult, FindError> {
    if r.circuit.simulate() != f {
        return Err(FindError::Corrupt(format!(
            "circuit `{}` does not simulate to the target",
            r.circuit
        )));
    }
    Ok(r)
}

/// Minimal circuit for `f` of size at most `l`, where `k <= l <= 2k`.
pub fn find_min_circuit(f: PermWord, t: &CanonTable, l: u8) -> Result<SynthesisResult, FindError> {
    let k = t.k();
    if l < k || l > 2 * k {
        return Err(FindError::BadBound { k, l });
    }
    check_width(f, t.ctx().width())?;
    if let Some(r) = table_walk(f, t)? {
        return Ok(r);
    }
    meet_in_middle(f, t, l)
}

fn table_walk(f: PermWord, t: &CanonTable) -> Result<Option<SynthesisResult>, FindError> {
    let mut stats = SearchStats::default();
    let rep = t.ctx().group().canonical_word(f);
    stats.canonicalizations += 1;
    stats.lookups += 1;
    if !t.contains_rep(rep) {
        return Ok(None);
    }
    let circuit = reconstruct_counted(f, t, &mut stats)?;
    let size = circuit.len();
    verified(
        f,
        SynthesisResult {
            circuit,
            size,
            method: Method::TableWalk,
            stats,
        },
    )
    .map(Some)
}

const MIN_REPS_PER_TASK: usize = 64;

fn meet_in_middle(f: PermWord, t: &CanonTable, l: u8) -> Result<SynthesisResult, FindError> {
    let ctx = t.ctx();
    let group = ctx.group();
    let order = group.order();
    let slots = t.slots();
    let k = t.k();
    let mut stats = SearchStats {
        canonicalizations: 1,
        lookups: 1,
        ..Default::default()
    };
    for i in 1..=(l - k) as usize {
        let level = t.level(i);
        let hit = level
            .par_iter()
            .enumerate()
            .with_min_len(MIN_REPS_PER_TASK)
            .find_map_first(|(ri, &r)| {
                let mut members = [0u64; 48];
                let n = group.class_in_witness_order(PermWord(r), &mut members);
                let mut keys = [0u64; 48];
                for j in 0..n {
                    let h = f.compose(PermWord(members[j]));
                    keys[j] = order.key(group.canonical_key(h));
                    slots.prefetch(keys[j]);
                }
                (0..n)
                    .find(|&j| slots.contains(keys[j]))
                    .map(|j| (ri, j, PermWord(members[j])))
            });
        match hit {
            None => {
                let tried = t.total_counts()[i];
                stats.compositions += tried;
                stats.canonicalizations += tried;
                stats.lookups += tried;
                stats.missed_shells += 1;
            }
            Some((ri, j, g)) => {
                let mut members = [0u64; 48];
                let before: u64 = level[..ri]
                    .iter()
                    .map(|&r| group.class_in_witness_order(PermWord(r), &mut members) as u64)
                    .sum();
                let tried = before + j as u64 + 1;
                stats.compositions += tried;
                stats.canonicalizations += tried;
                stats.lookups += tried;
                let h = f.compose(g);
                let c_h = reconstruct_counted(h, t, &mut stats)?;
                let c_g = reconstruct_counted(g, t, &mut stats)?;
                let circuit = c_h.then(&c_g.reversed());
                let size = circuit.len();
                return verified(
                    f,
                    SynthesisResult {
                        circuit,
                        size,
                        method: Method::MeetInMiddle,
                        stats,
                    },
                );
            }
        }
    }
    Err(FindError::SizeExceedsL { l })
}

struct HardestIndex {
    ctx: Context,
    // representative and a circuit for it
    reps: Vec<(PermWord, Circuit)>,
}

fn hardest_index() -> &'static HardestIndex {
    static INDEX: OnceLock<HardestIndex> = OnceLock::new();
    INDEX.get_or_init(|| {
        let ctx = Context::new(Width::FOUR, Architecture::Full);
        let reps = HARDEST
            .iter()
            .map(|h| {
                let c = h.parsed().expect("catalog circuit parses");
                assert_eq!(c.simulate(), h.word(), "catalog circuit must implement its function");
                let (rep, wit) = ctx.group().canonical(h.word());
                let back = wit.inverse();
                let c_rep = transform_circuit(&c, back.sigma, back.inverted);
                assert_eq!(c_rep.simulate(), rep);
                (rep, c_rep)
            })
            .collect();
        HardestIndex { ctx, reps }
    })
}

/// A 15-gate circuit for `f` if it is equivalent to one of the catalogued
/// functions that need 15 gates (4 lines, full library only).
pub fn classify_hardest(f: PermWord) -> Option<SynthesisResult> {
    if !f.is_valid(Width::FOUR) {
        return None;
    }
    let idx = hardest_index();
    let (rep, wit) = idx.ctx.group().canonical(f);
    let (_, c) = idx.reps.iter().find(|(r, _)| *r == rep)?;
    let circuit = transform_circuit(c, wit.sigma, wit.inverted);
    debug_assert_eq!(circuit.simulate(), f);
    Some(SynthesisResult {
        size: circuit.len(),
        circuit,
        method: Method::HardestFallback,
        stats: SearchStats {
            canonicalizations: 1,
            ..Default::default()
        },
    })
}

/// Table walk, then the 15-gate catalogue (4-line full library), then the
/// meet-in-the-middle search up to `l`.
pub fn synthesize(f: PermWord, t: &CanonTable, l: u8) -> Result<SynthesisResult, FindError> {
    let k = t.k();
    if l < k || l > 2 * k {
        return Err(FindError::BadBound { k, l });
    }
    check_width(f, t.ctx().width())?;
    if let Some(r) = table_walk(f, t)? {
        return Ok(r);
    }
    if t.ctx().width() == Width::FOUR && t.ctx().arch() == Architecture::Full {
        if let Some(r) = classify_hardest(f) {
            return verified(f, r);
        }
    }
    meet_in_middle(f, t, l)
}
